//! Exact polynomial algebra on a triangle in Bernstein form.
//!
//! A polynomial of degree `k` is stored by its coefficients against the
//! monomials `λ^α = λ0^α0 λ1^α1 λ2^α2`, one per node of the degree-`k`
//! lattice in lexicographic order. Derivatives, products, traces and
//! integrals all act directly on these coefficients.

use std::sync::OnceLock;

use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_linalg::Rational;
use crate::lattice::{enumerate_lattice, index_of, lattice_size, MultiIndex};

/// A point or vector in the plane with rational coordinates.
pub type Point = [Rational; 2];

const FACTORIAL_TABLE: usize = 96;

/// `n!` as an exact integer.
pub fn factorial(n: usize) -> BigInt {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = vec![BigInt::one()];
        for i in 1..FACTORIAL_TABLE {
            let next = &v[i - 1] * BigInt::from(i);
            v.push(next);
        }
        v
    });
    if n < t.len() {
        t[n].clone()
    } else {
        (t.len()..=n).fold(t[t.len() - 1].clone(), |acc, i| acc * BigInt::from(i))
    }
}

fn multi_factorial(a: &MultiIndex) -> BigInt {
    factorial(a[0]) * factorial(a[1]) * factorial(a[2])
}

fn lattice_cached(k: usize) -> &'static [MultiIndex] {
    static CACHE: OnceLock<Vec<Vec<MultiIndex>>> = OnceLock::new();
    let c = CACHE.get_or_init(|| (0..48).map(enumerate_lattice).collect());
    assert!(k < c.len(), "degree {k} exceeds the supported range");
    &c[k]
}

/// A triangle with exact vertex coordinates and barycentric gradients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleGeom {
    /// Vertex coordinates.
    pub vertices: [Point; 3],
    /// Twice the signed area.
    pub signed_area2: Rational,
    /// Gradients of the three barycentric coordinates.
    pub grad_lambda: [Point; 3],
}

impl TriangleGeom {
    /// Builds the geometry, rejecting degenerate triangles.
    pub fn new(vertices: [Point; 3]) -> Result<Self> {
        let [p0, p1, p2] = &vertices;
        let d = (&p1[0] - &p0[0]) * (&p2[1] - &p0[1]) - (&p2[0] - &p0[0]) * (&p1[1] - &p0[1]);
        if d.is_zero() {
            return Err(Error::Geometry("triangle has zero area".into()));
        }
        let g = |a: &Point, b: &Point| -> Point { [(&a[1] - &b[1]) / &d, (&b[0] - &a[0]) / &d] };
        let grad_lambda = [g(p1, p2), g(p2, p0), g(p0, p1)];
        Ok(TriangleGeom {
            vertices,
            signed_area2: d,
            grad_lambda,
        })
    }

    /// The reference triangle `(0,0), (1,0), (0,1)`.
    pub fn reference() -> Self {
        let z = Rational::zero;
        let o = Rational::one;
        Self::new([[z(), z()], [o(), z()], [z(), o()]]).expect("reference triangle")
    }

    /// Barycentric coordinates of `p`.
    pub fn barycentric(&self, p: &Point) -> [Rational; 3] {
        let l = |i: usize, j: usize| {
            let g = &self.grad_lambda[i];
            let v = &self.vertices[j];
            &g[0] * (&p[0] - &v[0]) + &g[1] * (&p[1] - &v[1])
        };
        // λ_i vanishes at the other two vertices, so anchor each at one of them.
        let l0 = l(0, 1);
        let l1 = l(1, 2);
        let l2 = l(2, 0);
        [l0, l1, l2]
    }

    /// Absolute value of twice the area.
    pub fn area2_abs(&self) -> Rational {
        self.signed_area2.abs()
    }

    /// Geometry of the edge between local vertices `a` and `b`, directed from `a` to `b`.
    pub fn edge(&self, a: usize, b: usize) -> Result<EdgeGeom> {
        if a > 2 || b > 2 || a == b {
            return Err(Error::Topology(format!("({a},{b}) is not an edge of the triangle")));
        }
        let t = [
            &self.vertices[b][0] - &self.vertices[a][0],
            &self.vertices[b][1] - &self.vertices[a][1],
        ];
        let n = [t[1].clone(), -t[0].clone()];
        Ok(EdgeGeom {
            a,
            b,
            tangent: t,
            normal: n,
        })
    }
}

/// A triangle edge with its direction and unnormalized tangent and normal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeGeom {
    /// Local index of the start vertex.
    pub a: usize,
    /// Local index of the end vertex.
    pub b: usize,
    /// Difference of the end and start coordinates.
    pub tangent: Point,
    /// The tangent rotated by `(x, y) -> (y, -x)`.
    pub normal: Point,
}

impl EdgeGeom {
    /// Local index of the vertex opposite this edge.
    pub fn opposite(&self) -> usize {
        3 - self.a - self.b
    }
}

/// Polynomial on a triangle as coefficients against `λ^α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BernsteinPoly {
    degree: usize,
    coeffs: Vec<Rational>,
}

impl BernsteinPoly {
    /// The zero polynomial of degree `k`.
    pub fn zero(k: usize) -> Self {
        BernsteinPoly {
            degree: k,
            coeffs: vec![Rational::zero(); lattice_size(k)],
        }
    }

    /// The constant `c` written at degree `k`.
    pub fn constant(k: usize, c: Rational) -> Self {
        let mut p = Self {
            degree: 0,
            coeffs: vec![c],
        };
        p = p.elevate(k);
        p
    }

    /// The monomial `λ^α`.
    pub fn monomial(a: &MultiIndex) -> Self {
        let mut p = Self::zero(a[0] + a[1] + a[2]);
        p.coeffs[index_of(a)] = Rational::one();
        p
    }

    /// The barycentric coordinate `λ_i`.
    pub fn lambda(i: usize) -> Self {
        let mut a = [0; 3];
        a[i] = 1;
        Self::monomial(&a)
    }

    /// Builds a polynomial from its coefficient vector.
    pub fn from_coeffs(k: usize, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != lattice_size(k) {
            return Err(Error::Dimension(format!(
                "degree {k} needs {} coefficients, got {}",
                lattice_size(k),
                coeffs.len()
            )));
        }
        Ok(BernsteinPoly { degree: k, coeffs })
    }

    /// Polynomial degree of the representation.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficients in lattice order.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `λ^α`.
    pub fn coeff(&self, a: &MultiIndex) -> &Rational {
        &self.coeffs[index_of(a)]
    }

    /// True when every coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Nonzero terms as `(node, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        lattice_cached(self.degree)
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
    }

    /// Value at barycentric coordinates `l`.
    pub fn eval_bary(&self, l: &[Rational; 3]) -> Rational {
        let pw = |i: usize| -> Vec<Rational> {
            let mut v = vec![Rational::one()];
            for n in 1..=self.degree {
                let next = &v[n - 1] * &l[i];
                v.push(next);
            }
            v
        };
        let p = [pw(0), pw(1), pw(2)];
        self.terms().fold(Rational::zero(), |acc, (a, c)| {
            acc + c * &p[0][a[0]] * &p[1][a[1]] * &p[2][a[2]]
        })
    }

    /// Value at the Cartesian point `p` of triangle `t`.
    pub fn evaluate(&self, t: &TriangleGeom, p: &Point) -> Rational {
        self.eval_bary(&t.barycentric(p))
    }

    /// The same polynomial written at degree `m >= degree` using `Σ λ_i = 1`.
    pub fn elevate(&self, m: usize) -> Self {
        assert!(m >= self.degree, "cannot lower degree by elevation");
        let mut p = self.clone();
        while p.degree < m {
            let mut q = Self::zero(p.degree + 1);
            for (a, c) in p.terms() {
                for i in 0..3 {
                    let mut b = *a;
                    b[i] += 1;
                    q.coeffs[index_of(&b)] += c;
                }
            }
            p = q;
        }
        p
    }

    /// Sum with `other`, performed at the larger degree.
    pub fn add(&self, other: &Self) -> Self {
        let m = self.degree.max(other.degree);
        let mut a = self.elevate(m);
        let b = other.elevate(m);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x += y;
        }
        a
    }

    /// `self + s * other`, at the larger degree.
    pub fn add_scaled(&self, s: &Rational, other: &Self) -> Self {
        if s.is_zero() {
            return self.clone();
        }
        self.add(&other.scale(s))
    }

    /// Multiplication by a scalar.
    pub fn scale(&self, s: &Rational) -> Self {
        BernsteinPoly {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Additive inverse.
    pub fn neg(&self) -> Self {
        BernsteinPoly {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Exact product, of degree equal to the sum of the degrees.
    pub fn mul(&self, other: &Self) -> Self {
        let mut q = Self::zero(self.degree + other.degree);
        for (a, c) in self.terms() {
            for (b, d) in other.terms() {
                let g = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                q.coeffs[index_of(&g)] += c * d;
            }
        }
        q
    }

    /// Partial derivative in Cartesian direction `j`.
    pub fn partial(&self, t: &TriangleGeom, j: usize) -> Self {
        if self.degree == 0 {
            return Self::zero(0);
        }
        let mut q = Self::zero(self.degree - 1);
        for (a, c) in self.terms() {
            for i in 0..3 {
                if a[i] == 0 {
                    continue;
                }
                let g = &t.grad_lambda[i][j];
                if g.is_zero() {
                    continue;
                }
                let mut b = *a;
                b[i] -= 1;
                q.coeffs[index_of(&b)] += c * g * Rational::from_integer(BigInt::from(a[i]));
            }
        }
        q
    }

    /// Cartesian derivative `∂x^β0 ∂y^β1`; fails when the order exceeds the degree.
    pub fn cartesian_derivative(&self, t: &TriangleGeom, beta: [usize; 2]) -> Result<Self> {
        if beta[0] + beta[1] > self.degree {
            return Err(Error::Parameter(format!(
                "derivative order {} exceeds degree {}",
                beta[0] + beta[1],
                self.degree
            )));
        }
        let mut p = self.clone();
        for _ in 0..beta[0] {
            p = p.partial(t, 0);
        }
        for _ in 0..beta[1] {
            p = p.partial(t, 1);
        }
        Ok(p)
    }

    /// Exact integral over the triangle.
    pub fn integrate(&self, t: &TriangleGeom) -> Rational {
        let denom = factorial(self.degree + 2);
        let s = self.terms().fold(Rational::zero(), |acc, (a, c)| {
            acc + c * Rational::from_integer(multi_factorial(a))
        });
        s * t.area2_abs() / Rational::from_integer(denom)
    }

    /// Exact integral of the product `self * other` without forming it.
    pub fn integrate_product(&self, other: &Self, t: &TriangleGeom) -> Rational {
        let denom = factorial(self.degree + other.degree + 2);
        let mut s = Rational::zero();
        for (a, c) in self.terms() {
            for (b, d) in other.terms() {
                let g = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                s += c * d * Rational::from_integer(multi_factorial(&g));
            }
        }
        s * t.area2_abs() / Rational::from_integer(denom)
    }

    /// Restriction to the edge from local vertex `e.a` to `e.b`, written in
    /// the edge barycentric coordinates of its endpoints.
    pub fn trace_to_edge(&self, e: &EdgeGeom) -> EdgePoly {
        let c = e.opposite();
        let k = self.degree;
        let mut coeffs = vec![Rational::zero(); k + 1];
        for (a, v) in self.terms() {
            if a[c] == 0 {
                coeffs[a[e.a]] += v;
            }
        }
        EdgePoly { degree: k, coeffs }
    }

    /// Value at local vertex `i`.
    pub fn vertex_value(&self, i: usize) -> Rational {
        let mut a = [0; 3];
        a[i] = self.degree;
        self.coeff(&a).clone()
    }
}

/// Polynomial on an edge with coefficients against `λ_a^i λ_b^(k-i)`, `i = 0..=k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePoly {
    /// Degree of the representation.
    pub degree: usize,
    /// Coefficient of `λ_a^i λ_b^(k-i)` at position `i`.
    pub coeffs: Vec<Rational>,
}

impl EdgePoly {
    /// Integral with the parametric measure, where the edge has length one.
    pub fn integrate(&self) -> Rational {
        let k = self.degree;
        let d = Rational::from_integer(factorial(k + 1));
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(Rational::zero(), |acc, (i, c)| {
                acc + c * Rational::from_integer(factorial(i) * factorial(k - i))
            })
            / d
    }

    /// Parametric integral of `self * λ_a^j λ_b^(m-j)`.
    pub fn moment(&self, m: usize, j: usize) -> Rational {
        let k = self.degree;
        let d = Rational::from_integer(factorial(k + m + 1));
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(Rational::zero(), |acc, (i, c)| {
                acc + c * Rational::from_integer(factorial(i + j) * factorial(k - i + m - j))
            })
            / d
    }

    /// True when every coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

/// Value type of a polynomial field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// A scalar.
    Scalar,
    /// A vector in the plane.
    Vector2,
    /// A general 2x2 matrix stored as `11, 12, 21, 22`.
    Matrix22,
    /// A symmetric 2x2 matrix stored as `11, 12, 22`.
    Sym22,
}

impl Shape {
    /// Number of stored components.
    pub fn components(&self) -> usize {
        match self {
            Shape::Scalar => 1,
            Shape::Vector2 => 2,
            Shape::Matrix22 => 4,
            Shape::Sym22 => 3,
        }
    }

    fn matrix_slot(&self, i: usize, j: usize) -> usize {
        match self {
            Shape::Matrix22 => 2 * i + j,
            Shape::Sym22 => i + j,
            _ => panic!("matrix entry of a {self:?} field"),
        }
    }
}

/// Polynomial field with scalar, vector or matrix values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyField {
    /// Value type.
    pub shape: Shape,
    /// One polynomial per stored component, all of the same degree.
    pub comps: Vec<BernsteinPoly>,
}

/// Differential and algebraic operators between fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffOp {
    /// Scalar to vector, `(∂1 u, ∂2 u)`.
    Grad,
    /// Scalar to vector, `(∂2 u, -∂1 u)`.
    CurlScalar,
    /// Vector to scalar, `∂1 v2 - ∂2 v1`.
    RotVector,
    /// Vector to scalar, `∂1 v1 + ∂2 v2`.
    DivVector,
    /// Vector to matrix whose row `i` is the curl of `v_i`.
    CurlVectorRowwise,
    /// Vector to matrix whose row `i` is the gradient of `v_i`.
    GradVector,
    /// Matrix to vector whose entry `i` is the divergence of row `i`.
    DivMatrixRowwise,
    /// Matrix to vector whose entry `i` is the rot of row `i`.
    RotMatrixRowwise,
    /// Matrix to symmetric matrix, `(τ + τᵀ)/2`.
    Sym,
    /// Matrix to scalar, `(τ21 - τ12)/2`.
    Sskw,
    /// Scalar to matrix `[[0, -v], [v, 0]]`.
    Mskw,
    /// Scalar to symmetric matrix, curl of the curl.
    Air,
    /// Scalar to symmetric matrix of second derivatives.
    Hess,
    /// Vector to symmetric matrix, symmetric part of the row-wise curl.
    SymCurl,
    /// Vector to symmetric matrix, symmetric part of the row-wise gradient.
    SymGrad,
    /// Matrix to scalar, divergence of the row-wise divergence.
    DivDiv,
    /// Matrix to scalar, rot of the row-wise rot.
    RotRot,
    /// Vector to vector, curl of the divergence.
    CurlDiv,
}

impl DiffOp {
    /// Number of derivatives taken.
    pub fn order(&self) -> usize {
        match self {
            DiffOp::Sym | DiffOp::Sskw | DiffOp::Mskw => 0,
            DiffOp::Air | DiffOp::Hess | DiffOp::DivDiv | DiffOp::RotRot | DiffOp::CurlDiv => 2,
            _ => 1,
        }
    }

    /// Output shape for input `s`, or `None` when `s` is not accepted.
    pub fn output_shape(&self, s: Shape) -> Option<Shape> {
        use DiffOp::*;
        use Shape::*;
        let matrixlike = matches!(s, Matrix22 | Sym22);
        match (self, s) {
            (Grad | CurlScalar, Scalar) => Some(Vector2),
            (RotVector | DivVector, Vector2) => Some(Scalar),
            (CurlVectorRowwise | GradVector, Vector2) => Some(Matrix22),
            (DivMatrixRowwise | RotMatrixRowwise, _) if matrixlike => Some(Vector2),
            (Sym, _) if matrixlike => Some(Sym22),
            (Sskw, _) if matrixlike => Some(Scalar),
            (Mskw, Scalar) => Some(Matrix22),
            (Air | Hess, Scalar) => Some(Sym22),
            (SymCurl | SymGrad, Vector2) => Some(Sym22),
            (DivDiv | RotRot, _) if matrixlike => Some(Scalar),
            (CurlDiv, Vector2) => Some(Vector2),
            _ => None,
        }
    }
}

fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

impl PolyField {
    /// Zero field of the given shape and degree.
    pub fn zeros(shape: Shape, k: usize) -> Self {
        PolyField {
            shape,
            comps: vec![BernsteinPoly::zero(k); shape.components()],
        }
    }

    /// Scalar field wrapping `p`.
    pub fn scalar(p: BernsteinPoly) -> Self {
        PolyField {
            shape: Shape::Scalar,
            comps: vec![p],
        }
    }

    /// Builds a field from components, lifting all of them to a common degree.
    pub fn new(shape: Shape, comps: Vec<BernsteinPoly>) -> Result<Self> {
        if comps.len() != shape.components() {
            return Err(Error::Shape(format!(
                "{shape:?} needs {} components, got {}",
                shape.components(),
                comps.len()
            )));
        }
        let m = comps.iter().map(BernsteinPoly::degree).max().unwrap_or(0);
        Ok(PolyField {
            shape,
            comps: comps.into_iter().map(|c| c.elevate(m)).collect(),
        })
    }

    /// The unit field with a one at lattice position `node` of component `comp`.
    pub fn unit(shape: Shape, k: usize, comp: usize, node: usize) -> Self {
        let mut f = Self::zeros(shape, k);
        f.comps[comp].coeffs[node] = Rational::one();
        f
    }

    /// Common degree of the components.
    pub fn degree(&self) -> usize {
        self.comps[0].degree()
    }

    /// True when every component vanishes.
    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(BernsteinPoly::is_zero)
    }

    /// Entry `(i, j)` of a matrix-valued field.
    pub fn entry(&self, i: usize, j: usize) -> &BernsteinPoly {
        &self.comps[self.shape.matrix_slot(i, j)]
    }

    /// Component-wise lift to degree `m`.
    pub fn elevate(&self, m: usize) -> Self {
        PolyField {
            shape: self.shape,
            comps: self.comps.iter().map(|c| c.elevate(m)).collect(),
        }
    }

    /// Component-wise sum of two fields of the same shape.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::Shape(format!(
                "cannot add {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        Ok(PolyField {
            shape: self.shape,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect(),
        })
    }

    /// Multiplication by a scalar.
    pub fn scale(&self, s: &Rational) -> Self {
        PolyField {
            shape: self.shape,
            comps: self.comps.iter().map(|c| c.scale(s)).collect(),
        }
    }

    /// Values of all stored components at `p`.
    pub fn evaluate(&self, t: &TriangleGeom, p: &Point) -> Vec<Rational> {
        let l = t.barycentric(p);
        self.comps.iter().map(|c| c.eval_bary(&l)).collect()
    }

    /// Componentwise Cartesian derivative.
    pub fn cartesian_derivative(&self, t: &TriangleGeom, beta: [usize; 2]) -> Result<Self> {
        Ok(PolyField {
            shape: self.shape,
            comps: self
                .comps
                .iter()
                .map(|c| c.cartesian_derivative(t, beta))
                .collect::<Result<_>>()?,
        })
    }

    /// `Σ w_j v_j` for a vector field.
    pub fn dot(&self, w: &Point) -> Result<BernsteinPoly> {
        if self.shape != Shape::Vector2 {
            return Err(Error::Shape(format!("dot product of a {:?} field", self.shape)));
        }
        Ok(self.comps[0].scale(&w[0]).add(&self.comps[1].scale(&w[1])))
    }

    /// The vector `τ w` for a matrix-valued field.
    pub fn mat_vec(&self, w: &Point) -> Result<PolyField> {
        if !matches!(self.shape, Shape::Matrix22 | Shape::Sym22) {
            return Err(Error::Shape(format!("matrix product with a {:?} field", self.shape)));
        }
        let row = |i: usize| self.entry(i, 0).scale(&w[0]).add(&self.entry(i, 1).scale(&w[1]));
        PolyField::new(Shape::Vector2, vec![row(0), row(1)])
    }

    /// The scalar `uᵀ τ w` for a matrix-valued field.
    pub fn bilinear(&self, u: &Point, w: &Point) -> Result<BernsteinPoly> {
        self.mat_vec(w)?.dot(u)
    }

    /// Exact `∫_T self : other` with the full Frobenius product.
    pub fn inner_integral(&self, other: &Self, t: &TriangleGeom) -> Result<Rational> {
        if self.shape != other.shape {
            return Err(Error::Shape(format!(
                "inner product of {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        let mut s = Rational::zero();
        for (c, (a, b)) in self.comps.iter().zip(&other.comps).enumerate() {
            let v = a.integrate_product(b, t);
            if self.shape == Shape::Sym22 && c == 1 {
                s += v.clone() + v;
            } else {
                s += v;
            }
        }
        Ok(s)
    }

    /// Applies a differential or algebraic operator.
    pub fn apply(&self, op: DiffOp, t: &TriangleGeom) -> Result<PolyField> {
        use DiffOp::*;
        let out = op
            .output_shape(self.shape)
            .ok_or_else(|| Error::Shape(format!("{op:?} does not accept a {:?} field", self.shape)))?;
        let d = |p: &BernsteinPoly, j: usize| p.partial(t, j);
        let c = &self.comps;
        let comps = match op {
            Grad => vec![d(&c[0], 0), d(&c[0], 1)],
            CurlScalar => vec![d(&c[0], 1), d(&c[0], 0).neg()],
            RotVector => vec![d(&c[1], 0).add(&d(&c[0], 1).neg())],
            DivVector => vec![d(&c[0], 0).add(&d(&c[1], 1))],
            CurlVectorRowwise => vec![d(&c[0], 1), d(&c[0], 0).neg(), d(&c[1], 1), d(&c[1], 0).neg()],
            GradVector => vec![d(&c[0], 0), d(&c[0], 1), d(&c[1], 0), d(&c[1], 1)],
            DivMatrixRowwise => (0..2)
                .map(|i| d(self.entry(i, 0), 0).add(&d(self.entry(i, 1), 1)))
                .collect(),
            RotMatrixRowwise => (0..2)
                .map(|i| d(self.entry(i, 1), 0).add(&d(self.entry(i, 0), 1).neg()))
                .collect(),
            Sym => vec![
                self.entry(0, 0).clone(),
                self.entry(0, 1).add(self.entry(1, 0)).scale(&half()),
                self.entry(1, 1).clone(),
            ],
            Sskw => vec![self.entry(1, 0).add(&self.entry(0, 1).neg()).scale(&half())],
            Mskw => vec![
                BernsteinPoly::zero(c[0].degree()),
                c[0].neg(),
                c[0].clone(),
                BernsteinPoly::zero(c[0].degree()),
            ],
            Air => {
                let (x, y) = (d(&c[0], 0), d(&c[0], 1));
                vec![d(&y, 1), d(&x, 1).neg(), d(&x, 0)]
            }
            Hess => {
                let (x, y) = (d(&c[0], 0), d(&c[0], 1));
                vec![d(&x, 0), d(&x, 1), d(&y, 1)]
            }
            SymCurl => {
                let m = self.apply(CurlVectorRowwise, t)?;
                return m.apply(Sym, t);
            }
            SymGrad => {
                let m = self.apply(GradVector, t)?;
                return m.apply(Sym, t);
            }
            DivDiv => {
                let v = self.apply(DivMatrixRowwise, t)?;
                return v.apply(DivVector, t);
            }
            RotRot => {
                let v = self.apply(RotMatrixRowwise, t)?;
                return v.apply(RotVector, t);
            }
            CurlDiv => {
                let s = self.apply(DivVector, t)?;
                return s.apply(CurlScalar, t);
            }
        };
        PolyField::new(out, comps)
    }
}

/// Free-function form of [`PolyField::apply`].
pub fn differential(p: &PolyField, t: &TriangleGeom, op: DiffOp) -> Result<PolyField> {
    p.apply(op, t)
}
