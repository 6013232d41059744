//! Degree-of-freedom families for smooth scalar, vector and tensor elements.
//!
//! A [`DoFSet`] is an ordered list of functionals built from an
//! [`ElementSpec`] without reference to any particular triangle. Binding it to
//! a [`Frame`] (a triangle plus an orientation for each of its edges) yields a
//! [`LocalElement`] holding the resolved interior moment weights, the square
//! DoF matrix over the unit Bernstein basis, and its inverse.

use std::collections::HashMap;
use std::fmt;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bernstein::{BernsteinPoly, DiffOp, EdgeGeom, PolyField, Shape, TriangleGeom};
use crate::error::{require, Error, Result};
use crate::exact_linalg::{complement_basis, invert, rank, EchelonBasis, RatMatrix, Rational};
use crate::lattice::{binom2, bubble_dim, bubble_set, lattice_size, SmoothnessPair};

/// The element families that can be built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Scalar `C^r` element with vertex jets, edge normal-derivative moments and bubbles.
    ScalarSmooth,
    /// Two copies of the scalar element, one per vector component.
    VectorSmooth,
    /// Vector element with smooth normal component and smooth divergence.
    VectorDiv,
    /// Vector element with normal continuity only, split into normal and tangential parts.
    VectorDivTn,
    /// Symmetric matrix element with smooth divergence.
    SymDiv,
    /// General matrix element with smooth divergence and double divergence.
    MatrixDivDivPlus,
    /// Symmetric matrix element with smooth divergence and double divergence.
    SymDivDivPlus,
    /// Symmetric matrix element with only double-divergence continuity.
    SymDivDivRelaxed,
}

impl Family {
    /// All families, in declaration order.
    pub const ALL: [Family; 8] = [
        Family::ScalarSmooth,
        Family::VectorSmooth,
        Family::VectorDiv,
        Family::VectorDivTn,
        Family::SymDiv,
        Family::MatrixDivDivPlus,
        Family::SymDivDivPlus,
        Family::SymDivDivRelaxed,
    ];

    /// Value type of the shape functions.
    pub fn shape(&self) -> Shape {
        match self {
            Family::ScalarSmooth => Shape::Scalar,
            Family::VectorSmooth | Family::VectorDiv | Family::VectorDivTn => Shape::Vector2,
            Family::MatrixDivDivPlus => Shape::Matrix22,
            Family::SymDiv | Family::SymDivDivPlus | Family::SymDivDivRelaxed => Shape::Sym22,
        }
    }

    /// Snake-case name used in reports and on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Family::ScalarSmooth => "scalar_smooth",
            Family::VectorSmooth => "vector_smooth",
            Family::VectorDiv => "vector_div",
            Family::VectorDivTn => "vector_div_tn",
            Family::SymDiv => "sym_div",
            Family::MatrixDivDivPlus => "matrix_divdiv_plus",
            Family::SymDivDivPlus => "sym_divdiv_plus",
            Family::SymDivDivRelaxed => "sym_divdiv_relaxed",
        }
    }

    /// Parses a snake-case family name; `scalar` is accepted for the scalar family.
    pub fn parse(s: &str) -> Result<Family> {
        if s == "scalar" {
            return Ok(Family::ScalarSmooth);
        }
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown element family {s:?}")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters of one element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElementSpec {
    /// Element family.
    pub family: Family,
    /// Polynomial degree of the shape functions.
    pub k: usize,
    /// Smoothness of the field itself.
    pub r1: SmoothnessPair,
    /// Smoothness of its divergence or double divergence; ignored by the smooth families.
    pub r2: SmoothnessPair,
}

impl ElementSpec {
    /// Spec with both smoothness pairs given.
    pub fn new(family: Family, k: usize, r1: SmoothnessPair, r2: SmoothnessPair) -> Self {
        ElementSpec { family, k, r1, r2 }
    }

    /// Scalar smooth element of degree `k` with smoothness `r`.
    pub fn scalar(k: usize, r: SmoothnessPair) -> Self {
        Self::new(Family::ScalarSmooth, k, r, SmoothnessPair::new(-1, -1))
    }

    /// Componentwise smooth vector element of degree `k` with smoothness `r`.
    pub fn vector_smooth(k: usize, r: SmoothnessPair) -> Self {
        Self::new(Family::VectorSmooth, k, r, SmoothnessPair::new(-1, -1))
    }

    /// Value type of the shape functions.
    pub fn shape(&self) -> Shape {
        self.family.shape()
    }

    /// Dimension of the full polynomial shape space.
    pub fn shape_dim(&self) -> usize {
        self.shape().components() * lattice_size(self.k)
    }
}

impl fmt::Display for ElementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::ScalarSmooth | Family::VectorSmooth => {
                write!(f, "{} k={} r={}", self.family, self.k, self.r1)
            }
            Family::VectorDivTn => write!(f, "{} k={} r1={}", self.family, self.k, self.r1),
            _ => write!(f, "{} k={} r1={} r2={}", self.family, self.k, self.r1, self.r2),
        }
    }
}

/// Entity of the triangle a functional is attached to, by local index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Entity {
    /// Local vertex.
    Vertex(usize),
    /// Local edge, opposite the local vertex with the same index.
    Edge(usize),
    /// The triangle interior.
    Interior,
}

/// Field derived from the shape function before a functional acts on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// The field itself.
    Value,
    /// Its divergence, row-wise for matrices.
    Div,
    /// Its double divergence.
    DivDiv,
}

/// Scalar extracted on an edge; `n` and `t` are the unnormalized edge normal and tangent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    /// Component of the field.
    Value(usize),
    /// `v·n`.
    DotN,
    /// `v·t`.
    DotT,
    /// Component of `τ n`.
    TauN(usize),
    /// Component of `τ t`.
    TauT(usize),
    /// `nᵀ τ n`.
    Ntn,
    /// `tᵀ τ t`.
    Ttt,
    /// `tᵀ τ n`.
    Ttn,
    /// `nᵀ div τ`.
    DivDotN,
    /// `tᵀ div τ`.
    DivDotT,
    /// Component of the divergence.
    Div(usize),
    /// The double divergence.
    DivDiv,
    /// `∂_t(tᵀ τ n) + (t·t) nᵀ div τ`.
    Trace2,
}

impl Selector {
    fn quantity(&self) -> Quantity {
        match self {
            Selector::DivDotN | Selector::DivDotT | Selector::Div(_) => Quantity::Div,
            Selector::DivDiv => Quantity::DivDiv,
            _ => Quantity::Value,
        }
    }
}

/// Polynomial fields spanning the space a quotient is taken by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Generators {
    /// The constant function.
    Constants,
    /// Linear functions.
    P1,
    /// Rigid motions `(1,0), (0,1), (-y,x)`.
    Rm,
    /// The field `(y, -x)`.
    XPerp,
}

impl Generators {
    /// Number of generators.
    pub fn count(&self) -> usize {
        match self {
            Generators::Constants | Generators::XPerp => 1,
            Generators::P1 | Generators::Rm => 3,
        }
    }

    /// The generators written on triangle `t`.
    pub fn fields(&self, t: &TriangleGeom) -> Vec<PolyField> {
        let coord = |j: usize| {
            (0..3).fold(BernsteinPoly::zero(1), |acc, i| {
                acc.add(&BernsteinPoly::lambda(i).scale(&t.vertices[i][j]))
            })
        };
        let one = || BernsteinPoly::constant(1, Rational::one());
        let zero = || BernsteinPoly::zero(1);
        let pair = |a: BernsteinPoly, b: BernsteinPoly| PolyField::new(Shape::Vector2, vec![a, b]).expect("vector");
        match self {
            Generators::Constants => vec![PolyField::scalar(BernsteinPoly::constant(0, Rational::one()))],
            Generators::P1 => (0..3).map(|i| PolyField::scalar(BernsteinPoly::lambda(i))).collect(),
            Generators::Rm => vec![pair(one(), zero()), pair(zero(), one()), pair(coord(1).neg(), coord(0))],
            Generators::XPerp => vec![pair(coord(1), coord(0).neg())],
        }
    }
}

/// A family of interior moment weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSpec {
    /// `λ^α e_c` for interior nodes of `B_deg(r)` and components `c < comps`.
    Bubble {
        /// Degree of the bubble space.
        deg: usize,
        /// Its smoothness pair.
        r: SmoothnessPair,
        /// One for scalar weights, two for vector weights.
        comps: usize,
    },
    /// `curl λ^α` for interior nodes of `B_deg(r)`.
    CurlBubble {
        /// Degree of the bubble space.
        deg: usize,
        /// Its smoothness pair.
        r: SmoothnessPair,
    },
    /// Row-wise curl of `λ^α e_c`, a matrix field.
    CurlBubbleVector {
        /// Degree of the bubble space.
        deg: usize,
        /// Its smoothness pair.
        r: SmoothnessPair,
    },
    /// `Air λ^α`, a symmetric matrix field.
    AirBubble {
        /// Degree of the bubble space.
        deg: usize,
        /// Its smoothness pair.
        r: SmoothnessPair,
    },
    /// A complement in `base` of the L² projections of the generators.
    Quotient {
        /// The ambient weight family.
        base: Box<WeightSpec>,
        /// What is quotiented out.
        by: Generators,
    },
}

impl WeightSpec {
    fn base_dim(&self) -> Result<usize> {
        let b = |deg: usize, r: SmoothnessPair| -> Result<usize> { Ok(bubble_set(deg, r)?.len()) };
        Ok(match self {
            WeightSpec::Bubble { deg, r, comps } => comps * b(*deg, *r)?,
            WeightSpec::CurlBubble { deg, r } | WeightSpec::AirBubble { deg, r } => b(*deg, *r)?,
            WeightSpec::CurlBubbleVector { deg, r } => 2 * b(*deg, *r)?,
            WeightSpec::Quotient { base, .. } => base.base_dim()?,
        })
    }

    /// Number of weights, independent of the triangle.
    pub fn dim(&self) -> Result<usize> {
        match self {
            WeightSpec::Quotient { base, by } => {
                let n = base.base_dim()?;
                if n == 0 {
                    return Ok(0);
                }
                if n < by.count() {
                    return Err(Error::Quotient(format!(
                        "weight space of dimension {n} cannot be reduced by {} generators",
                        by.count()
                    )));
                }
                Ok(n - by.count())
            }
            _ => self.base_dim(),
        }
    }

    fn base_fields(&self, t: &TriangleGeom) -> Result<Vec<PolyField>> {
        let mut out = Vec::new();
        match self {
            WeightSpec::Bubble { deg, r, comps } => {
                let nodes = bubble_set(*deg, *r)?;
                let shape = if *comps == 1 { Shape::Scalar } else { Shape::Vector2 };
                for c in 0..*comps {
                    for a in &nodes {
                        let mut f = PolyField::zeros(shape, *deg);
                        f.comps[c] = BernsteinPoly::monomial(a);
                        out.push(f);
                    }
                }
            }
            WeightSpec::CurlBubble { deg, r } => {
                for a in bubble_set(*deg, *r)? {
                    out.push(PolyField::scalar(BernsteinPoly::monomial(&a)).apply(DiffOp::CurlScalar, t)?);
                }
            }
            WeightSpec::CurlBubbleVector { deg, r } => {
                let nodes = bubble_set(*deg, *r)?;
                for c in 0..2 {
                    for a in &nodes {
                        let mut f = PolyField::zeros(Shape::Vector2, *deg);
                        f.comps[c] = BernsteinPoly::monomial(a);
                        out.push(f.apply(DiffOp::CurlVectorRowwise, t)?);
                    }
                }
            }
            WeightSpec::AirBubble { deg, r } => {
                for a in bubble_set(*deg, *r)? {
                    out.push(PolyField::scalar(BernsteinPoly::monomial(&a)).apply(DiffOp::Air, t)?);
                }
            }
            WeightSpec::Quotient { base, .. } => return base.base_fields(t),
        }
        Ok(out)
    }

    /// The weights on triangle `t`.
    ///
    /// For a quotient, the generators are projected in L² onto the base span
    /// and the lowest-index base weights completing those projections to a
    /// basis of the base span are kept.
    pub fn resolve(&self, t: &TriangleGeom) -> Result<Vec<PolyField>> {
        let base = self.base_fields(t)?;
        let WeightSpec::Quotient { by, .. } = self else {
            return Ok(base);
        };
        let n = base.len();
        if n == 0 {
            return Ok(base);
        }
        let gens = by.fields(t);
        let mut gram = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = base[i].inner_integral(&base[j], t)?;
                gram.set(i, j, v.clone());
                gram.set(j, i, v);
            }
        }
        let mut rhs = RatMatrix::zeros(n, gens.len());
        for (i, w) in base.iter().enumerate() {
            for (j, g) in gens.iter().enumerate() {
                rhs.set(i, j, w.inner_integral(g, t)?);
            }
        }
        let coeffs = crate::exact_linalg::multiply(&invert(&gram)?, &rhs)?;
        let keep = complement_basis(&coeffs, n).map_err(|_| {
            Error::Quotient(format!(
                "projections of the {by:?} generators onto the weight space are dependent"
            ))
        })?;
        Ok(keep.into_iter().map(|i| base[i].clone()).collect())
    }
}

/// What a functional measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DoFKind {
    /// A Cartesian derivative of a quantity at a vertex.
    PointDeriv {
        /// Quantity differentiated.
        quantity: Quantity,
        /// Derivative orders in `x` and `y`.
        beta: [usize; 2],
        /// Stored component of the quantity.
        component: usize,
    },
    /// `∫_e ∂_n^i(selector) λ_A^j λ_B^(m-j) ds` with the parametric measure,
    /// where `A` is the endpoint with the lower global index.
    EdgeMoment {
        /// Order `i` of the normal derivative.
        normal_order: usize,
        /// Scalar extracted from the field.
        selector: Selector,
        /// Degree `m` of the weight.
        weight_degree: usize,
        /// Index `j` of the weight.
        weight_index: usize,
    },
    /// `∫_T quantity : w` against the `slot`-th weight of interior family `family`.
    InteriorMoment {
        /// Quantity integrated.
        quantity: Quantity,
        /// Index into the interior weight families of the DoF set.
        family: usize,
        /// Position inside the resolved family.
        slot: usize,
    },
}

/// One degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DoFunctional {
    /// What it measures.
    pub kind: DoFKind,
    /// Where it lives.
    pub entity: Entity,
    /// Whether the value is shared by all triangles around the entity.
    pub shared: bool,
}

/// Number of functionals per entity class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DofCounts {
    /// Functionals at each vertex.
    pub vertex: usize,
    /// Functionals on each edge, shared or not.
    pub edge: usize,
    /// Interior functionals.
    pub interior: usize,
}

impl DofCounts {
    /// Total over a triangle.
    pub fn total(&self) -> usize {
        3 * self.vertex + 3 * self.edge + self.interior
    }
}

/// The ordered functionals of an element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoFSet {
    /// Parameters.
    pub spec: ElementSpec,
    /// Functionals: vertex blocks, then edge blocks, then interior.
    pub functionals: Vec<DoFunctional>,
    /// Interior weight families referenced by the interior moments.
    pub weights: Vec<WeightSpec>,
}

impl DoFSet {
    /// Counts per entity class, taken from the functionals.
    pub fn counts(&self) -> DofCounts {
        let c = |p: &dyn Fn(&Entity) -> bool| self.functionals.iter().filter(|d| p(&d.entity)).count();
        DofCounts {
            vertex: c(&|e| *e == Entity::Vertex(0)),
            edge: c(&|e| *e == Entity::Edge(0)),
            interior: c(&|e| *e == Entity::Interior),
        }
    }

    /// Shared functionals per vertex and per edge.
    pub fn shared_counts(&self) -> (usize, usize) {
        let c = |x: Entity| self.functionals.iter().filter(|d| d.entity == x && d.shared).count();
        (c(Entity::Vertex(0)), c(Entity::Edge(0)))
    }

    /// Number of functionals.
    pub fn len(&self) -> usize {
        self.functionals.len()
    }

    /// True when there are no functionals.
    pub fn is_empty(&self) -> bool {
        self.functionals.is_empty()
    }
}

fn jets_count(r: i64) -> i64 {
    if r < 0 {
        0
    } else {
        binom2(r + 2)
    }
}

fn shift(r: SmoothnessPair, dv: i32, de: i32) -> SmoothnessPair {
    SmoothnessPair::new(r.v + dv, r.e + de)
}

fn bubble_ok(deg: i64, r: SmoothnessPair, what: &str) -> Result<i64> {
    r.check_lattice(deg)
        .map_err(|e| Error::Parameter(format!("{what}: {e}")))?;
    Ok(bubble_dim(deg, r))
}

/// Checks the parameter inequalities of a family.
pub fn validate(spec: &ElementSpec) -> Result<()> {
    let k = spec.k as i64;
    let (r1, r2) = (spec.r1, spec.r2);
    let (v1, e1, v2, e2) = (r1.v as i64, r1.e as i64, r2.v as i64, r2.e as i64);
    let r2_ge = |lo: i64, label: &str| {
        require(v2 >= (v1 + lo).max(-1) && e2 >= (e1 + lo).max(-1), || {
            format!("r2 >= max(r1 {label}, -1) fails for r1 = {r1}, r2 = {r2}")
        })
    };
    let r2_pair = || {
        require(e2 >= -1 && v2 >= 2 * e2, || {
            format!("r2^v >= 2 r2^e fails for r2 = {r2}")
        })
    };
    match spec.family {
        Family::ScalarSmooth | Family::VectorSmooth => r1.check_lattice(k),
        Family::VectorDiv => {
            require(e1 >= -1, || format!("r1^e >= -1 fails for r1 = {r1}"))?;
            require(v1 > 2 * e1, || format!("r1^v >= 2 r1^e + 1 fails for r1 = {r1}"))?;
            r2_ge(-1, "- 1")?;
            r2_pair()?;
            require(k >= (2 * v1 + 2).max(2 * v2 + 2).max(1), || {
                format!("k >= max(2 r1^v + 2, 2 r2^v + 2, 1) fails for k = {k}")
            })?;
            let b = bubble_ok(k - 1, r2, "bubble space B_{k-1}(r2)")?;
            require(b >= 1, || format!("dim B_{{k-1}}(r2) >= 1 fails (dim = {b})"))?;
            bubble_ok(k + 1, r1.shifted(1), "bubble space B_{k+1}(r1+1)").map(|_| ())
        }
        Family::VectorDivTn => {
            require(e1 == -1, || format!("r1^e = -1 is required, got r1 = {r1}"))?;
            require(v1 >= -1, || format!("r1^v >= -1 fails for r1 = {r1}"))?;
            require(k >= (2 * v1 + 2).max(1), || {
                format!("k >= max(2 r1^v + 2, 1) fails for k = {k}")
            })?;
            bubble_ok(k, SmoothnessPair::new(r1.v.max(0), 0), "bubble space B_k((r1^v,0))").map(|_| ())
        }
        Family::SymDiv => {
            require(e1 >= -1, || format!("r1^e >= -1 fails for r1 = {r1}"))?;
            require(v1 >= 2 * e1 + 2, || format!("r1^v >= 2 r1^e + 2 fails for r1 = {r1}"))?;
            r2_ge(-1, "- 1")?;
            r2_pair()?;
            require(k >= (2 * v1 + 3).max(2 * v2 + 2), || {
                format!("k >= max(2 r1^v + 3, 2 r2^v + 2) fails for k = {k}")
            })?;
            let b = bubble_ok(k - 1, r2, "bubble space B_{k-1}(r2)")?;
            require(2 * b >= 3, || {
                format!("dim B^2_{{k-1}}(r2) >= 3 fails (dim = {})", 2 * b)
            })?;
            bubble_ok(k + 2, shift(r1, 2, 2), "bubble space B_{k+2}(r1+2)").map(|_| ())
        }
        Family::SymDivDivPlus if e1 == -1 => validate_divdiv_tn(spec),
        Family::MatrixDivDivPlus | Family::SymDivDivPlus => {
            require(v1 >= 0 && e1 >= 0, || format!("r1 >= 0 fails for r1 = {r1}"))?;
            r2_ge(-2, "- 2")?;
            r2_pair()?;
            require(k >= (2 * v1 + 3).max(2 * v2 + 3), || {
                format!("k >= max(2 r1^v + 3, 2 r2^v + 3) fails for k = {k}")
            })?;
            let b = bubble_ok(k - 2, r2, "bubble space B_{k-2}(r2)")?;
            require(b >= 3, || format!("dim B_{{k-2}}(r2) >= 3 fails (dim = {b})"))?;
            bubble_ok(k, r1, "bubble space B_k(r1)")?;
            if spec.family == Family::MatrixDivDivPlus {
                bubble_ok(k + 1, shift(r1, 1, 1), "bubble space B_{k+1}(r1+1)").map(|_| ())
            } else {
                bubble_ok(k + 2, shift(r1, 2, 2), "bubble space B_{k+2}(r1+2)").map(|_| ())
            }
        }
        Family::SymDivDivRelaxed => validate_divdiv_tn(spec),
    }
}

fn validate_divdiv_tn(spec: &ElementSpec) -> Result<()> {
    let k = spec.k as i64;
    let (r1, r2) = (spec.r1, spec.r2);
    let (v1, v2, e2) = (r1.v as i64, r2.v as i64, r2.e as i64);
    require(r1.e == -1 && v1 >= 0, || {
        format!("r1 = (r1^v, -1) with r1^v >= 0 fails for r1 = {r1}")
    })?;
    require(v2 >= (v1 - 2).max(-1) && e2 >= -1, || {
        format!("r2 >= max(r1 - 2, -1) fails for r1 = {r1}, r2 = {r2}")
    })?;
    require(v2 >= 2 * e2, || format!("r2^v >= 2 r2^e fails for r2 = {r2}"))?;
    require(k >= (2 * v1 + 3).max(2 * v2 + 3), || {
        format!("k >= max(2 r1^v + 3, 2 r2^v + 3) fails for k = {k}")
    })?;
    let b = bubble_ok(k - 2, r2, "bubble space B_{k-2}(r2)")?;
    require(b >= 3, || format!("dim B_{{k-2}}(r2) >= 3 fails (dim = {b})"))?;
    bubble_ok(k, SmoothnessPair::new(r1.v, 0), "bubble space B_k((r1^v,0))")?;
    bubble_ok(
        k + 2,
        SmoothnessPair::new(r1.v + 2, 1),
        "bubble space B_{k+2}((r1^v+2,1))",
    )
    .map(|_| ())
}

/// Closed-form counts per entity class.
pub fn dof_counts(spec: &ElementSpec) -> Result<DofCounts> {
    validate(spec)?;
    let k = spec.k as i64;
    let (v1, e1, v2, e2) = (spec.r1.v as i64, spec.r1.e as i64, spec.r2.v as i64, spec.r2.e as i64);
    let pos = |n: i64| n.max(0);
    // Number of weights of degree `d` summed over normal orders `0..=top`.
    let ladder = |d0: i64, top: i64| (0..=top).map(|i| pos(d0 + i + 1)).sum::<i64>();
    let jets_from = |lo: i64, hi: i64| pos(jets_count(hi) - jets_count(lo - 1));
    let divdiv_vertex = jets_from((v1 - 1).max(0), v2);
    let divdiv_edge = ladder(k - 2 * (v2 + 2), e2);
    let (v, e, i) = match spec.family {
        Family::ScalarSmooth | Family::VectorSmooth => {
            let m = if spec.family == Family::ScalarSmooth { 1 } else { 2 };
            (
                m * jets_count(v1),
                m * ladder(k - 2 * (v1 + 1), e1),
                m * bubble_dim(k, spec.r1),
            )
        }
        Family::VectorDiv => (
            2 * jets_count(v1) + jets_from(v1.max(0), v2),
            pos(k - 2 * (v1 + 1) + 1) + ladder(k - 2 * (v1 + 1), e1) + ladder(k - 1 - 2 * (v2 + 1), e2),
            bubble_dim(k - 1, spec.r2) - 1 + bubble_dim(k + 1, spec.r1.shifted(1)),
        ),
        Family::VectorDivTn => {
            if v1 >= 0 {
                (
                    2 * jets_count(v1),
                    2 * pos(k - 2 * (v1 + 1) + 1),
                    2 * bubble_dim(k, SmoothnessPair::new(spec.r1.v, 0)),
                )
            } else {
                (0, pos(k + 1) + pos(k - 1), 2 * bubble_dim(k, SmoothnessPair::new(0, 0)))
            }
        }
        Family::SymDiv => (
            3 * jets_count(v1) + 2 * jets_from(v1, v2),
            2 * pos(k - 2 * (v1 + 1) + 1) + ladder(k - 2 * (v1 + 1), e1) + 2 * ladder(k - 1 - 2 * (v2 + 1), e2),
            2 * bubble_dim(k - 1, spec.r2) - 3 + bubble_dim(k + 2, shift(spec.r1, 2, 2)),
        ),
        Family::MatrixDivDivPlus => (
            4 * jets_count(v1) + divdiv_vertex,
            2 * pos(k - 2 * (v1 + 1) + 1)
                + 2 * ladder(k - 2 * (v1 + 1), e1)
                + pos(k - 2 * v1)
                + ladder(k - 1 - 2 * v1, e1 - 1)
                + divdiv_edge,
            bubble_dim(k, spec.r1) + bubble_dim(k - 2, spec.r2) - 3 + 2 * bubble_dim(k + 1, shift(spec.r1, 1, 1)),
        ),
        Family::SymDivDivPlus if e1 >= 0 => (
            3 * jets_count(v1) + divdiv_vertex,
            2 * pos(k - 2 * (v1 + 1) + 1)
                + ladder(k - 2 * (v1 + 1), e1)
                + pos(k - 2 * v1)
                + ladder(k - 1 - 2 * v1, e1 - 1)
                + divdiv_edge,
            bubble_dim(k, spec.r1) - 1 + bubble_dim(k - 2, spec.r2) - 3 + bubble_dim(k + 2, shift(spec.r1, 2, 2)),
        ),
        Family::SymDivDivPlus | Family::SymDivDivRelaxed => {
            let interior = bubble_dim(k, SmoothnessPair::new(spec.r1.v, 0)) - 1 + bubble_dim(k - 2, spec.r2) - 3
                + bubble_dim(k + 2, SmoothnessPair::new(spec.r1.v + 2, 1));
            let normal = pos(k - 2 * (v1 + 1) + 1);
            (
                3 * jets_count(v1) + divdiv_vertex,
                2 * normal + pos(k - 2 * v1) + divdiv_edge,
                interior,
            )
        }
    };
    Ok(DofCounts {
        vertex: v as usize,
        edge: e as usize,
        interior: i as usize,
    })
}

struct Builder {
    functionals: Vec<DoFunctional>,
    weights: Vec<WeightSpec>,
}

impl Builder {
    fn jets(&mut self, vertex: usize, quantity: Quantity, orders: std::ops::RangeInclusive<i64>, comps: usize) {
        for i in orders {
            if i < 0 {
                continue;
            }
            let i = i as usize;
            for m in 0..=i {
                for component in 0..comps {
                    self.functionals.push(DoFunctional {
                        kind: DoFKind::PointDeriv {
                            quantity,
                            beta: [i - m, m],
                            component,
                        },
                        entity: Entity::Vertex(vertex),
                        shared: true,
                    });
                }
            }
        }
    }

    /// Moments of `selectors` against all weights of degree `d0 + i`, for
    /// normal orders `i` in `orders`.
    fn edge_line(
        &mut self,
        edge: usize,
        selectors: &[Selector],
        d0: i64,
        orders: std::ops::RangeInclusive<i64>,
        shared: bool,
    ) {
        for i in orders {
            let m = d0 + i;
            if i < 0 || m < 0 {
                continue;
            }
            for &selector in selectors {
                for j in 0..=(m as usize) {
                    self.functionals.push(DoFunctional {
                        kind: DoFKind::EdgeMoment {
                            normal_order: i as usize,
                            selector,
                            weight_degree: m as usize,
                            weight_index: j,
                        },
                        entity: Entity::Edge(edge),
                        shared,
                    });
                }
            }
        }
    }

    fn interior(&mut self, quantity: Quantity, w: WeightSpec) -> Result<()> {
        let n = w.dim()?;
        let family = self.weights.len();
        self.weights.push(w);
        for slot in 0..n {
            self.functionals.push(DoFunctional {
                kind: DoFKind::InteriorMoment { quantity, family, slot },
                entity: Entity::Interior,
                shared: false,
            });
        }
        Ok(())
    }
}

/// Builds the ordered functionals of an element.
pub fn build_dofs(spec: &ElementSpec) -> Result<DoFSet> {
    validate(spec)?;
    let k = spec.k as i64;
    let (r1, r2) = (spec.r1, spec.r2);
    let (v1, e1, v2, e2) = (r1.v as i64, r1.e as i64, r2.v as i64, r2.e as i64);
    let mut b = Builder {
        functionals: Vec::new(),
        weights: Vec::new(),
    };
    use Quantity::*;
    use Selector as S;
    let comps = spec.shape().components();
    // Vertex blocks.
    for vx in 0..3 {
        match spec.family {
            Family::ScalarSmooth | Family::VectorSmooth | Family::VectorDivTn => b.jets(vx, Value, 0..=v1, comps),
            Family::VectorDiv => {
                b.jets(vx, Value, 0..=v1, 2);
                b.jets(vx, Div, v1.max(0)..=v2, 1);
            }
            Family::SymDiv => {
                b.jets(vx, Value, 0..=v1, 3);
                b.jets(vx, Div, v1..=v2, 2);
            }
            Family::MatrixDivDivPlus | Family::SymDivDivPlus | Family::SymDivDivRelaxed => {
                b.jets(vx, Value, 0..=v1, comps);
                b.jets(vx, DivDiv, (v1 - 1).max(0)..=v2, 1);
            }
        }
    }
    // Edge blocks.
    let dn = k - 2 * (v1 + 1);
    for ed in 0..3 {
        match spec.family {
            Family::ScalarSmooth => b.edge_line(ed, &[S::Value(0)], dn, 0..=e1, true),
            Family::VectorSmooth => b.edge_line(ed, &[S::Value(0), S::Value(1)], dn, 0..=e1, true),
            Family::VectorDiv => {
                b.edge_line(ed, &[S::DotN], dn, 0..=0, true);
                b.edge_line(ed, &[S::DotT], dn, 0..=e1, true);
                b.edge_line(ed, &[S::Div(0)], k - 1 - 2 * (v2 + 1), 0..=e2, true);
            }
            Family::VectorDivTn => {
                if v1 >= 0 {
                    b.edge_line(ed, &[S::DotN], dn, 0..=0, true);
                    b.edge_line(ed, &[S::DotT], dn, 0..=0, false);
                } else {
                    b.edge_line(ed, &[S::DotN], k, 0..=0, true);
                    b.edge_line(ed, &[S::DotT], k - 2, 0..=0, false);
                }
            }
            Family::SymDiv => {
                b.edge_line(ed, &[S::TauN(0), S::TauN(1)], dn, 0..=0, true);
                b.edge_line(ed, &[S::Ttt], dn, 0..=e1, true);
                b.edge_line(ed, &[S::Div(0), S::Div(1)], k - 1 - 2 * (v2 + 1), 0..=e2, true);
            }
            Family::MatrixDivDivPlus => {
                b.edge_line(ed, &[S::TauN(0), S::TauN(1)], dn, 0..=0, true);
                b.edge_line(ed, &[S::TauT(0), S::TauT(1)], dn, 0..=e1, true);
                b.edge_line(ed, &[S::DivDotN], k - 1 - 2 * v1, 0..=0, true);
                b.edge_line(ed, &[S::DivDotT], k - 1 - 2 * v1, 0..=(e1 - 1), true);
                b.edge_line(ed, &[S::DivDiv], k - 2 * (v2 + 2), 0..=e2, true);
            }
            Family::SymDivDivPlus => {
                b.edge_line(ed, &[S::TauN(0), S::TauN(1)], dn, 0..=0, true);
                b.edge_line(ed, &[S::Ttt], dn, 0..=e1, true);
                b.edge_line(ed, &[S::DivDotN], k - 1 - 2 * v1, 0..=0, true);
                b.edge_line(ed, &[S::DivDotT], k - 1 - 2 * v1, 0..=(e1 - 1), true);
                b.edge_line(ed, &[S::DivDiv], k - 2 * (v2 + 2), 0..=e2, true);
            }
            Family::SymDivDivRelaxed => {
                b.edge_line(ed, &[S::Ntn], dn, 0..=0, true);
                b.edge_line(ed, &[S::Ttn], dn, 0..=0, false);
                b.edge_line(ed, &[S::Trace2], k - 1 - 2 * v1, 0..=0, true);
                b.edge_line(ed, &[S::DivDiv], k - 2 * (v2 + 2), 0..=e2, true);
            }
        }
    }
    // Interior block.
    let ku = spec.k;
    let q = |base: WeightSpec, by: Generators| WeightSpec::Quotient {
        base: Box::new(base),
        by,
    };
    match spec.family {
        Family::ScalarSmooth => b.interior(
            Value,
            WeightSpec::Bubble {
                deg: ku,
                r: r1,
                comps: 1,
            },
        )?,
        Family::VectorSmooth => b.interior(
            Value,
            WeightSpec::Bubble {
                deg: ku,
                r: r1,
                comps: 2,
            },
        )?,
        Family::VectorDiv => {
            b.interior(
                Div,
                q(
                    WeightSpec::Bubble {
                        deg: ku - 1,
                        r: r2,
                        comps: 1,
                    },
                    Generators::Constants,
                ),
            )?;
            b.interior(
                Value,
                WeightSpec::CurlBubble {
                    deg: ku + 1,
                    r: r1.shifted(1),
                },
            )?;
        }
        Family::VectorDivTn => {
            let r = SmoothnessPair::new(r1.v.max(0), 0);
            b.interior(Value, WeightSpec::Bubble { deg: ku, r, comps: 2 })?;
        }
        Family::SymDiv => {
            b.interior(
                Div,
                q(
                    WeightSpec::Bubble {
                        deg: ku - 1,
                        r: r2,
                        comps: 2,
                    },
                    Generators::Rm,
                ),
            )?;
            b.interior(
                Value,
                WeightSpec::AirBubble {
                    deg: ku + 2,
                    r: shift(r1, 2, 2),
                },
            )?;
        }
        Family::MatrixDivDivPlus => {
            b.interior(Div, WeightSpec::CurlBubble { deg: ku, r: r1 })?;
            b.interior(
                DivDiv,
                q(
                    WeightSpec::Bubble {
                        deg: ku - 2,
                        r: r2,
                        comps: 1,
                    },
                    Generators::P1,
                ),
            )?;
            b.interior(
                Value,
                WeightSpec::CurlBubbleVector {
                    deg: ku + 1,
                    r: shift(r1, 1, 1),
                },
            )?;
        }
        Family::SymDivDivPlus | Family::SymDivDivRelaxed => {
            let (rc, ra) = if e1 >= 0 {
                (r1, shift(r1, 2, 2))
            } else {
                (SmoothnessPair::new(r1.v, 0), SmoothnessPair::new(r1.v + 2, 1))
            };
            b.interior(Div, q(WeightSpec::CurlBubble { deg: ku, r: rc }, Generators::XPerp))?;
            b.interior(
                DivDiv,
                q(
                    WeightSpec::Bubble {
                        deg: ku - 2,
                        r: r2,
                        comps: 1,
                    },
                    Generators::P1,
                ),
            )?;
            b.interior(Value, WeightSpec::AirBubble { deg: ku + 2, r: ra })?;
        }
    }
    Ok(DoFSet {
        spec: *spec,
        functionals: b.functionals,
        weights: b.weights,
    })
}

/// Linear change of variables applied to a field before the functionals act.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldTransform {
    /// No change.
    Identity,
    /// A vector `(a, b)` is read as `(b, -a)`.
    RotateVector,
    /// A matrix `σ` is read as `J σ Jᵀ` with `J = [[0, 1], [-1, 0]]`.
    Conjugate,
}

impl FieldTransform {
    /// Applies the transform.
    pub fn apply(&self, f: &PolyField) -> Result<PolyField> {
        match (self, f.shape) {
            (FieldTransform::Identity, _) => Ok(f.clone()),
            (FieldTransform::RotateVector, Shape::Vector2) => {
                PolyField::new(Shape::Vector2, vec![f.comps[1].clone(), f.comps[0].neg()])
            }
            (FieldTransform::Conjugate, Shape::Matrix22) => PolyField::new(
                Shape::Matrix22,
                vec![
                    f.comps[3].clone(),
                    f.comps[2].neg(),
                    f.comps[1].neg(),
                    f.comps[0].clone(),
                ],
            ),
            (FieldTransform::Conjugate, Shape::Sym22) => PolyField::new(
                Shape::Sym22,
                vec![f.comps[2].clone(), f.comps[1].neg(), f.comps[0].clone()],
            ),
            (t, s) => Err(Error::Shape(format!("{t:?} does not act on a {s:?} field"))),
        }
    }
}

/// A triangle together with the direction of each local edge.
#[derive(Debug, Clone)]
pub struct Frame {
    /// Geometry.
    pub geom: TriangleGeom,
    /// Local endpoints `(a, b)` of local edge `ℓ`, directed from `a` to `b`.
    pub edge_ends: [(usize, usize); 3],
}

impl Frame {
    /// Frame whose edges run from the lower to the higher local index.
    pub fn local(geom: TriangleGeom) -> Self {
        Frame {
            geom,
            edge_ends: [(1, 2), (0, 2), (0, 1)],
        }
    }

    fn edges(&self) -> Result<[EdgeGeom; 3]> {
        let e = |l: usize| {
            let (a, b) = self.edge_ends[l];
            if a == l || b == l || a == b {
                return Err(Error::Topology(format!("local edge {l} cannot run from {a} to {b}")));
            }
            self.geom.edge(a, b)
        };
        Ok([e(0)?, e(1)?, e(2)?])
    }

    /// Hashable description, invariant under translation.
    pub fn key(&self) -> Vec<Rational> {
        let v = &self.geom.vertices;
        let mut out = Vec::with_capacity(10);
        for i in 1..3 {
            out.push(&v[i][0] - &v[0][0]);
            out.push(&v[i][1] - &v[0][1]);
        }
        for (a, b) in self.edge_ends {
            out.push(Rational::from_integer(((a * 3 + b) as i64).into()));
        }
        out
    }
}

fn vertex_value_of_derivative(p: &BernsteinPoly, t: &TriangleGeom, beta: [usize; 2], v: usize) -> Rational {
    if beta[0] + beta[1] > p.degree() {
        return Rational::zero();
    }
    p.cartesian_derivative(t, beta)
        .map(|d| d.vertex_value(v))
        .unwrap_or_else(|_| Rational::zero())
}

/// Lazily derived quantities of one field on one frame.
struct Derived<'a> {
    field: PolyField,
    geom: &'a TriangleGeom,
    edges: &'a [EdgeGeom; 3],
    cache: HashMap<(Quantity, usize, usize), PolyField>,
}

impl<'a> Derived<'a> {
    fn quantity(&mut self, q: Quantity) -> Result<PolyField> {
        self.normal_derivative(q, 0, 0)
    }

    fn base(&self, q: Quantity) -> Result<PolyField> {
        match (q, self.field.shape) {
            (Quantity::Value, _) => Ok(self.field.clone()),
            (Quantity::Div, Shape::Vector2) => self.field.apply(DiffOp::DivVector, self.geom),
            (Quantity::Div, _) => self.field.apply(DiffOp::DivMatrixRowwise, self.geom),
            (Quantity::DivDiv, _) => self.field.apply(DiffOp::DivDiv, self.geom),
        }
    }

    /// `∂_n^i` of a quantity along the normal of local edge `edge`.
    fn normal_derivative(&mut self, q: Quantity, edge: usize, i: usize) -> Result<PolyField> {
        let key = (q, if i == 0 { 0 } else { edge }, i);
        if let Some(f) = self.cache.get(&key) {
            return Ok(f.clone());
        }
        let f = if i == 0 {
            self.base(q)?
        } else {
            let prev = self.normal_derivative(q, edge, i - 1)?;
            let n = &self.edges[edge].normal;
            PolyField {
                shape: prev.shape,
                comps: prev
                    .comps
                    .iter()
                    .map(|c| {
                        c.partial(self.geom, 0)
                            .scale(&n[0])
                            .add(&c.partial(self.geom, 1).scale(&n[1]))
                    })
                    .collect(),
            }
        };
        self.cache.insert(key, f.clone());
        Ok(f)
    }

    fn select(&mut self, s: Selector, edge: usize, i: usize) -> Result<BernsteinPoly> {
        let e = &self.edges[edge];
        let (n, t) = (e.normal.clone(), e.tangent.clone());
        if s == Selector::Trace2 {
            let tau = self.normal_derivative(Quantity::Value, edge, i)?;
            let div = self.normal_derivative(Quantity::Div, edge, i)?;
            let ttn = tau.bilinear(&t, &n)?;
            let dt = ttn
                .partial(self.geom, 0)
                .scale(&t[0])
                .add(&ttn.partial(self.geom, 1).scale(&t[1]));
            let tt = &t[0] * &t[0] + &t[1] * &t[1];
            return Ok(dt.add(&div.dot(&n)?.scale(&tt)));
        }
        let f = self.normal_derivative(s.quantity(), edge, i)?;
        Ok(match s {
            Selector::Value(c) | Selector::Div(c) => f.comps[c].clone(),
            Selector::DivDiv => f.comps[0].clone(),
            Selector::DotN | Selector::DivDotN => f.dot(&n)?,
            Selector::DotT | Selector::DivDotT => f.dot(&t)?,
            Selector::TauN(c) => f.mat_vec(&n)?.comps[c].clone(),
            Selector::TauT(c) => f.mat_vec(&t)?.comps[c].clone(),
            Selector::Ntn => f.bilinear(&n, &n)?,
            Selector::Ttt => f.bilinear(&t, &t)?,
            Selector::Ttn => f.bilinear(&t, &n)?,
            Selector::Trace2 => unreachable!("handled above"),
        })
    }
}

/// A DoF set bound to a frame, with its DoF matrix and inverse.
#[derive(Debug, Clone)]
pub struct LocalElement {
    /// The functionals.
    pub dofs: DoFSet,
    /// Change of variables applied before every functional.
    pub transform: FieldTransform,
    /// The frame.
    pub frame: Frame,
    /// Resolved interior weights, one list per weight family.
    pub weights: Vec<Vec<PolyField>>,
    edges: [EdgeGeom; 3],
    /// Entry `(i, j)` is functional `i` applied to unit basis field `j`.
    pub matrix: RatMatrix,
    /// Inverse of `matrix`; column `j` holds the coefficients of the dual basis field of functional `j`.
    pub inverse: RatMatrix,
}

/// The `j`-th unit basis field: component-major, then lattice order.
pub fn unit_field(shape: Shape, k: usize, j: usize) -> PolyField {
    let n = lattice_size(k);
    PolyField::unit(shape, k, j / n, j % n)
}

/// Field with the given coefficients against the unit basis.
pub fn field_from_coeffs(shape: Shape, k: usize, coeffs: &[Rational]) -> Result<PolyField> {
    let n = lattice_size(k);
    let comps = (0..shape.components())
        .map(|c| BernsteinPoly::from_coeffs(k, coeffs[c * n..(c + 1) * n].to_vec()))
        .collect::<Result<Vec<_>>>()?;
    PolyField::new(shape, comps)
}

/// Unit-basis coefficients of a field of degree at most `k`.
pub fn coeffs_of_field(f: &PolyField, k: usize) -> Vec<Rational> {
    f.elevate(k).comps.iter().flat_map(|c| c.coeffs().to_vec()).collect()
}

impl LocalElement {
    /// Resolves the weights on `frame` and inverts the DoF matrix.
    ///
    /// Fails with [`Error::SingularMatrix`] when the set is not unisolvent there.
    pub fn new(dofs: DoFSet, transform: FieldTransform, frame: Frame) -> Result<Self> {
        let mut el = Self::unchecked(dofs, transform, frame)?;
        el.inverse = invert(&el.matrix)?;
        Ok(el)
    }

    fn unchecked(dofs: DoFSet, transform: FieldTransform, frame: Frame) -> Result<Self> {
        let edges = frame.edges()?;
        let weights = dofs
            .weights
            .iter()
            .map(|w| {
                let r = w.resolve(&frame.geom)?;
                if r.len() != w.dim()? {
                    return Err(Error::Quotient(format!(
                        "resolved {} weights, expected {}",
                        r.len(),
                        w.dim()?
                    )));
                }
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = dofs.spec;
        let n = spec.shape_dim();
        let mut el = LocalElement {
            dofs,
            transform,
            frame,
            weights,
            edges,
            matrix: RatMatrix::zeros(0, 0),
            inverse: RatMatrix::zeros(0, 0),
        };
        let mut m = RatMatrix::zeros(el.dofs.len(), n);
        for j in 0..n {
            let col = el.evaluate(&unit_field(spec.shape(), spec.k, j))?;
            for (i, v) in col.into_iter().enumerate() {
                if !v.is_zero() {
                    m.set(i, j, v);
                }
            }
        }
        el.matrix = m;
        Ok(el)
    }

    /// Values of every functional on a field of the element's shape.
    pub fn evaluate(&self, field: &PolyField) -> Result<Vec<Rational>> {
        let spec = &self.dofs.spec;
        if field.shape != spec.shape() {
            return Err(Error::Shape(format!(
                "{} functionals applied to a {:?} field",
                spec.family, field.shape
            )));
        }
        let field = self.transform.apply(field)?;
        let geom = &self.frame.geom;
        let mut d = Derived {
            field,
            geom,
            edges: &self.edges,
            cache: HashMap::new(),
        };
        let mut out = Vec::with_capacity(self.dofs.len());
        for f in &self.dofs.functionals {
            let v = match (f.kind, f.entity) {
                (
                    DoFKind::PointDeriv {
                        quantity,
                        beta,
                        component,
                    },
                    Entity::Vertex(v),
                ) => {
                    let q = d.quantity(quantity)?;
                    vertex_value_of_derivative(&q.comps[component], geom, beta, v)
                }
                (
                    DoFKind::EdgeMoment {
                        normal_order,
                        selector,
                        weight_degree,
                        weight_index,
                    },
                    Entity::Edge(l),
                ) => {
                    let p = d.select(selector, l, normal_order)?;
                    p.trace_to_edge(&self.edges[l]).moment(weight_degree, weight_index)
                }
                (DoFKind::InteriorMoment { quantity, family, slot }, Entity::Interior) => {
                    let q = d.quantity(quantity)?;
                    q.inner_integral(&self.weights[family][slot], geom)?
                }
                _ => return Err(Error::Topology("functional attached to the wrong entity".into())),
            };
            out.push(v);
        }
        Ok(out)
    }

    /// The dual basis field of functional `j`.
    pub fn dual_field(&self, j: usize) -> Result<PolyField> {
        let spec = &self.dofs.spec;
        field_from_coeffs(spec.shape(), spec.k, &self.inverse.col(j))
    }
}

/// Outcome of a unisolvence check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnisolvenceVerdict {
    /// Number of functionals.
    pub rows: usize,
    /// Dimension of the shape space.
    pub cols: usize,
    /// Exact rank of the DoF matrix.
    pub rank: usize,
    /// `rows == cols`.
    pub square: bool,
    /// Square with full rank.
    pub nonsingular: bool,
}

/// DoF matrix of a set on a frame, without requiring invertibility.
pub fn dof_matrix(dofs: &DoFSet, frame: &Frame) -> Result<RatMatrix> {
    Ok(LocalElement::unchecked(dofs.clone(), FieldTransform::Identity, frame.clone())?.matrix)
}

/// Assembles the DoF matrix on `t` and reports squareness and exact nonsingularity.
pub fn check_unisolvence(dofs: &DoFSet, t: &TriangleGeom) -> Result<UnisolvenceVerdict> {
    let m = dof_matrix(dofs, &Frame::local(t.clone()))?;
    let r = rank(&m);
    let square = m.rows() == m.cols();
    Ok(UnisolvenceVerdict {
        rows: m.rows(),
        cols: m.cols(),
        rank: r,
        square,
        nonsingular: square && r == m.cols(),
    })
}

/// True when every row of `extra` lies in the row space of `base`.
pub fn rows_in_span(base: &RatMatrix, extra: &RatMatrix) -> bool {
    let mut e = EchelonBasis::new(base.cols());
    for i in 0..base.rows() {
        e.insert(base.row(i));
    }
    (0..extra.rows()).all(|i| e.contains(extra.row(i)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::geometric_decomposition;
    use crate::mesh::test_triangles;

    fn p(v: i32, e: i32) -> SmoothnessPair {
        SmoothnessPair::new(v, e)
    }

    fn spec(f: Family, k: usize, r1: (i32, i32), r2: (i32, i32)) -> ElementSpec {
        ElementSpec::new(f, k, p(r1.0, r1.1), p(r2.0, r2.1))
    }

    fn assert_unisolvent(s: &ElementSpec) {
        let d = build_dofs(s).unwrap();
        assert_eq!(d.len(), s.shape_dim(), "{s}");
        assert_eq!(d.counts(), dof_counts(s).unwrap(), "{s}");
        for t in test_triangles(3, 2024) {
            let v = check_unisolvence(&d, &t).unwrap();
            assert!(v.nonsingular, "{s} rank {} of {}", v.rank, v.cols);
        }
    }

    #[test]
    fn argyris_counts() {
        let s = ElementSpec::scalar(5, p(2, 1));
        let c = dof_counts(&s).unwrap();
        assert_eq!((c.vertex, c.edge, c.interior), (6, 1, 0));
        assert_eq!(build_dofs(&s).unwrap().len(), 21);
        let v = check_unisolvence(&build_dofs(&s).unwrap(), &TriangleGeom::reference()).unwrap();
        assert!(v.square && v.nonsingular);
    }

    #[test]
    fn broken_parameters_are_rejected() {
        let e = build_dofs(&ElementSpec::scalar(3, p(2, 1))).unwrap_err();
        assert!(matches!(e, Error::Parameter(_)));
    }

    #[test]
    fn example_counts() {
        let c = dof_counts(&spec(Family::VectorDiv, 4, (1, 0), (0, -1))).unwrap();
        assert_eq!((c.vertex, c.edge, c.interior), (6, 2, 6));
        let bdm = build_dofs(&spec(Family::VectorDivTn, 1, (-1, -1), (-1, -1))).unwrap();
        assert_eq!(
            bdm.counts(),
            DofCounts {
                vertex: 0,
                edge: 2,
                interior: 0
            }
        );
        let hz = build_dofs(&spec(Family::SymDiv, 3, (0, -1), (-1, -1))).unwrap();
        assert_eq!(
            hz.counts(),
            DofCounts {
                vertex: 3,
                edge: 4,
                interior: 9
            }
        );
    }

    #[test]
    fn small_elements_are_unisolvent() {
        for s in [
            ElementSpec::scalar(1, p(0, 0)),
            ElementSpec::scalar(3, p(1, 0)),
            ElementSpec::scalar(4, p(1, 0)),
            ElementSpec::scalar(3, p(0, -1)),
            ElementSpec::vector_smooth(2, p(-1, -1)),
            spec(Family::VectorDiv, 1, (-1, -1), (-1, -1)),
            spec(Family::VectorDiv, 2, (0, -1), (-1, -1)),
            spec(Family::VectorDiv, 4, (1, 0), (0, -1)),
            spec(Family::VectorDiv, 4, (-1, -1), (0, 0)),
            spec(Family::VectorDivTn, 1, (-1, -1), (-1, -1)),
            spec(Family::VectorDivTn, 2, (0, -1), (-1, -1)),
            spec(Family::SymDiv, 3, (0, -1), (-1, -1)),
            spec(Family::SymDivDivPlus, 3, (0, -1), (-1, -1)),
            spec(Family::SymDivDivRelaxed, 3, (0, -1), (-1, -1)),
        ] {
            assert_unisolvent(&s);
        }
    }

    #[test]
    fn larger_elements_are_unisolvent() {
        for s in [
            ElementSpec::scalar(5, p(2, 1)),
            ElementSpec::scalar(9, p(4, 2)),
            ElementSpec::vector_smooth(5, p(1, 0)),
            spec(Family::VectorDiv, 4, (1, 0), (0, 0)),
            spec(Family::VectorDiv, 6, (2, 0), (1, 0)),
            spec(Family::VectorDiv, 5, (1, 0), (1, 0)),
            spec(Family::VectorDivTn, 4, (1, -1), (-1, -1)),
            spec(Family::SymDiv, 7, (2, 0), (1, 0)),
            spec(Family::SymDiv, 5, (1, -1), (0, -1)),
            spec(Family::MatrixDivDivPlus, 6, (1, 0), (0, 0)),
            spec(Family::SymDivDivPlus, 7, (2, 0), (0, -1)),
            spec(Family::SymDivDivPlus, 5, (1, -1), (0, -1)),
            spec(Family::SymDivDivRelaxed, 5, (1, -1), (0, -1)),
        ] {
            assert_unisolvent(&s);
        }
    }

    #[test]
    fn divdiv_plus_needs_three_bubbles() {
        let e = build_dofs(&spec(Family::SymDivDivPlus, 5, (1, 0), (0, 0))).unwrap_err();
        assert!(e.to_string().contains("dim B_{k-2}(r2) >= 3"), "{e}");
    }

    #[test]
    fn scalar_block_triangularity() {
        let s = ElementSpec::scalar(8, p(2, 1));
        let d = build_dofs(&s).unwrap();
        let t = &test_triangles(1, 5)[1];
        let m = dof_matrix(&d, &Frame::local(t.clone())).unwrap();
        let dec = geometric_decomposition(8, p(2, 1)).unwrap();
        let nodes = crate::lattice::enumerate_lattice(8);
        for (i, f) in d.functionals.iter().enumerate() {
            for (j, a) in nodes.iter().enumerate() {
                let zero_expected = match f.entity {
                    Entity::Vertex(v) => !dec.s0[v].contains(a),
                    Entity::Edge(_) => dec.s2.contains(a),
                    Entity::Interior => false,
                };
                if zero_expected {
                    assert!(m.get(i, j).is_zero(), "functional {i} on node {a:?}");
                }
            }
        }
    }

    #[test]
    fn rotated_transform_round_trip() {
        let t = TriangleGeom::reference();
        let f = unit_field(Shape::Sym22, 2, 7);
        let g = FieldTransform::Conjugate
            .apply(&FieldTransform::Conjugate.apply(&f).unwrap())
            .unwrap();
        assert_eq!(f, g);
        let v = PolyField::scalar(BernsteinPoly::monomial(&[1, 2, 0]));
        let air = v.apply(DiffOp::Air, &t).unwrap();
        let hess = v.apply(DiffOp::Hess, &t).unwrap();
        assert_eq!(FieldTransform::Conjugate.apply(&hess).unwrap(), air);
        let grad = v.apply(DiffOp::Grad, &t).unwrap();
        assert_eq!(
            FieldTransform::RotateVector.apply(&grad).unwrap(),
            v.apply(DiffOp::CurlScalar, &t).unwrap()
        );
    }

    #[test]
    fn relaxed_trace_rows_determine_normal_divergence() {
        let t = test_triangles(1, 11)[1].clone();
        let frame = Frame::local(t);
        let relaxed = build_dofs(&spec(Family::SymDivDivRelaxed, 3, (0, -1), (-1, -1))).unwrap();
        let plus = build_dofs(&spec(Family::SymDivDivPlus, 3, (0, -1), (-1, -1))).unwrap();
        let mr = dof_matrix(&relaxed, &frame).unwrap();
        let mp = dof_matrix(&plus, &frame).unwrap();
        let boundary = |d: &DoFSet| -> Vec<usize> {
            (0..d.len())
                .filter(|&i| d.functionals[i].entity != Entity::Interior)
                .collect()
        };
        let div_n: Vec<usize> = (0..plus.len())
            .filter(|&i| {
                matches!(
                    plus.functionals[i].kind,
                    DoFKind::EdgeMoment {
                        selector: Selector::DivDotN,
                        ..
                    }
                )
            })
            .collect();
        assert!(!div_n.is_empty());
        assert!(rows_in_span(
            &mr.select_rows(&boundary(&relaxed)),
            &mp.select_rows(&div_n)
        ));
    }

    #[test]
    fn interior_block_matches_bubble_moments() {
        // Moments against the dual functions of the interior functionals give
        // an equivalent interior block.
        let s = spec(Family::VectorDiv, 4, (1, 0), (0, -1));
        let d = build_dofs(&s).unwrap();
        let t = test_triangles(1, 3)[1].clone();
        let el = LocalElement::new(d.clone(), FieldTransform::Identity, Frame::local(t.clone())).unwrap();
        let interior: Vec<usize> = (0..d.len())
            .filter(|&i| d.functionals[i].entity == Entity::Interior)
            .collect();
        let boundary: Vec<usize> = (0..d.len())
            .filter(|&i| d.functionals[i].entity != Entity::Interior)
            .collect();
        let duals: Vec<PolyField> = interior.iter().map(|&j| el.dual_field(j).unwrap()).collect();
        let n = s.shape_dim();
        let mut alt = el.matrix.select_rows(&boundary);
        let mut rows = Vec::new();
        for q in &duals {
            rows.push(
                (0..n)
                    .map(|j| unit_field(Shape::Vector2, 4, j).inner_integral(q, &t).unwrap())
                    .collect(),
            );
        }
        alt = RatMatrix::from_rows((0..alt.rows()).map(|i| alt.row(i).to_vec()).chain(rows).collect(), n).unwrap();
        assert_eq!(rank(&alt), n);
        assert_eq!(duals.len() as i64, bubble_dim(3, p(0, -1)) + bubble_dim(5, p(2, 1)) - 1);
    }
}
