//! Global finite element spaces, operator matrices and exactness verdicts
//! for discrete complexes.
//!
//! A [`GlobalSpace`] numbers the shared vertex blocks first, then the shared
//! edge blocks, then the local block of each triangle. Operator matrices are
//! built trianglewise from the dual basis of each local element; a shared
//! target functional that takes different values from two sides of its
//! entity is reported as an [`Error::Inclusion`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bernstein::{BernsteinPoly, DiffOp, PolyField, Shape, TriangleGeom};
use crate::elements::{
    build_dofs, dof_counts, field_from_coeffs, DoFSet, ElementSpec, Entity, Family, FieldTransform, Frame, LocalElement,
};
use crate::error::{require, Error, Result};
use crate::exact_linalg::{is_zero, multiply, rank, RatMatrix, Rational};
use crate::lattice::{binom2, bubble_dim, bubble_set, enumerate_lattice, SmoothnessPair};
use crate::mesh::{Cell, Mesh};

/// An element together with the change of variables applied before its functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SpaceSpec {
    /// The element.
    pub element: ElementSpec,
    /// Change of variables.
    pub transform: FieldTransform,
}

impl SpaceSpec {
    /// Space without a change of variables.
    pub fn plain(element: ElementSpec) -> Self {
        SpaceSpec {
            element,
            transform: FieldTransform::Identity,
        }
    }

    /// Space with the given change of variables.
    pub fn rotated(element: ElementSpec, transform: FieldTransform) -> Self {
        SpaceSpec { element, transform }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.transform {
            FieldTransform::Identity => write!(f, "{}", self.element),
            FieldTransform::RotateVector => write!(f, "{} (rotated)", self.element),
            FieldTransform::Conjugate => write!(f, "{} (conjugated)", self.element),
        }
    }
}

/// Local elements keyed by space and translation-free frame.
#[derive(Debug, Default)]
pub struct ElementCache {
    map: HashMap<(SpaceSpec, Vec<Rational>), Arc<LocalElement>>,
}

impl ElementCache {
    /// Empty cache.
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of distinct local elements built so far.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    /// True when nothing has been built yet.
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn get(&mut self, space: &SpaceSpec, dofs: &DoFSet, frame: Frame) -> Result<Arc<LocalElement>> {
        let key = (*space, frame.key());
        if let Some(e) = self.map.get(&key) {
            return Ok(e.clone());
        }
        let e = Arc::new(LocalElement::new(dofs.clone(), space.transform, frame)?);
        self.map.insert(key, e.clone());
        Ok(e)
    }
}

/// Owner of a global degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Owner {
    /// Shared block of a mesh vertex.
    Vertex(usize),
    /// Shared block of a mesh edge.
    Edge(usize),
    /// Local block of a triangle.
    Triangle(usize),
}

/// The restriction of a global space to one triangle.
#[derive(Debug, Clone)]
pub struct CellSpace {
    /// Mesh incidence and geometry.
    pub cell: Cell,
    /// Local element with its dual basis.
    pub element: Arc<LocalElement>,
    /// Global index of each local functional.
    pub l2g: Vec<usize>,
}

/// A conforming finite element space on a mesh.
#[derive(Debug, Clone)]
pub struct GlobalSpace {
    /// Element and change of variables.
    pub space: SpaceSpec,
    /// The functionals of one triangle.
    pub dofs: DoFSet,
    /// Shared functionals per vertex.
    pub vertex_block: usize,
    /// Shared functionals per edge.
    pub edge_block: usize,
    /// Unshared functionals per triangle.
    pub local_block: usize,
    /// Dimension.
    pub dim: usize,
    /// Per-triangle data in mesh order.
    pub cells: Vec<CellSpace>,
    owners: Vec<Owner>,
}

impl GlobalSpace {
    /// Numbers the functionals of `space` over `mesh` and builds every local element.
    pub fn assemble(space: SpaceSpec, mesh: &Mesh, cache: &mut ElementCache) -> Result<Self> {
        let dofs = build_dofs(&space.element)?;
        let (vb, eb) = dofs.shared_counts();
        let lb = dofs.len() - 3 * vb - 3 * eb;
        let (nv, ne, nt) = (mesh.num_vertices(), mesh.num_edges(), mesh.num_triangles());
        let dim = nv * vb + ne * eb + nt * lb;
        let mut owners = Vec::with_capacity(dim);
        owners.extend((0..nv).flat_map(|v| std::iter::repeat_n(Owner::Vertex(v), vb)));
        owners.extend((0..ne).flat_map(|e| std::iter::repeat_n(Owner::Edge(e), eb)));
        owners.extend((0..nt).flat_map(|t| std::iter::repeat_n(Owner::Triangle(t), lb)));
        let mut cells = Vec::with_capacity(nt);
        for t in 0..nt {
            let cell = mesh.cell(t)?;
            let frame = Frame {
                geom: cell.geom.clone(),
                edge_ends: cell.edge_ends,
            };
            let element = cache.get(&space, &dofs, frame)?;
            let mut seen_v = [0usize; 3];
            let mut seen_e = [0usize; 3];
            let mut seen_l = 0usize;
            let mut l2g = Vec::with_capacity(dofs.len());
            for f in &dofs.functionals {
                let g = match (f.entity, f.shared) {
                    (Entity::Vertex(l), _) => {
                        seen_v[l] += 1;
                        cell.vertices[l] * vb + seen_v[l] - 1
                    }
                    (Entity::Edge(l), true) => {
                        seen_e[l] += 1;
                        nv * vb + cell.edges[l] * eb + seen_e[l] - 1
                    }
                    _ => {
                        seen_l += 1;
                        nv * vb + ne * eb + t * lb + seen_l - 1
                    }
                };
                l2g.push(g);
            }
            cells.push(CellSpace { cell, element, l2g });
        }
        Ok(GlobalSpace {
            space,
            dofs,
            vertex_block: vb,
            edge_block: eb,
            local_block: lb,
            dim,
            cells,
            owners,
        })
    }

    /// Owner of global functional `g`.
    pub fn owner(&self, g: usize) -> Owner {
        self.owners[g]
    }

    /// Highest global index among interior functionals.
    pub fn last_interior_dof(&self) -> Option<usize> {
        let last = self.cells.last()?;
        self.dofs
            .functionals
            .iter()
            .zip(&last.l2g)
            .filter(|(f, _)| f.entity == Entity::Interior)
            .map(|(_, &g)| g)
            .max()
    }

    /// Values of the global functionals on a piecewise polynomial given per triangle.
    ///
    /// Fails with [`Error::Inclusion`] when a shared functional takes
    /// different values from two triangles.
    pub fn interpolate(&self, field: &dyn Fn(&Cell) -> Result<PolyField>) -> Result<Vec<Rational>> {
        let mut out: Vec<Option<Rational>> = vec![None; self.dim];
        let k = self.space.element.k;
        for cs in &self.cells {
            let f = field(&cs.cell)?;
            if f.degree() > k {
                return Err(Error::Inclusion(format!(
                    "field of degree {} does not fit in {}",
                    f.degree(),
                    self.space
                )));
            }
            let vals = cs.element.evaluate(&f.elevate(k))?;
            for (v, &g) in vals.into_iter().zip(&cs.l2g) {
                match &out[g] {
                    None => out[g] = Some(v),
                    Some(w) if *w == v => {}
                    Some(_) => {
                        return Err(Error::Inclusion(format!(
                            "shared functional {g} of {} ({:?}) is two-valued",
                            self.space,
                            self.owner(g)
                        )))
                    }
                }
            }
        }
        Ok(out.into_iter().map(|v| v.unwrap_or_else(Rational::zero)).collect())
    }
}

/// Exact matrix of a map between two global spaces.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    /// Name of the map.
    pub label: String,
    /// Entry `(i, j)` is target functional `i` applied to the image of source basis function `j`.
    pub matrix: RatMatrix,
}

/// Matrix of the map induced trianglewise by `map` from `src` to `dst`.
pub fn assemble_map(
    src: &GlobalSpace,
    dst: &GlobalSpace,
    label: &str,
    map: &dyn Fn(&PolyField, &TriangleGeom) -> Result<PolyField>,
) -> Result<OperatorMatrix> {
    if src.cells.len() != dst.cells.len() {
        return Err(Error::Dimension("spaces live on different meshes".into()));
    }
    let kd = dst.space.element.k;
    let mut rows: Vec<Option<BTreeMap<usize, Rational>>> = vec![None; dst.dim];
    for (cs, cd) in src.cells.iter().zip(&dst.cells) {
        let geom = &cs.cell.geom;
        let mut local: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); cd.l2g.len()];
        for (j, &gj) in cs.l2g.iter().enumerate() {
            let image = map(&cs.element.dual_field(j)?, geom)?;
            if image.shape != dst.space.element.shape() {
                return Err(Error::Shape(format!(
                    "{label} produces {:?} fields, {} holds {:?} fields",
                    image.shape,
                    dst.space,
                    dst.space.element.shape()
                )));
            }
            if image.degree() > kd {
                return Err(Error::Inclusion(format!(
                    "{label} raises the degree to {} above the degree {kd} of {}",
                    image.degree(),
                    dst.space
                )));
            }
            for (a, v) in cd.element.evaluate(&image.elevate(kd))?.into_iter().enumerate() {
                if !v.is_zero() {
                    local[a].insert(gj, v);
                }
            }
        }
        for (a, row) in local.into_iter().enumerate() {
            let g = cd.l2g[a];
            match &rows[g] {
                None => rows[g] = Some(row),
                Some(prev) if *prev == row => {}
                Some(_) => {
                    return Err(Error::Inclusion(format!(
                        "{label}: functional {g} of {} ({:?}) is two-valued on the image",
                        dst.space,
                        dst.owner(g)
                    )))
                }
            }
        }
    }
    let mut m = RatMatrix::zeros(dst.dim, src.dim);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.unwrap_or_default() {
            m.set(i, j, v);
        }
    }
    Ok(OperatorMatrix {
        label: label.to_string(),
        matrix: m,
    })
}

/// Matrix of the differential operator `op` from `src` to `dst`.
pub fn assemble_operator(src: &GlobalSpace, dst: &GlobalSpace, op: DiffOp) -> Result<OperatorMatrix> {
    let out = op.output_shape(src.space.element.shape());
    if out != Some(dst.space.element.shape()) {
        return Err(Error::Shape(format!(
            "{op:?} does not map {} into {}",
            src.space, dst.space
        )));
    }
    assemble_map(src, dst, &format!("{op:?}"), &|f, t| f.apply(op, t))
}

/// Global polynomial fields spanning the kernel at the start of a complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelGenerators {
    /// No kernel.
    Zero,
    /// Constants.
    Constants,
    /// Linear functions `1, x, y`.
    P1,
    /// `(1,0), (0,1), (x,y)`.
    Rt,
    /// `(1,0), (0,1), (-y,x)`.
    Rm,
}

impl KernelGenerators {
    /// Number of generators.
    pub fn count(&self) -> usize {
        match self {
            KernelGenerators::Zero => 0,
            KernelGenerators::Constants => 1,
            _ => 3,
        }
    }

    /// The generators on triangle `t`.
    pub fn fields(&self, t: &TriangleGeom) -> Vec<PolyField> {
        let coord = |j: usize| coordinate(t, j);
        let one = || BernsteinPoly::constant(1, Rational::one());
        let zero = || BernsteinPoly::zero(1);
        let pair = |a, b| PolyField::new(Shape::Vector2, vec![a, b]).expect("vector field");
        match self {
            KernelGenerators::Zero => vec![],
            KernelGenerators::Constants => vec![PolyField::scalar(one())],
            KernelGenerators::P1 => vec![
                PolyField::scalar(one()),
                PolyField::scalar(coord(0)),
                PolyField::scalar(coord(1)),
            ],
            KernelGenerators::Rt => vec![pair(one(), zero()), pair(zero(), one()), pair(coord(0), coord(1))],
            KernelGenerators::Rm => vec![pair(one(), zero()), pair(zero(), one()), pair(coord(1).neg(), coord(0))],
        }
    }
}

/// Coordinate function `x_j` on `t` as a degree-one polynomial.
pub fn coordinate(t: &TriangleGeom, j: usize) -> BernsteinPoly {
    (0..3).fold(BernsteinPoly::zero(1), |acc, i| {
        acc.add(&BernsteinPoly::lambda(i).scale(&t.vertices[i][j]))
    })
}

/// The complexes that can be verified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexKind {
    /// Smooth de Rham complex with curl and div.
    Derham,
    /// The same complex with grad and rot.
    DerhamRotated,
    /// Bubble complex on a single triangle.
    Bubble,
    /// Curl-div complex with an augmented start.
    Curldiv,
    /// Elasticity complex with Air and div.
    Elasticity,
    /// Hessian complex with hess and row-wise rot.
    ElasticityRotated,
    /// Divdiv complex with the symmetric element of smooth divergence.
    DivdivPlus,
    /// Divdiv complex on general matrices modulo skew-symmetric smooth fields.
    DivdivPlusQuotient,
    /// Strain complex with symmetric gradient and rotrot.
    DivdivPlusRotated,
    /// Divdiv complex starting from a smooth-divergence vector element.
    DivdivBdmStart,
    /// Divdiv complex ending with the relaxed symmetric element.
    DivdivRelaxed,
}

impl ComplexKind {
    /// All kinds.
    pub const ALL: [ComplexKind; 11] = [
        ComplexKind::Derham,
        ComplexKind::DerhamRotated,
        ComplexKind::Bubble,
        ComplexKind::Curldiv,
        ComplexKind::Elasticity,
        ComplexKind::ElasticityRotated,
        ComplexKind::DivdivPlus,
        ComplexKind::DivdivPlusQuotient,
        ComplexKind::DivdivPlusRotated,
        ComplexKind::DivdivBdmStart,
        ComplexKind::DivdivRelaxed,
    ];

    /// Snake-case name.
    pub fn name(&self) -> &'static str {
        match self {
            ComplexKind::Derham => "derham",
            ComplexKind::DerhamRotated => "derham_rotated",
            ComplexKind::Bubble => "bubble",
            ComplexKind::Curldiv => "curldiv",
            ComplexKind::Elasticity => "elasticity",
            ComplexKind::ElasticityRotated => "elasticity_rotated",
            ComplexKind::DivdivPlus => "divdiv_plus",
            ComplexKind::DivdivPlusQuotient => "divdiv_plus_quotient",
            ComplexKind::DivdivPlusRotated => "divdiv_plus_rotated",
            ComplexKind::DivdivBdmStart => "divdiv_bdm_start",
            ComplexKind::DivdivRelaxed => "divdiv_relaxed",
        }
    }

    /// Parses a snake-case name.
    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown complex kind {s:?}")))
    }
}

impl fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters of a complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexSpec {
    /// Which complex.
    pub kind: ComplexKind,
    /// Degree of the middle space (the first vector space for the curl-div complex).
    pub k: usize,
    /// Smoothness of the first space; must equal `r1 + 1` when given.
    pub r0: Option<SmoothnessPair>,
    /// First smoothness pair.
    pub r1: SmoothnessPair,
    /// Second smoothness pair.
    pub r2: SmoothnessPair,
    /// Third smoothness pair, for the curl-div complex.
    pub r3: Option<SmoothnessPair>,
    /// Mesh label echoed into reports.
    pub mesh: String,
}

/// Switches for [`verify_complex`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Turn boundary-bound warnings into a failed check.
    pub strict: bool,
    /// Zero the row of the last interior functional of the last space in the last operator.
    pub mutate_last_interior: bool,
}

/// Overall outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Every check passed.
    Exact,
    /// Some check failed.
    NotExact,
    /// The compositions vanish, but the mesh is not simply connected.
    NotApplicable,
}

/// One named pass/fail item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    /// Name.
    pub name: String,
    /// Outcome.
    pub pass: bool,
}

/// Mesh statistics echoed into reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeshSummary {
    /// Number of vertices.
    pub vertices: usize,
    /// Number of edges.
    pub edges: usize,
    /// Number of triangles.
    pub triangles: usize,
    /// Euler characteristic.
    pub euler_characteristic: i64,
    /// Number of boundary loops.
    pub boundary_loops: usize,
}

impl MeshSummary {
    /// Statistics of `m`.
    pub fn of(m: &Mesh) -> Self {
        MeshSummary {
            vertices: m.num_vertices(),
            edges: m.num_edges(),
            triangles: m.num_triangles(),
            euler_characteristic: m.euler_characteristic(),
            boundary_loops: m.boundary_loops(),
        }
    }
}

/// A space of the chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpaceReport {
    /// Description of the space.
    pub label: String,
    /// Dimension.
    pub dim: usize,
    /// Functionals per vertex, per edge and per triangle interior, when an element underlies the space.
    pub per_entity: Option<[usize; 3]>,
}

/// A map of the chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperatorReport {
    /// Name.
    pub label: String,
    /// Dimension of the target.
    pub rows: usize,
    /// Dimension of the source.
    pub cols: usize,
    /// Rank.
    pub rank: usize,
    /// Dimension of the kernel.
    pub nullity: usize,
}

/// Kernel at the start of the chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    /// Generators.
    pub generators: KernelGenerators,
    /// Expected dimension.
    pub expected: usize,
    /// Observed dimension.
    pub observed: usize,
    /// Every generator lies in the first space and is annihilated by the first map.
    pub generators_in_kernel: bool,
    /// The interpolated generators are linearly independent.
    pub generators_independent: bool,
}

/// Comparison of image and kernel at an inner space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkReport {
    /// Index of the space in the chain.
    pub space: usize,
    /// Rank of the incoming map.
    pub image: usize,
    /// Nullity of the outgoing map.
    pub kernel: usize,
}

/// Structured outcome of a complex verification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplexReport {
    /// Parameters.
    pub spec: ComplexSpec,
    /// Mesh statistics.
    pub mesh: MeshSummary,
    /// Spaces in chain order.
    pub spaces: Vec<SpaceReport>,
    /// Maps in chain order.
    pub operators: Vec<OperatorReport>,
    /// Kernel at the start.
    pub kernel: KernelReport,
    /// Image against kernel at each inner space.
    pub links: Vec<LinkReport>,
    /// `expected kernel - dim V0 + dim V1 - ...`.
    pub alternating_sum: i64,
    /// Nullity minus rank at the first inner space when the mesh is not simply connected.
    pub betti_obstruction: Option<i64>,
    /// Notes on parameters sitting on a bound.
    pub warnings: Vec<String>,
    /// Named checks.
    pub checks: Vec<Check>,
    /// Overall outcome.
    pub verdict: Verdict,
}

impl ComplexReport {
    /// Outcome of the named check.
    pub fn check(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.pass)
    }

    /// Dimensions of the spaces.
    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.dim).collect()
    }
}

/// Inputs to the final bookkeeping, with ranks already adjusted for quotients.
struct ChainData {
    spaces: Vec<SpaceReport>,
    operators: Vec<OperatorReport>,
    compositions_zero: bool,
    kernel: KernelReport,
    simply_connected: bool,
    warnings: Vec<String>,
}

fn finish(spec: &ComplexSpec, mesh: MeshSummary, data: ChainData, opts: &VerifyOptions) -> ComplexReport {
    let dims: Vec<usize> = data.spaces.iter().map(|s| s.dim).collect();
    let n = data.operators.len();
    let links: Vec<LinkReport> = (1..n)
        .map(|i| LinkReport {
            space: i,
            image: data.operators[i - 1].rank,
            kernel: data.operators[i].nullity,
        })
        .collect();
    let mut alt = data.kernel.expected as i64;
    for (i, d) in dims.iter().enumerate() {
        alt += if i % 2 == 0 { -(*d as i64) } else { *d as i64 };
    }
    let last = &data.operators[n - 1];
    let mut checks = vec![
        Check {
            name: "zero_compositions".into(),
            pass: data.compositions_zero,
        },
        Check {
            name: "kernel_dimension".into(),
            pass: data.kernel.observed == data.kernel.expected,
        },
        Check {
            name: "kernel_generators".into(),
            pass: data.kernel.generators_in_kernel && data.kernel.generators_independent,
        },
    ];
    for l in &links {
        checks.push(Check {
            name: format!("exact_at_space_{}", l.space),
            pass: l.image == l.kernel,
        });
    }
    checks.push(Check {
        name: "last_surjective".into(),
        pass: last.rank == last.rows,
    });
    checks.push(Check {
        name: "alternating_sum_zero".into(),
        pass: alt == 0,
    });
    if opts.strict {
        checks.push(Check {
            name: "no_boundary_warnings".into(),
            pass: data.warnings.is_empty(),
        });
    }
    let betti = if data.simply_connected {
        None
    } else {
        links.first().map(|l| l.kernel as i64 - l.image as i64)
    };
    let verdict = if !data.compositions_zero {
        Verdict::NotExact
    } else if !data.simply_connected {
        Verdict::NotApplicable
    } else if checks.iter().all(|c| c.pass) {
        Verdict::Exact
    } else {
        Verdict::NotExact
    };
    ComplexReport {
        spec: spec.clone(),
        mesh,
        spaces: data.spaces,
        operators: data.operators,
        kernel: data.kernel,
        links,
        alternating_sum: alt,
        betti_obstruction: betti,
        warnings: data.warnings,
        checks,
        verdict,
    }
}

fn op_report(label: &str, m: &RatMatrix) -> OperatorReport {
    let r = rank(m);
    OperatorReport {
        label: label.to_string(),
        rows: m.rows(),
        cols: m.cols(),
        rank: r,
        nullity: m.cols() - r,
    }
}

fn space_report(s: &GlobalSpace) -> SpaceReport {
    let c = s.dofs.counts();
    SpaceReport {
        label: s.space.to_string(),
        dim: s.dim,
        per_entity: Some([c.vertex, c.edge, c.interior]),
    }
}

fn pair(v: i32, e: i32) -> SmoothnessPair {
    SmoothnessPair::new(v, e)
}

fn shift(r: SmoothnessPair, d: i32) -> SmoothnessPair {
    if d >= 0 {
        r.shifted(d)
    } else {
        pair((r.v + d).max(-1), (r.e + d).max(-1))
    }
}

/// Spaces, operators and kernel of a chain without special structure.
struct Plan {
    spaces: Vec<SpaceSpec>,
    ops: Vec<DiffOp>,
    kernel: KernelGenerators,
}

fn check_r0(cs: &ComplexSpec, expected: SmoothnessPair) -> Result<()> {
    match cs.r0 {
        Some(r0) if r0 != expected => Err(Error::Parameter(format!(
            "r0 = r1 + 1 fails: r0 = {r0}, r1 + 1 = {expected}"
        ))),
        _ => Ok(()),
    }
}

fn plan(cs: &ComplexSpec) -> Result<Plan> {
    use ComplexKind as K;
    use FieldTransform as T;
    let (k, r1, r2) = (cs.k, cs.r1, cs.r2);
    let need_k = |min: usize| require(k >= min, || format!("k >= {min} fails for k = {k}"));
    let p = SpaceSpec::plain;
    Ok(match cs.kind {
        K::Derham | K::DerhamRotated => {
            check_r0(cs, r1.shifted(1))?;
            need_k(1)?;
            let rot = cs.kind == K::DerhamRotated;
            Plan {
                spaces: vec![
                    p(ElementSpec::scalar(k + 1, r1.shifted(1))),
                    SpaceSpec::rotated(
                        ElementSpec::new(Family::VectorDiv, k, r1, r2),
                        if rot { T::RotateVector } else { T::Identity },
                    ),
                    p(ElementSpec::scalar(k - 1, r2)),
                ],
                ops: if rot {
                    vec![DiffOp::Grad, DiffOp::RotVector]
                } else {
                    vec![DiffOp::CurlScalar, DiffOp::DivVector]
                },
                kernel: KernelGenerators::Constants,
            }
        }
        K::Elasticity | K::ElasticityRotated => {
            check_r0(cs, r1.shifted(2))?;
            need_k(1)?;
            let rot = cs.kind == K::ElasticityRotated;
            Plan {
                spaces: vec![
                    p(ElementSpec::scalar(k + 2, r1.shifted(2))),
                    SpaceSpec::rotated(
                        ElementSpec::new(Family::SymDiv, k, r1, r2),
                        if rot { T::Conjugate } else { T::Identity },
                    ),
                    SpaceSpec::rotated(
                        ElementSpec::vector_smooth(k - 1, r2),
                        if rot { T::RotateVector } else { T::Identity },
                    ),
                ],
                ops: if rot {
                    vec![DiffOp::Hess, DiffOp::RotMatrixRowwise]
                } else {
                    vec![DiffOp::Air, DiffOp::DivMatrixRowwise]
                },
                kernel: KernelGenerators::P1,
            }
        }
        K::DivdivPlus | K::DivdivPlusRotated => {
            check_r0(cs, r1.shifted(1))?;
            need_k(2)?;
            let rot = cs.kind == K::DivdivPlusRotated;
            Plan {
                spaces: vec![
                    SpaceSpec::rotated(
                        ElementSpec::vector_smooth(k + 1, r1.shifted(1)),
                        if rot { T::RotateVector } else { T::Identity },
                    ),
                    SpaceSpec::rotated(
                        ElementSpec::new(Family::SymDivDivPlus, k, r1, r2),
                        if rot { T::Conjugate } else { T::Identity },
                    ),
                    p(ElementSpec::scalar(k - 2, r2)),
                ],
                ops: if rot {
                    vec![DiffOp::SymGrad, DiffOp::RotRot]
                } else {
                    vec![DiffOp::SymCurl, DiffOp::DivDiv]
                },
                kernel: if rot {
                    KernelGenerators::Rm
                } else {
                    KernelGenerators::Rt
                },
            }
        }
        K::DivdivBdmStart | K::DivdivRelaxed => {
            require(r1.e == -1, || format!("r1 = (r1^v, -1) is required, got r1 = {r1}"))?;
            need_k(2)?;
            let first = if cs.kind == K::DivdivBdmStart {
                ElementSpec::new(Family::VectorDiv, k + 1, pair(r1.v + 1, 0), pair(r1.v, 0))
            } else {
                ElementSpec::vector_smooth(k + 1, pair(r1.v + 1, 0))
            };
            check_r0(cs, first.r1)?;
            let family = if cs.kind == K::DivdivBdmStart {
                Family::SymDivDivPlus
            } else {
                Family::SymDivDivRelaxed
            };
            Plan {
                spaces: vec![
                    p(first),
                    p(ElementSpec::new(family, k, r1, r2)),
                    p(ElementSpec::scalar(k - 2, r2)),
                ],
                ops: vec![DiffOp::SymCurl, DiffOp::DivDiv],
                kernel: KernelGenerators::Rt,
            }
        }
        K::Bubble | K::Curldiv | K::DivdivPlusQuotient => {
            return Err(Error::Parameter(format!("{} has its own verification path", cs.kind)))
        }
    })
}

fn boundary_warnings(cs: &ComplexSpec) -> Vec<String> {
    let mut w = Vec::new();
    let note = |w: &mut Vec<String>, deg: i64, r: SmoothnessPair, bound: i64, what: &str| {
        if deg >= 0 && r.check_lattice(deg).is_ok() && bubble_dim(deg, r) == bound {
            w.push(format!("{what} = {bound} sits on its lower bound"));
        }
    };
    let k = cs.k as i64;
    match cs.kind {
        ComplexKind::Derham | ComplexKind::DerhamRotated | ComplexKind::Bubble => {
            note(&mut w, k - 1, cs.r2, 1, "dim B_{k-1}(r2)")
        }
        ComplexKind::Curldiv => {
            note(&mut w, k - 1, cs.r2, 1, "dim B_{k-1}(r2)");
            if let Some(r3) = cs.r3 {
                note(&mut w, k - 3, r3, 1, "dim B_{k-3}(r3)");
            }
        }
        ComplexKind::Elasticity | ComplexKind::ElasticityRotated => {}
        _ => note(&mut w, k - 2, cs.r2, 3, "dim B_{k-2}(r2)"),
    }
    w
}

fn kernel_report(
    first: &GlobalSpace,
    d1: &RatMatrix,
    generators: KernelGenerators,
    extra_cols: usize,
    observed: usize,
) -> Result<KernelReport> {
    let mut vecs = Vec::new();
    for g in 0..generators.count() {
        let mut v = first.interpolate(&|c: &Cell| Ok(generators.fields(&c.geom)[g].clone()))?;
        v.extend(std::iter::repeat_n(Rational::zero(), extra_cols));
        vecs.push(v);
    }
    let in_kernel = vecs
        .iter()
        .map(|v| d1.mul_vec(v).map(|w| w.iter().all(Zero::is_zero)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|b| b);
    let independent = vecs.is_empty() || rank(&RatMatrix::from_rows(vecs.clone(), d1.cols())?) == vecs.len();
    Ok(KernelReport {
        generators,
        expected: generators.count(),
        observed,
        generators_in_kernel: in_kernel,
        generators_independent: independent,
    })
}

fn mutate(d: &mut RatMatrix, row: Option<usize>) {
    if let Some(i) = row {
        for j in 0..d.cols() {
            d.set(i, j, Rational::zero());
        }
    }
}

/// Builds every space and map of a complex on `mesh` and checks exactness.
///
/// Parameter violations are errors; failed checks are reported in the verdict.
pub fn verify_complex(cs: &ComplexSpec, mesh: &Mesh, opts: &VerifyOptions) -> Result<ComplexReport> {
    match cs.kind {
        ComplexKind::Bubble => return verify_bubble_complex(cs, opts),
        ComplexKind::Curldiv => return verify_curldiv(cs, mesh, opts),
        ComplexKind::DivdivPlusQuotient => return verify_divdiv_quotient(cs, mesh, opts),
        _ => {}
    }
    let plan = plan(cs)?;
    for s in &plan.spaces {
        dof_counts(&s.element)?;
    }
    let mut cache = ElementCache::new();
    let spaces = plan
        .spaces
        .iter()
        .map(|s| GlobalSpace::assemble(*s, mesh, &mut cache))
        .collect::<Result<Vec<_>>>()?;
    let mut mats = Vec::new();
    for (i, op) in plan.ops.iter().enumerate() {
        mats.push(assemble_operator(&spaces[i], &spaces[i + 1], *op)?);
    }
    if opts.mutate_last_interior {
        let row = spaces.last().and_then(GlobalSpace::last_interior_dof);
        mutate(&mut mats.last_mut().expect("operators").matrix, row);
    }
    let mut zero = true;
    for w in mats.windows(2) {
        zero &= is_zero(&multiply(&w[1].matrix, &w[0].matrix)?);
    }
    let operators: Vec<OperatorReport> = mats.iter().map(|m| op_report(&m.label, &m.matrix)).collect();
    let kernel = kernel_report(&spaces[0], &mats[0].matrix, plan.kernel, 0, operators[0].nullity)?;
    let data = ChainData {
        spaces: spaces.iter().map(space_report).collect(),
        operators,
        compositions_zero: zero,
        kernel,
        simply_connected: mesh.is_simply_connected(),
        warnings: boundary_warnings(cs),
    };
    Ok(finish(cs, MeshSummary::of(mesh), data, opts))
}

fn curldiv_specs(cs: &ComplexSpec) -> Result<[ElementSpec; 4]> {
    let (k, r1, r2) = (cs.k as i64, cs.r1, cs.r2);
    let r3 = cs
        .r3
        .ok_or_else(|| Error::Parameter("the curl-div complex needs r3".into()))?;
    check_r0(cs, r1.shifted(1))?;
    require(r2.v >= (r1.v - 1).max(0) && r2.e >= (r1.e - 1).max(0), || {
        format!("r2 >= max(r1 - 1, 0) fails for r1 = {r1}, r2 = {r2}")
    })?;
    require(r3.v >= (r2.v - 2).max(-1) && r3.e >= (r2.e - 2).max(-1), || {
        format!("r3 >= max(r2 - 2, -1) fails for r2 = {r2}, r3 = {r3}")
    })?;
    let (v1, v2, v3) = (r1.v as i64, r2.v as i64, r3.v as i64);
    let kmin = (2 * v1 + 2).max(2 * v2 + 2).max(2 * v3 + 4).max(3);
    require(k >= kmin, || {
        format!("k >= max(2 r1^v + 2, 2 r2^v + 2, 2 r3^v + 4, 3) fails for k = {k}")
    })?;
    for (deg, r, what) in [(k - 1, r2, "B_{k-1}(r2)"), (k - 3, r3, "B_{k-3}(r3)")] {
        r.check_lattice(deg)
            .map_err(|e| Error::Parameter(format!("bubble space {what}: {e}")))?;
        let b = bubble_dim(deg, r);
        require(b >= 1, || format!("dim {what} >= 1 fails (dim = {b})"))?;
    }
    let k = cs.k;
    Ok([
        ElementSpec::scalar(k + 1, r1.shifted(1)),
        ElementSpec::new(Family::VectorDiv, k, r1, r2),
        ElementSpec::new(Family::VectorDiv, k - 2, shift(r2, -1), r3),
        ElementSpec::scalar(k - 3, r3),
    ])
}

fn verify_curldiv(cs: &ComplexSpec, mesh: &Mesh, opts: &VerifyOptions) -> Result<ComplexReport> {
    let specs = curldiv_specs(cs)?;
    let mut cache = ElementCache::new();
    let spaces = specs
        .iter()
        .map(|s| GlobalSpace::assemble(SpaceSpec::plain(*s), mesh, &mut cache))
        .collect::<Result<Vec<_>>>()?;
    let curl = assemble_operator(&spaces[0], &spaces[1], DiffOp::CurlScalar)?;
    let x = spaces[1].interpolate(&|c: &Cell| {
        PolyField::new(Shape::Vector2, vec![coordinate(&c.geom, 0), coordinate(&c.geom, 1)])
    })?;
    let d1 = curl.matrix.hstack(&RatMatrix::from_cols(&[x], spaces[1].dim)?)?;
    let d2 = assemble_operator(&spaces[1], &spaces[2], DiffOp::CurlDiv)?.matrix;
    let mut d3 = assemble_operator(&spaces[2], &spaces[3], DiffOp::DivVector)?.matrix;
    if opts.mutate_last_interior {
        mutate(&mut d3, spaces[3].last_interior_dof());
    }
    let zero = is_zero(&multiply(&d2, &d1)?) && is_zero(&multiply(&d3, &d2)?);
    let operators = vec![
        op_report("(curl, x)", &d1),
        op_report("CurlDiv", &d2),
        op_report("DivVector", &d3),
    ];
    let kernel = kernel_report(&spaces[0], &d1, KernelGenerators::Constants, 1, operators[0].nullity)?;
    let mut reports: Vec<SpaceReport> = spaces.iter().map(space_report).collect();
    reports[0].label = format!("{} x R", reports[0].label);
    reports[0].dim += 1;
    let data = ChainData {
        spaces: reports,
        operators,
        compositions_zero: zero,
        kernel,
        simply_connected: mesh.is_simply_connected(),
        warnings: boundary_warnings(cs),
    };
    Ok(finish(cs, MeshSummary::of(mesh), data, opts))
}

fn verify_divdiv_quotient(cs: &ComplexSpec, mesh: &Mesh, opts: &VerifyOptions) -> Result<ComplexReport> {
    let (k, r1, r2) = (cs.k, cs.r1, cs.r2);
    check_r0(cs, r1.shifted(1))?;
    let matrix = ElementSpec::new(Family::MatrixDivDivPlus, k, r1, r2);
    dof_counts(&matrix)?;
    let mut cache = ElementCache::new();
    let first = GlobalSpace::assemble(
        SpaceSpec::plain(ElementSpec::vector_smooth(k + 1, r1.shifted(1))),
        mesh,
        &mut cache,
    )?;
    let middle = GlobalSpace::assemble(SpaceSpec::plain(matrix), mesh, &mut cache)?;
    let skew = GlobalSpace::assemble(SpaceSpec::plain(ElementSpec::scalar(k, r1)), mesh, &mut cache)?;
    let last = GlobalSpace::assemble(SpaceSpec::plain(ElementSpec::scalar(k - 2, r2)), mesh, &mut cache)?;
    let c = assemble_operator(&first, &middle, DiffOp::CurlVectorRowwise)?.matrix;
    let m = assemble_operator(&skew, &middle, DiffOp::Mskw)?.matrix;
    let mut d = assemble_operator(&middle, &last, DiffOp::DivDiv)?.matrix;
    if opts.mutate_last_interior {
        mutate(&mut d, last.last_interior_dof());
    }
    let zero = is_zero(&multiply(&d, &c)?) && is_zero(&multiply(&d, &m)?);
    let rank_m = rank(&m);
    let rank_cm = rank(&c.hstack(&m)?);
    let rank_d = rank(&d);
    let quotient_dim = middle.dim - rank_m;
    let rank_d1 = rank_cm - rank_m;
    let operators = vec![
        OperatorReport {
            label: "curl rowwise into the quotient".into(),
            rows: quotient_dim,
            cols: first.dim,
            rank: rank_d1,
            nullity: first.dim - rank_d1,
        },
        OperatorReport {
            label: "divdiv on the quotient".into(),
            rows: last.dim,
            cols: quotient_dim,
            rank: rank_d,
            nullity: quotient_dim - rank_d,
        },
    ];
    // A generator lies in the kernel when its curl is a skew field of the quotient.
    let mut kernel = kernel_report(
        &first,
        &RatMatrix::zeros(1, first.dim),
        KernelGenerators::Rt,
        0,
        operators[0].nullity,
    )?;
    let mut in_kernel = true;
    for g in 0..3 {
        let v = first.interpolate(&|cell: &Cell| Ok(KernelGenerators::Rt.fields(&cell.geom)[g].clone()))?;
        let img = c.mul_vec(&v)?;
        in_kernel &= rank(&m.hstack(&RatMatrix::from_cols(&[img], middle.dim)?)?) == rank_m;
    }
    kernel.generators_in_kernel = in_kernel;
    let mut spaces = vec![space_report(&first), space_report(&middle), space_report(&last)];
    spaces[1].label = format!("{} / mskw {}", spaces[1].label, skew.space);
    spaces[1].dim = quotient_dim;
    let data = ChainData {
        spaces,
        operators,
        compositions_zero: zero,
        kernel,
        simply_connected: mesh.is_simply_connected(),
        warnings: boundary_warnings(cs),
    };
    Ok(finish(cs, MeshSummary::of(mesh), data, opts))
}

/// Verifies the bubble complex `0 -> B_{k+1}(r1+1) -> B^div_k(r1,r2) -> B_{k-1}(r2) -> R -> 0`
/// on the reference triangle, with the mean value as the last map.
pub fn verify_bubble_complex(cs: &ComplexSpec, opts: &VerifyOptions) -> Result<ComplexReport> {
    let (k, r1, r2) = (cs.k, cs.r1, cs.r2);
    check_r0(cs, r1.shifted(1))?;
    let spec = ElementSpec::new(Family::VectorDiv, k, r1, r2);
    let dofs = build_dofs(&spec)?;
    let t = TriangleGeom::reference();
    let el = LocalElement::new(dofs.clone(), FieldTransform::Identity, Frame::local(t.clone()))?;
    let interior: Vec<usize> = (0..dofs.len())
        .filter(|&i| dofs.functionals[i].entity == Entity::Interior)
        .collect();
    let n0_nodes = bubble_set(k + 1, r1.shifted(1))?;
    let n2_nodes = bubble_set(k - 1, r2)?;
    let nodes_km1 = enumerate_lattice(k - 1);
    let n1 = interior.len();
    // curl: B_{k+1}(r1+1) -> B^div.
    let mut c = RatMatrix::zeros(n1, n0_nodes.len());
    for (j, a) in n0_nodes.iter().enumerate() {
        let f = PolyField::scalar(BernsteinPoly::monomial(a)).apply(DiffOp::CurlScalar, &t)?;
        let vals = el.evaluate(&f)?;
        for (i, v) in vals.iter().enumerate() {
            let pos = interior.iter().position(|&q| q == i);
            match pos {
                Some(p) => c.set(p, j, v.clone()),
                None if !v.is_zero() => {
                    return Err(Error::Inclusion(
                        "curl of a bubble has a nonzero boundary functional".into(),
                    ))
                }
                None => {}
            }
        }
    }
    // div: B^div -> B_{k-1}(r2).
    let mut d = RatMatrix::zeros(n2_nodes.len(), n1);
    for (j, &q) in interior.iter().enumerate() {
        let div = el.dual_field(q)?.apply(DiffOp::DivVector, &t)?.comps[0].elevate(k - 1);
        for (a, v) in nodes_km1.iter().zip(div.coeffs()) {
            match n2_nodes.iter().position(|b| b == a) {
                Some(p) => d.set(p, j, v.clone()),
                None if !v.is_zero() => {
                    return Err(Error::Inclusion("divergence of a div bubble leaves B_{k-1}(r2)".into()))
                }
                None => {}
            }
        }
    }
    // Mean value: B_{k-1}(r2) -> R.
    let mut mean = RatMatrix::zeros(1, n2_nodes.len());
    for (j, a) in n2_nodes.iter().enumerate() {
        mean.set(0, j, BernsteinPoly::monomial(a).integrate(&t));
    }
    if opts.mutate_last_interior {
        mutate(&mut mean, Some(0));
    }
    let zero = is_zero(&multiply(&d, &c)?) && is_zero(&multiply(&mean, &d)?);
    let operators = vec![
        op_report("CurlScalar", &c),
        op_report("DivVector", &d),
        op_report("mean", &mean),
    ];
    let kernel = KernelReport {
        generators: KernelGenerators::Zero,
        expected: 0,
        observed: operators[0].nullity,
        generators_in_kernel: true,
        generators_independent: true,
    };
    let label = |s: String, dim: usize| SpaceReport {
        label: s,
        dim,
        per_entity: None,
    };
    let spaces = vec![
        label(format!("B_{}{}", k + 1, r1.shifted(1)), n0_nodes.len()),
        label(format!("B^div_{}({}, {})", k, r1, r2), n1),
        label(format!("B_{}{}", k - 1, r2), n2_nodes.len()),
        label("R".into(), 1),
    ];
    let data = ChainData {
        spaces,
        operators,
        compositions_zero: zero,
        kernel,
        simply_connected: true,
        warnings: boundary_warnings(cs),
    };
    let summary = MeshSummary::of(&Mesh::reference_triangle());
    Ok(finish(cs, summary, data, opts))
}

/// `1 - C(k+3,2) + 2 C(k+2,2) - C(k+1,2) = 0` for `k = 1..=k_max`.
pub fn check_poly_identity(k_max: usize) -> bool {
    (1..=k_max as i64).all(|k| 1 - binom2(k + 3) + 2 * binom2(k + 2) - binom2(k + 1) == 0)
}

/// Per-entity alternating counts `(vertex, edge, interior)` of the three
/// spaces of the smooth de Rham complex; each is `(1, -1, 1)` when the
/// complex is exact on every simply connected mesh.
pub fn euler_locality(k: usize, r1: SmoothnessPair, r2: SmoothnessPair) -> Result<[i64; 3]> {
    let a = dof_counts(&ElementSpec::scalar(k + 1, r1.shifted(1)))?;
    let b = dof_counts(&ElementSpec::new(Family::VectorDiv, k, r1, r2))?;
    let c = dof_counts(&ElementSpec::scalar(k - 1, r2))?;
    let alt = |x: usize, y: usize, z: usize| x as i64 - y as i64 + z as i64;
    Ok([
        alt(a.vertex, b.vertex, c.vertex),
        alt(a.edge, b.edge, c.edge),
        alt(a.interior, b.interior, c.interior),
    ])
}

/// Rank of the identity map between two spaces of the same shape and degree,
/// failing with [`Error::Inclusion`] when `small` is not contained in `large`.
pub fn inclusion_rank(small: &GlobalSpace, large: &GlobalSpace) -> Result<usize> {
    let m = assemble_map(small, large, "inclusion", &|f, _| Ok(f.clone()))?;
    Ok(rank(&m.matrix))
}

/// Global field with the given coefficients, restricted to triangle `t`.
pub fn restrict(space: &GlobalSpace, coeffs: &[Rational], t: usize) -> Result<PolyField> {
    let cs = &space.cells[t];
    let local: Vec<Rational> = cs.l2g.iter().map(|&g| coeffs[g].clone()).collect();
    let c = cs.element.inverse.mul_vec(&local)?;
    field_from_coeffs(space.space.element.shape(), space.space.element.k, &c)
}

/// Convenience constructor used by tests and the command line.
pub fn complex_spec(kind: ComplexKind, k: usize, r1: SmoothnessPair, r2: SmoothnessPair, mesh: &str) -> ComplexSpec {
    ComplexSpec {
        kind,
        k,
        r0: None,
        r1,
        r2,
        r3: None,
        mesh: mesh.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::SquarePattern;

    fn square() -> Mesh {
        Mesh::unit_square(1, SquarePattern::Diagonal).unwrap()
    }

    fn run(kind: ComplexKind, k: usize, r1: (i32, i32), r2: (i32, i32)) -> ComplexReport {
        let cs = complex_spec(kind, k, pair(r1.0, r1.1), pair(r2.0, r2.1), "builtin:square-diagonal-1");
        verify_complex(&cs, &square(), &VerifyOptions::default()).unwrap()
    }

    #[test]
    fn global_dimensions() {
        let mut cache = ElementCache::new();
        let m = square();
        let dim = |e: ElementSpec, cache: &mut ElementCache| {
            GlobalSpace::assemble(SpaceSpec::plain(e), &m, cache).unwrap().dim
        };
        assert_eq!(dim(ElementSpec::scalar(2, pair(0, 0)), &mut cache), 9);
        assert_eq!(
            dim(
                ElementSpec::new(Family::VectorDiv, 4, pair(1, 0), pair(0, -1)),
                &mut cache
            ),
            46
        );
        assert_eq!(dim(ElementSpec::scalar(3, pair(0, -1)), &mut cache), 18);
    }

    #[test]
    fn standard_pair_ranks() {
        let r = run(ComplexKind::Derham, 1, (-1, -1), (-1, -1));
        assert_eq!(r.dims(), vec![9, 10, 2]);
        assert_eq!(r.operators[0].rank, 8);
        assert_eq!(r.operators[1].rank, 2);
        assert_eq!(r.operators[1].nullity, 8);
        assert_eq!(r.verdict, Verdict::Exact);
    }

    #[test]
    fn curl_of_constant_is_zero_column() {
        let mut cache = ElementCache::new();
        let m = square();
        let s = GlobalSpace::assemble(SpaceSpec::plain(ElementSpec::scalar(2, pair(0, 0))), &m, &mut cache).unwrap();
        let v = GlobalSpace::assemble(
            SpaceSpec::plain(ElementSpec::new(Family::VectorDiv, 1, pair(-1, -1), pair(-1, -1))),
            &m,
            &mut cache,
        )
        .unwrap();
        let curl = assemble_operator(&s, &v, DiffOp::CurlScalar).unwrap();
        let one = s
            .interpolate(&|_| Ok(PolyField::scalar(BernsteinPoly::constant(0, Rational::one()))))
            .unwrap();
        assert!(curl.matrix.mul_vec(&one).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn falk_neilan_dims() {
        let r = run(ComplexKind::Derham, 4, (1, 0), (0, -1));
        assert_eq!(r.dims(), vec![29, 46, 18]);
        assert_eq!(r.alternating_sum, 0);
        assert_eq!(r.verdict, Verdict::Exact);
    }

    #[test]
    fn poly_identity_and_locality() {
        assert!(check_poly_identity(20));
        assert_eq!(euler_locality(4, pair(1, 0), pair(0, -1)).unwrap(), [1, -1, 1]);
    }

    #[test]
    fn bubble_complex_dims() {
        let cs = complex_spec(
            ComplexKind::Bubble,
            4,
            pair(1, 0),
            pair(0, -1),
            "builtin:reference-triangle",
        );
        let r = verify_bubble_complex(&cs, &VerifyOptions::default()).unwrap();
        assert_eq!(r.dims(), vec![0, 6, 7, 1]);
        assert_eq!(r.verdict, Verdict::Exact);
    }

    #[test]
    fn annulus_is_not_applicable() {
        let cs = complex_spec(
            ComplexKind::Derham,
            1,
            pair(-1, -1),
            pair(-1, -1),
            "builtin:square-annulus",
        );
        let r = verify_complex(&cs, &Mesh::square_annulus(), &VerifyOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NotApplicable);
        assert_eq!(r.betti_obstruction, Some(1));
        assert_eq!(r.check("zero_compositions"), Some(true));
    }

    #[test]
    fn restriction_reproduces_generators() {
        let mut cache = ElementCache::new();
        let m = square();
        let s = GlobalSpace::assemble(SpaceSpec::plain(ElementSpec::scalar(3, pair(1, 0))), &m, &mut cache).unwrap();
        let x = s
            .interpolate(&|c| Ok(PolyField::scalar(coordinate(&c.geom, 0))))
            .unwrap();
        for t in 0..2 {
            let f = restrict(&s, &x, t).unwrap();
            assert_eq!(f, PolyField::scalar(coordinate(&s.cells[t].cell.geom, 0)).elevate(3));
        }
    }
}
