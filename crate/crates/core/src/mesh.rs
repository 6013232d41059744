//! Conforming triangulations with exact rational coordinates.
//!
//! Edges are stored as sorted vertex pairs in ascending order, and every edge
//! is directed from its lower to its higher global vertex index. Local edge
//! `ℓ` of a triangle is the edge opposite its local vertex `ℓ`.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use num::{BigInt, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bernstein::{Point, TriangleGeom};
use crate::error::{Error, Result};
use crate::exact_linalg::{int, rat, Rational};

/// Split pattern of the unit square cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SquarePattern {
    /// Each cell is cut along its rising diagonal into two triangles.
    Diagonal,
    /// Each cell is cut by both diagonals into four triangles around its center.
    Crisscross,
}

/// A validated conforming triangulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    tri_edges: Vec<[usize; 3]>,
    edge_tris: Vec<Vec<usize>>,
    boundary_edge: Vec<bool>,
    boundary_vertex: Vec<bool>,
}

/// One triangle of a mesh together with its global incidence.
#[derive(Debug, Clone)]
pub struct Cell {
    /// Index of the triangle in the mesh.
    pub index: usize,
    /// Exact geometry in local vertex order.
    pub geom: TriangleGeom,
    /// Global vertex index of each local vertex.
    pub vertices: [usize; 3],
    /// Global index of local edge `ℓ`, the edge opposite local vertex `ℓ`.
    pub edges: [usize; 3],
    /// Local endpoints `(a, b)` of each local edge, ordered so that the
    /// global index of `a` is lower than that of `b`.
    pub edge_ends: [(usize, usize); 3],
}

/// On-disk document: rational coordinates as strings and zero-based triangles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshDocument {
    /// Coordinates written as `"p/q"` or integer strings.
    pub vertices: Vec<[NumText; 2]>,
    /// Vertex index triples.
    pub triangles: Vec<[usize; 3]>,
}

/// A rational accepted either as a JSON string or a JSON integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumText {
    /// Text such as `"3/4"` or `"-2"`.
    Text(String),
    /// A plain integer.
    Int(i64),
}

impl NumText {
    fn parse(&self) -> Result<Rational> {
        match self {
            NumText::Int(i) => Ok(int(*i)),
            NumText::Text(s) => {
                let t = s.trim();
                let (n, d) = match t.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (t, "1"),
                };
                let n = BigInt::from_str(n).map_err(|_| Error::Parse(format!("bad number {s:?}")))?;
                let d = BigInt::from_str(d).map_err(|_| Error::Parse(format!("bad number {s:?}")))?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                Ok(Rational::new(n, d))
            }
        }
    }
}

fn signed_area2(a: &Point, b: &Point, c: &Point) -> Rational {
    (&b[0] - &a[0]) * (&c[1] - &a[1]) - (&c[0] - &a[0]) * (&b[1] - &a[1])
}

fn strictly_inside_segment(p: &Point, a: &Point, b: &Point) -> bool {
    if !signed_area2(a, b, p).is_zero() {
        return false;
    }
    let dot = (&p[0] - &a[0]) * (&b[0] - &a[0]) + (&p[1] - &a[1]) * (&b[1] - &a[1]);
    let len = (&b[0] - &a[0]) * (&b[0] - &a[0]) + (&b[1] - &a[1]) * (&b[1] - &a[1]);
    dot.is_positive() && dot < len
}

impl Mesh {
    /// Validates and builds a mesh from coordinates and triangles.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::Topology("a mesh needs at least one triangle".into()));
        }
        let nv = vertices.len();
        let mut seen = BTreeSet::new();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::Topology(format!("triangle {t} references a missing vertex")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::Geometry(format!("triangle {t} repeats a vertex")));
            }
            if signed_area2(&vertices[tri[0]], &vertices[tri[1]], &vertices[tri[2]]).is_zero() {
                return Err(Error::Geometry(format!("triangle {t} is degenerate")));
            }
            let mut key = *tri;
            key.sort_unstable();
            if !seen.insert(key) {
                return Err(Error::Topology(format!("triangle {t} is duplicated")));
            }
        }
        for i in 0..nv {
            for j in (i + 1)..nv {
                if vertices[i] == vertices[j] {
                    return Err(Error::Geometry(format!("vertices {i} and {j} coincide")));
                }
            }
        }
        let mut edge_map: BTreeMap<[usize; 2], Vec<usize>> = BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for l in 0..3 {
                let (a, b) = (tri[(l + 1) % 3], tri[(l + 2) % 3]);
                edge_map.entry([a.min(b), a.max(b)]).or_default().push(t);
            }
        }
        let edges: Vec<[usize; 2]> = edge_map.keys().copied().collect();
        let edge_index: BTreeMap<[usize; 2], usize> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut edge_tris = Vec::with_capacity(edges.len());
        for (e, ts) in &edge_map {
            if ts.len() > 2 {
                return Err(Error::Topology(format!(
                    "edge ({},{}) is shared by {} triangles",
                    e[0],
                    e[1],
                    ts.len()
                )));
            }
            edge_tris.push(ts.clone());
        }
        for (i, e) in edges.iter().enumerate() {
            for (v, p) in vertices.iter().enumerate() {
                if v != e[0] && v != e[1] && strictly_inside_segment(p, &vertices[e[0]], &vertices[e[1]]) {
                    return Err(Error::Topology(format!(
                        "vertex {v} hangs on edge {i} ({},{})",
                        e[0], e[1]
                    )));
                }
            }
        }
        let tri_edges = triangles
            .iter()
            .map(|tri| {
                let mut out = [0; 3];
                for (l, slot) in out.iter_mut().enumerate() {
                    let (a, b) = (tri[(l + 1) % 3], tri[(l + 2) % 3]);
                    *slot = edge_index[&[a.min(b), a.max(b)]];
                }
                out
            })
            .collect();
        let boundary_edge: Vec<bool> = edge_tris.iter().map(|ts| ts.len() == 1).collect();
        let mut boundary_vertex = vec![false; nv];
        for (e, b) in edges.iter().zip(&boundary_edge) {
            if *b {
                boundary_vertex[e[0]] = true;
                boundary_vertex[e[1]] = true;
            }
        }
        let used: BTreeSet<usize> = triangles.iter().flatten().copied().collect();
        if used.len() != nv {
            return Err(Error::Topology("some vertex belongs to no triangle".into()));
        }
        Ok(Mesh {
            vertices,
            triangles,
            edges,
            tri_edges,
            edge_tris,
            boundary_edge,
            boundary_vertex,
        })
    }

    /// Parses a mesh document.
    pub fn load(document: &str) -> Result<Self> {
        let doc: MeshDocument = serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
        let vertices = doc
            .vertices
            .iter()
            .map(|[x, y]| Ok([x.parse()?, y.parse()?]))
            .collect::<Result<Vec<Point>>>()?;
        Mesh::new(vertices, doc.triangles)
    }

    /// Serializes the mesh so that [`Mesh::load`] reproduces it exactly.
    pub fn save(&self) -> String {
        let doc = MeshDocument {
            vertices: self
                .vertices
                .iter()
                .map(|p| [NumText::Text(p[0].to_string()), NumText::Text(p[1].to_string())])
                .collect(),
            triangles: self.triangles.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("mesh document serializes")
    }

    /// Structured square mesh of `[0,1]^2` with `n` cells per side.
    pub fn unit_square(n: usize, pattern: SquarePattern) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("n >= 1 fails for the square mesh".into()));
        }
        let nn = n as i64;
        let id = |i: usize, j: usize| i + j * (n + 1);
        let mut vertices: Vec<Point> = Vec::new();
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([rat(i as i64, nn), rat(j as i64, nn)]);
            }
        }
        let mut triangles = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                match pattern {
                    SquarePattern::Diagonal => {
                        triangles.push([a, b, c]);
                        triangles.push([a, c, d]);
                    }
                    SquarePattern::Crisscross => {
                        let m = vertices.len();
                        vertices.push([rat(2 * i as i64 + 1, 2 * nn), rat(2 * j as i64 + 1, 2 * nn)]);
                        triangles.push([a, b, m]);
                        triangles.push([b, c, m]);
                        triangles.push([c, d, m]);
                        triangles.push([d, a, m]);
                    }
                }
            }
        }
        Mesh::new(vertices, triangles)
    }

    /// The single triangle `(0,0), (1,0), (0,1)`.
    pub fn reference_triangle() -> Self {
        Mesh::new(
            vec![[int(0), int(0)], [int(1), int(0)], [int(0), int(1)]],
            vec![[0, 1, 2]],
        )
        .expect("reference triangle mesh")
    }

    /// The square `[0,4]^2` with the hole `(1,3)^2`, sixteen triangles.
    pub fn square_annulus() -> Self {
        let outer = [(0, 0), (2, 0), (4, 0), (4, 2), (4, 4), (2, 4), (0, 4), (0, 2)];
        let inner = [(1, 1), (2, 1), (3, 1), (3, 2), (3, 3), (2, 3), (1, 3), (1, 2)];
        let mut vertices: Vec<Point> = outer.iter().map(|&(x, y)| [int(x), int(y)]).collect();
        vertices.extend(inner.iter().map(|&(x, y)| [int(x), int(y)]));
        let mut triangles = Vec::new();
        for i in 0..8 {
            let j = (i + 1) % 8;
            let (o0, o1, i0, i1) = (i, j, 8 + i, 8 + j);
            triangles.push([o0, o1, i1]);
            triangles.push([o0, i1, i0]);
        }
        Mesh::new(vertices, triangles).expect("annulus mesh")
    }

    /// Resolves `builtin:square-diagonal-N`, `builtin:square-crisscross-N`,
    /// `builtin:reference-triangle` and `builtin:square-annulus`.
    pub fn builtin(name: &str) -> Result<Self> {
        let rest = name
            .strip_prefix("builtin:")
            .ok_or_else(|| Error::Parse(format!("{name:?} is not a builtin mesh name")))?;
        if rest == "reference-triangle" {
            return Ok(Self::reference_triangle());
        }
        if rest == "square-annulus" {
            return Ok(Self::square_annulus());
        }
        for (prefix, pattern) in [
            ("square-diagonal-", SquarePattern::Diagonal),
            ("square-crisscross-", SquarePattern::Crisscross),
        ] {
            if let Some(n) = rest.strip_prefix(prefix) {
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad subdivision count in {name:?}")))?;
                return Self::unit_square(n, pattern);
            }
        }
        Err(Error::Parse(format!("unknown builtin mesh {name:?}")))
    }

    /// Vertex coordinates.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Triangles as vertex index triples.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Edges as ascending vertex pairs, sorted.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Number of vertices.
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Number of edges.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of triangles.
    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Triangles adjacent to edge `e`.
    pub fn edge_triangles(&self, e: usize) -> &[usize] {
        &self.edge_tris[e]
    }

    /// Global edges of triangle `t`, local edge `ℓ` opposite local vertex `ℓ`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }

    /// True when edge `e` lies on the boundary.
    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_edge[e]
    }

    /// True when vertex `v` lies on the boundary.
    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    /// `|vertices| - |edges| + |triangles|`.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64
    }

    /// Number of closed boundary loops.
    pub fn boundary_loops(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.num_vertices()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let n = p[y];
                p[y] = r;
                y = n;
            }
            r
        }
        for (e, ends) in self.edges.iter().enumerate() {
            if self.boundary_edge[e] {
                let (a, b) = (find(&mut parent, ends[0]), find(&mut parent, ends[1]));
                parent[a] = b;
            }
        }
        let roots: BTreeSet<usize> = (0..self.num_vertices())
            .filter(|&v| self.boundary_vertex[v])
            .map(|v| find(&mut parent, v))
            .collect();
        roots.len()
    }

    /// True for a connected mesh with `χ = 1` and one boundary loop.
    pub fn is_simply_connected(&self) -> bool {
        self.euler_characteristic() == 1 && self.boundary_loops() == 1
    }

    /// Geometry and incidence of triangle `t`.
    pub fn cell(&self, t: usize) -> Result<Cell> {
        let tri = self.triangles[t];
        let geom = TriangleGeom::new([
            self.vertices[tri[0]].clone(),
            self.vertices[tri[1]].clone(),
            self.vertices[tri[2]].clone(),
        ])?;
        let mut edge_ends = [(0, 0); 3];
        for (l, slot) in edge_ends.iter_mut().enumerate() {
            let (a, b) = ((l + 1) % 3, (l + 2) % 3);
            *slot = if tri[a] < tri[b] { (a, b) } else { (b, a) };
        }
        Ok(Cell {
            index: t,
            geom,
            vertices: tri,
            edges: self.tri_edges[t],
            edge_ends,
        })
    }
}

/// The reference triangle followed by `count` rational triangles drawn from a
/// fixed-seed generator.
pub fn test_triangles(count: usize, seed: u64) -> Vec<TriangleGeom> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![TriangleGeom::reference()];
    while out.len() < count + 1 {
        let mut p = || -> Point {
            let mut c = || rat(rng.gen_range(-9..=9), rng.gen_range(1..=4));
            [c(), c()]
        };
        let vs = [p(), p(), p()];
        if let Ok(t) = TriangleGeom::new(vs) {
            out.push(t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(m: &Mesh) -> (usize, usize, usize) {
        (m.num_vertices(), m.num_edges(), m.num_triangles())
    }

    #[test]
    fn builtin_counts() {
        let d = Mesh::unit_square(1, SquarePattern::Diagonal).unwrap();
        assert_eq!(counts(&d), (4, 5, 2));
        assert_eq!(d.euler_characteristic(), 1);
        let c = Mesh::unit_square(1, SquarePattern::Crisscross).unwrap();
        assert_eq!(counts(&c), (5, 8, 4));
        assert_eq!(c.euler_characteristic(), 1);
        assert_eq!(counts(&Mesh::reference_triangle()), (3, 3, 1));
        assert_eq!(counts(&Mesh::builtin("builtin:square-diagonal-2").unwrap()), (9, 16, 8));
    }

    #[test]
    fn annulus_has_zero_characteristic() {
        let a = Mesh::square_annulus();
        assert_eq!(counts(&a), (16, 32, 16));
        assert_eq!(a.euler_characteristic(), 0);
        assert_eq!(a.boundary_loops(), 2);
        assert!(!a.is_simply_connected());
        assert!(Mesh::unit_square(2, SquarePattern::Crisscross)
            .unwrap()
            .is_simply_connected());
    }

    #[test]
    fn edge_count_identity() {
        for m in [
            Mesh::unit_square(3, SquarePattern::Diagonal).unwrap(),
            Mesh::unit_square(2, SquarePattern::Crisscross).unwrap(),
            Mesh::square_annulus(),
            Mesh::reference_triangle(),
        ] {
            let interior = (0..m.num_edges()).filter(|&e| !m.is_boundary_edge(e)).count();
            let boundary = m.num_edges() - interior;
            assert_eq!(3 * m.num_triangles(), 2 * interior + boundary);
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let m = Mesh::unit_square(3, SquarePattern::Crisscross).unwrap();
        let text = m.save();
        let again = Mesh::load(&text).unwrap();
        assert_eq!(again, m);
        assert_eq!(again.save(), text);
    }

    #[test]
    fn load_accepts_integers_and_fractions() {
        let m = Mesh::load(r#"{"vertices": [[0, "0"], ["1", 0], ["0", "1/1"]], "triangles": [[0,1,2]]}"#).unwrap();
        assert_eq!(counts(&m), (3, 3, 1));
    }

    #[test]
    fn invalid_documents() {
        assert!(matches!(Mesh::load("{"), Err(Error::Parse(_))));
        assert!(matches!(
            Mesh::load(r#"{"vertices": [["1/0","0"],["1","0"],["0","1"]], "triangles": [[0,1,2]]}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            Mesh::load(r#"{"vertices": [["0","0"],["1","1"],["2","2"]], "triangles": [[0,1,2]]}"#),
            Err(Error::Geometry(_))
        ));
        // Vertex 3 sits in the middle of the edge (0,1) of the first triangle.
        assert!(matches!(
            Mesh::load(
                r#"{"vertices": [["0","0"],["2","0"],["1","1"],["1","0"],["1","-1"]],
                    "triangles": [[0,1,2],[0,3,4]]}"#
            ),
            Err(Error::Topology(_))
        ));
    }

    #[test]
    fn cell_edges_are_oriented_low_to_high() {
        let m = Mesh::unit_square(2, SquarePattern::Crisscross).unwrap();
        for t in 0..m.num_triangles() {
            let c = m.cell(t).unwrap();
            for l in 0..3 {
                let (a, b) = c.edge_ends[l];
                assert!(c.vertices[a] < c.vertices[b]);
                assert_eq!(m.edges()[c.edges[l]], [c.vertices[a], c.vertices[b]]);
                assert!(a != l && b != l);
            }
        }
    }

    #[test]
    fn random_triangles_are_deterministic() {
        assert_eq!(test_triangles(3, 7), test_triangles(3, 7));
        assert_eq!(test_triangles(3, 7).len(), 4);
    }
}
