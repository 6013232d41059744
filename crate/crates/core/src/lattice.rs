//! The simplicial lattice of a triangle and its smoothness decomposition.
//!
//! A node of the degree-`k` lattice is a triple of nonnegative integers
//! summing to `k`; it indexes the Bernstein monomial `λ0^a0 λ1^a1 λ2^a2`.
//! Nodes are always listed in ascending lexicographic order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};

/// A lattice node `(α0, α1, α2)`.
pub type MultiIndex = [usize; 3];

/// Sum of the components of `a`.
pub fn degree(a: &MultiIndex) -> usize {
    a[0] + a[1] + a[2]
}

/// Number of nodes in the degree-`k` lattice, `C(k+2, 2)`.
pub fn lattice_size(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// `C(n, 2)` extended by zero to every `n < 2`.
pub fn binom2(n: i64) -> i64 {
    if n < 2 {
        0
    } else {
        n * (n - 1) / 2
    }
}

/// All nodes of the degree-`k` lattice in lexicographic order.
pub fn enumerate_lattice(k: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(lattice_size(k));
    for a0 in 0..=k {
        for a1 in 0..=(k - a0) {
            out.push([a0, a1, k - a0 - a1]);
        }
    }
    out
}

/// Position of `a` inside `enumerate_lattice(degree(a))`.
pub fn index_of(a: &MultiIndex) -> usize {
    let k = degree(a);
    (0..a[0]).map(|j| k - j + 1).sum::<usize>() + a[1]
}

/// A nonempty subset of the triangle vertices `{0, 1, 2}`, stored as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubSimplex(u8);

impl SubSimplex {
    /// Sub-simplex spanned by the listed vertices.
    pub fn new(vertices: &[usize]) -> Self {
        let mut m = 0u8;
        for &v in vertices {
            assert!(v < 3, "vertex index {v} out of range");
            m |= 1 << v;
        }
        assert!(m != 0, "a sub-simplex needs at least one vertex");
        SubSimplex(m)
    }

    /// The vertex `i`.
    pub fn vertex(i: usize) -> Self {
        Self::new(&[i])
    }

    /// The edge opposite vertex `i`.
    pub fn edge_opposite(i: usize) -> Self {
        let others: Vec<usize> = (0..3).filter(|&j| j != i).collect();
        Self::new(&others)
    }

    /// The whole triangle.
    pub fn triangle() -> Self {
        SubSimplex(0b111)
    }

    /// True when vertex `i` belongs to the sub-simplex.
    pub fn contains(&self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    /// Vertices of the sub-simplex in ascending order.
    pub fn vertices(&self) -> Vec<usize> {
        (0..3).filter(|&i| self.contains(i)).collect()
    }

    /// Number of vertices minus one.
    pub fn dim(&self) -> usize {
        self.0.count_ones() as usize - 1
    }

    /// The complementary vertex set, `None` for the whole triangle.
    pub fn complement(&self) -> Option<SubSimplex> {
        let m = !self.0 & 0b111;
        (m != 0).then_some(SubSimplex(m))
    }
}

/// Sum of the components of `a` over the vertices not in `f`.
pub fn distance(a: &MultiIndex, f: SubSimplex) -> usize {
    (0..3).filter(|&i| !f.contains(i)).map(|i| a[i]).sum()
}

/// Nodes at distance at most `r` from `f`; empty for negative `r`.
pub fn tube(k: usize, f: SubSimplex, r: i64) -> Vec<MultiIndex> {
    enumerate_lattice(k)
        .into_iter()
        .filter(|a| (distance(a, f) as i64) <= r)
        .collect()
}

/// Nodes at distance exactly `s` from `f`.
pub fn line(k: usize, f: SubSimplex, s: usize) -> Vec<MultiIndex> {
    enumerate_lattice(k)
        .into_iter()
        .filter(|a| distance(a, f) == s)
        .collect()
}

/// Orders of vertex and edge continuity; `-1` means none.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SmoothnessPair {
    /// Vertex smoothness order.
    pub v: i32,
    /// Edge smoothness order.
    pub e: i32,
}

impl SmoothnessPair {
    /// The pair `(v, e)`.
    pub const fn new(v: i32, e: i32) -> Self {
        SmoothnessPair { v, e }
    }

    /// Both orders shifted by `d`, with `-1` as the floor.
    pub fn shifted(&self, d: i32) -> Self {
        SmoothnessPair {
            v: (self.v + d).max(-1),
            e: (self.e + d).max(-1),
        }
    }

    /// Checks the inequalities under which the lattice decomposition of
    /// degree `k` is defined.
    pub fn check_lattice(&self, k: i64) -> Result<()> {
        let (v, e) = (self.v as i64, self.e as i64);
        require(e >= -1, || format!("r^e >= -1 fails for r = {self}"))?;
        require(v >= (2 * e).max(-1), || {
            format!("r^v >= max(2 r^e, -1) fails for r = {self}")
        })?;
        require(k >= (2 * v + 1).max(0), || {
            format!("k >= max(2 r^v + 1, 0) fails for k = {k}, r = {self}")
        })
    }
}

impl fmt::Display for SmoothnessPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.v, self.e)
    }
}

/// Parses `"v,e"`, for example `"1,-1"`.
impl FromStr for SmoothnessPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected a pair \"v,e\", got {s:?}"));
        let (v, e) = s.split_once(',').ok_or_else(bad)?;
        Ok(SmoothnessPair {
            v: v.trim().parse().map_err(|_| bad())?,
            e: e.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// Partition of the lattice into vertex tubes, edge tubes and interior nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeDecomposition {
    /// Lattice degree.
    pub k: usize,
    /// Smoothness orders used.
    pub r: SmoothnessPair,
    /// Vertex tube nodes, indexed by vertex.
    pub s0: [Vec<MultiIndex>; 3],
    /// Edge tube nodes outside the vertex tubes, indexed by opposite vertex.
    pub s1: [Vec<MultiIndex>; 3],
    /// Remaining interior nodes.
    pub s2: Vec<MultiIndex>,
}

impl LatticeDecomposition {
    /// Total number of vertex tube nodes.
    pub fn s0_len(&self) -> usize {
        self.s0.iter().map(Vec::len).sum()
    }

    /// Total number of edge tube nodes.
    pub fn s1_len(&self) -> usize {
        self.s1.iter().map(Vec::len).sum()
    }
}

/// Splits the degree-`k` lattice according to the smoothness orders `r`.
pub fn geometric_decomposition(k: usize, r: SmoothnessPair) -> Result<LatticeDecomposition> {
    r.check_lattice(k as i64)?;
    let rv = r.v as i64;
    let re = r.e as i64;
    let mut s0: [Vec<MultiIndex>; 3] = Default::default();
    let mut s1: [Vec<MultiIndex>; 3] = Default::default();
    let mut s2 = Vec::new();
    for a in enumerate_lattice(k) {
        if let Some(i) = (0..3).find(|&i| distance(&a, SubSimplex::vertex(i)) as i64 <= rv) {
            s0[i].push(a);
        } else if let Some(l) = (0..3).find(|&l| distance(&a, SubSimplex::edge_opposite(l)) as i64 <= re) {
            s1[l].push(a);
        } else {
            s2.push(a);
        }
    }
    Ok(LatticeDecomposition { k, r, s0, s1, s2 })
}

/// Interior nodes of the decomposition, spanning the bubble space `B_k(r)`.
pub fn bubble_set(k: usize, r: SmoothnessPair) -> Result<Vec<MultiIndex>> {
    Ok(geometric_decomposition(k, r)?.s2)
}

/// Closed-form size of the vertex tubes.
pub fn s0_dim(r: SmoothnessPair) -> i64 {
    3 * binom2(r.v as i64 + 2)
}

/// Closed-form size of the edge tubes outside the vertex tubes.
pub fn s1_dim(k: i64, r: SmoothnessPair) -> i64 {
    3 * (0..=(r.e as i64)).map(|i| k - 1 - 2 * r.v as i64 + i).sum::<i64>()
}

/// Closed-form size of the interior node set.
pub fn bubble_dim(k: i64, r: SmoothnessPair) -> i64 {
    let (v, e) = (r.v as i64, r.e as i64);
    if e >= 0 {
        binom2(k - 3 * e - 1) - 3 * binom2(v - 2 * e)
    } else {
        binom2(k + 2) - 3 * binom2(v + 2)
    }
}

/// Bubble dimension computed by enumeration, or zero when the parameters
/// admit no decomposition.
pub fn bubble_count(k: i64, r: SmoothnessPair) -> Result<usize> {
    if k < 0 {
        return Ok(0);
    }
    Ok(bubble_set(k as usize, r)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pair_text() {
        let r: SmoothnessPair = "2, -1".parse().unwrap();
        assert_eq!(r, SmoothnessPair::new(2, -1));
        assert_eq!(
            r.to_string()
                .trim_matches(|c| c == '(' || c == ')')
                .parse::<SmoothnessPair>()
                .unwrap(),
            r
        );
        assert!("2".parse::<SmoothnessPair>().is_err());
        assert!("a,b".parse::<SmoothnessPair>().is_err());
    }

    #[test]
    fn small_lattices() {
        assert_eq!(enumerate_lattice(0), vec![[0, 0, 0]]);
        assert_eq!(enumerate_lattice(1).len(), 3);
        assert_eq!(enumerate_lattice(3).len(), 10);
    }

    #[test]
    fn index_matches_enumeration() {
        for k in 0..9 {
            for (i, a) in enumerate_lattice(k).iter().enumerate() {
                assert_eq!(index_of(a), i);
            }
        }
    }

    #[test]
    fn distances() {
        assert_eq!(distance(&[4, 0, 0], SubSimplex::vertex(0)), 0);
        assert_eq!(distance(&[1, 1, 1], SubSimplex::vertex(0)), 2);
        assert_eq!(distance(&[2, 1, 1], SubSimplex::new(&[0, 1])), 1);
    }

    #[test]
    fn tubes_and_lines() {
        assert_eq!(tube(2, SubSimplex::vertex(0), 0), vec![[2, 0, 0]]);
        assert_eq!(tube(5, SubSimplex::vertex(1), 2).len(), 6);
        assert!(tube(5, SubSimplex::vertex(1), -1).is_empty());
        let mut l = line(4, SubSimplex::new(&[0, 1]), 1);
        l.sort_by(|a, b| b.cmp(a));
        assert_eq!(l, vec![[3, 0, 1], [2, 1, 1], [1, 2, 1], [0, 3, 1]]);
    }

    #[test]
    fn decomposition_examples() {
        let d = geometric_decomposition(5, SmoothnessPair::new(2, 1)).unwrap();
        assert_eq!((d.s0_len(), d.s1_len(), d.s2.len()), (18, 3, 0));
        let d = geometric_decomposition(8, SmoothnessPair::new(2, 1)).unwrap();
        assert_eq!((d.s0_len(), d.s1_len(), d.s2.len()), (18, 21, 6));
        let d = geometric_decomposition(1, SmoothnessPair::new(0, 0)).unwrap();
        assert_eq!((d.s0_len(), d.s1_len(), d.s2.len()), (3, 0, 0));
    }

    #[test]
    fn bubble_examples() {
        assert_eq!(bubble_set(3, SmoothnessPair::new(0, -1)).unwrap().len(), 7);
        assert_eq!(bubble_set(4, SmoothnessPair::new(1, 0)).unwrap().len(), 3);
        assert_eq!(bubble_set(5, SmoothnessPair::new(2, 1)).unwrap().len(), 0);
    }

    #[test]
    fn precondition_names_inequality() {
        let e = geometric_decomposition(3, SmoothnessPair::new(2, 1)).unwrap_err();
        assert!(e.to_string().contains("k >= max(2 r^v + 1, 0)"));
        let e = geometric_decomposition(9, SmoothnessPair::new(1, 1)).unwrap_err();
        assert!(e.to_string().contains("r^v >= max(2 r^e, -1)"));
        let e = geometric_decomposition(9, SmoothnessPair::new(1, -2)).unwrap_err();
        assert!(e.to_string().contains("r^e >= -1"));
    }

    #[test]
    fn subsimplex_complement() {
        let f = SubSimplex::new(&[0, 2]);
        assert_eq!(f.complement(), Some(SubSimplex::vertex(1)));
        assert_eq!(SubSimplex::triangle().complement(), None);
        assert_eq!(SubSimplex::edge_opposite(0).vertices(), vec![1, 2]);
        assert_eq!(f.dim(), 1);
    }

    #[test]
    fn vertex_tubes_disjoint_and_edge_overlap_in_vertex_tube() {
        for e in -1..=2 {
            for v in (2 * e).max(-1)..=5 {
                for k in (2 * v + 1).max(0)..=13 {
                    let k = k as usize;
                    for i in 0..3 {
                        for j in (i + 1)..3 {
                            let ti = tube(k, SubSimplex::vertex(i), v as i64);
                            let tj = tube(k, SubSimplex::vertex(j), v as i64);
                            assert!(ti.iter().all(|a| !tj.contains(a)));
                        }
                    }
                    // Edges opposite 2 and 1 meet at vertex 0.
                    let a = tube(k, SubSimplex::edge_opposite(2), e as i64);
                    let b = tube(k, SubSimplex::edge_opposite(1), e as i64);
                    let t0 = tube(k, SubSimplex::vertex(0), v as i64);
                    assert!(a.iter().filter(|x| b.contains(x)).all(|x| t0.contains(x)));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn line_symmetry(k in 0usize..10, mask in 1u8..7, s in 0usize..10) {
            prop_assume!(s <= k);
            let f = SubSimplex(mask);
            let fs = f.complement().unwrap();
            let mut a = line(k, f, s);
            let mut b = line(k, fs, k - s);
            a.sort();
            b.sort();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn tube_is_union_of_lines(k in 0usize..10, mask in 1u8..8, r in -1i64..10) {
            let f = SubSimplex(mask);
            let t = tube(k, f, r);
            let mut u: Vec<MultiIndex> = (0..=r.max(-1)).flat_map(|s| line(k, f, s as usize)).collect();
            u.sort();
            let mut t2 = t.clone();
            t2.sort();
            prop_assert_eq!(t2, u);
        }

        #[test]
        fn vertex_tube_is_triangular(k in 0usize..12, v in 0usize..3, r in 0usize..12) {
            prop_assume!(r <= k);
            prop_assert_eq!(tube(k, SubSimplex::vertex(v), r as i64).len(), lattice_size(r));
        }
    }
}
