//! Exact rational linear algebra.
//!
//! Every matrix entry is an arbitrary-precision rational number. Ranks are
//! computed by fraction-free Bareiss elimination on an integer scaling of the
//! rows, inverses by fraction-free Gauss-Jordan elimination, and there is no
//! floating-point path anywhere.

use std::fmt;

use num::integer::Integer;
use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Builds the rational `n / d`; panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Dense row-major matrix of rationals with fixed dimensions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl RatMatrix {
    /// The `rows x cols` zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    /// The `n x n` identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from row vectors; all rows must have length `cols`.
    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r);
        }
        Ok(RatMatrix { rows: n, cols, data })
    }

    /// Builds a matrix from column vectors of length `rows`.
    pub fn from_cols(cols: &[Vec<Rational>], rows: usize) -> Result<Self> {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::Dimension(format!(
                    "column {j} has {} entries, expected {rows}",
                    c.len()
                )));
            }
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    /// Builds a matrix from small integers, mainly for tests and examples.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged integer matrix");
                r.iter().map(|&x| int(x))
            })
            .collect();
        RatMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }

    /// Overwrites entry `(i, j)`.
    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        self.data[i * self.cols + j] = v;
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Column `j` as an owned vector.
    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Transposed copy.
    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// True when every entry is zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Matrix with the columns of `self` followed by the columns of `other`.
    pub fn hstack(&self, other: &RatMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "cannot place {} rows beside {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut m = Self::zeros(self.rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(m)
    }

    /// Submatrix made of the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), self.cols);
        for (a, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                m.set(a, j, self.get(i, j).clone());
            }
        }
        m
    }

    /// Submatrix made of the listed columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (b, &j) in cols.iter().enumerate() {
                m.set(i, b, self.get(i, j).clone());
            }
        }
        m
    }

    /// Exact product `self * v`.
    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }
}

/// Least common multiple of the denominators in `xs`.
fn denominator_lcm<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scales `xs` by the least common multiple of its denominators.
fn integerize(xs: &[Rational]) -> (BigInt, Vec<BigInt>) {
    let l = denominator_lcm(xs);
    let v = xs.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    (l, v)
}

/// Outcome of a fraction-free elimination on an integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BareissOutcome {
    /// Rank of the input.
    pub rank: usize,
    /// Pivot column of each eliminated row, in order.
    pub pivot_cols: Vec<usize>,
    /// True when every division performed during elimination was exact.
    pub exact_divisions: bool,
}

/// Fraction-free Bareiss elimination with first-nonzero pivoting on an
/// integer matrix given as rows. Columns without a pivot are skipped.
pub fn bareiss_integer_rank(mut a: Vec<Vec<BigInt>>) -> BareissOutcome {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivot_cols = Vec::new();
    let mut exact = true;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let piv = &pivot_row[c];
        for row in tail.iter_mut() {
            let f = row[c].clone();
            for j in (c + 1)..cols {
                let num = if f.is_zero() {
                    piv * &row[j]
                } else {
                    piv * &row[j] - &f * &pivot_row[j]
                };
                let (q, rem) = num.div_rem(&prev);
                if !rem.is_zero() {
                    exact = false;
                }
                row[j] = q;
            }
            row[c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivot_cols.push(c);
        r += 1;
    }
    BareissOutcome {
        rank: r,
        pivot_cols,
        exact_divisions: exact,
    }
}

/// Exact rank over the rationals.
pub fn rank(m: &RatMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    // Eliminate along the shorter side to keep the working array small.
    let src = if m.rows > m.cols { m.transpose() } else { m.clone() };
    let rows = (0..src.rows).map(|i| integerize(src.row(i)).1).collect();
    bareiss_integer_rank(rows).rank
}

/// Dimension of the kernel, `cols - rank`.
pub fn nullity(m: &RatMatrix) -> usize {
    m.cols - rank(m)
}

/// True when every entry of `m` is zero.
pub fn is_zero(m: &RatMatrix) -> bool {
    m.is_zero()
}

/// Exact transpose.
pub fn transpose(m: &RatMatrix) -> RatMatrix {
    m.transpose()
}

/// Exact matrix product `a * b`.
pub fn multiply(a: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix> {
    if a.cols != b.rows {
        return Err(Error::Dimension(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let arows: Vec<(BigInt, Vec<BigInt>)> = (0..a.rows).map(|i| integerize(a.row(i))).collect();
    let bcols: Vec<(BigInt, Vec<BigInt>)> = (0..b.cols).map(|j| integerize(&b.col(j))).collect();
    let mut out = RatMatrix::zeros(a.rows, b.cols);
    for (i, (da, ra)) in arows.iter().enumerate() {
        let nz: Vec<usize> = (0..a.cols).filter(|&t| !ra[t].is_zero()).collect();
        if nz.is_empty() {
            continue;
        }
        for (j, (db, cb)) in bcols.iter().enumerate() {
            let mut s = BigInt::zero();
            for &t in &nz {
                if !cb[t].is_zero() {
                    s += &ra[t] * &cb[t];
                }
            }
            if !s.is_zero() {
                out.set(i, j, Rational::new(s, da * db));
            }
        }
    }
    Ok(out)
}

/// Exact inverse of a square matrix.
///
/// The rows are first scaled to integers, `A' = D A`, and fraction-free
/// Gauss-Jordan elimination on `[A' | I]` yields `d I` on the left and
/// `d A'^{-1}` on the right, so that `A^{-1} = A'^{-1} D`.
pub fn invert(m: &RatMatrix) -> Result<RatMatrix> {
    if m.rows != m.cols {
        return Err(Error::Dimension(format!(
            "cannot invert a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    let mut scale = Vec::with_capacity(n);
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let (l, mut row) = integerize(m.row(i));
        row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
        scale.push(l);
        a.push(row);
    }
    let width = 2 * n;
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(Error::SingularMatrix)?;
        a.swap(k, p);
        let pivot_row = a[k].clone();
        let piv = &pivot_row[k];
        for (i, row) in a.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let f = row[k].clone();
            for j in 0..width {
                if j == k {
                    continue;
                }
                let num = if f.is_zero() {
                    piv * &row[j]
                } else {
                    piv * &row[j] - &f * &pivot_row[j]
                };
                row[j] = num / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = prev;
    let mut out = RatMatrix::zeros(n, n);
    for (i, row) in a.iter().enumerate() {
        for j in 0..n {
            let x = &row[n + j];
            if !x.is_zero() {
                out.set(i, j, Rational::new(x * &scale[j], d.clone()));
            }
        }
    }
    Ok(out)
}

/// Solves `m x = b` for square nonsingular `m`, column by column.
pub fn solve(m: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix> {
    multiply(&invert(m)?, b)
}

/// Incrementally maintained reduced echelon basis of a subspace of `Q^n`.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    dim: usize,
    /// Reduced vectors paired with their pivot coordinate; each is scaled so
    /// that the pivot entry equals one.
    rows: Vec<(usize, Vec<Rational>)>,
}

impl EchelonBasis {
    /// Empty basis inside `Q^dim`.
    pub fn new(dim: usize) -> Self {
        EchelonBasis { dim, rows: Vec::new() }
    }

    /// Current dimension of the spanned subspace.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// True when nothing has been inserted.
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `v` against the basis; the result is zero iff `v` lies in the span.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let mut w = v.to_vec();
        for (p, r) in &self.rows {
            if w[*p].is_zero() {
                continue;
            }
            let f = w[*p].clone();
            for (x, y) in w.iter_mut().zip(r) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        w
    }

    /// True when `v` lies in the span.
    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Inserts `v`; returns false (leaving the basis unchanged) when dependent.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        let w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].recip();
        let w: Vec<Rational> = w.into_iter().map(|x| x * &inv).collect();
        for (_, r) in self.rows.iter_mut() {
            if !r[p].is_zero() {
                let f = r[p].clone();
                for (x, y) in r.iter_mut().zip(&w) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        self.rows.push((p, w));
        true
    }
}

/// Lowest-index greedy choice of standard basis vectors completing the
/// column span of `subspace_cols` to all of `Q^ambient_dim`.
pub fn complement_basis(subspace_cols: &RatMatrix, ambient_dim: usize) -> Result<Vec<usize>> {
    if subspace_cols.rows() != ambient_dim {
        return Err(Error::Dimension(format!(
            "subspace columns have {} rows, ambient dimension is {ambient_dim}",
            subspace_cols.rows()
        )));
    }
    let mut basis = EchelonBasis::new(ambient_dim);
    for j in 0..subspace_cols.cols() {
        if !basis.insert(&subspace_cols.col(j)) {
            return Err(Error::DependentSubspace);
        }
    }
    let mut picked = Vec::new();
    let mut e = vec![Rational::zero(); ambient_dim];
    for i in 0..ambient_dim {
        if basis.len() == ambient_dim {
            break;
        }
        e[i] = Rational::one();
        if basis.insert(&e) {
            picked.push(i);
        }
        e[i] = Rational::zero();
    }
    Ok(picked)
}

/// Determinant by cofactor expansion along the first row; only meant for
/// small matrices as an independent oracle.
pub fn cofactor_determinant(m: &RatMatrix) -> Rational {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    if n == 0 {
        return Rational::one();
    }
    if n == 1 {
        return m.get(0, 0).clone();
    }
    let mut det = Rational::zero();
    for j in 0..n {
        let a = m.get(0, j);
        if a.is_zero() {
            continue;
        }
        let rest: Vec<usize> = (0..n).filter(|&c| c != j).collect();
        let minor = m.select_rows(&(1..n).collect::<Vec<_>>()).select_cols(&rest);
        let term = a * cofactor_determinant(&minor);
        if j % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    det
}

/// Rank by plain fraction-based Gaussian elimination, used as an oracle.
pub fn naive_rank(m: &RatMatrix) -> usize {
    let mut a: Vec<Vec<Rational>> = (0..m.rows).map(|i| m.row(i).to_vec()).collect();
    let mut r = 0;
    for c in 0..m.cols {
        let Some(p) = (r..m.rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in (r + 1)..m.rows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[r][c];
            let (top, bottom) = a.split_at_mut(i);
            for (x, p) in bottom[0][c..].iter_mut().zip(&top[r][c..]) {
                *x -= &f * p;
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_rank_and_nullity() {
        let i3 = RatMatrix::identity(3);
        assert_eq!(rank(&i3), 3);
        assert_eq!(nullity(&i3), 0);
    }

    #[test]
    fn proportional_rows_have_rank_one() {
        assert_eq!(rank(&RatMatrix::from_i64(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn zero_matrix_nullity() {
        assert_eq!(nullity(&RatMatrix::zeros(2, 2)), 2);
        assert!(is_zero(&RatMatrix::zeros(2, 2)));
    }

    #[test]
    fn invert_diagonal() {
        let m = RatMatrix::from_i64(&[&[2, 0], &[0, 4]]);
        let inv = invert(&m).unwrap();
        assert_eq!(inv.get(0, 0), &rat(1, 2));
        assert_eq!(inv.get(1, 1), &rat(1, 4));
        assert!(inv.get(0, 1).is_zero() && inv.get(1, 0).is_zero());
    }

    #[test]
    fn invert_singular_fails() {
        let m = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(invert(&m), Err(Error::SingularMatrix));
    }

    #[test]
    fn invert_needs_row_swap() {
        let m = RatMatrix::from_i64(&[&[0, 1, 0], &[1, 0, 2], &[3, 0, 1]]);
        let inv = invert(&m).unwrap();
        assert_eq!(multiply(&inv, &m).unwrap(), RatMatrix::identity(3));
    }

    #[test]
    fn multiply_identity_left() {
        let m = RatMatrix::from_i64(&[&[1, -2, 3], &[4, 5, 6]]);
        assert_eq!(multiply(&RatMatrix::identity(2), &m).unwrap(), m);
        assert!(multiply(&m, &m).is_err());
    }

    #[test]
    fn complement_of_diagonal_line() {
        let s = RatMatrix::from_i64(&[&[1], &[1]]);
        assert_eq!(complement_basis(&s, 2).unwrap(), vec![0]);
    }

    #[test]
    fn complement_of_constants_in_six_coefficients() {
        let s = RatMatrix::from_cols(&[vec![int(1); 6]], 6).unwrap();
        assert_eq!(complement_basis(&s, 6).unwrap(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn complement_of_nothing() {
        let s = RatMatrix::zeros(3, 0);
        assert_eq!(complement_basis(&s, 3).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn complement_rejects_dependent_columns() {
        let s = RatMatrix::from_i64(&[&[1, 2], &[1, 2], &[0, 0]]);
        assert_eq!(complement_basis(&s, 3), Err(Error::DependentSubspace));
    }

    #[test]
    fn cofactor_matches_known_determinant() {
        let m = RatMatrix::from_i64(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]]);
        assert_eq!(cofactor_determinant(&m), int(6));
    }

    fn small_matrix(max: usize) -> impl Strategy<Value = RatMatrix> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec((-4i64..=4, 1i64..=3), r * c).prop_map(move |v| {
                let rows = v
                    .chunks(c)
                    .map(|ch| ch.iter().map(|&(n, d)| rat(n, d)).collect())
                    .collect();
                RatMatrix::from_rows(rows, c).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rank_is_transpose_invariant(m in small_matrix(6)) {
            prop_assert_eq!(rank(&m), rank(&m.transpose()));
            prop_assert_eq!(rank(&m), naive_rank(&m));
        }

        #[test]
        fn product_rank_bounded(a in small_matrix(5), seed in 1usize..5) {
            let b = RatMatrix::from_rows(
                (0..a.cols()).map(|i| (0..seed).map(|j| int(((i * 7 + j * 3) % 5) as i64 - 2)).collect()).collect(),
                seed,
            ).unwrap();
            let ab = multiply(&a, &b).unwrap();
            prop_assert!(rank(&ab) <= rank(&a).min(rank(&b)));
        }

        #[test]
        fn invert_gives_identity(m in small_matrix(6)) {
            if m.rows() == m.cols() {
                match invert(&m) {
                    Ok(inv) => {
                        prop_assert_eq!(multiply(&inv, &m).unwrap(), RatMatrix::identity(m.rows()));
                        prop_assert_eq!(multiply(&m, &inv).unwrap(), RatMatrix::identity(m.rows()));
                    }
                    Err(e) => {
                        prop_assert_eq!(e, Error::SingularMatrix);
                        prop_assert!(rank(&m) < m.rows());
                    }
                }
            }
        }

        #[test]
        fn bareiss_stays_integral(
            (r, c, v) in (1usize..=12, 1usize..=12).prop_flat_map(|(r, c)| {
                (Just(r), Just(c), proptest::collection::vec(-6i64..=6, r * c))
            })
        ) {
            let rows: Vec<Vec<BigInt>> = v.chunks(c).map(|ch| ch.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let out = bareiss_integer_rank(rows);
            prop_assert!(out.exact_divisions);
            let m = RatMatrix::from_rows(v.chunks(c).map(|ch| ch.iter().map(|&x| int(x)).collect()).collect(), c).unwrap();
            prop_assert_eq!(out.rank, naive_rank(&m));
            prop_assert_eq!(r.min(c) >= out.rank, true);
        }

        #[test]
        fn full_rank_factors_multiply_to_full_rank(n in 1usize..5) {
            let l = RatMatrix::from_rows((0..n).map(|i| (0..n).map(|j| if j <= i { int(1 + (i + j) as i64) } else { int(0) }).collect()).collect(), n).unwrap();
            let u = l.transpose();
            let p = multiply(&l, &u).unwrap();
            prop_assert_eq!(rank(&p), n);
        }
    }
}
