//! Exact integer linear algebra.
//!
//! Everything here works over arbitrary-precision integers. Pivoting is
//! deterministic (smallest non-zero absolute value, then lowest index) so
//! every normal form computed by this module is reproducible.
//!
//! Hermite normal forms are stored row-style: a lattice is given by the rows
//! of a matrix in echelon form with positive pivots and the entries above
//! each pivot reduced into `[0, pivot)`. This is the transpose of the
//! column-style convention (pivots down the diagonal of the column basis,
//! entries left of the pivot reduced).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A vector of arbitrary-precision integers.
pub type IntVector = Vec<BigInt>;

/// Errors raised by lattice operations.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum IntLinError {
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("sublattice is not saturated (index {index})")]
    NotSaturated { index: BigInt },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Converts a slice of machine integers into an [`IntVector`].
pub fn int_vector(values: &[i64]) -> IntVector {
    values.iter().map(|&v| BigInt::from(v)).collect()
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row slices. Every row must have `cols` entries.
    pub fn from_rows<R: AsRef<[BigInt]>>(cols: usize, rows: &[R]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "row length mismatch");
            data.extend(r.iter().cloned());
        }
        IntMatrix { rows: rows.len(), cols, data }
    }

    /// Row-major construction from machine integers.
    pub fn from_i64(rows: usize, cols: usize, values: &[i64]) -> Self {
        assert_eq!(values.len(), rows * cols, "entry count mismatch");
        IntMatrix { rows, cols, data: values.iter().map(|&v| BigInt::from(v)).collect() }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> IntVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<IntVector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[BigInt]) -> IntVector {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    /// `v * self` for a row vector `v`.
    pub fn vec_mul(&self, v: &[BigInt]) -> IntVector {
        assert_eq!(self.rows, v.len(), "vector-matrix dimension mismatch");
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                if !a.is_zero() {
                    *o += c * a;
                }
            }
        }
        out
    }

    pub fn select_rows(&self, indices: &[usize]) -> IntMatrix {
        let rows: Vec<&[BigInt]> = indices.iter().map(|&i| self.row(i)).collect();
        IntMatrix::from_rows(self.cols, &rows)
    }

    /// Stacks `other` below `self`.
    pub fn stack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols, "stack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Places `other` to the right of `self`.
    pub fn augment(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows, "augment row mismatch");
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend(self.row(i).iter().cloned());
            data.extend(other.row(i).iter().cloned());
        }
        IntMatrix { rows: self.rows, cols, data }
    }

    pub fn columns_range(&self, start: usize, end: usize) -> IntMatrix {
        let mut data = Vec::with_capacity(self.rows * (end - start));
        for i in 0..self.rows {
            data.extend(self.row(i)[start..end].iter().cloned());
        }
        IntMatrix { rows: self.rows, cols: end - start, data }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for e in &mut self.data[i * self.cols..(i + 1) * self.cols] {
            *e = -core::mem::take(e);
        }
    }

    /// row[target] += factor * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() || target == source {
            return;
        }
        let c = self.cols;
        let (t, s) = if target < source {
            let (lo, hi) = self.data.split_at_mut(source * c);
            (&mut lo[target * c..(target + 1) * c], &hi[..c])
        } else {
            let (lo, hi) = self.data.split_at_mut(target * c);
            (&mut hi[..c], &lo[source * c..(source + 1) * c])
        };
        for (x, y) in t.iter_mut().zip(s) {
            if !y.is_zero() {
                *x += factor * y;
            }
        }
    }

    /// col[target] += factor * col[source]
    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() || target == source {
            return;
        }
        for i in 0..self.rows {
            let s = self.data[i * self.cols + source].clone();
            if !s.is_zero() {
                self.data[i * self.cols + target] += factor * s;
            }
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                    Some(i) => {
                        m.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, k, BigInt::zero());
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1)
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        echelon(self, false).1.len()
    }
}

fn min_abs_position<I: Iterator<Item = (usize, usize)>>(m: &IntMatrix, cells: I) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for (i, j) in cells {
        let v = m.get(i, j);
        if v.is_zero() {
            continue;
        }
        let a = v.abs();
        match &best {
            Some((_, b)) if *b <= a => {}
            _ => best = Some(((i, j), a)),
        }
    }
    best.map(|(p, _)| p)
}

/// Row echelon form by unimodular row operations.
///
/// Returns the reduced matrix and its pivot columns. With `reduce_above`
/// set, the result is the Hermite normal form.
fn echelon(a: &IntMatrix, reduce_above: bool) -> (IntMatrix, Vec<usize>) {
    let (h, _, pivots) = echelon_impl(a, reduce_above, false);
    (h, pivots)
}

fn echelon_impl(a: &IntMatrix, reduce_above: bool, track: bool) -> (IntMatrix, Option<IntMatrix>, Vec<usize>) {
    let mut h = a.clone();
    let mut t = if track { Some(IntMatrix::identity(a.rows)) } else { None };
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..h.cols {
        if row == h.rows {
            break;
        }
        loop {
            let Some((p, _)) = min_abs_position(&h, (row..h.rows).map(|i| (i, col))) else {
                break;
            };
            h.swap_rows(row, p);
            if let Some(t) = t.as_mut() {
                t.swap_rows(row, p);
            }
            let pivot = h.get(row, col).clone();
            let mut clean = true;
            for i in row + 1..h.rows {
                if h.get(i, col).is_zero() {
                    continue;
                }
                let q = -h.get(i, col).div_floor(&pivot);
                h.add_row_multiple(i, row, &q);
                if let Some(t) = t.as_mut() {
                    t.add_row_multiple(i, row, &q);
                }
                if !h.get(i, col).is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h.get(row, col).is_zero() {
            continue;
        }
        if h.get(row, col).is_negative() {
            h.negate_row(row);
            if let Some(t) = t.as_mut() {
                t.negate_row(row);
            }
        }
        if reduce_above {
            let pivot = h.get(row, col).clone();
            for i in 0..row {
                let q = -h.get(i, col).div_floor(&pivot);
                h.add_row_multiple(i, row, &q);
                if let Some(t) = t.as_mut() {
                    t.add_row_multiple(i, row, &q);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (h, t, pivots)
}

/// Result of [`hermite_normal_form`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hermite {
    /// Non-zero rows of the normal form.
    pub basis: IntMatrix,
    pub pivots: Vec<usize>,
}

/// Hermite normal form of the row lattice of `a`.
pub fn hermite_normal_form(a: &IntMatrix) -> Hermite {
    let (h, pivots) = echelon(a, true);
    let keep: Vec<usize> = (0..pivots.len()).collect();
    Hermite { basis: h.select_rows(&keep), pivots }
}

/// Hermite normal form together with a unimodular `t` such that `t * a = h`.
pub fn hermite_with_transform(a: &IntMatrix) -> (IntMatrix, IntMatrix, Vec<usize>) {
    let (h, t, pivots) = echelon_impl(a, true, true);
    (h, t.expect("transform tracked"), pivots)
}

/// Smith normal form: returns `(u, d, v)` with `u * m * v = d`.
///
/// `u` and `v` are unimodular and `d` is diagonal with non-negative entries
/// forming a divisibility chain.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let (r, c) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    for t in 0..r.min(c) {
        loop {
            let cells = (t..r).flat_map(|i| (t..c).map(move |j| (i, j)));
            let Some((pi, pj)) = min_abs_position(&d, cells) else {
                break;
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let pivot = d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..r {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = -d.get(i, t).div_floor(&pivot);
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !d.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -d.get(t, j).div_floor(&pivot);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !d.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let offending = (t + 1..r).find(|&i| (t + 1..c).any(|j| !d.get(i, j).is_multiple_of(&pivot)));
            match offending {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if t < r && t < c && d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    (u, d, v)
}

/// Diagonal of a Smith form, trailing zeros included up to `min(rows, cols)`.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let (_, d, _) = smith_normal_form(m);
    (0..d.rows.min(d.cols)).map(|i| d.get(i, i).clone()).collect()
}

/// Inverse of a unimodular matrix.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    if m.rows != m.cols {
        return None;
    }
    let (h, t, _) = hermite_with_transform(m);
    if h.is_identity() {
        Some(t)
    } else {
        None
    }
}

/// A sublattice of `Z^ambient_rank` given by linearly independent basis rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSubspace {
    ambient_rank: usize,
    basis: IntMatrix,
}

impl LatticeSubspace {
    pub fn new(ambient_rank: usize, basis_rows: &[IntVector]) -> Result<Self, IntLinError> {
        for r in basis_rows {
            if r.len() != ambient_rank {
                return Err(IntLinError::DimensionMismatch { expected: ambient_rank, found: r.len() });
            }
        }
        let basis = IntMatrix::from_rows(ambient_rank, basis_rows);
        if basis.rank() != basis.rows {
            return Err(IntLinError::DependentBasis);
        }
        Ok(LatticeSubspace { ambient_rank, basis })
    }

    /// The lattice generated by arbitrary (possibly dependent) vectors, in
    /// Hermite normal form.
    pub fn generated_by(ambient_rank: usize, generators: &[IntVector]) -> Result<Self, IntLinError> {
        for g in generators {
            if g.len() != ambient_rank {
                return Err(IntLinError::DimensionMismatch { expected: ambient_rank, found: g.len() });
            }
        }
        let m = IntMatrix::from_rows(ambient_rank, generators);
        Ok(LatticeSubspace { ambient_rank, basis: hermite_normal_form(&m).basis })
    }

    pub fn full(ambient_rank: usize) -> Self {
        LatticeSubspace { ambient_rank, basis: IntMatrix::identity(ambient_rank) }
    }

    pub fn zero(ambient_rank: usize) -> Self {
        LatticeSubspace { ambient_rank, basis: IntMatrix::zeros(0, ambient_rank) }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<IntVector> {
        self.basis.row_vectors()
    }

    /// Hermite normal form of the basis; equal lattices give equal forms.
    pub fn canonical(&self) -> LatticeSubspace {
        LatticeSubspace { ambient_rank: self.ambient_rank, basis: hermite_normal_form(&self.basis).basis }
    }

    pub fn same_lattice(&self, other: &LatticeSubspace) -> bool {
        self.ambient_rank == other.ambient_rank && self.canonical().basis == other.canonical().basis
    }

    /// Whether `v` lies in the lattice.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        normal_form_in_quotient(v, self).iter().all(Zero::is_zero)
    }
}

/// Basis of the integer kernel `{x : m x = 0}` in Hermite normal form.
///
/// The basis is saturated: it spans the full lattice of integer solutions.
pub fn integer_kernel(m: &IntMatrix) -> LatticeSubspace {
    let n = m.cols;
    if m.rows == 0 {
        return LatticeSubspace::full(n);
    }
    let (h, t, pivots) = echelon_impl(&m.transpose(), false, true);
    let t = t.expect("transform tracked");
    let rank = pivots.len();
    debug_assert!((rank..h.rows).all(|i| h.row(i).iter().all(Zero::is_zero)));
    let kernel_rows: Vec<usize> = (rank..n).collect();
    let k = t.select_rows(&kernel_rows);
    LatticeSubspace { ambient_rank: n, basis: hermite_normal_form(&k).basis }
}

/// `(Q-span of s) ∩ Z^n`, in Hermite normal form.
pub fn saturate(s: &LatticeSubspace) -> LatticeSubspace {
    let n = s.ambient_rank;
    if s.rank() == 0 {
        return LatticeSubspace::zero(n);
    }
    let annihilator = integer_kernel(&s.basis);
    if annihilator.rank() == 0 {
        return LatticeSubspace::full(n);
    }
    integer_kernel(&annihilator.basis)
}

/// Index of `s` inside its saturation.
pub fn saturation_index(s: &LatticeSubspace) -> BigInt {
    invariant_factors(&s.basis).into_iter().fold(BigInt::one(), |acc, d| acc * d)
}

/// A unimodular matrix whose first `rank(s)` rows are the basis of `s`.
pub fn extend_to_basis(s: &LatticeSubspace) -> Result<IntMatrix, IntLinError> {
    let n = s.ambient_rank;
    let k = s.rank();
    if k == 0 {
        return Ok(IntMatrix::identity(n));
    }
    // t * B^T = [C; 0]; saturation forces the Hermite block C to be the identity,
    // and then B is the first k rows of (t^-1)^T.
    let (h, t, _) = hermite_with_transform(&s.basis.transpose());
    let top: Vec<usize> = (0..k).collect();
    let c = h.select_rows(&top);
    if !c.is_identity() {
        return Err(IntLinError::NotSaturated { index: c.determinant().abs() });
    }
    let inv = unimodular_inverse(&t).expect("transform is unimodular");
    let out = inv.transpose();
    debug_assert!((0..k).all(|i| out.row(i) == s.basis.row(i)));
    Ok(out)
}

/// Canonical representative of `v` modulo the relation lattice.
pub fn normal_form_in_quotient(v: &[BigInt], relations: &LatticeSubspace) -> IntVector {
    let hermite = hermite_normal_form(&relations.basis);
    reduce_by_hermite(v, &hermite)
}

/// Reduces `v` against a Hermite basis so each pivot entry lies in `[0, pivot)`.
pub fn reduce_by_hermite(v: &[BigInt], hermite: &Hermite) -> IntVector {
    let mut out = v.to_vec();
    for (r, &p) in hermite.pivots.iter().enumerate() {
        let row = hermite.basis.row(r);
        let q = out[p].div_floor(&row[p]);
        if q.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            if !x.is_zero() {
                *o -= &q * x;
            }
        }
    }
    out
}

/// Greatest common divisor of the entries (zero for the zero vector).
pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// Divides out the content; the zero vector is returned unchanged.
pub fn primitive_part(v: &[BigInt]) -> IntVector {
    let g = content(v);
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, v: &[i64]) -> IntMatrix {
        IntMatrix::from_i64(rows, cols, v)
    }

    fn check_smith(a: &IntMatrix) {
        let (u, d, v) = smith_normal_form(a);
        assert_eq!(u.mul(a).mul(&v), d);
        assert!(u.determinant().abs().is_one());
        assert!(v.determinant().abs().is_one());
        let diag: Vec<BigInt> = (0..d.nrows().min(d.ncols())).map(|i| d.get(i, i).clone()).collect();
        for i in 0..d.nrows() {
            for j in 0..d.ncols() {
                if i != j {
                    assert!(d.get(i, j).is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
    }

    #[test]
    fn smith_identity() {
        let (u, d, v) = smith_normal_form(&IntMatrix::identity(2));
        assert!(u.is_identity() && d.is_identity() && v.is_identity());
    }

    #[test]
    fn smith_two_by_two() {
        let a = m(2, 2, &[2, 4, 6, 8]);
        check_smith(&a);
        let (_, d, _) = smith_normal_form(&a);
        assert_eq!(d, m(2, 2, &[2, 0, 0, 4]));
    }

    #[test]
    fn smith_zero() {
        let (u, d, v) = smith_normal_form(&IntMatrix::zeros(2, 3));
        assert!(d.is_zero());
        assert!(u.is_identity());
        assert!(v.is_identity());
    }

    #[test]
    fn smith_needs_divisibility_fix() {
        let a = m(2, 2, &[2, 0, 0, 3]);
        check_smith(&a);
        assert_eq!(invariant_factors(&a), int_vector(&[1, 6]));
    }

    #[test]
    fn kernel_examples() {
        let k = integer_kernel(&m(1, 2, &[1, -1]));
        assert_eq!(k.basis_vectors(), vec![int_vector(&[1, 1])]);
        assert_eq!(integer_kernel(&IntMatrix::identity(2)).rank(), 0);
        let k = integer_kernel(&m(1, 2, &[2, 4]));
        assert_eq!(k.basis_vectors(), vec![int_vector(&[2, -1])]);
        assert!(content(&k.basis_vectors()[0]).is_one());
    }

    #[test]
    fn saturate_examples() {
        let s = LatticeSubspace::new(2, &[int_vector(&[2, 0])]).unwrap();
        let sat = saturate(&s);
        assert_eq!(sat.basis_vectors(), vec![int_vector(&[1, 0])]);
        assert_eq!(saturation_index(&s), BigInt::from(2));
        assert!(saturate(&LatticeSubspace::full(2)).same_lattice(&LatticeSubspace::full(2)));
        let s = LatticeSubspace::new(2, &[int_vector(&[1, 2])]).unwrap();
        assert!(saturate(&s).same_lattice(&s));
    }

    #[test]
    fn extend_examples() {
        let s = LatticeSubspace::new(2, &[int_vector(&[1, 0])]).unwrap();
        assert_eq!(extend_to_basis(&s).unwrap(), IntMatrix::identity(2));
        let s = LatticeSubspace::new(2, &[int_vector(&[1, 2])]).unwrap();
        let u = extend_to_basis(&s).unwrap();
        assert_eq!(u.row(0), &int_vector(&[1, 2])[..]);
        assert!(u.determinant().abs().is_one());
        let s = LatticeSubspace::new(2, &[int_vector(&[2, 0])]).unwrap();
        assert!(matches!(extend_to_basis(&s), Err(IntLinError::NotSaturated { .. })));
    }

    #[test]
    fn quotient_examples() {
        let rel = LatticeSubspace::new(2, &[int_vector(&[2, 0])]).unwrap();
        assert_eq!(normal_form_in_quotient(&int_vector(&[3, 0]), &rel), int_vector(&[1, 0]));
        assert_eq!(normal_form_in_quotient(&int_vector(&[4, 0]), &rel), int_vector(&[0, 0]));
        let none = LatticeSubspace::zero(2);
        assert_eq!(normal_form_in_quotient(&int_vector(&[3, -5]), &none), int_vector(&[3, -5]));
    }

    #[test]
    fn determinant_and_rank() {
        assert_eq!(m(2, 2, &[0, 1, 2, -1]).determinant(), BigInt::from(-2));
        assert_eq!(m(3, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 9]).rank(), 2);
        assert_eq!(m(3, 3, &[1, 2, 0, 0, 1, 3, 1, 2, 1]).determinant(), BigInt::from(1));
    }

    #[test]
    fn unimodular_inverse_roundtrip() {
        let a = m(3, 3, &[1, 2, 0, 0, 1, 3, 1, 2, 1]);
        let inv = unimodular_inverse(&a).unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(unimodular_inverse(&m(2, 2, &[2, 0, 0, 1])).is_none());
    }
}
