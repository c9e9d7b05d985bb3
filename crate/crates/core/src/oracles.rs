//! Independent reference computations.
//!
//! Nothing here uses stalk bases, restriction maps or the series machinery.
//! Piecewise polynomials are dense integer polynomials in the ambient
//! coordinates `x_1..x_n`, one per maximal cone; two of them agree on a face
//! when their difference vanishes after substituting `x = sum y_j r_j` over
//! the face's generators. Ranks come from a local fraction-free elimination.
//!
//! The multiplicative law `u + v - b u v` is checked against its closed form:
//! `1 - b F(x, y) = (1 - b x)(1 - b y)`, so `[n] u = (1 - (1 - b u)^n) / b`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::fan::Fan;
use crate::intlin::{integer_kernel, IntMatrix, IntVector};

/// Exponent vectors of degree `d` in `n` variables, lexicographically
/// descending.
fn exponents(n: usize, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, d as u32, &mut cur, &mut out);
    out
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            for j in c + 1..cols {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

type YPoly = BTreeMap<Vec<u32>, BigInt>;

fn ypoly_mul(a: &YPoly, b: &YPoly) -> YPoly {
    let mut out = YPoly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            let e = out.entry(m).or_insert_with(BigInt::zero);
            *e += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Matrix sending the coefficients of a degree-`d` polynomial in `x` to the
/// coefficients of its pullback along `y -> sum y_j gens[j]`.
fn substitution_matrix(n: usize, d: usize, gens: &[IntVector]) -> Vec<Vec<BigInt>> {
    let k = gens.len();
    let xs = exponents(n, d);
    let ys = exponents(k, d);
    let yindex: BTreeMap<&Vec<u32>, usize> = ys.iter().enumerate().map(|(i, m)| (m, i)).collect();
    // x_i as a linear form in y
    let linear: Vec<YPoly> = (0..n)
        .map(|i| {
            let mut p = YPoly::new();
            for (j, g) in gens.iter().enumerate() {
                if !g[i].is_zero() {
                    let mut m = vec![0u32; k];
                    m[j] = 1;
                    p.insert(m, g[i].clone());
                }
            }
            p
        })
        .collect();
    let mut out = vec![vec![BigInt::zero(); xs.len()]; ys.len()];
    for (c, xm) in xs.iter().enumerate() {
        let mut p = YPoly::new();
        p.insert(vec![0u32; k], BigInt::one());
        for (i, &e) in xm.iter().enumerate() {
            for _ in 0..e {
                p = ypoly_mul(&p, &linear[i]);
            }
        }
        for (m, v) in p {
            out[yindex[&m]][c] = v;
        }
    }
    out
}

/// A tuple of degree-`d` polynomials in ambient coordinates, one per maximal
/// cone, stored as coefficient vectors over descending-lex exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewisePolynomialSection {
    pub degree: usize,
    pub polys: BTreeMap<usize, Vec<BigInt>>,
}

impl PiecewisePolynomialSection {
    pub fn evaluate(&self, rank: usize, cone: usize, x: &[BigInt]) -> BigInt {
        let mut total = BigInt::zero();
        for (m, c) in exponents(rank, self.degree).iter().zip(&self.polys[&cone]) {
            if c.is_zero() {
                continue;
            }
            let mut term = c.clone();
            for (xi, &e) in x.iter().zip(m) {
                for _ in 0..e {
                    term *= xi;
                }
            }
            total += term;
        }
        total
    }
}

/// Checks agreement on shared faces by evaluating at the lattice points
/// `sum y_j r_j` with `0 <= y_j <= d`, which determine a polynomial of degree
/// `d` on the span of the face.
pub fn pp_is_section(fan: &Fan, p: &PiecewisePolynomialSection) -> bool {
    let maximal = fan.maximal_cones();
    for (i, &a) in maximal.iter().enumerate() {
        for &b in &maximal[i + 1..] {
            let common: Vec<usize> = fan.cone(a).rays.iter().copied().filter(|r| fan.cone(b).rays.contains(r)).collect();
            let k = common.len();
            let mut y = vec![0usize; k];
            loop {
                let mut x = vec![BigInt::zero(); fan.rank()];
                for (j, &r) in common.iter().enumerate() {
                    for (xi, g) in x.iter_mut().zip(fan.ray(r)) {
                        *xi += g * BigInt::from(y[j]);
                    }
                }
                if p.evaluate(fan.rank(), a, &x) != p.evaluate(fan.rank(), b, &x) {
                    return false;
                }
                let mut pos = 0;
                while pos < k && y[pos] == p.degree {
                    y[pos] = 0;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
                y[pos] += 1;
            }
        }
    }
    true
}

/// Piecewise polynomials of degree `d` on a fan.
#[derive(Clone, Debug)]
pub struct PpResult {
    pub degree: usize,
    /// Rank of the module of piecewise polynomial functions.
    pub rank: usize,
    /// Rank of the tuples of ambient polynomials agreeing on faces; it
    /// exceeds `rank` by the polynomials vanishing on lower-dimensional
    /// maximal cones.
    pub tuple_rank: usize,
    /// Basis of the agreeing tuples (functions plus vanishing parts).
    pub basis: Vec<PiecewisePolynomialSection>,
}

pub fn pp_global_sections(fan: &Fan, d: usize) -> PpResult {
    let n = fan.rank();
    let maximal = fan.maximal_cones();
    let width = exponents(n, d).len();
    let cols = width * maximal.len();
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (i, &a) in maximal.iter().enumerate() {
        for (j, &b) in maximal.iter().enumerate().skip(i + 1) {
            let common: Vec<IntVector> = fan
                .cone(a)
                .rays
                .iter()
                .filter(|r| fan.cone(b).rays.contains(r))
                .map(|&r| fan.ray(r).clone())
                .collect();
            for row in substitution_matrix(n, d, &common) {
                let mut full = vec![BigInt::zero(); cols];
                for (c, v) in row.into_iter().enumerate() {
                    full[i * width + c] = v.clone();
                    full[j * width + c] = -v;
                }
                rows.push(full);
            }
        }
    }
    let tuple_rank = cols - rank(&rows);
    let null: usize = maximal
        .iter()
        .map(|&a| {
            let gens: Vec<IntVector> = fan.cone(a).rays.iter().map(|&r| fan.ray(r).clone()).collect();
            width - rank(&substitution_matrix(n, d, &gens))
        })
        .sum();
    let basis = if rows.is_empty() {
        (0..cols)
            .map(|c| {
                let mut v = vec![BigInt::zero(); cols];
                v[c] = BigInt::one();
                v
            })
            .collect()
    } else {
        integer_kernel(&IntMatrix::from_rows(cols, &rows)).basis_vectors()
    };
    let basis = basis
        .into_iter()
        .map(|v| PiecewisePolynomialSection {
            degree: d,
            polys: maximal.iter().enumerate().map(|(i, &a)| (a, v[i * width..(i + 1) * width].to_vec())).collect(),
        })
        .collect();
    PpResult { degree: d, rank: tuple_rank - null, tuple_rank, basis }
}

/// `(-1)^(k+1) C(n, k)`: the coefficient of `b^(k-1) u^k` in `[n] u` for the
/// multiplicative law, for `k = 1..=order`.
pub fn multiplicative_n_series(n: i64, order: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(order);
    let mut binom = BigInt::one();
    for k in 1..=order {
        binom = binom * BigInt::from(n - (k as i64 - 1)) / BigInt::from(k as i64);
        let c = if k % 2 == 1 { binom.clone() } else { -binom.clone() };
        out.push(c);
    }
    out
}

/// Coefficients of `(1 - prod (1 - b u_i)^(c_i)) / b` as a map from exponent
/// vectors `I` (with `1 <= |I| <= order`) to the integer multiplying
/// `b^(|I|-1) u^I`.
pub fn multiplicative_combination(coeffs: &[i64], order: usize) -> BTreeMap<Vec<u32>, BigInt> {
    let k = coeffs.len();
    // prod (1 - b u_i)^(c_i) with b set to 1; degree tracks the power of b
    let mut prod: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
    prod.insert(vec![0; k], BigInt::one());
    for (i, &c) in coeffs.iter().enumerate() {
        let mut factor: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        let mut binom = BigInt::one();
        for e in 0..=order {
            if e > 0 {
                binom = binom * BigInt::from(c - (e as i64 - 1)) / BigInt::from(e as i64);
            }
            if binom.is_zero() {
                break;
            }
            let mut m = vec![0u32; k];
            m[i] = e as u32;
            factor.insert(m, if e % 2 == 0 { binom.clone() } else { -binom.clone() });
        }
        let mut next: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (ma, ca) in &prod {
            for (mb, cb) in &factor {
                let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                if m.iter().sum::<u32>() as usize > order {
                    continue;
                }
                *next.entry(m).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        next.retain(|_, c| !c.is_zero());
        prod = next;
    }
    prod.into_iter()
        .filter(|(m, _)| m.iter().any(|&e| e > 0))
        .map(|(m, c)| (m, -c))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::sync::Arc;

    #[test]
    fn elimination_rank() {
        let m: Vec<Vec<BigInt>> = [[1, 2, 3], [2, 4, 6], [0, 1, 1]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        assert_eq!(rank(&m), 2);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn piecewise_linear_on_p2() {
        let f = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]]).unwrap();
        assert_eq!(pp_global_sections(&f, 0).rank, 1);
        let r = pp_global_sections(&f, 1);
        assert_eq!(r.rank, 3);
        for b in &r.basis {
            assert!(pp_is_section(&f, b));
        }
    }

    #[test]
    fn p1_linear() {
        let f = Arc::new(Fan::from_i64(1, &[&[1], &[-1]], &[&[0], &[1]]).unwrap());
        assert_eq!(pp_global_sections(&f, 1).rank, 2);
    }

    #[test]
    fn closed_form_two_series() {
        assert_eq!(multiplicative_n_series(2, 3), vec![BigInt::from(2), BigInt::from(-1), BigInt::zero()]);
        // [-1]u = -u - b u^2 - b^2 u^3
        assert_eq!(multiplicative_n_series(-1, 3), vec![BigInt::from(-1); 3]);
        let sum = multiplicative_combination(&[1, 1], 2);
        assert_eq!(sum.get(&vec![1, 0]), Some(&BigInt::one()));
        assert_eq!(sum.get(&vec![1, 1]), Some(&BigInt::from(-1)));
        assert_eq!(sum.get(&vec![2, 0]), None);
    }
}
