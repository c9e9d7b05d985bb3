//! The truncated Lazard ring and its specializations.
//!
//! The ring is presented as `Z[A_{i,j} : i <= j]` modulo the coefficients of
//! the associativity residual `F(F(u,v),w) - F(u,F(v,w))`, one graded piece
//! at a time. `A_{i,j}` has weight `i + j - 1`. Commutativity is built into
//! the variable set and the unit axiom into the shape of `F`.
//!
//! Each piece of weight `k` is stored with its monomial basis, the Hermite
//! basis of its relation lattice, and a projection `x -> K x` onto
//! coordinates, where the rows of `K` span the integer kernel of the relation
//! matrix. Since the quotient is torsion-free, the kernel of the projection is
//! exactly the relation lattice.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::fgl::{fgl_sum, ChernElement, GradedRing, GradedSeries, RingElement, SeriesSpace};
use crate::intlin::{
    extend_to_basis, hermite_normal_form, integer_kernel, invariant_factors, unimodular_inverse, IntMatrix,
    IntVector,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LazardError {
    #[error("truncation bound must be at least 1")]
    InvalidTruncation,
    #[error("weight {weight} exceeds the truncation bound {trunc}")]
    WeightOutOfRange { weight: usize, trunc: usize },
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("torsion in weight {weight}: invariant factors {factors:?}")]
    Torsion { weight: usize, factors: Vec<BigInt> },
    #[error("truncation bounds differ: {source_trunc} vs {target_trunc}")]
    TruncationMismatch { source_trunc: usize, target_trunc: usize },
    #[error("missing image for A_{{{0},{1}}}")]
    MissingImage(usize, usize),
    #[error("image of A_{{{i},{j}}} has weight {found}, expected {expected}")]
    ImageWeight { i: usize, j: usize, expected: usize, found: usize },
    #[error("images violate the relation {relation} of weight {weight}")]
    NotAFormalGroupLaw { weight: usize, relation: usize },
    #[error("element does not live over this ring")]
    WrongRing,
}

fn canonical_pair(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

fn variable_name(i: usize, j: usize) -> String {
    if i < 10 && j < 10 {
        format!("a{i}{j}")
    } else {
        format!("a{i}_{j}")
    }
}

/// An integer polynomial in the variables `A_{i,j}`; `A_{j,i}` is identified
/// with `A_{i,j}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct APoly {
    terms: BTreeMap<BTreeMap<(usize, usize), u32>, BigInt>,
}

impl APoly {
    pub fn zero() -> Self {
        APoly::default()
    }

    pub fn constant(c: i64) -> Self {
        let mut p = APoly::zero();
        p.add_term(BTreeMap::new(), BigInt::from(c));
        p
    }

    pub fn var(i: usize, j: usize) -> Self {
        assert!(i >= 1 && j >= 1, "A_{{i,j}} needs positive indices");
        let mut m = BTreeMap::new();
        m.insert(canonical_pair(i, j), 1);
        let mut p = APoly::zero();
        p.add_term(m, BigInt::one());
        p
    }

    fn add_term(&mut self, m: BTreeMap<(usize, usize), u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &APoly) -> APoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, k: i64) -> APoly {
        let mut out = APoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn sub(&self, other: &APoly) -> APoly {
        self.add(&other.scale(-1))
    }

    pub fn mul(&self, other: &APoly) -> APoly {
        let mut out = APoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                for (v, e) in m2 {
                    *m.entry(*v).or_insert(0) += e;
                }
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    /// The common weight of all terms, or `None` for a non-homogeneous
    /// polynomial. The zero polynomial has weight 0.
    pub fn weight(&self) -> Option<usize> {
        let mut weights = self
            .terms
            .keys()
            .map(|m| m.iter().map(|(&(i, j), &e)| (i + j - 1) * e as usize).sum::<usize>());
        let first = weights.next().unwrap_or(0);
        weights.all(|w| w == first).then_some(first)
    }
}

/// One graded piece of the truncated Lazard ring.
#[derive(Clone, Debug)]
pub struct LazardPiece {
    pub weight: usize,
    /// Exponent vectors over [`LazardRing::variables`], in descending
    /// lexicographic order.
    pub monomials: Vec<Vec<u32>>,
    /// Hermite basis of the relation lattice, one row per relation.
    pub relations: IntMatrix,
    /// Rows span the annihilator of the relations; `coords = projection * x`.
    pub projection: IntMatrix,
    /// `lifts[c]` is a monomial combination projecting to the `c`-th basis
    /// vector.
    pub lifts: Vec<IntVector>,
    index: BTreeMap<Vec<u32>, usize>,
}

impl LazardPiece {
    pub fn rank(&self) -> usize {
        self.projection.nrows()
    }

    pub fn project(&self, x: &[BigInt]) -> IntVector {
        self.projection.mul_vec(x)
    }
}

/// Rank and torsion of one graded piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedRank {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

/// The truncated Lazard ring with the universal formal group law.
#[derive(Clone, Debug)]
pub struct LazardRing {
    trunc: usize,
    variables: Vec<(usize, usize)>,
    pieces: Vec<LazardPiece>,
    free: Arc<GradedRing>,
    ring: Arc<GradedRing>,
}

fn enumerate_monomials(weights: &[usize], target: usize) -> Vec<Vec<u32>> {
    fn rec(weights: &[usize], pos: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == weights.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let w = weights[pos];
        for e in (0..=left / w).rev() {
            cur.push(e as u32);
            rec(weights, pos + 1, left - e * w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(weights, 0, target, &mut Vec::new(), &mut out);
    out
}

fn monomial_name(variables: &[(usize, usize)], exps: &[u32]) -> String {
    let parts: Vec<String> = variables
        .iter()
        .zip(exps)
        .filter(|(_, &e)| e > 0)
        .map(|(&(i, j), &e)| if e == 1 { variable_name(i, j) } else { format!("{}^{e}", variable_name(i, j)) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn add_exps(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl LazardRing {
    /// Builds the ring truncated above weight `trunc`.
    pub fn build(trunc: usize) -> Result<Self, LazardError> {
        if trunc == 0 {
            return Err(LazardError::InvalidTruncation);
        }
        let mut variables: Vec<(usize, usize)> =
            (1..=trunc).flat_map(|i| (i..=trunc + 1 - i).map(move |j| (i, j))).collect();
        variables.sort_by_key(|&(i, j)| (i + j, i));
        let var_weights: Vec<usize> = variables.iter().map(|&(i, j)| i + j - 1).collect();

        let monomials: Vec<Vec<Vec<u32>>> = (0..=trunc).map(|k| enumerate_monomials(&var_weights, k)).collect();
        let indices: Vec<BTreeMap<Vec<u32>, usize>> = monomials
            .iter()
            .map(|ms| ms.iter().enumerate().map(|(n, m)| (m.clone(), n)).collect())
            .collect();

        // The polynomial ring itself, truncated, with A_{i,j} as its law.
        let free_ranks: Vec<usize> = monomials.iter().map(Vec::len).collect();
        let free_labels: Vec<Vec<String>> =
            monomials.iter().map(|ms| ms.iter().map(|m| monomial_name(&variables, m)).collect()).collect();
        let mut free_fgl = BTreeMap::new();
        for (n, &(i, j)) in variables.iter().enumerate() {
            let w = var_weights[n];
            let mut e = vec![0u32; variables.len()];
            e[n] = 1;
            let mut c = vec![BigInt::zero(); free_ranks[w]];
            c[indices[w][&e]] = BigInt::one();
            free_fgl.insert((i, j), c);
        }
        let free = Arc::new(
            GradedRing::from_structure(
                "polynomial",
                trunc,
                free_ranks.clone(),
                free_labels,
                |k, l, a, b| {
                    let m = add_exps(&monomials[k][a], &monomials[l][b]);
                    let mut c = vec![BigInt::zero(); free_ranks[k + l]];
                    c[indices[k + l][&m]] = BigInt::one();
                    c
                },
                free_fgl,
            )
            .map_err(|_| LazardError::InvalidTruncation)?,
        );

        let primitive = associativity_relations(&free, trunc);

        let mut pieces: Vec<LazardPiece> = Vec::with_capacity(trunc + 1);
        for k in 0..=trunc {
            let m = free_ranks[k];
            let mut rows: Vec<IntVector> = primitive[k].clone();
            for (lower, rels) in primitive.iter().enumerate().take(k).skip(1) {
                let co = k - lower;
                for rel in rels {
                    for b in 0..free_ranks[co] {
                        let mut e = vec![BigInt::zero(); free_ranks[co]];
                        e[b] = BigInt::one();
                        rows.push(free.mul_coords(lower, rel, co, &e).expect("weight within bound"));
                    }
                }
            }
            let relation_matrix = IntMatrix::from_rows(m, &rows);
            let relations = hermite_normal_form(&relation_matrix).basis;
            let torsion: Vec<BigInt> =
                invariant_factors(&relations).into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect();
            if !torsion.is_empty() {
                return Err(LazardError::Torsion { weight: k, factors: torsion });
            }
            let kernel = integer_kernel(&relations);
            let projection = kernel.basis().clone();
            let completed = extend_to_basis(&kernel).expect("kernels are saturated");
            let inverse = unimodular_inverse(&completed).expect("unimodular");
            let lifts: Vec<IntVector> = (0..kernel.rank()).map(|c| inverse.column(c)).collect();
            pieces.push(LazardPiece {
                weight: k,
                monomials: monomials[k].clone(),
                relations,
                projection,
                lifts,
                index: indices[k].clone(),
            });
        }

        let ranks: Vec<usize> = pieces.iter().map(LazardPiece::rank).collect();
        let labels: Vec<Vec<String>> = pieces
            .iter()
            .map(|p| {
                p.lifts
                    .iter()
                    .enumerate()
                    .map(|(c, lift)| {
                        let mut nonzero = lift.iter().enumerate().filter(|(_, x)| !x.is_zero());
                        match (nonzero.next(), nonzero.next()) {
                            (Some((n, x)), None) if x.is_one() => monomial_name(&variables, &p.monomials[n]),
                            _ => format!("x{}_{}", p.weight, c + 1),
                        }
                    })
                    .collect()
            })
            .collect();
        let mut fgl = BTreeMap::new();
        for (n, &(i, j)) in variables.iter().enumerate() {
            let w = var_weights[n];
            let mut e = vec![0u32; variables.len()];
            e[n] = 1;
            let mut x = vec![BigInt::zero(); free_ranks[w]];
            x[indices[w][&e]] = BigInt::one();
            fgl.insert((i, j), pieces[w].project(&x));
        }
        let ring = GradedRing::from_structure(
            "universal",
            trunc,
            ranks,
            labels,
            |k, l, a, b| {
                let prod = free.mul_coords(k, &pieces[k].lifts[a], l, &pieces[l].lifts[b]).expect("within bound");
                pieces[k + l].project(&prod)
            },
            fgl,
        )
        .map_err(|_| LazardError::InvalidTruncation)?;

        Ok(LazardRing { trunc, variables, pieces, free, ring: Arc::new(ring) })
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// The variables `A_{i,j}` (`i <= j`), sorted by `(i + j, i)`.
    pub fn variables(&self) -> &[(usize, usize)] {
        &self.variables
    }

    pub fn piece(&self, weight: usize) -> Option<&LazardPiece> {
        self.pieces.get(weight)
    }

    /// The quotient ring, carrying the universal law.
    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.ring
    }

    /// The polynomial ring `Z[A_{i,j}]` truncated at the same bound.
    pub fn polynomial_ring(&self) -> &Arc<GradedRing> {
        &self.free
    }

    pub fn graded_rank(&self, k: usize) -> Result<GradedRank, LazardError> {
        let piece = self.pieces.get(k).ok_or(LazardError::WeightOutOfRange { weight: k, trunc: self.trunc })?;
        let torsion = invariant_factors(&piece.relations)
            .into_iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .collect();
        Ok(GradedRank { rank: piece.rank(), torsion })
    }

    fn monomial_coords(&self, p: &APoly, weight: usize) -> Result<IntVector, LazardError> {
        let piece = &self.pieces[weight];
        let mut x = vec![BigInt::zero(); piece.monomials.len()];
        for (m, c) in &p.terms {
            let mut e = vec![0u32; self.variables.len()];
            for (&(i, j), &k) in m {
                let n = self
                    .variables
                    .iter()
                    .position(|&v| v == (i, j))
                    .ok_or(LazardError::WeightOutOfRange { weight: i + j - 1, trunc: self.trunc })?;
                e[n] += k;
            }
            x[piece.index[&e]] += c;
        }
        Ok(x)
    }

    /// Canonical coordinates of a homogeneous polynomial in its graded piece.
    /// The zero polynomial lands in weight 0; use [`LazardRing::normal_form_at`]
    /// when the weight is known.
    pub fn normal_form(&self, p: &APoly) -> Result<RingElement, LazardError> {
        let weight = p.weight().ok_or(LazardError::NotHomogeneous)?;
        self.normal_form_at(p, weight)
    }

    /// Canonical coordinates of `p` in the piece of weight `weight`; every
    /// term of `p` must have that weight.
    pub fn normal_form_at(&self, p: &APoly, weight: usize) -> Result<RingElement, LazardError> {
        if !p.is_zero() && p.weight() != Some(weight) {
            return Err(LazardError::NotHomogeneous);
        }
        if weight > self.trunc {
            return Err(LazardError::WeightOutOfRange { weight, trunc: self.trunc });
        }
        let x = self.monomial_coords(p, weight)?;
        Ok(RingElement::new(weight, self.pieces[weight].project(&x)))
    }

    /// A polynomial whose normal form is `e`.
    pub fn lift(&self, e: &RingElement) -> APoly {
        let piece = &self.pieces[e.weight];
        let mut out = APoly::zero();
        for (c, lift) in e.coords.iter().zip(&piece.lifts) {
            if c.is_zero() {
                continue;
            }
            for (n, x) in lift.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let m: BTreeMap<(usize, usize), u32> = self
                    .variables
                    .iter()
                    .zip(&piece.monomials[n])
                    .filter(|(_, &k)| k > 0)
                    .map(|(&v, &k)| (v, k))
                    .collect();
                out.add_term(m, c * x);
            }
        }
        out
    }

    /// Coefficients of the associativity residual, as polynomials, for every
    /// monomial `u^a v^b w^c` with `a + b + c <= trunc + 1`.
    pub fn associativity_residual(&self) -> Vec<([u32; 3], APoly)> {
        let residual = residual_series(&self.free, self.trunc);
        residual
            .terms()
            .map(|(m, coords)| {
                let w = m.degree() - 1;
                let p = self.lift_free(w, coords);
                ([m.0[0], m.0[1], m.0[2]], p)
            })
            .collect()
    }

    fn lift_free(&self, weight: usize, coords: &[BigInt]) -> APoly {
        let piece = &self.pieces[weight];
        let mut out = APoly::zero();
        for (n, x) in coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let m = self
                .variables
                .iter()
                .zip(&piece.monomials[n])
                .filter(|(_, &k)| k > 0)
                .map(|(&v, &k)| (v, k))
                .collect();
            out.add_term(m, x.clone());
        }
        out
    }

    /// Text listing, per weight, of the monomial basis, the relation matrix
    /// and the torsion. Deterministic for a fixed bound.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "lazard trunc={}", self.trunc);
        let names: Vec<String> = self.variables.iter().map(|&(i, j)| variable_name(i, j)).collect();
        let _ = writeln!(out, "variables: {}", names.join(" "));
        for p in &self.pieces {
            let _ = writeln!(out, "weight {}", p.weight);
            let ms: Vec<String> = p.monomials.iter().map(|m| monomial_name(&self.variables, m)).collect();
            let _ = writeln!(out, "  monomials: {}", ms.join(" "));
            let _ = writeln!(out, "  relations: {}", p.relations.nrows());
            for r in 0..p.relations.nrows() {
                let row: Vec<String> = p.relations.row(r).iter().map(|x| format!("{x}")).collect();
                let _ = writeln!(out, "    [{}]", row.join(", "));
            }
            let _ = writeln!(out, "  rank: {}", p.rank());
        }
        out
    }

    /// The specialization to `target` sending `A_{i,j}` to `images[(i, j)]`.
    pub fn specialization(
        &self,
        target: Arc<GradedRing>,
        images: &BTreeMap<(usize, usize), RingElement>,
    ) -> Result<Specialization, LazardError> {
        if target.trunc() != self.trunc {
            return Err(LazardError::TruncationMismatch { source_trunc: self.trunc, target_trunc: target.trunc() });
        }
        let mut var_images = Vec::with_capacity(self.variables.len());
        for &(i, j) in &self.variables {
            let img = images.get(&(i, j)).ok_or(LazardError::MissingImage(i, j))?;
            if img.weight != i + j - 1 {
                return Err(LazardError::ImageWeight { i, j, expected: i + j - 1, found: img.weight });
            }
            var_images.push(img.clone());
        }
        let eval_monomial = |exps: &[u32], weight: usize| -> IntVector {
            let mut acc = target.one();
            for (img, &e) in var_images.iter().zip(exps) {
                for _ in 0..e {
                    acc = target.mul(&acc, img);
                }
            }
            debug_assert_eq!(acc.weight, weight);
            acc.coords
        };
        let mut matrices = Vec::with_capacity(self.trunc + 1);
        for p in &self.pieces {
            let r = target.rank(p.weight);
            let evals: Vec<IntVector> = p.monomials.iter().map(|m| eval_monomial(m, p.weight)).collect();
            let apply = |x: &[BigInt]| -> IntVector {
                let mut out = vec![BigInt::zero(); r];
                for (c, ev) in x.iter().zip(&evals) {
                    if c.is_zero() {
                        continue;
                    }
                    for (o, y) in out.iter_mut().zip(ev) {
                        *o += c * y;
                    }
                }
                out
            };
            for n in 0..p.relations.nrows() {
                if apply(p.relations.row(n)).iter().any(|x| !x.is_zero()) {
                    return Err(LazardError::NotAFormalGroupLaw { weight: p.weight, relation: n });
                }
            }
            let cols: Vec<IntVector> = p.lifts.iter().map(|l| apply(l)).collect();
            let mut m = IntMatrix::zeros(r, cols.len());
            for (c, col) in cols.iter().enumerate() {
                for (row, x) in col.iter().enumerate() {
                    m.set(row, c, x.clone());
                }
            }
            matrices.push(m);
        }
        Ok(Specialization { source: self.ring.clone(), target, matrices })
    }

    /// All `A_{i,j}` sent to zero in `Z`: the additive law `u + v`.
    pub fn specialize_additive(&self) -> Specialization {
        let target = Arc::new(GradedRing::additive(self.trunc));
        let images = self
            .variables
            .iter()
            .map(|&(i, j)| ((i, j), target.zero(i + j - 1)))
            .collect();
        self.specialization(target, &images).expect("additive law satisfies the axioms")
    }

    /// `A_{1,1} -> -b`, all others to zero: the law `u + v - b u v`.
    pub fn specialize_multiplicative(&self) -> Specialization {
        let target = Arc::new(GradedRing::multiplicative(self.trunc));
        let images = self
            .variables
            .iter()
            .map(|&(i, j)| {
                let c = if (i, j) == (1, 1) { BigInt::from(-1) } else { BigInt::zero() };
                ((i, j), RingElement::new(i + j - 1, vec![c]))
            })
            .collect();
        self.specialization(target, &images).expect("multiplicative law satisfies the axioms")
    }
}

/// Builds the truncated Lazard ring.
pub fn build_lazard(trunc: usize) -> Result<LazardRing, LazardError> {
    LazardRing::build(trunc)
}

fn residual_series(free: &Arc<GradedRing>, trunc: usize) -> GradedSeries {
    let space = SeriesSpace::with_order(free.clone(), 3, trunc + 1);
    let v = space.variables();
    let left = fgl_sum(&fgl_sum(&v[0], &v[1]).expect("same space"), &v[2]).expect("same space");
    let right = fgl_sum(&v[0], &fgl_sum(&v[1], &v[2]).expect("same space")).expect("same space");
    left.sub(&right).expect("same space")
}

// Primitive relations per weight: coefficients of the residual at monomials of
// degree weight + 1.
fn associativity_relations(free: &Arc<GradedRing>, trunc: usize) -> Vec<Vec<IntVector>> {
    let residual = residual_series(free, trunc);
    let mut out = vec![Vec::new(); trunc + 1];
    for (m, c) in residual.terms() {
        let w = m.degree() - 1;
        out[w].push(c.clone());
    }
    out
}

/// A ring map out of the truncated Lazard ring, determined by the images of
/// the `A_{i,j}`.
#[derive(Clone, Debug)]
pub struct Specialization {
    source: Arc<GradedRing>,
    target: Arc<GradedRing>,
    // per weight: target rank x source rank
    matrices: Vec<IntMatrix>,
}

impl Specialization {
    pub fn source(&self) -> &Arc<GradedRing> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedRing> {
        &self.target
    }

    pub fn matrix(&self, weight: usize) -> &IntMatrix {
        &self.matrices[weight]
    }

    pub fn apply_element(&self, e: &RingElement) -> RingElement {
        RingElement::new(e.weight, self.matrices[e.weight].mul_vec(&e.coords))
    }

    pub fn apply_series(&self, f: &GradedSeries) -> Result<GradedSeries, LazardError> {
        if !crate::fgl::same_ring(f.ring(), &self.source) {
            if f.ring().trunc() != self.source.trunc() {
                return Err(LazardError::TruncationMismatch {
                    source_trunc: self.source.trunc(),
                    target_trunc: f.ring().trunc(),
                });
            }
            return Err(LazardError::WrongRing);
        }
        Ok(f.map_coefficients(self.target.clone(), |e| self.apply_element(e)))
    }

    pub fn apply_chern(&self, f: &ChernElement) -> Result<ChernElement, LazardError> {
        Ok(ChernElement::new(self.apply_series(f)?).expect("degree is preserved"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgl::{inverse_series, n_series};

    fn partitions(k: usize) -> usize {
        let mut p = vec![0usize; k + 1];
        p[0] = 1;
        for part in 1..=k {
            for n in part..=k {
                p[n] += p[n - part];
            }
        }
        p[k]
    }

    #[test]
    fn small_ranks() {
        let l = build_lazard(1).unwrap();
        assert_eq!(l.graded_rank(0).unwrap().rank, 1);
        assert_eq!(l.graded_rank(1).unwrap().rank, 1);
        assert_eq!(l.piece(1).unwrap().relations.nrows(), 0);
        let l = build_lazard(2).unwrap();
        assert_eq!(l.graded_rank(2).unwrap().rank, 2);
        let l = build_lazard(3).unwrap();
        assert_eq!(l.graded_rank(3).unwrap().rank, 3);
        assert!(matches!(l.graded_rank(4), Err(LazardError::WeightOutOfRange { .. })));
        assert_eq!(build_lazard(0).unwrap_err(), LazardError::InvalidTruncation);
    }

    #[test]
    fn ranks_are_partition_numbers() {
        let l = build_lazard(5).unwrap();
        for k in 0..=5 {
            let r = l.graded_rank(k).unwrap();
            assert_eq!(r.rank, partitions(k), "weight {k}");
            assert!(r.torsion.is_empty());
        }
    }

    #[test]
    fn normal_form_examples() {
        let l = build_lazard(3).unwrap();
        assert_eq!(l.normal_form(&APoly::constant(1)).unwrap(), l.ring().one());
        let d = APoly::var(1, 2).sub(&APoly::var(2, 1));
        assert!(l.normal_form(&d).unwrap().is_zero());
        for (_, p) in l.associativity_residual() {
            assert!(l.normal_form(&p).unwrap().is_zero());
        }
        let mixed = APoly::var(1, 1).add(&APoly::var(1, 2));
        assert_eq!(l.normal_form(&mixed), Err(LazardError::NotHomogeneous));
    }

    #[test]
    fn lift_roundtrip() {
        let l = build_lazard(4).unwrap();
        for k in 0..=4 {
            for c in 0..l.graded_rank(k).unwrap().rank {
                let e = l.ring().basis_element(k, c);
                assert_eq!(l.normal_form(&l.lift(&e)).unwrap(), e);
            }
        }
    }

    #[test]
    fn universal_law_is_associative() {
        let l = build_lazard(3).unwrap();
        let s = SeriesSpace::with_order(l.ring().clone(), 3, 4);
        let v = s.variables();
        let a = fgl_sum(&fgl_sum(&v[0], &v[1]).unwrap(), &v[2]).unwrap();
        let b = fgl_sum(&v[0], &fgl_sum(&v[1], &v[2]).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn specializations() {
        let l = build_lazard(3).unwrap();
        let add = l.specialize_additive();
        let mult = l.specialize_multiplicative();
        let chi = inverse_series(l.ring());
        assert_eq!(*add.apply_chern(&chi).unwrap(), *inverse_series(add.target()));
        assert_eq!(mult.apply_chern(&n_series(l.ring(), 2)).unwrap(), n_series(mult.target(), 2));
        let a11 = l.normal_form(&APoly::var(1, 1)).unwrap();
        assert_eq!(mult.apply_element(&a11).coords, vec![BigInt::from(-1)]);
        assert!(add.apply_element(&a11).is_zero());
        assert_eq!(add.apply_element(&l.ring().one()), add.target().one());
    }

    #[test]
    fn bad_specialization_is_rejected() {
        // weight 3 relation 2 a11 a12 + 3 a13 - 2 a22 = 0 fails for a13 -> b^3
        let l = build_lazard(3).unwrap();
        let target = Arc::new(GradedRing::multiplicative(3));
        let mut images = BTreeMap::new();
        for &(i, j) in l.variables() {
            let c = if (i, j) == (1, 3) { BigInt::one() } else { BigInt::zero() };
            images.insert((i, j), RingElement::new(i + j - 1, vec![c]));
        }
        let r = l.specialization(target, &images);
        assert!(matches!(r, Err(LazardError::NotAFormalGroupLaw { weight: 3, .. })), "{r:?}");
    }

    #[test]
    fn dump_is_stable() {
        let a = build_lazard(3).unwrap().dump();
        let b = build_lazard(3).unwrap().dump();
        assert_eq!(a, b);
        assert!(a.starts_with("lazard trunc=3\nvariables: a11 a12 a13 a22\n"));
    }
}
