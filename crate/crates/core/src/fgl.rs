//! Graded coefficient rings, truncated graded power series and the formal
//! group law calculus.
//!
//! A [`GradedRing`] is non-positively graded: its piece of cohomological
//! degree `-k` (called *weight* `k` here) is a free abelian group of finite
//! rank, stored in coordinates. Pieces of weight above the truncation bound
//! are treated as zero.
//!
//! A [`GradedSeries`] of degree `d` in variables `t_1..t_n` (each of degree
//! 1) has its `t^I` coefficient in the piece of weight `|I| - d`. Series are
//! truncated at monomial degree `order`, which defaults to the ring's
//! truncation bound. Both truncations are quotients by graded ideals, so all
//! ring identities hold exactly in the truncated setting.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::intlin::IntVector;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FglError {
    #[error("series live over different coefficient rings")]
    RingMismatch,
    #[error("variable count mismatch: expected {expected}, found {found}")]
    VariableCount { expected: usize, found: usize },
    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: i64, right: i64 },
    #[error("expected a degree-1 series without constant term, found degree {degree}")]
    NotChernElement { degree: i64 },
    #[error("coefficient of weight {weight} has {found} coordinates, expected {expected}")]
    CoordinateCount { weight: usize, expected: usize, found: usize },
    #[error("monomial {monomial:?} does not fit degree {degree}")]
    MonomialOutOfRange { monomial: Vec<u32>, degree: i64 },
    #[error("coefficient {0} is too large for a formal multiple")]
    CoefficientTooLarge(BigInt),
    #[error("invalid ring data: {0}")]
    InvalidRing(String),
}

/// An element of the graded piece of weight `weight` (cohomological degree
/// `-weight`), in that piece's coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    pub weight: usize,
    pub coords: IntVector,
}

impl RingElement {
    pub fn new(weight: usize, coords: IntVector) -> Self {
        RingElement { weight, coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

/// A commutative graded ring, truncated above weight `trunc`, together with
/// the coefficients `a_{i,j}` of a formal group law over it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedRing {
    name: String,
    trunc: usize,
    ranks: Vec<usize>,
    labels: Vec<Vec<String>>,
    // products[k][l][i * ranks[l] + j]: product of basis i (weight k) and basis j (weight l)
    products: Vec<Vec<Vec<IntVector>>>,
    // keyed by (i, j) with i <= j
    fgl: BTreeMap<(usize, usize), IntVector>,
}

impl GradedRing {
    /// Assembles a ring from its structure constants.
    ///
    /// `product(k, l, i, j)` returns the coordinates (in weight `k + l`) of
    /// the product of basis element `i` of weight `k` with basis element `j`
    /// of weight `l`; it is only called when `k + l <= trunc`. `fgl` must
    /// contain `a_{i,j}` for every `i <= j` with `i + j - 1 <= trunc`.
    pub fn from_structure<P>(
        name: &str,
        trunc: usize,
        ranks: Vec<usize>,
        labels: Vec<Vec<String>>,
        product: P,
        fgl: BTreeMap<(usize, usize), IntVector>,
    ) -> Result<Self, FglError>
    where
        P: Fn(usize, usize, usize, usize) -> IntVector,
    {
        if ranks.len() != trunc + 1 || labels.len() != trunc + 1 {
            return Err(FglError::InvalidRing(format!("expected {} graded pieces", trunc + 1)));
        }
        if ranks[0] != 1 {
            return Err(FglError::InvalidRing("weight-0 piece must be Z".into()));
        }
        for (k, l) in labels.iter().enumerate() {
            if l.len() != ranks[k] {
                return Err(FglError::InvalidRing(format!("label count mismatch in weight {k}")));
            }
        }
        let mut products = vec![vec![Vec::new(); trunc + 1]; trunc + 1];
        for k in 0..=trunc {
            for l in 0..=trunc - k {
                let mut table = Vec::with_capacity(ranks[k] * ranks[l]);
                for i in 0..ranks[k] {
                    for j in 0..ranks[l] {
                        let c = product(k, l, i, j);
                        if c.len() != ranks[k + l] {
                            return Err(FglError::CoordinateCount {
                                weight: k + l,
                                expected: ranks[k + l],
                                found: c.len(),
                            });
                        }
                        table.push(c);
                    }
                }
                products[k][l] = table;
            }
        }
        let ring = GradedRing { name: name.into(), trunc, ranks, labels, products, fgl };
        ring.check_structure()?;
        Ok(ring)
    }

    fn check_structure(&self) -> Result<(), FglError> {
        for l in 0..=self.trunc {
            for j in 0..self.ranks[l] {
                let mut e = vec![BigInt::zero(); self.ranks[l]];
                e[j] = BigInt::one();
                if self.products[0][l][j] != e {
                    return Err(FglError::InvalidRing("1 is not a unit".into()));
                }
            }
        }
        for k in 0..=self.trunc {
            for l in 0..=self.trunc - k {
                for i in 0..self.ranks[k] {
                    for j in 0..self.ranks[l] {
                        if self.products[k][l][i * self.ranks[l] + j] != self.products[l][k][j * self.ranks[k] + i] {
                            return Err(FglError::InvalidRing("multiplication is not commutative".into()));
                        }
                    }
                }
            }
        }
        for i in 1..=self.trunc {
            for j in i..=self.trunc + 1 - i {
                match self.fgl.get(&(i, j)) {
                    Some(c) if c.len() == self.ranks[i + j - 1] => {}
                    Some(c) => {
                        return Err(FglError::CoordinateCount {
                            weight: i + j - 1,
                            expected: self.ranks[i + j - 1],
                            found: c.len(),
                        })
                    }
                    None => return Err(FglError::InvalidRing(format!("missing a_{{{i},{j}}}"))),
                }
            }
        }
        Ok(())
    }

    /// `Z` in weight 0 with the additive law `F(u, v) = u + v`.
    pub fn additive(trunc: usize) -> Self {
        let mut ranks = vec![0; trunc + 1];
        ranks[0] = 1;
        let mut labels = vec![Vec::new(); trunc + 1];
        labels[0].push("1".into());
        let fgl = fgl_keys(trunc).map(|(i, j)| ((i, j), Vec::new())).collect();
        GradedRing::from_structure("additive", trunc, ranks, labels, |_, _, _, _| vec![BigInt::one()], fgl)
            .expect("additive ring is well formed")
    }

    /// `Z[b]` with `b` of weight 1 (cohomological degree -1), truncated at
    /// `b^trunc`, carrying the multiplicative law `F(u, v) = u + v - b u v`.
    pub fn multiplicative(trunc: usize) -> Self {
        let ranks = vec![1; trunc + 1];
        let labels = (0..=trunc)
            .map(|k| {
                vec![match k {
                    0 => "1".to_string(),
                    1 => "b".to_string(),
                    _ => format!("b^{k}"),
                }]
            })
            .collect();
        let fgl = fgl_keys(trunc)
            .map(|(i, j)| {
                let c = if (i, j) == (1, 1) { BigInt::from(-1) } else { BigInt::zero() };
                ((i, j), vec![c])
            })
            .collect();
        GradedRing::from_structure("multiplicative", trunc, ranks, labels, |_, _, _, _| vec![BigInt::one()], fgl)
            .expect("multiplicative ring is well formed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Rank of the piece of weight `weight`; zero above the truncation.
    pub fn rank(&self, weight: usize) -> usize {
        self.ranks.get(weight).copied().unwrap_or(0)
    }

    pub fn labels(&self, weight: usize) -> &[String] {
        self.labels.get(weight).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn one(&self) -> RingElement {
        RingElement::new(0, vec![BigInt::one()])
    }

    pub fn zero(&self, weight: usize) -> RingElement {
        RingElement::new(weight, vec![BigInt::zero(); self.rank(weight)])
    }

    pub fn basis_element(&self, weight: usize, index: usize) -> RingElement {
        let mut coords = vec![BigInt::zero(); self.rank(weight)];
        coords[index] = BigInt::one();
        RingElement::new(weight, coords)
    }

    /// `a_{i,j}`, or `None` when its weight `i + j - 1` exceeds the truncation.
    pub fn fgl_coefficient(&self, i: usize, j: usize) -> Option<RingElement> {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.fgl.get(&key).map(|c| RingElement::new(key.0 + key.1 - 1, c.clone()))
    }

    /// Product of coordinate vectors; `None` when the result is truncated.
    pub fn mul_coords(&self, k: usize, a: &[BigInt], l: usize, b: &[BigInt]) -> Option<IntVector> {
        if k + l > self.trunc {
            return None;
        }
        let table = &self.products[k][l];
        let rl = self.ranks[l];
        let mut out = vec![BigInt::zero(); self.ranks[k + l]];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (o, c) in out.iter_mut().zip(&table[i * rl + j]) {
                    if !c.is_zero() {
                        *o += &xy * c;
                    }
                }
            }
        }
        Some(out)
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        match self.mul_coords(a.weight, &a.coords, b.weight, &b.coords) {
            Some(c) => RingElement::new(a.weight + b.weight, c),
            None => RingElement::new(a.weight + b.weight, Vec::new()),
        }
    }

    /// Human-readable form of a coordinate vector in weight `weight`.
    pub fn format_coords(&self, weight: usize, coords: &[BigInt]) -> String {
        let labels = self.labels(weight);
        let mut out = String::new();
        for (c, label) in coords.iter().zip(labels) {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let label_is_one = label == "1";
            if !mag.is_one() || label_is_one {
                out.push_str(&mag.to_string());
                if !label_is_one {
                    out.push('*');
                }
            }
            if !label_is_one {
                out.push_str(label);
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

fn fgl_keys(trunc: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=trunc).flat_map(move |i| (i..=trunc + 1 - i).map(move |j| (i, j)))
}

/// Exponent vector of a monomial `t^I`.
///
/// Ordered graded-lexicographically: by total degree, then with larger
/// exponents in earlier variables first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials in `nvars` variables of total degree at most `order`, in
/// graded-lexicographic order.
pub fn monomials_up_to(nvars: usize, order: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for deg in 0..=order {
        monomials_of_degree(nvars, deg, &mut out);
    }
    out
}

fn monomials_of_degree(nvars: usize, deg: usize, out: &mut Vec<Monomial>) {
    fn rec(prefix: &mut Vec<u32>, left: usize, remaining: u32, out: &mut Vec<Monomial>) {
        if left == 1 {
            prefix.push(remaining);
            out.push(Monomial(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e);
            rec(prefix, left - 1, remaining - e, out);
            prefix.pop();
        }
    }
    if nvars == 0 {
        if deg == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    rec(&mut Vec::new(), nvars, deg as u32, out);
}

/// The truncated graded power series ring `R[[t_1..t_n]]_gr` in which a
/// series lives.
#[derive(Clone, Debug)]
pub struct SeriesSpace {
    ring: Arc<GradedRing>,
    nvars: usize,
    order: usize,
}

impl PartialEq for SeriesSpace {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.order == other.order && same_ring(&self.ring, &other.ring)
    }
}

impl Eq for SeriesSpace {}

pub fn same_ring(a: &Arc<GradedRing>, b: &Arc<GradedRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl SeriesSpace {
    /// Series in `nvars` variables truncated at the ring's own bound.
    pub fn new(ring: Arc<GradedRing>, nvars: usize) -> Self {
        let order = ring.trunc();
        SeriesSpace { ring, nvars, order }
    }

    pub fn with_order(ring: Arc<GradedRing>, nvars: usize, order: usize) -> Self {
        SeriesSpace { ring, nvars, order }
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Weight of the coefficient of `monomial` in a series of degree `degree`,
    /// if that coefficient survives truncation.
    pub fn weight_of(&self, monomial: &Monomial, degree: i64) -> Option<usize> {
        let k = monomial.degree();
        if k > self.order {
            return None;
        }
        let w = k as i64 - degree;
        if w < 0 || w as usize > self.ring.trunc() {
            return None;
        }
        Some(w as usize)
    }

    pub fn zero(&self, degree: i64) -> GradedSeries {
        GradedSeries { space: self.clone(), degree, terms: BTreeMap::new() }
    }

    pub fn one(&self) -> GradedSeries {
        self.constant(&self.ring.one())
    }

    /// A ring element of weight `w` viewed as a constant series of degree `-w`.
    pub fn constant(&self, c: &RingElement) -> GradedSeries {
        let mut s = self.zero(-(c.weight as i64));
        if c.weight <= self.ring.trunc() && !c.is_zero() {
            s.terms.insert(Monomial::one(self.nvars), c.coords.clone());
        }
        s
    }

    pub fn variable(&self, i: usize) -> GradedSeries {
        let mut s = self.zero(1);
        if self.order >= 1 {
            s.terms.insert(Monomial::variable(self.nvars, i), vec![BigInt::one()]);
        }
        s
    }

    pub fn variables(&self) -> Vec<ChernElement> {
        (0..self.nvars).map(|i| ChernElement(self.variable(i))).collect()
    }

    /// `c * t^I`; dropped if it does not survive truncation.
    pub fn monomial(&self, exponents: Monomial, c: &RingElement) -> GradedSeries {
        let degree = exponents.degree() as i64 - c.weight as i64;
        let mut s = self.zero(degree);
        if self.weight_of(&exponents, degree).is_some() && !c.is_zero() {
            s.terms.insert(exponents, c.coords.clone());
        }
        s
    }

    /// Builds a series from `(exponents, coordinates)` pairs, validating each.
    pub fn from_pairs<I>(&self, degree: i64, pairs: I) -> Result<GradedSeries, FglError>
    where
        I: IntoIterator<Item = (Vec<u32>, IntVector)>,
    {
        let mut s = self.zero(degree);
        for (exps, coords) in pairs {
            if exps.len() != self.nvars {
                return Err(FglError::VariableCount { expected: self.nvars, found: exps.len() });
            }
            let m = Monomial(exps);
            let w = self
                .weight_of(&m, degree)
                .ok_or_else(|| FglError::MonomialOutOfRange { monomial: m.0.clone(), degree })?;
            if coords.len() != self.ring.rank(w) {
                return Err(FglError::CoordinateCount { weight: w, expected: self.ring.rank(w), found: coords.len() });
            }
            s.accumulate(m, &coords);
        }
        Ok(s)
    }

    /// Formal linear combination `[c_1] v_1 +_F [c_2] v_2 +_F ...`, folded
    /// left to right. The empty combination is zero.
    pub fn formal_linear_combination(&self, coeffs: &[BigInt], vars: &[ChernElement]) -> Result<ChernElement, FglError> {
        if coeffs.len() != vars.len() {
            return Err(FglError::VariableCount { expected: vars.len(), found: coeffs.len() });
        }
        let mut acc = ChernElement(self.zero(1));
        for (c, v) in coeffs.iter().zip(vars) {
            if v.space() != self {
                return Err(FglError::RingMismatch);
            }
            if c.is_zero() {
                continue;
            }
            let n = c.to_i64().ok_or_else(|| FglError::CoefficientTooLarge(c.clone()))?;
            let multiple = n_series_with_order(&self.ring, n, self.order);
            let term = multiple.substitute(core::slice::from_ref(v.as_series()))?;
            acc = fgl_sum(&acc, &ChernElement(term))?;
        }
        Ok(acc)
    }
}

/// A homogeneous truncated graded power series.
#[derive(Clone, Debug)]
pub struct GradedSeries {
    space: SeriesSpace,
    degree: i64,
    terms: BTreeMap<Monomial, IntVector>,
}

impl PartialEq for GradedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.terms == other.terms && self.space == other.space
    }
}

impl Eq for GradedSeries {}

impl GradedSeries {
    pub fn space(&self) -> &SeriesSpace {
        &self.space
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.space.ring
    }

    pub fn nvars(&self) -> usize {
        self.space.nvars
    }

    pub fn order(&self) -> usize {
        self.space.order
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &IntVector)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<RingElement> {
        let w = self.space.weight_of(m, self.degree)?;
        Some(match self.terms.get(m) {
            Some(c) => RingElement::new(w, c.clone()),
            None => self.space.ring.zero(w),
        })
    }

    /// Ordered `(exponents, coordinates)` pairs.
    pub fn to_pairs(&self) -> Vec<(Vec<u32>, IntVector)> {
        self.terms.iter().map(|(m, c)| (m.0.clone(), c.clone())).collect()
    }

    /// Integer coefficients of `t_1..t_n` in a degree-1 series.
    pub fn linear_part(&self) -> IntVector {
        (0..self.nvars())
            .map(|i| {
                self.terms
                    .get(&Monomial::variable(self.nvars(), i))
                    .map(|c| c[0].clone())
                    .unwrap_or_else(BigInt::zero)
            })
            .collect()
    }

    fn accumulate(&mut self, m: Monomial, coords: &[BigInt]) {
        if coords.iter().all(Zero::is_zero) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(c) => {
                for (x, y) in c.iter_mut().zip(coords) {
                    *x += y;
                }
                if c.iter().all(Zero::is_zero) {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, coords.to_vec());
            }
        }
    }

    fn check_space(&self, other: &GradedSeries) -> Result<(), FglError> {
        if !same_ring(&self.space.ring, &other.space.ring) {
            return Err(FglError::RingMismatch);
        }
        if self.space.nvars != other.space.nvars {
            return Err(FglError::VariableCount { expected: self.space.nvars, found: other.space.nvars });
        }
        if self.space.order != other.space.order {
            return Err(FglError::OrderMismatch { left: self.space.order, right: other.space.order });
        }
        Ok(())
    }

    pub fn add(&self, other: &GradedSeries) -> Result<GradedSeries, FglError> {
        self.check_space(other)?;
        if self.degree != other.degree {
            return Err(FglError::DegreeMismatch { left: self.degree, right: other.degree });
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> GradedSeries {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            for x in c.iter_mut() {
                *x = -core::mem::take(x);
            }
        }
        out
    }

    pub fn sub(&self, other: &GradedSeries) -> Result<GradedSeries, FglError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> GradedSeries {
        if k.is_zero() {
            return self.space.zero(self.degree);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            for x in c.iter_mut() {
                *x *= k;
            }
        }
        out
    }

    pub fn mul(&self, other: &GradedSeries) -> Result<GradedSeries, FglError> {
        self.check_space(other)?;
        let degree = self.degree + other.degree;
        let mut out = self.space.zero(degree);
        let ring = &self.space.ring;
        for (m1, c1) in &self.terms {
            let w1 = (m1.degree() as i64 - self.degree) as usize;
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                if m.degree() > self.space.order {
                    continue;
                }
                let w2 = (m2.degree() as i64 - other.degree) as usize;
                if let Some(c) = ring.mul_coords(w1, c1, w2, c2) {
                    out.accumulate(m, &c);
                }
            }
        }
        Ok(out)
    }

    /// Multiplies by a ring element of weight `w`; the degree drops by `w`.
    pub fn mul_element(&self, c: &RingElement) -> GradedSeries {
        let degree = self.degree - c.weight as i64;
        let mut out = self.space.zero(degree);
        let ring = &self.space.ring;
        for (m, coords) in &self.terms {
            let w = (m.degree() as i64 - self.degree) as usize;
            if let Some(p) = ring.mul_coords(w, coords, c.weight, &c.coords) {
                out.accumulate(m.clone(), &p);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Result<GradedSeries, FglError> {
        let mut acc = self.space.one();
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Substitutes `t_i -> images[i]`.
    ///
    /// Images must be degree-1 series (hence without constant term) over the
    /// same coefficient ring; the result lives in their series space and has
    /// the degree of `self`.
    pub fn substitute(&self, images: &[GradedSeries]) -> Result<GradedSeries, FglError> {
        if images.len() != self.nvars() {
            return Err(FglError::VariableCount { expected: self.nvars(), found: images.len() });
        }
        let target = match images.first() {
            Some(g) => g.space.clone(),
            None => SeriesSpace::with_order(self.space.ring.clone(), 0, self.space.order),
        };
        for g in images {
            if g.degree != 1 {
                return Err(FglError::NotChernElement { degree: g.degree });
            }
            if g.space != target {
                return Err(FglError::RingMismatch);
            }
        }
        if !same_ring(&self.space.ring, &target.ring) {
            return Err(FglError::RingMismatch);
        }
        if self.space.order < target.order {
            return Err(FglError::OrderMismatch { left: self.space.order, right: target.order });
        }
        let max_exp = self.terms.keys().flat_map(|m| m.0.iter().copied()).max().unwrap_or(0);
        let mut powers: Vec<Vec<GradedSeries>> = Vec::with_capacity(images.len());
        for g in images {
            let mut p = vec![target.one()];
            for e in 1..=max_exp as usize {
                let next = p[e - 1].mul(g)?;
                p.push(next);
            }
            powers.push(p);
        }
        let mut out = target.zero(self.degree);
        for (m, c) in &self.terms {
            if m.degree() > target.order {
                continue;
            }
            let mut prod = target.one();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    prod = prod.mul(&powers[i][e as usize])?;
                }
            }
            let w = (m.degree() as i64 - self.degree) as usize;
            let term = prod.mul_element(&RingElement::new(w, c.clone()));
            for (tm, tc) in term.terms {
                out.accumulate(tm, &tc);
            }
        }
        Ok(out)
    }

    /// Applies `f` to every coefficient, landing in another coefficient ring
    /// with the same truncation.
    pub fn map_coefficients<F>(&self, target: Arc<GradedRing>, f: F) -> GradedSeries
    where
        F: Fn(&RingElement) -> RingElement,
    {
        let space = SeriesSpace::with_order(target, self.space.nvars, self.space.order);
        let mut out = space.zero(self.degree);
        for (m, c) in &self.terms {
            let w = (m.degree() as i64 - self.degree) as usize;
            let image = f(&RingElement::new(w, c.clone()));
            if space.weight_of(m, self.degree).is_some() {
                out.accumulate(m.clone(), &image.coords);
            }
        }
        out
    }
}

impl fmt::Display for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let ring = &self.space.ring;
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let w = (m.degree() as i64 - self.degree) as usize;
            let coeff = ring.format_coords(w, c);
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("t{}", i + 1) } else { format!("t{}^{}", i + 1, e) })
                .collect();
            if mono.is_empty() && !coeff.contains(' ') {
                write!(f, "{coeff}")?;
            } else if mono.is_empty() {
                write!(f, "({coeff})")?;
            } else if coeff == "1" {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "({coeff})*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// A degree-1 series: the first Chern class of a line bundle, written in the
/// variables of some series space. It never has a constant term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernElement(GradedSeries);

impl ChernElement {
    pub fn new(series: GradedSeries) -> Result<Self, FglError> {
        if series.degree != 1 {
            return Err(FglError::NotChernElement { degree: series.degree });
        }
        Ok(ChernElement(series))
    }

    pub fn as_series(&self) -> &GradedSeries {
        &self.0
    }

    pub fn into_series(self) -> GradedSeries {
        self.0
    }

    pub fn space(&self) -> &SeriesSpace {
        &self.0.space
    }
}

impl core::ops::Deref for ChernElement {
    type Target = GradedSeries;

    fn deref(&self) -> &GradedSeries {
        &self.0
    }
}

/// The formal sum `F(f, g) = f + g + sum a_{i,j} f^i g^j`.
pub fn fgl_sum(f: &ChernElement, g: &ChernElement) -> Result<ChernElement, FglError> {
    let (f, g) = (&f.0, &g.0);
    f.check_space(g)?;
    let space = f.space.clone();
    let ring = space.ring.clone();
    let order = space.order;
    let mut out = f.add(g)?;
    if f.is_zero() || g.is_zero() {
        return Ok(ChernElement(out));
    }
    let mut fp = vec![space.one()];
    let mut gp = vec![space.one()];
    for e in 1..order {
        let next_f = fp[e - 1].mul(f)?;
        fp.push(next_f);
        let next_g = gp[e - 1].mul(g)?;
        gp.push(next_g);
    }
    for i in 1..order {
        for j in 1..=order - i {
            let Some(a) = ring.fgl_coefficient(i, j) else {
                continue;
            };
            if a.is_zero() {
                continue;
            }
            let term = fp[i].mul(&gp[j])?.mul_element(&a);
            out = out.add(&term)?;
        }
    }
    Ok(ChernElement(out))
}

/// The inverse series `chi(u)` with `F(u, chi(u)) = 0`, in one variable.
pub fn inverse_series(ring: &Arc<GradedRing>) -> ChernElement {
    inverse_series_with_order(ring, ring.trunc())
}

fn inverse_series_with_order(ring: &Arc<GradedRing>, order: usize) -> ChernElement {
    let space = SeriesSpace::with_order(ring.clone(), 1, order);
    let u = ChernElement(space.variable(0));
    let mut chi = space.variable(0).neg();
    // F(u, chi) vanishes to order n; the next coefficient is cancelled by
    // subtracting it from chi, since dF/dv(u, 0) = 1 + O(u).
    for n in 2..=order {
        let residual = fgl_sum(&u, &ChernElement(chi.clone())).expect("same space");
        let m = Monomial(vec![n as u32]);
        if let Some(c) = residual.terms.get(&m) {
            let c = c.clone();
            let neg: IntVector = c.iter().map(|x| -x).collect();
            chi.accumulate(m, &neg);
        }
    }
    ChernElement(chi)
}

/// The formal multiple `[n]u`, in one variable.
pub fn n_series(ring: &Arc<GradedRing>, n: i64) -> ChernElement {
    n_series_with_order(ring, n, ring.trunc())
}

pub(crate) fn n_series_with_order(ring: &Arc<GradedRing>, n: i64, order: usize) -> ChernElement {
    let space = SeriesSpace::with_order(ring.clone(), 1, order);
    if n == 0 {
        return ChernElement(space.zero(1));
    }
    let base = if n > 0 { ChernElement(space.variable(0)) } else { inverse_series_with_order(ring, order) };
    let mut k = n.unsigned_abs();
    // double-and-add on the formal group
    let mut acc: Option<ChernElement> = None;
    let mut pow = base;
    while k > 0 {
        if k & 1 == 1 {
            acc = Some(match acc {
                None => pow.clone(),
                Some(a) => fgl_sum(&a, &pow).expect("same space"),
            });
        }
        k >>= 1;
        if k > 0 {
            pow = fgl_sum(&pow, &pow).expect("same space");
        }
    }
    acc.expect("n != 0")
}

/// Coordinate layout of the degree-`degree` part of a series space, used to
/// turn series into integer vectors and back.
#[derive(Clone, Debug)]
pub struct SeriesLayout {
    space: SeriesSpace,
    degree: i64,
    entries: Vec<(Monomial, usize, usize)>,
    dim: usize,
}

impl SeriesLayout {
    pub fn new(space: &SeriesSpace, degree: i64) -> Self {
        let mut entries = Vec::new();
        let mut dim = 0;
        for m in monomials_up_to(space.nvars, space.order) {
            if let Some(w) = space.weight_of(&m, degree) {
                let r = space.ring.rank(w);
                if r > 0 {
                    entries.push((m, w, dim));
                    dim += r;
                }
            }
        }
        SeriesLayout { space: space.clone(), degree, entries, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn space(&self) -> &SeriesSpace {
        &self.space
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// `(monomial, weight, offset)` for every coordinate block.
    pub fn entries(&self) -> &[(Monomial, usize, usize)] {
        &self.entries
    }

    pub fn to_coords(&self, s: &GradedSeries) -> IntVector {
        debug_assert_eq!(s.degree, self.degree);
        let mut out = vec![BigInt::zero(); self.dim];
        for (m, w, off) in &self.entries {
            if let Some(c) = s.terms.get(m) {
                for (k, x) in c.iter().enumerate().take(self.space.ring.rank(*w)) {
                    out[off + k] = x.clone();
                }
            }
        }
        out
    }

    pub fn from_coords(&self, v: &[BigInt]) -> GradedSeries {
        let mut s = self.space.zero(self.degree);
        for (m, w, off) in &self.entries {
            let r = self.space.ring.rank(*w);
            s.accumulate(m.clone(), &v[*off..off + r]);
        }
        s
    }
}
