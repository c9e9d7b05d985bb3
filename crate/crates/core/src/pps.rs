//! Piecewise graded power series on a fan.
//!
//! The stalk at a cone `sigma` of dimension `m` is `R[[t_1..t_m]]_gr`, where
//! `t_i` is the first Chern class of the `i`-th character in a fixed basis of
//! `M_sigma`, the dual of `N_sigma = Span(sigma) ∩ N`. The basis of
//! `N_sigma` is the Hermite basis of the saturated ray span, and the
//! characters are its dual basis.
//!
//! For an inclusion `N_tau ⊆ N_sigma` the restriction map sends `t_i` to the
//! formal linear combination `[c_i1] u_1 +_F ... +_F [c_ik] u_k`, where
//! `c_ij` is the `i`-th coordinate of the `j`-th basis vector of `N_tau` in
//! the basis of `N_sigma`.
//!
//! Sections over a domain (the whole fan, or the star of a cone) are stored
//! by their values on the maximal cones of the domain, concatenated into one
//! integer coordinate vector by a [`CochainLayout`].

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::fan::{Fan, SubdivisionMap};
use crate::fgl::{ChernElement, FglError, GradedRing, GradedSeries, Monomial, SeriesLayout, SeriesSpace};
use crate::intlin::{extend_to_basis, integer_kernel, saturate, unimodular_inverse, IntMatrix, IntVector, LatticeSubspace};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PpsError {
    #[error("cone {0} is not in the fan")]
    UnknownCone(usize),
    #[error("cone {face} is not a face of cone {cone}")]
    NotAFace { face: usize, cone: usize },
    #[error("lattice of the target stalk is not contained in the source lattice")]
    SpanNotContained,
    #[error("sections live on different domains")]
    DomainMismatch,
    #[error("cone {cone} is not in the star of cone {root}")]
    NotInStar { cone: usize, root: usize },
    #[error("section has no value on maximal cone {0}")]
    MissingValue(usize),
    #[error(transparent)]
    Series(#[from] FglError),
}

/// The stalk ring at one cone.
#[derive(Clone, Debug)]
pub struct Stalk {
    dim: usize,
    /// Rows: basis of `N_sigma`.
    basis: IntMatrix,
    // inverse of a unimodular completion whose first rows are `basis`
    coordinates: IntMatrix,
    space: SeriesSpace,
}

impl Stalk {
    /// The stalk of the cone generated by `rays` in `Z^rank`.
    pub fn new(rank: usize, rays: &[IntVector], ring: Arc<GradedRing>) -> Self {
        let span = LatticeSubspace::generated_by(rank, rays).expect("rays have the ambient length");
        let sat = saturate(&span);
        let completion = extend_to_basis(&sat).expect("saturated lattices extend");
        let coordinates = unimodular_inverse(&completion).expect("unimodular");
        let dim = sat.rank();
        Stalk { dim, basis: sat.basis().clone(), coordinates, space: SeriesSpace::new(ring, dim) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lattice_basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn space(&self) -> &SeriesSpace {
        &self.space
    }

    /// Coordinates of `v` in the basis of `N_sigma`, if `v` lies there.
    pub fn coordinates_of(&self, v: &[BigInt]) -> Option<IntVector> {
        let y = self.coordinates.vec_mul(v);
        if y[self.dim..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(y[..self.dim].to_vec())
    }
}

/// The stalk map induced by a lattice inclusion `N_target ⊆ N_source`.
#[derive(Clone, Debug)]
pub struct RestrictionMap {
    /// `coefficients[(i, j)]`: coordinate `i` of target basis vector `j`.
    coefficients: IntMatrix,
    images: Vec<ChernElement>,
    source: SeriesSpace,
    target: SeriesSpace,
    monomial_images: BTreeMap<Monomial, GradedSeries>,
}

impl RestrictionMap {
    pub fn new(source: &Stalk, target: &Stalk) -> Result<Self, PpsError> {
        let mut coefficients = IntMatrix::zeros(source.dim, target.dim);
        for j in 0..target.dim {
            let c = source.coordinates_of(target.basis.row(j)).ok_or(PpsError::SpanNotContained)?;
            for (i, x) in c.into_iter().enumerate() {
                coefficients.set(i, j, x);
            }
        }
        let vars = target.space.variables();
        let images = (0..source.dim)
            .map(|i| target.space.formal_linear_combination(coefficients.row(i), &vars))
            .collect::<Result<Vec<_>, _>>()?;
        let mut map = RestrictionMap {
            coefficients,
            images,
            source: source.space.clone(),
            target: target.space.clone(),
            monomial_images: BTreeMap::new(),
        };
        let image_series: Vec<GradedSeries> = map.images.iter().map(|c| c.as_series().clone()).collect();
        for m in crate::fgl::monomials_up_to(source.dim, source.space.order()) {
            let mono = map.source.monomial(m.clone(), &map.source.ring().one());
            let img = mono.substitute(&image_series)?;
            map.monomial_images.insert(m, img);
        }
        Ok(map)
    }

    pub fn coefficients(&self) -> &IntMatrix {
        &self.coefficients
    }

    /// Image of each source variable.
    pub fn images(&self) -> &[ChernElement] {
        &self.images
    }

    pub fn apply(&self, f: &GradedSeries) -> Result<GradedSeries, PpsError> {
        if f.space() != &self.source {
            return Err(FglError::RingMismatch.into());
        }
        let mut out = self.target.zero(f.degree());
        for (m, c) in f.terms() {
            let w = (m.degree() as i64 - f.degree()) as usize;
            let img = self.monomial_images[m].mul_element(&crate::fgl::RingElement::new(w, c.clone()));
            out = out.add(&img)?;
        }
        Ok(out)
    }

    /// Matrix of the map on degree-`degree` coordinates.
    pub fn matrix(&self, degree: i64) -> IntMatrix {
        let src = SeriesLayout::new(&self.source, degree);
        let dst = SeriesLayout::new(&self.target, degree);
        let ring = self.source.ring();
        let mut out = IntMatrix::zeros(dst.dim(), src.dim());
        for (m, w, off) in src.entries() {
            let img = &self.monomial_images[m];
            for k in 0..ring.rank(*w) {
                let col = dst.to_coords(&img.mul_element(&ring.basis_element(*w, k)));
                for (r, x) in col.into_iter().enumerate() {
                    if !x.is_zero() {
                        out.set(r, off + k, x);
                    }
                }
            }
        }
        out
    }
}

/// How compatibility of a family of stalk values is imposed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ConstraintMode {
    /// At the intersection of every pair of maximal cones.
    #[default]
    Pairwise,
    /// At every cone, for every pair of maximal cones containing it.
    AllFaces,
}

/// The sheaf of piecewise graded power series on a fan.
#[derive(Clone, Debug)]
pub struct PpsSheaf {
    fan: Arc<Fan>,
    ring: Arc<GradedRing>,
    stalks: Vec<Stalk>,
    // (maximal cone, face) -> map
    restrictions: BTreeMap<(usize, usize), RestrictionMap>,
}

impl PpsSheaf {
    pub fn new(fan: Arc<Fan>, ring: Arc<GradedRing>) -> Result<Self, PpsError> {
        let stalks: Vec<Stalk> = fan
            .cones()
            .iter()
            .map(|c| {
                let rays: Vec<IntVector> = c.rays.iter().map(|&r| fan.ray(r).clone()).collect();
                Stalk::new(fan.rank(), &rays, ring.clone())
            })
            .collect();
        let mut restrictions = BTreeMap::new();
        for s in fan.maximal_cones() {
            for &t in &fan.cone(s).faces {
                restrictions.insert((s, t), RestrictionMap::new(&stalks[s], &stalks[t])?);
            }
        }
        Ok(PpsSheaf { fan, ring, stalks, restrictions })
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn ring(&self) -> &Arc<GradedRing> {
        &self.ring
    }

    pub fn stalk(&self, cone: usize) -> &Stalk {
        &self.stalks[cone]
    }

    /// The restriction map from `cone` to its face `face`.
    pub fn restriction(&self, cone: usize, face: usize) -> Result<RestrictionMap, PpsError> {
        if cone >= self.fan.num_cones() {
            return Err(PpsError::UnknownCone(cone));
        }
        if face >= self.fan.num_cones() {
            return Err(PpsError::UnknownCone(face));
        }
        if !self.fan.is_face(face, cone) {
            return Err(PpsError::NotAFace { face, cone });
        }
        match self.restrictions.get(&(cone, face)) {
            Some(r) => Ok(r.clone()),
            None => RestrictionMap::new(&self.stalks[cone], &self.stalks[face]),
        }
    }

    fn cached(&self, cone: usize, face: usize) -> &RestrictionMap {
        &self.restrictions[&(cone, face)]
    }

    /// Maximal cones of the star of `root` (the whole fan for the zero cone).
    pub fn domain_cones(&self, root: usize) -> Result<Vec<usize>, PpsError> {
        if root >= self.fan.num_cones() {
            return Err(PpsError::UnknownCone(root));
        }
        Ok(self.fan.maximal_cones().into_iter().filter(|&s| self.fan.is_face(root, s)).collect())
    }

    pub fn layout(&self, root: usize, degree: i64) -> Result<CochainLayout, PpsError> {
        let cones = self.domain_cones(root)?;
        let mut layouts = Vec::with_capacity(cones.len());
        let mut offsets = Vec::with_capacity(cones.len());
        let mut dim = 0;
        for &c in &cones {
            let l = SeriesLayout::new(self.stalks[c].space(), degree);
            offsets.push(dim);
            dim += l.dim();
            layouts.push(l);
        }
        Ok(CochainLayout { root, degree, cones, layouts, offsets, dim })
    }

    /// `(cone_a, cone_b, face)` triples at which compatibility is imposed.
    pub fn constraints(&self, root: usize, mode: ConstraintMode) -> Result<Vec<(usize, usize, usize)>, PpsError> {
        let cones = self.domain_cones(root)?;
        let mut out = Vec::new();
        match mode {
            ConstraintMode::Pairwise => {
                for (i, &a) in cones.iter().enumerate() {
                    for &b in &cones[i + 1..] {
                        let common: Vec<usize> = self
                            .fan
                            .cone(a)
                            .rays
                            .iter()
                            .copied()
                            .filter(|r| self.fan.cone(b).rays.contains(r))
                            .collect();
                        let face = self.fan.cone_id(&common).expect("fans are closed under intersection");
                        out.push((a, b, face));
                    }
                }
            }
            ConstraintMode::AllFaces => {
                for t in self.fan.star(root) {
                    let containing: Vec<usize> = cones.iter().copied().filter(|&s| self.fan.is_face(t, s)).collect();
                    for (i, &a) in containing.iter().enumerate() {
                        for &b in &containing[i + 1..] {
                            out.push((a, b, t));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// The integer matrix whose kernel is the module of sections.
    pub fn constraint_matrix(&self, layout: &CochainLayout, mode: ConstraintMode) -> Result<IntMatrix, PpsError> {
        let triples = self.constraints(layout.root, mode)?;
        let mut blocks: Vec<IntMatrix> = Vec::with_capacity(triples.len());
        for (a, b, t) in triples {
            let ra = self.cached(a, t).matrix(layout.degree);
            let rb = self.cached(b, t).matrix(layout.degree);
            let mut block = IntMatrix::zeros(ra.nrows(), layout.dim);
            let (ia, ib) = (layout.position(a).expect("in domain"), layout.position(b).expect("in domain"));
            for r in 0..ra.nrows() {
                for c in 0..ra.ncols() {
                    block.set(r, layout.offsets[ia] + c, ra.get(r, c).clone());
                }
                for c in 0..rb.ncols() {
                    block.set(r, layout.offsets[ib] + c, -rb.get(r, c));
                }
            }
            blocks.push(block);
        }
        let mut out = IntMatrix::zeros(0, layout.dim);
        for b in blocks {
            out = out.stack(&b);
        }
        Ok(out)
    }

    /// Global sections of degree `degree` over the star of `root`.
    pub fn global_sections(&self, root: usize, degree: i64) -> Result<SectionModule, PpsError> {
        self.global_sections_with(root, degree, ConstraintMode::Pairwise)
    }

    pub fn global_sections_with(&self, root: usize, degree: i64, mode: ConstraintMode) -> Result<SectionModule, PpsError> {
        let layout = self.layout(root, degree)?;
        let m = self.constraint_matrix(&layout, mode)?;
        let kernel = if m.nrows() == 0 { LatticeSubspace::full(layout.dim) } else { integer_kernel(&m) };
        Ok(SectionModule { layout, kernel })
    }

    /// Whether the values agree on every pairwise intersection of maximal
    /// cones of the domain.
    pub fn is_global_section(&self, p: &PiecewiseSeries) -> Result<bool, PpsError> {
        let cones = self.domain_cones(p.root)?;
        for &c in &cones {
            if !p.values.contains_key(&c) {
                return Err(PpsError::MissingValue(c));
            }
            if p.values[&c].space() != self.stalks[c].space() || p.values[&c].degree() != p.degree {
                return Ok(false);
            }
        }
        for (a, b, t) in self.constraints(p.root, ConstraintMode::Pairwise)? {
            let fa = self.cached(a, t).apply(&p.values[&a])?;
            let fb = self.cached(b, t).apply(&p.values[&b])?;
            if fa != fb {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The section with the same constant value on every maximal cone.
    pub fn constant(&self, root: usize, c: &crate::fgl::RingElement) -> Result<PiecewiseSeries, PpsError> {
        let values = self
            .domain_cones(root)?
            .into_iter()
            .map(|s| (s, self.stalks[s].space().constant(c)))
            .collect();
        Ok(PiecewiseSeries { root, degree: -(c.weight as i64), values })
    }

    pub fn one(&self, root: usize) -> Result<PiecewiseSeries, PpsError> {
        self.constant(root, &self.ring.one())
    }

    pub fn zero(&self, root: usize, degree: i64) -> Result<PiecewiseSeries, PpsError> {
        let values = self
            .domain_cones(root)?
            .into_iter()
            .map(|s| (s, self.stalks[s].space().zero(degree)))
            .collect();
        Ok(PiecewiseSeries { root, degree, values })
    }

    pub fn multiply(&self, p: &PiecewiseSeries, q: &PiecewiseSeries) -> Result<PiecewiseSeries, PpsError> {
        if p.root != q.root || p.values.len() != q.values.len() {
            return Err(PpsError::DomainMismatch);
        }
        let mut values = BTreeMap::new();
        for (c, f) in &p.values {
            let g = q.values.get(c).ok_or(PpsError::DomainMismatch)?;
            values.insert(*c, f.mul(g)?);
        }
        Ok(PiecewiseSeries { root: p.root, degree: p.degree + q.degree, values })
    }

    /// Keeps the values on maximal cones containing `pi`; `pi` must lie in
    /// the domain of `p`.
    pub fn restrict_to_star(&self, p: &PiecewiseSeries, pi: usize) -> Result<PiecewiseSeries, PpsError> {
        if pi >= self.fan.num_cones() {
            return Err(PpsError::UnknownCone(pi));
        }
        if !self.fan.is_face(p.root, pi) {
            return Err(PpsError::NotInStar { cone: pi, root: p.root });
        }
        let values = self
            .domain_cones(pi)?
            .into_iter()
            .map(|s| p.values.get(&s).cloned().map(|v| (s, v)).ok_or(PpsError::MissingValue(s)))
            .collect::<Result<_, _>>()?;
        Ok(PiecewiseSeries { root: pi, degree: p.degree, values })
    }

    /// Matrix of [`PpsSheaf::restrict_to_star`] on cochain coordinates.
    pub fn star_projection(&self, from: &CochainLayout, to: &CochainLayout) -> Result<IntMatrix, PpsError> {
        let mut out = IntMatrix::zeros(to.dim, from.dim);
        for (j, &c) in to.cones.iter().enumerate() {
            let i = from.position(c).ok_or(PpsError::NotInStar { cone: c, root: from.root })?;
            for k in 0..to.layouts[j].dim() {
                out.set(to.offsets[j] + k, from.offsets[i] + k, BigInt::from(1));
            }
        }
        Ok(out)
    }
}

/// Pullback of sections along a subdivision, from the star of `root` in the
/// coarse fan to the star of `fine_root` in the fine fan. Each fine maximal
/// cone `s` takes its value from a coarse maximal cone containing `phi(s)`,
/// through the lattice inclusion.
pub fn pullback_matrix(
    map: &SubdivisionMap,
    coarse: &PpsSheaf,
    fine: &PpsSheaf,
    from: &CochainLayout,
    to: &CochainLayout,
) -> Result<IntMatrix, PpsError> {
    let mut out = IntMatrix::zeros(to.dim, from.dim);
    for (j, &s) in to.cones.iter().enumerate() {
        let (i, source) = pullback_source(map, coarse, from, s)?;
        let r = RestrictionMap::new(coarse.stalk(source), fine.stalk(s))?.matrix(from.degree);
        for a in 0..r.nrows() {
            for b in 0..r.ncols() {
                let x = r.get(a, b);
                if !x.is_zero() {
                    out.set(to.offsets[j] + a, from.offsets[i] + b, x.clone());
                }
            }
        }
    }
    Ok(out)
}

fn pullback_source(
    map: &SubdivisionMap,
    coarse: &PpsSheaf,
    from: &CochainLayout,
    fine_cone: usize,
) -> Result<(usize, usize), PpsError> {
    let target = map.phi[fine_cone];
    from.cones
        .iter()
        .enumerate()
        .find(|(_, &c)| coarse.fan().is_face(target, c))
        .map(|(i, &c)| (i, c))
        .ok_or(PpsError::NotInStar { cone: target, root: from.root })
}

/// Pulls a section back along a subdivision onto the star of `fine_root`.
pub fn pullback_subdivision(
    map: &SubdivisionMap,
    coarse: &PpsSheaf,
    fine: &PpsSheaf,
    p: &PiecewiseSeries,
    fine_root: usize,
) -> Result<PiecewiseSeries, PpsError> {
    let from = coarse.layout(p.root, p.degree)?;
    let mut values = BTreeMap::new();
    for s in fine.domain_cones(fine_root)? {
        let (_, source) = pullback_source(map, coarse, &from, s)?;
        let f = p.values.get(&source).ok_or(PpsError::MissingValue(source))?;
        let r = RestrictionMap::new(coarse.stalk(source), fine.stalk(s))?;
        values.insert(s, r.apply(f)?);
    }
    Ok(PiecewiseSeries { root: fine_root, degree: p.degree, values })
}

/// Coordinates of families of stalk values on the maximal cones of a domain.
#[derive(Clone, Debug)]
pub struct CochainLayout {
    pub root: usize,
    pub degree: i64,
    pub cones: Vec<usize>,
    pub layouts: Vec<SeriesLayout>,
    pub offsets: Vec<usize>,
    pub dim: usize,
}

impl CochainLayout {
    pub fn position(&self, cone: usize) -> Option<usize> {
        self.cones.iter().position(|&c| c == cone)
    }

    pub fn to_coords(&self, p: &PiecewiseSeries) -> Result<IntVector, PpsError> {
        if p.root != self.root || p.degree != self.degree {
            return Err(PpsError::DomainMismatch);
        }
        let mut out = Vec::with_capacity(self.dim);
        for (i, c) in self.cones.iter().enumerate() {
            let f = p.values.get(c).ok_or(PpsError::MissingValue(*c))?;
            out.extend(self.layouts[i].to_coords(f));
        }
        Ok(out)
    }

    pub fn from_coords(&self, v: &[BigInt]) -> PiecewiseSeries {
        let values = self
            .cones
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let l = &self.layouts[i];
                (c, l.from_coords(&v[self.offsets[i]..self.offsets[i] + l.dim()]))
            })
            .collect();
        PiecewiseSeries { root: self.root, degree: self.degree, values }
    }
}

/// A family of stalk values of one degree on the maximal cones of a domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseSeries {
    pub root: usize,
    pub degree: i64,
    pub values: BTreeMap<usize, GradedSeries>,
}

impl PiecewiseSeries {
    pub fn value(&self, cone: usize) -> Option<&GradedSeries> {
        self.values.get(&cone)
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(GradedSeries::is_zero)
    }

    pub fn add(&self, other: &PiecewiseSeries) -> Result<PiecewiseSeries, PpsError> {
        if self.root != other.root || self.values.len() != other.values.len() {
            return Err(PpsError::DomainMismatch);
        }
        let mut values = BTreeMap::new();
        for (c, f) in &self.values {
            let g = other.values.get(c).ok_or(PpsError::DomainMismatch)?;
            values.insert(*c, f.add(g)?);
        }
        Ok(PiecewiseSeries { root: self.root, degree: self.degree, values })
    }

    /// Applies a coefficient map (such as a specialization) stalk-wise.
    pub fn map_coefficients<F>(&self, target: &Arc<GradedRing>, f: F) -> PiecewiseSeries
    where
        F: Fn(&crate::fgl::RingElement) -> crate::fgl::RingElement,
    {
        let values = self.values.iter().map(|(c, s)| (*c, s.map_coefficients(target.clone(), &f))).collect();
        PiecewiseSeries { root: self.root, degree: self.degree, values }
    }
}

/// The module of sections of one degree over a domain, as a saturated
/// sublattice of cochain coordinates.
#[derive(Clone, Debug)]
pub struct SectionModule {
    pub layout: CochainLayout,
    pub kernel: LatticeSubspace,
}

impl SectionModule {
    pub fn rank(&self) -> usize {
        self.kernel.rank()
    }

    pub fn degree(&self) -> i64 {
        self.layout.degree
    }

    pub fn basis(&self) -> Vec<PiecewiseSeries> {
        self.kernel.basis_vectors().iter().map(|v| self.layout.from_coords(v)).collect()
    }

    /// Basis vectors as the columns of a matrix.
    pub fn basis_matrix(&self) -> IntMatrix {
        self.kernel.basis().transpose()
    }

    pub fn contains(&self, p: &PiecewiseSeries) -> Result<bool, PpsError> {
        Ok(self.kernel.contains(&self.layout.to_coords(p)?))
    }
}
