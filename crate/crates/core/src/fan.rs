//! Rational polyhedral fans.
//!
//! A [`Fan`] is stored as a table of primitive rays together with every cone
//! (closed under faces) as a sorted ray-index set. The ray table is sorted
//! lexicographically and cones are sorted by dimension, then by index list,
//! so two fans with the same cones serialize identically. The zero cone has
//! id 0.
//!
//! Cone geometry is exact: facets come from supporting hyperplanes computed
//! with integer kernels, and faces are intersections of facets.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::intlin::{content, dot, integer_kernel, primitive_part, smith_normal_form, IntMatrix, IntVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    WrongLength { ray: usize, expected: usize, found: usize },
    NotPrimitive { ray: usize },
    DuplicateRay { first: usize, second: usize },
    RayIndexOutOfRange { cone: usize, index: usize },
    UnusedRay { ray: usize },
    NotStronglyConvex { cone: usize },
    RedundantGenerator { cone: usize, ray: usize },
    BadIntersection { first: usize, second: usize },
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Violation::WrongLength { ray, expected, found } => {
                write!(f, "ray {ray} has {found} coordinates, expected {expected}")
            }
            Violation::NotPrimitive { ray } => write!(f, "ray {ray} is not primitive"),
            Violation::DuplicateRay { first, second } => write!(f, "rays {first} and {second} coincide"),
            Violation::RayIndexOutOfRange { cone, index } => write!(f, "cone {cone} uses unknown ray {index}"),
            Violation::UnusedRay { ray } => write!(f, "ray {ray} lies in no cone"),
            Violation::NotStronglyConvex { cone } => write!(f, "cone {cone} contains a line"),
            Violation::RedundantGenerator { cone, ray } => {
                write!(f, "ray {ray} is not an extreme ray of cone {cone}")
            }
            Violation::BadIntersection { first, second } => {
                write!(f, "cones {first} and {second} do not meet in a common face")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FanError {
    #[error("invalid fan: {}", list_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("vector is not primitive")]
    NotPrimitive,
    #[error("vector has {found} coordinates, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("vector lies outside the support of the fan")]
    OutsideSupport,
    #[error("vector is already a ray of the fan")]
    AlreadyRay,
    #[error("no cone with ray set {0:?}")]
    UnknownCone(Vec<usize>),
    #[error("transformation is not unimodular")]
    NotUnimodular,
}

fn list_violations(v: &[Violation]) -> alloc::string::String {
    let parts: Vec<alloc::string::String> = v.iter().map(|x| alloc::format!("{x}")).collect();
    parts.join("; ")
}

/// A facet: the supporting hyperplane `normal . x = 0` with `normal . x >= 0`
/// on the cone, and the generators lying on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub normal: IntVector,
    pub rays: Vec<usize>,
}

/// Exact geometry of the cone generated by a list of vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    rank: usize,
    rays: Vec<IntVector>,
    dim: usize,
    equations: Vec<IntVector>,
    facets: Vec<Facet>,
    face_sets: Vec<Vec<usize>>,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

fn sign_pattern(normal: &[BigInt], rays: &[IntVector]) -> Vec<BigInt> {
    rays.iter().map(|r| dot(normal, r)).collect()
}

impl Cone {
    /// The cone generated by `rays` in `Z^rank`.
    pub fn new(rank: usize, rays: Vec<IntVector>) -> Self {
        let m = IntMatrix::from_rows(rank, &rays);
        let dim = m.rank();
        let equations = integer_kernel(&m).basis_vectors();
        let mut facets: Vec<Facet> = Vec::new();
        if dim > 0 {
            for sub in subsets(rays.len(), dim - 1) {
                let sm = m.select_rows(&sub);
                if sm.rank() != dim - 1 {
                    continue;
                }
                let kernel = integer_kernel(&sm);
                let Some(b) = kernel.basis_vectors().into_iter().find(|b| rays.iter().any(|r| !dot(b, r).is_zero()))
                else {
                    continue;
                };
                let values = sign_pattern(&b, &rays);
                let normal = if values.iter().all(|x| !x.is_negative()) {
                    b
                } else if values.iter().all(|x| !x.is_positive()) {
                    b.iter().map(|x| -x).collect()
                } else {
                    continue;
                };
                let on: Vec<usize> = (0..rays.len()).filter(|&i| dot(&normal, &rays[i]).is_zero()).collect();
                if facets.iter().any(|f| f.rays == on) {
                    continue;
                }
                facets.push(Facet { normal: primitive_part(&normal), rays: on });
            }
        }
        facets.sort_by(|a, b| a.rays.cmp(&b.rays));
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        faces.insert((0..rays.len()).collect());
        let mut frontier: Vec<Vec<usize>> = facets.iter().map(|f| f.rays.clone()).collect();
        while let Some(s) = frontier.pop() {
            if !faces.insert(s.clone()) {
                continue;
            }
            for f in &facets {
                let t: Vec<usize> = s.iter().copied().filter(|i| f.rays.contains(i)).collect();
                if !faces.contains(&t) {
                    frontier.push(t);
                }
            }
        }
        let mut face_sets: Vec<Vec<usize>> = faces.into_iter().collect();
        face_sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Cone { rank, rays, dim, equations, facets, face_sets }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis of the integer vectors orthogonal to the linear span.
    pub fn equations(&self) -> &[IntVector] {
        &self.equations
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Generator index sets of all faces, from the zero face up to the cone.
    pub fn face_sets(&self) -> &[Vec<usize>] {
        &self.face_sets
    }

    pub fn faces(&self) -> Vec<Cone> {
        self.face_sets
            .iter()
            .map(|s| Cone::new(self.rank, s.iter().map(|&i| self.rays[i].clone()).collect()))
            .collect()
    }

    /// No generator lies on every facet (equivalently, the cone has no line).
    pub fn is_pointed(&self) -> bool {
        if self.rays.is_empty() {
            return true;
        }
        if self.rays.iter().any(|r| r.iter().all(Zero::is_zero)) {
            return false;
        }
        (0..self.rays.len()).all(|i| self.facets.iter().any(|f| !f.rays.contains(&i)))
    }

    /// Generators that are not extreme rays.
    pub fn redundant_generators(&self) -> Vec<usize> {
        (0..self.rays.len()).filter(|&i| !self.face_sets.iter().any(|s| s.len() == 1 && s[0] == i)).collect()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        if self.rays.is_empty() {
            return v.iter().all(Zero::is_zero);
        }
        self.equations.iter().all(|e| dot(e, v).is_zero())
            && self.facets.iter().all(|f| !dot(&f.normal, v).is_negative())
    }

    pub fn contains_in_relative_interior(&self, v: &[BigInt]) -> bool {
        self.contains(v) && self.facets.iter().all(|f| dot(&f.normal, v).is_positive())
    }

    /// Whether a point of the cone lies in the face spanned by `face`.
    /// `face` must be one of [`Cone::face_sets`].
    pub fn face_contains(&self, face: &[usize], v: &[BigInt]) -> bool {
        self.contains(v)
            && self
                .facets
                .iter()
                .filter(|f| face.iter().all(|i| f.rays.contains(i)))
                .all(|f| dot(&f.normal, v).is_zero())
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim
    }

    /// Index of the generators' lattice in the lattice points of the span.
    pub fn multiplicity(&self) -> Option<BigInt> {
        if !self.is_simplicial() {
            return None;
        }
        if self.rays.is_empty() {
            return Some(BigInt::one());
        }
        let (_, d, _) = smith_normal_form(&IntMatrix::from_rows(self.rank, &self.rays));
        Some((0..self.dim).fold(BigInt::one(), |acc, i| acc * d.get(i, i)))
    }

    /// Simplicial with generators extending to a basis of `Z^rank`.
    pub fn is_smooth(&self) -> bool {
        self.multiplicity().is_some_and(|m| m.is_one())
    }

    /// Nonzero lattice points `sum l_i r_i` with every `l_i` in `[0, 1)`, for
    /// a simplicial cone, each with the numerators of its coordinates over
    /// a common denominator, which is returned first.
    pub fn parallelepiped_points(&self) -> Option<(BigInt, Vec<(IntVector, IntVector)>)> {
        if !self.is_simplicial() || self.rays.is_empty() {
            return None;
        }
        let m = self.dim;
        let r = IntMatrix::from_rows(self.rank, &self.rays);
        let (u, d, _) = smith_normal_form(&r);
        let ds: Vec<BigInt> = (0..m).map(|i| d.get(i, i).clone()).collect();
        let denom = ds[m - 1].clone();
        let mut out = Vec::new();
        let mut c = vec![BigInt::zero(); m];
        loop {
            // advance odometer over 0 <= c_i < d_i
            let mut pos = 0;
            loop {
                if pos == m {
                    return Some((denom, out));
                }
                c[pos] += 1;
                if c[pos] < ds[pos] {
                    break;
                }
                c[pos] = BigInt::zero();
                pos += 1;
            }
            let mut num = vec![BigInt::zero(); m];
            for i in 0..m {
                if c[i].is_zero() {
                    continue;
                }
                let scale = &c[i] * (&denom / &ds[i]);
                for (j, n) in num.iter_mut().enumerate() {
                    *n += &scale * u.get(i, j);
                }
            }
            for n in num.iter_mut() {
                *n = n.mod_floor(&denom);
            }
            let mut point = vec![BigInt::zero(); self.rank];
            for (n, ray) in num.iter().zip(&self.rays) {
                for (p, x) in point.iter_mut().zip(ray) {
                    *p += n * x;
                }
            }
            for p in point.iter_mut() {
                debug_assert!((&*p % &denom).is_zero());
                *p = &*p / &denom;
            }
            out.push((point, num));
        }
    }
}

fn extreme_rays_of_intersection(a: &Cone, b: &Cone) -> Vec<IntVector> {
    let n = a.rank;
    let mut eqs: Vec<IntVector> = a.equations.clone();
    eqs.extend(b.equations.iter().cloned());
    let ineqs: Vec<IntVector> = a.facets.iter().chain(&b.facets).map(|f| f.normal.clone()).collect();
    let e = IntMatrix::from_rows(n, &eqs);
    let d = n - e.rank();
    if d == 0 {
        return Vec::new();
    }
    let mut out: Vec<IntVector> = Vec::new();
    for sub in subsets(ineqs.len(), d - 1) {
        let mut rows = eqs.clone();
        rows.extend(sub.iter().map(|&i| ineqs[i].clone()));
        let k = integer_kernel(&IntMatrix::from_rows(n, &rows));
        if k.rank() != 1 {
            continue;
        }
        let x = k.basis().row(0).to_vec();
        let neg: IntVector = x.iter().map(|v| -v).collect();
        for cand in [x, neg] {
            if ineqs.iter().all(|f| !dot(f, &cand).is_negative()) && !out.contains(&cand) {
                out.push(cand);
            }
        }
    }
    out
}

/// A cone of a fan: its global ray indices, geometry and faces.
#[derive(Clone, Debug)]
pub struct FanCone {
    pub rays: Vec<usize>,
    pub geometry: Cone,
    /// Ids of all faces, including the cone itself.
    pub faces: Vec<usize>,
    pub maximal: bool,
}

impl FanCone {
    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }
}

/// A validated rational polyhedral fan.
#[derive(Clone, Debug)]
pub struct Fan {
    rank: usize,
    rays: Vec<IntVector>,
    cones: Vec<FanCone>,
    index: BTreeMap<Vec<usize>, usize>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.rays == other.rays && self.index == other.index
    }
}

impl Eq for Fan {}

/// Checks fan data: primitive distinct rays, strongly convex cones without
/// redundant generators, and maximal cones meeting in common faces.
pub fn validate_fan(rank: usize, rays: &[IntVector], cones: &[Vec<usize>]) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, r) in rays.iter().enumerate() {
        if r.len() != rank {
            out.push(Violation::WrongLength { ray: i, expected: rank, found: r.len() });
        } else if !content(r).is_one() {
            out.push(Violation::NotPrimitive { ray: i });
        }
        for (j, s) in rays.iter().enumerate().skip(i + 1) {
            if r == s {
                out.push(Violation::DuplicateRay { first: i, second: j });
            }
        }
    }
    for (c, cone) in cones.iter().enumerate() {
        for &i in cone {
            if i >= rays.len() {
                out.push(Violation::RayIndexOutOfRange { cone: c, index: i });
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    for i in 0..rays.len() {
        if !cones.iter().any(|c| c.contains(&i)) {
            out.push(Violation::UnusedRay { ray: i });
        }
    }
    let sets: Vec<Vec<usize>> = cones
        .iter()
        .map(|c| {
            let mut s = c.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let geoms: Vec<Cone> =
        sets.iter().map(|s| Cone::new(rank, s.iter().map(|&i| rays[i].clone()).collect())).collect();
    let mut sound = vec![true; cones.len()];
    for (c, g) in geoms.iter().enumerate() {
        if !g.is_pointed() {
            out.push(Violation::NotStronglyConvex { cone: c });
            sound[c] = false;
            continue;
        }
        for local in g.redundant_generators() {
            out.push(Violation::RedundantGenerator { cone: c, ray: sets[c][local] });
            sound[c] = false;
        }
    }
    for a in 0..cones.len() {
        for b in a + 1..cones.len() {
            if !sound[a] || !sound[b] {
                continue;
            }
            if !meet_in_common_face(&sets[a], &geoms[a], &sets[b], &geoms[b]) {
                out.push(Violation::BadIntersection { first: a, second: b });
            }
        }
    }
    out
}

fn local_indices(global: &[usize], subset: &[usize]) -> Vec<usize> {
    subset.iter().map(|g| global.iter().position(|x| x == g).expect("subset")).collect()
}

fn meet_in_common_face(sa: &[usize], ga: &Cone, sb: &[usize], gb: &Cone) -> bool {
    let common: Vec<usize> = sa.iter().copied().filter(|i| sb.contains(i)).collect();
    let la = local_indices(sa, &common);
    let lb = local_indices(sb, &common);
    if !ga.face_sets().contains(&la) || !gb.face_sets().contains(&lb) {
        return false;
    }
    extreme_rays_of_intersection(ga, gb).iter().all(|x| ga.face_contains(&la, x))
}

impl Fan {
    /// Builds a fan from its rays and any generating list of cones (for
    /// instance the maximal ones). Faces are generated and the result is put
    /// in canonical order.
    pub fn new(rank: usize, rays: Vec<IntVector>, cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
        let violations = validate_fan(rank, &rays, &cones);
        if !violations.is_empty() {
            return Err(FanError::Invalid(violations));
        }
        let mut order: Vec<usize> = (0..rays.len()).collect();
        order.sort_by(|&a, &b| rays[a].cmp(&rays[b]));
        let mut relabel = vec![0; rays.len()];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new;
        }
        let sorted_rays: Vec<IntVector> = order.iter().map(|&i| rays[i].clone()).collect();
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        all.insert(Vec::new());
        for c in &cones {
            let mut s: Vec<usize> = c.iter().map(|&i| relabel[i]).collect();
            s.sort_unstable();
            s.dedup();
            let g = Cone::new(rank, s.iter().map(|&i| sorted_rays[i].clone()).collect());
            for f in g.face_sets() {
                all.insert(f.iter().map(|&l| s[l]).collect());
            }
        }
        let mut sets: Vec<Vec<usize>> = all.into_iter().collect();
        let dims: BTreeMap<Vec<usize>, usize> = sets
            .iter()
            .map(|s| {
                let m = IntMatrix::from_rows(rank, &s.iter().map(|&i| sorted_rays[i].clone()).collect::<Vec<_>>());
                (s.clone(), m.rank())
            })
            .collect();
        sets.sort_by(|a, b| dims[a].cmp(&dims[b]).then_with(|| a.cmp(b)));
        let index: BTreeMap<Vec<usize>, usize> = sets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut fan_cones = Vec::with_capacity(sets.len());
        for s in &sets {
            let geometry = Cone::new(rank, s.iter().map(|&i| sorted_rays[i].clone()).collect());
            let mut faces: Vec<usize> = geometry
                .face_sets()
                .iter()
                .map(|f| {
                    let g: Vec<usize> = f.iter().map(|&l| s[l]).collect();
                    index[&g]
                })
                .collect();
            faces.sort_unstable();
            let maximal = !sets.iter().any(|t| t.len() > s.len() && s.iter().all(|i| t.contains(i)));
            fan_cones.push(FanCone { rays: s.clone(), geometry, faces, maximal });
        }
        Ok(Fan { rank, rays: sorted_rays, cones: fan_cones, index })
    }

    pub fn from_i64(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Result<Self, FanError> {
        Fan::new(
            rank,
            rays.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
            cones.iter().map(|c| c.to_vec()).collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &IntVector {
        &self.rays[i]
    }

    pub fn ray_index(&self, v: &[BigInt]) -> Option<usize> {
        self.rays.iter().position(|r| r.as_slice() == v)
    }

    pub fn num_cones(&self) -> usize {
        self.cones.len()
    }

    pub fn cone(&self, id: usize) -> &FanCone {
        &self.cones[id]
    }

    pub fn cones(&self) -> &[FanCone] {
        &self.cones
    }

    pub fn cone_id(&self, rays: &[usize]) -> Option<usize> {
        let mut s = rays.to_vec();
        s.sort_unstable();
        self.index.get(&s).copied()
    }

    /// Ids of the maximal cones, in canonical order.
    pub fn maximal_cones(&self) -> Vec<usize> {
        (0..self.cones.len()).filter(|&i| self.cones[i].maximal).collect()
    }

    /// Ray index lists of the maximal cones, the serialized form of the fan.
    pub fn maximal_ray_sets(&self) -> Vec<Vec<usize>> {
        self.maximal_cones().into_iter().map(|i| self.cones[i].rays.clone()).collect()
    }

    pub fn dim(&self) -> usize {
        self.cones.iter().map(FanCone::dim).max().unwrap_or(0)
    }

    /// Whether `tau` is a face of `sigma`.
    pub fn is_face(&self, tau: usize, sigma: usize) -> bool {
        self.cones[sigma].faces.binary_search(&tau).is_ok()
    }

    /// All cones having `rho` as a face.
    pub fn star(&self, rho: usize) -> Vec<usize> {
        (0..self.cones.len()).filter(|&s| self.is_face(rho, s)).collect()
    }

    pub fn is_smooth(&self) -> bool {
        self.cones.iter().all(|c| c.geometry.is_smooth())
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(|c| c.geometry.is_simplicial())
    }

    /// The cone containing `v` in its relative interior.
    pub fn smallest_cone_containing(&self, v: &[BigInt]) -> Option<usize> {
        (0..self.cones.len()).find(|&i| self.cones[i].geometry.contains(v))
    }

    /// The smallest cone containing all of `vectors`.
    pub fn smallest_cone_containing_all(&self, vectors: &[IntVector]) -> Option<usize> {
        (0..self.cones.len()).find(|&i| vectors.iter().all(|v| self.cones[i].geometry.contains(v)))
    }

    /// The image of the fan under `v -> m v` for a unimodular `m`.
    pub fn transform(&self, m: &IntMatrix) -> Result<Fan, FanError> {
        if m.nrows() != self.rank || m.ncols() != self.rank || !m.determinant().abs().is_one() {
            return Err(FanError::NotUnimodular);
        }
        let rays = self.rays.iter().map(|r| m.mul_vec(r)).collect();
        Fan::new(self.rank, rays, self.maximal_ray_sets())
    }

    /// Star subdivision at the primitive vector `v`.
    pub fn star_subdivision(self: &Arc<Self>, v: &[BigInt]) -> Result<SubdivisionMap, FanError> {
        if v.len() != self.rank {
            return Err(FanError::WrongLength { expected: self.rank, found: v.len() });
        }
        if !content(v).is_one() {
            return Err(FanError::NotPrimitive);
        }
        if self.ray_index(v).is_some() {
            return Err(FanError::AlreadyRay);
        }
        let pi = self.smallest_cone_containing(v).ok_or(FanError::OutsideSupport)?;
        let new_index = self.rays.len();
        let mut rays = self.rays.clone();
        rays.push(v.to_vec());
        let mut generators: Vec<Vec<usize>> = Vec::new();
        for c in &self.cones {
            if !c.maximal {
                continue;
            }
            if !self.is_face(pi, self.index[&c.rays]) {
                generators.push(c.rays.clone());
                continue;
            }
            for &f in &c.faces {
                if self.is_face(pi, f) {
                    continue;
                }
                let mut s = self.cones[f].rays.clone();
                s.push(new_index);
                generators.push(s);
            }
        }
        let source = Arc::new(Fan::new(self.rank, rays, generators)?);
        let rho = source.cone_id(&[source.ray_index(v).expect("new ray")]).expect("ray cone");
        let phi = (0..source.num_cones())
            .map(|i| {
                let vs: Vec<IntVector> = source.cones[i].rays.iter().map(|&r| source.rays[r].clone()).collect();
                self.smallest_cone_containing_all(&vs).expect("support is preserved")
            })
            .collect();
        Ok(SubdivisionMap { source, target: self.clone(), phi, center: Some(Center { pi, rho }) })
    }

    /// A sequence of star subdivisions ending in a smooth fan.
    pub fn resolve(self: &Arc<Self>, order: CenterOrder) -> Result<Vec<SubdivisionMap>, FanError> {
        let mut steps = Vec::new();
        let mut current = self.clone();
        while let Some(v) = current.next_center(order) {
            let step = current.star_subdivision(&v)?;
            current = step.source.clone();
            steps.push(step);
        }
        Ok(steps)
    }

    fn next_center(&self, order: CenterOrder) -> Option<IntVector> {
        let pick = |pred: &dyn Fn(&FanCone) -> bool| -> Option<usize> {
            let bad: Vec<usize> = (0..self.cones.len()).filter(|&i| pred(&self.cones[i])).collect();
            let d = bad.iter().map(|&i| self.cones[i].dim()).min()?;
            let lowest = bad.into_iter().filter(|&i| self.cones[i].dim() == d);
            match order {
                CenterOrder::Forward => lowest.min(),
                CenterOrder::Reverse => lowest.max(),
            }
        };
        if let Some(c) = pick(&|c| !c.geometry.is_simplicial()) {
            let mut sum = vec![BigInt::zero(); self.rank];
            for &r in &self.cones[c].rays {
                for (s, x) in sum.iter_mut().zip(&self.rays[r]) {
                    *s += x;
                }
            }
            return Some(primitive_part(&sum));
        }
        let c = pick(&|c| !c.geometry.is_smooth())?;
        let (_, points) = self.cones[c].geometry.parallelepiped_points().expect("simplicial");
        let best = points
            .into_iter()
            .min_by(|(pa, na), (pb, nb)| {
                let sa: BigInt = na.iter().sum();
                let sb: BigInt = nb.iter().sum();
                sa.cmp(&sb).then_with(|| pa.cmp(pb))
            })
            .expect("non-smooth cones have interior points");
        Some(primitive_part(&best.0))
    }
}

/// Which offending cone of lowest dimension a resolution step subdivides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CenterOrder {
    /// The first in canonical cone order.
    #[default]
    Forward,
    /// The last in canonical cone order.
    Reverse,
}

/// The cones attached to the center of a star subdivision: `pi` in the
/// coarse fan is the smallest cone containing the new ray, and `rho` in the
/// fine fan is the new ray itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Center {
    pub pi: usize,
    pub rho: usize,
}

/// A subdivision `source -> target` with `phi(sigma)` the smallest cone of
/// `target` containing `sigma`.
#[derive(Clone, Debug)]
pub struct SubdivisionMap {
    pub source: Arc<Fan>,
    pub target: Arc<Fan>,
    pub phi: Vec<usize>,
    pub center: Option<Center>,
}

impl SubdivisionMap {
    pub fn identity(fan: Arc<Fan>) -> Self {
        let phi = (0..fan.num_cones()).collect();
        SubdivisionMap { source: fan.clone(), target: fan, phi, center: None }
    }

    /// Checks that `phi` is monotone and picks smallest containing cones, and
    /// that the fine cones mapping into each coarse cone cover it.
    pub fn verify(&self) -> bool {
        let (s, t) = (&self.source, &self.target);
        for a in 0..s.num_cones() {
            for &f in &s.cone(a).faces {
                if !t.is_face(self.phi[f], self.phi[a]) {
                    return false;
                }
            }
            let vs: Vec<IntVector> = s.cone(a).rays.iter().map(|&r| s.ray(r).clone()).collect();
            if t.smallest_cone_containing_all(&vs) != Some(self.phi[a]) {
                return false;
            }
        }
        // Coverage spot check: full-dimensional pieces exist for every coarse
        // maximal cone and cover its rays and the sum of its rays.
        for b in t.maximal_cones() {
            let pieces: Vec<usize> =
                s.maximal_cones().into_iter().filter(|&a| t.is_face(self.phi[a], b)).collect();
            if pieces.is_empty() || pieces.iter().any(|&a| s.cone(a).dim() != t.cone(b).dim()) {
                return false;
            }
            let mut probes: Vec<IntVector> = t.cone(b).rays.iter().map(|&r| t.ray(r).clone()).collect();
            let mut sum = vec![BigInt::zero(); t.rank()];
            for p in &probes {
                for (x, y) in sum.iter_mut().zip(p) {
                    *x += y;
                }
            }
            probes.push(sum);
            if !probes.iter().all(|p| pieces.iter().any(|&a| s.cone(a).geometry.contains(p))) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlin::int_vector;

    fn p2() -> Arc<Fan> {
        Arc::new(Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]]).unwrap())
    }

    #[test]
    fn p1_is_valid() {
        let f = Fan::from_i64(1, &[&[1], &[-1]], &[&[0], &[1]]).unwrap();
        assert_eq!(f.num_cones(), 3);
        assert_eq!(f.maximal_cones(), vec![1, 2]);
        assert!(f.is_smooth());
    }

    #[test]
    fn invalid_fans_are_reported() {
        let overlap = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[1, 1], &[-1, 2]], &[&[0, 1], &[2, 3]]);
        assert!(
            matches!(&overlap, Err(FanError::Invalid(v)) if v.contains(&Violation::BadIntersection { first: 0, second: 1 })),
            "{overlap:?}"
        );
        let nonprim = Fan::from_i64(2, &[&[2, 0], &[0, 1]], &[&[0, 1]]);
        assert!(matches!(&nonprim, Err(FanError::Invalid(v)) if v.contains(&Violation::NotPrimitive { ray: 0 })));
        let line = Fan::from_i64(1, &[&[1], &[-1]], &[&[0, 1]]);
        assert!(matches!(&line, Err(FanError::Invalid(v)) if v.contains(&Violation::NotStronglyConvex { cone: 0 })));
        let redundant = Fan::from_i64(2, &[&[1, 0], &[1, 1], &[0, 1]], &[&[0, 1, 2]]);
        assert!(matches!(&redundant, Err(FanError::Invalid(v)) if v.contains(&Violation::RedundantGenerator { cone: 0, ray: 1 })));
    }

    #[test]
    fn cones_sharing_a_ray_but_crossing_are_rejected() {
        // cone(e1, e2) and cone(e1, e1 + 2 e2) share e1 but overlap in interiors
        let f = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[1, 2]], &[&[0, 1], &[0, 2]]);
        assert!(matches!(f, Err(FanError::Invalid(_))));
    }

    #[test]
    fn faces_of_cones() {
        assert_eq!(Cone::new(2, Vec::new()).face_sets().len(), 1);
        let c = Cone::new(2, vec![int_vector(&[1, 0]), int_vector(&[0, 1])]);
        assert_eq!(c.face_sets(), &[vec![], vec![0], vec![1], vec![0, 1]]);
        let c = Cone::new(2, vec![int_vector(&[1, 0]), int_vector(&[1, 2])]);
        assert_eq!(c.faces().len(), 4);
        let square = Cone::new(
            3,
            vec![int_vector(&[0, 0, 1]), int_vector(&[0, 1, 1]), int_vector(&[1, 0, 1]), int_vector(&[1, 1, 1])],
        );
        assert_eq!(square.facets().len(), 4);
        assert_eq!(square.face_sets().len(), 1 + 4 + 4 + 1);
        assert!(!square.is_smooth());
    }

    #[test]
    fn smoothness() {
        let c = Cone::new(2, vec![int_vector(&[1, 0]), int_vector(&[0, 1])]);
        assert!(c.is_smooth());
        let c = Cone::new(2, vec![int_vector(&[0, 1]), int_vector(&[2, -1])]);
        assert_eq!(c.multiplicity(), Some(BigInt::from(2)));
        assert!(!c.is_smooth());
        let (_, pts) = c.parallelepiped_points().unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].0, int_vector(&[1, 0]));
    }

    #[test]
    fn stars() {
        let f = p2();
        assert_eq!(f.star(0).len(), f.num_cones());
        let e1 = f.cone_id(&[f.ray_index(&int_vector(&[1, 0])).unwrap()]).unwrap();
        let st = f.star(e1);
        assert_eq!(st.len(), 3);
        for m in f.maximal_cones() {
            assert_eq!(f.star(m), vec![m]);
        }
    }

    #[test]
    fn blowup_of_plane_origin() {
        let f = Arc::new(Fan::from_i64(2, &[&[1, 0], &[0, 1]], &[&[0, 1]]).unwrap());
        let s = f.star_subdivision(&int_vector(&[1, 1])).unwrap();
        assert_eq!(s.source.maximal_cones().len(), 2);
        assert!(s.verify());
        let center = s.center.unwrap();
        assert_eq!(center.pi, f.maximal_cones()[0]);
        for m in s.source.maximal_cones() {
            assert_eq!(s.phi[m], center.pi);
        }
        assert_eq!(f.star_subdivision(&int_vector(&[1, 0])).unwrap_err(), FanError::AlreadyRay);
        assert_eq!(f.star_subdivision(&int_vector(&[-1, 0])).unwrap_err(), FanError::OutsideSupport);
        assert_eq!(f.star_subdivision(&int_vector(&[2, 2])).unwrap_err(), FanError::NotPrimitive);
    }

    #[test]
    fn blowup_of_p2() {
        let s = p2().star_subdivision(&int_vector(&[1, 1])).unwrap();
        assert_eq!(s.source.rays().len(), 4);
        assert_eq!(s.source.maximal_cones().len(), 4);
        assert!(s.verify());
    }

    #[test]
    fn resolve_quadric_cone() {
        let f = Arc::new(Fan::from_i64(2, &[&[0, 1], &[2, -1]], &[&[0, 1]]).unwrap());
        let steps = f.resolve(CenterOrder::Forward).unwrap();
        assert_eq!(steps.len(), 1);
        assert!(steps[0].source.ray_index(&int_vector(&[1, 0])).is_some());
        assert!(steps[0].source.is_smooth());
        assert!(p2().resolve(CenterOrder::Forward).unwrap().is_empty());
    }

    #[test]
    fn resolve_square_cone() {
        let f = Arc::new(
            Fan::from_i64(3, &[&[0, 0, 1], &[0, 1, 1], &[1, 0, 1], &[1, 1, 1]], &[&[0, 1, 2, 3]]).unwrap(),
        );
        for order in [CenterOrder::Forward, CenterOrder::Reverse] {
            let steps = f.resolve(order).unwrap();
            assert!(!steps.is_empty());
            assert!(steps.last().unwrap().source.is_smooth());
            assert!(steps.iter().all(SubdivisionMap::verify));
        }
    }
}
