//! Descent along star subdivisions.
//!
//! For a star subdivision `Δ' -> Δ` with new ray `rho` lying in the relative
//! interior of `pi`, the square
//!
//! ```text
//!   PPS(Δ)     -> PPS(Δ')
//!     |             |
//!   PPS(St pi) -> PPS(St rho)
//! ```
//!
//! of pullbacks and star restrictions is Cartesian. The check here is exact:
//! the square commutes on a basis, the top map is injective, and every
//! element of the fiber product is glued to an explicit section on `Δ`.
//!
//! Gluing uses that a maximal cone of `Δ` not containing `pi` is untouched by
//! the subdivision, so its value is read off the section on `Δ'`, while the
//! maximal cones containing `pi` take their values from the star.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::fan::{CenterOrder, Fan, FanError, SubdivisionMap};
use crate::fgl::GradedRing;
use crate::intlin::{integer_kernel, IntMatrix, IntVector, LatticeSubspace};
use crate::pps::{pullback_matrix, CochainLayout, PiecewiseSeries, PpsError, PpsSheaf, SectionModule};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DescentError {
    #[error(transparent)]
    Sections(#[from] PpsError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error("descent square of step {step} is not Cartesian in degree {degree}")]
    NotCartesian { step: usize, degree: i64 },
    #[error("sections obtained by descent differ from the direct solution in degree {degree}")]
    RouteMismatch { degree: i64 },
}

/// A star subdivision together with the section sheaves on both fans.
#[derive(Clone, Debug)]
pub struct DescentSquare {
    pub map: SubdivisionMap,
    pub coarse: PpsSheaf,
    pub fine: PpsSheaf,
    // coarse maximal cone -> same cone in the fine fan, when untouched
    untouched: Vec<Option<usize>>,
}

/// Outcome of [`DescentSquare::check_cartesian`] in one degree.
#[derive(Clone, Debug)]
pub struct GluingReport {
    pub degree: i64,
    /// Ranks of `PPS(Δ)`, `PPS(Δ')`, `PPS(St pi)`, `PPS(St rho)`.
    pub ranks: [usize; 4],
    pub commutes: bool,
    pub injective: bool,
    pub fiber_rank: usize,
    pub glued: bool,
    pub cartesian: bool,
    /// On failure: a section on `Δ'` in the fiber product that does not
    /// descend, or a nonzero section on `Δ` killed by the pullback.
    pub witness: Option<PiecewiseSeries>,
}

fn columns_of(m: &LatticeSubspace) -> IntMatrix {
    m.basis().transpose()
}

impl DescentSquare {
    pub fn new(map: SubdivisionMap, ring: Arc<GradedRing>) -> Result<Self, DescentError> {
        let coarse = PpsSheaf::new(map.target.clone(), ring.clone())?;
        let fine = PpsSheaf::new(map.source.clone(), ring)?;
        let (tf, sf) = (&map.target, &map.source);
        let untouched = (0..tf.num_cones())
            .map(|c| {
                let rays: Option<Vec<usize>> =
                    tf.cone(c).rays.iter().map(|&r| sf.ray_index(tf.ray(r))).collect();
                rays.and_then(|rs| sf.cone_id(&rs))
            })
            .collect();
        Ok(DescentSquare { map, coarse, fine, untouched })
    }

    /// `(pi, rho)`; the zero cones for a trivial subdivision.
    pub fn center(&self) -> (usize, usize) {
        self.map.center.map(|c| (c.pi, c.rho)).unwrap_or((0, 0))
    }

    /// Matrix of the pullback `PPS(St pi) -> PPS(St rho)` on cochain
    /// coordinates.
    pub fn star_pullback(&self, degree: i64) -> Result<IntMatrix, DescentError> {
        let (pi, rho) = self.center();
        let from = self.coarse.layout(pi, degree)?;
        let to = self.fine.layout(rho, degree)?;
        Ok(pullback_matrix(&self.map, &self.coarse, &self.fine, &from, &to)?)
    }

    /// Assembles a section on `Δ` from a section on `Δ'` and one on `St pi`.
    fn glue(
        &self,
        coarse: &CochainLayout,
        fine: &CochainLayout,
        star: &CochainLayout,
        x: &[BigInt],
        s: &[BigInt],
    ) -> Option<IntVector> {
        let mut g = Vec::with_capacity(coarse.dim);
        for (i, &c) in coarse.cones.iter().enumerate() {
            let len = coarse.layouts[i].dim();
            if let Some(j) = star.position(c) {
                g.extend_from_slice(&s[star.offsets[j]..star.offsets[j] + len]);
            } else {
                let fc = self.untouched[c]?;
                let j = fine.position(fc)?;
                g.extend_from_slice(&x[fine.offsets[j]..fine.offsets[j] + len]);
            }
        }
        Some(g)
    }

    /// Checks that the square is Cartesian in degree `degree`.
    pub fn check_cartesian(&self, degree: i64) -> Result<GluingReport, DescentError> {
        let (pi, rho) = self.center();
        let g_mod = self.coarse.global_sections(0, degree)?;
        let x_mod = self.fine.global_sections(0, degree)?;
        let s_mod = self.coarse.global_sections(pi, degree)?;
        let t_mod = self.fine.global_sections(rho, degree)?;
        let ranks = [g_mod.rank(), x_mod.rank(), s_mod.rank(), t_mod.rank()];
        let (lg, lx, ls, lt) = (&g_mod.layout, &x_mod.layout, &s_mod.layout, &t_mod.layout);

        let pull = pullback_matrix(&self.map, &self.coarse, &self.fine, lg, lx)?;
        let to_pi = self.coarse.star_projection(lg, ls)?;
        let to_rho = self.fine.star_projection(lx, lt)?;
        let star = pullback_matrix(&self.map, &self.coarse, &self.fine, ls, lt)?;

        let g = columns_of(&g_mod.kernel);
        let pg = pull.mul(&g);
        let commutes = to_rho.mul(&pg) == star.mul(&to_pi.mul(&g))
            && (0..pg.ncols()).all(|c| x_mod.kernel.contains(&pg.column(c)));
        let pulled = integer_kernel(&pg);
        let injective = pulled.rank() == 0;
        let mut witness = None;
        if !injective {
            witness = Some(lg.from_coords(&g.mul_vec(pulled.basis().row(0))));
        }

        let x = columns_of(&x_mod.kernel);
        let s = columns_of(&s_mod.kernel);
        let fiber = fiber_product(&to_rho.mul(&x), &star.mul(&s));
        let fiber_rank = fiber.rank();
        let mut glued = true;
        for v in fiber.basis_vectors() {
            let (alpha, beta) = v.split_at(x.ncols());
            let xv = x.mul_vec(alpha);
            let sv = s.mul_vec(beta);
            let ok = match self.glue(lg, lx, ls, &xv, &sv) {
                Some(gv) => g_mod.kernel.contains(&gv) && pull.mul_vec(&gv) == xv && to_pi.mul_vec(&gv) == sv,
                None => false,
            };
            if !ok {
                glued = false;
                if witness.is_none() {
                    witness = Some(lx.from_coords(&xv));
                }
                break;
            }
        }
        let cartesian = commutes && injective && glued && fiber_rank == ranks[0];
        Ok(GluingReport { degree, ranks, commutes, injective, fiber_rank, glued, cartesian, witness })
    }

    /// Sections on `Δ` obtained from sections on `Δ'` by gluing with the
    /// directly computed sections on `St pi`.
    pub fn descend(&self, fine_sections: &LatticeSubspace, degree: i64) -> Result<Option<LatticeSubspace>, DescentError> {
        let (pi, rho) = self.center();
        let lg = self.coarse.layout(0, degree)?;
        let lx = self.fine.layout(0, degree)?;
        let s_mod = self.coarse.global_sections(pi, degree)?;
        let ls = &s_mod.layout;
        let lt = self.fine.layout(rho, degree)?;
        let to_rho = self.fine.star_projection(&lx, &lt)?;
        let star = pullback_matrix(&self.map, &self.coarse, &self.fine, ls, &lt)?;
        let x = columns_of(fine_sections);
        let s = columns_of(&s_mod.kernel);
        let fiber = fiber_product(&to_rho.mul(&x), &star.mul(&s));
        let mut out = Vec::with_capacity(fiber.rank());
        for v in fiber.basis_vectors() {
            let (alpha, beta) = v.split_at(x.ncols());
            match self.glue(&lg, &lx, ls, &x.mul_vec(alpha), &s.mul_vec(beta)) {
                Some(g) => out.push(g),
                None => return Ok(None),
            }
        }
        Ok(Some(LatticeSubspace::generated_by(lg.dim, &out).expect("lengths match")))
    }
}

// {(a, b) : left a = right b}
fn fiber_product(left: &IntMatrix, right: &IntMatrix) -> LatticeSubspace {
    let neg = IntMatrix::from_rows(
        right.ncols(),
        &right.row_vectors().iter().map(|r| r.iter().map(|x| -x).collect::<Vec<_>>()).collect::<Vec<_>>(),
    );
    let m = left.augment(&neg);
    if m.nrows() == 0 || m.is_zero() {
        return LatticeSubspace::full(m.ncols());
    }
    integer_kernel(&m)
}

/// Sections obtained by descending from a resolution, compared with the
/// direct solution.
#[derive(Clone, Debug)]
pub struct ResolutionReport {
    pub degree: i64,
    pub steps: usize,
    pub direct: SectionModule,
    pub descended: LatticeSubspace,
    pub agree: bool,
}

/// Resolves `fan`, solves on the smooth end, and descends one star
/// subdivision at a time back to `fan`. A disagreement with the direct
/// solution is an error.
pub fn compute_via_resolution(
    fan: &Arc<Fan>,
    degree: i64,
    ring: &Arc<GradedRing>,
    order: CenterOrder,
) -> Result<ResolutionReport, DescentError> {
    let steps = fan.resolve(order)?;
    let terminal = steps.last().map(|s| s.source.clone()).unwrap_or_else(|| fan.clone());
    let mut current = PpsSheaf::new(terminal, ring.clone())?.global_sections(0, degree)?.kernel;
    for (k, step) in steps.iter().enumerate().rev() {
        let square = DescentSquare::new(step.clone(), ring.clone())?;
        current = square.descend(&current, degree)?.ok_or(DescentError::NotCartesian { step: k, degree })?;
    }
    let direct = PpsSheaf::new(fan.clone(), ring.clone())?.global_sections(0, degree)?;
    let agree = direct.kernel.same_lattice(&current);
    if !agree {
        return Err(DescentError::RouteMismatch { degree });
    }
    Ok(ResolutionReport { degree, steps: steps.len(), direct, descended: current, agree })
}

/// Whether pulling back along `map` is injective on sections of degree
/// `degree`.
pub fn pullback_is_injective(map: &SubdivisionMap, ring: &Arc<GradedRing>, degree: i64) -> Result<bool, DescentError> {
    let coarse = PpsSheaf::new(map.target.clone(), ring.clone())?;
    let fine = PpsSheaf::new(map.source.clone(), ring.clone())?;
    let g = coarse.global_sections(0, degree)?;
    let lx = fine.layout(0, degree)?;
    let pull = pullback_matrix(map, &coarse, &fine, &g.layout, &lx)?;
    let pg = pull.mul(&columns_of(&g.kernel));
    Ok(pg.rank() == pg.ncols())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlin::int_vector;
    use crate::lazard::build_lazard;

    fn universal(d: usize) -> Arc<GradedRing> {
        build_lazard(d).unwrap().ring().clone()
    }

    #[test]
    fn trivial_square_is_cartesian() {
        let f = Arc::new(Fan::from_i64(1, &[&[-1], &[1]], &[&[0], &[1]]).unwrap());
        let sq = DescentSquare::new(SubdivisionMap::identity(f), universal(2)).unwrap();
        for d in 0..=2 {
            let r = sq.check_cartesian(d).unwrap();
            assert!(r.cartesian, "{r:?}");
        }
    }

    #[test]
    fn plane_blowup_is_cartesian() {
        let f = Arc::new(Fan::from_i64(2, &[&[1, 0], &[0, 1]], &[&[0, 1]]).unwrap());
        let sq = DescentSquare::new(f.star_subdivision(&int_vector(&[1, 1])).unwrap(), universal(3)).unwrap();
        for d in 0..=2 {
            let r = sq.check_cartesian(d).unwrap();
            assert!(r.cartesian, "{r:?}");
        }
    }

    #[test]
    fn quadric_routes_agree() {
        let f = Arc::new(Fan::from_i64(2, &[&[0, 1], &[2, -1]], &[&[0, 1]]).unwrap());
        let ring = universal(3);
        for d in 0..=2 {
            let r = compute_via_resolution(&f, d, &ring, CenterOrder::Forward).unwrap();
            assert!(r.agree);
            assert_eq!(r.steps, 1);
        }
    }
}
