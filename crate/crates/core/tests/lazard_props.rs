mod common;

use common::*;
use fglfans_core::fgl::{fgl_sum, inverse_series, n_series, RingElement, SeriesSpace};
use fglfans_core::lazard::{APoly, LazardRing};
use proptest::prelude::*;

const D: usize = 4;

/// The polynomial `sum c_n m_n` over the monomials of weight `w`.
fn apoly(l: &LazardRing, w: usize, coeffs: &[i64]) -> APoly {
    let piece = l.piece(w).unwrap();
    let mut out = APoly::zero();
    for (m, &c) in piece.monomials.iter().zip(coeffs) {
        let mut term = APoly::constant(c);
        for (&(i, j), &e) in l.variables().iter().zip(m) {
            for _ in 0..e {
                term = term.mul(&APoly::var(i, j));
            }
        }
        out = out.add(&term);
    }
    out
}

fn poly_in(w: usize) -> impl Strategy<Value = (usize, Vec<i64>)> {
    let n = lazard(D).piece(w).unwrap().monomials.len();
    prop::collection::vec(-3i64..=3, n).prop_map(move |c| (w, c))
}

fn element(w: usize) -> impl Strategy<Value = RingElement> {
    prop::collection::vec(-3i64..=3, lazard(D).ring().rank(w)).prop_map(move |c| RingElement::new(w, big(&c)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn normal_form_is_multiplicative(
        (wp, cp) in (0usize..=D).prop_flat_map(poly_in),
        wq in 0usize..=D,
        seed in prop::collection::vec(-3i64..=3, 8),
    ) {
        let l = lazard(D);
        prop_assume!(wp + wq <= D);
        let n = l.piece(wq).unwrap().monomials.len();
        let cq: Vec<i64> = (0..n).map(|k| seed[k % seed.len()] - (k as i64 % 2)).collect();
        let (p, q) = (apoly(l, wp, &cp), apoly(l, wq, &cq));
        let nf = |x: &APoly, w: usize| l.normal_form_at(x, w).unwrap();
        prop_assert_eq!(nf(&p.mul(&q), wp + wq), l.ring().mul(&nf(&p, wp), &nf(&q, wq)));
        let tripled = RingElement::new(wp, nf(&p, wp).coords.iter().map(|x| x * 3).collect());
        prop_assert_eq!(nf(&p.add(&p.scale(2)), wp), tripled);
    }

    #[test]
    fn lift_is_a_section_of_normal_form(e in (0usize..=D).prop_flat_map(element)) {
        let l = lazard(D);
        prop_assert_eq!(l.normal_form_at(&l.lift(&e), e.weight).unwrap(), e);
    }

    #[test]
    fn specializations_are_ring_maps(a in (0usize..=2).prop_flat_map(element), b in (0usize..=2).prop_flat_map(element)) {
        let l = lazard(D);
        for spec in [l.specialize_additive(), l.specialize_multiplicative()] {
            let prod = spec.apply_element(&l.ring().mul(&a, &b));
            prop_assert_eq!(prod, spec.target().mul(&spec.apply_element(&a), &spec.apply_element(&b)));
        }
    }

    #[test]
    fn specializations_commute_with_the_group_law(
        a in coords(&SeriesSpace::new(universal(D), 2), 1),
        b in coords(&SeriesSpace::new(universal(D), 2), 1),
        n in -3i64..=3,
    ) {
        let l = lazard(D);
        let s = SeriesSpace::new(l.ring().clone(), 2);
        let (f, g) = (chern(&s, &a), chern(&s, &b));
        for spec in [l.specialize_additive(), l.specialize_multiplicative()] {
            let lhs = spec.apply_chern(&fgl_sum(&f, &g).unwrap()).unwrap();
            let rhs = fgl_sum(&spec.apply_chern(&f).unwrap(), &spec.apply_chern(&g).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(spec.apply_chern(&n_series(l.ring(), n)).unwrap(), n_series(spec.target(), n));
            prop_assert_eq!(spec.apply_chern(&inverse_series(l.ring())).unwrap(), inverse_series(spec.target()));
        }
    }
}
