mod common;

use std::sync::Arc;

use common::*;
use fglfans_core::fgl::{fgl_sum, inverse_series, n_series, ChernElement, GradedRing, Monomial, SeriesSpace};
use fglfans_core::oracles::{multiplicative_combination, multiplicative_n_series};
use num_bigint::BigInt;
use proptest::prelude::*;

fn space2() -> SeriesSpace {
    SeriesSpace::new(universal(3), 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn formal_sum_is_a_commutative_group_law(
        a in coords(&space2(), 1),
        b in coords(&space2(), 1),
        c in coords(&space2(), 1),
    ) {
        let s = space2();
        let (f, g, h) = (chern(&s, &a), chern(&s, &b), chern(&s, &c));
        let zero = ChernElement::new(s.zero(1)).unwrap();
        prop_assert_eq!(fgl_sum(&f, &zero).unwrap(), f.clone());
        prop_assert_eq!(fgl_sum(&f, &g).unwrap(), fgl_sum(&g, &f).unwrap());
        let left = fgl_sum(&fgl_sum(&f, &g).unwrap(), &h).unwrap();
        let right = fgl_sum(&f, &fgl_sum(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        // the inverse series inverts any Chern element
        let chi = inverse_series(s.ring());
        let minus_f = ChernElement::new(chi.substitute(&[f.as_series().clone()]).unwrap()).unwrap();
        prop_assert!(fgl_sum(&f, &minus_f).unwrap().is_zero());
    }

    #[test]
    fn n_series_is_a_homomorphism(m in -5i64..=5, n in -5i64..=5) {
        let ring = universal(3);
        let sum = fgl_sum(&n_series(&ring, m), &n_series(&ring, n)).unwrap();
        prop_assert_eq!(sum, n_series(&ring, m + n));
        let composed = n_series(&ring, m).substitute(&[n_series(&ring, n).as_series().clone()]).unwrap();
        prop_assert_eq!(composed, n_series(&ring, m * n).into_series());
    }

    #[test]
    fn multiplicative_n_series_matches_closed_form(n in -6i64..=6) {
        let ring = Arc::new(GradedRing::multiplicative(4));
        let ours = n_series(&ring, n);
        for (k, expected) in multiplicative_n_series(n, 4).into_iter().enumerate() {
            let c = ours.coefficient(&Monomial(vec![k as u32 + 1])).map(|e| e.coords[0].clone());
            prop_assert_eq!(c.unwrap_or_default(), expected);
        }
    }

    #[test]
    fn substitution_is_a_ring_homomorphism(
        a in coords(&space2(), 0),
        b in coords(&space2(), 1),
        c in coords(&space2(), 0),
        p in coords(&space2(), 1),
        q in coords(&space2(), 1),
    ) {
        let s = space2();
        let (x, y, z) = (series(&s, 0, &a), series(&s, 1, &b), series(&s, 0, &c));
        let images = [series(&s, 1, &p), series(&s, 1, &q)];
        let sub = |f: &fglfans_core::fgl::GradedSeries| f.substitute(&images).unwrap();
        prop_assert_eq!(sub(&x.mul(&y).unwrap()), sub(&x).mul(&sub(&y)).unwrap());
        prop_assert_eq!(sub(&x.add(&z).unwrap()), sub(&x).add(&sub(&z)).unwrap());
        prop_assert_eq!(sub(&s.one()), s.one());
        // the variables substitute to themselves
        let vars: Vec<_> = (0..2).map(|i| s.variable(i)).collect();
        prop_assert_eq!(y.substitute(&vars).unwrap(), y);
    }

    #[test]
    fn linear_combination_has_the_expected_linear_part(coeffs in prop::collection::vec(-4i64..=4, 3)) {
        let s = SeriesSpace::new(universal(3), 3);
        let flc = s.formal_linear_combination(&big(&coeffs), &s.variables()).unwrap();
        prop_assert_eq!(flc.linear_part(), big(&coeffs));
    }

    #[test]
    fn linear_combination_ignores_fold_order(
        coeffs in prop::collection::vec(-3i64..=3, 3),
        perm in Just(vec![0usize, 1, 2]).prop_shuffle(),
    ) {
        let s = SeriesSpace::new(universal(3), 3);
        let vars = s.variables();
        let base = s.formal_linear_combination(&big(&coeffs), &vars).unwrap();
        let c2: Vec<i64> = perm.iter().map(|&i| coeffs[i]).collect();
        let v2: Vec<ChernElement> = perm.iter().map(|&i| vars[i].clone()).collect();
        prop_assert_eq!(s.formal_linear_combination(&big(&c2), &v2).unwrap(), base);
    }

    #[test]
    fn multiplicative_combination_matches_closed_form(coeffs in prop::collection::vec(-3i64..=3, 2)) {
        let ring = Arc::new(GradedRing::multiplicative(4));
        let s = SeriesSpace::new(ring, 2);
        let flc = s.formal_linear_combination(&big(&coeffs), &s.variables()).unwrap();
        let ours: Vec<(Vec<u32>, BigInt)> = flc.to_pairs().into_iter().map(|(m, c)| (m, c[0].clone())).collect();
        let expected: Vec<(Vec<u32>, BigInt)> = multiplicative_combination(&coeffs, 4).into_iter().collect();
        let mut ours = ours;
        ours.sort();
        prop_assert_eq!(ours, expected);
    }
}
