mod common;

use std::sync::Arc;

use common::*;
use fglfans_core::descent::{compute_via_resolution, pullback_is_injective, DescentSquare};
use fglfans_core::fan::{CenterOrder, Fan};
use fglfans_core::fgl::GradedRing;
use fglfans_core::intlin::primitive_part;
use fglfans_core::oracles::{multiplicative_combination, pp_global_sections};
use fglfans_core::pps::{PiecewiseSeries, PpsSheaf};
use num_bigint::BigInt;
use proptest::prelude::*;

fn ranks(f: &Fan, ring: &Arc<GradedRing>, degrees: std::ops::RangeInclusive<i64>) -> Vec<usize> {
    let sheaf = PpsSheaf::new(Arc::new(f.clone()), ring.clone()).unwrap();
    degrees.map(|d| sheaf.global_sections(0, d).unwrap().rank()).collect()
}

fn combination(basis: &[PiecewiseSeries], coeffs: &[i64]) -> Option<PiecewiseSeries> {
    let mut acc: Option<PiecewiseSeries> = None;
    for (b, &c) in basis.iter().zip(coeffs) {
        let term = b.map_coefficients(b.values.values().next()?.ring(), |e| {
            fglfans_core::fgl::RingElement::new(e.weight, e.coords.iter().map(|x| x * c).collect())
        });
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term).unwrap(),
        });
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn restrictions_compose(f in plane_cone()) {
        let f = Arc::new(f);
        let sheaf = PpsSheaf::new(f.clone(), universal(3)).unwrap();
        for sigma in 0..f.num_cones() {
            for &tau in &f.cone(sigma).faces {
                for &rho in &f.cone(tau).faces {
                    let st = sheaf.restriction(sigma, tau).unwrap();
                    let tr = sheaf.restriction(tau, rho).unwrap();
                    let sr = sheaf.restriction(sigma, rho).unwrap();
                    for d in -1..=2 {
                        prop_assert_eq!(tr.matrix(d).mul(&st.matrix(d)), sr.matrix(d));
                    }
                }
            }
            prop_assert!(sheaf.restriction(sigma, sigma).unwrap().matrix(1).is_identity());
        }
    }

    #[test]
    fn restriction_images_match_the_multiplicative_closed_form(f in plane_cone()) {
        let f = Arc::new(f);
        let sheaf = PpsSheaf::new(f.clone(), Arc::new(GradedRing::multiplicative(4))).unwrap();
        let sigma = f.maximal_cones()[0];
        for &tau in &f.cone(sigma).faces {
            let r = sheaf.restriction(sigma, tau).unwrap();
            for (i, img) in r.images().iter().enumerate() {
                let row: Vec<i64> = r.coefficients().row(i).iter().map(|x| i64::try_from(x).unwrap()).collect();
                let mut ours: Vec<(Vec<u32>, BigInt)> =
                    img.to_pairs().into_iter().map(|(m, c)| (m, c[0].clone())).collect();
                ours.sort();
                let expected: Vec<(Vec<u32>, BigInt)> = multiplicative_combination(&row, 4).into_iter().collect();
                prop_assert_eq!(ours, expected);
            }
        }
    }

    #[test]
    fn ranks_do_not_depend_on_the_lattice_basis(which in 0usize..4, mv in moves()) {
        let f = planar_fans().swap_remove(which);
        let g = f.transform(&unimodular(2, &mv)).unwrap();
        for ring in [universal(2), Arc::new(GradedRing::multiplicative(2))] {
            prop_assert_eq!(ranks(&f, &ring, -1..=2), ranks(&g, &ring, -1..=2));
        }
    }

    #[test]
    fn square_ranks_do_not_depend_on_the_lattice_basis(mv in moves()) {
        let f = square();
        let g = f.transform(&unimodular(3, &mv)).unwrap();
        let ring = universal(2);
        prop_assert_eq!(ranks(&f, &ring, 0..=2), ranks(&g, &ring, 0..=2));
    }

    #[test]
    fn additive_ranks_match_the_oracle(f in plane_cone(), which in 0usize..4, mv in moves()) {
        let ring = Arc::new(GradedRing::additive(3));
        let g = planar_fans().swap_remove(which).transform(&unimodular(2, &mv)).unwrap();
        for fan in [f, g] {
            let ours = ranks(&fan, &ring, 0..=3);
            let oracle: Vec<usize> = (0..=3).map(|d| pp_global_sections(&fan, d).rank).collect();
            prop_assert_eq!(ours, oracle);
        }
    }

    #[test]
    fn sections_are_closed_under_products(which in 0usize..4, a in prop::collection::vec(-2i64..=2, 12), b in prop::collection::vec(-2i64..=2, 12)) {
        let f = Arc::new(planar_fans().swap_remove(which));
        let sheaf = PpsSheaf::new(f, universal(3)).unwrap();
        let m1 = sheaf.global_sections(0, 1).unwrap();
        let m0 = sheaf.global_sections(0, 0).unwrap();
        let (p, q) = (combination(&m1.basis(), &a).unwrap(), combination(&m0.basis(), &b).unwrap());
        prop_assert!(sheaf.is_global_section(&p).unwrap());
        let pq = sheaf.multiply(&p, &q).unwrap();
        prop_assert!(sheaf.is_global_section(&pq).unwrap());
        prop_assert!(sheaf.global_sections(0, 1).unwrap().contains(&pq).unwrap());
        let pp = sheaf.multiply(&p, &p).unwrap();
        prop_assert!(sheaf.global_sections(0, 2).unwrap().contains(&pp).unwrap());
    }

    #[test]
    fn pullbacks_are_injective_and_squares_cartesian(f in plane_cone(), a in 1i64..=3, b in 1i64..=3) {
        let f = Arc::new(f);
        let ring = universal(2);
        let sigma = f.maximal_cones()[0];
        let (r0, r1) = (f.ray(f.cone(sigma).rays[0]).clone(), f.ray(f.cone(sigma).rays[1]).clone());
        let v = primitive_part(&r0.iter().zip(&r1).map(|(x, y)| x * a + y * b).collect::<Vec<_>>());
        let map = f.star_subdivision(&v).unwrap();
        let square = DescentSquare::new(map.clone(), ring.clone()).unwrap();
        for d in -1..=2 {
            prop_assert!(pullback_is_injective(&map, &ring, d).unwrap());
            let r = square.check_cartesian(d).unwrap();
            prop_assert!(r.cartesian, "{:?}", r);
        }
    }

    #[test]
    fn resolution_routes_agree(f in plane_cone()) {
        let f = Arc::new(f);
        let ring = universal(2);
        for order in [CenterOrder::Forward, CenterOrder::Reverse] {
            for d in 0..=1 {
                let r = compute_via_resolution(&f, d, &ring, order).unwrap();
                prop_assert!(r.agree);
                prop_assert_eq!(r.descended.rank(), r.direct.rank());
            }
        }
    }
}
