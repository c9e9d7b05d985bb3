mod common;

use std::sync::Arc;

use common::*;
use fglfans_core::fan::{CenterOrder, Fan};
use fglfans_core::intlin::{int_vector, primitive_part};
use num_bigint::BigInt;
use proptest::prelude::*;

fn check_faces_and_stars(f: &Fan) -> Result<(), TestCaseError> {
    for sigma in 0..f.num_cones() {
        for rho in 0..f.num_cones() {
            let in_star = f.star(rho).contains(&sigma);
            prop_assert_eq!(in_star, f.cone(sigma).faces.contains(&rho));
            prop_assert_eq!(in_star, f.is_face(rho, sigma));
        }
        // every face of a cone is itself a cone with the expected rays
        for &tau in &f.cone(sigma).faces {
            prop_assert!(f.cone(tau).rays.iter().all(|r| f.cone(sigma).rays.contains(r)));
        }
    }
    Ok(())
}

/// A simplicial three-dimensional cone with small multiplicity.
fn space_cone() -> impl Strategy<Value = Fan> {
    prop::collection::vec(prop::collection::vec(-2i64..=2, 3), 3)
        .prop_filter_map("primitive, independent, small multiplicity", |rows| {
            let rays: Vec<Vec<BigInt>> = rows.iter().map(|r| big(r)).collect();
            if rays.iter().any(|r| primitive_part(r) != *r) {
                return None;
            }
            let m = fglfans_core::intlin::IntMatrix::from_rows(3, &rays);
            let det = m.determinant();
            if det == BigInt::from(0) || det.magnitude() > &num_bigint::BigUint::from(6u32) {
                return None;
            }
            Fan::new(3, rays, vec![vec![0, 1, 2]]).ok()
        })
}

fn resolves_to_smooth(f: Fan) -> Result<(), TestCaseError> {
    let f = Arc::new(f);
    for order in [CenterOrder::Forward, CenterOrder::Reverse] {
        let steps = f.resolve(order).unwrap();
        let mut current = f.clone();
        for s in &steps {
            prop_assert!(Arc::ptr_eq(&s.target, &current) || *s.target == *current);
            prop_assert!(s.verify());
            prop_assert!(s.source.maximal_cones().len() > s.target.maximal_cones().len());
            current = s.source.clone();
        }
        prop_assert!(current.is_smooth());
        prop_assert_eq!(steps.is_empty(), f.is_smooth());
        check_faces_and_stars(&current)?;
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn plane_cones_resolve(f in plane_cone()) {
        resolves_to_smooth(f)?;
    }

    #[test]
    fn space_cones_resolve(f in space_cone()) {
        resolves_to_smooth(f)?;
    }

    #[test]
    fn transformed_fans_stay_consistent(which in 0usize..4, mv in moves()) {
        let f = planar_fans().swap_remove(which);
        let g = f.transform(&unimodular(2, &mv)).unwrap();
        check_faces_and_stars(&g)?;
        prop_assert_eq!(g.num_cones(), f.num_cones());
        prop_assert_eq!(g.is_smooth(), f.is_smooth());
        let back = g.transform(&fglfans_core::intlin::unimodular_inverse(&unimodular(2, &mv)).unwrap()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn star_subdivisions_refine(which in 0usize..4, a in 0i64..=3, b in 0i64..=3) {
        let f = Arc::new(planar_fans().swap_remove(which));
        // a nonnegative combination of the rays of the first maximal cone
        let sigma = f.maximal_cones()[0];
        let (r0, r1) = (f.ray(f.cone(sigma).rays[0]).clone(), f.ray(f.cone(sigma).rays[1]).clone());
        let v: Vec<BigInt> = r0.iter().zip(&r1).map(|(x, y)| x * a + y * b).collect();
        prop_assume!(v.iter().any(|x| *x != BigInt::from(0)));
        let v = primitive_part(&v);
        prop_assume!(f.ray_index(&v).is_none());
        let map = f.star_subdivision(&v).unwrap();
        prop_assert!(map.verify());
        check_faces_and_stars(&map.source)?;
        let c = map.center.unwrap();
        prop_assert!(f.cone(c.pi).geometry.contains_in_relative_interior(&v));
        prop_assert_eq!(map.source.cone(c.rho).rays.len(), 1);
        prop_assert_eq!(map.source.rays().len(), f.rays().len() + 1);
    }
}

#[test]
fn square_cone_needs_several_steps() {
    let f = Arc::new(square());
    assert!(!f.is_simplicial());
    let steps = f.resolve(CenterOrder::Forward).unwrap();
    assert!(steps.len() >= 2);
    assert!(steps.last().unwrap().source.is_smooth());
    assert_eq!(f.star_subdivision(&int_vector(&[0, 0, 1])).unwrap().source.maximal_cones().len(), 4);
}
