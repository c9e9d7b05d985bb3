#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use fglfans_core::fan::Fan;
use fglfans_core::fgl::{ChernElement, GradedRing, GradedSeries, SeriesLayout, SeriesSpace};
use fglfans_core::intlin::IntMatrix;
use fglfans_core::lazard::{build_lazard, LazardRing};
use num_bigint::BigInt;
use proptest::prelude::*;

pub fn lazard(trunc: usize) -> &'static LazardRing {
    static RINGS: [OnceLock<LazardRing>; 6] = [const { OnceLock::new() }; 6];
    RINGS[trunc].get_or_init(|| build_lazard(trunc).unwrap())
}

pub fn universal(trunc: usize) -> Arc<GradedRing> {
    lazard(trunc).ring().clone()
}

pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Number of integer coordinates of a degree-`degree` series in `space`.
pub fn series_len(space: &SeriesSpace, degree: i64) -> usize {
    SeriesLayout::new(space, degree).dim()
}

pub fn series(space: &SeriesSpace, degree: i64, values: &[i64]) -> GradedSeries {
    SeriesLayout::new(space, degree).from_coords(&big(values))
}

pub fn chern(space: &SeriesSpace, values: &[i64]) -> ChernElement {
    ChernElement::new(series(space, 1, values)).unwrap()
}

/// Small coefficient vectors of the right length for `space` in `degree`.
pub fn coords(space: &SeriesSpace, degree: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, series_len(space, degree))
}

/// A unimodular matrix as a product of elementary moves: `(i, j, k)` adds
/// `k` times row `j` to row `i`, and `i == j` negates row `i`.
pub fn unimodular(n: usize, moves: &[(usize, usize, i64)]) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for &(i, j, k) in moves {
        let (i, j) = (i % n, j % n);
        let mut e = IntMatrix::identity(n);
        if i == j {
            e.set(i, i, BigInt::from(-1));
        } else {
            e.set(i, j, BigInt::from(k));
        }
        m = e.mul(&m);
    }
    m
}

pub fn moves() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 0..6)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// A two-dimensional strongly convex cone with primitive generators.
pub fn plane_cone() -> impl Strategy<Value = Fan> {
    ((-4i64..=4, -4i64..=4), (-4i64..=4, -4i64..=4))
        .prop_filter("primitive, independent", |&((a, b), (c, d))| {
            gcd(a, b) == 1 && gcd(c, d) == 1 && a * d - b * c != 0
        })
        .prop_map(|((a, b), (c, d))| Fan::from_i64(2, &[&[a, b], &[c, d]], &[&[0, 1]]).unwrap())
}

pub fn p2() -> Fan {
    Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]]).unwrap()
}

pub fn p1xp1() -> Fan {
    Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]).unwrap()
}

pub fn p123() -> Fan {
    Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-2, -3]], &[&[0, 1], &[1, 2], &[0, 2]]).unwrap()
}

pub fn quadric() -> Fan {
    Fan::from_i64(2, &[&[0, 1], &[2, -1]], &[&[0, 1]]).unwrap()
}

pub fn square() -> Fan {
    Fan::from_i64(3, &[&[1, 1, 1], &[1, -1, 1], &[-1, -1, 1], &[-1, 1, 1]], &[&[0, 1, 2, 3]]).unwrap()
}

pub fn planar_fans() -> Vec<Fan> {
    vec![p2(), p1xp1(), p123(), quadric()]
}
