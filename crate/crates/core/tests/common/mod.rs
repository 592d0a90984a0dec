#![allow(dead_code)]

use std::f64::consts::TAU;

use hbd_core::disk::{Atom, BlaschkeProduct, LogModulus, SchurFunction, UnitCirclePoint};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

pub fn disk_point(rmax: f64) -> impl Strategy<Value = C64> {
    (0.0..1.0f64, 0.0..TAU).prop_map(move |(s, t)| C64::from_polar(rmax * s.sqrt(), t))
}

pub fn circle_point() -> impl Strategy<Value = UnitCirclePoint> {
    (0.0..TAU).prop_map(UnitCirclePoint::new)
}

pub fn coeffs(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b)), n)
}

pub fn blaschke(max_degree: usize, rmax: f64) -> impl Strategy<Value = BlaschkeProduct> {
    prop::collection::vec(disk_point(rmax), 1..=max_degree).prop_map(|z| BlaschkeProduct::new(z).unwrap())
}

pub fn atoms(max: usize) -> impl Strategy<Value = Vec<Atom>> {
    prop::collection::vec((0.0..TAU, 0.1..2.0f64), 1..=max)
        .prop_map(|v| v.into_iter().map(|(t, m)| Atom { angle: UnitCirclePoint::new(t), mass: m }).collect())
}

/// Rational log-modulus `|scale| <= prod (1 - |p|)`, so `|b| <= 1`.
pub fn rational_outer() -> impl Strategy<Value = LogModulus> {
    (prop::collection::vec(disk_point(0.9), 1..3), 0.3..1.0f64, 0.0..TAU).prop_map(|(poles, t, arg)| {
        let s: f64 = poles.iter().map(|p| 1.0 - p.norm()).product();
        LogModulus::Rational { scale: C64::from_polar(t * s, arg), poles }
    })
}

/// Inner functions: Blaschke, atomic singular, or their product.
pub fn inner() -> impl Strategy<Value = SchurFunction> {
    prop_oneof![
        blaschke(4, 0.95).prop_map(|b| SchurFunction { blaschke: Some(b), ..Default::default() }),
        atoms(2).prop_map(|a| SchurFunction::singular(a).unwrap()),
        (blaschke(3, 0.9), atoms(2))
            .prop_map(|(b, a)| SchurFunction::singular(a).unwrap().times(SchurFunction::blaschke(b.zeros().to_vec()).unwrap()).unwrap()),
    ]
}

/// Schur functions with closed-form factors.
pub fn schur() -> impl Strategy<Value = SchurFunction> {
    prop_oneof![
        inner(),
        (blaschke(3, 0.9), rational_outer())
            .prop_map(|(b, o)| SchurFunction::blaschke(b.zeros().to_vec()).unwrap().times(SchurFunction::outer(o).unwrap()).unwrap()),
        (-2.0..0.0f64).prop_map(|c| SchurFunction::outer(LogModulus::Constant(c)).unwrap()),
    ]
}
