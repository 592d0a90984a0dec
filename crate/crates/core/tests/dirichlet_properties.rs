mod common;

use common::*;
use hbd_core::dirichlet::{
    area_dirichlet, h2_norm_sq, local_dirichlet_area, local_dirichlet_decomposition, local_dirichlet_douglas,
    weighted_dirichlet, BoundaryMeasure, DirichletMethod, HyperbolicWeight,
};
use hbd_core::disk::AnalyticFunction;
use hbd_core::kernels::TakenakaBasis;
use hbd_core::QuadratureConfig;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

/// Rational test functions: polynomials, Szegő kernels, Takenaka combinations.
fn rational_function() -> impl Strategy<Value = AnalyticFunction> {
    prop_oneof![
        (1usize..6).prop_flat_map(coeffs).prop_map(AnalyticFunction::polynomial),
        disk_point(0.85).prop_map(|a| AnalyticFunction::szego(a).unwrap()),
        blaschke(3, 0.8).prop_flat_map(|b| {
            let n = b.degree();
            coeffs(n).prop_map(move |c| TakenakaBasis::new(&b).unwrap().combination(&c))
        }),
    ]
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn routes_agree(f in rational_function(), zeta in circle_point()) {
        let cfg = QuadratureConfig { rel_tol: 1e-6, ..cfg() };
        let a = local_dirichlet_area(&f, zeta, &cfg).unwrap().value.as_f64();
        let d = local_dirichlet_douglas(&f, zeta, &cfg).unwrap().value.as_f64();
        let q = local_dirichlet_decomposition(&f, zeta, &cfg).unwrap().value.as_f64();
        let tol = (1e-3 * d).max(1e-4);
        prop_assert!((a - d).abs() <= tol && (q - d).abs() <= tol && (a - q).abs() <= tol, "{a} {d} {q}");
    }

    #[test]
    fn constants_are_annihilated(f in rational_function(), zeta in circle_point(), alpha in disk_point(3.0), beta in disk_point(3.0)) {
        let g = AnalyticFunction::sum(vec![(alpha, f.clone()), (beta, AnalyticFunction::constant(one()))]);
        let dg = local_dirichlet_douglas(&g, zeta, &cfg()).unwrap().value.as_f64();
        let df = local_dirichlet_douglas(&f, zeta, &cfg()).unwrap().value.as_f64();
        let a2 = alpha.norm_sqr();
        prop_assert!((dg - a2 * df).abs() <= 1e-8 * a2.max(1e-300) * df.max(1.0), "{dg} vs {}", a2 * df);
    }

    #[test]
    fn monotone_in_the_measure(
        f in rational_function(),
        atoms in prop::collection::vec((0.0..std::f64::consts::TAU, 0.0..2.0f64, 0.0..1.0f64), 1..4),
    ) {
        let small: Vec<(f64, f64)> = atoms.iter().map(|&(t, m, _)| (t, m + 1e-3)).collect();
        let large: Vec<(f64, f64)> = atoms.iter().map(|&(t, m, e)| (t, m + 1e-3 + e)).collect();
        let d1 = weighted_dirichlet(&f, &BoundaryMeasure::atomic(&small), &cfg()).unwrap().value.as_f64();
        let d2 = weighted_dirichlet(&f, &BoundaryMeasure::atomic(&large), &cfg()).unwrap().value.as_f64();
        prop_assert!(d1 <= d2 + 1e-10, "{d1} > {d2}");
    }

    #[test]
    fn littlewood_paley(f in rational_function()) {
        let lhs = area_dirichlet(&f, &HyperbolicWeight, DirichletMethod::Area, &cfg()).unwrap().value.as_f64();
        let f0 = f.eval(C64::new(0.0, 0.0)).unwrap();
        let centered = AnalyticFunction::sum(vec![(one(), f.clone()), (-f0, AnalyticFunction::constant(one()))]);
        let rhs = 2.0 * h2_norm_sq(&centered, &cfg()).unwrap();
        prop_assert!(lhs <= rhs + 1e-6, "{lhs} > {rhs}");
    }
}
