mod common;

use common::*;
use hbd_core::dirichlet::{local_dirichlet_douglas, BoundaryMeasure};
use hbd_core::disk::{BlaschkeProduct, UnitCirclePoint};
use hbd_core::embedding::{
    embedding_constant, local_dirichlet_in_basis, operator_norm, quotient_operator_matrix, radial_path, ratio_sweep,
    separated_support_bound, v_mu_potential, KernelCombination, Potential,
};
use hbd_core::kernels::TakenakaBasis;
use hbd_core::QuadratureConfig;
use nalgebra::DVector;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn local_dirichlet_is_bounded_by_the_quotient_norm(b in blaschke(6, 0.9), zeta in circle_point(), cs in coeffs(6)) {
        let q = quotient_operator_matrix(&b, zeta).unwrap();
        let c = DVector::from_vec(cs[..b.degree()].to_vec());
        let d = local_dirichlet_in_basis(&q, &c);
        let n = operator_norm(&q.matrix);
        prop_assert!(d <= n * n * c.norm_squared() + 1e-6);
        let douglas = local_dirichlet_douglas(&TakenakaBasis::new(&b).unwrap().combination(c.as_slice()), zeta, &cfg())
            .unwrap()
            .value
            .as_f64();
        prop_assert!((douglas - d).abs() <= 1e-8 * d.max(1.0), "{douglas} vs {d}");
    }

    #[test]
    fn sweep_ratios_respect_both_bounds(b in schur(), zeta in circle_point(), offset in -0.3..0.3f64) {
        let target = UnitCirclePoint::new(zeta.angle() + offset);
        let s = ratio_sweep(&b, zeta, &radial_path(target, 8), &cfg()).unwrap();
        for p in &s.points {
            let r = p.ratio.as_f64();
            prop_assert!(p.lower <= r + 1e-6, "lower {} > ratio {r} at n={}", p.lower, p.n);
            if let Some(u) = p.upper {
                prop_assert!(r <= u + 1e-6, "ratio {r} > upper {u} at n={}", p.n);
            }
        }
    }

    #[test]
    fn potential_of_lebesgue_and_atoms(omega in disk_point(0.99), atoms in prop::collection::vec((0.0..std::f64::consts::TAU, 0.1..2.0f64), 1..4)) {
        let v = v_mu_potential(&BoundaryMeasure::lebesgue(1.0), omega, &cfg()).as_f64();
        prop_assert!((v - 1.0 / (1.0 - omega.norm_sqr())).abs() <= 1e-12 * v);
        let mu = BoundaryMeasure::atomic(&atoms);
        let want: f64 = atoms.iter().map(|&(t, m)| m / (C64::from_polar(1.0, t) - omega).norm_sqr()).sum();
        let got = v_mu_potential(&mu, omega, &cfg()).as_f64();
        prop_assert!((got - want).abs() <= 1e-12 * want);
        let on_atom = C64::from_polar(1.0, atoms[0].0);
        prop_assert_eq!(v_mu_potential(&mu, on_atom, &cfg()), Potential::Diverged);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn separated_support_bound_holds(
        atom in 0.0..std::f64::consts::TAU,
        mass in 0.2..2.0f64,
        gap in 0.5..std::f64::consts::PI,
        anchors in prop::collection::vec(disk_point(0.9), 1..4),
        cs in coeffs(3),
    ) {
        let u = hbd_core::disk::SchurFunction::singular(vec![hbd_core::disk::Atom { angle: UnitCirclePoint::new(atom), mass }]).unwrap();
        let mu = BoundaryMeasure::atomic(&[(atom + gap, 1.0), (atom - gap, 0.5)]);
        let f = KernelCombination { coeffs: cs[..anchors.len()].to_vec(), anchors };
        let r = separated_support_bound(&u, &mu, &f, &cfg()).unwrap();
        prop_assert!(r.holds, "lhs {} rhs {}", r.lhs, r.rhs);
    }
}

/// The embedding constant is the top Rayleigh quotient of
/// `(||f||^2 + D_zeta(f))/||f||^2` on `K_B`.
#[test]
fn embedding_constant_rayleigh_certificate() {
    let b = BlaschkeProduct::new(vec![C64::new(0.5, 0.0), C64::new(-0.5, 0.0)]).unwrap();
    let zeta = UnitCirclePoint::new(std::f64::consts::FRAC_PI_2);
    let constant = embedding_constant(&b, zeta).unwrap();
    let q = quotient_operator_matrix(&b, zeta).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut best: f64 = 0.0;
    for _ in 0..4000 {
        let c = DVector::from_fn(2, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let rq = 1.0 + local_dirichlet_in_basis(&q, &c) / c.norm_squared();
        assert!(rq <= constant * (1.0 + 1e-12), "{rq} > {constant}");
        best = best.max(rq);
    }
    assert!(best >= constant * (1.0 - 1e-3), "best sample {best} vs {constant}");
}
