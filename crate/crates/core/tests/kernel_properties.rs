mod common;

use common::*;
use hbd_core::dirichlet::h2_norm_sq;
use hbd_core::disk::{AnalyticFunction, SchurFunction};
use hbd_core::kernels::{
    compressed_shift_matrix, dbr_kernel_eval, dbr_kernel_norm_sq, eigenvalues, gram_in_hb, gram_szego,
    multiset_distance, quotient_identity_residual, TakenakaBasis,
};
use hbd_core::QuadratureConfig;
use nalgebra::DVector;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn kernel_diagonal_is_the_norm(b in schur(), omega in disk_point(0.95)) {
        prop_assert_eq!(dbr_kernel_eval(&b, omega, omega).unwrap().re, dbr_kernel_norm_sq(&b, omega).unwrap());
    }

    #[test]
    fn quotient_identity_holds(b in inner(), omega in disk_point(0.9), zeta in circle_point(), z in disk_point(0.9)) {
        // the identity needs a unimodular boundary value at zeta
        let r = quotient_identity_residual(&b, omega, zeta, z);
        prop_assume!(r.is_ok());
        let r = r.unwrap();
        prop_assert!(r <= 1e-10, "residual {r}");
    }

    #[test]
    fn hb_gram_is_positive_semidefinite(b in schur(), anchors in prop::collection::vec(disk_point(0.95), 1..=6)) {
        let g = gram_in_hb(&b, &anchors).unwrap();
        prop_assert!(g.hermitian_defect() <= 1e-12);
        prop_assert!(g.min_eigenvalue() >= -1e-10, "min eigenvalue {}", g.min_eigenvalue());
    }

    #[test]
    fn compressed_shift_eigenvalues_are_conjugated_zeros(b in blaschke(6, 0.9)) {
        let ev = eigenvalues(&compressed_shift_matrix(&b).unwrap());
        let conj: Vec<C64> = b.zeros().iter().map(|a| a.conj()).collect();
        prop_assert!(multiset_distance(&ev, &conj) <= 1e-8);
    }

    #[test]
    fn takenaka_basis_is_orthonormal(b in blaschke(6, 0.9)) {
        let g = TakenakaBasis::new(&b).unwrap().boundary_gram();
        let id = nalgebra::DMatrix::<C64>::identity(g.dim(), g.dim());
        prop_assert!((&g.entries - id).camax() <= 1e-10);
    }

    #[test]
    fn szego_gram_norm_matches_boundary_quadrature(anchors in prop::collection::vec(disk_point(0.9), 1..=5), cs in coeffs(5)) {
        let cs = &cs[..anchors.len()];
        let g = gram_szego(&anchors);
        let want = g.quadratic_form(&DVector::from_vec(cs.to_vec()));
        let f = AnalyticFunction::sum(
            anchors.iter().zip(cs).map(|(&a, &c)| (c, AnalyticFunction::szego(a).unwrap())).collect(),
        );
        let got = h2_norm_sq(&f, &QuadratureConfig::default()).unwrap();
        prop_assert!((got - want).abs() <= 1e-8 * want.max(1.0), "{got} vs {want}");
    }

    #[test]
    fn kernel_norm_of_blaschke_matches_takenaka_coordinates(b in blaschke(6, 0.9), omega in disk_point(0.95)) {
        let u = SchurFunction { blaschke: Some(b.clone()), ..Default::default() };
        let basis = TakenakaBasis::new(&b).unwrap();
        let coords = basis.kernel_coordinates(omega).norm_squared();
        let closed = dbr_kernel_norm_sq(&u, omega).unwrap();
        prop_assert!((coords - closed).abs() <= 1e-9 * closed);
    }
}
