mod common;

use common::*;
use hbd_core::disk::SchurFunction;
use hbd_core::spectrum::{boundary_spectrum, in_spectrum_sampled, sampled_resolution, SpectrumVerdict};
use proptest::prelude::*;

// deep enough that Blaschke zeros with |a| <= 0.95 read as Out
const DEPTH: usize = 32;

fn resolution(b: &SchurFunction) -> f64 {
    let atoms = b.singular.as_ref().map_or(0.0, |s| s.atoms().iter().map(|a| sampled_resolution(a.mass, DEPTH)).fold(0.0, f64::max));
    atoms.max(2f64.powi(-(DEPTH as i32) + 2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn sampled_verdicts_agree_with_structure(b in schur(), ts in prop::collection::vec(0.0..std::f64::consts::TAU, 50)) {
        let sigma = boundary_spectrum(&b).unwrap();
        let res = resolution(&b);
        for t in ts {
            let s = in_spectrum_sampled(&b, hbd_core::disk::UnitCirclePoint::new(t), DEPTH).unwrap();
            match s.verdict {
                SpectrumVerdict::In => prop_assert!(sigma.distance_to(t) <= res, "In at {t}, distance {}", sigma.distance_to(t)),
                SpectrumVerdict::Out => prop_assert!(!sigma.closure_contains(t), "Out at {t} inside the closed set"),
                SpectrumVerdict::Undecided => {
                    prop_assert!(sigma.distance_to_edge(t) <= res, "Undecided at {t}, edge distance {}", sigma.distance_to_edge(t))
                }
            }
        }
    }

    #[test]
    fn inner_spectra_are_closed(u in inner()) {
        prop_assert!(!boundary_spectrum(&u).unwrap().closure);
    }

    #[test]
    fn product_spectrum_is_the_union(a in schur(), b in inner(), ts in prop::collection::vec(0.0..std::f64::consts::TAU, 64)) {
        let joint = boundary_spectrum(&a.clone().times(b.clone()).unwrap()).unwrap();
        let union = boundary_spectrum(&a).unwrap().union(boundary_spectrum(&b).unwrap());
        for t in ts {
            prop_assert_eq!(joint.contains(t), union.contains(t), "at {}", t);
        }
    }
}
