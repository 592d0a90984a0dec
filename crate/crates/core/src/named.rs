//! Built-in functions and measures referenced by name from configs.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::carleson::{DiskMeasure, RadialSegment};
use crate::disk::{AnalyticFunction, Atom, LogModulus, NamedLogModulus, SchurFunction, UnitCirclePoint};
use crate::error::{HbdError, Result};

/// `w0 = (3 - sqrt 5)/2`, the root of `(1 - w)^2 = w` in `(0, 1)`.
pub fn w0() -> f64 {
    (3.0 - 5f64.sqrt()) / 2.0
}

/// `b_zeta(z) = (1 - w0) conj(zeta) z / (1 - w0 conj(zeta) z)`.
pub fn example1_b(zeta: UnitCirclePoint) -> SchurFunction {
    let w = w0();
    let z = zeta.point();
    let outer = LogModulus::Rational { scale: z.conj() * (1.0 - w), poles: vec![z * w] };
    SchurFunction::blaschke(vec![C64::new(0.0, 0.0)])
        .and_then(|b| b.times(SchurFunction::outer(outer)?))
        .expect("valid by construction")
}

/// Outer function with `log|b2| = log sqrt(1 - |1 - lambda|^{3/2})` on
/// `|arg lambda| <= pi/6` and `0` elsewhere.
pub fn example2_b2() -> SchurFunction {
    SchurFunction::outer(LogModulus::Named(NamedLogModulus::Example2Phi)).expect("valid by construction")
}

/// Density `1/sqrt(1 - s)` on the segment `[0, 1)`.
pub fn example4_nu() -> DiskMeasure {
    DiskMeasure { segments: vec![RadialSegment { angle: 0.0, terms: vec![(1.0, -0.5)] }], ..Default::default() }
}

/// `(z - 1)/(z + 1)^{1/3}`.
pub fn example4_phi() -> AnalyticFunction {
    AnalyticFunction::product(vec![
        AnalyticFunction::real_polynomial(&[-1.0, 1.0]),
        AnalyticFunction::power(C64::new(1.0, 0.0), -1.0 / 3.0).expect("shift 1 is off the branch cut"),
    ])
}

/// `exp(-(1 + z)/(1 - z))`.
pub fn singular_at_1() -> SchurFunction {
    SchurFunction::singular(vec![Atom { angle: 0.0.into(), mass: 1.0 }]).expect("valid by construction")
}

#[derive(Debug, Clone)]
pub enum NamedObject {
    Schur(SchurFunction),
    Function(AnalyticFunction),
    Measure(DiskMeasure),
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: &'static str,
    pub description: &'static str,
    pub facts: serde_json::Value,
}

pub const NAMES: [&str; 5] = ["example1-b", "example2-b2", "example4-nu", "example4-phi", "singular-at-1"];

pub fn lookup(name: &str) -> Result<NamedObject> {
    Ok(match name {
        "example1-b" => NamedObject::Schur(example1_b(UnitCirclePoint::new(0.0))),
        "example2-b2" => NamedObject::Schur(example2_b2()),
        "example4-nu" => NamedObject::Measure(example4_nu()),
        "example4-phi" => NamedObject::Function(example4_phi()),
        "singular-at-1" => NamedObject::Schur(singular_at_1()),
        _ => {
            return Err(HbdError::Config {
                field: "name".into(),
                message: format!("unknown named object {name:?}; known: {}", NAMES.join(", ")),
            })
        }
    })
}

pub fn catalog() -> Vec<CatalogEntry> {
    use serde_json::json;
    vec![
        CatalogEntry {
            name: "example1-b",
            kind: "schur",
            description: "(1-w0) z/(1-w0 z): H(b) = D_1 with equal norms; spectrum is the circle minus {1}",
            facts: json!({ "w0": w0(), "zeta": 0.0 }),
        },
        CatalogEntry {
            name: "example2-b2",
            kind: "schur",
            description: "outer with 1-|b2|^2 = |1-lambda|^{3/2} on |arg lambda| < pi/6; H(b2) is not inside D_1",
            facts: json!({ "arcHalfWidth": std::f64::consts::FRAC_PI_6, "excludedPoint": 0.0 }),
        },
        CatalogEntry {
            name: "example4-nu",
            kind: "disk-measure",
            description: "density 1/sqrt(1-s) on [0,1): not Carleson for H2, but |z-1|^2 dnu is",
            facts: json!({ "boxFormula": "2*sqrt(delta)", "reweightedBoxFormula": "(2/5)*delta^(5/2)" }),
        },
        CatalogEntry {
            name: "example4-phi",
            kind: "function",
            description: "(z-1)/(z+1)^{1/3}: unbounded multiplier from K_B into D_1",
            facts: json!({ "zeta": 0.0, "unboundedNear": std::f64::consts::PI }),
        },
        CatalogEntry {
            name: "singular-at-1",
            kind: "schur",
            description: "atomic singular inner function exp(-(1+z)/(1-z))",
            facts: json!({ "atoms": [[0.0, 1.0]] }),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_contents() {
        let c = catalog();
        assert!(!c.is_empty());
        let e1 = c.iter().find(|e| e.name == "example1-b").unwrap();
        assert!((e1.facts["w0"].as_f64().unwrap() - 0.381966).abs() < 1e-6);
        let nu = c.iter().find(|e| e.name == "example4-nu").unwrap();
        assert_eq!(nu.facts["boxFormula"], "2*sqrt(delta)");
        for n in NAMES {
            lookup(n).unwrap();
        }
        assert!(lookup("nope").is_err());
    }

    #[test]
    fn example1_matches_closed_form() {
        let w = w0();
        assert!(((1.0 - w).powi(2) - w).abs() < 1e-15);
        let zeta = UnitCirclePoint::new(0.7);
        let b = example1_b(zeta);
        for z in [C64::new(0.3, -0.2), C64::new(-0.6, 0.5)] {
            let s = zeta.point().conj();
            let want = (1.0 - w) * s * z / (1.0 - w * s * z);
            assert!((b.eval(z).unwrap() - want).norm() < 1e-14);
        }
    }
}
