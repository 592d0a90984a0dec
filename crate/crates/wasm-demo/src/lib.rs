//! Browser bindings. Each exported function has a plain-Rust twin returning
//! `Result<String, String>` so the logic runs (and is tested) natively.

use hbd_core::carleson::{carleson_constant_h2, dyadic_grid, is_carleson_for_dz};
use hbd_core::dirichlet::{local_dirichlet_decomposition, local_dirichlet};
use hbd_core::disk::{AnalyticFunction, SchurFunction, UnitCirclePoint};
use hbd_core::embedding::{radial_path, ratio_sweep};
use hbd_core::named::{self, NamedObject};
use hbd_core::QuadratureConfig;
use num_complex::Complex64 as C64;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn named_schur(name: &str) -> Result<SchurFunction, String> {
    match named::lookup(name).map_err(|e| e.to_string())? {
        NamedObject::Schur(b) => Ok(b),
        _ => Err(format!("{name} is not a Schur function")),
    }
}

/// `D_zeta(k^b_omega)` for a named `b`, by the boundary and difference-quotient routes.
pub fn kernel_dirichlet(name: &str, re: f64, im: f64, zeta: f64) -> Result<String, String> {
    let b = named_schur(name)?;
    let k = AnalyticFunction::dbr_kernel(b, C64::new(re, im)).map_err(|e| e.to_string())?;
    let cfg = QuadratureConfig { rel_tol: 1e-8, ..Default::default() };
    let z = UnitCirclePoint::new(zeta);
    let douglas = local_dirichlet(&k, z, &cfg).map_err(|e| e.to_string())?;
    let decomposition = local_dirichlet_decomposition(&k, z, &cfg).map_err(|e| e.to_string())?;
    Ok(json!({ "douglas": douglas.to_json(), "decomposition": decomposition.to_json() }).to_string())
}

/// Ratio sweep CSV along the radius towards `zeta`.
pub fn sweep_csv(name: &str, zeta: f64, levels: usize) -> Result<String, String> {
    if !(1..=30).contains(&levels) {
        return Err("levels must be between 1 and 30".into());
    }
    let b = named_schur(name)?;
    let z = UnitCirclePoint::new(zeta);
    let s = ratio_sweep(&b, z, &radial_path(z, levels), &QuadratureConfig::default()).map_err(|e| e.to_string())?;
    Ok(s.csv())
}

/// Box ratios of the radial example measure, plain or reweighted by `|z - e^{i zeta}|^2`.
pub fn carleson_json(reweight: Option<f64>, levels: usize) -> Result<String, String> {
    if !(5..=40).contains(&levels) {
        return Err("levels must be between 5 and 40".into());
    }
    let nu = named::example4_nu();
    let grid = dyadic_grid(levels);
    let cfg = QuadratureConfig::default();
    let c = match reweight {
        Some(z) => is_carleson_for_dz(&nu, UnitCirclePoint::new(z), &grid, &cfg),
        None => carleson_constant_h2(&nu, &grid, &cfg),
    }
    .map_err(|e| e.to_string())?;
    Ok(c.to_json().to_string())
}

#[wasm_bindgen(js_name = kernelDirichlet)]
pub fn kernel_dirichlet_js(name: &str, re: f64, im: f64, zeta: f64) -> Result<String, JsError> {
    kernel_dirichlet(name, re, im, zeta).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = sweepCsv)]
pub fn sweep_csv_js(name: &str, zeta: f64, levels: usize) -> Result<String, JsError> {
    sweep_csv(name, zeta, levels).map_err(|e| JsError::new(&e))
}

/// `reweight` is an angle, or NaN for the unweighted measure.
#[wasm_bindgen(js_name = carlesonJson)]
pub fn carleson_json_js(reweight: f64, levels: usize) -> Result<String, JsError> {
    carleson_json(if reweight.is_nan() { None } else { Some(reweight) }, levels).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_routes_agree() {
        let v: serde_json::Value = serde_json::from_str(&kernel_dirichlet("example1-b", 0.3, 0.2, 1.0).unwrap()).unwrap();
        let a = v["douglas"]["value"].as_f64().unwrap();
        let b = v["decomposition"]["value"].as_f64().unwrap();
        assert!((a - b).abs() <= 1e-6 * a);
        assert!(kernel_dirichlet("example4-nu", 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn sweep_has_header_and_rows() {
        let csv = sweep_csv("example1-b", 0.5, 6).unwrap();
        assert!(csv.starts_with("# hbd ratio-sweep v1\n"));
        assert_eq!(csv.lines().count(), 8);
        assert!(sweep_csv("example1-b", 0.5, 0).is_err());
    }

    #[test]
    fn carleson_verdicts() {
        let plain: serde_json::Value = serde_json::from_str(&carleson_json(None, 30).unwrap()).unwrap();
        assert_eq!(plain["carleson"], "unbounded");
        let reweighted: serde_json::Value = serde_json::from_str(&carleson_json(Some(0.0), 30).unwrap()).unwrap();
        assert_eq!(reweighted["carleson"], true);
    }
}
