//! Scenario execution and artifact writing.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hbd_core::carleson::{carleson_constant_h2, dyadic_grid, is_carleson_for_dz, is_multiplier_ku_to_dz, is_multiplier_of_dz};
use hbd_core::dirichlet::{
    local_dirichlet_area, local_dirichlet_decomposition, local_dirichlet_douglas, weighted_dirichlet,
    weighted_dirichlet_disintegration, DirichletResult, DirichletValue,
};
use hbd_core::disk::UnitCirclePoint;
use hbd_core::embedding::{dv_json, fmt_num, radial_path, ratio_sweep, EmbeddingReport, EmbeddingVerdict};
use hbd_core::{HbdError, QuadratureConfig};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Config, Scenario, ScenarioKind};
use crate::suites::{run_suite, Suite};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn assertion(name: &str, pass: bool, detail: String) -> Assertion {
    Assertion { name: name.into(), pass, detail }
}

/// Result of one scenario: data for the artifact plus assertions.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: Value,
    pub csv: String,
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioReport {
    pub id: String,
    pub kind: ScenarioKind,
    pub artifact: Option<String>,
    pub wall_seconds: f64,
    pub assertions: Vec<Assertion>,
    pub error: Option<String>,
    pub result: Value,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.assertions.iter().all(|a| a.pass)
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub version: &'static str,
    pub seed: u64,
    pub scenarios: Vec<ScenarioReport>,
    pub summary: Summary,
    pub config: Config,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub scenarios: usize,
    pub passed: usize,
    pub failed: usize,
    pub all_pass: bool,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.summary.all_pass
    }
}

/// Write `contents` next to `path` and rename into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("artifact");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(|e| CliError::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Run every scenario, write artifacts and `report.json` into `out`.
pub fn run_config(cfg: &Config, out: &Path, format: Format) -> Result<RunReport, CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let mut reports = Vec::new();
    for (i, s) in cfg.scenarios.iter().enumerate() {
        let start = Instant::now();
        let outcome = run_scenario(s, &format!("scenarios[{i}]"), cfg);
        let wall_seconds = start.elapsed().as_secs_f64();
        let report = match outcome {
            Ok(o) => {
                let path: PathBuf = out.join(format!("{}.{}", s.stem(), format.ext()));
                let body = match format {
                    Format::Csv => o.csv,
                    Format::Json => {
                        let mut text = serde_json::to_string_pretty(&o.result).expect("values serialize");
                        text.push('\n');
                        text
                    }
                };
                write_atomic(&path, &body)?;
                ScenarioReport {
                    id: s.id.clone(),
                    kind: s.kind,
                    artifact: Some(path.file_name().unwrap().to_string_lossy().into_owned()),
                    wall_seconds,
                    assertions: o.assertions,
                    error: None,
                    result: o.result,
                }
            }
            Err(CliError::Config { field, message }) => return Err(CliError::Config { field, message }),
            Err(e) => ScenarioReport {
                id: s.id.clone(),
                kind: s.kind,
                artifact: None,
                wall_seconds,
                assertions: Vec::new(),
                error: Some(format!("scenario {:?}: {e}", s.id)),
                result: Value::Null,
            },
        };
        reports.push(report);
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    let summary = Summary { scenarios: reports.len(), passed, failed: reports.len() - passed, all_pass: passed == reports.len() };
    let report = RunReport { version: "hbd-run v1", seed: cfg.seed, scenarios: reports, summary, config: cfg.clone() };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    write_atomic(&out.join("report.json"), &text)?;
    Ok(report)
}

pub fn run_scenario(s: &Scenario, field: &str, cfg: &Config) -> Result<Outcome, CliError> {
    let quad = s.quad(&cfg.quadrature);
    let step = match s.kind {
        ScenarioKind::Dirichlet => dirichlet(s, field, &quad),
        ScenarioKind::Sweep => sweep(s, field, &quad),
        ScenarioKind::Embedding => embedding(s, field, &quad),
        ScenarioKind::Carleson => carleson(s, field, &quad),
        ScenarioKind::Multiplier => multiplier(s, field, &quad),
        ScenarioKind::Verify => {
            let name = s.suite.as_deref().unwrap_or_default();
            let suite = Suite::from_name(name).ok_or_else(|| CliError::Config {
                field: format!("{field}.suite"),
                message: format!("unknown suite {name:?}"),
            })?;
            Ok(verify_outcome(suite, cfg.seed, &quad))
        }
    };
    // input errors keep their field; numerical errors become compute errors
    step.map_err(|e| match e {
        StepError::Config(c) => c,
        StepError::Core(e) => CliError::Compute(e.to_string()),
    })
}

pub enum StepError {
    Config(CliError),
    Core(HbdError),
}

impl From<CliError> for StepError {
    fn from(e: CliError) -> Self {
        StepError::Config(e)
    }
}

impl From<HbdError> for StepError {
    fn from(e: HbdError) -> Self {
        StepError::Core(e)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn agreement(values: &[(&str, DirichletValue)]) -> Assertion {
    let finite: Vec<f64> = values.iter().filter_map(|(_, v)| v.finite()).collect();
    if finite.is_empty() {
        return assertion("routes-agree", true, "all routes diverge".into());
    }
    if finite.len() != values.len() {
        return assertion("routes-agree", false, "some routes diverge, others do not".into());
    }
    let reference = finite[0];
    let tol = (1e-3 * reference.abs()).max(1e-4);
    let spread = finite.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - finite.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    assertion("routes-agree", spread <= tol, format!("spread {spread:.3e}, tolerance {tol:.3e}"))
}

fn dirichlet(s: &Scenario, field: &str, quad: &QuadratureConfig) -> Result<Outcome, StepError> {
    let f = s.function(field)?;
    let results: Vec<(&str, DirichletResult)> = if s.measure.is_some() {
        let mu = s.boundary_measure(field)?;
        vec![
            ("disintegration", weighted_dirichlet_disintegration(&f, &mu, quad)?),
            ("area", weighted_dirichlet(&f, &mu, quad)?),
        ]
    } else {
        let zeta = UnitCirclePoint::new(s.zeta.unwrap_or(0.0));
        vec![
            ("douglas", local_dirichlet_douglas(&f, zeta, quad)?),
            ("area", local_dirichlet_area(&f, zeta, quad)?),
            ("decomposition", local_dirichlet_decomposition(&f, zeta, quad)?),
        ]
    };
    let values: Vec<(&str, DirichletValue)> = results.iter().map(|(n, r)| (*n, r.value)).collect();
    let mut assertions = vec![agreement(&values)];
    if let Some(want) = s.expect.as_ref().and_then(Value::as_f64) {
        let got = values[0].1.as_f64();
        let tol = (1e-3 * want.abs()).max(1e-4);
        assertions.push(assertion("expected-value", (got - want).abs() <= tol, format!("{} = {got}, expected {want}", values[0].0)));
    }
    let mut csv = String::from("# hbd dirichlet v1\nroute,value,diverged,growth\n");
    for (name, v) in &values {
        let growth = match v {
            DirichletValue::Diverged { growth } => fmt_num(*growth),
            DirichletValue::Finite(_) => String::new(),
        };
        csv.push_str(&format!("{name},{},{},{growth}\n", fmt_num(v.as_f64()), v.is_diverged()));
    }
    let result = json!({
        "value": dv_json(&values[0].1),
        "routes": results.iter().map(|(_, r)| r.to_json()).collect::<Vec<_>>(),
    });
    Ok(Outcome { result, csv, assertions })
}

fn sweep(s: &Scenario, field: &str, quad: &QuadratureConfig) -> Result<Outcome, StepError> {
    let b = s.schur(field)?;
    let zeta = UnitCirclePoint::new(s.zeta.unwrap_or(0.0));
    let lambda = UnitCirclePoint::new(s.lambda.or(s.zeta).unwrap_or(0.0));
    let levels = s.levels(field, 20)?;
    let sw = ratio_sweep(&b, zeta, &radial_path(lambda, levels), quad)?;
    let v = sw.lower_violation();
    let scale = sw.points.iter().map(|p| p.lower).fold(1.0, f64::max);
    let mut assertions = vec![assertion("lower-bound", v <= 1e-6 * scale, format!("max lower - ratio {v:.3e}"))];
    match s.expected_str() {
        Some("blow-up") => {
            let r = sw.ratio_by_depth(hbd_core::embedding::EXPLOSION_DEPTH);
            let t = hbd_core::embedding::EXPLOSION_THRESHOLD;
            assertions.push(assertion("blow-up", r > t, format!("ratio at depth 1e-6: {}, threshold {t:e}", fmt_num(r))));
        }
        Some("bounded") => {
            let m = sw.max_ratio();
            assertions.push(assertion("bounded", m.is_finite(), format!("max ratio {}", fmt_num(m))));
        }
        _ => {}
    }
    Ok(Outcome { result: sw.to_json(), csv: sw.csv(), assertions })
}

fn verdict_name(v: EmbeddingVerdict) -> &'static str {
    match v {
        EmbeddingVerdict::Embeds => "embeds",
        EmbeddingVerdict::FailsToEmbed => "fails-to-embed",
        EmbeddingVerdict::Inconclusive => "inconclusive",
    }
}

fn embedding(s: &Scenario, field: &str, quad: &QuadratureConfig) -> Result<Outcome, StepError> {
    let zeta = UnitCirclePoint::new(s.zeta.unwrap_or(0.0));
    let report = if s.blaschke.is_some() {
        EmbeddingReport::for_blaschke(&s.blaschke_product(field)?, zeta)?
    } else {
        let b = s.schur(field)?;
        let sw = ratio_sweep(&b, zeta, &radial_path(zeta, s.levels(field, 20)?), quad)?;
        EmbeddingReport::from_sweep(&sw, &format!("H(b) into D_zeta, zeta = {}", zeta.angle()))
    };
    let name = verdict_name(report.verdict);
    let mut assertions = Vec::new();
    if let Some(want) = s.expected_str() {
        assertions.push(assertion("verdict", want == name, format!("verdict {name}, expected {want}")));
    }
    let constant = report.constant.map(fmt_num).unwrap_or_default();
    let csv = format!("# hbd embedding v1\nverdict,constant\n{name},{constant}\n");
    Ok(Outcome { result: report.to_json(), csv, assertions })
}

fn carleson(s: &Scenario, field: &str, quad: &QuadratureConfig) -> Result<Outcome, StepError> {
    let nu = s.disk_measure(field)?;
    let grid = dyadic_grid(s.levels(field, 20)?);
    let c = match s.zeta {
        Some(z) => is_carleson_for_dz(&nu, UnitCirclePoint::new(z), &grid, quad)?,
        None => carleson_constant_h2(&nu, &grid, quad)?,
    };
    let mut assertions = Vec::new();
    if let Some(want) = s.expect.as_ref().and_then(Value::as_bool) {
        assertions.push(assertion(
            "carleson",
            want == !c.unbounded,
            format!("unbounded {}, slope {:?}, expected Carleson {want}", c.unbounded, c.exponent),
        ));
    }
    let mut csv = String::from("# hbd carleson v1\nlength,max_ratio\n");
    for (l, r) in &c.levels {
        csv.push_str(&format!("{},{}\n", fmt_num(*l), fmt_num(*r)));
    }
    Ok(Outcome { result: c.to_json(), csv, assertions })
}

fn multiplier(s: &Scenario, field: &str, quad: &QuadratureConfig) -> Result<Outcome, StepError> {
    let phi = s.function(field)?;
    let zeta = UnitCirclePoint::new(s.zeta.unwrap_or(0.0));
    let r = match &s.blaschke {
        Some(_) => is_multiplier_ku_to_dz(&phi, &s.blaschke_product(field)?, zeta, quad)?,
        None => is_multiplier_of_dz(&phi, zeta, quad)?,
    };
    let mut assertions = Vec::new();
    if let Some(want) = s.expect.as_ref().and_then(Value::as_bool) {
        assertions.push(assertion("multiplier", want == r.multiplier, format!("multiplier {}, expected {want}", r.multiplier)));
    }
    let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
    let csv = format!(
        "# hbd multiplier v1\nmultiplier,local_dirichlet,carleson_constant,bounded,sup\n{},{},{},{},{}\n",
        r.multiplier,
        fmt_num(r.dirichlet.as_f64()),
        opt(r.carleson_constant),
        r.boundedness.as_ref().map(|b| b.bounded.to_string()).unwrap_or_default(),
        opt(r.boundedness.as_ref().map(|b| b.sup)),
    );
    Ok(Outcome { result: r.to_json(), csv, assertions })
}

pub fn verify_outcome(suite: Suite, seed: u64, quad: &QuadratureConfig) -> Outcome {
    let checks = run_suite(suite, seed, quad);
    let mut csv = String::from("# hbd verify v1\ncheck,pass,detail\n");
    for c in &checks {
        csv.push_str(&format!("{},{},{}\n", c.name, c.pass, csv_field(&c.detail)));
    }
    let assertions = checks.iter().map(|c| assertion(&c.name, c.pass, c.detail.clone())).collect();
    Outcome { result: json!({ "seed": seed, "checks": checks }), csv, assertions }
}
