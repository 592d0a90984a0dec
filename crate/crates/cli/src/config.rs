//! JSON run configuration and resolution of function/measure specs.

use std::collections::HashSet;

use hbd_core::carleson::DiskMeasure;
use hbd_core::dirichlet::BoundaryMeasure;
use hbd_core::disk::{AnalyticFunction, AtomicSingularInner, BlaschkeProduct, OuterFromModulus, SchurFunction};
use hbd_core::named::{self, NamedObject};
use hbd_core::{HbdError, QuadratureConfig};
use num_complex::Complex64 as C64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Config {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Dirichlet,
    Sweep,
    Embedding,
    Carleson,
    Multiplier,
    Verify,
}

/// One entry of `scenarios`. Which fields are required depends on `kind`;
/// see [`Scenario::require`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Scenario {
    pub id: String,
    pub kind: ScenarioKind,
    /// Analytic function: inline, `{"named": ..}`, `{"monomial": n}` or `{"dbrKernel": {"b": .., "anchor": [re, im]}}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<Value>,
    /// Schur function: inline factors or `{"named": ..}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Value>,
    /// Boundary measure (dirichlet) or disk measure (carleson).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<Value>,
    /// Zeros of a finite Blaschke product, `[[re, im], ..]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blaschke: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    /// Direction of the radial sweep path; defaults to `zeta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    /// Kind-specific expectation turned into an assertion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureConfig>,
    /// Artifact file stem; defaults to `id`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

pub fn config_error(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config { field: field.into(), message: message.into() }
}

fn join(prefix: &str, path: &str) -> String {
    if path.is_empty() || path == "." {
        prefix.to_string()
    } else if path.starts_with('[') {
        format!("{prefix}{path}")
    } else {
        format!("{prefix}.{path}")
    }
}

/// Deserialize `v`, reporting the failing path below `field`.
pub fn parse_at<T: DeserializeOwned>(v: &Value, field: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(v.clone()).map_err(|e| {
        let path = e.path().to_string();
        config_error(join(field, &path), e.into_inner().to_string())
    })
}

/// Map a validation error from the core onto `field`.
fn at(field: &str) -> impl Fn(HbdError) -> CliError + '_ {
    move |e| match e {
        HbdError::Config { field: f, message } => config_error(join(field, &f), message),
        e => config_error(field, e.to_string()),
    }
}

pub fn parse_config(text: &str) -> Result<Config, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: Config = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path.is_empty() || path == "." { "config".to_string() } else { path };
        config_error(field, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl Config {
    pub fn validate(&self) -> Result<(), CliError> {
        self.quadrature.validate().map_err(at("quadrature"))?;
        if self.scenarios.is_empty() {
            return Err(config_error("scenarios", "at least one scenario is required"));
        }
        let mut ids = HashSet::new();
        let mut stems = HashSet::new();
        for (i, s) in self.scenarios.iter().enumerate() {
            let field = format!("scenarios[{i}]");
            if s.id.is_empty() || !s.id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
                return Err(config_error(format!("{field}.id"), "must be non-empty and use only [A-Za-z0-9._-]"));
            }
            if !ids.insert(s.id.clone()) {
                return Err(config_error(format!("{field}.id"), format!("duplicate id {:?}", s.id)));
            }
            let stem = s.stem().to_string();
            if stem == "report" || !stem.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
                return Err(config_error(format!("{field}.output"), "invalid artifact name"));
            }
            if !stems.insert(stem) {
                return Err(config_error(format!("{field}.output"), "artifact name used twice"));
            }
            s.validate(&field)?;
        }
        Ok(())
    }
}

impl Scenario {
    pub fn stem(&self) -> &str {
        self.output.as_deref().unwrap_or(&self.id)
    }

    pub fn quad(&self, global: &QuadratureConfig) -> QuadratureConfig {
        self.quadrature.clone().unwrap_or_else(|| global.clone())
    }

    fn require<'a, T>(&self, v: &'a Option<T>, field: &str, name: &str) -> Result<&'a T, CliError> {
        v.as_ref().ok_or_else(|| config_error(format!("{field}.{name}"), format!("required for kind {:?}", self.kind)))
    }

    /// Check presence and shape of every kind-specific field.
    fn validate(&self, field: &str) -> Result<(), CliError> {
        if let Some(q) = &self.quadrature {
            q.validate().map_err(at(&format!("{field}.quadrature")))?;
        }
        for (name, v) in [("zeta", self.zeta), ("lambda", self.lambda)] {
            if v.is_some_and(|x| !x.is_finite()) {
                return Err(config_error(format!("{field}.{name}"), "angle must be finite"));
            }
        }
        match self.kind {
            ScenarioKind::Dirichlet => {
                match (&self.function, &self.measure) {
                    (Some(_), None) | (Some(_), Some(_)) => {}
                    (None, _) => return Err(config_error(format!("{field}.function"), "required for kind dirichlet")),
                }
                self.function(field)?;
                if self.measure.is_some() {
                    self.boundary_measure(field)?;
                }
                if let Some(e) = &self.expect {
                    if !e.is_number() {
                        return Err(config_error(format!("{field}.expect"), "expected value must be a number"));
                    }
                }
            }
            ScenarioKind::Sweep => {
                self.schur(field)?;
                self.require(&self.zeta, field, "zeta")?;
                self.levels(field, 20)?;
                self.expect_str(field, &["blow-up", "bounded"])?;
            }
            ScenarioKind::Embedding => {
                if self.blaschke.is_some() {
                    self.blaschke_product(field)?;
                } else {
                    self.schur(field)?;
                    self.levels(field, 20)?;
                }
                self.require(&self.zeta, field, "zeta")?;
                self.expect_str(field, &["embeds", "fails-to-embed", "inconclusive"])?;
            }
            ScenarioKind::Carleson => {
                self.disk_measure(field)?;
                self.levels(field, 20)?;
                if let Some(e) = &self.expect {
                    if !e.is_boolean() {
                        return Err(config_error(format!("{field}.expect"), "expected a boolean (is Carleson)"));
                    }
                }
            }
            ScenarioKind::Multiplier => {
                self.function(field)?;
                self.require(&self.zeta, field, "zeta")?;
                if self.blaschke.is_some() {
                    self.blaschke_product(field)?;
                }
                if let Some(e) = &self.expect {
                    if !e.is_boolean() {
                        return Err(config_error(format!("{field}.expect"), "expected a boolean (is multiplier)"));
                    }
                }
            }
            ScenarioKind::Verify => {
                let name = self.require(&self.suite, field, "suite")?;
                if crate::suites::Suite::from_name(name).is_none() {
                    return Err(config_error(
                        format!("{field}.suite"),
                        format!("unknown suite {name:?}; known: {}", crate::suites::SUITE_NAMES.join(", ")),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn levels(&self, field: &str, default: usize) -> Result<usize, CliError> {
        let n = self.levels.unwrap_or(default);
        if !(1..=60).contains(&n) {
            return Err(config_error(format!("{field}.levels"), "must be between 1 and 60"));
        }
        Ok(n)
    }

    fn expect_str(&self, field: &str, allowed: &[&str]) -> Result<Option<String>, CliError> {
        match &self.expect {
            None => Ok(None),
            Some(Value::String(s)) if allowed.contains(&s.as_str()) => Ok(Some(s.clone())),
            Some(_) => Err(config_error(format!("{field}.expect"), format!("expected one of {}", allowed.join(", ")))),
        }
    }

    pub fn expected_str(&self) -> Option<&str> {
        self.expect.as_ref().and_then(Value::as_str)
    }

    pub fn function(&self, field: &str) -> Result<AnalyticFunction, CliError> {
        let f = format!("{field}.function");
        resolve_function(self.require(&self.function, field, "function")?, &f)
    }

    pub fn schur(&self, field: &str) -> Result<SchurFunction, CliError> {
        let f = format!("{field}.b");
        resolve_schur(self.require(&self.b, field, "b")?, &f)
    }

    pub fn blaschke_product(&self, field: &str) -> Result<BlaschkeProduct, CliError> {
        let zeros = self.require(&self.blaschke, field, "blaschke")?;
        if zeros.is_empty() {
            return Err(config_error(format!("{field}.blaschke"), "needs at least one zero"));
        }
        BlaschkeProduct::new(zeros.clone()).map_err(at(&format!("{field}.blaschke")))
    }

    pub fn boundary_measure(&self, field: &str) -> Result<BoundaryMeasure, CliError> {
        let f = format!("{field}.measure");
        let m: BoundaryMeasure = parse_at(self.require(&self.measure, field, "measure")?, &f)?;
        m.validate().map_err(at(&f))?;
        Ok(m)
    }

    pub fn disk_measure(&self, field: &str) -> Result<DiskMeasure, CliError> {
        let f = format!("{field}.measure");
        let v = self.require(&self.measure, field, "measure")?;
        let m = match named_of(v, &f)? {
            Some(NamedObject::Measure(m)) => m,
            Some(_) => return Err(config_error(format!("{f}.named"), "not a disk measure")),
            None => parse_at(v, &f)?,
        };
        m.validate().map_err(at(&f))?;
        Ok(m)
    }
}

fn named_of(v: &Value, field: &str) -> Result<Option<NamedObject>, CliError> {
    let Some(name) = v.get("named") else { return Ok(None) };
    if v.as_object().is_some_and(|o| o.len() != 1) {
        return Err(config_error(field, "`named` cannot be combined with other keys"));
    }
    let name = name.as_str().ok_or_else(|| config_error(format!("{field}.named"), "must be a string"))?;
    named::lookup(name).map(Some).map_err(|e| config_error(format!("{field}.named"), e.to_string()))
}

pub fn resolve_schur(v: &Value, field: &str) -> Result<SchurFunction, CliError> {
    match named_of(v, field)? {
        Some(NamedObject::Schur(b)) => Ok(b),
        Some(_) => Err(config_error(format!("{field}.named"), "not a Schur function")),
        None => validated_schur(parse_at(v, field)?, field),
    }
}

/// Rebuild through the checked constructors: serde alone skips them.
fn validated_schur(s: SchurFunction, field: &str) -> Result<SchurFunction, CliError> {
    let blaschke = match s.blaschke {
        Some(b) => Some(BlaschkeProduct::new(b.zeros().to_vec()).map_err(at(&format!("{field}.blaschke")))?),
        None => None,
    };
    let singular = match s.singular {
        Some(a) => Some(AtomicSingularInner::new(a.atoms().to_vec()).map_err(at(&format!("{field}.singular")))?),
        None => None,
    };
    let outer = match s.outer {
        Some(o) => Some(OuterFromModulus::new(o.log_modulus).map_err(at(&format!("{field}.outer")))?),
        None => None,
    };
    Ok(SchurFunction { blaschke, singular, outer })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelSpec {
    b: Value,
    anchor: C64,
}

pub fn resolve_function(v: &Value, field: &str) -> Result<AnalyticFunction, CliError> {
    if let Some(obj) = named_of(v, field)? {
        return match obj {
            NamedObject::Function(f) => Ok(f),
            NamedObject::Schur(b) => Ok(AnalyticFunction::schur(b)),
            NamedObject::Measure(_) => Err(config_error(format!("{field}.named"), "a measure is not a function")),
        };
    }
    if let Some(n) = v.get("monomial") {
        let n = n.as_u64().ok_or_else(|| config_error(format!("{field}.monomial"), "must be a nonnegative integer"))?;
        return Ok(AnalyticFunction::monomial(n as usize));
    }
    if let Some(k) = v.get("dbrKernel") {
        let f = format!("{field}.dbrKernel");
        let spec: KernelSpec = parse_at(k, &f)?;
        let b = resolve_schur(&spec.b, &format!("{f}.b"))?;
        return AnalyticFunction::dbr_kernel(b, spec.anchor).map_err(at(&format!("{f}.anchor")));
    }
    rebuild(parse_at(v, field)?, field)
}

fn rebuild(f: AnalyticFunction, field: &str) -> Result<AnalyticFunction, CliError> {
    use AnalyticFunction as F;
    Ok(match f {
        F::Polynomial { coeffs } => F::polynomial(coeffs),
        F::Cauchy { pole } => F::szego(pole).map_err(at(&format!("{field}.pole")))?,
        F::Power { shift, exponent } => F::power(shift, exponent).map_err(at(field))?,
        F::Schur { b } => F::schur(validated_schur(b, &format!("{field}.b"))?),
        F::Kernel { b, anchor, .. } => {
            F::dbr_kernel(validated_schur(b, &format!("{field}.b"))?, anchor).map_err(at(&format!("{field}.anchor")))?
        }
        F::BoundaryKernel { b, zeta, .. } => {
            hbd_core::kernels::boundary_kernel(&validated_schur(b, &format!("{field}.b"))?, zeta).map_err(at(field))?
        }
        F::Sum { terms } => F::sum(
            terms
                .into_iter()
                .enumerate()
                .map(|(i, (c, t))| Ok((c, rebuild(t, &format!("{field}.terms[{i}]"))?)))
                .collect::<Result<_, CliError>>()?,
        ),
        F::Product { factors } => F::product(
            factors
                .into_iter()
                .enumerate()
                .map(|(i, t)| rebuild(t, &format!("{field}.factors[{i}]")))
                .collect::<Result<_, _>>()?,
        ),
        F::DifferenceQuotient { .. } => {
            return Err(config_error(format!("{field}.kind"), "difference quotients are built internally, not configured"))
        }
    })
}
