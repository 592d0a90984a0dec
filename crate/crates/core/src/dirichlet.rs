//! H² norms, Poisson integrals and Dirichlet-type integrals.
//!
//! The local Dirichlet integral `D_zeta(f)` has three independent routes:
//! the weighted area integral of `|f'|^2`, the boundary integral of the
//! squared difference quotient, and the H² norm of `(f - f(zeta))/(z - zeta)`.
//! Divergence is a value ([`DirichletValue::Diverged`]), not an error.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::disk::{chord, AnalyticFunction, Atom, DiskPoint, RadialLimit, UnitCirclePoint};
use crate::error::{HbdError, Result};
use crate::quad::{
    adaptive_with_breaks, circle_bands, divergence_exponent, kronrod_nodes, neville_to_zero, periodic_mean,
    wrap_tau, BoundaryPoint, QuadratureConfig,
};

/// Piecewise-smooth density part of a boundary measure (w.r.t. `dm`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Density {
    Constant { value: f64 },
    /// `height` on the counterclockwise arc from `start` to `end`, zero elsewhere.
    Arc { start: f64, end: f64, height: f64 },
    /// Uniform samples at `2 pi k / N`, linear in between.
    Samples { values: Vec<f64> },
    Named { name: NamedDensity },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedDensity {
    /// `1 + cos(theta)`.
    CosBump,
}

impl Density {
    fn validate(&self) -> Result<()> {
        let ok = match self {
            Density::Constant { value } => *value >= 0.0 && value.is_finite(),
            Density::Arc { start, end, height } => {
                *height >= 0.0 && height.is_finite() && start.is_finite() && end.is_finite() && arc_len(*start, *end) > 0.0
            }
            Density::Samples { values } => values.len() >= 8 && values.iter().all(|v| *v >= 0.0 && v.is_finite()),
            Density::Named { .. } => true,
        };
        if ok {
            Ok(())
        } else {
            Err(HbdError::InvalidInput("density must be finite and nonnegative".into()))
        }
    }

    pub fn value(&self, theta: f64) -> f64 {
        match self {
            Density::Constant { value } => *value,
            Density::Arc { start, end, height } => {
                if wrap_tau(theta - start) <= arc_len(*start, *end) {
                    *height
                } else {
                    0.0
                }
            }
            Density::Samples { values } => {
                let n = values.len();
                let x = wrap_tau(theta) / TAU * n as f64;
                let k = (x.floor() as usize).min(n - 1);
                let t = x - k as f64;
                values[k] * (1.0 - t) + values[(k + 1) % n] * t
            }
            Density::Named { name: NamedDensity::CosBump } => 1.0 + theta.cos(),
        }
    }

    pub fn mass(&self) -> f64 {
        match self {
            Density::Constant { value } => *value,
            Density::Arc { start, end, height } => height * arc_len(*start, *end) / TAU,
            Density::Samples { values } => values.iter().sum::<f64>() / values.len() as f64,
            Density::Named { name: NamedDensity::CosBump } => 1.0,
        }
    }

    /// Angles where the density is not smooth.
    pub fn landmarks(&self) -> Vec<f64> {
        match self {
            Density::Arc { start, end, .. } => vec![wrap_tau(*start), wrap_tau(*end)],
            _ => Vec::new(),
        }
    }

    /// Closed support as arcs `(start, length)`.
    pub fn support(&self) -> Vec<(f64, f64)> {
        match self {
            Density::Constant { value } if *value > 0.0 => vec![(0.0, TAU)],
            Density::Constant { .. } => Vec::new(),
            Density::Arc { height, .. } if *height == 0.0 => Vec::new(),
            Density::Arc { start, end, .. } => vec![(wrap_tau(*start), arc_len(*start, *end))],
            Density::Named { .. } => vec![(0.0, TAU)],
            Density::Samples { values } => {
                let n = values.len();
                let h = TAU / n as f64;
                if values.iter().all(|&v| v > 0.0) {
                    return vec![(0.0, TAU)];
                }
                // cells [k h, (k+1) h] carrying positive density, merged
                let mut arcs: Vec<(f64, f64)> = Vec::new();
                for k in 0..n {
                    if values[k] > 0.0 || values[(k + 1) % n] > 0.0 {
                        match arcs.last_mut() {
                            Some(last) if (last.0 + last.1 - k as f64 * h).abs() < 1e-12 => last.1 += h,
                            _ => arcs.push((k as f64 * h, h)),
                        }
                    }
                }
                if arcs.len() > 1 {
                    let (first, last) = (arcs[0], arcs[arcs.len() - 1]);
                    if first.0 == 0.0 && (last.0 + last.1 - TAU).abs() < 1e-12 {
                        arcs[0] = (last.0, last.1 + first.1);
                        arcs.pop();
                    }
                }
                arcs
            }
        }
    }

    /// Poisson integral at an interior point.
    pub fn poisson(&self, z: C64) -> f64 {
        match self {
            Density::Constant { value } => *value,
            Density::Arc { start, end, height } => height * arc_harmonic_measure(*start, *end, z),
            Density::Named { name: NamedDensity::CosBump } => 1.0 + z.re,
            Density::Samples { .. } => {
                let center = if z.norm() > 0.0 { z.arg() } else { 0.0 };
                let r2 = z.norm_sqr();
                let r = adaptive_with_breaks(
                    &mut |t: f64| {
                        let d = C64::from_polar(1.0, t) - z;
                        self.value(t) * (1.0 - r2) / d.norm_sqr()
                    },
                    &[center - PI, center, center + PI],
                    1e-14,
                    1e-12,
                    2000,
                );
                r.value / TAU
            }
        }
    }
}

fn arc_len(start: f64, end: f64) -> f64 {
    let l = wrap_tau(end - start);
    if l == 0.0 && end != start {
        TAU
    } else {
        l
    }
}

/// Harmonic measure at `z` of the counterclockwise arc from `start` to `end`.
pub fn arc_harmonic_measure(start: f64, end: f64, z: C64) -> f64 {
    let len = arc_len(start, end);
    if len >= TAU {
        return 1.0;
    }
    let a = C64::from_polar(1.0, start) - z;
    let b = C64::from_polar(1.0, end) - z;
    let angle = wrap_tau(b.arg() - a.arg());
    angle / PI - len / TAU
}

/// Finite positive measure on the circle: atoms, a density and a multiple
/// of normalized Lebesgue measure.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundaryMeasure {
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Density>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub lebesgue: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl BoundaryMeasure {
    pub fn new(atoms: Vec<Atom>, density: Option<Density>, lebesgue: f64) -> Result<Self> {
        let m = Self { atoms, density, lebesgue };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.iter().any(|a| !(a.mass > 0.0) || !a.mass.is_finite()) {
            return Err(HbdError::InvalidInput("atom masses must be positive and finite".into()));
        }
        if !(self.lebesgue >= 0.0) || !self.lebesgue.is_finite() {
            return Err(HbdError::InvalidInput("Lebesgue multiple must be nonnegative".into()));
        }
        if let Some(d) = &self.density {
            d.validate()?;
        }
        Ok(())
    }

    pub fn dirac(angle: f64) -> Self {
        Self::atomic(&[(angle, 1.0)])
    }

    pub fn atomic(atoms: &[(f64, f64)]) -> Self {
        Self { atoms: atoms.iter().map(|&(t, m)| Atom { angle: t.into(), mass: m }).collect(), ..Default::default() }
    }

    pub fn lebesgue(c: f64) -> Self {
        Self { lebesgue: c, ..Default::default() }
    }

    pub fn with_density(density: Density) -> Self {
        Self { density: Some(density), ..Default::default() }
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum::<f64>() + self.density.as_ref().map_or(0.0, |d| d.mass()) + self.lebesgue
    }

    pub fn is_atomic(&self) -> bool {
        self.density.is_none() && self.lebesgue == 0.0
    }

    /// Absolutely continuous part only.
    pub fn continuous_part(&self) -> Self {
        Self { atoms: Vec::new(), density: self.density.clone(), lebesgue: self.lebesgue }
    }

    pub fn poisson(&self, z: C64) -> Result<f64> {
        if !(z.norm() < 1.0) {
            return Err(HbdError::InvalidInput("Poisson integral needs |z| < 1".into()));
        }
        Ok(self.poisson_unchecked(z))
    }

    fn poisson_unchecked(&self, z: C64) -> f64 {
        let r2 = z.norm_sqr();
        let atoms: f64 = self.atoms.iter().map(|a| a.mass * (1.0 - r2) / (a.angle.point() - z).norm_sqr()).sum();
        atoms + self.lebesgue + self.density.as_ref().map_or(0.0, |d| d.poisson(z))
    }

    /// Closed support: isolated points and arcs `(start, length)`.
    pub fn support(&self) -> (Vec<f64>, Vec<(f64, f64)>) {
        let points = self.atoms.iter().map(|a| a.angle.angle()).collect();
        let mut arcs = self.density.as_ref().map(|d| d.support()).unwrap_or_default();
        if self.lebesgue > 0.0 {
            arcs = vec![(0.0, TAU)];
        }
        (points, arcs)
    }

    pub fn landmarks(&self) -> Vec<f64> {
        let mut l: Vec<f64> = self.atoms.iter().map(|a| a.angle.angle()).collect();
        if let Some(d) = &self.density {
            l.extend(d.landmarks());
        }
        l
    }

    /// Every atom of `self` is dominated by the same-location atom of `other`.
    pub fn atomwise_le(&self, other: &BoundaryMeasure) -> bool {
        self.atoms.iter().all(|a| {
            other.atoms.iter().any(|b| a.angle.chord(&b.angle) < 1e-14 && a.mass <= b.mass)
        })
    }
}

/// Method that produced a Dirichlet value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirichletMethod {
    Area,
    Douglas,
    Decomposition,
    Disintegration,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DirichletValue {
    Finite(f64),
    /// Partial sums grow; `growth` is the fitted log2 growth per refinement level.
    Diverged { growth: f64 },
}

impl DirichletValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            DirichletValue::Finite(v) => Some(*v),
            DirichletValue::Diverged { .. } => None,
        }
    }

    pub fn is_diverged(&self) -> bool {
        matches!(self, DirichletValue::Diverged { .. })
    }

    /// `+inf` for divergent values.
    pub fn as_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletResult {
    pub method: DirichletMethod,
    pub value: DirichletValue,
    /// Per-level contributions (bands, rings or radii depending on the route).
    pub evidence: Vec<f64>,
}

impl DirichletResult {
    fn finite(method: DirichletMethod, value: f64, evidence: Vec<f64>) -> Self {
        Self { method, value: DirichletValue::Finite(value), evidence }
    }

    fn diverged(method: DirichletMethod, growth: f64, evidence: Vec<f64>) -> Self {
        Self { method, value: DirichletValue::Diverged { growth }, evidence }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let value = match self.value {
            DirichletValue::Finite(v) => serde_json::json!(v),
            DirichletValue::Diverged { .. } => serde_json::json!("diverged"),
        };
        let mut obj = serde_json::json!({
            "method": self.method,
            "value": value,
            "evidence": self.evidence,
        });
        if let DirichletValue::Diverged { growth } = self.value {
            obj["growth"] = serde_json::json!(growth);
        }
        obj
    }
}

/// `||f||^2_{H^2}`.
///
/// Polynomials use their coefficients; functions with closed-form boundary
/// values and no boundary singularities use a trapezoid rule on the circle;
/// everything else takes circle means at `r_k = 1 - 2^{-k}` and extrapolates
/// in `sqrt(1 - r)`.
pub fn h2_norm_sq(f: &AnalyticFunction, cfg: &QuadratureConfig) -> Result<f64> {
    if let AnalyticFunction::Polynomial { coeffs } = f {
        return Ok(coeffs.iter().map(|c| c.norm_sqr()).sum());
    }
    let marks = f.landmarks();
    if marks.is_empty() && f.is_closed_form() {
        let mut err = None;
        let (v, _) = periodic_mean(
            |t| match f.boundary(&BoundaryPoint::at(t)) {
                Ok(v) => v.norm_sqr(),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            cfg.circle_samples,
            cfg.rel_tol,
            cfg.abs_tol,
            1 << 22,
        )?;
        return match err {
            Some(e) => Err(e),
            None => Ok(v),
        };
    }
    if f.is_closed_form() && f.is_bounded() {
        let mut err = None;
        let band = circle_bands(
            |p| match f.boundary(&p) {
                Ok(v) => v.norm_sqr(),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            &[marks.clone(), f.peaks()].concat(),
            None,
            cfg,
        );
        if let Some(e) = err {
            return Err(e);
        }
        if !band.diverged {
            return Ok(band.value);
        }
    }
    h2_norm_sq_radial(f, &marks, cfg)
}

fn h2_norm_sq_radial(f: &AnalyticFunction, marks: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    let inner = cfg.coarse();
    let mut ts = Vec::new();
    let mut means = Vec::new();
    let mut prev_est: Option<f64> = None;
    let settle = f.interior_scale() / 64.0;
    for k in 1..=cfg.radial_levels {
        let h = 2f64.powi(-(k as i32));
        let r = 1.0 - h;
        let mut err = None;
        let band = circle_bands(
            |p| match f.eval_at(&DiskPoint::new(r, p)) {
                Ok(v) => v.norm_sqr(),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            marks,
            None,
            &inner,
        );
        if let Some(e) = err {
            if let HbdError::TooCloseToBoundary { .. } = e {
                break;
            }
            return Err(e);
        }
        ts.push(h.sqrt());
        means.push(band.value);
        // Means legitimately grow until 1 - r passes the depth of the nearest
        // interior pole or kernel anchor.
        if h < settle && divergence_exponent(&means).is_some() && means.len() >= 8 {
            return Err(HbdError::NotInH2("circle means grow without bound".into()));
        }
        if ts.len() >= 3 {
            let m = ts.len().min(6);
            let (est, _) = neville_to_zero(&ts[ts.len() - m..], &means[means.len() - m..]);
            if let Some(p) = prev_est {
                if (est - p).abs() <= 1e-9_f64.max(cfg.rel_tol) * est.abs().max(1e-300) + cfg.abs_tol {
                    return Ok(est);
                }
            }
            prev_est = Some(est);
        }
    }
    match prev_est {
        Some(e) if e.is_finite() => Ok(e),
        _ => Err(HbdError::QuadratureDiverged("H2 circle means did not stabilize".into())),
    }
}

fn growth_of_samples(samples: &[C64]) -> f64 {
    let mags: Vec<f64> = samples.iter().map(|v| v.norm()).collect();
    divergence_exponent(&mags).unwrap_or(0.0)
}

/// Local Douglas formula: `int |(f(lambda) - f(zeta))/(lambda - zeta)|^2 dm`.
pub fn local_dirichlet_douglas(f: &AnalyticFunction, zeta: UnitCirclePoint, cfg: &QuadratureConfig) -> Result<DirichletResult> {
    douglas_with_error(f, zeta, cfg).map(|(r, _)| r)
}

/// Douglas result plus the error estimate of bands the integrator could not
/// resolve (fast oscillation near singular atoms, cancellation at sharp peaks).
fn douglas_with_error(f: &AnalyticFunction, zeta: UnitCirclePoint, cfg: &QuadratureConfig) -> Result<(DirichletResult, f64)> {
    use DirichletMethod::Douglas;
    if let AnalyticFunction::Polynomial { coeffs } = f {
        if coeffs.iter().skip(1).all(|c| c.norm() == 0.0) {
            return Ok((DirichletResult::finite(Douglas, 0.0, Vec::new()), 0.0));
        }
    }
    let f_zeta = match f.boundary_limit(zeta)? {
        RadialLimit::Value(v) => v,
        RadialLimit::NoLimit { samples } => {
            return Ok((DirichletResult::diverged(Douglas, growth_of_samples(&samples), Vec::new()), 0.0));
        }
    };
    let theta0 = zeta.angle();
    let mut err = None;
    let band = circle_bands(
        |p| {
            let q = p.chord_from(theta0);
            match f.boundary(&p) {
                Ok(v) => ((v - f_zeta) / q).norm_sqr(),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        },
        &[f.landmarks(), f.peaks()].concat(),
        Some(theta0),
        cfg,
    );
    if let Some(e) = err {
        return Err(e);
    }
    let unresolved = if band.unresolved && !band.diverged { band.unresolved_error } else { 0.0 };
    Ok((band_result(Douglas, band), unresolved))
}

fn band_result(method: DirichletMethod, band: crate::quad::BandIntegral) -> DirichletResult {
    if band.diverged {
        DirichletResult::diverged(method, band.growth.unwrap_or(0.0), band.focus_bands)
    } else {
        DirichletResult::finite(method, band.value, band.focus_bands)
    }
}

/// Radial weight of an area integral: `w(r, angle node)`.
pub trait AreaWeight {
    fn weight(&self, r: f64, p: &BoundaryPoint) -> f64;
    fn landmarks(&self) -> Vec<f64>;
    fn focus(&self) -> Option<f64>;
}

/// `(1 - |z|^2)/|z - zeta|^2`, evaluated without cancellation near `zeta`.
pub struct LocalWeight(pub f64);

impl AreaWeight for LocalWeight {
    fn weight(&self, r: f64, p: &BoundaryPoint) -> f64 {
        let d = p.delta_from(self.0);
        let s = (0.5 * d).sin();
        // |r e^{id} - 1|^2 = (1 - r)^2 + 4 r sin^2(d/2)
        let q = (1.0 - r) * (1.0 - r) + 4.0 * r * s * s;
        (1.0 - r) * (1.0 + r) / q
    }
    fn landmarks(&self) -> Vec<f64> {
        Vec::new()
    }
    fn focus(&self) -> Option<f64> {
        Some(self.0)
    }
}

/// Poisson integral of a measure as area weight.
pub struct PoissonWeight<'a>(pub &'a BoundaryMeasure);

impl AreaWeight for PoissonWeight<'_> {
    fn weight(&self, r: f64, p: &BoundaryPoint) -> f64 {
        let z = p.point() * r;
        let mut atoms = 0.0;
        for a in &self.0.atoms {
            let d = p.delta_from(a.angle.angle());
            let s = (0.5 * d).sin();
            atoms += a.mass * (1.0 - r) * (1.0 + r) / ((1.0 - r) * (1.0 - r) + 4.0 * r * s * s);
        }
        atoms + self.0.lebesgue + self.0.density.as_ref().map_or(0.0, |d| d.poisson(z))
    }
    fn landmarks(&self) -> Vec<f64> {
        self.0.landmarks()
    }
    fn focus(&self) -> Option<f64> {
        None
    }
}

/// `1 - |z|^2`.
pub struct HyperbolicWeight;

impl AreaWeight for HyperbolicWeight {
    fn weight(&self, r: f64, _p: &BoundaryPoint) -> f64 {
        (1.0 - r) * (1.0 + r)
    }
    fn landmarks(&self) -> Vec<f64> {
        Vec::new()
    }
    fn focus(&self) -> Option<f64> {
        None
    }
}

/// `(1/pi) int_D |f'|^2 w dA` over dyadic rings `[1 - 2^{-l}, 1 - 2^{-l-1}]`.
pub fn area_dirichlet<W: AreaWeight>(
    f: &AnalyticFunction,
    weight: &W,
    method: DirichletMethod,
    cfg: &QuadratureConfig,
) -> Result<DirichletResult> {
    if let AnalyticFunction::Polynomial { coeffs } = f {
        if coeffs.iter().skip(1).all(|c| c.norm() == 0.0) {
            return Ok(DirichletResult::finite(method, 0.0, Vec::new()));
        }
    }
    let inner = cfg.coarse();
    let mut marks = f.landmarks();
    marks.extend(weight.landmarks());
    let focus = weight.focus();
    let mut rings: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut tail = 0.0;
    let mut converged = false;
    for level in 0..cfg.radial_levels {
        let (a, b) = if level == 0 { (0.0, 0.5) } else { (1.0 - 2f64.powi(-(level as i32)), 1.0 - 2f64.powi(-(level as i32) - 1)) };
        let mut ring = 0.0;
        for (r, w) in kronrod_nodes(a, b) {
            let mut err = None;
            let band = circle_bands(
                |p| {
                    match f.deriv_at(&DiskPoint::new(r, p)) {
                        Ok(d) => d.norm_sqr() * weight.weight(r, &p),
                        Err(e) => {
                            err.get_or_insert(e);
                            0.0
                        }
                    }
                },
                &marks,
                focus,
                &inner,
            );
            if let Some(e) = err {
                return Err(e);
            }
            // (1/pi) int r dr dtheta = 2 int r mean_theta dr
            ring += w * 2.0 * r * band.value;
        }
        rings.push(ring);
        total += ring;
        let k = rings.len();
        if k >= 4 {
            let (p, l) = (rings[k - 2], rings[k - 1]);
            if l == 0.0 && p == 0.0 {
                converged = true;
                break;
            }
            let rho = if p > 0.0 { l / p } else { f64::INFINITY };
            if rho < 0.9 {
                let t = l * rho / (1.0 - rho);
                if t <= cfg.abs_tol.max(1e-8 * total) {
                    tail = t;
                    converged = true;
                    break;
                }
            }
        }
    }
    if !converged {
        if let Some(g) = divergence_exponent(&rings) {
            return Ok(DirichletResult::diverged(method, g, rings));
        }
        let k = rings.len();
        if k >= 2 && rings[k - 1] > 1e-6 * total {
            return Err(HbdError::QuadratureDiverged(format!(
                "area rings did not stabilize after {k} levels (last ring {:e})",
                rings[k - 1]
            )));
        }
    }
    Ok(DirichletResult::finite(method, total + tail, rings))
}

/// `(1/pi) int |f'|^2 (1 - |z|^2)/|z - zeta|^2 dA`.
pub fn local_dirichlet_area(f: &AnalyticFunction, zeta: UnitCirclePoint, cfg: &QuadratureConfig) -> Result<DirichletResult> {
    area_dirichlet(f, &LocalWeight(zeta.angle()), DirichletMethod::Area, cfg)
}

/// `D_zeta(f)` by the boundary formula, switching to an interior route when
/// a significant part of the boundary integral was left unresolved (boundary
/// values oscillating near a singular atom): the difference-quotient norm
/// first, then the area integral; if both fail the boundary value is kept.
pub fn local_dirichlet(f: &AnalyticFunction, zeta: UnitCirclePoint, cfg: &QuadratureConfig) -> Result<DirichletResult> {
    let (r, unresolved) = douglas_with_error(f, zeta, cfg)?;
    // The estimate is pessimistic; actual errors run 20-100x below it.
    if unresolved <= 1e6 * cfg.rel_tol * r.value.as_f64().abs() {
        return Ok(r);
    }
    match local_dirichlet_decomposition(f, zeta, cfg) {
        Ok(d) if !d.value.is_diverged() => Ok(d),
        _ => Ok(local_dirichlet_area(f, zeta, cfg).unwrap_or(r)),
    }
}

/// `||g||^2_{H^2}` for `g = (f - f(zeta))/(z - zeta)`.
pub fn local_dirichlet_decomposition(
    f: &AnalyticFunction,
    zeta: UnitCirclePoint,
    cfg: &QuadratureConfig,
) -> Result<DirichletResult> {
    use DirichletMethod::Decomposition;
    let f_zeta = match f.boundary_limit(zeta)? {
        RadialLimit::Value(v) => v,
        RadialLimit::NoLimit { samples } => {
            return Ok(DirichletResult::diverged(Decomposition, growth_of_samples(&samples), Vec::new()));
        }
    };
    let g = AnalyticFunction::difference_quotient(f.clone(), zeta, f_zeta);
    match h2_norm_sq(&g, cfg) {
        Ok(v) => Ok(DirichletResult::finite(Decomposition, v, vec![v])),
        Err(HbdError::NotInH2(_)) => Ok(DirichletResult::diverged(Decomposition, 0.0, Vec::new())),
        Err(e) => Err(e),
    }
}

/// `D_mu(f)`: atoms through the local Douglas formula (disintegration),
/// the absolutely continuous part through the Poisson-weighted area integral.
pub fn weighted_dirichlet(f: &AnalyticFunction, mu: &BoundaryMeasure, cfg: &QuadratureConfig) -> Result<DirichletResult> {
    mu.validate()?;
    let mut total = 0.0;
    let mut evidence = Vec::new();
    for a in &mu.atoms {
        let r = local_dirichlet(f, a.angle, cfg)?;
        match r.value {
            DirichletValue::Finite(v) => {
                total += a.mass * v;
                evidence.push(a.mass * v);
            }
            DirichletValue::Diverged { growth } => {
                return Ok(DirichletResult::diverged(DirichletMethod::Disintegration, growth, r.evidence));
            }
        }
    }
    let method = if mu.is_atomic() { DirichletMethod::Disintegration } else { DirichletMethod::Area };
    if !mu.is_atomic() {
        let cont = mu.continuous_part();
        let r = area_dirichlet(f, &PoissonWeight(&cont), DirichletMethod::Area, cfg)?;
        match r.value {
            DirichletValue::Finite(v) => {
                total += v;
                evidence.extend(r.evidence);
            }
            DirichletValue::Diverged { growth } => {
                return Ok(DirichletResult::diverged(DirichletMethod::Area, growth, r.evidence));
            }
        }
    }
    Ok(DirichletResult::finite(method, total, evidence))
}

/// `D_mu(f) = int D_zeta(f) d mu(zeta)` with the continuous part integrated
/// over `zeta` by adaptive quadrature of local Douglas integrals.
pub fn weighted_dirichlet_disintegration(
    f: &AnalyticFunction,
    mu: &BoundaryMeasure,
    cfg: &QuadratureConfig,
) -> Result<DirichletResult> {
    use DirichletMethod::Disintegration;
    mu.validate()?;
    let mut total = 0.0;
    let mut evidence = Vec::new();
    for a in &mu.atoms {
        match local_dirichlet(f, a.angle, cfg)?.value {
            DirichletValue::Finite(v) => {
                total += a.mass * v;
                evidence.push(a.mass * v);
            }
            DirichletValue::Diverged { growth } => return Ok(DirichletResult::diverged(Disintegration, growth, evidence)),
        }
    }
    if mu.is_atomic() {
        return Ok(DirichletResult::finite(Disintegration, total, evidence));
    }
    let inner = cfg.coarse();
    let mut breaks: Vec<f64> = [mu.landmarks(), f.landmarks()].concat().into_iter().map(wrap_tau).collect();
    breaks.extend([0.0, TAU]);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let mut err = None;
    let mut diverged = None;
    let r = adaptive_with_breaks(
        &mut |t: f64| {
            let w = mu.lebesgue + mu.density.as_ref().map_or(0.0, |d| d.value(t));
            if w == 0.0 || err.is_some() || diverged.is_some() {
                return 0.0;
            }
            match local_dirichlet_douglas(f, UnitCirclePoint::new(t), &inner) {
                Ok(r) => match r.value {
                    DirichletValue::Finite(v) => w * v,
                    DirichletValue::Diverged { growth } => {
                        diverged = Some(growth);
                        0.0
                    }
                },
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            }
        },
        &breaks,
        cfg.abs_tol,
        1e-7_f64.max(cfg.rel_tol),
        cfg.max_intervals,
    );
    if let Some(e) = err {
        return Err(e);
    }
    if let Some(g) = diverged {
        return Ok(DirichletResult::diverged(Disintegration, g, evidence));
    }
    if !r.converged {
        return Err(HbdError::QuadratureDiverged("disintegration integral over the circle did not converge".into()));
    }
    evidence.push(r.value / TAU);
    Ok(DirichletResult::finite(Disintegration, total + r.value / TAU, evidence))
}

/// `D_mu(f)` entirely through the area integral with weight `P mu`
/// (cross-check for the disintegration).
pub fn weighted_dirichlet_area(f: &AnalyticFunction, mu: &BoundaryMeasure, cfg: &QuadratureConfig) -> Result<DirichletResult> {
    area_dirichlet(f, &PoissonWeight(mu), DirichletMethod::Area, cfg)
}

/// Chordal distance helper re-exported for measures.
pub fn chordal(a: f64, b: f64) -> f64 {
    chord(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::SchurFunction;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn val(r: Result<DirichletResult>) -> f64 {
        r.unwrap().value.finite().expect("finite")
    }

    #[test]
    fn h2_examples() {
        assert_eq!(h2_norm_sq(&AnalyticFunction::real_polynomial(&[3.0, 4.0]), &cfg()).unwrap(), 25.0);
        let s = AnalyticFunction::szego(c(0.5, 0.0)).unwrap();
        assert!((h2_norm_sq(&s, &cfg()).unwrap() - 4.0 / 3.0).abs() < 1e-8);
        assert_eq!(h2_norm_sq(&AnalyticFunction::monomial(7), &cfg()).unwrap(), 1.0);
    }

    #[test]
    fn h2_of_singular_inner_is_one() {
        let u = AnalyticFunction::schur(SchurFunction::singular(vec![Atom { angle: 0.0.into(), mass: 1.0 }]).unwrap());
        let v = h2_norm_sq(&u, &cfg()).unwrap();
        assert!((v - 1.0).abs() < 1e-4, "{v}");
    }

    #[test]
    fn poisson_examples() {
        let d1 = BoundaryMeasure::dirac(0.0);
        assert!((d1.poisson(c(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!((BoundaryMeasure::lebesgue(1.0).poisson(c(0.3, -0.4)).unwrap() - 1.0).abs() < 1e-10);
        assert!((d1.poisson(c(0.5, 0.0)).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn arc_and_sampled_poisson_agree() {
        let arc = Density::Arc { start: 2.5, end: 3.9, height: 2.0 };
        let n = 1 << 14;
        let samples = Density::Samples { values: (0..n).map(|k| arc.value(TAU * k as f64 / n as f64)).collect() };
        for z in [c(0.0, 0.0), c(-0.6, 0.2), c(0.3, 0.5)] {
            let a = arc.poisson(z);
            let s = samples.poisson(z);
            assert!((a - s).abs() < 1e-3, "{a} vs {s}");
        }
        assert!((arc.poisson(c(0.0, 0.0)) - arc.mass()).abs() < 1e-14);
    }

    #[test]
    fn douglas_examples() {
        let z3 = AnalyticFunction::monomial(3);
        assert!((val(local_dirichlet_douglas(&z3, UnitCirclePoint::new(FRAC_PI_2), &cfg())) - 3.0).abs() < 1e-8);
        let k = AnalyticFunction::constant(c(2.0, 1.0));
        assert_eq!(val(local_dirichlet_douglas(&k, UnitCirclePoint::new(1.0), &cfg())), 0.0);
        let s = AnalyticFunction::szego(c(0.5, 0.0)).unwrap();
        let d = val(local_dirichlet_douglas(&s, UnitCirclePoint::new(0.0), &cfg()));
        let g = val(local_dirichlet_decomposition(&s, UnitCirclePoint::new(0.0), &cfg()));
        assert!((d - g).abs() < 1e-6, "{d} vs {g}");
    }

    #[test]
    fn area_examples() {
        let one = UnitCirclePoint::new(0.0);
        let v = val(local_dirichlet_area(&AnalyticFunction::monomial(1), one, &cfg()));
        assert!((v - 1.0).abs() < 1e-4, "{v}");
        assert_eq!(val(local_dirichlet_area(&AnalyticFunction::constant(c(1.0, 0.0)), one, &cfg())), 0.0);
        let v = val(local_dirichlet_area(&AnalyticFunction::monomial(2), one, &cfg()));
        assert!((v - 2.0).abs() < 1e-3, "{v}");
    }

    #[test]
    fn decomposition_examples() {
        let one = UnitCirclePoint::new(0.0);
        assert!((val(local_dirichlet_decomposition(&AnalyticFunction::monomial(2), one, &cfg())) - 2.0).abs() < 1e-10);
        let f = AnalyticFunction::sum(vec![
            (
                c(1.0, 0.0),
                AnalyticFunction::product(vec![
                    AnalyticFunction::real_polynomial(&[-1.0, 1.0]),
                    AnalyticFunction::szego(c(0.5, 0.0)).unwrap(),
                ]),
            ),
            (c(7.0, 0.0), AnalyticFunction::constant(c(1.0, 0.0))),
        ]);
        assert!((val(local_dirichlet_decomposition(&f, one, &cfg())) - 4.0 / 3.0).abs() < 1e-8);
        let s = AnalyticFunction::szego(c(0.9, 0.0)).unwrap();
        let m1 = UnitCirclePoint::new(PI);
        let a = val(local_dirichlet_decomposition(&s, m1, &cfg()));
        let b = val(local_dirichlet_douglas(&s, m1, &cfg()));
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn weighted_examples() {
        let z2 = AnalyticFunction::monomial(2);
        let mu = BoundaryMeasure::atomic(&[(0.0, 2.0), (FRAC_PI_2, 3.0)]);
        assert!((val(weighted_dirichlet(&z2, &mu, &cfg())) - 10.0).abs() < 1e-8);
        // classical Dirichlet integral of z^n is n
        let v = val(weighted_dirichlet(&z2, &BoundaryMeasure::lebesgue(1.0), &cfg()));
        assert!((v - 2.0).abs() < 1e-3, "{v}");
        let u = AnalyticFunction::schur(SchurFunction::singular(vec![Atom { angle: 0.0.into(), mass: 1.0 }]).unwrap());
        let r = weighted_dirichlet(&u, &BoundaryMeasure::lebesgue(1.0), &cfg()).unwrap();
        match r.value {
            DirichletValue::Diverged { growth } => assert!(growth > 0.0),
            v => panic!("expected divergence, got {v:?}"),
        }
    }

    #[test]
    fn hyperbolic_weight_of_monomials() {
        // (1/pi) int n^2 |z|^{2n-2} (1 - |z|^2) dA = n/(n+1)
        for n in 1..5 {
            let f = AnalyticFunction::monomial(n);
            let v = val(area_dirichlet(&f, &HyperbolicWeight, DirichletMethod::Area, &cfg()));
            let want = n as f64 / (n as f64 + 1.0);
            assert!((v - want).abs() < 1e-8, "n={n}: {v}");
        }
    }

    #[test]
    fn douglas_diverges_without_boundary_value() {
        let f = AnalyticFunction::szego(c(1.0, 0.0)).unwrap();
        let r = local_dirichlet_douglas(&f, UnitCirclePoint::new(0.0), &cfg()).unwrap();
        assert!(r.value.is_diverged());
        let u = AnalyticFunction::schur(SchurFunction::singular(vec![Atom { angle: 0.0.into(), mass: 1.0 }]).unwrap());
        let r = local_dirichlet_douglas(&u, UnitCirclePoint::new(0.0), &cfg()).unwrap();
        assert!(r.value.is_diverged(), "{:?}", r.value);
    }

    // Kernel anchored 2^-6 from the circle, close to a singular atom away
    // from zeta: the boundary bands oscillate, the circle means grow for a while.
    #[test]
    fn kernel_near_an_atom_away_from_zeta() {
        let b = SchurFunction::blaschke(vec![c(0.0, 0.0)])
            .unwrap()
            .times(SchurFunction::singular(vec![Atom { angle: 3.525.into(), mass: 0.1 }]).unwrap())
            .unwrap();
        let omega = C64::from_polar(1.0 - 2f64.powi(-6), 3.52);
        let k = AnalyticFunction::dbr_kernel(b, omega).unwrap();
        let zeta = UnitCirclePoint::new(3.29);
        let area = val(local_dirichlet_area(&k, zeta, &cfg()));
        let decomposition = val(local_dirichlet_decomposition(&k, zeta, &cfg()));
        assert!((decomposition - area).abs() < 1e-6 * area, "{decomposition} vs {area}");
        let best = val(local_dirichlet(&k, zeta, &cfg()));
        assert!((best - area).abs() < 1e-6 * area, "{best} vs {area}");
    }

    #[test]
    fn json_shapes() {
        let m: BoundaryMeasure = serde_json::from_str(
            r#"{"atoms":[{"angle":0.0,"mass":2.0}],"density":{"kind":"named","name":"cos-bump"},"lebesgue":0.5}"#,
        )
        .unwrap();
        assert!((m.total_mass() - 3.5).abs() < 1e-15);
        let r = DirichletResult::diverged(DirichletMethod::Area, 0.5, vec![1.0]);
        assert_eq!(r.to_json()["value"], "diverged");
    }
}
