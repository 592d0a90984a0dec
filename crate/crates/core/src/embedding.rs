//! Embeddings of model and de Branges–Rovnyak spaces into local and
//! harmonically weighted Dirichlet spaces: the quotient operator on `K_B`,
//! kernel ratio sweeps, the separated-support bound and the `V_mu` potential.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::dirichlet::{
    h2_norm_sq, local_dirichlet, weighted_dirichlet_disintegration, BoundaryMeasure, DirichletValue, Density,
};
use crate::disk::{AnalyticFunction, BlaschkeProduct, DiskPoint, SchurFunction, UnitCirclePoint};
use crate::error::{HbdError, Result};
use crate::kernels::{
    boundary_kernel, compressed_shift_matrix, dbr_kernel_eval, dbr_kernel_norm_sq, gram_in_hb, szego_norm_sq,
    TakenakaBasis,
};
use crate::quad::{adaptive_with_breaks, wrap_tau, BoundaryPoint, QuadratureConfig};
use crate::spectrum::{boundary_spectrum, support_distance, BoundarySpectrum};

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// `Q = (I - zeta X)^{-1} X` on `K_B` in the Takenaka basis, where `X` is the
/// compressed backward shift.
#[derive(Debug, Clone)]
pub struct QuotientOperator {
    pub matrix: DMatrix<C64>,
    /// 2-norm condition number of `I - zeta X`.
    pub condition: f64,
}

fn condition_number(m: &DMatrix<C64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn resolvent(x: &DMatrix<C64>, w: C64) -> Result<(DMatrix<C64>, f64)> {
    let d = x.nrows();
    let a = DMatrix::<C64>::identity(d, d) - x * w;
    let condition = condition_number(&a);
    if !(condition <= 1e12) {
        return Err(HbdError::SingularResolvent { condition });
    }
    let inv = a.try_inverse().ok_or(HbdError::SingularResolvent { condition })?;
    Ok((inv, condition))
}

pub fn quotient_operator_matrix(b: &BlaschkeProduct, zeta: UnitCirclePoint) -> Result<QuotientOperator> {
    let x = compressed_shift_matrix(b)?;
    let (inv, condition) = resolvent(&x, zeta.point())?;
    Ok(QuotientOperator { matrix: inv * x, condition })
}

pub fn operator_norm(m: &DMatrix<C64>) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// `1 + ||Q||^2`, so that `||f||^2_{H^2} + D_zeta(f) <= C ||f||^2` on `K_B`.
pub fn embedding_constant(b: &BlaschkeProduct, zeta: UnitCirclePoint) -> Result<f64> {
    let q = quotient_operator_matrix(b, zeta)?;
    Ok(1.0 + operator_norm(&q.matrix).powi(2))
}

/// `||(I - conj(zeta) X*)^{-1} k_0 - k_zeta||` in Takenaka coordinates.
pub fn resolvent_kernel_check(b: &BlaschkeProduct, zeta: UnitCirclePoint) -> Result<f64> {
    let basis = TakenakaBasis::new(b)?;
    let x = compressed_shift_matrix(b)?;
    let (inv, _) = resolvent(&x.adjoint(), zeta.point().conj())?;
    let k0 = basis.kernel_coordinates(C64::new(0.0, 0.0));
    let kz = basis.kernel_coordinates(zeta.point());
    Ok((inv * k0 - kz).norm())
}

/// `D_zeta(f) = ||Q f||^2` for `f = sum c_j e_j`.
pub fn local_dirichlet_in_basis(q: &QuotientOperator, c: &DVector<C64>) -> f64 {
    (&q.matrix * c).norm_squared()
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub n: usize,
    pub omega: C64,
    /// `D_zeta(k_omega)`.
    pub dirichlet: DirichletValue,
    /// `||k_omega||^2_b`.
    pub norm_sq: f64,
    pub ratio: DirichletValue,
    pub lower: f64,
    /// The kernel-membership bound on `D_zeta(k_omega)` divided by
    /// `||k_omega||^2_b`; absent without a unimodular boundary value at `zeta`.
    pub upper: Option<f64>,
    /// The same bound with the cross term kept as `2 |omega b(omega)| |k(zeta)|^2 ||c_omega||^2`
    /// and the outer terms weighted by `|omega|^2`, `|b(omega)|^2`.
    pub upper_sharp: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioSweep {
    pub zeta: UnitCirclePoint,
    pub points: Vec<SweepPoint>,
}

/// `omega_n = (1 - 2^{-n}) lambda`, `n = 1..=levels`.
pub fn radial_path(lambda: UnitCirclePoint, levels: usize) -> Vec<C64> {
    (1..=levels).map(|n| lambda.point() * (1.0 - 2f64.powi(-(n as i32)))).collect()
}

/// Lower bound on `D_zeta(k_omega)/||k_omega||_b^2` from the quotient identity.
pub fn sweep_lower_bound(b_omega_abs: f64, omega: C64, zeta: UnitCirclePoint) -> f64 {
    let w = omega.norm();
    let q = (one() - omega.conj() * zeta.point()).norm_sqr();
    (1.0 - b_omega_abs).powi(2) / q * (w - b_omega_abs).powi(2) / (1.0 - b_omega_abs * b_omega_abs)
}

/// Whether `b` is inner with a singular atom at `zeta`: then
/// `(k_omega - k_omega(zeta))/(z - zeta)` carries `b(z)/(z - zeta)`, whose
/// boundary modulus `1/|lambda - zeta|` is not square integrable.
fn atom_blocks_kernels(b: &SchurFunction, zeta: UnitCirclePoint) -> bool {
    b.is_inner()
        && b.singular.as_ref().is_some_and(|s| s.atoms().iter().any(|a| a.angle.chord(&zeta) < 1e-14))
}

pub fn ratio_sweep(b: &SchurFunction, zeta: UnitCirclePoint, path: &[C64], cfg: &QuadratureConfig) -> Result<RatioSweep> {
    let blocked = atom_blocks_kernels(b, zeta);
    let kz = if blocked { None } else { boundary_kernel(b, zeta).ok() };
    let mut points = Vec::with_capacity(path.len());
    for (i, &omega) in path.iter().enumerate() {
        if !(omega.norm() < 1.0) {
            return Err(HbdError::InvalidInput("sweep path must stay inside the disk".into()));
        }
        let b_omega = b.eval(omega)?;
        let norm_sq = dbr_kernel_norm_sq(b, omega)?;
        let lower = sweep_lower_bound(b_omega.norm(), omega, zeta);
        let k = AnalyticFunction::dbr_kernel(b.clone(), omega)?;
        let dirichlet = if blocked && b.nonvanishing_at(omega) {
            DirichletValue::Diverged { growth: 1.0 }
        } else {
            local_dirichlet(&k, zeta, cfg)?.value
        };
        let ratio = match dirichlet {
            DirichletValue::Finite(d) => DirichletValue::Finite(d / norm_sq),
            d => d,
        };
        let (upper, upper_sharp) = match &kz {
            Some(kzf) => {
                let k_at = dbr_kernel_eval(b, omega, zeta.point())?.norm_sqr();
                let c2 = szego_norm_sq(omega);
                let prod = AnalyticFunction::product(vec![AnalyticFunction::szego(omega)?, kzf.clone()]);
                let ck = h2_norm_sq(&prod, cfg)?;
                let printed = k_at * c2 + 2.0 * k_at * c2.sqrt() + ck;
                let w = omega.norm();
                let sharp = w * w * k_at * c2 + 2.0 * (w * b_omega.norm()) * k_at * c2 + b_omega.norm_sqr() * ck;
                (Some(printed / norm_sq), Some(sharp / norm_sq))
            }
            None => (None, None),
        };
        points.push(SweepPoint { n: i + 1, omega, dirichlet, norm_sq, ratio, lower, upper, upper_sharp });
    }
    Ok(RatioSweep { zeta, points })
}

impl RatioSweep {
    pub fn max_ratio(&self) -> f64 {
        self.points.iter().map(|p| p.ratio.as_f64()).fold(0.0, f64::max)
    }

    /// Largest `lower - ratio` over the sweep (should be `<= tol`).
    pub fn lower_violation(&self) -> f64 {
        self.points.iter().map(|p| p.lower - p.ratio.as_f64()).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Ratio reached once `1 - |omega| <= depth`.
    pub fn ratio_by_depth(&self, depth: f64) -> f64 {
        self.points
            .iter()
            .filter(|p| 1.0 - p.omega.norm() <= depth * (1.0 + 1e-12))
            .map(|p| p.ratio.as_f64())
            .fold(0.0, f64::max)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("# hbd ratio-sweep v1\nn,re,im,ratio,lower,upper\n");
        for p in &self.points {
            let upper = p.upper.map(fmt_num).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p.n,
                fmt_num(p.omega.re),
                fmt_num(p.omega.im),
                fmt_num(p.ratio.as_f64()),
                fmt_num(p.lower),
                upper
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "zeta": self.zeta.angle(),
            "points": self.points.iter().map(|p| serde_json::json!({
                "n": p.n,
                "omega": [p.omega.re, p.omega.im],
                "dirichlet": dv_json(&p.dirichlet),
                "normSq": p.norm_sq,
                "ratio": dv_json(&p.ratio),
                "lower": p.lower,
                "upper": p.upper,
                "upperSharp": p.upper_sharp,
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.17e}")
    }
}

pub fn dv_json(v: &DirichletValue) -> serde_json::Value {
    match v {
        DirichletValue::Finite(x) => serde_json::json!(x),
        DirichletValue::Diverged { growth } => serde_json::json!({ "diverged": true, "growth": growth }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EmbeddingVerdict {
    Embeds,
    FailsToEmbed,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    pub verdict: EmbeddingVerdict,
    pub constant: Option<f64>,
    pub evidence: serde_json::Value,
    pub scenario: String,
}

/// Declared blow-up threshold and depth for sweep verdicts.
pub const EXPLOSION_THRESHOLD: f64 = 1e3;
pub const EXPLOSION_DEPTH: f64 = 1e-6;

impl EmbeddingReport {
    pub fn for_blaschke(b: &BlaschkeProduct, zeta: UnitCirclePoint) -> Result<Self> {
        let q = quotient_operator_matrix(b, zeta)?;
        let norm = operator_norm(&q.matrix);
        Ok(Self {
            verdict: EmbeddingVerdict::Embeds,
            constant: Some(1.0 + norm * norm),
            evidence: serde_json::json!({ "operatorNorm": norm, "condition": q.condition }),
            scenario: format!("K_B into D_zeta, degree {}, zeta = {}", b.degree(), zeta.angle()),
        })
    }

    pub fn from_sweep(sweep: &RatioSweep, scenario: &str) -> Self {
        let reached = sweep.ratio_by_depth(EXPLOSION_DEPTH);
        let verdict = if reached > EXPLOSION_THRESHOLD {
            EmbeddingVerdict::FailsToEmbed
        } else {
            EmbeddingVerdict::Inconclusive
        };
        Self {
            verdict,
            constant: None,
            evidence: serde_json::json!({ "maxRatio": fmt_num(sweep.max_ratio()), "threshold": EXPLOSION_THRESHOLD }),
            scenario: scenario.to_string(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// `f = sum_j c_j k^u_{omega_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct KernelCombination {
    pub anchors: Vec<C64>,
    pub coeffs: Vec<C64>,
}

impl KernelCombination {
    pub fn function(&self, u: &SchurFunction) -> Result<AnalyticFunction> {
        let mut terms = Vec::new();
        for (&w, &c) in self.anchors.iter().zip(&self.coeffs) {
            terms.push((c, AnalyticFunction::dbr_kernel(u.clone(), w)?));
        }
        Ok(AnalyticFunction::sum(terms))
    }

    /// `||f||^2_u = c^H G c` with the exact kernel Gram.
    pub fn norm_sq(&self, u: &SchurFunction) -> Result<f64> {
        let g = gram_in_hb(u, &self.anchors)?;
        Ok(g.quadratic_form(&DVector::from_vec(self.coeffs.clone())))
    }
}

/// Euclidean distance from `z` in the closed disk to a boundary set.
fn disk_distance(z: C64, s: &BoundarySpectrum) -> f64 {
    let mut d = f64::INFINITY;
    for &p in &s.points {
        d = d.min((z - C64::from_polar(1.0, p)).norm());
    }
    let theta = wrap_tau(z.arg());
    for a in &s.arcs {
        let inside = BoundarySpectrum { arcs: vec![*a], ..Default::default() }.closure_contains(theta);
        if inside {
            d = d.min(1.0 - z.norm());
        } else {
            d = d.min((z - C64::from_polar(1.0, a[0])).norm()).min((z - C64::from_polar(1.0, a[1])).norm());
        }
    }
    d
}

/// Max of `|f'|` on a polar grid of the closed disk outside the
/// `delta/2`-neighbourhood of the spectrum, oversampled near its edge.
pub fn max_derivative_outside(f: &AnalyticFunction, sigma: &BoundarySpectrum, delta: f64) -> Result<f64> {
    let half = 0.5 * delta;
    let mut radii: Vec<f64> = (0..64).map(|j| j as f64 / 64.0).collect();
    radii.extend((6..=40).map(|k| 1.0 - 2f64.powi(-k)));
    let mut angles: Vec<f64> = (0..1024).map(|k| TAU * k as f64 / 1024.0).collect();
    if half.is_finite() {
        let mut centers = sigma.points.clone();
        for a in &sigma.arcs {
            centers.extend([a[0], a[1]]);
        }
        let w = 2.0 * (half / 2.0).min(1.0).asin() * 2.0;
        for c in centers {
            angles.extend((0..=256).map(|k| c - w + 2.0 * w * k as f64 / 256.0));
        }
    }
    let mut best: f64 = 0.0;
    for &t in &angles {
        for &r in &radii {
            let x = DiskPoint::new(r, BoundaryPoint::at(t));
            if half.is_finite() && disk_distance(x.z(), sigma) < half {
                continue;
            }
            match f.deriv_at(&x) {
                Ok(v) => best = best.max(v.norm()),
                Err(HbdError::TooCloseToBoundary { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparatedSupportReport {
    pub delta: f64,
    pub lhs: f64,
    pub h2_norm_sq: f64,
    pub max_derivative: f64,
    /// `(8/delta^2) mu(T) ||f||^2 + max|f'|^2 mu(T)`.
    pub rhs: f64,
    /// The second term with `max|f'|` unsquared.
    pub rhs_unsquared: f64,
    pub holds: bool,
}

/// `D_mu(f) <= (8/delta^2) mu(T) ||f||^2_{H^2} + max_{closed disk minus U} |f'|^2 mu(T)`
/// for `f` in `K_u` when `supp(mu)` and `sigma(u)` are `delta`-separated.
pub fn separated_support_bound(
    u: &SchurFunction,
    mu: &BoundaryMeasure,
    f: &KernelCombination,
    cfg: &QuadratureConfig,
) -> Result<SeparatedSupportReport> {
    if !u.is_inner() {
        return Err(HbdError::InvalidInput("separated-support bound needs an inner function".into()));
    }
    let sigma = boundary_spectrum(u)?;
    let delta = support_distance(mu, &sigma);
    if delta <= 1e-12 {
        return Err(HbdError::SeparationViolated { distance: delta });
    }
    let func = f.function(u)?;
    let lhs = weighted_dirichlet_disintegration(&func, mu, cfg)?.value;
    let lhs = match lhs {
        DirichletValue::Finite(v) => v,
        DirichletValue::Diverged { .. } => f64::INFINITY,
    };
    let h2 = f.norm_sq(u)?;
    let mass = mu.total_mass();
    let first = if delta.is_finite() { 8.0 / (delta * delta) * mass * h2 } else { 0.0 };
    let m = max_derivative_outside(&func, &sigma, delta)?;
    let rhs = first + m * m * mass;
    let rhs_unsquared = first + m * mass;
    let tol = 1e-6 * rhs.abs().max(1.0);
    Ok(SeparatedSupportReport { delta, lhs, h2_norm_sq: h2, max_derivative: m, rhs, rhs_unsquared, holds: lhs <= rhs + tol })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Potential {
    Finite(f64),
    Diverged,
}

impl Potential {
    pub fn as_f64(&self) -> f64 {
        match self {
            Potential::Finite(v) => *v,
            Potential::Diverged => f64::INFINITY,
        }
    }
}

/// `V_mu(omega) = int |zeta - omega|^{-2} d mu(zeta)`.
pub fn v_mu_potential(mu: &BoundaryMeasure, omega: C64, cfg: &QuadratureConfig) -> Potential {
    let on_circle = (omega.norm() - 1.0).abs() < 1e-14;
    let mut total = 0.0;
    for a in &mu.atoms {
        let d2 = (a.angle.point() - omega).norm_sqr();
        if a.mass > 0.0 && d2 < 1e-28 {
            return Potential::Diverged;
        }
        total += a.mass / d2;
    }
    if mu.lebesgue > 0.0 {
        if on_circle {
            return Potential::Diverged;
        }
        total += mu.lebesgue / (1.0 - omega.norm_sqr()).abs();
    }
    if let Some(d) = &mu.density {
        match density_potential(d, omega, on_circle, cfg) {
            Some(v) => total += v,
            None => return Potential::Diverged,
        }
    }
    Potential::Finite(total)
}

fn density_potential(d: &Density, omega: C64, on_circle: bool, cfg: &QuadratureConfig) -> Option<f64> {
    let t0 = wrap_tau(omega.arg());
    if on_circle {
        // |e^{it} - omega|^{-2} ~ (t - t0)^{-2}: divergent wherever the
        // density is positive on either side of t0
        let eps = 1e-9;
        if d.value(t0 + eps) > 0.0 || d.value(t0 - eps) > 0.0 {
            return None;
        }
    }
    let mut breaks: Vec<f64> = d.landmarks().into_iter().map(wrap_tau).collect();
    breaks.push(t0);
    breaks.extend([0.0, TAU]);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let r = adaptive_with_breaks(
        &mut |t: f64| d.value(t) / (C64::from_polar(1.0, t) - omega).norm_sqr(),
        &breaks,
        cfg.abs_tol,
        cfg.rel_tol,
        cfg.max_intervals,
    );
    if r.converged && r.value.is_finite() {
        Some(r.value / TAU)
    } else {
        None
    }
}

/// `max_n D_mu(k_n)/||k_n||^2` along `k_n = k^u_{omega_n}`,
/// `omega_n = (1 - 2^{-n}) lambda`: a lower estimate of the embedding
/// constant of `K_u` into `D(mu)`.
pub fn radial_kernel_constant(
    u: &SchurFunction,
    mu: &BoundaryMeasure,
    lambda: UnitCirclePoint,
    levels: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let mut best: f64 = 0.0;
    for omega in radial_path(lambda, levels) {
        let k = AnalyticFunction::dbr_kernel(u.clone(), omega)?;
        let d = weighted_dirichlet_disintegration(&k, mu, cfg)?.value.as_f64();
        best = best.max(d / dbr_kernel_norm_sq(u, omega)?);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Compactness {
    CompactEmbedding,
    NotCompact,
}

pub fn compactness_classifier(u: &SchurFunction) -> Result<Compactness> {
    if !u.is_inner() {
        return Err(HbdError::InvalidInput("compactness classifier needs an inner function".into()));
    }
    Ok(if u.is_finite_blaschke() { Compactness::CompactEmbedding } else { Compactness::NotCompact })
}
