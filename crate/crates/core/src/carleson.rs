//! Carleson boxes, box constants for measures on the disk, and multiplier
//! tests for `D_zeta` and from `K_B` into `D_zeta`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dirichlet::{local_dirichlet, DirichletValue, Density};
use crate::disk::{AnalyticFunction, BlaschkeProduct, DiskPoint, UnitCirclePoint};
use crate::embedding::quotient_operator_matrix;
use crate::error::{HbdError, Result};
use crate::kernels::TakenakaBasis;
use crate::quad::{adaptive, adaptive_with_breaks, circle_bands, wrap_pi, wrap_tau, BoundaryPoint, QuadratureConfig};

/// `w(s) = sum_k coef_k (1 - s)^{power_k}` on the ray `s e^{i angle}`, `0 <= s < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSegment {
    pub angle: f64,
    /// `(coef, power)` pairs; every power must exceed `-1`.
    pub terms: Vec<(f64, f64)>,
}

impl RadialSegment {
    /// Mass of `{s e^{i angle} : 1 - depth < s < 1}`.
    pub fn tail_mass(&self, depth: f64) -> f64 {
        let l = depth.min(1.0);
        self.terms.iter().map(|&(c, p)| c * l.powf(p + 1.0) / (p + 1.0)).sum()
    }

    pub fn density(&self, s: f64) -> f64 {
        self.terms.iter().map(|&(c, p)| c * (1.0 - s).powf(p)).sum()
    }

    /// Multiply by `|z - zeta|^2 = 2(1 - cos)(1 - t) + t^2` with `t = 1 - s`.
    fn reweighted(&self, zeta: f64) -> Self {
        let k = 2.0 * (1.0 - (self.angle - zeta).cos());
        let mut terms = Vec::new();
        for &(c, p) in &self.terms {
            if k != 0.0 {
                terms.push((c * k, p));
                terms.push((-c * k, p + 1.0));
            }
            terms.push((c, p + 2.0));
        }
        Self { angle: self.angle, terms }
    }

    /// `int_0^1 g(s e^{i angle}) w(s) ds`, one substitution `t = v^{1/(p+1)}`
    /// per term to absorb the endpoint singularity.
    pub fn integrate<F: FnMut(C64) -> f64>(&self, mut g: F, cfg: &QuadratureConfig) -> f64 {
        let dir = C64::from_polar(1.0, self.angle);
        let mut total = 0.0;
        for &(c, p) in &self.terms {
            let q = 1.0 / (p + 1.0);
            let r = adaptive(|v: f64| g(dir * (1.0 - v.powf(q))), 0.0, 1.0, cfg.abs_tol, cfg.rel_tol, cfg.max_intervals);
            total += c * q * r.value;
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskAtom {
    pub point: C64,
    pub mass: f64,
}

/// Boundary density placed on the circle of radius `1 - eps`, optionally
/// multiplied by `prod_k |z - e^{i reweight_k}|^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PushedDensity {
    pub density: Density,
    pub eps: f64,
    #[serde(default)]
    pub reweight: Vec<f64>,
}

impl PushedDensity {
    fn weight(&self, theta: f64) -> f64 {
        let z = C64::from_polar(1.0 - self.eps, theta);
        self.density.value(theta) * self.reweight.iter().map(|&t| (z - C64::from_polar(1.0, t)).norm_sqr()).product::<f64>()
    }

    fn arc_mass(&self, start: f64, len: f64, cfg: &QuadratureConfig) -> f64 {
        let mut breaks: Vec<f64> = self
            .density
            .landmarks()
            .into_iter()
            .map(|t| start + wrap_tau(t - start))
            .filter(|&t| t < start + len)
            .collect();
        breaks.extend([start, start + len]);
        breaks.sort_by(f64::total_cmp);
        let r = adaptive_with_breaks(&mut |t| self.weight(t), &breaks, cfg.abs_tol, cfg.rel_tol, cfg.max_intervals);
        r.value / TAU
    }
}

/// Positive finite measure on the disk.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiskMeasure {
    #[serde(default)]
    pub segments: Vec<RadialSegment>,
    #[serde(default)]
    pub atoms: Vec<DiskAtom>,
    #[serde(default)]
    pub pushed: Vec<PushedDensity>,
}

/// `S(I) = {r e^{it} : e^{it} in I, 1 - |I| < r < 1}`; arcs of length `>= 1`
/// reach the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonBox {
    pub center: f64,
    pub length: f64,
}

impl CarlesonBox {
    pub fn new(center: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && length <= TAU) {
            return Err(HbdError::InvalidInput(format!("box arc length {length} outside (0, 2pi]")));
        }
        Ok(Self { center, length })
    }

    pub fn covers_angle(&self, t: f64) -> bool {
        self.length >= TAU || wrap_pi(t - self.center).abs() <= 0.5 * self.length
    }

    pub fn contains(&self, z: C64) -> bool {
        let r = z.norm();
        if r <= 1.0 - self.length || r >= 1.0 {
            return false;
        }
        r == 0.0 || self.covers_angle(z.arg())
    }
}

impl DiskMeasure {
    pub fn validate(&self) -> Result<()> {
        for s in &self.segments {
            if s.terms.iter().any(|&(c, p)| !(c.is_finite() && p > -1.0)) {
                return Err(HbdError::InvalidInput("segment powers must exceed -1".into()));
            }
            if (0..=64).any(|k| s.density(k as f64 / 64.0 * 0.999_999) < -1e-12) {
                return Err(HbdError::InvalidInput("segment density must be nonnegative".into()));
            }
        }
        for a in &self.atoms {
            if !(a.point.norm() < 1.0 && a.mass >= 0.0) {
                return Err(HbdError::InvalidInput("disk atoms need |z| < 1 and mass >= 0".into()));
            }
        }
        for p in &self.pushed {
            if !(p.eps > 0.0 && p.eps < 1.0) {
                return Err(HbdError::InvalidInput("pushed density needs 0 < eps < 1".into()));
            }
        }
        Ok(())
    }

    pub fn total_mass(&self, cfg: &QuadratureConfig) -> f64 {
        self.segments.iter().map(|s| s.tail_mass(1.0)).sum::<f64>()
            + self.atoms.iter().map(|a| a.mass).sum::<f64>()
            + self.pushed.iter().map(|p| p.arc_mass(0.0, TAU, cfg)).sum::<f64>()
    }

    /// `|z - zeta|^2 d nu`.
    pub fn reweighted(&self, zeta: UnitCirclePoint) -> Self {
        let t = zeta.angle();
        Self {
            segments: self.segments.iter().map(|s| s.reweighted(t)).collect(),
            atoms: self
                .atoms
                .iter()
                .map(|a| DiskAtom { point: a.point, mass: a.mass * (a.point - zeta.point()).norm_sqr() })
                .collect(),
            pushed: self
                .pushed
                .iter()
                .map(|p| {
                    let mut q = p.clone();
                    q.reweight.push(t);
                    q
                })
                .collect(),
        }
    }

    /// Angles where box ratios peak: ray directions, atom directions and
    /// density landmarks.
    pub fn landmarks(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.segments.iter().map(|s| s.angle).collect();
        out.extend(self.atoms.iter().filter(|a| a.point.norm() > 0.0).map(|a| a.point.arg()));
        for p in &self.pushed {
            out.extend(p.density.landmarks());
        }
        out.into_iter().map(wrap_tau).collect()
    }

    /// `int g d nu`.
    pub fn integrate<F: FnMut(C64) -> f64>(&self, mut g: F, cfg: &QuadratureConfig) -> f64 {
        let mut total = 0.0;
        for s in &self.segments {
            total += s.integrate(&mut g, cfg);
        }
        for a in &self.atoms {
            total += a.mass * g(a.point);
        }
        for p in &self.pushed {
            let mut breaks: Vec<f64> = p.density.landmarks().into_iter().map(wrap_tau).collect();
            breaks.extend([0.0, TAU]);
            breaks.sort_by(f64::total_cmp);
            breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
            let r = adaptive_with_breaks(
                &mut |t| p.weight(t) * g(C64::from_polar(1.0 - p.eps, t)),
                &breaks,
                cfg.abs_tol,
                cfg.rel_tol,
                cfg.max_intervals,
            );
            total += r.value / TAU;
        }
        total
    }
}

/// `nu(S(I))`: closed form on radial segments, quadrature for pushed densities.
pub fn box_measure(nu: &DiskMeasure, b: &CarlesonBox, cfg: &QuadratureConfig) -> f64 {
    let mut total = 0.0;
    for s in &nu.segments {
        if b.covers_angle(s.angle) {
            total += s.tail_mass(b.length);
        }
    }
    for a in &nu.atoms {
        if b.contains(a.point) {
            total += a.mass;
        }
    }
    for p in &nu.pushed {
        if p.eps < b.length {
            if b.length >= TAU {
                total += p.arc_mass(0.0, TAU, cfg);
            } else {
                total += p.arc_mass(b.center - 0.5 * b.length, b.length, cfg);
            }
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlesonConstant {
    /// Largest `nu(S(I))/|I|` seen on the grid.
    pub constant: f64,
    pub argmax: CarlesonBox,
    /// `(|I|, max ratio over centers)` in grid order.
    pub levels: Vec<(f64, f64)>,
    pub unbounded: bool,
    /// Fitted `d log(ratio) / d log(1/|I|)` over the five smallest arcs.
    pub exponent: Option<f64>,
}

impl CarlesonConstant {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "carleson": if self.unbounded { serde_json::json!("unbounded") } else { serde_json::json!(true) },
            "constant": self.constant,
            "argmax": { "center": self.argmax.center, "length": self.argmax.length },
            "certificates": { "levels": self.levels, "exponent": self.exponent },
        })
    }
}

/// Dyadic arc lengths `2^{-k}`, `k = 0..=levels`.
pub fn dyadic_grid(levels: usize) -> Vec<f64> {
    (0..=levels).map(|k| 2f64.powi(-(k as i32))).collect()
}

/// Growth exponent above which the ratio sequence counts as unbounded.
pub const UNBOUNDED_EXPONENT: f64 = 0.1;

/// Sup of `nu(S(I))/|I|` over the grid of arc lengths, centered at the
/// measure's landmarks and 64 uniform angles. Flags `unbounded` when the
/// per-level maxima over the five smallest arcs increase monotonically with
/// log-log slope above [`UNBOUNDED_EXPONENT`].
pub fn carleson_constant_h2(nu: &DiskMeasure, grid: &[f64], cfg: &QuadratureConfig) -> Result<CarlesonConstant> {
    if grid.is_empty() {
        return Err(HbdError::InvalidInput("empty arc-length grid".into()));
    }
    nu.validate()?;
    let mut centers = nu.landmarks();
    centers.extend((0..64).map(|k| TAU * k as f64 / 64.0));
    let mut lengths: Vec<f64> = grid.iter().map(|&l| l.min(TAU)).collect();
    lengths.sort_by(|a, b| b.total_cmp(a));
    let mut best = (0.0, CarlesonBox { center: 0.0, length: lengths[0] });
    let mut levels = Vec::new();
    for &l in &lengths {
        let mut level_best: f64 = 0.0;
        for &c in &centers {
            let b = CarlesonBox::new(c, l)?;
            let ratio = box_measure(nu, &b, cfg) / l;
            if ratio > best.0 {
                best = (ratio, b);
            }
            level_best = level_best.max(ratio);
        }
        levels.push((l, level_best));
    }
    let (unbounded, exponent) = growth_verdict(&levels);
    Ok(CarlesonConstant { constant: best.0, argmax: best.1, levels, unbounded, exponent })
}

fn growth_verdict(levels: &[(f64, f64)]) -> (bool, Option<f64>) {
    if levels.len() < 5 {
        return (false, None);
    }
    let tail = &levels[levels.len() - 5..];
    if tail.iter().any(|&(_, r)| !(r > 0.0)) {
        return (false, None);
    }
    let xs: Vec<f64> = tail.iter().map(|&(l, _)| -l.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|&(_, r)| r.ln()).collect();
    let mx = xs.iter().sum::<f64>() / 5.0;
    let my = ys.iter().sum::<f64>() / 5.0;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let increasing = tail.windows(2).all(|w| w[1].1 > w[0].1);
    (increasing && slope > UNBOUNDED_EXPONENT, Some(slope))
}

/// Carleson test for `D_zeta`: the box constant of `|z - zeta|^2 d nu`.
pub fn is_carleson_for_dz(
    nu: &DiskMeasure,
    zeta: UnitCirclePoint,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<CarlesonConstant> {
    carleson_constant_h2(&nu.reweighted(zeta), grid, cfg)
}

/// Largest eigenvalue of a Hermitian matrix.
fn max_eigenvalue(m: &DMatrix<C64>) -> f64 {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `M[j][k] = int e_k conj(e_j) d nu` in the Takenaka basis of `K_B`.
pub fn model_space_measure_gram(nu: &DiskMeasure, b: &BlaschkeProduct, cfg: &QuadratureConfig) -> Result<DMatrix<C64>> {
    let basis = TakenakaBasis::new(b)?;
    let d = basis.dim();
    let mut m = DMatrix::<C64>::zeros(d, d);
    for j in 0..d {
        for k in j..d {
            let re = nu.integrate(|z| (basis.eval(k, z) * basis.eval(j, z).conj()).re, cfg);
            let im = nu.integrate(|z| (basis.eval(k, z) * basis.eval(j, z).conj()).im, cfg);
            m[(j, k)] = C64::new(re, im);
            m[(k, j)] = C64::new(re, -im);
        }
    }
    Ok(m)
}

/// `sup_{f in K_B} int |f|^2 d nu / ||f||^2`, exact at finite dimension:
/// the top eigenvalue of the measure Gram.
pub fn model_space_carleson_constant(nu: &DiskMeasure, b: &BlaschkeProduct, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(max_eigenvalue(&model_space_measure_gram(nu, b, cfg)?))
}

/// `sup_{f in K_B} int |f|^2 d nu / ||f||^2_{D_zeta}`: top eigenvalue of the
/// pencil `(M, I + Q^* Q)`.
pub fn model_space_dz_carleson_constant(
    nu: &DiskMeasure,
    b: &BlaschkeProduct,
    zeta: UnitCirclePoint,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let m = model_space_measure_gram(nu, b, cfg)?;
    let q = quotient_operator_matrix(b, zeta)?.matrix;
    let d = m.nrows();
    let norm = DMatrix::<C64>::identity(d, d) + q.adjoint() * &q;
    let l = nalgebra::Cholesky::new(norm).ok_or(HbdError::SingularResolvent { condition: f64::INFINITY })?.l();
    let li = l.try_inverse().ok_or(HbdError::SingularResolvent { condition: f64::INFINITY })?;
    Ok(max_eigenvalue(&(&li * m * li.adjoint())))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundednessProbe {
    /// Max of `|phi|` at `1 - r = 10^{-2k}`, `k = 1..`.
    pub level_sups: Vec<f64>,
    pub bounded: bool,
    pub sup: f64,
}

/// Semi-decidable `H^inf` test: unbounded when the sup grows at least
/// tenfold across the last three approach levels.
pub fn hinf_probe(phi: &AnalyticFunction) -> Result<BoundednessProbe> {
    let mut angles: Vec<f64> = (0..512).map(|k| TAU * k as f64 / 512.0).collect();
    angles.extend(phi.landmarks());
    angles.extend(phi.peaks());
    let mut sups = Vec::new();
    for k in 1..=6 {
        let h = 10f64.powi(-2 * k);
        let mut m: f64 = 0.0;
        for &t in &angles {
            match phi.eval_at(&DiskPoint::new(1.0 - h, BoundaryPoint::at(t))) {
                Ok(v) => m = m.max(v.norm()),
                Err(HbdError::TooCloseToBoundary { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        sups.push(m);
    }
    let n = sups.len();
    let bounded = !(sups[n - 1] >= 10.0 * sups[n - 4]) && sups.iter().all(|v| v.is_finite());
    let sup = sups.iter().copied().fold(0.0, f64::max);
    Ok(BoundednessProbe { level_sups: sups, bounded, sup })
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplierReport {
    pub multiplier: bool,
    pub boundedness: Option<BoundednessProbe>,
    /// Carleson constant of `|phi|^2 dm` for `K_B`.
    pub carleson_constant: Option<f64>,
    pub dirichlet: DirichletValue,
}

impl MultiplierReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "multiplier": self.multiplier,
            "certificates": {
                "boundedness": self.boundedness,
                "carlesonConstant": self.carleson_constant,
                "localDirichlet": crate::embedding::dv_json(&self.dirichlet),
            }
        })
    }
}

/// Multipliers of `D_zeta` are `D_zeta ∩ H^inf`.
pub fn is_multiplier_of_dz(phi: &AnalyticFunction, zeta: UnitCirclePoint, cfg: &QuadratureConfig) -> Result<MultiplierReport> {
    let probe = hinf_probe(phi)?;
    let dirichlet = local_dirichlet(phi, zeta, cfg)?.value;
    Ok(MultiplierReport {
        multiplier: probe.bounded && !dirichlet.is_diverged(),
        boundedness: Some(probe),
        carleson_constant: None,
        dirichlet,
    })
}

/// `phi` multiplies `K_B` into `D_zeta` iff `|phi|^2 dm` is Carleson for
/// `K_B` and `phi` lies in `D_zeta`.
pub fn is_multiplier_ku_to_dz(
    phi: &AnalyticFunction,
    b: &BlaschkeProduct,
    zeta: UnitCirclePoint,
    cfg: &QuadratureConfig,
) -> Result<MultiplierReport> {
    if b.zeros().iter().enumerate().any(|(i, a)| b.zeros()[..i].iter().any(|c| (a - c).norm() < 1e-12)) {
        return Err(HbdError::InvalidInput("Blaschke zeros must be distinct".into()));
    }
    let dirichlet = local_dirichlet(phi, zeta, cfg)?.value;
    if dirichlet.is_diverged() {
        return Ok(MultiplierReport { multiplier: false, boundedness: None, carleson_constant: None, dirichlet });
    }
    let c = weighted_circle_carleson(phi, b, cfg)?;
    Ok(MultiplierReport { multiplier: c.is_finite(), boundedness: None, carleson_constant: Some(c), dirichlet })
}

/// Top eigenvalue of `M[j][k] = int e_k conj(e_j) |phi|^2 dm`.
pub fn weighted_circle_carleson(phi: &AnalyticFunction, b: &BlaschkeProduct, cfg: &QuadratureConfig) -> Result<f64> {
    let basis = TakenakaBasis::new(b)?;
    let d = basis.dim();
    let marks = [phi.landmarks(), phi.peaks()].concat();
    let mut m = DMatrix::<C64>::zeros(d, d);
    let mut err = None;
    let mut entry = |part: fn(C64) -> f64, j: usize, k: usize| {
        let band = circle_bands(
            |p| match phi.boundary(&p) {
                Ok(v) => {
                    let l = p.point();
                    part(basis.eval(k, l) * basis.eval(j, l).conj()) * v.norm_sqr()
                }
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            &marks,
            None,
            cfg,
        );
        (band.value, band.diverged)
    };
    for j in 0..d {
        for k in j..d {
            let (re, dr) = entry(|z| z.re, j, k);
            let (im, di) = entry(|z| z.im, j, k);
            if dr || di {
                return Err(HbdError::QuadratureDiverged("|phi|^2 is not integrable against the basis".into()));
            }
            m[(j, k)] = C64::new(re, im);
            m[(k, j)] = C64::new(re, -im);
        }
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok(max_eigenvalue(&m))
}

/// `D_zeta(phi f)` against `(C + D_zeta(phi)) ||f||^2_{D_zeta}` for
/// `f = sum c_j e_j`; returns `(lhs, ||f||^2_{D_zeta})`.
pub fn multiplier_chain_terms(
    phi: &AnalyticFunction,
    b: &BlaschkeProduct,
    zeta: UnitCirclePoint,
    c: &[C64],
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let basis = TakenakaBasis::new(b)?;
    let f = basis.combination(c);
    let pf = AnalyticFunction::product(vec![phi.clone(), f]);
    let lhs = local_dirichlet(&pf, zeta, cfg)?.value.as_f64();
    let q = quotient_operator_matrix(b, zeta)?;
    let cv = nalgebra::DVector::from_vec(c.to_vec());
    let norm = cv.norm_squared() + (&q.matrix * &cv).norm_squared();
    Ok((lhs, norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn nu_example() -> DiskMeasure {
        DiskMeasure { segments: vec![RadialSegment { angle: 0.0, terms: vec![(1.0, -0.5)] }], ..Default::default() }
    }

    fn atom0() -> DiskMeasure {
        DiskMeasure { atoms: vec![DiskAtom { point: C64::new(0.0, 0.0), mass: 1.0 }], ..Default::default() }
    }

    #[test]
    fn box_examples() {
        let cfg = QuadratureConfig::default();
        for d in [1e-2, 1e-4, 1e-6] {
            let m = box_measure(&nu_example(), &CarlesonBox::new(0.0, d).unwrap(), &cfg);
            assert!((m - 2.0 * d.sqrt()).abs() < 1e-12);
        }
        assert_eq!(box_measure(&atom0(), &CarlesonBox::new(0.0, 0.5).unwrap(), &cfg), 0.0);
        let full = CarlesonBox::new(1.0, TAU).unwrap();
        assert!((box_measure(&nu_example(), &full, &cfg) - 2.0).abs() < 1e-15);
        assert_eq!(box_measure(&atom0(), &full, &cfg), 1.0);
    }

    #[test]
    fn constant_examples() {
        let cfg = QuadratureConfig::default();
        let grid = dyadic_grid(30);
        let c = carleson_constant_h2(&nu_example(), &grid, &cfg).unwrap();
        assert!(c.unbounded, "{c:?}");
        let c = is_carleson_for_dz(&nu_example(), UnitCirclePoint::new(0.0), &grid, &cfg).unwrap();
        assert!(!c.unbounded && c.constant <= 0.4 + 1e-12, "{c:?}");
        let c = is_carleson_for_dz(&nu_example(), UnitCirclePoint::new(PI), &grid, &cfg).unwrap();
        assert!(c.unbounded);
        let small: Vec<f64> = grid.iter().copied().filter(|&l| l < 1.0).collect();
        assert_eq!(carleson_constant_h2(&atom0(), &small, &cfg).unwrap().constant, 0.0);
        assert_eq!(is_carleson_for_dz(&atom0(), UnitCirclePoint::new(2.0), &small, &cfg).unwrap().constant, 0.0);
    }

    #[test]
    fn reweighted_boxes_match_quadrature() {
        let cfg = QuadratureConfig::default();
        for zeta in [0.0, 1.0, PI] {
            let w = nu_example().reweighted(UnitCirclePoint::new(zeta));
            for d in [0.5, 1e-2, 1e-5] {
                let closed = box_measure(&w, &CarlesonBox::new(0.0, d).unwrap(), &cfg);
                let z = C64::from_polar(1.0, zeta);
                let quad = adaptive(
                    |v: f64| {
                        let t = v * v;
                        2.0 * (C64::new(1.0 - t, 0.0) - z).norm_sqr()
                    },
                    0.0,
                    d.sqrt(),
                    1e-15,
                    1e-13,
                    200,
                )
                .value;
                assert!((closed - quad).abs() < 1e-10 * quad.max(1e-300) + 1e-15, "{closed} {quad}");
            }
        }
    }

    #[test]
    fn multiplier_examples() {
        let cfg = QuadratureConfig::default();
        let z = AnalyticFunction::monomial(1);
        assert!(is_multiplier_of_dz(&z, UnitCirclePoint::new(0.3), &cfg).unwrap().multiplier);
        let k = AnalyticFunction::constant(C64::new(2.0, 1.0));
        assert!(is_multiplier_of_dz(&k, UnitCirclePoint::new(0.3), &cfg).unwrap().multiplier);
        let phi = AnalyticFunction::product(vec![
            AnalyticFunction::real_polynomial(&[-1.0, 1.0]),
            AnalyticFunction::power(C64::new(1.0, 0.0), -1.0 / 3.0).unwrap(),
        ]);
        assert!(phi.eval(C64::new(-0.999, 0.0)).unwrap().norm() > 10.0);
        let r = is_multiplier_of_dz(&phi, UnitCirclePoint::new(0.0), &cfg).unwrap();
        assert!(!r.multiplier && !r.boundedness.unwrap().bounded);
        let b = BlaschkeProduct::new(vec![C64::new(0.5, 0.0), C64::new(-0.3, 0.0)]).unwrap();
        let r = is_multiplier_ku_to_dz(&phi, &b, UnitCirclePoint::new(0.0), &cfg).unwrap();
        assert!(r.multiplier && r.carleson_constant.unwrap().is_finite(), "{r:?}");
        let r = is_multiplier_ku_to_dz(&z, &b, UnitCirclePoint::new(0.0), &cfg).unwrap();
        assert!(r.multiplier);
        let pole = AnalyticFunction::szego(C64::new(1.0, 0.0)).unwrap();
        assert!(!is_multiplier_ku_to_dz(&pole, &b, UnitCirclePoint::new(0.0), &cfg).unwrap().multiplier);
    }
}
