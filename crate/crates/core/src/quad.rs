//! Quadrature primitives: adaptive Gauss-Kronrod, dyadic band integration
//! on the circle, periodic trapezoid rules and Neville extrapolation.
//!
//! All loops run in a fixed order, so results are bit-reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{HbdError, Result};

/// Grid resolutions and tolerances shared by every quadrature route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct QuadratureConfig {
    /// Base circle sample count for trapezoid rules (power of two, >= 64).
    pub circle_samples: usize,
    /// Maximum number of dyadic radial rings in the area route (>= 8).
    pub radial_levels: usize,
    /// Ratio between successive refinement levels.
    pub refinement_factor: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Subinterval budget of one adaptive Gauss-Kronrod call.
    pub max_intervals: usize,
    /// Smallest offset from a landmark resolved by the band integrator.
    pub min_offset: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            circle_samples: 256,
            radial_levels: 40,
            refinement_factor: 2.0,
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_intervals: 4000,
            min_offset: 1e-13,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, message: &str| {
            Err(HbdError::Config { field: field.into(), message: message.into() })
        };
        if self.circle_samples < 64 || !self.circle_samples.is_power_of_two() {
            return bad("circleSamples", "must be a power of two >= 64");
        }
        if self.radial_levels < 8 {
            return bad("radialLevels", "must be >= 8");
        }
        if !(self.refinement_factor > 1.0) {
            return bad("refinementFactor", "must exceed 1");
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return bad("relTol", "tolerances must be positive");
        }
        if self.max_intervals == 0 {
            return bad("maxIntervals", "must be positive");
        }
        if !(self.min_offset > 0.0) {
            return bad("minOffset", "must be positive");
        }
        Ok(())
    }

    /// A cheaper variant used inside nested integrals.
    pub fn coarse(&self) -> Self {
        Self { rel_tol: self.rel_tol.max(1e-8), max_intervals: self.max_intervals.min(1000), ..self.clone() }
    }
}

/// Values that can be accumulated by the quadrature rules.
pub trait QuadValue: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for C64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
pub fn gk15<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod = kronrod + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).magnitude())
}

/// Points at which a Gauss-Legendre-type rule samples `[a, b]`, with weights.
/// Used by the radial direction of the area route.
pub fn kronrod_nodes(a: f64, b: f64) -> Vec<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = Vec::with_capacity(15);
    for j in 0..7 {
        out.push((center - half * XGK[j], half * WGK[j]));
        out.push((center + half * XGK[j], half * WGK[j]));
    }
    out.push((center, half * WGK[7]));
    out
}

#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: T,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive Gauss-Kronrod integration over `[a, b]`.
pub fn adaptive<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Integral<T> {
    adaptive_with_breaks(&mut f, &[a, b], abs_tol, rel_tol, max_intervals)
}

/// Adaptive integration over consecutive `breaks[i]..breaks[i+1]` panels.
pub fn adaptive_with_breaks<T: QuadValue, F: FnMut(f64) -> T>(
    f: &mut F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Integral<T> {
    let mut heap = BinaryHeap::new();
    let mut total = T::default();
    let mut err = 0.0;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (value, error) = gk15(f, w[0], w[1]);
        total = total + value;
        err += error;
        heap.push(Panel { a: w[0], b: w[1], value, error });
    }
    let tol = |t: &T| abs_tol.max(rel_tol * t.magnitude());
    while err > tol(&total) && heap.len() < max_intervals {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (lv, le) = gk15(f, worst.a, mid);
        let (rv, re) = gk15(f, mid, worst.b);
        total = total - worst.value + lv + rv;
        err += le + re - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Panel { a: mid, b: worst.b, value: rv, error: re });
    }
    // Re-sum in interval order so the result does not depend on heap history.
    let mut panels: Vec<_> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = T::default();
    let mut error = 0.0;
    for p in &panels {
        value = value + p.value;
        error += p.error;
    }
    let converged = error <= tol(&value);
    Integral { value, error, intervals: panels.len(), converged }
}

/// A node on the unit circle expressed as `anchor + offset` so that
/// differences to the anchor stay exact for tiny offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub anchor: f64,
    pub offset: f64,
}

impl BoundaryPoint {
    pub fn at(angle: f64) -> Self {
        Self { anchor: angle, offset: 0.0 }
    }

    pub fn angle(&self) -> f64 {
        self.anchor + self.offset
    }

    pub fn point(&self) -> C64 {
        C64::from_polar(1.0, self.angle())
    }

    /// Signed angular distance to `theta`, reduced to `(-pi, pi]`, computed
    /// without cancellation when `theta` equals the anchor.
    pub fn delta_from(&self, theta: f64) -> f64 {
        wrap_pi(wrap_pi(self.anchor - theta) + self.offset)
    }

    /// `lambda - e^{i theta}` computed from the angular difference.
    pub fn chord_from(&self, theta: f64) -> C64 {
        let d = self.delta_from(theta);
        // e^{i theta} (e^{i d} - 1) = e^{i theta} * 2i sin(d/2) e^{i d/2}
        C64::from_polar(1.0, theta) * C64::new(0.0, 2.0 * (0.5 * d).sin()) * C64::from_polar(1.0, 0.5 * d)
    }
}

/// Reduce an angle to `(-pi, pi]`.
pub fn wrap_pi(t: f64) -> f64 {
    let mut x = t % TAU;
    if x > PI {
        x -= TAU;
    } else if x <= -PI {
        x += TAU;
    }
    x
}

/// Reduce an angle to `[0, 2pi)`.
pub fn wrap_tau(t: f64) -> f64 {
    let x = t.rem_euclid(TAU);
    if x >= TAU {
        0.0
    } else {
        x
    }
}

/// Result of a band-decomposed circle integral of a real integrand,
/// normalized by `dm = dtheta / 2pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandIntegral {
    pub value: f64,
    /// Per-level contributions of the dyadic bands around the focus landmark.
    pub focus_bands: Vec<f64>,
    /// Mean growth exponent (log2 of successive band ratios) over the last
    /// five levels, at the landmark that diverged.
    pub growth: Option<f64>,
    pub diverged: bool,
    /// Some band exhausted its interval budget (e.g. unresolved oscillation).
    pub unresolved: bool,
    /// Error estimate of the unconverged bands, including their crude tails.
    pub unresolved_error: f64,
}

/// Fit of the tail of a dyadic sequence of positive contributions.
/// Returns `Some(exponent)` when the last five steps all grow with
/// exponent above 0.1.
pub fn divergence_exponent(levels: &[f64]) -> Option<f64> {
    if levels.len() < 6 {
        return None;
    }
    let tail = &levels[levels.len() - 6..];
    let mut exps = Vec::with_capacity(5);
    for w in tail.windows(2) {
        if !(w[0] > 0.0) || !(w[1] > 0.0) {
            return None;
        }
        exps.push((w[1] / w[0]).log2());
    }
    if exps.iter().all(|&e| e > 0.1) {
        Some(exps.iter().sum::<f64>() / exps.len() as f64)
    } else {
        None
    }
}

fn geometric_tail(prev: f64, last: f64) -> Option<f64> {
    if last == 0.0 {
        return Some(0.0);
    }
    if prev == 0.0 {
        return None;
    }
    let rho = (last / prev).abs();
    (rho < 0.9).then(|| last * rho / (1.0 - rho))
}

/// Integrate `h` over the circle (w.r.t. normalized arc length) with dyadic
/// bands refined toward each landmark angle.
///
/// The circle is cut at the midpoints between consecutive landmarks; the
/// half-arc of width `w` beside a landmark is split into bands
/// `[w 2^{-j-1}, w 2^{-j}]`. A landmark stops refining once the geometric
/// tail of its band sequence is below tolerance, when the smallest offset
/// reaches `cfg.min_offset`, or when a band runs out of interval budget.
/// Divergence is declared from the last five band ratios.
pub fn circle_bands<F: FnMut(BoundaryPoint) -> f64>(
    mut h: F,
    landmarks: &[f64],
    focus: Option<f64>,
    cfg: &QuadratureConfig,
) -> BandIntegral {
    let mut marks: Vec<f64> = landmarks.iter().map(|&t| wrap_tau(t)).collect();
    if let Some(f) = focus {
        marks.push(wrap_tau(f));
    }
    if marks.is_empty() {
        marks.push(0.0);
    }
    marks.sort_by(f64::total_cmp);
    marks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    if marks.len() > 1 && (marks[0] + TAU - marks[marks.len() - 1]) < 1e-14 {
        marks.pop();
    }
    let n = marks.len();
    let focus_idx = focus.map(|f| {
        let f = wrap_tau(f);
        (0..n)
            .min_by(|&i, &j| wrap_pi(marks[i] - f).abs().total_cmp(&wrap_pi(marks[j] - f).abs()))
            .unwrap_or(0)
    });

    struct Mark {
        anchor: f64,
        w_left: f64,
        w_right: f64,
        levels: Vec<f64>,
        sum: f64,
        active: bool,
        tail: f64,
    }
    let mut state: Vec<Mark> = (0..n)
        .map(|i| {
            let (wl, wr) = if n == 1 {
                (PI, PI)
            } else {
                let prev = marks[(i + n - 1) % n];
                let next = marks[(i + 1) % n];
                (0.5 * wrap_tau(marks[i] - prev), 0.5 * wrap_tau(next - marks[i]))
            };
            Mark { anchor: marks[i], w_left: wl, w_right: wr, levels: Vec::new(), sum: 0.0, active: true, tail: 0.0 }
        })
        .collect();

    let mut unresolved = false;
    let mut unresolved_error = 0.0;
    let mut diverged_growth: Option<f64> = None;
    let mut level = 0usize;
    loop {
        let total: f64 = state.iter().map(|m| m.sum).sum();
        let mut any_active = false;
        for m in state.iter_mut().filter(|m| m.active) {
            let scale = 2f64.powi(-(level as i32));
            let wmax = m.w_left.max(m.w_right);
            if wmax * scale * 0.5 < cfg.min_offset {
                // Reached the resolution floor.
                m.active = false;
                if let Some(g) = divergence_exponent(&m.levels) {
                    diverged_growth.get_or_insert(g);
                } else if m.levels.len() >= 2 {
                    let k = m.levels.len();
                    if let Some(t) = geometric_tail(m.levels[k - 2], m.levels[k - 1]) {
                        m.tail = t;
                    }
                }
                continue;
            }
            any_active = true;
            let anchor = m.anchor;
            let band_tol = cfg.abs_tol.max(0.1 * cfg.rel_tol * total.abs().max(m.sum.abs()));
            let mut band = 0.0;
            let mut band_err = 0.0;
            let mut band_ok = true;
            for (w, sign) in [(m.w_right, 1.0), (m.w_left, -1.0)] {
                if w <= 0.0 {
                    continue;
                }
                let (lo, hi) = (w * scale * 0.5, w * scale);
                let r = adaptive(
                    |t: f64| h(BoundaryPoint { anchor, offset: sign * t }),
                    lo,
                    hi,
                    0.5 * band_tol,
                    0.1 * cfg.rel_tol,
                    cfg.max_intervals,
                );
                band_ok &= r.converged;
                band += r.value;
                band_err += r.error;
            }
            band /= TAU;
            m.levels.push(band);
            m.sum += band;
            let k = m.levels.len();
            if !band_ok {
                unresolved = true;
                unresolved_error += band_err / TAU + band.abs();
                m.active = false;
                // Bounded integrands halve per level.
                m.tail = band;
                continue;
            }
            if k >= 4 {
                if let Some(t) = geometric_tail(m.levels[k - 2], m.levels[k - 1]) {
                    let scale_now = total.abs().max(m.sum.abs());
                    if t.abs() <= cfg.abs_tol.max(cfg.rel_tol * scale_now) {
                        m.tail = t;
                        m.active = false;
                    }
                }
            }
        }
        if !any_active {
            break;
        }
        level += 1;
    }

    let value = state.iter().map(|m| m.sum + m.tail).sum();
    let focus_bands = focus_idx.map(|i| state[i].levels.clone()).unwrap_or_default();
    BandIntegral {
        value,
        focus_bands,
        growth: diverged_growth,
        diverged: diverged_growth.is_some(),
        unresolved,
        unresolved_error,
    }
}

/// Mean of a smooth `2pi`-periodic function by trapezoid doubling.
pub fn periodic_mean<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    n0: usize,
    rel_tol: f64,
    abs_tol: f64,
    max_n: usize,
) -> Result<(T, usize)> {
    let mut n = n0.max(8);
    let mut sum = T::default();
    for k in 0..n {
        sum = sum + f(TAU * k as f64 / n as f64);
    }
    let mut prev = sum * (1.0 / n as f64);
    while 2 * n <= max_n {
        for k in 0..n {
            sum = sum + f(TAU * (2 * k + 1) as f64 / (2 * n) as f64);
        }
        n *= 2;
        let cur = sum * (1.0 / n as f64);
        if (cur - prev).magnitude() <= abs_tol.max(rel_tol * cur.magnitude()) {
            return Ok((cur, n));
        }
        prev = cur;
    }
    Err(HbdError::QuadratureDiverged(format!("periodic trapezoid not converged with {n} nodes")))
}

/// Polynomial extrapolation of `(h_k, y_k)` to `h = 0` by Neville's scheme.
/// Returns the estimate and the size of the last correction.
pub fn neville_to_zero(h: &[f64], y: &[f64]) -> (f64, f64) {
    let n = h.len();
    let mut p = y.to_vec();
    let mut last_correction = f64::INFINITY;
    for m in 1..n {
        for i in 0..n - m {
            let num = h[i + m] * p[i] - h[i] * p[i + 1];
            // value at 0 of the interpolant through i..i+m
            p[i] = num / (h[i + m] - h[i]);
        }
        if n - m >= 1 {
            last_correction = (p[0] - if n - m > 1 { p[1] } else { p[0] }).abs();
        }
    }
    (p[0], last_correction)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_integrates_polynomials_exactly() {
        let (v, e) = gk15(&mut |x: f64| x.powi(10), 0.0, 1.0);
        assert!((v - 1.0 / 11.0).abs() < 1e-15);
        assert!(e < 1e-6);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = adaptive(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-12, 1e-12, 2000);
        assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn bands_integrate_constant() {
        let cfg = QuadratureConfig::default();
        let r = circle_bands(|_| 1.0, &[0.3, 2.0], None, &cfg);
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(!r.diverged);
    }

    #[test]
    fn bands_detect_inverse_square_divergence() {
        let cfg = QuadratureConfig::default();
        let r = circle_bands(
            |p| {
                let d = p.delta_from(0.0);
                1.0 / (d * d)
            },
            &[],
            Some(0.0),
            &cfg,
        );
        assert!(r.diverged);
        assert!((r.growth.unwrap() - 1.0).abs() < 0.05);
    }

    #[test]
    fn bands_integrate_power_singularity() {
        // mean |1 - e^{it}|^{2s} = Gamma(1 + 2s) / Gamma(1 + s)^2 with s = -1/3
        let cfg = QuadratureConfig::default();
        let r = circle_bands(|p| p.chord_from(PI).norm().powf(-2.0 / 3.0), &[PI], None, &cfg);
        let g13 = 2.678_938_534_707_747_6; // Gamma(1/3)
        let g23 = 1.354_117_939_426_400_4; // Gamma(2/3)
        let exact = g13 / (g23 * g23);
        assert!((r.value - exact).abs() < 1e-8, "{} vs {}", r.value, exact);
    }

    #[test]
    fn neville_recovers_linear_limit() {
        let h = [0.5, 0.25, 0.125];
        let y: Vec<f64> = h.iter().map(|x| 3.0 + 2.0 * x).collect();
        let (v, _) = neville_to_zero(&h, &y);
        assert!((v - 3.0).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_mean_of_poisson_kernel() {
        let r: f64 = 0.7;
        let (m, _) = periodic_mean(
            |t: f64| (1.0 - r * r) / (1.0 - 2.0 * r * t.cos() + r * r),
            64,
            1e-14,
            1e-15,
            1 << 16,
        )
        .unwrap();
        assert!((m - 1.0).abs() < 1e-13);
    }
}
