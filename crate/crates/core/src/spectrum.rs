//! Boundary spectrum `sigma(b) = {lambda : liminf_{z -> lambda} |b(z)| < 1}`
//! read off the factor structure, plus a sampled liminf check.

use std::f64::consts::{FRAC_PI_6, TAU};

use serde::Serialize;

use crate::dirichlet::BoundaryMeasure;
use crate::disk::{chord, DiskPoint, LogModulus, NamedLogModulus, SchurFunction, UnitCirclePoint};
use crate::error::{HbdError, Result};
use crate::quad::{wrap_pi, wrap_tau, BoundaryPoint};

/// Finite union of closed arcs and points, possibly minus finitely many
/// excluded points. With `closure = true` the arcs and points describe the
/// closure of the spectrum and `excluded` lists points of the closure that
/// are not in the spectrum itself.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct BoundarySpectrum {
    pub points: Vec<f64>,
    /// `[start, end]`, counterclockwise.
    pub arcs: Vec<[f64; 2]>,
    pub excluded: Vec<f64>,
    pub closure: bool,
}

fn arc_length(a: &[f64; 2]) -> f64 {
    let l = wrap_tau(a[1] - a[0]);
    if l == 0.0 && a[1] != a[0] {
        TAU
    } else {
        l
    }
}

fn in_arc(a: &[f64; 2], theta: f64) -> bool {
    wrap_tau(theta - a[0]) <= arc_length(a) + 1e-15
}

/// Chordal distance from a point to a closed arc.
fn point_arc_distance(theta: f64, a: &[f64; 2]) -> f64 {
    if in_arc(a, theta) {
        0.0
    } else {
        chord(theta, a[0]).min(chord(theta, a[1]))
    }
}

fn arc_arc_distance(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    if in_arc(a, b[0]) || in_arc(a, b[1]) || in_arc(b, a[0]) || in_arc(b, a[1]) {
        0.0
    } else {
        [point_arc_distance(a[0], b), point_arc_distance(a[1], b)].into_iter().fold(f64::INFINITY, f64::min)
    }
}

impl BoundarySpectrum {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.arcs.is_empty()
    }

    pub fn full_circle() -> Self {
        Self { arcs: vec![[0.0, TAU]], ..Default::default() }
    }

    /// Membership in the spectrum itself (excluded points removed).
    pub fn contains(&self, theta: f64) -> bool {
        if self.excluded.iter().any(|&e| chord(e, theta) < 1e-14) {
            return false;
        }
        self.closure_contains(theta)
    }

    pub fn closure_contains(&self, theta: f64) -> bool {
        self.points.iter().any(|&p| chord(p, theta) < 1e-14) || self.arcs.iter().any(|a| in_arc(a, theta))
    }

    /// Chordal distance from `e^{i theta}` to the closed set.
    pub fn distance_to(&self, theta: f64) -> f64 {
        let p = self.points.iter().map(|&p| chord(p, theta));
        let a = self.arcs.iter().map(|a| point_arc_distance(theta, a));
        p.chain(a).fold(f64::INFINITY, f64::min)
    }

    /// Distance from `e^{i theta}` to the topological boundary of the closed set.
    pub fn distance_to_edge(&self, theta: f64) -> f64 {
        let mut edges: Vec<f64> = self.points.clone();
        for a in &self.arcs {
            if arc_length(a) < TAU {
                edges.push(a[0]);
                edges.push(a[1]);
            }
        }
        edges.extend(self.excluded.iter().copied());
        edges.iter().map(|&e| chord(e, theta)).fold(f64::INFINITY, f64::min)
    }

    pub fn union(mut self, other: BoundarySpectrum) -> Self {
        self.points.extend(other.points);
        self.arcs.extend(other.arcs);
        self.excluded.extend(other.excluded);
        self.closure |= other.closure;
        // an excluded point covered by another component is in the spectrum
        let (points, arcs) = (self.points.clone(), self.arcs.clone());
        self.excluded.retain(|&e| {
            let hits = points.iter().filter(|&&p| chord(p, e) < 1e-14).count()
                + arcs.iter().filter(|a| in_arc(a, e)).count();
            hits <= 1
        });
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("spectrum serializes")
    }
}

/// Structural boundary spectrum: singular atoms together with the essential
/// support of `-log|b|` (finite Blaschke products contribute nothing).
pub fn boundary_spectrum(b: &SchurFunction) -> Result<BoundarySpectrum> {
    let mut s = BoundarySpectrum::default();
    if let Some(sing) = &b.singular {
        s.points.extend(sing.atoms().iter().map(|a| a.angle.angle()));
    }
    if let Some(o) = &b.outer {
        s = s.union(log_modulus_support(&o.log_modulus)?);
    }
    s.points.sort_by(f64::total_cmp);
    s.points.dedup_by(|a, b| chord(*a, *b) < 1e-14);
    Ok(s)
}

fn log_modulus_support(lm: &LogModulus) -> Result<BoundarySpectrum> {
    match lm {
        LogModulus::Constant(c) if *c < 0.0 => Ok(BoundarySpectrum::full_circle()),
        LogModulus::Constant(_) => Ok(BoundarySpectrum::default()),
        LogModulus::Named(NamedLogModulus::Example2Phi) => Ok(BoundarySpectrum {
            arcs: vec![[TAU - FRAC_PI_6, FRAC_PI_6]],
            excluded: vec![0.0],
            closure: true,
            ..Default::default()
        }),
        LogModulus::Samples(v) => {
            if v.iter().any(|x| x.is_nan()) {
                return Err(HbdError::UnsupportedRepresentation("log-modulus samples contain NaN".into()));
            }
            let n = v.len();
            let h = TAU / n as f64;
            if v.iter().all(|&x| x < 0.0) {
                return Ok(BoundarySpectrum::full_circle());
            }
            let mut arcs: Vec<[f64; 2]> = Vec::new();
            for k in 0..n {
                if v[k] < 0.0 || v[(k + 1) % n] < 0.0 {
                    let (a, e) = (k as f64 * h, (k + 1) as f64 * h);
                    match arcs.last_mut() {
                        Some(last) if (last[1] - a).abs() < 1e-12 => last[1] = e,
                        _ => arcs.push([a, e]),
                    }
                }
            }
            if arcs.len() > 1 && arcs[0][0] == 0.0 && (arcs[arcs.len() - 1][1] - TAU).abs() < 1e-12 {
                let last = arcs.pop().expect("nonempty");
                arcs[0][0] = last[0];
            }
            for a in arcs.iter_mut() {
                a[0] = wrap_tau(a[0]);
                a[1] = wrap_tau(a[1]);
            }
            Ok(BoundarySpectrum { arcs, ..Default::default() })
        }
        LogModulus::Rational { .. } => {
            if lm.is_identically_zero() {
                return Ok(BoundarySpectrum::default());
            }
            // the real-analytic log-modulus vanishes only at isolated maxima
            let n = 4096;
            let vals: Vec<f64> = (0..n).map(|k| lm.value(TAU * k as f64 / n as f64)).collect();
            let mut excluded = Vec::new();
            for k in 0..n {
                let (l, c, r) = (vals[(k + n - 1) % n], vals[k], vals[(k + 1) % n]);
                if c >= l && c >= r {
                    let (a, b) = (TAU * (k as f64 - 1.0) / n as f64, TAU * (k as f64 + 1.0) / n as f64);
                    // golden section only locates a flat maximum to ~sqrt(eps);
                    // grid nodes and pole arguments are often the exact location
                    let mut cands = vec![refine_max(lm, a, b), TAU * k as f64 / n as f64];
                    if let LogModulus::Rational { poles, .. } = lm {
                        cands.extend(poles.iter().map(|p| p.arg()).filter(|&t| wrap_pi(t - 0.5 * (a + b)).abs() <= 0.5 * (b - a)));
                    }
                    let t = cands.into_iter().max_by(|x, y| lm.value(*x).total_cmp(&lm.value(*y))).expect("nonempty");
                    if lm.value(t) > -1e-12 {
                        excluded.push(wrap_tau(t));
                    }
                }
            }
            excluded.dedup_by(|a, b| chord(*a, *b) < 1e-9);
            Ok(BoundarySpectrum { arcs: vec![[0.0, TAU]], closure: !excluded.is_empty(), excluded, ..Default::default() })
        }
    }
}

fn refine_max(lm: &LogModulus, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if lm.value(x1) < lm.value(x2) {
            a = x1;
        } else {
            b = x2;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectrumVerdict {
    In,
    Out,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledSpectrum {
    pub verdict: SpectrumVerdict,
    /// Smallest `|b|` over the deepest three levels.
    pub liminf_estimate: f64,
    /// Per-level minima of `|b|`.
    pub level_minima: Vec<f64>,
}

/// Sampled liminf of `|b|` at `lambda` over the grid
/// `(1 - 2^{-k}) e^{i(arg lambda + j 2^{-k})}`, `|j| <= 4`, `k <= depth`.
pub fn in_spectrum_sampled(b: &SchurFunction, lambda: UnitCirclePoint, depth: usize) -> Result<SampledSpectrum> {
    let mut minima = Vec::new();
    for k in 1..=depth.max(3) {
        let h = 2f64.powi(-(k as i32));
        let mut m = f64::INFINITY;
        for j in -4..=4 {
            let x = DiskPoint::new(1.0 - h, BoundaryPoint { anchor: lambda.angle(), offset: j as f64 * h });
            match b.eval_at(&x) {
                Ok(v) => m = m.min(v.norm()),
                Err(HbdError::TooCloseToBoundary { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        if !m.is_finite() {
            break;
        }
        minima.push(m);
    }
    if minima.len() < 3 {
        return Err(HbdError::TooCloseToBoundary { radius: 1.0 - 2f64.powi(-(minima.len() as i32 + 1)), limit: 0.0 });
    }
    let deep = &minima[minima.len() - 3..];
    let est = deep.iter().copied().fold(f64::INFINITY, f64::min);
    let verdict = if est < 1.0 - 1e-3 {
        SpectrumVerdict::In
    } else if deep.iter().all(|&m| m >= 1.0 - 1e-6) {
        SpectrumVerdict::Out
    } else {
        SpectrumVerdict::Undecided
    };
    Ok(SampledSpectrum { verdict, liminf_estimate: est, level_minima: minima })
}

/// Angular radius within which a sampled verdict near a singular atom of
/// mass `mass` may disagree with the structural spectrum at `depth`:
/// `|u| >= 1 - 1e-6` on all three deciding levels needs
/// `2 mass h / d^2 <= 1e-6` at the shallowest of them, `h = 2^{2-depth}`.
pub fn sampled_resolution(mass: f64, depth: usize) -> f64 {
    (2.0 * mass * 2f64.powi(2 - depth as i32) / 1e-6).sqrt()
}

/// Chordal distance between `supp(mu)` and the closed spectrum set;
/// `+inf` when the spectrum is empty.
pub fn support_distance(mu: &BoundaryMeasure, sigma: &BoundarySpectrum) -> f64 {
    if sigma.is_empty() {
        return f64::INFINITY;
    }
    let (points, arcs) = mu.support();
    let mut d = f64::INFINITY;
    for &p in &points {
        d = d.min(sigma.distance_to(p));
    }
    for &(start, len) in &arcs {
        let a = [wrap_tau(start), wrap_tau(start + len)];
        let full = len >= TAU;
        for &q in &sigma.points {
            d = d.min(if full { 0.0 } else { point_arc_distance(q, &a) });
        }
        for s in &sigma.arcs {
            d = d.min(if full { 0.0 } else { arc_arc_distance(&a, s) });
        }
    }
    d
}

pub fn angle_gap(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::Atom;
    use num_complex::Complex64 as C64;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn singular(angles: &[f64]) -> SchurFunction {
        SchurFunction::singular(angles.iter().map(|&t| Atom { angle: t.into(), mass: 1.0 }).collect()).unwrap()
    }

    fn example1(zeta: f64) -> SchurFunction {
        let w0 = (3.0 - 5f64.sqrt()) / 2.0;
        let z = C64::from_polar(1.0, zeta);
        let outer = LogModulus::Rational { scale: z.conj() * (1.0 - w0), poles: vec![z * w0] };
        SchurFunction::blaschke(vec![C64::new(0.0, 0.0)]).unwrap().times(SchurFunction::outer(outer).unwrap()).unwrap()
    }

    #[test]
    fn structural_examples() {
        let b = SchurFunction::blaschke(vec![C64::new(0.5, 0.0), C64::new(0.0, 0.3)]).unwrap();
        assert!(boundary_spectrum(&b).unwrap().is_empty());
        let s = boundary_spectrum(&singular(&[0.0, FRAC_PI_2])).unwrap();
        assert!(s.contains(0.0) && s.contains(FRAC_PI_2) && !s.contains(PI));
        assert!(!s.closure);
        let s = boundary_spectrum(&example1(0.0)).unwrap();
        assert!(s.closure && s.closure_contains(0.0) && !s.contains(0.0) && s.contains(0.5) && s.contains(PI));
        assert_eq!(s.excluded.len(), 1);
    }

    #[test]
    fn sampled_examples() {
        let u = singular(&[0.0]);
        assert_eq!(in_spectrum_sampled(&u, UnitCirclePoint::new(0.0), 24).unwrap().verdict, SpectrumVerdict::In);
        let z = SchurFunction::monomial(1);
        assert_eq!(in_spectrum_sampled(&z, UnitCirclePoint::new(0.0), 24).unwrap().verdict, SpectrumVerdict::Out);
        let w0 = (3.0 - 5f64.sqrt()) / 2.0;
        let r = in_spectrum_sampled(&example1(0.0), UnitCirclePoint::new(0.5), 24).unwrap();
        assert_eq!(r.verdict, SpectrumVerdict::In);
        let expected = ((1.0 - w0).powi(2) / (1.0 - 2.0 * w0 * 0.5f64.cos() + w0 * w0)).sqrt();
        assert!((r.liminf_estimate - expected).abs() < 1e-5, "{} vs {expected}", r.liminf_estimate);
    }

    #[test]
    fn distance_examples() {
        let s1 = boundary_spectrum(&singular(&[0.0])).unwrap();
        assert!((support_distance(&BoundaryMeasure::dirac(PI), &s1) - 2.0).abs() < 1e-15);
        assert_eq!(support_distance(&BoundaryMeasure::dirac(0.0), &s1), 0.0);
        assert_eq!(support_distance(&BoundaryMeasure::lebesgue(1.0), &BoundarySpectrum::default()), f64::INFINITY);
    }

    #[test]
    fn example2_support() {
        let s = log_modulus_support(&LogModulus::Named(NamedLogModulus::Example2Phi)).unwrap();
        assert!(s.contains(0.3) && s.contains(-0.3) && !s.contains(0.0) && !s.contains(1.0));
    }

    #[test]
    fn product_spectrum_is_union() {
        let b = singular(&[1.0]).times(example1(2.0)).unwrap();
        let s = boundary_spectrum(&b).unwrap();
        let a = boundary_spectrum(&singular(&[1.0])).unwrap().union(boundary_spectrum(&example1(2.0)).unwrap());
        for k in 0..64 {
            let t = TAU * k as f64 / 64.0 + 0.01;
            assert_eq!(s.contains(t), a.contains(t));
        }
        assert!(s.contains(1.0) && !s.contains(2.0));
    }
}
