//! Analytic functions on the unit disk: finite Blaschke products, atomic
//! singular inner functions, outer functions built from boundary modulus
//! data, their products (Schur functions) and composite expressions.

use std::f64::consts::{FRAC_PI_6, PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{HbdError, Result};
use crate::quad::{adaptive_with_breaks, wrap_pi, wrap_tau, BoundaryPoint, QuadratureConfig};

/// A point `e^{i angle}` of the unit circle, `angle` kept in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct UnitCirclePoint {
    angle: f64,
}

impl From<f64> for UnitCirclePoint {
    fn from(angle: f64) -> Self {
        Self::new(angle)
    }
}

impl From<UnitCirclePoint> for f64 {
    fn from(p: UnitCirclePoint) -> f64 {
        p.angle
    }
}

impl UnitCirclePoint {
    pub fn new(angle: f64) -> Self {
        Self { angle: wrap_tau(angle) }
    }

    pub fn from_complex(z: C64) -> Self {
        Self::new(z.arg())
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn point(&self) -> C64 {
        C64::from_polar(1.0, self.angle)
    }

    pub fn boundary(&self) -> BoundaryPoint {
        BoundaryPoint::at(self.angle)
    }

    /// Chordal distance `|e^{ia} - e^{ib}|`.
    pub fn chord(&self, other: &UnitCirclePoint) -> f64 {
        chord(self.angle, other.angle)
    }
}

pub fn chord(a: f64, b: f64) -> f64 {
    2.0 * (0.5 * wrap_pi(a - b)).sin().abs()
}

/// Interior point `r e^{i(anchor + offset)}`. Differences `e^{i alpha} - z`
/// are formed from the angle offset, so they keep full relative accuracy
/// when `z` is within `1e-9` of the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    pub r: f64,
    pub p: BoundaryPoint,
}

impl DiskPoint {
    pub fn new(r: f64, p: BoundaryPoint) -> Self {
        Self { r, p }
    }

    pub fn from_complex(z: C64) -> Self {
        Self { r: z.norm(), p: BoundaryPoint::at(z.arg()) }
    }

    pub fn z(&self) -> C64 {
        self.p.point() * self.r
    }

    /// `e^{i alpha} - z`.
    pub fn gap(&self, alpha: f64) -> C64 {
        let d = self.p.delta_from(alpha);
        let s = (0.5 * d).sin();
        // 1 - r e^{id} = (1 - r) + 2 r sin^2(d/2) - i r sin d
        let w = C64::new((1.0 - self.r) + 2.0 * self.r * s * s, -self.r * d.sin());
        C64::from_polar(1.0, alpha) * w
    }
}

/// Finite Blaschke product with zeros strictly inside the disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    zeros: Vec<C64>,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<C64>) -> Result<Self> {
        for a in &zeros {
            if !(a.norm() < 1.0) || !a.re.is_finite() || !a.im.is_finite() {
                return Err(HbdError::InvalidInput(format!("Blaschke zero {a} is not inside the disk")));
            }
        }
        Ok(Self { zeros })
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// `(conj(a)/|a|) (a - z)/(1 - conj(a) z)`, or `z` when `a = 0`.
    pub fn factor(a: C64, z: C64) -> C64 {
        if a == C64::new(0.0, 0.0) {
            z
        } else {
            (a.conj() / a.norm()) * (a - z) / (C64::new(1.0, 0.0) - a.conj() * z)
        }
    }

    pub fn factor_deriv(a: C64, z: C64) -> C64 {
        if a == C64::new(0.0, 0.0) {
            C64::new(1.0, 0.0)
        } else {
            let d = C64::new(1.0, 0.0) - a.conj() * z;
            (a.conj() / a.norm()) * (a.norm_sqr() - 1.0) / (d * d)
        }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.zeros.iter().fold(C64::new(1.0, 0.0), |acc, &a| acc * Self::factor(a, z))
    }

    pub fn deriv(&self, z: C64) -> C64 {
        let mut total = C64::new(0.0, 0.0);
        for (k, &ak) in self.zeros.iter().enumerate() {
            let mut term = Self::factor_deriv(ak, z);
            for (j, &aj) in self.zeros.iter().enumerate() {
                if j != k {
                    term *= Self::factor(aj, z);
                }
            }
            total += term;
        }
        total
    }

    pub fn log_modulus(&self, z: C64) -> f64 {
        self.zeros.iter().map(|&a| Self::factor(a, z).norm().ln()).sum()
    }
}

/// A point mass of the singular measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub angle: UnitCirclePoint,
    pub mass: f64,
}

/// `exp(-sum_k mass_k (zeta_k + z)/(zeta_k - z))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicSingularInner {
    atoms: Vec<Atom>,
}

impl AtomicSingularInner {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.iter().any(|a| !(a.mass > 0.0) || !a.mass.is_finite()) {
            return Err(HbdError::InvalidInput("singular atoms need positive finite mass".into()));
        }
        Ok(Self { atoms })
    }

    pub fn single(angle: f64, mass: f64) -> Result<Self> {
        Self::new(vec![Atom { angle: UnitCirclePoint::new(angle), mass }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn exponent(&self, z: C64) -> C64 {
        self.atoms
            .iter()
            .map(|a| {
                let zeta = a.angle.point();
                -(zeta + z) / (zeta - z) * a.mass
            })
            .sum()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.exponent(z).exp()
    }

    pub fn deriv(&self, z: C64) -> C64 {
        let d: C64 = self
            .atoms
            .iter()
            .map(|a| {
                let zeta = a.angle.point();
                let q = zeta - z;
                -(zeta * 2.0 * a.mass) / (q * q)
            })
            .sum();
        self.eval(z) * d
    }

    /// Boundary value `exp(-i sum mass cot(delta/2))`, exact in the angle.
    pub fn boundary(&self, p: &BoundaryPoint) -> Result<C64> {
        let mut phase = 0.0;
        for a in &self.atoms {
            let d = p.delta_from(a.angle.angle());
            if d == 0.0 {
                return Err(HbdError::AtomEvaluation { angle: a.angle.angle() });
            }
            phase -= a.mass / (0.5 * d).tan();
        }
        Ok(C64::from_polar(1.0, phase))
    }

    pub fn boundary_deriv(&self, p: &BoundaryPoint) -> Result<C64> {
        let u = self.boundary(p)?;
        let mut d = C64::new(0.0, 0.0);
        for a in &self.atoms {
            let q = p.chord_from(a.angle.angle());
            d -= a.angle.point() * 2.0 * a.mass / (q * q);
        }
        Ok(u * d)
    }

    pub fn exponent_at(&self, x: &DiskPoint) -> C64 {
        let z = x.z();
        self.atoms
            .iter()
            .map(|a| -(a.angle.point() + z) / x.gap(a.angle.angle()) * a.mass)
            .sum()
    }

    pub fn deriv_at(&self, x: &DiskPoint) -> C64 {
        let d: C64 = self
            .atoms
            .iter()
            .map(|a| {
                let q = x.gap(a.angle.angle());
                -(a.angle.point() * 2.0 * a.mass) / (q * q)
            })
            .sum();
        self.exponent_at(x).exp() * d
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }
}

/// Boundary function `log|b|` of an outer factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum LogModulus {
    /// `log|b| = c` everywhere.
    Constant(f64),
    /// `N` uniform samples at `2 pi k / N`, interpolated piecewise-linearly.
    Samples(Vec<f64>),
    /// `scale * prod_j 1/(1 - conj(p_j) z)` with `|p_j| < 1`; evaluated in closed form.
    Rational { scale: C64, poles: Vec<C64> },
    /// Named closed-form boundary functions.
    Named(NamedLogModulus),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedLogModulus {
    /// `log sqrt(1 - |1 - lambda|^{3/2})` on `|arg lambda| <= pi/6`, zero elsewhere.
    #[serde(rename = "example2-phi")]
    Example2Phi,
}

impl LogModulus {
    pub fn value(&self, theta: f64) -> f64 {
        match self {
            LogModulus::Constant(c) => *c,
            LogModulus::Samples(s) => {
                let n = s.len();
                let x = wrap_tau(theta) / TAU * n as f64;
                let k = (x.floor() as usize).min(n - 1);
                let frac = x - k as f64;
                s[k] * (1.0 - frac) + s[(k + 1) % n] * frac
            }
            LogModulus::Rational { scale, poles } => {
                // |1 - conj(p) lambda|^2 = (1-|p|)^2 (1 + 4|p| sin^2(d/2)/(1-|p|)^2): the
                // constant part cancels exactly when |scale| = prod (1-|p|)
                let base = scale.norm().ln() - poles.iter().map(|p| (1.0 - p.norm()).ln()).sum::<f64>();
                base - 0.5
                    * poles
                        .iter()
                        .map(|p| {
                            let r = p.norm();
                            let s = (0.5 * (theta - p.arg())).sin();
                            (4.0 * r * s * s / ((1.0 - r) * (1.0 - r))).ln_1p()
                        })
                        .sum::<f64>()
            }
            LogModulus::Named(NamedLogModulus::Example2Phi) => example2_phi(theta),
        }
    }

    /// Angles where the boundary function is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            LogModulus::Named(NamedLogModulus::Example2Phi) => {
                vec![0.0, FRAC_PI_6, TAU - FRAC_PI_6]
            }
            _ => Vec::new(),
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            LogModulus::Constant(c) => *c == 0.0,
            LogModulus::Samples(s) => s.iter().all(|&v| v == 0.0),
            LogModulus::Rational { scale, poles } => poles.is_empty() && (scale.norm() - 1.0).abs() < 1e-15,
            LogModulus::Named(_) => false,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            LogModulus::Constant(c) if !(*c <= 0.0) => {
                Err(HbdError::InvalidInput("constant log-modulus must be <= 0".into()))
            }
            LogModulus::Samples(s) if s.len() < 16 || s.iter().any(|v| !(*v <= 0.0)) => {
                Err(HbdError::InvalidInput("need >= 16 log-modulus samples, all <= 0".into()))
            }
            LogModulus::Rational { poles, .. } if poles.iter().any(|p| !(p.norm() < 1.0)) => {
                Err(HbdError::InvalidInput("rational outer poles must satisfy |p| < 1".into()))
            }
            LogModulus::Rational { .. } => {
                // unit-ball constraint on the circle
                let worst = (0..4096).map(|k| self.value(TAU * k as f64 / 4096.0)).fold(f64::MIN, f64::max);
                if worst > 1e-12 {
                    Err(HbdError::InvalidInput(format!("rational outer exceeds modulus 1 (log {worst})")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

pub fn example2_phi(theta: f64) -> f64 {
    let t = wrap_pi(theta);
    if t.abs() <= FRAC_PI_6 {
        let d = 2.0 * (0.5 * t).sin().abs();
        0.5 * (-d.powf(1.5)).ln_1p()
    } else {
        0.0
    }
}

/// Outer function `exp(int (lambda+z)/(lambda-z) log|b(lambda)| dm)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterFromModulus {
    pub log_modulus: LogModulus,
    #[serde(skip)]
    quad: QuadratureConfig,
}

impl OuterFromModulus {
    pub fn new(log_modulus: LogModulus) -> Result<Self> {
        Self::with_quadrature(log_modulus, QuadratureConfig::default())
    }

    pub fn with_quadrature(log_modulus: LogModulus, quad: QuadratureConfig) -> Result<Self> {
        log_modulus.validate()?;
        Ok(Self { log_modulus, quad })
    }

    /// Largest `|z|` at which the quadrature route is trusted. Samples need
    /// ten nodes across the Herglotz kernel width `1 - |z|`.
    pub fn resolvable_radius(&self) -> f64 {
        match &self.log_modulus {
            LogModulus::Constant(_) | LogModulus::Rational { .. } => 1.0,
            LogModulus::Samples(s) => 1.0 - 10.0 / s.len() as f64,
            LogModulus::Named(_) => 1.0 - 1e-13,
        }
    }

    fn check_radius(&self, z: C64) -> Result<()> {
        let limit = self.resolvable_radius();
        if z.norm() > limit {
            Err(HbdError::TooCloseToBoundary { radius: z.norm(), limit })
        } else {
            Ok(())
        }
    }

    fn breaks(&self, center: f64) -> Vec<f64> {
        let mut b = vec![center - PI, center, center + PI];
        for k in self.log_modulus.kinks() {
            let t = center + wrap_pi(k - center);
            if (t - center).abs() > 1e-15 && (t - center).abs() < PI {
                b.push(t);
            }
        }
        b.sort_by(f64::total_cmp);
        b
    }

    /// `int K(lambda, z) (phi(lambda) - phi(arg z)) dm + c0 * phi(arg z)`, where
    /// `int K dm = c0`; subtracting the value at the peak keeps the integrand bounded.
    fn herglotz_type<K: Fn(C64) -> C64>(&self, z: C64, kernel: K, c0: f64) -> Result<C64> {
        let center = if z.norm() > 0.0 { z.arg() } else { 0.0 };
        let phi0 = self.log_modulus.value(center);
        let breaks = self.breaks(center);
        let r = adaptive_with_breaks(
            &mut |t: f64| {
                let lambda = C64::from_polar(1.0, t);
                kernel(lambda) * (self.log_modulus.value(t) - phi0)
            },
            &breaks,
            self.quad.abs_tol,
            self.quad.rel_tol,
            self.quad.max_intervals,
        );
        if !r.converged && r.error > 1e-7 * (1.0 + r.value.norm()) {
            return Err(HbdError::QuadratureDiverged(format!(
                "outer kernel integral at |z| = {} (error {:e})",
                z.norm(),
                r.error
            )));
        }
        Ok(r.value / TAU + phi0 * c0)
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        self.check_radius(z)?;
        match &self.log_modulus {
            LogModulus::Constant(c) => Ok(C64::new(c.exp(), 0.0)),
            LogModulus::Rational { scale, poles } => {
                Ok(poles.iter().fold(*scale, |acc, p| acc / (C64::new(1.0, 0.0) - p.conj() * z)))
            }
            _ => {
                if z.norm() >= 1.0 {
                    return Err(HbdError::TooCloseToBoundary { radius: z.norm(), limit: self.resolvable_radius() });
                }
                Ok(self.herglotz_type(z, |l| (l + z) / (l - z), 1.0)?.exp())
            }
        }
    }

    pub fn deriv(&self, z: C64) -> Result<C64> {
        self.check_radius(z)?;
        match &self.log_modulus {
            LogModulus::Constant(_) => Ok(C64::new(0.0, 0.0)),
            LogModulus::Rational { poles, .. } => {
                let o = self.eval(z)?;
                let s: C64 = poles.iter().map(|p| p.conj() / (C64::new(1.0, 0.0) - p.conj() * z)).sum();
                Ok(o * s)
            }
            _ => {
                let o = self.eval(z)?;
                let d = self.herglotz_type(z, |l| l * 2.0 / ((l - z) * (l - z)), 0.0)?;
                Ok(o * d)
            }
        }
    }

    /// Boundary value: modulus `e^{phi}` and phase from the conjugate function.
    pub fn boundary(&self, p: &BoundaryPoint) -> Result<C64> {
        match &self.log_modulus {
            LogModulus::Constant(c) => Ok(C64::new(c.exp(), 0.0)),
            LogModulus::Rational { .. } => self.eval(p.point()),
            _ => {
                let theta = p.angle();
                let phi0 = self.log_modulus.value(theta);
                let breaks = self.breaks(theta);
                let r = adaptive_with_breaks(
                    &mut |t: f64| {
                        let d = 0.5 * (theta - t);
                        if d == 0.0 {
                            0.0
                        } else {
                            (self.log_modulus.value(t) - phi0) / d.tan()
                        }
                    },
                    &breaks,
                    self.quad.abs_tol,
                    self.quad.rel_tol,
                    self.quad.max_intervals,
                );
                Ok(C64::from_polar(phi0.exp(), r.value / TAU))
            }
        }
    }

    pub fn log_modulus_at(&self, z: C64) -> Result<f64> {
        Ok(self.eval(z)?.norm().ln())
    }

    pub fn landmarks(&self) -> Vec<f64> {
        self.log_modulus.kinks()
    }
}

/// Schur-class function given by its canonical factors.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SchurFunction {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blaschke: Option<BlaschkeProduct>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singular: Option<AtomicSingularInner>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<OuterFromModulus>,
}

impl SchurFunction {
    pub fn blaschke(zeros: Vec<C64>) -> Result<Self> {
        Ok(Self { blaschke: Some(BlaschkeProduct::new(zeros)?), ..Default::default() })
    }

    pub fn singular(atoms: Vec<Atom>) -> Result<Self> {
        Ok(Self { singular: Some(AtomicSingularInner::new(atoms)?), ..Default::default() })
    }

    pub fn outer(log_modulus: LogModulus) -> Result<Self> {
        Ok(Self { outer: Some(OuterFromModulus::new(log_modulus)?), ..Default::default() })
    }

    /// The zero function, realized as the outer factor with `log|b| = -inf`
    /// is not representable; `b = 0` is handled by callers through
    /// [`AnalyticFunction::szego`]. This helper returns `b(z) = z^n`.
    pub fn monomial(n: usize) -> Self {
        Self::blaschke(vec![C64::new(0.0, 0.0); n]).expect("zeros at the origin are valid")
    }

    pub fn times(mut self, other: SchurFunction) -> Result<Self> {
        if let Some(b) = other.blaschke {
            let mut zeros = self.blaschke.map(|x| x.zeros).unwrap_or_default();
            zeros.extend(b.zeros);
            self.blaschke = Some(BlaschkeProduct::new(zeros)?);
        }
        if let Some(s) = other.singular {
            let mut atoms = self.singular.map(|x| x.atoms).unwrap_or_default();
            atoms.extend(s.atoms);
            self.singular = Some(AtomicSingularInner::new(atoms)?);
        }
        if let Some(o) = other.outer {
            if self.outer.is_some() {
                return Err(HbdError::UnsupportedRepresentation("product of two outer factors".into()));
            }
            self.outer = Some(o);
        }
        Ok(self)
    }

    pub fn is_inner(&self) -> bool {
        self.outer.as_ref().map_or(true, |o| o.log_modulus.is_identically_zero())
    }

    pub fn is_finite_blaschke(&self) -> bool {
        self.is_inner() && self.singular.as_ref().map_or(true, |s| s.atoms.is_empty())
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let mut v = C64::new(1.0, 0.0);
        if let Some(b) = &self.blaschke {
            v *= b.eval(z);
        }
        if let Some(s) = &self.singular {
            if z.norm() >= 1.0 {
                v *= s.boundary(&BoundaryPoint::at(z.arg()))?;
            } else {
                v *= s.eval(z);
            }
        }
        if let Some(o) = &self.outer {
            v *= o.eval(z)?;
        }
        Ok(v)
    }

    pub fn deriv(&self, z: C64) -> Result<C64> {
        let mut parts: Vec<(C64, C64)> = Vec::new();
        if let Some(b) = &self.blaschke {
            parts.push((b.eval(z), b.deriv(z)));
        }
        if let Some(s) = &self.singular {
            if z.norm() >= 1.0 {
                let p = BoundaryPoint::at(z.arg());
                parts.push((s.boundary(&p)?, s.boundary_deriv(&p)?));
            } else {
                parts.push((s.eval(z), s.deriv(z)));
            }
        }
        if let Some(o) = &self.outer {
            parts.push((o.eval(z)?, o.deriv(z)?));
        }
        Ok(product_rule(&parts))
    }

    /// [`Self::eval`] at an interior point given in polar offset form.
    pub fn eval_at(&self, x: &DiskPoint) -> Result<C64> {
        let z = x.z();
        let mut v = C64::new(1.0, 0.0);
        if let Some(b) = &self.blaschke {
            v *= b.eval(z);
        }
        if let Some(s) = &self.singular {
            v *= s.exponent_at(x).exp();
        }
        if let Some(o) = &self.outer {
            v *= o.eval(z)?;
        }
        Ok(v)
    }

    pub fn deriv_at(&self, x: &DiskPoint) -> Result<C64> {
        let z = x.z();
        let mut parts: Vec<(C64, C64)> = Vec::new();
        if let Some(b) = &self.blaschke {
            parts.push((b.eval(z), b.deriv(z)));
        }
        if let Some(s) = &self.singular {
            parts.push((s.exponent_at(x).exp(), s.deriv_at(x)));
        }
        if let Some(o) = &self.outer {
            parts.push((o.eval(z)?, o.deriv(z)?));
        }
        Ok(product_rule(&parts))
    }

    /// Boundary value at a circle node (closed form or conjugate function).
    pub fn boundary(&self, p: &BoundaryPoint) -> Result<C64> {
        let mut v = C64::new(1.0, 0.0);
        if let Some(b) = &self.blaschke {
            v *= b.eval(p.point());
        }
        if let Some(s) = &self.singular {
            v *= s.boundary(p)?;
        }
        if let Some(o) = &self.outer {
            v *= o.boundary(p)?;
        }
        Ok(v)
    }

    /// `1 - |b|^2` at a circle node, from the log-modulus so that values
    /// near 1 keep their relative precision.
    pub fn boundary_defect(&self, p: &BoundaryPoint) -> Result<f64> {
        if let Some(s) = &self.singular {
            s.boundary(p)?;
        }
        let l = self.outer.as_ref().map_or(0.0, |o| o.log_modulus.value(p.angle()));
        Ok(-(2.0 * l).exp_m1())
    }

    /// `log|b(z)|`, finite even where `|b(z)|` underflows.
    pub fn log_modulus(&self, z: C64) -> Result<f64> {
        let mut l = 0.0;
        if let Some(b) = &self.blaschke {
            l += b.log_modulus(z);
        }
        if let Some(s) = &self.singular {
            l += s.exponent(z).re;
        }
        if let Some(o) = &self.outer {
            l += o.log_modulus_at(z)?;
        }
        Ok(l)
    }

    /// `b(omega) != 0`, decided structurally.
    pub fn nonvanishing_at(&self, omega: C64) -> bool {
        self.blaschke.as_ref().map_or(true, |b| b.zeros.iter().all(|&a| (a - omega).norm() > 0.0))
    }

    /// Circle angles where boundary values are singular or non-smooth.
    pub fn landmarks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if let Some(s) = &self.singular {
            out.extend(s.atoms.iter().map(|a| a.angle.angle()));
        }
        if let Some(o) = &self.outer {
            out.extend(o.landmarks());
        }
        out
    }

    /// Radial limit decided from the factor structure, when possible.
    pub fn structural_limit(&self, zeta: UnitCirclePoint) -> Option<Result<C64>> {
        if let Some(s) = &self.singular {
            if s.atoms.iter().any(|a| a.angle.chord(&zeta) == 0.0) {
                return Some(Ok(C64::new(0.0, 0.0)));
            }
        }
        let on_kink = self.outer.as_ref().map_or(false, |o| {
            o.landmarks().iter().any(|&k| chord(k, zeta.angle()) < 1e-15)
        });
        if on_kink {
            return None;
        }
        Some(self.boundary(&zeta.boundary()))
    }

    /// Closed-form evaluation exists on the whole closed disk.
    pub fn is_rational(&self) -> bool {
        self.singular.as_ref().map_or(true, |s| s.atoms.is_empty())
            && self.outer.as_ref().map_or(true, |o| {
                matches!(o.log_modulus, LogModulus::Constant(_) | LogModulus::Rational { .. })
            })
    }
}

fn product_rule(parts: &[(C64, C64)]) -> C64 {
    let mut total = C64::new(0.0, 0.0);
    for k in 0..parts.len() {
        let mut term = parts[k].1;
        for (j, p) in parts.iter().enumerate() {
            if j != k {
                term *= p.0;
            }
        }
        total += term;
    }
    total
}

/// Origin of an [`AnalyticFunction`]; decides finite-difference tolerances
/// and whether boundary values are available in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Polynomial,
    Rational,
    Kernel,
    Schur,
    Composite,
}

/// Holomorphic function on the disk with derivative and boundary access.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AnalyticFunction {
    /// Coefficients in increasing degree.
    Polynomial { coeffs: Vec<C64> },
    /// `1/(1 - conj(pole) z)`, `|pole| <= 1`.
    Cauchy { pole: C64 },
    /// Principal branch of `(z + shift)^exponent`.
    Power { shift: C64, exponent: f64 },
    Schur { b: SchurFunction },
    /// `k^b(z, omega) = (1 - conj(b(omega)) b(z)) / (1 - conj(omega) z)`.
    Kernel { b: SchurFunction, anchor: C64, b_anchor: C64 },
    /// `k^b_zeta(z) = (1 - conj(b(zeta)) b(z)) / (1 - conj(zeta) z)`.
    BoundaryKernel { b: SchurFunction, zeta: UnitCirclePoint, b_zeta: C64 },
    Sum { terms: Vec<(C64, AnalyticFunction)> },
    Product { factors: Vec<AnalyticFunction> },
    /// `(f(z) - value) / (z - zeta)`.
    DifferenceQuotient { f: Box<AnalyticFunction>, zeta: UnitCirclePoint, value: C64 },
}

/// Outcome of a radial boundary-value search.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialLimit {
    Value(C64),
    /// The sequence `f((1 - 2^{-k}) zeta)` did not settle; carries the samples.
    NoLimit { samples: Vec<C64> },
}

impl RadialLimit {
    pub fn value(&self) -> Option<C64> {
        match self {
            RadialLimit::Value(v) => Some(*v),
            RadialLimit::NoLimit { .. } => None,
        }
    }
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

impl AnalyticFunction {
    pub fn polynomial(coeffs: Vec<C64>) -> Self {
        AnalyticFunction::Polynomial { coeffs }
    }

    pub fn real_polynomial(coeffs: &[f64]) -> Self {
        Self::polynomial(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn monomial(n: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); n + 1];
        c[n] = one();
        Self::polynomial(c)
    }

    pub fn constant(c: C64) -> Self {
        Self::polynomial(vec![c])
    }

    /// Szego kernel `c_omega`.
    pub fn szego(pole: C64) -> Result<Self> {
        if !(pole.norm() <= 1.0) {
            return Err(HbdError::InvalidInput(format!("Cauchy pole {pole} outside the closed disk")));
        }
        Ok(AnalyticFunction::Cauchy { pole })
    }

    pub fn power(shift: C64, exponent: f64) -> Result<Self> {
        if exponent.fract() != 0.0 {
            // the image disk of radius 1 around `shift` must avoid (-inf, 0]
            let dist_to_cut = if shift.re >= 0.0 { shift.norm() } else { shift.im.abs() };
            if dist_to_cut < 1.0 - 1e-15 {
                return Err(HbdError::InvalidInput("branch cut of (z + shift)^a meets the disk".into()));
            }
        } else if exponent < 0.0 && shift.norm() < 1.0 {
            return Err(HbdError::InvalidInput("pole of (z + shift)^a inside the disk".into()));
        }
        Ok(AnalyticFunction::Power { shift, exponent })
    }

    pub fn schur(b: SchurFunction) -> Self {
        AnalyticFunction::Schur { b }
    }

    pub fn dbr_kernel(b: SchurFunction, anchor: C64) -> Result<Self> {
        if !(anchor.norm() < 1.0) {
            return Err(HbdError::InvalidInput("kernel anchor must lie in the open disk".into()));
        }
        let b_anchor = b.eval(anchor)?;
        Ok(AnalyticFunction::Kernel { b, anchor, b_anchor })
    }

    pub fn sum(terms: Vec<(C64, AnalyticFunction)>) -> Self {
        AnalyticFunction::Sum { terms }
    }

    pub fn product(factors: Vec<AnalyticFunction>) -> Self {
        AnalyticFunction::Product { factors }
    }

    pub fn difference_quotient(f: AnalyticFunction, zeta: UnitCirclePoint, value: C64) -> Self {
        AnalyticFunction::DifferenceQuotient { f: Box::new(f), zeta, value }
    }

    pub fn provenance(&self) -> Provenance {
        match self {
            AnalyticFunction::Polynomial { .. } => Provenance::Polynomial,
            AnalyticFunction::Cauchy { .. } | AnalyticFunction::Power { .. } => Provenance::Rational,
            AnalyticFunction::Schur { .. } => Provenance::Schur,
            AnalyticFunction::Kernel { .. } | AnalyticFunction::BoundaryKernel { .. } => Provenance::Kernel,
            _ => Provenance::Composite,
        }
    }

    /// All boundary values come from closed forms (no outer quadrature).
    pub fn is_closed_form(&self) -> bool {
        match self {
            AnalyticFunction::Polynomial { .. } | AnalyticFunction::Cauchy { .. } | AnalyticFunction::Power { .. } => true,
            AnalyticFunction::Schur { b } | AnalyticFunction::Kernel { b, .. } | AnalyticFunction::BoundaryKernel { b, .. } => {
                b.outer.as_ref().map_or(true, |o| {
                    matches!(o.log_modulus, LogModulus::Constant(_) | LogModulus::Rational { .. })
                })
            }
            AnalyticFunction::Sum { terms } => terms.iter().all(|(_, f)| f.is_closed_form()),
            AnalyticFunction::Product { factors } => factors.iter().all(|f| f.is_closed_form()),
            AnalyticFunction::DifferenceQuotient { f, .. } => f.is_closed_form(),
        }
    }

    /// Bounded on the disk by construction, so the boundary `L^2` norm is the H² norm.
    pub fn is_bounded(&self) -> bool {
        match self {
            AnalyticFunction::Polynomial { .. } | AnalyticFunction::Schur { .. } | AnalyticFunction::Kernel { .. } => true,
            AnalyticFunction::Cauchy { pole } => pole.norm() < 1.0,
            AnalyticFunction::Power { shift, exponent } => *exponent >= 0.0 || shift.norm() > 1.0,
            // analytic across the circle near zeta unless a landmark sits there
            AnalyticFunction::BoundaryKernel { b, zeta, .. } => {
                b.landmarks().iter().all(|&t| chord(t, zeta.angle()) > 0.0)
            }
            AnalyticFunction::Sum { terms } => terms.iter().all(|(_, f)| f.is_bounded()),
            AnalyticFunction::Product { factors } => factors.iter().all(|f| f.is_bounded()),
            AnalyticFunction::DifferenceQuotient { .. } => false,
        }
    }

    /// Rational in `z`: analytic across the circle except at finitely many poles.
    pub fn is_rational(&self) -> bool {
        match self {
            AnalyticFunction::Polynomial { .. } | AnalyticFunction::Cauchy { .. } => true,
            AnalyticFunction::Power { exponent, .. } => exponent.fract() == 0.0,
            AnalyticFunction::Schur { b } | AnalyticFunction::Kernel { b, .. } | AnalyticFunction::BoundaryKernel { b, .. } => {
                b.is_rational()
            }
            AnalyticFunction::Sum { terms } => terms.iter().all(|(_, f)| f.is_rational()),
            AnalyticFunction::Product { factors } => factors.iter().all(|f| f.is_rational()),
            AnalyticFunction::DifferenceQuotient { f, .. } => f.is_rational(),
        }
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        Ok(match self {
            AnalyticFunction::Polynomial { coeffs } => horner(coeffs, z),
            AnalyticFunction::Cauchy { pole } => one() / (one() - pole.conj() * z),
            AnalyticFunction::Power { shift, exponent } => (z + shift).powf(*exponent),
            AnalyticFunction::Schur { b } => b.eval(z)?,
            AnalyticFunction::Kernel { b, anchor, b_anchor } => {
                (one() - b_anchor.conj() * b.eval(z)?) / (one() - anchor.conj() * z)
            }
            AnalyticFunction::BoundaryKernel { b, zeta, b_zeta } => {
                (one() - b_zeta.conj() * b.eval(z)?) / (one() - zeta.point().conj() * z)
            }
            AnalyticFunction::Sum { terms } => {
                let mut s = C64::new(0.0, 0.0);
                for (c, f) in terms {
                    s += c * f.eval(z)?;
                }
                s
            }
            AnalyticFunction::Product { factors } => {
                let mut p = one();
                for f in factors {
                    p *= f.eval(z)?;
                }
                p
            }
            AnalyticFunction::DifferenceQuotient { f, zeta, value } => (f.eval(z)? - value) / (z - zeta.point()),
        })
    }

    pub fn deriv(&self, z: C64) -> Result<C64> {
        Ok(match self {
            AnalyticFunction::Polynomial { coeffs } => {
                let d: Vec<C64> = coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
                horner(&d, z)
            }
            AnalyticFunction::Cauchy { pole } => {
                let q = one() - pole.conj() * z;
                pole.conj() / (q * q)
            }
            AnalyticFunction::Power { shift, exponent } => (z + shift).powf(exponent - 1.0) * *exponent,
            AnalyticFunction::Schur { b } => b.deriv(z)?,
            AnalyticFunction::Kernel { b, anchor, b_anchor } => {
                kernel_deriv(b.eval(z)?, b.deriv(z)?, *b_anchor, anchor.conj(), z)
            }
            AnalyticFunction::BoundaryKernel { b, zeta, b_zeta } => {
                kernel_deriv(b.eval(z)?, b.deriv(z)?, *b_zeta, zeta.point().conj(), z)
            }
            AnalyticFunction::Sum { terms } => {
                let mut s = C64::new(0.0, 0.0);
                for (c, f) in terms {
                    s += c * f.deriv(z)?;
                }
                s
            }
            AnalyticFunction::Product { factors } => {
                let mut parts = Vec::with_capacity(factors.len());
                for f in factors {
                    parts.push((f.eval(z)?, f.deriv(z)?));
                }
                product_rule(&parts)
            }
            AnalyticFunction::DifferenceQuotient { f, zeta, value } => {
                let d = z - zeta.point();
                (f.deriv(z)? * d - (f.eval(z)? - value)) / (d * d)
            }
        })
    }

    /// [`Self::eval`] at an interior point in polar offset form; denominators
    /// vanishing on the circle are formed without cancellation.
    pub fn eval_at(&self, x: &DiskPoint) -> Result<C64> {
        let z = x.z();
        Ok(match self {
            AnalyticFunction::Cauchy { pole } if pole.norm() >= 1.0 - 1e-15 => {
                // 1 - conj(w) z = conj(w) (w - z) for |w| = 1
                one() / (pole.conj() * x.gap(pole.arg()))
            }
            AnalyticFunction::Power { shift, exponent } if (shift.norm() - 1.0).abs() < 1e-15 => {
                (-x.gap((-shift).arg())).powf(*exponent)
            }
            AnalyticFunction::Schur { b } => b.eval_at(x)?,
            AnalyticFunction::Kernel { b, anchor, b_anchor } => {
                (one() - b_anchor.conj() * b.eval_at(x)?) / (one() - anchor.conj() * z)
            }
            AnalyticFunction::BoundaryKernel { b, zeta, b_zeta } => {
                (one() - b_zeta.conj() * b.eval_at(x)?) / (zeta.point().conj() * x.gap(zeta.angle()))
            }
            AnalyticFunction::Sum { terms } => {
                let mut s = C64::new(0.0, 0.0);
                for (c, f) in terms {
                    s += c * f.eval_at(x)?;
                }
                s
            }
            AnalyticFunction::Product { factors } => {
                let mut p = one();
                for f in factors {
                    p *= f.eval_at(x)?;
                }
                p
            }
            AnalyticFunction::DifferenceQuotient { f, zeta, value } => (f.eval_at(x)? - value) / (-x.gap(zeta.angle())),
            _ => self.eval(z)?,
        })
    }

    pub fn deriv_at(&self, x: &DiskPoint) -> Result<C64> {
        let z = x.z();
        Ok(match self {
            AnalyticFunction::Cauchy { pole } if pole.norm() >= 1.0 - 1e-15 => {
                let q = pole.conj() * x.gap(pole.arg());
                pole.conj() / (q * q)
            }
            AnalyticFunction::Power { shift, exponent } if (shift.norm() - 1.0).abs() < 1e-15 => {
                (-x.gap((-shift).arg())).powf(exponent - 1.0) * *exponent
            }
            AnalyticFunction::Schur { b } => b.deriv_at(x)?,
            AnalyticFunction::Kernel { b, anchor, b_anchor } => {
                let q = one() - anchor.conj() * z;
                kernel_deriv_q(b.eval_at(x)?, b.deriv_at(x)?, *b_anchor, anchor.conj(), q)
            }
            AnalyticFunction::BoundaryKernel { b, zeta, b_zeta } => {
                let q = zeta.point().conj() * x.gap(zeta.angle());
                kernel_deriv_q(b.eval_at(x)?, b.deriv_at(x)?, *b_zeta, zeta.point().conj(), q)
            }
            AnalyticFunction::Sum { terms } => {
                let mut s = C64::new(0.0, 0.0);
                for (c, f) in terms {
                    s += c * f.deriv_at(x)?;
                }
                s
            }
            AnalyticFunction::Product { factors } => {
                let mut parts = Vec::with_capacity(factors.len());
                for f in factors {
                    parts.push((f.eval_at(x)?, f.deriv_at(x)?));
                }
                product_rule(&parts)
            }
            AnalyticFunction::DifferenceQuotient { f, zeta, value } => {
                let d = -x.gap(zeta.angle());
                (f.deriv_at(x)? * d - (f.eval_at(x)? - value)) / (d * d)
            }
            _ => self.deriv(z)?,
        })
    }

    /// Boundary value at a circle node.
    pub fn boundary(&self, p: &BoundaryPoint) -> Result<C64> {
        Ok(match self {
            AnalyticFunction::Schur { b } => b.boundary(p)?,
            AnalyticFunction::Kernel { b, anchor, b_anchor } => {
                (one() - b_anchor.conj() * b.boundary(p)?) / (one() - anchor.conj() * p.point())
            }
            AnalyticFunction::BoundaryKernel { b, zeta, b_zeta } => {
                let q = p.chord_from(zeta.angle()) * (-zeta.point().conj());
                if q == C64::new(0.0, 0.0) {
                    // removable when b is smooth at zeta
                    b_zeta.conj() * b.deriv(zeta.point())? * zeta.point()
                } else {
                    (one() - b_zeta.conj() * b.boundary(p)?) / q
                }
            }
            AnalyticFunction::Sum { terms } => {
                let mut s = C64::new(0.0, 0.0);
                for (c, f) in terms {
                    s += c * f.boundary(p)?;
                }
                s
            }
            AnalyticFunction::Product { factors } => {
                let mut v = one();
                for f in factors {
                    v *= f.boundary(p)?;
                }
                v
            }
            AnalyticFunction::DifferenceQuotient { f, zeta, value } => {
                let q = p.chord_from(zeta.angle());
                if q == C64::new(0.0, 0.0) {
                    f.deriv(zeta.point())?
                } else {
                    (f.boundary(p)? - value) / q
                }
            }
            AnalyticFunction::Cauchy { pole } if pole.norm() >= 1.0 => {
                // 1 - conj(pole) lambda = -conj(pole) (lambda - pole)
                let q = p.chord_from(pole.arg()) * (-pole.conj());
                one() / q
            }
            AnalyticFunction::Power { shift, exponent } if (shift.norm() - 1.0).abs() < 1e-15 => {
                p.chord_from((-shift).arg()).powf(*exponent)
            }
            _ => self.eval(p.point())?,
        })
    }

    /// Boundary angles where the function or its boundary values are singular.
    pub fn landmarks(&self) -> Vec<f64> {
        let mut out = match self {
            AnalyticFunction::Polynomial { .. } => Vec::new(),
            AnalyticFunction::Cauchy { pole } => {
                if pole.norm() >= 1.0 - 1e-15 {
                    vec![pole.arg()]
                } else {
                    Vec::new()
                }
            }
            AnalyticFunction::Power { shift, .. } => {
                if (shift.norm() - 1.0).abs() < 1e-15 {
                    vec![(-shift).arg()]
                } else {
                    Vec::new()
                }
            }
            AnalyticFunction::Schur { b } | AnalyticFunction::Kernel { b, .. } => b.landmarks(),
            AnalyticFunction::BoundaryKernel { b, zeta, .. } => {
                let mut l = b.landmarks();
                if !schur_smooth_at(b, zeta.angle()) {
                    l.push(zeta.angle());
                }
                l
            }
            AnalyticFunction::Sum { terms } => terms.iter().flat_map(|(_, f)| f.landmarks()).collect(),
            AnalyticFunction::Product { factors } => factors.iter().flat_map(|f| f.landmarks()).collect(),
            AnalyticFunction::DifferenceQuotient { f, zeta, .. } => {
                let mut l = f.landmarks();
                if !(f.is_closed_form() && f.regular_near(zeta.angle())) {
                    l.push(zeta.angle());
                }
                l
            }
        };
        for t in out.iter_mut() {
            *t = wrap_tau(*t);
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        out
    }

    /// Directions of interior poles and kernel anchors close enough to the
    /// circle to make boundary values sharply peaked (`|pole| > 1/2`).
    pub fn peaks(&self) -> Vec<f64> {
        let near = |w: &C64| w.norm() > 0.5 && w.norm() < 1.0;
        match self {
            AnalyticFunction::Cauchy { pole } if near(pole) => vec![pole.arg()],
            AnalyticFunction::Kernel { anchor, .. } if near(anchor) => vec![anchor.arg()],
            AnalyticFunction::Sum { terms } => terms.iter().flat_map(|(_, f)| f.peaks()).collect(),
            AnalyticFunction::Product { factors } => factors.iter().flat_map(|f| f.peaks()).collect(),
            AnalyticFunction::DifferenceQuotient { f, .. } => f.peaks(),
            _ => Vec::new(),
        }
    }

    /// Smallest distance `| |w| - 1 |` of an interior pole, shift or kernel
    /// anchor to the circle (1 when there is none).
    pub fn interior_scale(&self) -> f64 {
        let gap = |w: &C64| {
            let g = (w.norm() - 1.0).abs();
            if g > 1e-15 { g.min(1.0) } else { 1.0 }
        };
        match self {
            AnalyticFunction::Cauchy { pole } => gap(pole),
            AnalyticFunction::Power { shift, .. } => gap(shift),
            AnalyticFunction::Kernel { anchor, .. } => gap(anchor),
            AnalyticFunction::Sum { terms } => terms.iter().map(|(_, f)| f.interior_scale()).fold(1.0, f64::min),
            AnalyticFunction::Product { factors } => factors.iter().map(|f| f.interior_scale()).fold(1.0, f64::min),
            AnalyticFunction::DifferenceQuotient { f, .. } => f.interior_scale(),
            _ => 1.0,
        }
    }

    /// Radial limit at `zeta`: exact from the structure where the function
    /// is regular or a singular atom sits at `zeta`, otherwise the sampled
    /// radial search of [`radial_boundary_value`].
    pub fn boundary_limit(&self, zeta: UnitCirclePoint) -> Result<RadialLimit> {
        match self.structural_limit(zeta) {
            Some(v) => Ok(RadialLimit::Value(v?)),
            None => radial_boundary_value(self, zeta),
        }
    }

    fn structural_limit(&self, zeta: UnitCirclePoint) -> Option<Result<C64>> {
        let at_mark = |t: f64| chord(t, zeta.angle()) < 1e-15;
        match self {
            AnalyticFunction::Polynomial { .. } => Some(self.eval(zeta.point())),
            AnalyticFunction::Cauchy { pole } => {
                if pole.norm() >= 1.0 - 1e-15 && at_mark(pole.arg()) {
                    None
                } else {
                    Some(self.boundary(&zeta.boundary()))
                }
            }
            AnalyticFunction::Power { shift, exponent } => {
                if (shift.norm() - 1.0).abs() < 1e-15 && at_mark((-shift).arg()) {
                    if *exponent > 0.0 {
                        Some(Ok(C64::new(0.0, 0.0)))
                    } else if *exponent == 0.0 {
                        Some(Ok(one()))
                    } else {
                        None
                    }
                } else {
                    Some(self.boundary(&zeta.boundary()))
                }
            }
            AnalyticFunction::Schur { b } => b.structural_limit(zeta),
            AnalyticFunction::Kernel { b, anchor, b_anchor } => Some(b.structural_limit(zeta)?.map(|bz| {
                (one() - b_anchor.conj() * bz) / (one() - anchor.conj() * zeta.point())
            })),
            AnalyticFunction::BoundaryKernel { b, zeta: z0, .. } if at_mark(z0.angle()) => {
                if schur_smooth_at(b, z0.angle()) {
                    Some(self.boundary(&zeta.boundary()))
                } else {
                    None
                }
            }
            AnalyticFunction::BoundaryKernel { b, zeta: z0, b_zeta } => Some(b.structural_limit(zeta)?.map(|bz| {
                (one() - b_zeta.conj() * bz) / (one() - z0.point().conj() * zeta.point())
            })),
            AnalyticFunction::Sum { terms } => {
                let mut s = C64::new(0.0, 0.0);
                for (c, f) in terms {
                    match f.structural_limit(zeta)? {
                        Ok(v) => s += c * v,
                        Err(e) => return Some(Err(e)),
                    }
                }
                Some(Ok(s))
            }
            AnalyticFunction::Product { factors } => {
                let mut p = one();
                for f in factors {
                    match f.structural_limit(zeta)? {
                        Ok(v) => p *= v,
                        Err(e) => return Some(Err(e)),
                    }
                }
                Some(Ok(p))
            }
            AnalyticFunction::DifferenceQuotient { f, zeta: z0, .. } if at_mark(z0.angle()) => {
                if f.is_closed_form() && f.regular_near(z0.angle()) {
                    Some(self.boundary(&zeta.boundary()))
                } else {
                    None
                }
            }
            AnalyticFunction::DifferenceQuotient { f, zeta: z0, value } => Some(
                f.structural_limit(zeta)?.map(|v| (v - value) / (zeta.point() - z0.point())),
            ),
        }
    }

    /// Boundary values near `theta` come from a smooth closed form.
    pub fn regular_near(&self, theta: f64) -> bool {
        self.landmarks().iter().all(|&t| chord(t, theta) > 1e-15)
    }
}

fn schur_smooth_at(b: &SchurFunction, theta: f64) -> bool {
    AnalyticFunction::schur(b.clone()).is_closed_form() && b.landmarks().iter().all(|&t| chord(t, theta) > 1e-15)
}

fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn kernel_deriv(bz: C64, dbz: C64, b_anchor: C64, wbar: C64, z: C64) -> C64 {
    kernel_deriv_q(bz, dbz, b_anchor, wbar, one() - wbar * z)
}

/// Derivative of `(1 - conj(b_anchor) b(z)) / q(z)` with `q = 1 - wbar z`.
fn kernel_deriv_q(bz: C64, dbz: C64, b_anchor: C64, wbar: C64, q: C64) -> C64 {
    (-b_anchor.conj() * dbz * q + wbar * (one() - b_anchor.conj() * bz)) / (q * q)
}

/// Radial boundary value along `r_k = 1 - 2^{-k}`: converged once three
/// successive values agree within `1e-8` in modulus and argument; `NoLimit`
/// after 40 doublings.
pub fn radial_boundary_value(f: &AnalyticFunction, zeta: UnitCirclePoint) -> Result<RadialLimit> {
    const TOL: f64 = 1e-8;
    let mut samples: Vec<C64> = Vec::with_capacity(40);
    for k in 1..=40 {
        let r = 1.0 - (2f64).powi(-k);
        let v = match f.eval(zeta.point() * r) {
            Ok(v) => v,
            Err(HbdError::TooCloseToBoundary { .. }) if samples.len() >= 3 => break,
            Err(e) => return Err(e),
        };
        samples.push(v);
        let n = samples.len();
        if n >= 3 {
            let agree = |a: C64, b: C64| {
                let dm = (a.norm() - b.norm()).abs() < TOL;
                let small = a.norm() < TOL && b.norm() < TOL;
                dm && (small || wrap_pi(a.arg() - b.arg()).abs() < TOL)
            };
            if agree(samples[n - 1], samples[n - 2]) && agree(samples[n - 2], samples[n - 3]) {
                return Ok(RadialLimit::Value(samples[n - 1]));
            }
        }
    }
    Ok(RadialLimit::NoLimit { samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn blaschke_examples() {
        let b = BlaschkeProduct::new(vec![c(0.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(b.eval(c(0.3, 0.0)).re, 0.3, epsilon = 1e-15);
        let b = BlaschkeProduct::new(vec![c(0.5, 0.0)]).unwrap();
        assert_abs_diff_eq!(b.eval(c(0.0, 0.0)).re, 0.5, epsilon = 1e-15);
        let b = BlaschkeProduct::new(vec![c(0.5, 0.0), c(0.5, 0.0)]).unwrap();
        let z = C64::from_polar(1.0, PI / 3.0);
        assert!((b.eval(z).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn blaschke_rejects_boundary_zero() {
        assert!(BlaschkeProduct::new(vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn singular_examples() {
        let s = AtomicSingularInner::single(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(s.eval(c(0.0, 0.0)).re, (-1f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.eval(c(0.5, 0.0)).re, (-3f64).exp(), epsilon = 1e-15);
        let v = s.boundary(&BoundaryPoint::at(PI)).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert!(matches!(s.boundary(&BoundaryPoint::at(0.0)), Err(HbdError::AtomEvaluation { .. })));
        // u'(0) = -2 e^{-1}
        assert_abs_diff_eq!(s.deriv(c(0.0, 0.0)).re, -2.0 * (-1f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn outer_constant_examples() {
        let o = OuterFromModulus::new(LogModulus::Constant(0.0)).unwrap();
        assert_abs_diff_eq!(o.eval(c(0.0, 0.7)).unwrap().re, 1.0, epsilon = 1e-15);
        let o = OuterFromModulus::new(LogModulus::Constant(0.5f64.ln())).unwrap();
        assert_abs_diff_eq!(o.eval(c(0.2, -0.4)).unwrap().re, 0.5, epsilon = 1e-15);
        // the quadrature route reproduces constants too
        let o = OuterFromModulus::new(LogModulus::Samples(vec![0.5f64.ln(); 64])).unwrap();
        let v = o.eval(c(0.3, 0.5)).unwrap();
        assert!((v - c(0.5, 0.0)).norm() < 1e-10, "{v}");
    }

    #[test]
    fn samples_enforce_margin() {
        let o = OuterFromModulus::new(LogModulus::Samples(vec![-0.1; 64])).unwrap();
        assert!(matches!(o.eval(c(0.9, 0.0)), Err(HbdError::TooCloseToBoundary { .. })));
        assert!(o.eval(c(0.8, 0.0)).is_ok());
    }

    #[test]
    fn rational_outer_matches_herglotz_quadrature() {
        let w0 = (3.0 - 5f64.sqrt()) / 2.0;
        let lm = LogModulus::Rational { scale: c(1.0 - w0, 0.0), poles: vec![c(w0, 0.0)] };
        let exact = OuterFromModulus::new(lm.clone()).unwrap();
        // same boundary data fed through the sampled route
        let n = 4096;
        let samples = (0..n).map(|k| lm.value(TAU * k as f64 / n as f64)).collect();
        let sampled = OuterFromModulus::new(LogModulus::Samples(samples)).unwrap();
        for z in [c(0.1, 0.2), c(-0.5, 0.3), c(0.7, 0.0)] {
            let a = exact.eval(z).unwrap();
            let b = sampled.eval(z).unwrap();
            assert!((a - b).norm() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn example2_boundary_modulus() {
        let o = OuterFromModulus::new(LogModulus::Named(NamedLogModulus::Example2Phi)).unwrap();
        let theta = PI / 12.0;
        let f = AnalyticFunction::schur(SchurFunction { outer: Some(o.clone()), ..Default::default() });
        let lim = radial_boundary_value(&f, UnitCirclePoint::new(theta)).unwrap();
        let v = lim.value().expect("radial limit exists");
        let d = 2.0 * (theta / 2.0).sin();
        let expected = (1.0 - d.powf(1.5)).sqrt();
        assert!((v.norm() - expected).abs() < 1e-3, "{} vs {}", v.norm(), expected);
        // the conjugate-function boundary value agrees with the radial limit
        let direct = o.boundary(&BoundaryPoint::at(theta)).unwrap();
        assert!((direct - v).norm() < 1e-6, "{direct} vs {v}");
    }

    #[test]
    fn radial_limit_examples() {
        let f = AnalyticFunction::monomial(2);
        let v = radial_boundary_value(&f, UnitCirclePoint::new(0.0)).unwrap().value().unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-7);
        let u = AnalyticFunction::schur(SchurFunction::singular(vec![Atom { angle: 0.0.into(), mass: 1.0 }]).unwrap());
        let v = radial_boundary_value(&u, UnitCirclePoint::new(0.0)).unwrap().value().unwrap();
        assert!(v.norm() < 1e-8);
        let v = radial_boundary_value(&u, UnitCirclePoint::new(PI)).unwrap().value().unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-7);
        let phi = AnalyticFunction::product(vec![
            AnalyticFunction::real_polynomial(&[-1.0, 1.0]),
            AnalyticFunction::power(c(1.0, 0.0), -1.0 / 3.0).unwrap(),
        ]);
        assert!(matches!(radial_boundary_value(&phi, UnitCirclePoint::new(PI)).unwrap(), RadialLimit::NoLimit { .. }));
    }

    #[test]
    fn derivative_examples() {
        let f = AnalyticFunction::monomial(2);
        assert_abs_diff_eq!(f.deriv(c(0.5, 0.0)).unwrap().re, 1.0, epsilon = 1e-15);
        // derivative of (0.5 - z)/(1 - 0.5 z) at 0 is -0.75
        let b = BlaschkeProduct::new(vec![c(0.5, 0.0)]).unwrap();
        assert_abs_diff_eq!(b.deriv(c(0.0, 0.0)).re, -0.75, epsilon = 1e-15);
    }

    #[test]
    fn power_rejects_branch_cut_in_disk() {
        assert!(AnalyticFunction::power(c(-1.0, 0.0), 0.5).is_err());
        assert!(AnalyticFunction::power(c(1.0, 0.0), -1.0 / 3.0).is_ok());
        assert!(AnalyticFunction::power(c(-1.0, 0.0), -1.0).is_ok());
    }
}
