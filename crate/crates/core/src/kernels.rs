//! Reproducing kernels of H² and H(b), the Takenaka–Malmquist basis of a
//! finite model space K_B, and the compressed backward shift on it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::disk::{AnalyticFunction, BlaschkeProduct, SchurFunction, UnitCirclePoint};
use crate::error::{HbdError, Result};
use crate::quad::periodic_mean;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Szegő kernel `c_omega(z) = 1/(1 - conj(omega) z)`.
pub fn szego(omega: C64, z: C64) -> C64 {
    one() / (one() - omega.conj() * z)
}

pub fn szego_norm_sq(omega: C64) -> f64 {
    1.0 / (1.0 - omega.norm_sqr())
}

/// `k^b(z, omega)`.
pub fn dbr_kernel_eval(b: &SchurFunction, omega: C64, z: C64) -> Result<C64> {
    if !(omega.norm() < 1.0) {
        return Err(HbdError::InvalidInput("kernel anchor must lie in the open disk".into()));
    }
    if z == omega {
        return Ok(C64::new(dbr_kernel_norm_sq(b, omega)?, 0.0));
    }
    let bw = b.eval(omega)?;
    Ok((one() - bw.conj() * b.eval(z)?) * szego(omega, z))
}

/// `(1 - |b(omega)|^2) / (1 - |omega|^2)`.
pub fn dbr_kernel_norm_sq(b: &SchurFunction, omega: C64) -> Result<f64> {
    if !(omega.norm() < 1.0) {
        return Err(HbdError::InvalidInput("kernel anchor must lie in the open disk".into()));
    }
    let bw = b.eval(omega)?;
    Ok((1.0 - bw.norm_sqr()) / (1.0 - omega.norm_sqr()))
}

/// Kernel norm with `b` absent meaning `b = 0` (Szegő case).
pub fn kernel_norm_sq(b: Option<&SchurFunction>, omega: C64) -> Result<f64> {
    match b {
        Some(b) => dbr_kernel_norm_sq(b, omega),
        None => Ok(szego_norm_sq(omega)),
    }
}

/// Boundary kernel `k^b_zeta`; requires `|b(zeta)| = 1` within `1e-8`.
pub fn boundary_kernel(b: &SchurFunction, zeta: UnitCirclePoint) -> Result<AnalyticFunction> {
    let b_zeta = boundary_value_unimodular(b, zeta)?;
    Ok(AnalyticFunction::BoundaryKernel { b: b.clone(), zeta, b_zeta })
}

/// Radial limit of `b` at `zeta`, checked to be unimodular.
pub fn boundary_value_unimodular(b: &SchurFunction, zeta: UnitCirclePoint) -> Result<C64> {
    let f = AnalyticFunction::schur(b.clone());
    let lim = f.boundary_limit(zeta)?;
    match lim.value() {
        Some(v) if (v.norm() - 1.0).abs() <= 1e-8 => Ok(v),
        Some(v) => Err(HbdError::BoundaryValueMissing { angle: zeta.angle(), modulus: v.norm() }),
        None => Err(HbdError::BoundaryValueMissing { angle: zeta.angle(), modulus: f64::NAN }),
    }
}

/// `|(k_w(z) - k_w(zeta))/(z - zeta) - [conj(w) c_w(z) k_w(zeta) - conj(b(w)) c_w(z) b(zeta) conj(zeta) k^b_zeta(z)]|`.
pub fn quotient_identity_residual(b: &SchurFunction, omega: C64, zeta: UnitCirclePoint, z: C64) -> Result<f64> {
    let b_zeta = boundary_value_unimodular(b, zeta)?;
    let zt = zeta.point();
    let bw = b.eval(omega)?;
    let k_w = |x: C64, bx: C64| (one() - bw.conj() * bx) * szego(omega, x);
    let k_w_z = k_w(z, b.eval(z)?);
    let k_w_zeta = k_w(zt, b_zeta);
    let lhs = (k_w_z - k_w_zeta) / (z - zt);
    let cz = szego(omega, z);
    let k_zeta_z = (one() - b_zeta.conj() * b.eval(z)?) * szego(zt, z);
    let rhs = omega.conj() * cz * k_w_zeta - bw.conj() * cz * b_zeta * zt.conj() * k_zeta_z;
    Ok((lhs - rhs).norm())
}

/// Hermitian matrix of inner products `G[i][j] = <g_j, g_i>`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub entries: DMatrix<C64>,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue() >= -1e-10
    }

    pub fn hermitian_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).camax()
    }

    /// `c^H G c`: squared norm of `sum_j c_j g_j`.
    pub fn quadratic_form(&self, c: &DVector<C64>) -> f64 {
        (c.adjoint() * &self.entries * c)[(0, 0)].re
    }

    pub fn to_json(&self) -> serde_json::Value {
        matrix_json(&self.entries)
    }
}

/// Row-major array of `[re, im]` pairs.
pub fn matrix_json(m: &DMatrix<C64>) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    serde_json::to_value(rows).expect("finite matrix serializes")
}

/// `G[i][j] = k^b(omega_i, omega_j)`, exact H(b) inner products of kernels.
pub fn gram_in_hb(b: &SchurFunction, anchors: &[C64]) -> Result<GramMatrix> {
    let n = anchors.len();
    let vals: Vec<C64> = anchors.iter().map(|&w| b.eval(w)).collect::<Result<_>>()?;
    for w in anchors {
        if !(w.norm() < 1.0) {
            return Err(HbdError::InvalidInput("Gram anchors must lie in the open disk".into()));
        }
    }
    let g = DMatrix::from_fn(n, n, |i, j| {
        let (wi, wj) = (anchors[i], anchors[j]);
        (one() - vals[j].conj() * vals[i]) * szego(wj, wi)
    });
    Ok(GramMatrix { entries: g })
}

/// Szegő Gram matrix `G[i][j] = c_{a_j}(a_i)`.
pub fn gram_szego(anchors: &[C64]) -> GramMatrix {
    let n = anchors.len();
    GramMatrix { entries: DMatrix::from_fn(n, n, |i, j| szego(anchors[j], anchors[i])) }
}

/// Trapezoid nodes needed to integrate rational functions with poles at
/// `1/conj(a)` on the circle to double precision.
fn trapezoid_nodes(max_modulus: f64) -> usize {
    if max_modulus <= 1e-3 {
        return 64;
    }
    let n = (40.0 / -max_modulus.ln()).ceil() as usize;
    n.next_power_of_two().clamp(64, 1 << 22)
}

/// Orthonormal rational basis of `K_B`:
/// `e_j = sqrt(1-|a_j|^2)/(1 - conj(a_j) z) * prod_{k<j} b_{a_k}(z)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TakenakaBasis {
    zeros: Vec<C64>,
}

impl TakenakaBasis {
    pub fn new(b: &BlaschkeProduct) -> Result<Self> {
        if b.degree() == 0 {
            return Err(HbdError::InvalidInput("model space of a constant Blaschke product is trivial".into()));
        }
        if b.zeros().iter().any(|a| a.norm() > 1.0 - 1e-6) {
            return Err(HbdError::InvalidInput("Blaschke zeros too close to the circle for the basis".into()));
        }
        Ok(Self { zeros: b.zeros().to_vec() })
    }

    pub fn dim(&self) -> usize {
        self.zeros.len()
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    /// All basis values at `z`.
    pub fn eval_all(&self, z: C64) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.zeros.len());
        let mut prefix = one();
        for &a in &self.zeros {
            out.push(prefix * (1.0 - a.norm_sqr()).sqrt() * szego(a, z));
            prefix *= BlaschkeProduct::factor(a, z);
        }
        out
    }

    pub fn eval(&self, j: usize, z: C64) -> C64 {
        self.eval_all(z)[j]
    }

    pub fn eval_combination(&self, c: &DVector<C64>, z: C64) -> C64 {
        self.eval_all(z).iter().zip(c.iter()).map(|(e, c)| e * c).sum()
    }

    pub fn deriv_all(&self, z: C64) -> Vec<C64> {
        let n = self.zeros.len();
        let mut out = Vec::with_capacity(n);
        let mut prefix = one();
        let mut dprefix = C64::new(0.0, 0.0);
        for &a in &self.zeros {
            let s = (1.0 - a.norm_sqr()).sqrt();
            let c = szego(a, z);
            let dc = a.conj() * c * c;
            out.push(s * (dprefix * c + prefix * dc));
            let f = BlaschkeProduct::factor(a, z);
            let df = BlaschkeProduct::factor_deriv(a, z);
            dprefix = dprefix * f + prefix * df;
            prefix *= f;
        }
        out
    }

    /// `sum_j c_j e_j` as a composite analytic function.
    pub fn combination(&self, c: &[C64]) -> AnalyticFunction {
        let mut terms = Vec::new();
        for (j, &cj) in c.iter().enumerate() {
            if cj == C64::new(0.0, 0.0) {
                continue;
            }
            let a = self.zeros[j];
            let mut factors = vec![AnalyticFunction::Cauchy { pole: a }];
            if j > 0 {
                let prev = BlaschkeProduct::new(self.zeros[..j].to_vec()).expect("zeros validated");
                factors.push(AnalyticFunction::schur(SchurFunction { blaschke: Some(prev), ..Default::default() }));
            }
            terms.push((cj * (1.0 - a.norm_sqr()).sqrt(), AnalyticFunction::product(factors)));
        }
        if terms.is_empty() {
            AnalyticFunction::constant(C64::new(0.0, 0.0))
        } else {
            AnalyticFunction::sum(terms)
        }
    }

    /// Trapezoid node count resolving products of basis functions.
    pub fn boundary_nodes(&self) -> usize {
        trapezoid_nodes(self.zeros.iter().map(|a| a.norm()).fold(0.0, f64::max))
    }

    /// H² Gram of the basis by boundary trapezoid quadrature.
    pub fn boundary_gram(&self) -> GramMatrix {
        let n = self.boundary_nodes();
        let d = self.dim();
        let mut g = DMatrix::<C64>::zeros(d, d);
        for k in 0..n {
            let lambda = C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64);
            let e = self.eval_all(lambda);
            for i in 0..d {
                for j in 0..d {
                    g[(i, j)] += e[j] * e[i].conj();
                }
            }
        }
        GramMatrix { entries: g / C64::new(n as f64, 0.0) }
    }

    /// Coordinates of `k^B_x` for `x` in the closed disk: `conj(e_i(x))`.
    pub fn kernel_coordinates(&self, x: C64) -> DVector<C64> {
        DVector::from_iterator(self.dim(), self.eval_all(x).into_iter().map(|v| v.conj()))
    }

    pub fn values_json(&self, points: &[C64]) -> serde_json::Value {
        let rows: Vec<Vec<[f64; 2]>> =
            points.iter().map(|&z| self.eval_all(z).iter().map(|v| [v.re, v.im]).collect()).collect();
        serde_json::to_value(rows).expect("finite values serialize")
    }
}

pub fn takenaka_basis(b: &BlaschkeProduct) -> Result<TakenakaBasis> {
    TakenakaBasis::new(b)
}

/// Matrix of `f -> (f - f(0))/z` on `K_B` in the Takenaka basis:
/// `M[i][j] = <S* e_j, e_i>`.
pub fn compressed_shift_matrix(b: &BlaschkeProduct) -> Result<DMatrix<C64>> {
    let basis = TakenakaBasis::new(b)?;
    let d = basis.dim();
    let at0 = basis.eval_all(C64::new(0.0, 0.0));
    let n = basis.boundary_nodes();
    let mut m = DMatrix::<C64>::zeros(d, d);
    for k in 0..n {
        let lambda = C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64);
        let e = basis.eval_all(lambda);
        for j in 0..d {
            let sj = (e[j] - at0[j]) * lambda.conj();
            for i in 0..=j.min(d - 1) {
                m[(i, j)] += sj * e[i].conj();
            }
        }
    }
    // S* leaves span{e_1..e_j} invariant, so the matrix is upper triangular.
    Ok(m / C64::new(n as f64, 0.0))
}

/// Eigenvalues of a complex square matrix via the Schur form.
pub fn eigenvalues(m: &DMatrix<C64>) -> Vec<C64> {
    let s = m.clone().schur();
    let (_, t) = s.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Greedy multiset matching distance between two lists of complex numbers.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("lengths match");
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

/// H² inner product `<f, g>` of rational functions by boundary trapezoid
/// with doubling until stable.
pub fn h2_inner_rational(f: &AnalyticFunction, g: &AnalyticFunction) -> Result<C64> {
    let mut err = None;
    let (v, _) = periodic_mean(
        |t| {
            let l = C64::from_polar(1.0, t);
            match (f.eval(l), g.eval(l)) {
                (Ok(a), Ok(b)) => a * b.conj(),
                (Err(e), _) | (_, Err(e)) => {
                    err.get_or_insert(e);
                    C64::new(0.0, 0.0)
                }
            }
        },
        64,
        1e-13,
        1e-15,
        1 << 22,
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::Atom;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn blaschke(zeros: &[C64]) -> BlaschkeProduct {
        BlaschkeProduct::new(zeros.to_vec()).unwrap()
    }

    #[test]
    fn kernel_eval_examples() {
        let b = SchurFunction::monomial(1);
        assert!((dbr_kernel_eval(&b, c(0.0, 0.0), c(0.5, 0.0)).unwrap() - one()).norm() < 1e-15);
        assert!((dbr_kernel_eval(&b, c(0.5, 0.0), c(0.5, 0.0)).unwrap() - one()).norm() < 1e-15);
        let u = SchurFunction::singular(vec![Atom { angle: 0.0.into(), mass: 1.0 }]).unwrap();
        let v = dbr_kernel_eval(&u, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((v.re - (1.0 - (-2f64).exp())).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn kernel_norm_examples() {
        assert!((dbr_kernel_norm_sq(&SchurFunction::monomial(1), c(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!((dbr_kernel_norm_sq(&SchurFunction::monomial(2), c(0.5, 0.0)).unwrap() - 1.25).abs() < 1e-15);
        assert!((kernel_norm_sq(None, c(0.9, 0.0)).unwrap() - 1.0 / 0.19).abs() < 1e-12);
    }

    #[test]
    fn quotient_identity_examples() {
        let b = SchurFunction::monomial(2);
        let r = quotient_identity_residual(&b, c(0.3, 0.0), UnitCirclePoint::new(0.0), c(0.0, 0.2)).unwrap();
        assert!(r <= 1e-10, "{r}");
        let b = SchurFunction::blaschke(vec![c(0.5, 0.0), c(0.0, -0.3)]).unwrap();
        let r = quotient_identity_residual(&b, c(-0.2, 0.4), UnitCirclePoint::new(std::f64::consts::FRAC_PI_4), c(0.6, -0.1))
            .unwrap();
        assert!(r <= 1e-10, "{r}");
        let b = SchurFunction::monomial(1);
        let r = quotient_identity_residual(&b, c(0.0, 0.0), UnitCirclePoint::new(1.3), c(0.1, 0.7)).unwrap();
        assert!(r <= 1e-12, "{r}");
    }

    #[test]
    fn boundary_kernel_needs_unimodular_limit() {
        let u = SchurFunction::singular(vec![Atom { angle: 0.0.into(), mass: 1.0 }]).unwrap();
        assert!(matches!(boundary_kernel(&u, UnitCirclePoint::new(0.0)), Err(HbdError::BoundaryValueMissing { .. })));
        assert!(boundary_kernel(&u, UnitCirclePoint::new(2.0)).is_ok());
    }

    #[test]
    fn takenaka_examples() {
        let t = TakenakaBasis::new(&blaschke(&[c(0.0, 0.0), c(0.0, 0.0)])).unwrap();
        let z = c(0.3, -0.2);
        let e = t.eval_all(z);
        assert!((e[0] - one()).norm() < 1e-15 && (e[1] - z).norm() < 1e-15);
        let t = TakenakaBasis::new(&blaschke(&[c(0.5, 0.0)])).unwrap();
        let v = t.eval(0, z);
        assert!((v - 0.75f64.sqrt() * szego(c(0.5, 0.0), z)).norm() < 1e-15);
        let g = t.boundary_gram();
        assert!((g.entries[(0, 0)] - one()).norm() < 1e-12);
        let t = TakenakaBasis::new(&blaschke(&[c(0.5, 0.0), c(0.0, -0.3), c(0.5, 0.0), c(-0.7, 0.2)])).unwrap();
        let g = t.boundary_gram();
        assert!((g.entries - DMatrix::identity(4, 4)).camax() < 1e-10);
    }

    #[test]
    fn takenaka_derivative_matches_difference() {
        let t = TakenakaBasis::new(&blaschke(&[c(0.5, 0.1), c(0.0, -0.3), c(-0.6, 0.2)])).unwrap();
        let z = c(0.2, 0.3);
        let h = 1e-6;
        let d = t.deriv_all(z);
        let (p, m) = (t.eval_all(z + h), t.eval_all(z - h));
        for j in 0..3 {
            let fd = (p[j] - m[j]) / (2.0 * h);
            assert!((fd - d[j]).norm() < 1e-7 * (1.0 + d[j].norm()));
        }
        // the composite representation agrees with the direct one
        let f = t.combination(&[c(1.0, 0.0), c(0.0, 2.0), c(-0.5, 0.5)]);
        let direct = t.eval_combination(&DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 2.0), c(-0.5, 0.5)]), z);
        assert!((f.eval(z).unwrap() - direct).norm() < 1e-13);
    }

    #[test]
    fn shift_matrix_examples() {
        let m = compressed_shift_matrix(&blaschke(&[c(0.0, 0.0), c(0.0, 0.0)])).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), one(), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!((m - expected).camax() < 1e-14);
        let m = compressed_shift_matrix(&blaschke(&[c(0.0, 0.0)])).unwrap();
        assert!(m[(0, 0)].norm() < 1e-15);
        let m = compressed_shift_matrix(&blaschke(&[c(0.5, 0.0), c(0.0, -0.3)])).unwrap();
        let ev = eigenvalues(&m);
        assert!(multiset_distance(&ev, &[c(0.5, 0.0), c(0.0, 0.3)]) < 1e-8);
    }

    #[test]
    fn gram_examples() {
        let g = gram_in_hb(&SchurFunction::monomial(1), &[c(0.0, 0.0)]).unwrap();
        assert!((g.entries[(0, 0)] - one()).norm() < 1e-15);
        let g = gram_szego(&[c(0.0, 0.0), c(0.5, 0.0)]);
        let exp = [1.0, 1.0, 1.0, 4.0 / 3.0];
        for (k, e) in exp.iter().enumerate() {
            assert!((g.entries[(k / 2, k % 2)].re - e).abs() < 1e-15);
        }
        let b = SchurFunction::blaschke(vec![c(0.2, 0.5)]).unwrap();
        let w = c(-0.3, 0.1);
        let g = gram_in_hb(&b, &[w]).unwrap();
        assert_eq!(g.entries[(0, 0)].re, dbr_kernel_norm_sq(&b, w).unwrap());
    }

    #[test]
    fn szego_span_norm_matches_boundary_quadrature() {
        let a = [c(0.3, 0.2), c(-0.5, 0.0), c(0.1, -0.8)];
        let coef = DVector::from_vec(vec![c(1.0, -1.0), c(0.5, 0.0), c(0.0, 0.3)]);
        let g = gram_szego(&a);
        let f = AnalyticFunction::sum(a.iter().zip(coef.iter()).map(|(&p, &k)| (k, AnalyticFunction::Cauchy { pole: p })).collect());
        let q = h2_inner_rational(&f, &f).unwrap().re;
        assert!((g.quadratic_form(&coef) - q).abs() < 1e-8 * q);
    }
}
