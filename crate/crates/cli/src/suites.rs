//! Named verification suites: one pass/fail check per invariant.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use hbd_core::carleson::{
    box_measure, carleson_constant_h2, dyadic_grid, is_carleson_for_dz, is_multiplier_ku_to_dz, is_multiplier_of_dz,
    model_space_carleson_constant, model_space_dz_carleson_constant, multiplier_chain_terms, weighted_circle_carleson,
    CarlesonBox,
};
use hbd_core::dirichlet::{
    area_dirichlet, local_dirichlet_area, local_dirichlet_decomposition, local_dirichlet, weighted_dirichlet,
    BoundaryMeasure, DirichletMethod, HyperbolicWeight,
};
use hbd_core::disk::{AnalyticFunction, Atom, BlaschkeProduct, LogModulus, SchurFunction, UnitCirclePoint};
use hbd_core::embedding::{
    local_dirichlet_in_basis, operator_norm, quotient_operator_matrix, radial_path, ratio_sweep, separated_support_bound,
    KernelCombination,
};
use hbd_core::kernels::{
    compressed_shift_matrix, dbr_kernel_eval, dbr_kernel_norm_sq, eigenvalues, gram_in_hb, multiset_distance,
    quotient_identity_residual, TakenakaBasis,
};
use hbd_core::named::{example1_b, example2_b2, example4_nu, example4_phi, singular_at_1, w0};
use hbd_core::quad::BoundaryPoint;
use hbd_core::spectrum::boundary_spectrum;
use hbd_core::{HbdError, QuadratureConfig};
use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Every structural identity and inequality of the toolkit.
    Identities,
    /// The checks that need no adaptive area quadrature.
    Quick,
}

pub const SUITE_NAMES: [&str; 3] = ["identities", "paper-identities", "quick"];

impl Suite {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "identities" | "paper-identities" => Some(Suite::Identities),
            "quick" => Some(Suite::Quick),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

type CheckFn = fn(&mut ChaCha8Rng, &QuadratureConfig) -> Result<(bool, String), HbdError>;

const QUICK: &[(&str, CheckFn)] = &[
    ("blaschke-unimodular-on-circle", blaschke_unimodular),
    ("schur-bounded-by-one", schur_bounded),
    ("kernel-diagonal-is-norm", kernel_diagonal),
    ("quotient-identity", quotient_identity),
    ("kernel-gram-psd", gram_psd),
    ("takenaka-orthonormal", takenaka_orthonormal),
    ("compressed-shift-spectrum", compressed_shift_spectrum),
    ("monomial-local-dirichlet", monomial_local_dirichlet),
    ("disintegration-atoms", disintegration_atoms),
    ("structural-spectra", structural_spectra),
    ("embedding-constant", embedding_constant),
    ("singular-atom-sweep-diverges", singular_sweep),
    ("carleson-box-formula", carleson_box_formula),
    ("golden-ratio-constant", golden_constant),
    ("example2-ratio-closed-form", example2_ratio),
];

const SLOW: &[(&str, CheckFn)] = &[
    ("three-route-agreement", route_agreement),
    ("littlewood-paley", littlewood_paley),
    ("hyperbolic-weight", hyperbolic_weight),
    ("sweep-lower-bound", sweep_lower_bound),
    ("separated-support-bound", separated_support),
    ("carleson-reweighting", carleson_reweighting),
    ("model-space-carleson-factorization", model_space_factorization),
    ("multiplier-chain", multiplier_chain),
    ("multiplier-example", multiplier_example),
];

/// Run a suite; every check gets its own RNG stream derived from `seed`.
pub fn run_suite(suite: Suite, seed: u64, cfg: &QuadratureConfig) -> Vec<Check> {
    let mut list: Vec<&(&str, CheckFn)> = QUICK.iter().collect();
    if suite == Suite::Identities {
        list.extend(SLOW.iter());
    }
    list.into_iter()
        .enumerate()
        .map(|(i, (name, f))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (pass, detail) = match f(&mut rng, cfg) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            Check { name: name.to_string(), pass, detail }
        })
        .collect()
}

fn disk_point(rng: &mut ChaCha8Rng, rmax: f64) -> C64 {
    C64::from_polar(rmax * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU))
}

fn circle_point(rng: &mut ChaCha8Rng) -> UnitCirclePoint {
    UnitCirclePoint::new(rng.gen_range(0.0..TAU))
}

fn blaschke(rng: &mut ChaCha8Rng, max_degree: usize, rmax: f64) -> Result<BlaschkeProduct, HbdError> {
    let n = rng.gen_range(1..=max_degree);
    BlaschkeProduct::new((0..n).map(|_| disk_point(rng, rmax)).collect())
}

fn coeffs(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Inner function with Blaschke and singular parts.
fn inner(rng: &mut ChaCha8Rng) -> Result<SchurFunction, HbdError> {
    let b = blaschke(rng, 3, 0.9)?;
    let atom = Atom { angle: circle_point(rng), mass: rng.gen_range(0.1..1.5) };
    SchurFunction::blaschke(b.zeros().to_vec())?.times(SchurFunction::singular(vec![atom])?)
}

fn blaschke_unimodular(rng: &mut ChaCha8Rng, _: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let b = blaschke(rng, 6, 0.95)?;
        for k in 0..64 {
            worst = worst.max((b.eval(C64::from_polar(1.0, TAU * k as f64 / 64.0)).norm() - 1.0).abs());
        }
    }
    Ok((worst <= 1e-12, format!("max ||B| - 1| = {worst:.1e}")))
}

fn schur_bounded(rng: &mut ChaCha8Rng, _: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let b = inner(rng)?.times(SchurFunction::outer(LogModulus::Constant(-0.2))?)?;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        worst = worst.max(b.eval(disk_point(rng, 0.99))?.norm());
    }
    Ok((worst <= 1.0 + 1e-12, format!("max |b| = {worst:.6}")))
}

fn kernel_diagonal(rng: &mut ChaCha8Rng, _: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let b = inner(rng)?;
        let w = disk_point(rng, 0.9);
        let n = dbr_kernel_norm_sq(&b, w)?;
        worst = worst.max((dbr_kernel_eval(&b, w, w)?.re - n).abs() / n);
    }
    Ok((worst <= 1e-12, format!("max rel diff {worst:.1e}")))
}

fn quotient_identity(rng: &mut ChaCha8Rng, _: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let b = SchurFunction::blaschke(blaschke(rng, 5, 0.9)?.zeros().to_vec())?;
        let (zeta, w, z) = (circle_point(rng), disk_point(rng, 0.9), disk_point(rng, 0.9));
        worst = worst.max(quotient_identity_residual(&b, w, zeta, z)?);
    }
    Ok((worst <= 1e-10, format!("max residual {worst:.1e}")))
}

fn gram_psd(rng: &mut ChaCha8Rng, _: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let b = inner(rng)?;
    let anchors: Vec<C64> = (0..6).map(|_| disk_point(rng, 0.9)).collect();
    let g = gram_in_hb(&b, &anchors)?;
    let m = g.min_eigenvalue();
    Ok((m >= -1e-10, format!("min eigenvalue {m:.2e}")))
}

fn takenaka_orthonormal(rng: &mut ChaCha8Rng, _: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let b = blaschke(rng, 6, 0.9)?;
    let g = TakenakaBasis::new(&b)?.boundary_gram();
    let n = g.dim();
    let dev = (&g.entries - nalgebra::DMatrix::<C64>::identity(n, n)).camax();
    Ok((dev <= 1e-10, format!("max |G - I| = {dev:.1e} (dim {n})")))
}

fn compressed_shift_spectrum(rng: &mut ChaCha8Rng, _: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let b = blaschke(rng, 6, 0.9)?;
    let ev = eigenvalues(&compressed_shift_matrix(&b)?);
    let conj: Vec<C64> = b.zeros().iter().map(|a| a.conj()).collect();
    let d = multiset_distance(&ev, &conj);
    Ok((d <= 1e-8, format!("eigenvalues vs conjugated zeros {d:.1e}")))
}

fn monomial_local_dirichlet(_: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        let f = AnalyticFunction::monomial(n);
        let z = UnitCirclePoint::new(1.0);
        let d = local_dirichlet(&f, z, cfg)?.value.as_f64();
        let q = local_dirichlet_decomposition(&f, z, cfg)?.value.as_f64();
        worst = worst.max((d - n as f64).abs()).max((q - n as f64).abs());
    }
    Ok((worst <= 1e-8, format!("max |D(z^n) - n| = {worst:.1e}")))
}

fn disintegration_atoms(rng: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let f = AnalyticFunction::szego(disk_point(rng, 0.7))?;
    let atoms = [(rng.gen_range(0.0..TAU), 2.0), (rng.gen_range(0.0..TAU), 0.5)];
    let whole = weighted_dirichlet(&f, &BoundaryMeasure::atomic(&atoms), cfg)?.value.as_f64();
    let mut parts = 0.0;
    for (t, m) in atoms {
        parts += m * local_dirichlet(&f, UnitCirclePoint::new(t), cfg)?.value.as_f64();
    }
    let rel = (whole - parts).abs() / parts;
    Ok((rel <= 1e-12, format!("D_mu {whole:.10} vs sum {parts:.10}")))
}

fn structural_spectra(rng: &mut ChaCha8Rng, _: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let s = boundary_spectrum(&singular_at_1())?;
    let singular_ok = s.points == vec![0.0] && s.arcs.is_empty();
    let b = boundary_spectrum(&SchurFunction::blaschke(blaschke(rng, 4, 0.9)?.zeros().to_vec())?)?;
    let e = boundary_spectrum(&example1_b(UnitCirclePoint::new(0.0)))?;
    let example_ok = e.contains(PI) && !e.contains(0.0);
    Ok((
        singular_ok && b.is_empty() && example_ok,
        format!("singular {:?}, finite Blaschke empty {}, example1 excludes 1: {example_ok}", s.points, b.is_empty()),
    ))
}

fn embedding_constant(rng: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let b = blaschke(rng, 4, 0.85)?;
    let zeta = circle_point(rng);
    let q = quotient_operator_matrix(&b, zeta)?;
    let qn = operator_norm(&q.matrix);
    let basis = TakenakaBasis::new(&b)?;
    let mut worst_route: f64 = 0.0;
    let mut worst_excess = f64::NEG_INFINITY;
    for _ in 0..5 {
        let c = coeffs(rng, b.degree());
        let cv = DVector::from_vec(c.clone());
        let coord = local_dirichlet_in_basis(&q, &cv);
        let d = local_dirichlet(&basis.combination(&c), zeta, cfg)?.value.as_f64();
        worst_route = worst_route.max((d - coord).abs() / coord.max(1e-12));
        worst_excess = worst_excess.max(d - qn * qn * cv.norm_squared());
    }
    Ok((
        worst_route <= 1e-6 && worst_excess <= 1e-6,
        format!("constant {:.6}, Douglas vs coordinates {worst_route:.1e}, max excess {worst_excess:.1e}", 1.0 + qn * qn),
    ))
}

fn singular_sweep(_: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let one = UnitCirclePoint::new(0.0);
    let s = ratio_sweep(&singular_at_1(), one, &radial_path(one, 12), cfg)?;
    let all = s.points.iter().all(|p| p.ratio.is_diverged());
    Ok((all && s.lower_violation() <= 1e-6, format!("{} points, all divergent: {all}", s.points.len())))
}

fn carleson_box_formula(_: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let mut worst: f64 = 0.0;
    for d in [1e-2, 1e-4, 1e-6] {
        let m = box_measure(&example4_nu(), &CarlesonBox::new(0.0, d)?, cfg);
        worst = worst.max((m - 2.0 * d.sqrt()).abs());
    }
    Ok((worst <= 1e-12, format!("max |nu(S) - 2 sqrt(delta)| = {worst:.1e}")))
}

fn golden_constant(_: &mut ChaCha8Rng, _: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let w = w0();
    let r = ((1.0 - w).powi(2) - w).abs();
    Ok((r <= 1e-15, format!("w0 = {w:.9}, |(1-w0)^2 - w0| = {r:.1e}")))
}

fn example2_ratio(_: &mut ChaCha8Rng, _: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let b1 = example1_b(UnitCirclePoint::new(0.0));
    let b2 = example2_b2();
    let w = w0();
    let mut worst: f64 = 0.0;
    let mut ratios = Vec::new();
    for dist in [1e-2, 1e-3, 1e-4, 1e-5] {
        let theta = 2.0 * (dist / 2.0f64).asin();
        let l = C64::from_polar(1.0, theta);
        let p = BoundaryPoint::at(theta);
        let ratio = b2.boundary_defect(&p)? / b1.boundary_defect(&p)?;
        let formula = (1.0 - l).norm().powf(-0.5) * (1.0 - w * l).norm_sqr() / (1.0 - w).powi(2);
        worst = worst.max((ratio - formula).abs() / formula);
        ratios.push(ratio);
    }
    let increasing = ratios.windows(2).all(|p| p[1] > p[0]);
    Ok((worst <= 1e-6 && increasing, format!("ratios {ratios:.3?}, max rel diff from closed form {worst:.1e}")))
}

fn route_agreement(rng: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let cfg = QuadratureConfig { rel_tol: cfg.rel_tol.max(1e-6), ..cfg.clone() };
    let b = blaschke(rng, 3, 0.8)?;
    let funcs = [
        AnalyticFunction::szego(disk_point(rng, 0.85))?,
        TakenakaBasis::new(&b)?.combination(&coeffs(rng, b.degree())),
        AnalyticFunction::dbr_kernel(example1_b(circle_point(rng)), disk_point(rng, 0.8))?,
    ];
    let mut worst: f64 = 0.0;
    for f in &funcs {
        let z = circle_point(rng);
        let a = local_dirichlet_area(f, z, &cfg)?.value.as_f64();
        let d = local_dirichlet(f, z, &cfg)?.value.as_f64();
        let q = local_dirichlet_decomposition(f, z, &cfg)?.value.as_f64();
        let tol = (1e-3 * d.abs()).max(1e-4);
        worst = worst.max((a - d).abs().max((q - d).abs()).max((a - q).abs()) / tol);
    }
    Ok((worst <= 1.0, format!("max deviation/tolerance {worst:.2e}")))
}

fn littlewood_paley(rng: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let c = coeffs(rng, 5);
    let want: f64 = c.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum();
    let got = weighted_dirichlet(&AnalyticFunction::polynomial(c), &BoundaryMeasure::lebesgue(1.0), cfg)?.value.as_f64();
    let rel = (got - want).abs() / want;
    Ok((rel <= 1e-6, format!("D_m {got:.10} vs sum n|a_n|^2 {want:.10}")))
}

fn hyperbolic_weight(_: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        let v = area_dirichlet(&AnalyticFunction::monomial(n), &HyperbolicWeight, DirichletMethod::Area, cfg)?;
        worst = worst.max((v.value.as_f64() - n as f64 / (n as f64 + 1.0)).abs());
    }
    Ok((worst <= 1e-8, format!("max |I(z^n) - n/(n+1)| = {worst:.1e}")))
}

fn sweep_lower_bound(_: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let z = UnitCirclePoint::new(0.5);
    let s = ratio_sweep(&example1_b(UnitCirclePoint::new(0.0)), z, &radial_path(z, 10), cfg)?;
    let v = s.lower_violation();
    let increasing = s.points.windows(2).all(|p| p[1].ratio.as_f64() > p[0].ratio.as_f64());
    Ok((v <= 1e-6 && increasing, format!("max lower - ratio {v:.1e}, max ratio {:.3e}", s.max_ratio())))
}

fn separated_support(_: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let f = KernelCombination { anchors: vec![C64::new(0.0, 0.5)], coeffs: vec![C64::new(1.0, 0.0)] };
    let mu = BoundaryMeasure::atomic(&[(PI, 1.0), (3.0 * FRAC_PI_2, 0.5)]);
    let r = separated_support_bound(&singular_at_1(), &mu, &f, cfg)?;
    Ok((r.holds, format!("lhs {:.6} <= rhs {:.6}", r.lhs, r.rhs)))
}

fn carleson_reweighting(_: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let grid = dyadic_grid(30);
    let h2 = carleson_constant_h2(&example4_nu(), &grid, cfg)?;
    let dz = is_carleson_for_dz(&example4_nu(), UnitCirclePoint::new(0.0), &grid, cfg)?;
    Ok((
        h2.unbounded && !dz.unbounded,
        format!("H2 slope {:?} (unbounded {}), reweighted constant {:.4}", h2.exponent, h2.unbounded, dz.constant),
    ))
}

fn model_space_factorization(rng: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let b = blaschke(rng, 3, 0.8)?;
    let zeta = circle_point(rng);
    let nu = example4_nu();
    let direct = model_space_carleson_constant(&nu, &b, cfg)?;
    let through = model_space_dz_carleson_constant(&nu, &b, zeta, cfg)?;
    let qn = operator_norm(&quotient_operator_matrix(&b, zeta)?.matrix);
    let bound = through * (1.0 + qn * qn);
    Ok((direct <= bound * (1.0 + 1e-6), format!("direct {direct:.6} <= {through:.6} x {:.6}", 1.0 + qn * qn)))
}

fn multiplier_chain(rng: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    // the reproducing kernel of D_zeta at zeta is 1/(1 - w0)
    let golden = 1.0 / (1.0 - w0());
    let phi = AnalyticFunction::polynomial(coeffs(rng, 3));
    let b = blaschke(rng, 3, 0.8)?;
    let zeta = circle_point(rng);
    let ca = weighted_circle_carleson(&phi, &b, cfg)?;
    let dphi = local_dirichlet(&phi, zeta, cfg)?.value.as_f64();
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let c = coeffs(rng, b.degree());
        let (lhs, norm) = multiplier_chain_terms(&phi, &b, zeta, &c, cfg)?;
        worst = worst.max(lhs / (2.0 * (ca + golden * dphi) * norm));
    }
    Ok((worst <= 1.0 + 1e-6, format!("max D(phi f) / 2(C + g D(phi))|f|^2 = {worst:.4}")))
}

fn multiplier_example(_: &mut ChaCha8Rng, cfg: &QuadratureConfig) -> Result<(bool, String), HbdError> {
    let phi = example4_phi();
    let b = BlaschkeProduct::new(vec![C64::new(0.5, 0.0), C64::new(-0.3, 0.0)])?;
    let one = UnitCirclePoint::new(0.0);
    let ku = is_multiplier_ku_to_dz(&phi, &b, one, cfg)?;
    let dz = is_multiplier_of_dz(&phi, one, cfg)?;
    Ok((
        ku.multiplier && !dz.multiplier,
        format!("K_B -> D_1: {}, multiplier of D_1: {}", ku.multiplier, dz.multiplier),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes_and_is_deterministic() {
        let cfg = QuadratureConfig::default();
        let a = run_suite(Suite::Quick, 0, &cfg);
        for c in &a {
            assert!(c.pass, "{}: {}", c.name, c.detail);
        }
        assert_eq!(a, run_suite(Suite::Quick, 0, &cfg));
        assert_eq!(a.len(), QUICK.len());
    }

    #[test]
    fn names() {
        assert_eq!(Suite::from_name("paper-identities"), Some(Suite::Identities));
        assert_eq!(Suite::from_name("nope"), None);
    }
}
