//! Independent-oracle battery behind `cavmag validate`: two-mode squeezed
//! vacuum log-negativity, closed-form vs linear-solve mean fields, algebraic
//! vs time-integrated Lyapunov solutions, passive-system vacuum output,
//! the analytic single-mode instability threshold, and physicality checks
//! over sweep output.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gaussian::{self, CovarianceMatrix};
use crate::lyapunov::{integrate_to_steady_state, solve_lyapunov};
use crate::model::{
    build_diffusion_matrix, build_drift_matrix, mean_fields_closed_form, stability_check,
    steady_state_mean_fields, SystemParams,
};
use crate::sweep::{self, Axis, AxisParam};

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl OracleReport {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidateConfig {
    pub seed: u64,
    pub mean_field_draws: usize,
    pub lyapunov_draws: usize,
    pub tol_tmsv: f64,
    pub tol_mean_field: f64,
    pub tol_lyapunov: f64,
    pub tol_passive: f64,
    /// Threshold-location tolerance in units of κm.
    pub tol_threshold: f64,
    pub tol_physicality: f64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            seed: 0x5eed_cab,
            mean_field_draws: 1000,
            lyapunov_draws: 200,
            tol_tmsv: 1e-9,
            tol_mean_field: 1e-10,
            tol_lyapunov: 1e-6,
            tol_passive: 1e-12,
            tol_threshold: 1e-6,
            tol_physicality: 1e-9,
        }
    }
}

/// Random parameter set in the neighbourhood of the experimental regime,
/// κm and ω₁ fixed at their reference values.
pub fn random_params(rng: &mut impl Rng) -> SystemParams {
    let mut p = SystemParams::paper_defaults();
    let km = p.kappa_m;
    p.delta1 = rng.gen_range(-40.0..40.0) * km;
    p.delta2 = rng.gen_range(-40.0..40.0) * km;
    p.delta_m = rng.gen_range(-40.0..40.0) * km;
    p.kappa1 = rng.gen_range(0.2..8.0) * km;
    p.kappa2 = rng.gen_range(0.2..8.0) * km;
    p.g1 = rng.gen_range(0.0..30.0) * km;
    p.g2 = rng.gen_range(0.0..30.0) * km;
    p.gain = rng.gen_range(0.0..3.0) * km;
    p.eps_p = rng.gen_range(0.5..20.0) * km;
    p.temperature = rng.gen_range(0.0..0.3);
    p
}

fn stability_margin_of(p: &SystemParams) -> f64 {
    let report = stability_check(&build_drift_matrix(p), 0.0).expect("finite drift eigenvalues");
    -report.max_real_part
}

/// Resamples [`random_params`] until the drift spectrum clears
/// `margin_km`·κm.
pub fn random_stable_params(rng: &mut impl Rng, margin_km: f64) -> SystemParams {
    loop {
        let p = random_params(rng);
        if stability_margin_of(&p) > margin_km * p.kappa_m {
            return p;
        }
    }
}

/// Like [`random_stable_params`] but with moderate detunings and couplings,
/// keeping the time-integration oracle affordable (the step count scales
/// with ‖A‖ over the stability margin).
fn moderate_stable_params(rng: &mut impl Rng) -> SystemParams {
    loop {
        let mut p = random_params(rng);
        let km = p.kappa_m;
        p.delta1 = rng.gen_range(-12.0..12.0) * km;
        p.delta2 = rng.gen_range(-12.0..12.0) * km;
        p.delta_m = rng.gen_range(-12.0..12.0) * km;
        p.kappa1 = rng.gen_range(0.5..6.0) * km;
        p.kappa2 = rng.gen_range(0.5..6.0) * km;
        p.g1 = rng.gen_range(0.0..12.0) * km;
        p.g2 = rng.gen_range(0.0..12.0) * km;
        if stability_margin_of(&p) > 0.3 * km {
            return p;
        }
    }
}

/// TMSV log-negativity must equal 2r analytically.
pub fn oracle_tmsv(cfg: &ValidateConfig) -> OracleReport {
    let mut worst = 0.0f64;
    for r in [0.5, 1.0, 2.0] {
        let v = CovarianceMatrix::two_mode_squeezed_vacuum(r);
        match gaussian::log_negativity(&v) {
            Ok(e) => worst = worst.max((e - 2.0 * r).abs()),
            Err(e) => {
                return OracleReport::new("tmsv_log_negativity", false, e.to_string());
            }
        }
    }
    OracleReport::new(
        "tmsv_log_negativity",
        worst <= cfg.tol_tmsv,
        format!("worst |E_N - 2r| = {worst:e} (tol {:e})", cfg.tol_tmsv),
    )
}

/// Closed-form mean fields against the real 6×6 linear solve.
pub fn oracle_mean_field_routes(cfg: &ValidateConfig) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0f64;
    for _ in 0..cfg.mean_field_draws {
        let p = random_stable_params(&mut rng, 0.05);
        let lin = match steady_state_mean_fields(&p) {
            Ok(mf) => mf,
            Err(e) => return OracleReport::new("mean_field_routes", false, e.to_string()),
        };
        let cf = mean_fields_closed_form(&p);
        let mut num = 0.0;
        let mut den = 0.0;
        for (a, b) in [(lin.a1, cf.a1), (lin.a2, cf.a2), (lin.m, cf.m)] {
            num += (a - b).norm_sqr();
            den += a.norm_sqr();
        }
        let rel = (num / den.max(f64::MIN_POSITIVE)).sqrt();
        worst = worst.max(rel);
    }
    OracleReport::new(
        "mean_field_routes",
        worst <= cfg.tol_mean_field,
        format!(
            "worst relative disagreement = {worst:e} over {} stable draws (tol {:e})",
            cfg.mean_field_draws, cfg.tol_mean_field
        ),
    )
}

/// Algebraic Lyapunov solution against the adaptive time integration.
pub fn oracle_lyapunov_vs_ode(cfg: &ValidateConfig) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut worst = 0.0f64;
    for _ in 0..cfg.lyapunov_draws {
        let p = moderate_stable_params(&mut rng);
        let a = build_drift_matrix(&p);
        let d = match build_diffusion_matrix(&p) {
            Ok(d) => d,
            Err(e) => return OracleReport::new("lyapunov_vs_ode", false, e.to_string()),
        };
        let alg = match solve_lyapunov(&a, &d) {
            Ok(s) => s,
            Err(e) => return OracleReport::new("lyapunov_vs_ode", false, e.to_string()),
        };
        let ode = match integrate_to_steady_state(&a, &d, 1e-8) {
            Ok(v) => v,
            Err(e) => return OracleReport::new("lyapunov_vs_ode", false, e.to_string()),
        };
        let diff = (alg.v.matrix() - ode.matrix()).norm() / alg.v.matrix().norm();
        worst = worst.max(diff);
    }
    OracleReport::new(
        "lyapunov_vs_ode",
        worst <= cfg.tol_lyapunov,
        format!(
            "worst relative disagreement = {worst:e} over {} stable draws (tol {:e})",
            cfg.lyapunov_draws, cfg.tol_lyapunov
        ),
    )
}

/// Passive system (gain 0, T 0) must output exact vacuum, V = I/2.
pub fn oracle_passive_vacuum(cfg: &ValidateConfig) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2));
    let mut worst_dev = 0.0f64;
    let mut worst_res = 0.0f64;
    for k in 0..50 {
        let mut p = if k == 0 {
            SystemParams::paper_defaults()
        } else {
            random_params(&mut rng)
        };
        p.gain = 0.0;
        p.temperature = 0.0;
        let a = build_drift_matrix(&p);
        let d = build_diffusion_matrix(&p).expect("valid params");
        let sol = match solve_lyapunov(&a, &d) {
            Ok(s) => s,
            Err(e) => return OracleReport::new("passive_vacuum", false, e.to_string()),
        };
        let dev = (sol.v.matrix() - DMatrix::<f64>::identity(6, 6) * 0.5).amax();
        worst_dev = worst_dev.max(dev);
        worst_res = worst_res.max(sol.residual);
    }
    OracleReport::new(
        "passive_vacuum",
        worst_dev <= cfg.tol_passive && worst_res <= cfg.tol_passive,
        format!(
            "worst |V - I/2| = {worst_dev:e}, worst residual = {worst_res:e} (tol {:e})",
            cfg.tol_passive
        ),
    )
}

fn bisect_gain_threshold(base: &SystemParams) -> f64 {
    let stable_at = |gain: f64| {
        let mut p = *base;
        p.gain = gain;
        stability_check(&build_drift_matrix(&p), 0.0)
            .map(|r| r.max_real_part < 0.0)
            .unwrap_or(false)
    };
    let mut lo = 0.0;
    let mut hi = base.kappa_m;
    while stable_at(hi) {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if stable_at(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// With g₁ = g₂ = 0 the stability boundary in the gain is analytic:
/// Ω_th = √(Δ₁² + κ₁²)/2. Bisection on the numerical spectrum must agree.
pub fn oracle_instability_threshold(cfg: &ValidateConfig) -> OracleReport {
    let mut worst = 0.0f64;
    let km = SystemParams::paper_defaults().kappa_m;
    for (delta1_km, kappa1_km) in [(0.0, 5.0), (-20.0, 5.0), (7.5, 2.0)] {
        let mut p = SystemParams::paper_defaults();
        p.g1 = 0.0;
        p.g2 = 0.0;
        p.delta1 = delta1_km * km;
        p.kappa1 = kappa1_km * km;
        let analytic = (p.delta1.powi(2) + p.kappa1.powi(2)).sqrt() / 2.0;
        let found = bisect_gain_threshold(&p);
        worst = worst.max((found - analytic).abs() / km);
    }
    OracleReport::new(
        "instability_threshold",
        worst <= cfg.tol_threshold,
        format!(
            "worst |bisection - analytic| = {worst:e} kappa_m (tol {:e})",
            cfg.tol_threshold
        ),
    )
}

/// Physicality over sweep output: every stable point must have symplectic
/// eigenvalues ≥ 1/2 − tol and a certified Lyapunov residual. The worst raw
/// residual contangle is reported alongside for diagnostics; it is not a
/// pass/fail gate because the squared log-negativity of mixed states can dip
/// mildly below zero in corners of the detuning plane.
pub fn oracle_sweep_physicality(cfg: &ValidateConfig) -> OracleReport {
    let mut specs = Vec::new();
    if let Ok(mut fig3) = sweep::figure_preset("fig3") {
        fig3.axis1.count = 21;
        if let Some(ax) = fig3.axis2.as_mut() {
            ax.count = 21;
        }
        specs.push(fig3);
    }
    if let Ok(mut fig7a) = sweep::figure_preset("fig7a") {
        fig7a.axis1 = Axis::linear(AxisParam::Gain, 0.5, 10.0, 20);
        fig7a.axis2 = Some(Axis::linear(AxisParam::G2OverG1, 0.0, 2.0, 15));
        specs.push(fig7a);
    }
    let mut checked = 0usize;
    let mut min_nu = f64::INFINITY;
    let mut min_residual_contangle = f64::INFINITY;
    for spec in &specs {
        let grid = match sweep::run_grid(spec) {
            Ok(g) => g,
            Err(e) => return OracleReport::new("sweep_physicality", false, e.to_string()),
        };
        for pt in &grid.points {
            let Some(st) = &pt.steady else { continue };
            checked += 1;
            if st.lyapunov_residual > sweep::LYAPUNOV_RESIDUAL_LIMIT {
                return OracleReport::new(
                    "sweep_physicality",
                    false,
                    format!("uncertified residual {:e}", st.lyapunov_residual),
                );
            }
            match gaussian::symplectic_eigenvalues(st.covariance.matrix()) {
                Ok(nus) => min_nu = min_nu.min(nus[0]),
                Err(e) => return OracleReport::new("sweep_physicality", false, e.to_string()),
            }
            for r in st.entanglement.residuals {
                min_residual_contangle = min_residual_contangle.min(r);
            }
        }
    }
    OracleReport::new(
        "sweep_physicality",
        min_nu >= 0.5 - cfg.tol_physicality,
        format!(
            "{checked} stable points: min nu = {min_nu:.12} (tol {:e}); \
             min raw residual contangle = {min_residual_contangle:e} (informational)",
            cfg.tol_physicality
        ),
    )
}

/// The full battery, in a fixed order.
pub fn run_battery(cfg: &ValidateConfig) -> Vec<OracleReport> {
    vec![
        oracle_tmsv(cfg),
        oracle_mean_field_routes(cfg),
        oracle_lyapunov_vs_ode(cfg),
        oracle_passive_vacuum(cfg),
        oracle_instability_threshold(cfg),
        oracle_sweep_physicality(cfg),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MeanFields;
    use num_complex::Complex64;

    fn quick_config() -> ValidateConfig {
        ValidateConfig {
            mean_field_draws: 40,
            lyapunov_draws: 5,
            ..ValidateConfig::default()
        }
    }

    #[test]
    fn battery_passes_on_quick_config() {
        for report in run_battery(&quick_config()) {
            assert!(report.passed, "{}: {}", report.name, report.detail);
        }
    }

    #[test]
    fn absurd_tolerance_fails() {
        let cfg = ValidateConfig {
            tol_mean_field: 1e-30,
            mean_field_draws: 10,
            ..quick_config()
        };
        let report = oracle_mean_field_routes(&cfg);
        assert!(!report.passed);
    }

    #[test]
    fn random_stable_params_respect_margin() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let p = random_stable_params(&mut rng, 0.05);
            assert!(stability_margin_of(&p) > 0.05 * p.kappa_m);
            p.validate().unwrap();
        }
    }

    /// Mutation check: a sign flip in the drift entry A(2,1) must be caught
    /// by the battery's routes (mean-field disagreement, instability, or an
    /// unphysical covariance).
    #[test]
    fn injected_sign_flip_is_detected() {
        let p = SystemParams::paper_defaults();
        let mut drift = build_drift_matrix(&p);
        drift.a[(1, 0)] = -drift.a[(1, 0)];

        let report = stability_check(&drift, p.stability_margin()).unwrap();
        let mut detected = !report.stable;

        // mean-field route: fixed point of the mutated dynamics vs closed form
        let rhs = nalgebra::Vector6::new(0.0, p.eps_p, 0.0, 0.0, 0.0, 0.0);
        if let Some(u) = drift.a.lu().solve(&rhs) {
            let mutated = MeanFields::from_amplitudes(
                Complex64::new(u[0], u[1]),
                Complex64::new(u[2], u[3]),
                Complex64::new(u[4], u[5]),
            );
            let cf = mean_fields_closed_form(&p);
            let rel = (mutated.a1 - cf.a1).norm() / cf.a1.norm();
            if rel > 1e-6 {
                detected = true;
            }
        }

        if report.stable {
            let d = build_diffusion_matrix(&p).unwrap();
            match solve_lyapunov(&drift, &d) {
                Ok(sol) => {
                    if !sol.v.is_physical(1e-9).unwrap_or(false) {
                        detected = true;
                    }
                }
                Err(_) => detected = true,
            }
        }
        assert!(detected, "sign flip in A(2,1) went unnoticed");
    }
}
