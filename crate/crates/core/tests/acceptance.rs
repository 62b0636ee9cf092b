//! Acceptance suite: one test per numbered criterion, each printing a
//! PASS/FAIL line per clause (visible with `--nocapture`).
//!
//! Two clauses are knowingly red; their failure messages carry the analysis:
//! * criterion 1: the peak photon number bound (10, 1e3) cannot hold on the
//!   pinned ±60κm scan — the stable mean-field ridge grows like Δm⁴ because
//!   the gain sits exactly at the bare Δ₁=0 cavity threshold κ₁/2. The bound
//!   does hold on a ±30κm scan (see `fig2_reference_bounds_hold_on_narrower_scan`).
//! * criterion 7: the monogamy clause — the operational contangle (squared
//!   log-negativity of the mixed steady state) is not a monogamous measure;
//!   ~5% of stable fig3-preset points dip to ≈ −8.5e-5, cross-checked by two
//!   independent implementations.

use std::sync::LazyLock;

use cavmag::gaussian::symplectic_eigenvalues;
use cavmag::model::{resonance_locus, SystemParams};
use cavmag::sweep::{figure_preset, run_grid, run_point, GridResult, GridSpec, PRESET_NAMES};
use cavmag::validate::{
    oracle_instability_threshold, oracle_lyapunov_vs_ode, oracle_mean_field_routes, oracle_tmsv,
    ValidateConfig,
};

fn compute(name: &str) -> GridResult {
    run_grid(&figure_preset(name).unwrap()).unwrap()
}

static FIG2: LazyLock<GridResult> = LazyLock::new(|| compute("fig2"));
static FIG35: LazyLock<GridResult> = LazyLock::new(|| compute("fig3"));
static FIG5C: LazyLock<GridResult> = LazyLock::new(|| compute("fig5c"));
static FIG6: LazyLock<GridResult> = LazyLock::new(|| compute("fig6"));
static FIG7A: LazyLock<GridResult> = LazyLock::new(|| compute("fig7a"));
static FIG7B: LazyLock<GridResult> = LazyLock::new(|| compute("fig7b"));

fn grid_for(preset: &str) -> &'static GridResult {
    match preset {
        "fig2" => &FIG2,
        "fig3" | "fig4" | "fig5ab" | "fig5d" => &FIG35,
        "fig5c" => &FIG5C,
        "fig6" => &FIG6,
        "fig7a" => &FIG7A,
        "fig7b" => &FIG7B,
        other => panic!("no cached grid for {other}"),
    }
}

struct Criterion {
    name: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            failures: Vec::new(),
        }
    }

    fn clause(&mut self, label: &str, pass: bool, detail: String) {
        println!(
            "ACCEPT {} | {label}: {detail} — {}",
            self.name,
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            self.failures.push(format!("{label}: {detail}"));
        }
    }

    fn finish(self) {
        assert!(
            self.failures.is_empty(),
            "{}: failing clauses:\n  {}",
            self.name,
            self.failures.join("\n  ")
        );
    }
}

fn min_stable_variance(grid: &GridResult, quadrature: usize) -> f64 {
    grid.points
        .iter()
        .filter_map(|p| p.steady.as_ref())
        .map(|s| s.variances[quadrature])
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn criterion_1_fig2_reproduction() {
    let mut c = Criterion::new("criterion 1 (fig2 reproduction, 201x201 over ±60κm)");
    let s = &FIG2.summary;
    assert_eq!(s.total, 201 * 201);

    let e = s.e_a1m.expect("stable points exist").value;
    c.clause(
        "max E_a1m",
        (0.25..=0.35).contains(&e),
        format!("{e:.4} expected in [0.25, 0.35]"),
    );

    let n1 = s.n1.unwrap().value;
    c.clause(
        "peak N1 in (10, 1e3)",
        n1 > 10.0 && n1 < 1e3,
        format!(
            "{n1:.1}; the bound cannot hold on a ±60κm scan: the stable ridge at \
             Re P = 0 grows like Δm⁴ (gain = bare Δ₁=0 threshold κ₁/2) and reaches \
             ~4.1e3 at the Δm = ±60κm edge; it holds on ±30κm, see the companion test"
        ),
    );

    let nm = s.nm.unwrap().value;
    c.clause(
        "peak Nm in (10, 1e3)",
        nm > 10.0 && nm < 1e3,
        format!("{nm:.1}"),
    );

    let var_x = min_stable_variance(&FIG2, 4);
    c.clause(
        "min <dx^2> below vacuum",
        var_x < 0.5,
        format!("{var_x:.4} expected < 0.5"),
    );
    c.finish();
}

/// Companion to criterion 1: on the narrower ±30κm scan consistent with the
/// published density plots, all four reference bounds hold simultaneously.
#[test]
fn fig2_reference_bounds_hold_on_narrower_scan() {
    let mut spec = figure_preset("fig2").unwrap();
    spec.axis1.min = -30.0;
    spec.axis1.max = 30.0;
    let ax2 = spec.axis2.as_mut().unwrap();
    ax2.min = -30.0;
    ax2.max = 30.0;
    let grid = run_grid(&spec).unwrap();
    let s = &grid.summary;
    let e = s.e_a1m.unwrap().value;
    let n1 = s.n1.unwrap().value;
    let nm = s.nm.unwrap().value;
    let var_x = min_stable_variance(&grid, 4);
    println!("±30κm scan: max E_a1m = {e:.4}, peak N1 = {n1:.1}, peak Nm = {nm:.1}, min var_x = {var_x:.4}");
    assert!((0.25..=0.35).contains(&e));
    assert!(n1 > 10.0 && n1 < 1e3, "N1 = {n1}");
    assert!(nm > 10.0 && nm < 1e3, "Nm = {nm}");
    assert!(var_x < 0.5);
}

#[test]
fn criterion_2_no_squeezing_null_test() {
    let mut c = Criterion::new("criterion 2 (gain 0, T 0 null test)");
    // the fig2 scan geometry and the coupled fig3 geometry, both undriven
    for (label, preset, n) in [("g2=0 scan", "fig2", 61), ("g2=g1 scan", "fig3", 31)] {
        let mut spec = figure_preset(preset).unwrap();
        spec.base.gain = 0.0;
        spec.base.temperature = 0.0;
        spec.axis1.count = n;
        spec.axis2.as_mut().unwrap().count = n;
        let grid = run_grid(&spec).unwrap();

        let all_stable = grid.summary.stable == grid.summary.total;
        let mut worst_v = 0.0f64;
        let mut worst_e = 0.0f64;
        let mut worst_var = 0.0f64;
        for pt in &grid.points {
            let st = pt.steady.as_ref().expect("stable passive point");
            let m = st.covariance.matrix();
            for i in 0..6 {
                for j in 0..6 {
                    let expect = if i == j { 0.5 } else { 0.0 };
                    worst_v = worst_v.max((m[(i, j)] - expect).abs());
                }
            }
            let e = &st.entanglement;
            worst_e = worst_e
                .max(e.e_a1m)
                .max(e.e_a2m)
                .max(e.e_a1a2)
                .max(e.r_tau_min);
            for v in st.variances {
                worst_var = worst_var.max((v - 0.5).abs());
            }
        }
        c.clause(
            &format!("{label}: all points stable"),
            all_stable,
            format!("{}/{}", grid.summary.stable, grid.summary.total),
        );
        c.clause(
            &format!("{label}: V = I/2 to 1e-10"),
            worst_v <= 1e-10,
            format!("worst |V - I/2| = {worst_v:e}"),
        );
        // V = I/2 to 1e-10 bounds the measures at -ln(2(1/2 - 1e-10)) ~ 1e-9
        c.clause(
            &format!("{label}: all entanglement zero"),
            worst_e <= 1e-9,
            format!("worst measure = {worst_e:e}"),
        );
        c.clause(
            &format!("{label}: variances = 1/2"),
            worst_var <= 1e-10,
            format!("worst |var - 1/2| = {worst_var:e}"),
        );
    }
    c.finish();
}

#[test]
fn criterion_3_entanglement_transfer() {
    let mut c = Criterion::new("criterion 3 (fig3-5 entanglement transfer)");
    let s = &FIG35.summary;
    for (label, arg) in [
        ("max E_a1m", s.e_a1m),
        ("max E_a2m", s.e_a2m),
        ("max E_a1a2", s.e_a1a2),
    ] {
        let v = arg.unwrap().value;
        c.clause(label, v > 1e-6, format!("{v:.4}"));
    }
    let best = s.r_tau_min.unwrap();
    c.clause(
        "max R_tau_min positive",
        best.value > 0.0,
        format!("{:.5}", best.value),
    );
    let p = FIG35.point(best.index.0, best.index.1).params;
    let locus = resonance_locus(&p).unwrap();
    let dist_km = (p.delta_m - locus).abs() / p.kappa_m;
    c.clause(
        "argmax within 5κm of the locus",
        dist_km <= 5.0,
        format!(
            "argmax at Δ2 = {:.1}κm, Δm = {:.1}κm; locus Δm = {:.2}κm; |distance| = {dist_km:.2}κm",
            p.delta2 / p.kappa_m,
            p.delta_m / p.kappa_m,
            locus / p.kappa_m
        ),
    );
    c.finish();
}

#[test]
fn criterion_4_temperature_robustness() {
    let mut c = Criterion::new("criterion 4 (fig5c temperature robustness)");
    let spec = &FIG5C.spec;
    let values = spec.axis1.values();

    let mut p10 = spec.base;
    p10.temperature = 0.010;
    let at_10mk = run_point(&p10)
        .steady
        .expect("stable at 10 mK")
        .entanglement
        .e_a1a2;
    c.clause(
        "E_a1a2 > 0 at 10 mK",
        at_10mk > 0.0,
        format!("{at_10mk:.4}"),
    );

    let e: Vec<f64> = FIG5C
        .points
        .iter()
        .map(|pt| pt.steady.as_ref().expect("stable").entanglement.e_a1a2)
        .collect();
    let monotone = e.windows(2).all(|w| w[1] <= w[0] + 1e-6);
    c.clause(
        "non-increasing in T",
        monotone,
        format!("{} log-spaced points in [1, 300] mK", e.len()),
    );

    let crossing = e.iter().position(|&x| x == 0.0);
    match crossing {
        Some(k) => {
            let t_mk = values[k];
            c.clause(
                "zero crossing in [100, 300] mK",
                (100.0..=300.0).contains(&t_mk),
                format!("first zero at T = {t_mk:.1} mK"),
            );
        }
        None => c.clause(
            "zero crossing in [100, 300] mK",
            false,
            "no zero crossing up to 300 mK".to_string(),
        ),
    }
    c.finish();
}

#[test]
fn criterion_5_squeezing_optima() {
    let mut c = Criterion::new("criterion 5 (fig6 squeezing optima)");
    let s = &FIG6.summary;
    let gain_x = s.sq_x_db.unwrap();
    c.clause(
        "amplitude-quadrature optimum gain = 8±2 κm",
        (6.0..=10.0).contains(&gain_x.axis1),
        format!(
            "best squeezing {:.2} dB at gain = {:.2}κm, Δm = {:.1}κm",
            gain_x.value,
            gain_x.axis1,
            gain_x.axis2.unwrap()
        ),
    );
    let gain_y = s.sq_y_db.unwrap();
    c.clause(
        "phase-quadrature optimum gain = 2±1 κm",
        (1.0..=3.0).contains(&gain_y.axis1),
        format!(
            "best squeezing {:.2} dB at gain = {:.2}κm, Δm = {:.1}κm",
            gain_y.value,
            gain_y.axis1,
            gain_y.axis2.unwrap()
        ),
    );
    c.finish();
}

#[test]
fn criterion_6_coupling_ratio_optimum() {
    let mut c = Criterion::new("criterion 6 (fig7 coupling-ratio optimum)");
    let best_e = FIG7A.summary.e_a1a2.unwrap();
    let ratio_e = best_e.axis2.unwrap();
    c.clause(
        "fig7a: argmax E_a1a2 at g2/g1 in [0.8, 1.2]",
        (0.8..=1.2).contains(&ratio_e),
        format!(
            "max E_a1a2 = {:.4} at gain = {:.2}κm, g2/g1 = {ratio_e:.2}",
            best_e.value, best_e.axis1
        ),
    );
    let best_sq = FIG7B.summary.sq_x_db.unwrap();
    let ratio_sq = best_sq.axis2.unwrap();
    c.clause(
        "fig7b: argmax amplitude squeezing at g2/g1 in [0.8, 1.2]",
        (0.8..=1.2).contains(&ratio_sq),
        format!(
            "best squeezing {:.2} dB at gain = {:.2}κm, g2/g1 = {ratio_sq:.2}",
            best_sq.value, best_sq.axis1
        ),
    );
    c.finish();
}

#[test]
fn criterion_7_oracle_battery() {
    let mut c = Criterion::new("criterion 7 (oracle battery)");
    let cfg = ValidateConfig::default();
    assert_eq!(cfg.mean_field_draws, 1000);
    assert_eq!(cfg.lyapunov_draws, 200);

    for report in [
        oracle_tmsv(&cfg),
        oracle_lyapunov_vs_ode(&cfg),
        oracle_mean_field_routes(&cfg),
        oracle_instability_threshold(&cfg),
    ] {
        c.clause(report.name, report.passed, report.detail);
    }

    // physicality and monogamy at every stable sweep point of the presets
    let mut min_nu = f64::INFINITY;
    let mut worst_r = f64::INFINITY;
    let mut worst_r_where = String::new();
    for preset in ["fig2", "fig3", "fig5c", "fig6", "fig7a", "fig7b"] {
        let grid = grid_for(preset);
        for pt in &grid.points {
            let Some(st) = &pt.steady else { continue };
            let nus = symplectic_eigenvalues(st.covariance.matrix()).unwrap();
            min_nu = min_nu.min(nus[0]);
            for r in st.entanglement.residuals {
                if r < worst_r {
                    worst_r = r;
                    worst_r_where = format!(
                        "{preset} at Δ1 = {:.1}κm, Δ2 = {:.1}κm, Δm = {:.1}κm, gain = {:.2}κm, g2/g1 = {:.2}",
                        pt.params.delta1 / pt.params.kappa_m,
                        pt.params.delta2 / pt.params.kappa_m,
                        pt.params.delta_m / pt.params.kappa_m,
                        pt.params.gain / pt.params.kappa_m,
                        pt.params.g2 / pt.params.g1,
                    );
                }
            }
        }
    }
    c.clause(
        "symplectic eigenvalues >= 1/2 - 1e-9 at every stable sweep point",
        min_nu >= 0.5 - 1e-9,
        format!("min nu = {min_nu:.12}"),
    );
    c.clause(
        "monogamy: residual contangles >= -1e-9 at every stable sweep point",
        worst_r >= -1e-9,
        format!(
            "worst raw residual contangle = {worst_r:e} ({worst_r_where}); the squared \
             log-negativity of a mixed state is not a monogamous measure, so mild \
             violations in the far-detuned lobe are genuine (cross-checked by an \
             independent implementation), not numerical error"
        ),
    );
    c.finish();
}

#[test]
fn criterion_8_low_excitation_audit() {
    let mut c = Criterion::new("criterion 8 (low-excitation audit)");
    let sphere = SystemParams::paper_defaults().sphere;
    let two_ns = 2.0 * sphere.total_spins() * sphere.spin_number;
    c.clause(
        "2Ns matches the 250 µm sphere",
        (two_ns / 1.726e17 - 1.0).abs() < 1e-2,
        format!("2Ns = {two_ns:.4e}"),
    );
    for preset in PRESET_NAMES {
        let grid = grid_for(preset);
        // presets sharing a cached grid must really be the same spec
        assert_eq!(figure_preset(preset).unwrap(), grid.spec);
        let ratio = grid.summary.low_excitation_ratio.unwrap().value;
        c.clause(
            &format!("{preset}: max Nm/(2Ns) < 1e-3"),
            ratio < 1e-3,
            format!("{ratio:.3e}"),
        );
    }
    c.finish();
}
