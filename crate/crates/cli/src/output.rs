//! Report rendering: the flat sweep CSV, the JSON argmax summary and the
//! aligned human-readable point report.

use std::io::Write;

use cavmag::model::StabilityReport;
use cavmag::sweep::{GridResult, PointResult, PointStatus};

/// Fixed CSV schema; masked quantities serialize as `nan`.
pub const CSV_HEADER: &str = "axis1,axis2,stable,N1,N2,Nm,E_a1m,E_a2m,E_a1a2,R_tau_min,\
var_X1,var_Y1,var_X2,var_Y2,var_x,var_y,sq_x_dB,sq_y_dB,sq_Y2_dB,low_exc_ratio";

/// Lower-exponent formatting round-trips f64 exactly and keeps the table
/// compact; `nan` is spelled out so any float parser accepts it.
pub fn fmt_cell(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:e}")
    }
}

fn point_row(axis1: f64, axis2: Option<f64>, pt: &PointResult) -> String {
    let nan = f64::NAN;
    let (n1, n2, nm) = pt
        .mean_fields
        .as_ref()
        .map_or((nan, nan, nan), |m| (m.n1, m.n2, m.nm));
    let low = pt.low_excitation.as_ref().map_or(nan, |l| l.ratio);
    let mut steady = [nan; 13];
    if let Some(st) = &pt.steady {
        let e = &st.entanglement;
        steady = [
            e.e_a1m,
            e.e_a2m,
            e.e_a1a2,
            e.r_tau_min,
            st.variances[0],
            st.variances[1],
            st.variances[2],
            st.variances[3],
            st.variances[4],
            st.variances[5],
            st.squeezing_db[4],
            st.squeezing_db[5],
            st.squeezing_db[3],
        ];
    }
    let mut cells = Vec::with_capacity(20);
    cells.push(fmt_cell(axis1));
    cells.push(fmt_cell(axis2.unwrap_or(nan)));
    cells.push(if pt.is_stable() { "1" } else { "0" }.to_string());
    for v in [n1, n2, nm] {
        cells.push(fmt_cell(v));
    }
    for v in steady {
        cells.push(fmt_cell(v));
    }
    cells.push(fmt_cell(low));
    cells.join(",")
}

pub fn write_csv(mut w: impl Write, grid: &GridResult) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    let (n1, n2) = grid.spec.shape();
    let ax1 = grid.spec.axis1.values();
    let ax2 = grid.spec.axis2.as_ref().map(|a| a.values());
    for i in 0..n1 {
        for j in 0..n2 {
            let row = point_row(ax1[i], ax2.as_ref().map(|v| v[j]), grid.point(i, j));
            writeln!(w, "{row}")?;
        }
    }
    Ok(())
}

fn km_units(v: f64, km: f64) -> String {
    format!("{:.4}", v / km)
}

fn stability_lines(report: &StabilityReport, km: f64, out: &mut String) {
    out.push_str(&format!(
        "stability: {} (max Re lambda = {:.6e} kappa_m, margin 1e-9 kappa_m)\n",
        if report.stable { "stable" } else { "UNSTABLE" },
        report.max_real_part / km
    ));
    out.push_str("  eigenvalues (kappa_m units):\n");
    for l in &report.eigenvalues {
        out.push_str(&format!("    {:+.6} {:+.6}i\n", l.re / km, l.im / km));
    }
}

/// Aligned human-readable report for `cavmag point`.
pub fn point_report(pt: &PointResult) -> String {
    let p = &pt.params;
    let km = p.kappa_m;
    let mut out = String::new();
    out.push_str(&format!(
        "parameters (kappa_m/2pi = {:.4} MHz, omega1/2pi = {:.4} GHz):\n",
        km / (2.0 * std::f64::consts::PI * 1e6),
        p.omega1 / (2.0 * std::f64::consts::PI * 1e9),
    ));
    out.push_str(&format!(
        "  delta1 = {} km   delta2 = {} km   delta_m = {} km\n",
        km_units(p.delta1, km),
        km_units(p.delta2, km),
        km_units(p.delta_m, km)
    ));
    out.push_str(&format!(
        "  kappa1 = {} km   kappa2 = {} km   g1 = {} km   g2 = {} km\n",
        km_units(p.kappa1, km),
        km_units(p.kappa2, km),
        km_units(p.g1, km),
        km_units(p.g2, km)
    ));
    out.push_str(&format!(
        "  eps_p  = {} km   gain   = {} km   T  = {:.4} mK\n",
        km_units(p.eps_p, km),
        km_units(p.gain, km),
        p.temperature * 1e3
    ));

    match &pt.stability {
        Some(report) => stability_lines(report, km, &mut out),
        None => out.push_str("stability: unavailable\n"),
    }

    match &pt.mean_fields {
        Some(mf) => {
            out.push_str("mean fields:\n");
            out.push_str(&format!(
                "  <a1> = {:+.6e} {:+.6e}i   N1 = {:.6e}\n",
                mf.a1.re, mf.a1.im, mf.n1
            ));
            out.push_str(&format!(
                "  <a2> = {:+.6e} {:+.6e}i   N2 = {:.6e}\n",
                mf.a2.re, mf.a2.im, mf.n2
            ));
            out.push_str(&format!(
                "  <m>  = {:+.6e} {:+.6e}i   Nm = {:.6e}\n",
                mf.m.re, mf.m.im, mf.nm
            ));
        }
        None => out.push_str("mean fields: unavailable\n"),
    }
    if let Some(low) = &pt.low_excitation {
        out.push_str(&format!(
            "low-excitation ratio Nm/(2Ns) = {:.3e} ({})\n",
            low.ratio,
            if low.ok { "ok" } else { "VIOLATED" }
        ));
    }

    match &pt.steady {
        Some(st) => {
            let e = &st.entanglement;
            out.push_str("steady-state quantities:\n");
            out.push_str(&format!(
                "  E_a1m = {:.6}   E_a2m = {:.6}   E_a1a2 = {:.6}\n",
                e.e_a1m, e.e_a2m, e.e_a1a2
            ));
            out.push_str(&format!(
                "  one-vs-rest: a1 = {:.6}   a2 = {:.6}   m = {:.6}\n",
                e.e_a1_rest, e.e_a2_rest, e.e_m_rest
            ));
            out.push_str(&format!(
                "  residual contangles = [{:.3e}, {:.3e}, {:.3e}]   R_tau_min = {:.6}\n",
                e.residuals[0], e.residuals[1], e.residuals[2], e.r_tau_min
            ));
            let names = ["X1", "Y1", "X2", "Y2", "x ", "y "];
            out.push_str("  quadrature   variance      squeezing\n");
            for (k, name) in names.iter().enumerate() {
                out.push_str(&format!(
                    "  {name}           {:<12.6}  {:+.4} dB\n",
                    st.variances[k], st.squeezing_db[k]
                ));
            }
            out.push_str(&format!(
                "  lyapunov residual = {:.3e}\n",
                st.lyapunov_residual
            ));
        }
        None => match &pt.status {
            PointStatus::Unstable => {
                out.push_str("steady-state quantities: masked (unstable point)\n")
            }
            PointStatus::Failed(msg) => {
                out.push_str(&format!("steady-state quantities: failed ({msg})\n"))
            }
            PointStatus::Stable => {}
        },
    }
    out
}
