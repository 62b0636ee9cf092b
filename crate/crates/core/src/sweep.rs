//! Full-pipeline evaluation at single points and over rectangular 1-D/2-D
//! parameter grids, with stability masking and figure presets.
//!
//! Grid points are pure functions of their parameters and are evaluated
//! independently; results are assembled by index, so output is deterministic
//! and identical for the parallel and sequential paths.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{self, EntanglementResult};
use crate::lyapunov::{solve_lyapunov, LyapunovSolution};
use crate::model::{
    build_diffusion_matrix, build_drift_matrix, low_excitation_check, stability_check,
    steady_state_mean_fields, LowExcitation, MeanFields, StabilityReport, SystemParams,
};

/// A stable point whose Lyapunov solve cannot certify this residual is
/// recorded as a numerical failure and masked.
pub const LYAPUNOV_RESIDUAL_LIMIT: f64 = 1e-10;

/// Sweepable parameter. Detunings, gain and drive are in κm multiples,
/// temperature in mK, `G2OverG1` is the dimensionless ratio g₂/g₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    Delta1,
    Delta2,
    DeltaM,
    Gain,
    G2OverG1,
    Temperature,
    EpsP,
}

impl AxisParam {
    pub fn name(&self) -> &'static str {
        match self {
            AxisParam::Delta1 => "delta1",
            AxisParam::Delta2 => "delta2",
            AxisParam::DeltaM => "deltaM",
            AxisParam::Gain => "gain",
            AxisParam::G2OverG1 => "g2_over_g1",
            AxisParam::Temperature => "temperature",
            AxisParam::EpsP => "epsP",
        }
    }
}

impl std::str::FromStr for AxisParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta1" => Ok(AxisParam::Delta1),
            "delta2" => Ok(AxisParam::Delta2),
            "deltaM" => Ok(AxisParam::DeltaM),
            "gain" => Ok(AxisParam::Gain),
            "g2_over_g1" => Ok(AxisParam::G2OverG1),
            "temperature" => Ok(AxisParam::Temperature),
            "epsP" => Ok(AxisParam::EpsP),
            other => Err(Error::InvalidGrid(format!(
                "unknown axis parameter `{other}` (expected one of delta1, delta2, deltaM, \
                 gain, g2_over_g1, temperature, epsP)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// One sweep axis: `count` values from `min` to `max` inclusive, in the
/// parameter's configuration units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: AxisParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(param: AxisParam, min: f64, max: f64, count: usize) -> Self {
        Self {
            param,
            min,
            max,
            count,
            spacing: Spacing::Linear,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        match self.spacing {
            Spacing::Linear => {
                let step = (self.max - self.min) / (n - 1) as f64;
                (0..n).map(|k| self.min + step * k as f64).collect()
            }
            Spacing::Log => {
                let (lo, hi) = (self.min.ln(), self.max.ln());
                let step = (hi - lo) / (n - 1) as f64;
                (0..n).map(|k| (lo + step * k as f64).exp()).collect()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidGrid(format!(
                "axis {} needs count >= 2, got {}",
                self.param.name(),
                self.count
            )));
        }
        if !self.min.is_finite() || !self.max.is_finite() || self.min >= self.max {
            return Err(Error::InvalidGrid(format!(
                "axis {} needs finite min < max, got [{}, {}]",
                self.param.name(),
                self.min,
                self.max
            )));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "axis {}: log spacing needs min > 0",
                self.param.name()
            )));
        }
        Ok(())
    }
}

fn apply_axis(p: &mut SystemParams, param: AxisParam, value: f64) {
    match param {
        AxisParam::Delta1 => p.delta1 = value * p.kappa_m,
        AxisParam::Delta2 => p.delta2 = value * p.kappa_m,
        AxisParam::DeltaM => p.delta_m = value * p.kappa_m,
        AxisParam::Gain => p.gain = value * p.kappa_m,
        AxisParam::G2OverG1 => p.g2 = value * p.g1,
        AxisParam::Temperature => p.temperature = value * 1e-3,
        AxisParam::EpsP => p.eps_p = value * p.kappa_m,
    }
}

/// Rectangular sweep: a base parameter set plus one or two axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub base: SystemParams,
    pub axis1: Axis,
    pub axis2: Option<Axis>,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.axis1.validate()?;
        if let Some(axis2) = &self.axis2 {
            axis2.validate()?;
            if axis2.param == self.axis1.param {
                return Err(Error::InvalidGrid(format!(
                    "both axes sweep {}",
                    axis2.param.name()
                )));
            }
        }
        Ok(())
    }

    /// (axis1 count, axis2 count); a 1-D sweep has axis2 count 1.
    pub fn shape(&self) -> (usize, usize) {
        (self.axis1.count, self.axis2.as_ref().map_or(1, |a| a.count))
    }

    /// Parameters at grid node (i, j), row-major in axis1.
    pub fn params_at(&self, i: usize, j: usize) -> SystemParams {
        let mut p = self.base;
        apply_axis(&mut p, self.axis1.param, self.axis1.values()[i]);
        if let Some(axis2) = &self.axis2 {
            apply_axis(&mut p, axis2.param, axis2.values()[j]);
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Stable,
    Unstable,
    Failed(String),
}

/// Covariance-derived quantities; present only for stable points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyQuantities {
    pub covariance: gaussian::CovarianceMatrix,
    pub lyapunov_residual: f64,
    pub entanglement: EntanglementResult,
    /// Diagonal of V in order (δX₁, δY₁, δX₂, δY₂, δx, δy).
    pub variances: [f64; 6],
    /// Squeezing of each quadrature in dB (positive = below vacuum).
    pub squeezing_db: [f64; 6],
}

/// Full diagnostics at one parameter point. Mean fields and stability are
/// present whenever they are computable; covariance-derived fields exist
/// only for stable points (absent, never zero-filled).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub params: SystemParams,
    pub stability: Option<StabilityReport>,
    pub mean_fields: Option<MeanFields>,
    pub low_excitation: Option<LowExcitation>,
    pub steady: Option<SteadyQuantities>,
    pub status: PointStatus,
}

impl PointResult {
    pub fn is_stable(&self) -> bool {
        self.status == PointStatus::Stable
    }
}

/// Evaluate the full pipeline at one parameter point. Never panics on
/// numerical failure; failures are recorded in `status` so grids can
/// record-and-continue.
pub fn run_point(p: &SystemParams) -> PointResult {
    let mut point = PointResult {
        params: *p,
        stability: None,
        mean_fields: None,
        low_excitation: None,
        steady: None,
        status: PointStatus::Unstable,
    };

    if let Err(e) = p.validate() {
        point.status = PointStatus::Failed(e.to_string());
        return point;
    }

    let drift = build_drift_matrix(p);
    let stability = match stability_check(&drift, p.stability_margin()) {
        Ok(s) => s,
        Err(e) => {
            point.status = PointStatus::Failed(e.to_string());
            return point;
        }
    };
    let stable = stability.stable;
    point.stability = Some(stability);

    match steady_state_mean_fields(p) {
        Ok(mf) => {
            point.low_excitation = Some(low_excitation_check(&mf, &p.sphere));
            point.mean_fields = Some(mf);
        }
        Err(e) => {
            point.status = PointStatus::Failed(e.to_string());
            return point;
        }
    }

    if !stable {
        point.status = PointStatus::Unstable;
        return point;
    }

    let diffusion = match build_diffusion_matrix(p) {
        Ok(d) => d,
        Err(e) => {
            point.status = PointStatus::Failed(e.to_string());
            return point;
        }
    };
    let LyapunovSolution { v, residual } = match solve_lyapunov(&drift, &diffusion) {
        Ok(sol) => sol,
        Err(e) => {
            point.status = PointStatus::Failed(e.to_string());
            return point;
        }
    };
    if residual > LYAPUNOV_RESIDUAL_LIMIT {
        point.status = PointStatus::Failed(format!(
            "lyapunov residual {residual:e} above {LYAPUNOV_RESIDUAL_LIMIT:e}"
        ));
        return point;
    }
    let entanglement = match gaussian::entanglement_measures(&v) {
        Ok(e) => e,
        Err(e) => {
            point.status = PointStatus::Failed(e.to_string());
            return point;
        }
    };

    let mut variances = [0.0; 6];
    let mut squeezing = [0.0; 6];
    for q in 0..6 {
        variances[q] = match v.variance(q) {
            Ok(x) => x,
            Err(e) => {
                point.status = PointStatus::Failed(e.to_string());
                return point;
            }
        };
        squeezing[q] = match gaussian::squeezing_db(variances[q]) {
            Ok(x) => x,
            Err(e) => {
                point.status = PointStatus::Failed(e.to_string());
                return point;
            }
        };
    }

    point.steady = Some(SteadyQuantities {
        covariance: v,
        lyapunov_residual: residual,
        entanglement,
        variances,
        squeezing_db: squeezing,
    });
    point.status = PointStatus::Stable;
    point
}

/// Location and value of a per-quantity maximum over the stable points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArgMax {
    pub value: f64,
    pub index: (usize, usize),
    pub axis1: f64,
    pub axis2: Option<f64>,
}

/// Per-quantity maxima over stable points; `None` when no stable point
/// produced the quantity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub total: usize,
    pub stable: usize,
    pub unstable: usize,
    pub failed: usize,
    pub e_a1m: Option<ArgMax>,
    pub e_a2m: Option<ArgMax>,
    pub e_a1a2: Option<ArgMax>,
    pub r_tau_min: Option<ArgMax>,
    pub sq_x_db: Option<ArgMax>,
    pub sq_y_db: Option<ArgMax>,
    pub sq_y2_db: Option<ArgMax>,
    pub n1: Option<ArgMax>,
    pub n2: Option<ArgMax>,
    pub nm: Option<ArgMax>,
    pub low_excitation_ratio: Option<ArgMax>,
}

/// Row-major sweep output: `points[i * count2 + j]` is node (i, j).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub spec: GridSpec,
    pub points: Vec<PointResult>,
    pub summary: GridSummary,
}

impl GridResult {
    pub fn point(&self, i: usize, j: usize) -> &PointResult {
        let (_, n2) = self.spec.shape();
        &self.points[i * n2 + j]
    }
}

fn update_max(
    slot: &mut Option<ArgMax>,
    value: f64,
    index: (usize, usize),
    axis1: f64,
    axis2: Option<f64>,
) {
    if !value.is_finite() {
        return;
    }
    let better = slot.map_or(true, |cur| value > cur.value);
    if better {
        *slot = Some(ArgMax {
            value,
            index,
            axis1,
            axis2,
        });
    }
}

fn summarize(spec: &GridSpec, points: &[PointResult]) -> GridSummary {
    let (_, n2) = spec.shape();
    let ax1 = spec.axis1.values();
    let ax2 = spec.axis2.as_ref().map(|a| a.values());
    let mut s = GridSummary {
        total: points.len(),
        ..GridSummary::default()
    };
    for (idx, pt) in points.iter().enumerate() {
        let (i, j) = (idx / n2, idx % n2);
        let a1 = ax1[i];
        let a2 = ax2.as_ref().map(|v| v[j]);
        match &pt.status {
            PointStatus::Stable => s.stable += 1,
            PointStatus::Unstable => s.unstable += 1,
            PointStatus::Failed(_) => s.failed += 1,
        }
        if !pt.is_stable() {
            continue;
        }
        if let Some(mf) = &pt.mean_fields {
            update_max(&mut s.n1, mf.n1, (i, j), a1, a2);
            update_max(&mut s.n2, mf.n2, (i, j), a1, a2);
            update_max(&mut s.nm, mf.nm, (i, j), a1, a2);
        }
        if let Some(low) = &pt.low_excitation {
            update_max(&mut s.low_excitation_ratio, low.ratio, (i, j), a1, a2);
        }
        if let Some(st) = &pt.steady {
            let e = &st.entanglement;
            update_max(&mut s.e_a1m, e.e_a1m, (i, j), a1, a2);
            update_max(&mut s.e_a2m, e.e_a2m, (i, j), a1, a2);
            update_max(&mut s.e_a1a2, e.e_a1a2, (i, j), a1, a2);
            update_max(&mut s.r_tau_min, e.r_tau_min, (i, j), a1, a2);
            update_max(&mut s.sq_x_db, st.squeezing_db[4], (i, j), a1, a2);
            update_max(&mut s.sq_y_db, st.squeezing_db[5], (i, j), a1, a2);
            update_max(&mut s.sq_y2_db, st.squeezing_db[3], (i, j), a1, a2);
        }
    }
    s
}

fn grid_jobs(spec: &GridSpec) -> Vec<SystemParams> {
    let (n1, n2) = spec.shape();
    let ax1 = spec.axis1.values();
    let ax2 = spec.axis2.as_ref().map(|a| a.values());
    let mut jobs = Vec::with_capacity(n1 * n2);
    for v1 in &ax1 {
        for j in 0..n2 {
            let mut p = spec.base;
            apply_axis(&mut p, spec.axis1.param, *v1);
            if let (Some(axis2), Some(vals)) = (&spec.axis2, &ax2) {
                apply_axis(&mut p, axis2.param, vals[j]);
            }
            jobs.push(p);
        }
    }
    jobs
}

fn assemble(spec: &GridSpec, points: Vec<PointResult>) -> GridResult {
    let summary = summarize(spec, &points);
    GridResult {
        spec: spec.clone(),
        points,
        summary,
    }
}

/// Evaluate every grid node. With the `parallel` feature the points are
/// computed on the rayon pool; assembly is by index either way, so the
/// result is identical to [`run_grid_seq`].
pub fn run_grid(spec: &GridSpec) -> Result<GridResult> {
    spec.validate()?;
    let jobs = grid_jobs(spec);
    #[cfg(feature = "parallel")]
    let points: Vec<PointResult> = jobs.par_iter().map(run_point).collect();
    #[cfg(not(feature = "parallel"))]
    let points: Vec<PointResult> = jobs.iter().map(run_point).collect();
    Ok(assemble(spec, points))
}

/// Sequential reference path; also the fallback body when the `parallel`
/// feature is disabled.
pub fn run_grid_seq(spec: &GridSpec) -> Result<GridResult> {
    spec.validate()?;
    let jobs = grid_jobs(spec);
    let points: Vec<PointResult> = jobs.iter().map(run_point).collect();
    Ok(assemble(spec, points))
}

/// Names accepted by [`figure_preset`].
pub const PRESET_NAMES: &[&str] = &[
    "fig2", "fig3", "fig4", "fig5ab", "fig5c", "fig5d", "fig6", "fig7a", "fig7b",
];

/// Fully populated sweep specs reproducing the published parameter scans.
/// All presets start from [`SystemParams::paper_defaults`].
///
/// Axis ranges: detunings span [−60, 60]κm at 201 points, the gain axis
/// spans (0, 10]κm in exact 0.05κm steps, the coupling ratio [0, 2] at 201
/// points and the temperature axis 200 log-spaced points in [1, 300] mK.
pub fn figure_preset(name: &str) -> Result<GridSpec> {
    let mut base = SystemParams::paper_defaults();
    let detuning = |param| Axis::linear(param, -60.0, 60.0, 201);
    let gain_axis = Axis::linear(AxisParam::Gain, 0.05, 10.0, 200);
    let ratio_axis = Axis::linear(AxisParam::G2OverG1, 0.0, 2.0, 201);
    let spec = match name {
        "fig2" => {
            base.g2 = 0.0;
            base.delta2 = 0.0;
            GridSpec {
                base,
                axis1: detuning(AxisParam::Delta1),
                axis2: Some(detuning(AxisParam::DeltaM)),
            }
        }
        // the (Δ₂, Δm) scans of figs. 3, 4, 5(a,b) and 5(d) share one spec
        "fig3" | "fig4" | "fig5ab" | "fig5d" => GridSpec {
            base,
            axis1: detuning(AxisParam::Delta2),
            axis2: Some(detuning(AxisParam::DeltaM)),
        },
        "fig5c" => GridSpec {
            base,
            axis1: Axis {
                param: AxisParam::Temperature,
                min: 1.0,
                max: 300.0,
                count: 200,
                spacing: Spacing::Log,
            },
            axis2: None,
        },
        "fig6" => {
            base.delta2 = 0.0;
            GridSpec {
                base,
                axis1: gain_axis,
                axis2: Some(detuning(AxisParam::DeltaM)),
            }
        }
        "fig7a" => GridSpec {
            base,
            axis1: gain_axis,
            axis2: Some(ratio_axis),
        },
        "fig7b" => {
            base.delta2 = -45.0 * base.kappa_m;
            base.delta_m = -15.0 * base.kappa_m;
            GridSpec {
                base,
                axis1: gain_axis,
                axis2: Some(ratio_axis),
            }
        }
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(spec)
}
