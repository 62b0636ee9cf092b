//! Steady-state Lyapunov equation AV + VAᵀ = −D, solved by vectorizing the
//! 36-unknown linear system (Kronecker-sum form) with dense LU, plus an
//! independent adaptive time-integration oracle used for validation.

use nalgebra::{DMatrix, DVector, Matrix6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::model::{DiffusionMatrix, DriftMatrix};

/// Symmetry drift accepted from the raw linear solve before symmetrizing.
const SYMMETRY_DRIFT_TOL: f64 = 1e-10;

/// Default termination tolerance of the time-integration oracle.
pub const DEFAULT_ODE_TOL: f64 = 1e-8;

/// Step budget of the oracle; exhausting it signals an unstable or
/// near-marginal drift matrix.
const ODE_STEP_BUDGET: usize = 2_000_000;

/// Steady-state covariance and the relative residual
/// ‖AV + VAᵀ + D‖_F / ‖D‖_F of the returned (symmetrized) solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSolution {
    pub v: CovarianceMatrix,
    pub residual: f64,
}

fn to_dynamic(m: &Matrix6<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(6, 6, m.as_slice())
}

fn residual_norm(a: &Matrix6<f64>, v: &Matrix6<f64>, d: &Matrix6<f64>) -> f64 {
    (a * v + v * a.transpose() + d).norm() / d.norm()
}

/// Unique symmetric solution of AV + VAᵀ = −D for a stable A.
///
/// Column-major vectorization turns the equation into
/// (I⊗A + A⊗I) vec(V) = −vec(D); at 6×6 a dense LU of the 36×36 system is
/// exact-scale appropriate.
pub fn solve_lyapunov(a: &DriftMatrix, d: &DiffusionMatrix) -> Result<LyapunovSolution> {
    let a_dyn = to_dynamic(&a.a);
    let eye = DMatrix::<f64>::identity(6, 6);
    let system = eye.kronecker(&a_dyn) + a_dyn.kronecker(&eye);
    let rhs = -DVector::from_column_slice(d.d.as_slice());
    let x = system.lu().solve(&rhs).ok_or(Error::NoUniqueSolution)?;
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::NoUniqueSolution);
    }
    let v_raw = Matrix6::from_column_slice(x.as_slice());
    let drift = (v_raw - v_raw.transpose()).norm() / v_raw.norm().max(f64::MIN_POSITIVE);
    if drift > SYMMETRY_DRIFT_TOL {
        return Err(Error::NotSymmetric {
            asym: drift,
            tol: SYMMETRY_DRIFT_TOL,
        });
    }
    let v_sym = (v_raw + v_raw.transpose()) * 0.5;
    Ok(LyapunovSolution {
        residual: residual_norm(&a.a, &v_sym, &d.d),
        v: CovarianceMatrix::from_matrix6(&v_sym)?,
    })
}

/// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 5179.0 / 57600.0;
const E3: f64 = 7571.0 / 16695.0;
const E4: f64 = 393.0 / 640.0;
const E5: f64 = -92097.0 / 339200.0;
const E6: f64 = 187.0 / 2100.0;
const E7: f64 = 1.0 / 40.0;

/// Integrates dV/dt = AV + VAᵀ + D from V(0) = I/2 with adaptive 4th/5th
/// order stepping until ‖dV/dt‖_F ≤ tol·‖D‖_F. Validation oracle only.
pub fn integrate_to_steady_state(
    a: &DriftMatrix,
    d: &DiffusionMatrix,
    tol: f64,
) -> Result<CovarianceMatrix> {
    let rhs = |v: &Matrix6<f64>| a.a * v + v * a.a.transpose() + d.d;
    let d_norm = d.d.norm();
    let target = tol * d_norm;

    let mut v = Matrix6::identity() * 0.5;
    // Accuracy controls the step until the deviation is small; after that
    // the lightly damped oscillatory modes (|Im lambda| up to ~2|A|) pin the
    // controller where the discrete map stops contracting. Capping
    // 2*dt*|A| <= 0.8 keeps every mode strictly inside the stability region
    // so the approach to the fixed point stays geometric.
    let dt_max = 0.4 / a.a.norm().max(f64::MIN_POSITIVE);
    let mut dt = 0.1 * dt_max;
    let rtol = 1e-10_f64;
    let atol = 1e-14 * d_norm.max(1.0);

    for step in 0..ODE_STEP_BUDGET {
        let k1 = rhs(&v);
        if k1.norm() <= target {
            let sym = (v + v.transpose()) * 0.5;
            return CovarianceMatrix::from_matrix6(&sym);
        }

        let k2 = rhs(&(v + dt * A21 * k1));
        let k3 = rhs(&(v + dt * (A31 * k1 + A32 * k2)));
        let k4 = rhs(&(v + dt * (A41 * k1 + A42 * k2 + A43 * k3)));
        let k5 = rhs(&(v + dt * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4)));
        let k6 = rhs(&(v + dt * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5)));
        let v5 = v + dt * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = rhs(&v5);
        let v4 = v + dt * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

        let err = (v5 - v4).norm() / (atol + rtol * v5.norm());
        if err.is_finite() && err <= 1.0 {
            v = v5;
            if !v.iter().all(|x| x.is_finite()) || v.norm() > 1e30 {
                return Err(Error::StepBudgetExceeded { steps: step });
            }
        }
        let scale = if !err.is_finite() {
            0.2
        } else if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        dt = (dt * scale).min(dt_max);
    }
    Err(Error::StepBudgetExceeded {
        steps: ODE_STEP_BUDGET,
    })
}
