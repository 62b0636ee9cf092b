//! Model-agnostic continuous-variable Gaussian toolkit: symplectic spectra,
//! partial transposition, entanglement monotones and quadrature squeezing.
//!
//! Quadrature ordering is (X₁, Y₁, …, Xₙ, Yₙ) and the vacuum variance is
//! fixed at 1/2 per quadrature; every formula below (E_N = −ln 2ν̃₋, the dB
//! reference) assumes that normalization.

use nalgebra::{DMatrix, Matrix6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vacuum variance per quadrature.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// Absolute tolerance for pairing the ±iν eigenvalues of Ω·M.
pub const PAIRING_TOL: f64 = 1e-8;

/// Relative asymmetry accepted by the covariance constructor before
/// symmetrizing.
const ASYMMETRY_TOL: f64 = 1e-8;

/// Real symmetric 2n×2n covariance matrix of n ∈ {1,2,3} bosonic modes.
/// Symmetrized on construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix {
    v: DMatrix<f64>,
    modes: usize,
}

impl CovarianceMatrix {
    pub fn new(v: DMatrix<f64>) -> Result<Self> {
        let dim = v.nrows();
        if v.ncols() != dim || dim % 2 != 0 || !(1..=3).contains(&(dim / 2)) {
            return Err(Error::InvalidParams(format!(
                "covariance matrix must be 2n x 2n with n in 1..=3, got {}x{}",
                v.nrows(),
                v.ncols()
            )));
        }
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParams(
                "covariance matrix has non-finite entries".into(),
            ));
        }
        let scale = v.amax().max(f64::MIN_POSITIVE);
        let asym = (&v - v.transpose()).amax() / scale;
        if asym > ASYMMETRY_TOL {
            return Err(Error::NotSymmetric {
                asym,
                tol: ASYMMETRY_TOL,
            });
        }
        let sym = (&v + v.transpose()) * 0.5;
        Ok(Self {
            modes: dim / 2,
            v: sym,
        })
    }

    pub fn from_matrix6(m: &Matrix6<f64>) -> Result<Self> {
        let mut v = DMatrix::zeros(6, 6);
        for i in 0..6 {
            for j in 0..6 {
                v[(i, j)] = m[(i, j)];
            }
        }
        Self::new(v)
    }

    /// n-mode vacuum, V = I/2.
    pub fn vacuum(modes: usize) -> Self {
        Self {
            v: DMatrix::identity(2 * modes, 2 * modes) * VACUUM_VARIANCE,
            modes,
        }
    }

    /// Product of thermal states with the given mean occupations,
    /// V = ⊕ᵢ (Nᵢ + 1/2)·I₂.
    pub fn thermal(occupations: &[f64]) -> Self {
        let n = occupations.len();
        let mut v = DMatrix::zeros(2 * n, 2 * n);
        for (i, occ) in occupations.iter().enumerate() {
            v[(2 * i, 2 * i)] = occ + VACUUM_VARIANCE;
            v[(2 * i + 1, 2 * i + 1)] = occ + VACUUM_VARIANCE;
        }
        Self { v, modes: n }
    }

    /// Two-mode squeezed vacuum with squeezing parameter r:
    /// diagonal blocks cosh(2r)·I₂/2, off-diagonal sinh(2r)·diag(1,−1)/2.
    /// Analytically ν̃₋ = e^(−2r)/2, so E_N = 2r.
    pub fn two_mode_squeezed_vacuum(r: f64) -> Self {
        let c = 0.5 * (2.0 * r).cosh();
        let s = 0.5 * (2.0 * r).sinh();
        let mut v = DMatrix::identity(4, 4) * c;
        v[(0, 2)] = s;
        v[(2, 0)] = s;
        v[(1, 3)] = -s;
        v[(3, 1)] = -s;
        Self { v, modes: 2 }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        2 * self.modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Variance of a single quadrature, V[q][q].
    pub fn variance(&self, q: usize) -> Result<f64> {
        if q >= self.dim() {
            return Err(Error::QuadratureIndex {
                index: q,
                dim: self.dim(),
            });
        }
        Ok(self.v[(q, q)])
    }

    /// Principal submatrix of the two retained modes, preserving the order
    /// they are given in.
    pub fn reduce(&self, keep: (usize, usize)) -> Result<CovarianceMatrix> {
        let (a, b) = keep;
        if a >= self.modes || b >= self.modes {
            return Err(Error::ModeIndex {
                index: a.max(b),
                modes: self.modes,
            });
        }
        if a == b {
            return Err(Error::InvalidParams(
                "reduce requires two distinct mode indices".into(),
            ));
        }
        let idx = [2 * a, 2 * a + 1, 2 * b, 2 * b + 1];
        let mut out = DMatrix::zeros(4, 4);
        for (i, &ri) in idx.iter().enumerate() {
            for (j, &cj) in idx.iter().enumerate() {
                out[(i, j)] = self.v[(ri, cj)];
            }
        }
        Ok(CovarianceMatrix { v: out, modes: 2 })
    }

    /// True iff every symplectic eigenvalue is at least 1/2 − tol.
    pub fn is_physical(&self, tol: f64) -> Result<bool> {
        let nus = symplectic_eigenvalues(&self.v)?;
        Ok(nus.iter().all(|&nu| nu >= VACUUM_VARIANCE - tol))
    }
}

/// The 2n×2n symplectic form, block-diagonal with [[0, 1], [−1, 0]].
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut om = DMatrix::zeros(2 * modes, 2 * modes);
    for i in 0..modes {
        om[(2 * i, 2 * i + 1)] = 1.0;
        om[(2 * i + 1, 2 * i)] = -1.0;
    }
    om
}

/// Partial transpose at the covariance level: Ṽ = P V P with P the identity
/// except −1 at the Y quadrature of the transposed mode. The result is a
/// plain matrix because it need not be a physical state.
pub fn partial_transpose(v: &CovarianceMatrix, mode: usize) -> Result<DMatrix<f64>> {
    if mode >= v.modes() {
        return Err(Error::ModeIndex {
            index: mode,
            modes: v.modes(),
        });
    }
    let y = 2 * mode + 1;
    let mut out = v.matrix().clone();
    for k in 0..v.dim() {
        if k != y {
            out[(y, k)] = -out[(y, k)];
            out[(k, y)] = -out[(k, y)];
        }
    }
    Ok(out)
}

/// Iteration cap for the Schur/SVD kernels; hitting it is reported as a
/// numerical error instead of spinning.
const EIGEN_MAX_ITER: usize = 100_000;

/// Symplectic spectrum of a symmetric 2n×2n matrix: the n values {ν} such
/// that the eigenvalues of Ω·M are {±iν}. Computed as the doubled magnitudes
/// |Im| of those eigenvalues, paired within tolerance, ascending.
///
/// For positive-definite M (every state and every partial transpose of one)
/// the spectrum comes from the singular values of the antisymmetric
/// K = LᵀΩL with M = LLᵀ, which is similar to ΩM; this path is
/// unconditionally convergent. Indefinite symmetric input falls back to a
/// bounded Schur iteration on ΩM.
pub fn symplectic_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = m.nrows();
    if m.ncols() != dim || dim % 2 != 0 || dim == 0 {
        return Err(Error::InvalidParams(format!(
            "symplectic spectrum needs a square even-dimensional matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let asym = (m - m.transpose()).amax() / scale;
    if asym > ASYMMETRY_TOL {
        return Err(Error::NotSymmetric {
            asym,
            tol: ASYMMETRY_TOL,
        });
    }
    let n = dim / 2;

    let mags: Vec<f64> = if let Some(chol) = m.clone().cholesky() {
        let l = chol.l();
        let k = l.transpose() * symplectic_form(n) * &l;
        let svd = nalgebra::linalg::SVD::try_new(k, false, false, f64::EPSILON, EIGEN_MAX_ITER)
            .ok_or(Error::EigenvalueFailure)?;
        svd.singular_values.iter().copied().collect()
    } else {
        let prod = symplectic_form(n) * m;
        let schur = nalgebra::linalg::Schur::try_new(prod, f64::EPSILON, EIGEN_MAX_ITER)
            .ok_or(Error::EigenvalueFailure)?;
        schur.complex_eigenvalues().iter().map(|l| l.im.abs()).collect()
    };
    if !mags.iter().all(|v| v.is_finite()) {
        return Err(Error::EigenvalueFailure);
    }

    let mut mags = mags;
    mags.sort_by(f64::total_cmp);
    let pair_scale = mags.last().copied().unwrap_or(0.0).max(1.0);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let (lo, hi) = (mags[2 * k], mags[2 * k + 1]);
        let spread = hi - lo;
        if spread > PAIRING_TOL * pair_scale {
            return Err(Error::PairingFailure {
                spread,
                tol: PAIRING_TOL * pair_scale,
            });
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

/// Logarithmic negativity of a two-mode state:
/// E_N = max(0, −ln 2ν̃₋) with ν̃₋ the smallest symplectic eigenvalue of the
/// partial transpose.
pub fn log_negativity(v: &CovarianceMatrix) -> Result<f64> {
    if v.modes() != 2 {
        return Err(Error::InvalidParams(format!(
            "log_negativity needs a 2-mode state, got {} modes",
            v.modes()
        )));
    }
    let pt = partial_transpose(v, 0)?;
    let nu_min = symplectic_eigenvalues(&pt)?[0];
    Ok((-(2.0 * nu_min).ln()).max(0.0))
}

/// One-versus-two logarithmic negativity E_{i|jk} of a three-mode state,
/// from the 6×6 partial transpose of mode i.
pub fn one_vs_two_log_negativity(v: &CovarianceMatrix, mode: usize) -> Result<f64> {
    if v.modes() != 3 {
        return Err(Error::InvalidParams(format!(
            "one_vs_two_log_negativity needs a 3-mode state, got {} modes",
            v.modes()
        )));
    }
    let pt = partial_transpose(v, mode)?;
    let nu_min = symplectic_eigenvalues(&pt)?[0];
    Ok((-(2.0 * nu_min).ln()).max(0.0))
}

/// Residual contangle R_τ^{i|jk} = C_{i|jk} − C_{i|j} − C_{i|k}, with the
/// contangle C the squared logarithmic negativity. Reported raw: small
/// negative values within numerical tolerance are not clamped.
pub fn residual_contangle(v: &CovarianceMatrix, mode: usize) -> Result<f64> {
    if v.modes() != 3 {
        return Err(Error::InvalidParams(format!(
            "residual_contangle needs a 3-mode state, got {} modes",
            v.modes()
        )));
    }
    let others: Vec<usize> = (0..3).filter(|&m| m != mode).collect();
    let c_one_two = one_vs_two_log_negativity(v, mode)?.powi(2);
    let c_j = log_negativity(&v.reduce((mode, others[0]))?)?.powi(2);
    let c_k = log_negativity(&v.reduce((mode, others[1]))?)?.powi(2);
    Ok(c_one_two - c_j - c_k)
}

/// Minimum residual contangle over the three one-vs-two splittings.
/// Returns the raw minimum and the splitting mode that attains it.
pub fn min_residual_contangle(v: &CovarianceMatrix) -> Result<(f64, usize)> {
    let mut best = (f64::INFINITY, 0);
    for mode in 0..3 {
        let r = residual_contangle(v, mode)?;
        if r < best.0 {
            best = (r, mode);
        }
    }
    Ok(best)
}

/// Squeezing degree in dB relative to vacuum: −10·log₁₀(⟨δQ²⟩ / (1/2)).
/// Positive means below vacuum noise.
pub fn squeezing_db(variance: f64) -> Result<f64> {
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::NonPositiveVariance(variance));
    }
    Ok(-10.0 * (variance / VACUUM_VARIANCE).log10())
}

/// Full entanglement bundle of the three-mode state in mode order
/// (a₁, a₂, m): pairwise log-negativities, one-vs-two log-negativities and
/// residual contangles. `r_tau_min` is floored at 0 for reporting; the raw
/// residuals stay available in `residuals`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementResult {
    pub e_a1m: f64,
    pub e_a2m: f64,
    pub e_a1a2: f64,
    pub e_a1_rest: f64,
    pub e_a2_rest: f64,
    pub e_m_rest: f64,
    /// Raw residual contangles indexed by splitting mode (a₁, a₂, m).
    pub residuals: [f64; 3],
    pub r_tau_min: f64,
    /// Splitting mode attaining the minimum residual contangle.
    pub r_tau_min_mode: usize,
}

pub fn entanglement_measures(v: &CovarianceMatrix) -> Result<EntanglementResult> {
    if v.modes() != 3 {
        return Err(Error::InvalidParams(format!(
            "entanglement_measures needs a 3-mode state, got {} modes",
            v.modes()
        )));
    }
    let residuals = [
        residual_contangle(v, 0)?,
        residual_contangle(v, 1)?,
        residual_contangle(v, 2)?,
    ];
    let (raw_min, mode) = min_residual_contangle(v)?;
    Ok(EntanglementResult {
        e_a1m: log_negativity(&v.reduce((0, 2))?)?,
        e_a2m: log_negativity(&v.reduce((1, 2))?)?,
        e_a1a2: log_negativity(&v.reduce((0, 1))?)?,
        e_a1_rest: one_vs_two_log_negativity(v, 0)?,
        e_a2_rest: one_vs_two_log_negativity(v, 1)?,
        e_m_rest: one_vs_two_log_negativity(v, 2)?,
        residuals,
        r_tau_min: raw_min.max(0.0),
        r_tau_min_mode: mode,
    })
}
