//! Physical parameters and everything derived algebraically from them:
//! absolute frequencies, thermal occupations, semiclassical mean fields,
//! drift and diffusion matrices, stability classification, resonance locus.
//!
//! Conventions: all rates in rad/s, temperature in kelvin. Detunings are
//! measured from the drive frequency ω₀, i.e. Δ₁ = ω₁ − ω₀, Δ₂ = ω₂ − ω₀,
//! Δm = ωm − ω₀. Quadrature order is (δX₁, δY₁, δX₂, δY₂, δx, δy).

use nalgebra::{Matrix6, Vector6};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Planck constant, J s (exact, SI 2019 / CODATA 2018).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
/// Boltzmann constant, J/K (exact, SI 2019 / CODATA 2018).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Magnon occupation below which the low-lying-excitation bosonization is
/// considered valid: Nm/(2Ns) must stay under this.
pub const LOW_EXCITATION_THRESHOLD: f64 = 1e-3;

/// Unit helpers for the configuration boundary. Frequencies are quoted as
/// cycles (divided by 2π) and converted to angular rates here.
pub mod units {
    use std::f64::consts::TAU;

    /// f GHz (as f/2π) → rad/s.
    pub fn ghz(f: f64) -> f64 {
        TAU * f * 1e9
    }

    /// f MHz (as f/2π) → rad/s.
    pub fn mhz(f: f64) -> f64 {
        TAU * f * 1e6
    }

    /// t mK → K.
    pub fn millikelvin(t: f64) -> f64 {
        t * 1e-3
    }
}

/// Geometry and spin content of the YIG sphere hosting the magnon mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereSpec {
    /// Sphere diameter, m.
    pub diameter: f64,
    /// Spin density ρ, m⁻³.
    pub spin_density: f64,
    /// Spin quantum number s of the ground-state ion.
    pub spin_number: f64,
}

impl SphereSpec {
    /// The 250 µm YIG sphere used throughout: ρ = 4.22e27 m⁻³, s = 5/2.
    pub fn yig_250um() -> Self {
        Self {
            diameter: 250e-6,
            spin_density: 4.22e27,
            spin_number: 2.5,
        }
    }

    /// Total number of spins N = ρ · (π/6) · d³.
    pub fn total_spins(&self) -> f64 {
        self.spin_density * std::f64::consts::FRAC_PI_6 * self.diameter.powi(3)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.diameter > 0.0
            && self.spin_density > 0.0
            && self.spin_number > 0.0
            && self.diameter.is_finite()
            && self.spin_density.is_finite()
            && self.spin_number.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "sphere fields must be positive and finite: {self:?}"
            )))
        }
    }
}

/// All physical rates, detunings, drive amplitudes and the bath temperature.
/// Single source of truth for a simulation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Absolute angular frequency of cavity 1, rad/s.
    pub omega1: f64,
    /// Detuning Δ₁ of cavity 1 from the drive, rad/s.
    pub delta1: f64,
    /// Detuning Δ₂ of cavity 2 from the drive, rad/s.
    pub delta2: f64,
    /// Detuning Δm of the magnon mode from the drive, rad/s.
    pub delta_m: f64,
    /// Cavity-1 dissipation rate κ₁, rad/s.
    pub kappa1: f64,
    /// Cavity-2 dissipation rate κ₂, rad/s.
    pub kappa2: f64,
    /// Magnon dissipation rate κm, rad/s.
    pub kappa_m: f64,
    /// Magnon–cavity-1 coupling rate g₁, rad/s.
    pub g1: f64,
    /// Magnon–cavity-2 coupling rate g₂, rad/s.
    pub g2: f64,
    /// Coherent drive Rabi frequency ε_p, rad/s.
    pub eps_p: f64,
    /// Parametric gain coefficient Ω of the squeezed drive, rad/s.
    /// Named `gain` throughout to avoid collision with the symplectic form.
    pub gain: f64,
    /// Bath temperature, K.
    pub temperature: f64,
    pub sphere: SphereSpec,
}

impl SystemParams {
    /// The experimentally feasible working point used by every preset:
    /// ω₁/2π = 10 GHz, κm/2π = 1 MHz, κ₁ = κ₂ = 5κm, g₁ = g₂ = 20κm,
    /// ε_p = 10κm, Ω = 2.5κm, Δ₁ = −20κm, Δ₂ = 35κm, Δm = 45κm, T = 10 mK.
    pub fn paper_defaults() -> Self {
        let kappa_m = units::mhz(1.0);
        Self {
            omega1: units::ghz(10.0),
            delta1: -20.0 * kappa_m,
            delta2: 35.0 * kappa_m,
            delta_m: 45.0 * kappa_m,
            kappa1: 5.0 * kappa_m,
            kappa2: 5.0 * kappa_m,
            kappa_m,
            g1: 20.0 * kappa_m,
            g2: 20.0 * kappa_m,
            eps_p: 10.0 * kappa_m,
            gain: 2.5 * kappa_m,
            temperature: units::millikelvin(10.0),
            sphere: SphereSpec::yig_250um(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        let finite = [
            self.omega1,
            self.delta1,
            self.delta2,
            self.delta_m,
            self.kappa1,
            self.kappa2,
            self.kappa_m,
            self.g1,
            self.g2,
            self.eps_p,
            self.gain,
            self.temperature,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            bad.push("non-finite field".to_string());
        }
        if !(self.omega1 > 0.0) {
            bad.push(format!("omega1 = {} must be > 0", self.omega1));
        }
        for (name, v) in [
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("kappa_m", self.kappa_m),
        ] {
            if !(v > 0.0) {
                bad.push(format!("{name} = {v} must be > 0"));
            }
        }
        for (name, v) in [
            ("g1", self.g1),
            ("g2", self.g2),
            ("eps_p", self.eps_p),
            ("gain", self.gain),
            ("temperature", self.temperature),
        ] {
            if !(v >= 0.0) {
                bad.push(format!("{name} = {v} must be >= 0"));
            }
        }
        if let Err(Error::InvalidParams(msg)) = self.sphere.validate() {
            bad.push(msg);
        }
        if bad.is_empty() {
            derive_frequencies(self).map(|_| ())
        } else {
            Err(Error::InvalidParams(bad.join("; ")))
        }
    }

    /// Margin ε_stab below which a drift eigenvalue real part counts as
    /// marginal; such points are flagged unstable for sweep masking.
    pub fn stability_margin(&self) -> f64 {
        1e-9 * self.kappa_m
    }
}

/// Semiclassical steady-state amplitudes and the derived mean occupations
/// N₁ = |⟨a₁⟩|², N₂ = |⟨a₂⟩|², Nm = |⟨m⟩|².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFields {
    pub a1: Complex64,
    pub a2: Complex64,
    pub m: Complex64,
    pub n1: f64,
    pub n2: f64,
    pub nm: f64,
}

impl MeanFields {
    pub fn from_amplitudes(a1: Complex64, a2: Complex64, m: Complex64) -> Self {
        Self {
            a1,
            a2,
            m,
            n1: a1.norm_sqr(),
            n2: a2.norm_sqr(),
            nm: m.norm_sqr(),
        }
    }
}

/// Drift matrix A of the linearized quadrature dynamics ḟ = Af + η.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftMatrix {
    pub a: Matrix6<f64>,
}

/// Diffusion matrix D, diag[κ₁(2N₁+1), κ₁(2N₁+1), κ₂(2N₂+1), κ₂(2N₂+1),
/// κm(2Nm+1), κm(2Nm+1)].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionMatrix {
    pub d: Matrix6<f64>,
}

/// Spectral stability of the drift matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub eigenvalues: [Complex64; 6],
    /// max Re λ over the six eigenvalues, rad/s.
    pub max_real_part: f64,
    /// true iff max Re λ < −ε_stab (marginal points count as unstable).
    pub stable: bool,
}

/// Low-lying-excitation audit: ratio = Nm / (2Ns).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowExcitation {
    pub ratio: f64,
    pub ok: bool,
}

/// Absolute frequencies (ω₀, ω₂, ωm) implied by ω₁ and the detunings:
/// ω₀ = ω₁ − Δ₁, ω₂ = ω₀ + Δ₂, ωm = ω₀ + Δm.
pub fn derive_frequencies(p: &SystemParams) -> Result<(f64, f64, f64)> {
    let omega0 = p.omega1 - p.delta1;
    let omega2 = omega0 + p.delta2;
    let omega_m = omega0 + p.delta_m;
    for (name, v) in [("omega0", omega0), ("omega2", omega2), ("omega_m", omega_m)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "derived frequency {name} = {v} rad/s is not positive"
            )));
        }
    }
    Ok((omega0, omega2, omega_m))
}

/// Mean thermal occupation N = [exp(ħω/k_B T) − 1]⁻¹.
///
/// Returns exactly 0 at T = 0 without touching the exponential.
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    debug_assert!(omega > 0.0 && temperature >= 0.0);
    if temperature == 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (BOLTZMANN * temperature);
    1.0 / x.exp_m1()
}

/// Drive vector of the mean-field fixed-point system, in the same real basis
/// (Re a₁, Im a₁, Re a₂, Im a₂, Re m, Im m) where the coefficient matrix is
/// the drift matrix A. The fixed point solves A·u = rhs.
fn mean_field_rhs(p: &SystemParams) -> Vector6<f64> {
    Vector6::new(0.0, p.eps_p, 0.0, 0.0, 0.0, 0.0)
}

/// Semiclassical steady state from the fixed-point equations, solved as a
/// real 6×6 linear system over (Re, Im) of the three amplitudes. The
/// conjugate coupling through the parametric term makes the real form the
/// authoritative route; the closed form is kept as a cross-check.
pub fn steady_state_mean_fields(p: &SystemParams) -> Result<MeanFields> {
    // The mean amplitudes obey the same linear flow as the fluctuations,
    // driven by the pump: A·u = (0, ε_p, 0, 0, 0, 0).
    let a = build_drift_matrix(p).a;
    let lu = a.lu();
    // Rounding keeps exactly singular systems from producing a zero pivot;
    // a collapsed pivot ratio is the effective-singularity signal.
    let diag = lu.u().map_diagonal(f64::abs);
    if diag.min() <= 1e-13 * diag.max() {
        return Err(Error::SingularSteadyState);
    }
    let u = lu
        .solve(&mean_field_rhs(p))
        .ok_or(Error::SingularSteadyState)?;
    if !u.iter().all(|v| v.is_finite()) {
        return Err(Error::SingularSteadyState);
    }
    Ok(MeanFields::from_amplitudes(
        Complex64::new(u[0], u[1]),
        Complex64::new(u[2], u[3]),
        Complex64::new(u[4], u[5]),
    ))
}

/// Closed-form steady-state amplitudes. Cross-check route only; the solver
/// of record is [`steady_state_mean_fields`].
pub fn mean_fields_closed_form(p: &SystemParams) -> MeanFields {
    let i = Complex64::i();
    let d1 = p.delta1;
    let (k1, k2, km) = (p.kappa1, p.kappa2, p.kappa_m);
    let magnon = Complex64::new(p.delta_m, -km);
    let cav2 = Complex64::new(p.delta2, -k2);
    let g_det = magnon * cav2 - p.g2 * p.g2;
    let p_term = d1 + i * k1
        - p.g1 * p.g1 * cav2.conj() / (magnon.conj() * cav2.conj() - p.g2 * p.g2);
    let denom = d1 - i * k1 - 4.0 * p.gain * p.gain / p_term - p.g1 * p.g1 * cav2 / g_det;
    let a1 = (2.0 * p.gain * p.eps_p / p_term - p.eps_p) / denom;
    let a2 = p.g1 * p.g2 * a1 / g_det;
    let m = -p.g1 * cav2 * a1 / g_det;
    MeanFields::from_amplitudes(a1, a2, m)
}

/// Checks the bosonization validity bound Nm ≪ 2Ns, operationalized as
/// Nm/(2Ns) < 1e-3. The raw ratio is reported so callers can tighten it.
pub fn low_excitation_check(mf: &MeanFields, sphere: &SphereSpec) -> LowExcitation {
    let ratio = mf.nm / (2.0 * sphere.total_spins() * sphere.spin_number);
    LowExcitation {
        ratio,
        ok: ratio < LOW_EXCITATION_THRESHOLD,
    }
}

/// The 6×6 drift matrix in quadrature order (δX₁, δY₁, δX₂, δY₂, δx, δy).
pub fn build_drift_matrix(p: &SystemParams) -> DriftMatrix {
    let (d1, d2, dm) = (p.delta1, p.delta2, p.delta_m);
    let (k1, k2, km) = (p.kappa1, p.kappa2, p.kappa_m);
    let (g1, g2, w) = (p.g1, p.g2, p.gain);
    #[rustfmt::skip]
    let a = Matrix6::new(
        -k1,            d1 - 2.0 * w,  0.0,  0.0,  0.0,  g1,
        -d1 - 2.0 * w, -k1,            0.0,  0.0, -g1,   0.0,
         0.0,           0.0,          -k2,   d2,   0.0,  g2,
         0.0,           0.0,          -d2,  -k2,  -g2,   0.0,
         0.0,           g1,            0.0,  g2,  -km,   dm,
        -g1,            0.0,          -g2,   0.0, -dm,  -km,
    );
    DriftMatrix { a }
}

/// Diffusion matrix with occupations evaluated at the absolute mode
/// frequencies ω₁, ω₂, ωm (not the detunings).
pub fn build_diffusion_matrix(p: &SystemParams) -> Result<DiffusionMatrix> {
    let (_, omega2, omega_m) = derive_frequencies(p)?;
    let n1 = thermal_occupation(p.omega1, p.temperature);
    let n2 = thermal_occupation(omega2, p.temperature);
    let nm = thermal_occupation(omega_m, p.temperature);
    let c1 = p.kappa1 * (2.0 * n1 + 1.0);
    let c2 = p.kappa2 * (2.0 * n2 + 1.0);
    let cm = p.kappa_m * (2.0 * nm + 1.0);
    Ok(DiffusionMatrix {
        d: Matrix6::from_diagonal(&Vector6::new(c1, c1, c2, c2, cm, cm)),
    })
}

/// Eigenvalues of A and the stability verdict: stable ⇔ max Re λ < −margin.
/// The Schur iteration is capped; hitting the cap reports a numerical error
/// rather than silently masking the point.
pub fn stability_check(a: &DriftMatrix, margin: f64) -> Result<StabilityReport> {
    let schur = nalgebra::linalg::Schur::try_new(a.a, f64::EPSILON, 100_000)
        .ok_or(Error::EigenvalueFailure)?;
    let eig = schur.complex_eigenvalues();
    if !eig.iter().all(|l| l.re.is_finite() && l.im.is_finite()) {
        return Err(Error::EigenvalueFailure);
    }
    let max_real_part = eig.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    let mut eigenvalues = [Complex64::new(0.0, 0.0); 6];
    for (slot, l) in eigenvalues.iter_mut().zip(eig.iter()) {
        *slot = *l;
    }
    Ok(StabilityReport {
        eigenvalues,
        max_real_part,
        stable: max_real_part < -margin,
    })
}

/// Dissipationless mean-field resonance locus
/// Δm = (Δ₁g₂² + Δ₂g₁²)/(Δ₁Δ₂); analysis helper for the dashed curves of the
/// detuning sweeps. Undefined when Δ₁Δ₂ = 0.
pub fn resonance_locus(p: &SystemParams) -> Result<f64> {
    if p.delta1 == 0.0 || p.delta2 == 0.0 {
        return Err(Error::UndefinedLocus);
    }
    Ok((p.delta1 * p.g2 * p.g2 + p.delta2 * p.g1 * p.g1) / (p.delta1 * p.delta2))
}
