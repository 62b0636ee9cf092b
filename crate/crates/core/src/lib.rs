//! Steady-state quantum statistics of a driven two-cavity/one-magnon system.
//!
//! The system is a pair of microwave cavity modes coupled to a single magnon
//! mode, with the first cavity under a coherent drive and a degenerate
//! parametric (squeezed) drive. Everything here works on the linearized
//! quadrature fluctuations around the semiclassical steady state:
//!
//! * [`model`] — physical parameters, mean fields, drift/diffusion matrices,
//!   stability classification;
//! * [`lyapunov`] — the stationary covariance from `AV + VAᵀ = -D`, plus an
//!   independent time-integration oracle;
//! * [`gaussian`] — model-agnostic continuous-variable toolkit: symplectic
//!   spectra, partial transposition, logarithmic negativity, residual
//!   contangle, quadrature squeezing;
//! * [`sweep`] — single-point evaluation and rectangular 1-D/2-D parameter
//!   grids with stability masking and figure presets;
//! * [`validate`] — the self-check oracle battery behind `cavmag validate`.
//!
//! All rates are stored in rad/s; temperatures in kelvin. Quadratures are
//! ordered (δX₁, δY₁, δX₂, δY₂, δx, δy) with vacuum variance 1/2.

pub mod error;
pub mod gaussian;
pub mod lyapunov;
pub mod model;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
