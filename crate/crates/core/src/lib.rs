//! Simulator and analysis toolkit for four-tone backaction-evading
//! measurements of a pair of mechanical oscillators through microwave
//! cavities.
//!
//! The model is the standard linearized optomechanical one, taken in a
//! rotating frame where the two oscillators precess at ±Ω and the four drive
//! tones become static couplings between the cavity quadratures and the
//! collective mechanical quadratures X± = (X₁ ± X₂)/√2, P± = (P₁ ± P₂)/√2.
//! Everything downstream is linear-Gaussian:
//!
//! * [`model`] — configuration types, validation, quadrature selectors;
//! * [`dynamics`] — drift/diffusion assembly and output-port routing;
//! * [`steadystate`] — Lyapunov steady-state covariances and sweeps;
//! * [`spectra`] — detected output spectra, Lorentzian fits, gain
//!   calibration back to mechanical units;
//! * [`budget`] — closed-form noise-budget laws used as theory overlays;
//! * [`scenarios`] — preconfigured end-to-end demonstration reports.
//!
//! Conventions: ħ = 1, vacuum variance 1/2, X = (b + b†)/√2; configuration
//! frequencies are stored in Hz and converted to angular units (rad/s) at
//! the model boundary.

pub mod budget;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod scenarios;
pub mod spectra;
pub mod steadystate;

pub use error::{Error, Result};
pub use model::{reference_config, QuadratureSelector, SystemConfig, ValidConfig};
pub use steadystate::steady_state;
