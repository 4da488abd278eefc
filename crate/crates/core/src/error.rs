use thiserror::Error;

/// Everything that can go wrong between parsing a config and producing a report.
#[derive(Debug, Error)]
pub enum Error {
    /// The configuration violates a structural or physical constraint.
    #[error("config error: {0}")]
    Config(String),

    /// Unsupported schema_version in a config file.
    #[error("unsupported schema version {found} (this build reads version {supported})")]
    Schema { found: u32, supported: u32 },

    /// The drift matrix has an eigenvalue with positive real part; no steady
    /// state exists (blue-dominated driving past the parametric threshold).
    #[error("unstable model: max Re eigenvalue = {max_re:.6e} rad/s > 0")]
    Unstable { max_re: f64 },

    /// Stable on paper but too close to the edge for a trustworthy Lyapunov
    /// solve: max Re eigenvalue above -1e-6 * kappa.
    #[error("marginally stable model: max Re eigenvalue = {max_re:.6e} rad/s is above the rejection threshold {threshold:.6e} rad/s")]
    MarginallyStable { max_re: f64, threshold: f64 },

    /// The Lyapunov residual check failed; the solve cannot be trusted.
    #[error("ill-conditioned Lyapunov solve: residual {residual:.3e} exceeds {tolerance:.3e}")]
    IllConditioned { residual: f64, tolerance: f64 },

    /// Probe-cavity output was requested but the config has no probe cavity.
    #[error("no probe cavity in this configuration")]
    NoProbeCavity,

    /// All tone amplitudes on the selected cavity are zero, so there is no
    /// transduction and no gain to calibrate against.
    #[error("zero coupling: every tone amplitude on the selected cavity is zero")]
    ZeroCoupling,

    /// The trace has no usable mechanical peaks (flat, or buried in the floor).
    #[error("peaks unresolved: no mechanical peak stands out of the noise floor")]
    PeaksUnresolved,

    /// The Levenberg-Marquardt fit ran out of iterations without converging.
    #[error("lorentzian fit did not converge after {iterations} iterations (last relative step {last_step:.3e})")]
    FitDiverged { iterations: usize, last_step: f64 },

    /// A quadrature selector referenced something the model does not contain.
    #[error("invalid quadrature selector: {0}")]
    Selector(String),
}

pub type Result<T> = std::result::Result<T, Error>;
