//! Error type shared by every module of the library.

/// Everything that can go wrong while evaluating dynamics, integrating,
/// checking admissibility, or locating roots.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A time argument fell outside the valid range for the operation.
    #[error("time {t} outside valid range [{lo}, {hi}]")]
    TimeOutOfRange { t: f64, lo: f64, hi: f64 },

    /// An upper bound M that is not >= 1 (or otherwise malformed).
    #[error("invalid bound M = {m}; must be >= 1 (or infinite)")]
    InvalidBound { m: f64 },

    /// A parameter combination that the operation cannot accept.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Options that violate a documented precondition (e.g. too few steps).
    #[error("invalid options: {0}")]
    InvalidOptions(String),

    /// The control-derivative denominator vanished along the trajectory.
    #[error("control denominator vanished at t = {t} (|delta| = {value:.3e})")]
    DenominatorVanishing { t: f64, value: f64 },

    /// A logarithm argument left the positive domain in a closed form.
    #[error("logarithm argument non-positive: {0}")]
    LogDomain(String),

    /// An admissibility margin sits within tolerance of zero; the check
    /// reports this instead of guessing a sign.
    #[error("admissibility indeterminate at t = {t}: margin {margin:.3e} within 1e-12 of zero")]
    IndeterminateAdmissibility { t: f64, margin: f64 },

    /// The parameter point fails the admissibility conditions.
    #[error("not admissible: {0}")]
    NotAdmissible(String),

    /// A root scan found no bracketing sign change.
    #[error("no sign change found in [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    /// A located root bracket touches the admissible-domain boundary.
    #[error("root bracket touches the admissible-domain boundary near param = {param}")]
    BracketOnBoundary { param: f64 },

    /// Re-integrating with halved steps displaces a located root by more
    /// than the acceptance threshold; the root is not trustworthy.
    #[error("step-halving moves the root at param = {param} by {delta:.3e} (limit {limit:.1e})")]
    StepHalvingDisagreement { param: f64, delta: f64, limit: f64 },

    /// Two non-adjacent grid maxima of the Hamiltonian are numerically tied.
    #[error("ambiguous Hamiltonian maximizer at t = {t}: u = {u1} and u = {u2}")]
    AmbiguousMaximizer { t: f64, u1: f64, u2: f64 },

    /// The control solver could not drive the Hamiltonian's control
    /// derivative below the stationarity threshold.
    #[error("control solve failed at t = {t}: |H_u| = {hu:.3e} exceeds 1e-9")]
    ControlSolveFailed { t: f64, hu: f64 },

    /// The simulated control jumped away from the base control's
    /// neighborhood; the perturbation is too large for a local comparison.
    #[error("control left the base neighborhood at t = {t}: jump from u = {prev} to u = {next}")]
    LeftBaseNeighborhood { t: f64, prev: f64, next: f64 },

    /// Integration endpoints were supplied in reverse order.
    #[error("integration endpoints reversed: t1 = {t1} < t0 = {t0}")]
    BadTimeSpan { t0: f64, t1: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
