use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("mixing angle undefined: Rabi frequency and detuning are both zero")]
    UndefinedMixingAngle,

    #[error("Fock truncation n_max = {n_max} is below the minimum of {min}")]
    TruncationTooSmall { n_max: usize, min: usize },

    #[error("reduced equations failed the closure self-check: {0}")]
    NotClosed(String),

    #[error("steady-state system is singular beyond rank one (condition estimate {condition_estimate:.3e})")]
    Singular { condition_estimate: f64 },

    #[error(
        "no truncation convergence up to n_max = {n_max} (cap {cap}); tail mass {tail_mass:.3e}"
    )]
    TruncationCap {
        cap: usize,
        n_max: usize,
        tail_mass: f64,
    },

    #[error("distribution is not normalized (total probability {total})")]
    Unnormalized { total: f64 },

    #[error("oracle refuses n_max = {n_max}: dense cap is {cap}")]
    OracleTooLarge { n_max: usize, cap: usize },

    #[error("null space is degenerate (gap estimate {gap:.3e})")]
    DegenerateNullSpace { gap: f64 },

    #[error("steady state is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("time step {dt} exceeds {max_dt:.3e} (0.1 / fastest rate)")]
    StepTooLarge { dt: f64, max_dt: f64 },

    #[error("trace drift {drift:.3e} at t = {time}; reduce dt below {dt_hint:.3e}")]
    TraceDrift { drift: f64, time: f64, dt_hint: f64 },

    #[error("sparse factorization failed: {0}")]
    Factorization(String),

    #[error("comparison needs mode `{0}` in the input")]
    MissingMode(&'static str),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
