use thiserror::Error;

/// Errors produced by the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid triple (g={g}, m0={m0}, m1={m1}): {rule}")]
    InvalidTriple { g: u32, m0: u32, m1: u32, rule: String },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("j={j} is not admissible for this action (odd j requires a sphere or Sp(2) action)")]
    InadmissibleJ { j: i64 },

    #[error("t={t} lies within {margin} of a pole")]
    PoleProximity { t: f64, margin: f64 },

    #[error("operation requires m0 = m1, got m0={m0}, m1={m1}")]
    UnequalMultiplicities { m0: u32, m1: u32 },

    #[error("operation requires an even g, got g={g}")]
    OddG { g: u32 },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("profile too coarse: {interior} interior samples, at least 16 required")]
    ProfileTooCoarse { interior: usize },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid shooting configuration: {0}")]
    InvalidConfig(String),

    #[error("trajectory escaped at t={t} (r={r}, rdot={rdot})")]
    TrajectoryEscaped { t: f64, r: f64, rdot: f64 },

    #[error("integrator stalled at t={t} (step size {h})")]
    IntegratorStall { t: f64, h: f64 },

    #[error("no convergence after {iterations} iterations: slopes ({a}, {b}), gaps ({value_gap:e}, {deriv_gap:e})")]
    NoConvergence {
        iterations: usize,
        a: f64,
        b: f64,
        value_gap: f64,
        deriv_gap: f64,
    },

    #[error("profile residual {residual:e} exceeds {bound:e} at slopes a={a}, b={b}")]
    ResidualTooLarge { residual: f64, bound: f64, a: f64, b: f64 },

    #[error("harmonicity verdict mismatch for {0}")]
    InconsistentVerdict(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
