use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    InvalidMatrix,
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("checkpoint index {index} out of range 1..={count}")]
    IndexError { index: usize, count: usize },
    #[error("model `{0}` has no Lipschitz constants")]
    LipschitzUnknown(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("no positive root: c1 = {c1} is outside (0, 1)")]
    NoRoot { c1: f64 },
    #[error("interval length must be positive, got {0}")]
    InvalidInterval(f64),
    #[error("inertia matrix is singular at theta = ({theta1}, {theta2})")]
    SingularInertia { theta1: f64, theta2: f64 },
    #[error("baseline synthesis failed: {0}")]
    BaselineSynthesisFailed(String),
    #[error("state became non-finite at t = {t}")]
    Diverged { t: f64 },
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
}
