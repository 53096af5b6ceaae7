use thiserror::Error;

use crate::dynamics::Trajectory;
use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid simplex state: {0}")]
    InvalidState(String),

    #[error("parameters rejected: {}", .0.messages.join("; "))]
    InvalidParams(Box<ValidationReport>),

    /// One or more classifying quantities sit on an equality boundary.
    #[error("non-robust parameters, quantities at zero: {}", .0.join(", "))]
    Degenerate(Vec<String>),

    #[error("the ratio chart is undefined on the face x1 = 0")]
    UndefinedChart,

    #[error("state {0:?} does not lie on the face x4 = 0")]
    NotOnFace([f64; 4]),

    #[error("step size underflow at t = {t}")]
    StepFailure { t: f64, trajectory: Box<Trajectory> },

    #[error("ratio-chart integration failed at t = {0}")]
    LvStepFailure(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("point is not stationary (residual {0:e})")]
    NonStationary(f64),

    #[error("equal-payoff solution leaves the open face: {0:?}")]
    InfeasibleLocation([f64; 4]),

    #[error("welfare ordering violated: {0}")]
    OrderingViolation(String),

    #[error("{0}")]
    Io(String),

    #[error("unknown parameter name `{0}`")]
    UnknownParameter(String),
}
