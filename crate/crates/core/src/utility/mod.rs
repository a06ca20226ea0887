//! Non-quasi-linear utility: curves, agent types, parallelism and samplers.

pub mod agent;
pub mod curve;
pub mod parallel;
pub mod sample;

use thiserror::Error;

pub use agent::{default_names, AgentType, ParallelAgentType, SlopeChoice, Tail, TwoSlopeAgentType, TypeKind, TypeProfile};
pub use curve::{CurveError, Point, UtilityCurve};
pub use parallel::{is_parallel, is_parallel_wrt, is_strictly_parallel, ParallelVerdict, ParallelViolation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UtilityError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("at least one alternative is required")]
    NoAlternatives,
    #[error("{what}: expected {expected} entries, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("willingness to pay {wtp} for alternative {alternative} must be finite and non-negative")]
    BadWtp { alternative: usize, wtp: f64 },
    #[error("a parallel type needs at least one alternative with zero willingness to pay")]
    NoZeroWtp,
    #[error("value of alternative {alternative} is not finite")]
    NonFiniteValue { alternative: usize },
    #[error("two-slope type needs positive finite slopes, got alpha={alpha}, beta={beta}")]
    BadTwoSlope { alpha: f64, beta: f64 },
    #[error("two-slope type needs alpha != beta (both are {0})")]
    EqualSlopes(f64),
    #[error("grid step must be positive and finite, got {0}")]
    BadGridStep(f64),
    #[error("duplicate alternative name `{0}`")]
    DuplicateAlternative(String),
}
