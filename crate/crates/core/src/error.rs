use thiserror::Error;

use crate::model::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no agents")]
    NoAgents,

    #[error("k = {0} >= 1: use the trivial solution (o - eps, o + L + eps)")]
    TrivialRegime(f64),

    #[error("parameter {name} = {value} out of range: {expected}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("agent inside or beyond obstacle: {side} agent at {value}")]
    AgentInsideObstacle { side: Side, value: f64 },

    #[error("{side} agent at {value} is outside [0, 1]")]
    AgentOutOfRange { side: Side, value: f64 },

    #[error("{side} locations are not sorted ascending")]
    Unsorted { side: Side },

    #[error("edge ({a}, {b}) outside [0, {o}] x [{lo}, 1]")]
    InvalidEdge { a: f64, b: f64, o: f64, lo: f64 },

    #[error("probabilities do not sum to 1 (sum = {0})")]
    ProbabilitySum(f64),

    #[error("invalid lottery: {0}")]
    InvalidLottery(&'static str),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{mechanism} is only defined for L = 0 (got L = {length})")]
    UnsupportedRegime { mechanism: String, length: f64 },

    #[error("phantom profile needs {expected} entries per axis, got {got}")]
    PhantomArity { expected: usize, got: usize },

    #[error("generalized median returned infeasible outcome ({a}, {b})")]
    InfeasibleOutcome { a: f64, b: f64 },

    #[error("optimal value {0} too small for a ratio")]
    DegenerateOptimum(f64),

    #[error("unknown mechanism `{0}`")]
    UnknownMechanism(String),

    #[error("unknown witness `{0}`")]
    UnknownWitness(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
