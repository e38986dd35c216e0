use thiserror::Error;

use crate::gauge::ChartId;
use crate::stralg::RuleId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("chart mismatch: domain over {expected} cannot evaluate a point in chart {found:?}")]
    ChartMismatch { expected: String, found: ChartId },

    #[error("non-finite input in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("rank-deficient jacobian at {coords:?} (singular value ratio {ratio:e})")]
    RankDeficient { coords: Vec<f64>, ratio: f64 },

    #[error("gauge maximization did not converge: best value {best}, residual {residual:e}")]
    NoConvergence { best: f64, residual: f64 },

    #[error("infinite support along loop `{loop_name}` at t = {t}")]
    InfiniteSupport { loop_name: String, t: f64 },

    #[error("infinite length in family `{family}` at parameters {params:?}")]
    InfiniteLength { family: String, params: Vec<f64> },

    #[error("loop `{name}` violates its invariants: {reason}")]
    InvalidLoop { name: String, reason: String },

    #[error("concatenation needs a shared basepoint, gap is {gap:e}")]
    BasepointMismatch { gap: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("derivation needs axiom {0}, which the scenario does not provide")]
    MissingAxiom(RuleId),

    #[error("rule {rule} does not apply: {reason}")]
    RuleMismatch { rule: RuleId, reason: String },

    #[error("symbolic filtration `{0}` has no binding")]
    UnresolvedBinding(String),

    #[error("scenario has no loop family named `{0}`")]
    UnknownFamily(String),

    #[error("target {target} is not supported by scenario {scenario}")]
    UnsupportedTarget { scenario: String, target: String },
}
