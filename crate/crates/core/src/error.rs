use thiserror::Error;

use crate::grid::Position;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("a grid needs at least one axis")]
    NoAxes,
    #[error("axis {axis} has length {len}; every axis must have length at least 2")]
    AxisTooShort { axis: usize, len: usize },
    #[error("position {pos} is outside the grid {dims}")]
    OutOfBounds { pos: Position, dims: String },
    #[error("position {pos} has {got} coordinates, expected {expected}")]
    DimensionMismatch {
        pos: Position,
        got: usize,
        expected: usize,
    },
    #[error("sensing range must be at least 1")]
    ZeroRange,
    #[error("floor order k={k} must satisfy 1 <= k <= {d}")]
    FloorOrder { k: usize, d: usize },
    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    /// The policy has no rule for this percept. For table policies this means
    /// the table is incomplete; for coded policies the percept is malformed.
    #[error("policy undefined for sensing {key} with memory {mem}")]
    Undefined { key: String, mem: u32 },
    #[error("{policy} needs at least {needed} axes, sensing data has {got}")]
    TooFewAxes {
        policy: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("{policy} requires {requirement}")]
    Incompatible {
        policy: &'static str,
        requirement: String,
    },
    #[error("memory value {bits} does not fit in {width} bits")]
    MemoryOverflow { bits: u32, width: u8 },
    #[error("table line {line}: {reason}")]
    TableSyntax { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("step {step} from {from} at t={t} leaves the environment")]
    IllegalStep {
        t: usize,
        from: Position,
        step: String,
    },
    #[error("policy returned a zero step at {at} (t={t})")]
    ZeroStep { t: usize, at: Position },
    #[error("start position {0} is not in the environment")]
    BadStart(Position),
    #[error("max_steps must be at least 1")]
    NoSteps,
    #[error("trace has not closed its orbit; the cycle check is inconclusive")]
    Inconclusive,
    #[error("floor audit needs k < d (got k={k}, d={d})")]
    AuditOrder { k: usize, d: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("instance has {size} vertices, over the cap of {cap}")]
    TooManyVertices { size: usize, cap: usize },
    #[error("search explored more than {cap} candidates without finishing")]
    CandidateCap { cap: u64 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("environment has no vertices")]
    Empty,
    #[error("environment is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("line {line}: expected {expected} coordinates, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("vertex {0} is not in the environment")]
    NotAVertex(Position),
}
