use std::fmt;

use thiserror::Error;

use crate::game::Vertex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {}", join_violations(.0))]
    InvalidInstance(Vec<Violation>),
    #[error("bus {bus} out of range (instance has {m} buses)")]
    BusOutOfRange { bus: usize, m: usize },
    #[error("player {player} out of range (instance has {n} players)")]
    PlayerOutOfRange { player: usize, n: usize },
    #[error("outcome has length {len}, expected {n}")]
    OutcomeLength { len: usize, n: usize },
    #[error("search space of {required} exceeds the budget of {cap}")]
    BudgetExceeded { required: String, cap: u64 },
    #[error("a result set of {size} outcomes exceeds the node-set cap of {cap}")]
    SetOverflow { size: usize, cap: usize },
    #[error("{required} strategy profiles exceed the oracle budget of {cap}")]
    OracleBudgetExceeded { required: String, cap: u64 },
    #[error("the instance has no equilibrium")]
    NoEquilibrium,
    #[error("the optimal social cost is zero, ratio undefined")]
    DegenerateOptimum,
    #[error("parameter {name} must be positive")]
    NonPositiveParameter { name: &'static str },
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),
    #[error("graph is disconnected: no path between {0} and {1}")]
    Disconnected(Vertex, Vertex),
    #[error("invalid move order: {0}")]
    InvalidOrder(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad class of an instance violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Malformed,
    NegativeDistance,
    NotAPermutation,
}

/// One problem found while validating a raw instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoPlayers,
    TooFewBuses { m: usize },
    DimensionMismatch(String),
    Asymmetric { row: Vertex, col: Vertex },
    NonZeroDiagonal { vertex: Vertex },
    NegativeDistance { row: Vertex, col: Vertex },
    NotAPermutation { bus: usize, reason: String },
    DeclaredMetricViolated { x: Vertex, y: Vertex, w: Vertex },
}

impl Violation {
    pub fn kind(&self) -> ViolationKind {
        match self {
            Violation::NegativeDistance { .. } => ViolationKind::NegativeDistance,
            Violation::NotAPermutation { .. } => ViolationKind::NotAPermutation,
            _ => ViolationKind::Malformed,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPlayers => write!(f, "instance needs at least one player"),
            Violation::TooFewBuses { m } => write!(f, "instance needs at least 2 buses, got {m}"),
            Violation::DimensionMismatch(what) => write!(f, "dimension mismatch: {what}"),
            Violation::Asymmetric { row, col } => {
                write!(f, "d({row},{col}) differs from d({col},{row})")
            }
            Violation::NonZeroDiagonal { vertex } => write!(f, "d({vertex},{vertex}) is not zero"),
            Violation::NegativeDistance { row, col } => write!(f, "d({row},{col}) is negative"),
            Violation::NotAPermutation { bus, reason } => {
                write!(
                    f,
                    "permutation of bus {} is not a permutation: {reason}",
                    bus + 1
                )
            }
            Violation::DeclaredMetricViolated { x, y, w } => write!(
                f,
                "declared metric but d({x},{w}) > d({x},{y}) + d({y},{w})"
            ),
        }
    }
}

fn join_violations(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
