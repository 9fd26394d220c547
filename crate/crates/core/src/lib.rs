//! Exact analysis of bus transportation games.
//!
//! `n` players stand on the vertices of a complete graph and each picks one
//! of `m` buses. Every bus visits its riders in the order of its own
//! permutation, skipping players who chose another bus, and then drives to
//! the destination `t`. A player's cost is the distance the chosen bus travels from
//! the player's location to `t`.
//!
//! The crate provides:
//! - the game model and social costs D (bus distance), E (worst player) and
//!   U (sum of player costs) in [`game`];
//! - Nash equilibria, optima, PoA and PoS by enumeration in [`simultaneous`];
//! - SPE outcome sets, Zermelo's algorithm, an exhaustive strategy-profile
//!   oracle, SPoA and SPoS in [`sequential`];
//! - witness families and random instances in [`factory`];
//! - instance files, analysis reports and bound sweeps in [`format`],
//!   [`report`] and [`sweep`].
//!
//! The engines are generic over [`Scalar`]; the aliases below fix the exact
//! [`Rational`] type used by files, reports and the CLI.

#![allow(clippy::needless_range_loop)]

pub mod budget;
pub mod error;
pub mod expr;
pub mod factory;
pub mod format;
pub mod game;
pub mod ratio;
pub mod report;
pub mod scalar;
pub mod sequential;
pub mod simultaneous;
pub mod sweep;

pub use budget::{Budget, Outcomes};
pub use error::{Error, Result, Violation, ViolationKind};
pub use game::{MetricViolation, Outcome, SocialFn, Vertex};
pub use ratio::Measure;
pub use scalar::Scalar;
pub use sequential::MoveOrder;

/// Exact distance and cost type.
pub type Rational = num_rational::Rational64;

pub type Instance = game::Instance<Rational>;
pub type RawInstance = game::RawInstance<Rational>;
pub type CostVector = game::CostVector<Rational>;
pub type SocialValues = game::SocialValues<Rational>;
pub type Evaluation = game::Evaluation<Rational>;
pub type EquilibriumSet = simultaneous::EquilibriumSet<Rational>;
pub type SpeResultSet = sequential::SpeResultSet<Rational>;
pub type RatioReport = ratio::RatioReport<Rational>;
pub type Optimum = ratio::Optimum<Rational>;

/// Arbitrary precision variant, for instances whose sums overflow `i64`.
pub type BigRational = num_rational::BigRational;
pub type BigInstance = game::Instance<BigRational>;

/// Floating point variant; tie detection is subject to rounding.
pub type InstanceF64 = game::Instance<f64>;
