use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Outcome, SocialFn};
use crate::scalar::Scalar;

/// Inefficiency measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    PoA,
    PoS,
    SPoA,
    SPoS,
}

impl Measure {
    /// True for the anarchy measures, which take the worst equilibrium.
    pub fn takes_worst(self) -> bool {
        matches!(self, Measure::PoA | Measure::SPoA)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Measure::PoA => "PoA",
            Measure::PoS => "PoS",
            Measure::SPoA => "SPoA",
            Measure::SPoS => "SPoS",
        };
        f.write_str(s)
    }
}

/// Optimal social cost with its lexicographically smallest minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum<S> {
    pub social: SocialFn,
    pub value: S,
    pub witness: Outcome,
}

/// A ratio between an extreme equilibrium value and the optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport<S> {
    pub measure: Measure,
    pub social: SocialFn,
    pub equilibrium_value: S,
    pub optimal_value: S,
    pub ratio: S,
    /// Every equilibrium outcome attaining `equilibrium_value`.
    pub witnesses: Vec<Outcome>,
    pub optimal_witness: Outcome,
}

/// Extreme (max for anarchy measures, min otherwise) of `values` over
/// `optimum`.
pub(crate) fn ratio_report<'a, S: Scalar>(
    measure: Measure,
    optimum: &Optimum<S>,
    values: impl IntoIterator<Item = (&'a Outcome, S)>,
) -> Result<RatioReport<S>> {
    let mut best: Option<(S, Vec<Outcome>)> = None;
    for (outcome, v) in values {
        best = match best {
            None => Some((v, vec![outcome.clone()])),
            Some((cur, mut ws)) => {
                let better = if measure.takes_worst() {
                    v > cur
                } else {
                    v < cur
                };
                if better {
                    Some((v, vec![outcome.clone()]))
                } else {
                    if v == cur {
                        ws.push(outcome.clone());
                    }
                    Some((cur, ws))
                }
            }
        };
    }
    let (equilibrium_value, witnesses) = best.ok_or(Error::NoEquilibrium)?;
    if optimum.value.is_zero() {
        return Err(Error::DegenerateOptimum);
    }
    Ok(RatioReport {
        measure,
        social: optimum.social,
        ratio: equilibrium_value.clone() / optimum.value.clone(),
        equilibrium_value,
        optimal_value: optimum.value.clone(),
        witnesses,
        optimal_witness: optimum.witness.clone(),
    })
}
