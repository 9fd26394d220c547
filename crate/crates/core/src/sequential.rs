//! Sequential game in extensive form.
//!
//! Players commit to buses one after another in a fixed move order, each
//! seeing every earlier choice. [`spe_outcomes`] computes the exact set of
//! outcomes reachable by some subgame perfect equilibrium; [`zermelo_outcome`]
//! computes one of them with a fixed tie-break; [`spe_oracle`] enumerates
//! whole strategy profiles and is only usable on tiny games.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::budget::{advance, checked_pow, Budget};
use crate::error::{Error, Result};
use crate::game::{CostVector, Evaluation, Instance, Outcome, SocialFn, SocialValues};
use crate::ratio::{ratio_report, Measure, Optimum, RatioReport};
use crate::scalar::{max_of, Scalar};
use crate::simultaneous::optimal_social;

/// Order in which players move, as 0-based player indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveOrder(Vec<usize>);

impl MoveOrder {
    pub fn identity(n: usize) -> Self {
        MoveOrder((0..n).collect())
    }

    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &p in &order {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidOrder(format!(
                    "{:?} is not a permutation of the players",
                    order.iter().map(|p| p + 1).collect::<Vec<_>>()
                )));
            }
        }
        Ok(MoveOrder(order))
    }

    pub fn one_based(labels: &[usize]) -> Result<Self> {
        let order = labels
            .iter()
            .map(|&p| {
                p.checked_sub(1)
                    .ok_or_else(|| Error::InvalidOrder("players are 1-based".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        MoveOrder::new(order)
    }

    pub fn players(&self) -> &[usize] {
        &self.0
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|p| p + 1).collect()
    }

    pub fn check_for<S: Scalar>(&self, inst: &Instance<S>) -> Result<()> {
        if self.0.len() != inst.n() {
            return Err(Error::InvalidOrder(format!(
                "order has {} players, instance has {}",
                self.0.len(),
                inst.n()
            )));
        }
        Ok(())
    }
}

impl FromStr for MoveOrder {
    type Err = Error;

    /// Parses a comma-separated list of 1-based players.
    fn from_str(s: &str) -> Result<Self> {
        let labels = s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidOrder(format!("{x:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        MoveOrder::one_based(&labels)
    }
}

impl fmt::Display for MoveOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.0.iter().map(|p| (p + 1).to_string()).collect();
        f.write_str(&labels.join(","))
    }
}

/// One SPE-reachable outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeMember<S> {
    pub outcome: Outcome,
    pub costs: CostVector<S>,
    pub values: SocialValues<S>,
}

/// Outcomes realized by some subgame perfect equilibrium, sorted
/// lexicographically and duplicate free.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeResultSet<S> {
    pub members: Vec<SpeMember<S>>,
}

impl<S: Scalar> SpeResultSet<S> {
    fn from_members(mut members: Vec<SpeMember<S>>) -> Self {
        members.sort_by(|a, b| a.outcome.cmp(&b.outcome));
        members.dedup_by(|a, b| a.outcome == b.outcome);
        SpeResultSet { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &Outcome> {
        self.members.iter().map(|m| &m.outcome)
    }

    pub fn contains(&self, sigma: &Outcome) -> bool {
        self.members
            .binary_search_by(|m| m.outcome.cmp(sigma))
            .is_ok()
    }

    pub fn get(&self, sigma: &Outcome) -> Option<&SpeMember<S>> {
        self.members
            .binary_search_by(|m| m.outcome.cmp(sigma))
            .ok()
            .map(|k| &self.members[k])
    }

    pub fn values(&self, f: SocialFn) -> impl Iterator<Item = (&Outcome, S)> + '_ {
        self.members
            .iter()
            .map(move |m| (&m.outcome, m.values.get(f)))
    }
}

struct Leaf<S> {
    sigma: Vec<usize>,
    eval: Evaluation<S>,
}

impl<S: Scalar> Leaf<S> {
    fn into_member(self) -> SpeMember<S> {
        SpeMember {
            outcome: Outcome::new(self.sigma),
            costs: self.eval.costs,
            values: self.eval.values,
        }
    }
}

/// Every outcome realized by a subgame perfect equilibrium for `order`.
///
/// At a node where player `i` moves, let `R_a` be the result set of the
/// subtree after action `a`. A result `r` of `R_a*` survives iff for every
/// action `a`, `cost_i(r)` is at most the worst cost `i` could be handed in
/// `R_a`: the other subtrees can then be resolved against `i`, making `a*` a
/// best response.
pub fn spe_outcomes<S: Scalar>(
    inst: &Instance<S>,
    order: &MoveOrder,
    budget: &Budget,
) -> Result<SpeResultSet<S>> {
    order.check_for(inst)?;
    budget.outcome_count(inst.n(), inst.m())?;
    let mut sigma = vec![0; inst.n()];
    let leaves = spe_node(inst, order.players(), 0, &mut sigma, budget.max_node_set)?;
    Ok(SpeResultSet::from_members(
        leaves.into_iter().map(Leaf::into_member).collect(),
    ))
}

fn spe_node<S: Scalar>(
    inst: &Instance<S>,
    order: &[usize],
    depth: usize,
    sigma: &mut Vec<usize>,
    cap: usize,
) -> Result<Vec<Leaf<S>>> {
    if depth == order.len() {
        return Ok(vec![Leaf {
            sigma: sigma.clone(),
            eval: inst.evaluate_unchecked(sigma),
        }]);
    }
    let mover = order[depth];
    let mut children = Vec::with_capacity(inst.m());
    for bus in 0..inst.m() {
        sigma[mover] = bus;
        children.push(spe_node(inst, order, depth + 1, sigma, cap)?);
    }
    // min over actions of the worst cost the mover can be handed there
    let threshold = children
        .iter()
        .map(|set| {
            set.iter()
                .map(|leaf| leaf.eval.costs.get(mover).clone())
                .reduce(max_of)
                .expect("result sets are never empty")
        })
        .reduce(|a, b| if b < a { b } else { a })
        .expect("at least two buses");
    let survivors: Vec<Leaf<S>> = children
        .into_iter()
        .flatten()
        .filter(|leaf| *leaf.eval.costs.get(mover) <= threshold)
        .collect();
    if survivors.len() > cap {
        return Err(Error::SetOverflow {
            size: survivors.len(),
            cap,
        });
    }
    Ok(survivors)
}

/// Outcome of the SPE that breaks every tie toward the lowest bus index.
pub fn zermelo_outcome<S: Scalar>(
    inst: &Instance<S>,
    order: &MoveOrder,
    budget: &Budget,
) -> Result<(Outcome, CostVector<S>)> {
    order.check_for(inst)?;
    budget.outcome_count(inst.n(), inst.m())?;
    let mut sigma = vec![0; inst.n()];
    let leaf = zermelo_node(inst, order.players(), 0, &mut sigma);
    Ok((Outcome::new(leaf.sigma), leaf.eval.costs))
}

fn zermelo_node<S: Scalar>(
    inst: &Instance<S>,
    order: &[usize],
    depth: usize,
    sigma: &mut Vec<usize>,
) -> Leaf<S> {
    if depth == order.len() {
        return Leaf {
            sigma: sigma.clone(),
            eval: inst.evaluate_unchecked(sigma),
        };
    }
    let mover = order[depth];
    let mut best: Option<Leaf<S>> = None;
    for bus in 0..inst.m() {
        sigma[mover] = bus;
        let leaf = zermelo_node(inst, order, depth + 1, sigma);
        let better = best
            .as_ref()
            .is_none_or(|b| leaf.eval.costs.get(mover) < b.eval.costs.get(mover));
        if better {
            best = Some(leaf);
        }
    }
    best.expect("at least two buses")
}

/// Result of the exhaustive strategy-profile oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<S> {
    pub profiles: u64,
    pub equilibrium_profiles: u64,
    pub outcomes: SpeResultSet<S>,
}

/// Number of strategy profiles: the product over depths `k` of `m^(m^k)`.
pub fn strategy_profile_count(n: usize, m: usize) -> Option<u64> {
    let entries = table_entries(n, m)?;
    checked_pow(m, usize::try_from(entries).ok()?)
}

fn table_entries(n: usize, m: usize) -> Option<u64> {
    (0..n).try_fold(0u64, |acc, k| acc.checked_add(checked_pow(m, k)?))
}

/// Enumerates every strategy profile, keeps those where no mover at any
/// node gains by switching that single action, and collects the outcomes
/// they realize.
pub fn spe_oracle<S: Scalar>(
    inst: &Instance<S>,
    order: &MoveOrder,
    budget: &Budget,
) -> Result<OracleResult<S>> {
    order.check_for(inst)?;
    let (n, m) = (inst.n(), inst.m());
    let profiles = match strategy_profile_count(n, m) {
        Some(p) if p <= budget.max_profiles => p,
        _ => {
            return Err(Error::OracleBudgetExceeded {
                required: match table_entries(n, m) {
                    Some(e) => format!("{m}^{e}"),
                    None => format!("{m}^({m}^{n}) or more"),
                },
                cap: budget.max_profiles,
            })
        }
    };
    let players = order.players();
    let leaves = checked_pow(m, n).expect("bounded by the profile count") as usize;

    // Leaf code: actions in move order as base-m digits, first mover most significant.
    let leaf_costs: Vec<Vec<S>> = (0..leaves)
        .map(|code| {
            let sigma = decode_leaf(code, players, m);
            inst.evaluate_unchecked(&sigma).costs.costs
        })
        .collect();

    // offsets[k]: start of depth k's table in the flat profile
    let mut offsets = Vec::with_capacity(n + 1);
    let mut total = 0usize;
    for k in 0..n {
        offsets.push(total);
        total += m.pow(k as u32);
    }
    let mut profile = vec![0usize; total];
    let mut reached = BTreeSet::new();
    let mut equilibrium_profiles = 0u64;
    // cont[k][c]: leaf reached from the depth-k node with prefix code c
    let mut cont: Vec<Vec<usize>> = (0..=n).map(|k| vec![0; m.pow(k as u32)]).collect();
    cont[n] = (0..leaves).collect();
    loop {
        let mut stable = true;
        'levels: for k in (0..n).rev() {
            let mover = players[k];
            let (upper, lower) = cont.split_at_mut(k + 1);
            let next = &lower[0];
            for c in 0..upper[k].len() {
                let chosen = profile[offsets[k] + c];
                let target = next[c * m + chosen];
                let cost = &leaf_costs[target][mover];
                if (0..m).any(|a| leaf_costs[next[c * m + a]][mover] < *cost) {
                    stable = false;
                    break 'levels;
                }
                upper[k][c] = target;
            }
        }
        if stable {
            equilibrium_profiles += 1;
            reached.insert(cont[0][0]);
        }
        if !advance(&mut profile, m) {
            break;
        }
    }
    let members = reached
        .into_iter()
        .map(|code| {
            let sigma = decode_leaf(code, players, m);
            let eval = inst.evaluate_unchecked(&sigma);
            SpeMember {
                outcome: Outcome::new(sigma),
                costs: eval.costs,
                values: eval.values,
            }
        })
        .collect();
    Ok(OracleResult {
        profiles,
        equilibrium_profiles,
        outcomes: SpeResultSet::from_members(members),
    })
}

fn decode_leaf(mut code: usize, players: &[usize], m: usize) -> Vec<usize> {
    let mut sigma = vec![0; players.len()];
    for &p in players.iter().rev() {
        sigma[p] = code % m;
        code /= m;
    }
    sigma
}

/// SPE outcome set plus the optima it is compared against.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialAnalysis<S> {
    pub order: MoveOrder,
    pub spe: SpeResultSet<S>,
    /// Optimum for D, E and U, in that order.
    pub optima: Vec<Optimum<S>>,
}

impl<S: Scalar> SequentialAnalysis<S> {
    pub fn run(inst: &Instance<S>, order: &MoveOrder, budget: &Budget) -> Result<Self> {
        let spe = spe_outcomes(inst, order, budget)?;
        let optima = SocialFn::ALL
            .iter()
            .map(|&f| optimal_social(inst, f, budget))
            .collect::<Result<Vec<_>>>()?;
        Ok(SequentialAnalysis {
            order: order.clone(),
            spe,
            optima,
        })
    }

    pub fn optimum(&self, f: SocialFn) -> &Optimum<S> {
        &self.optima[f as usize]
    }

    pub fn spoa(&self, f: SocialFn) -> Result<RatioReport<S>> {
        ratio_report(Measure::SPoA, self.optimum(f), self.spe.values(f))
    }

    pub fn spos(&self, f: SocialFn) -> Result<RatioReport<S>> {
        ratio_report(Measure::SPoS, self.optimum(f), self.spe.values(f))
    }
}

pub fn spoa<S: Scalar>(
    inst: &Instance<S>,
    f: SocialFn,
    order: &MoveOrder,
    budget: &Budget,
) -> Result<RatioReport<S>> {
    let spe = spe_outcomes(inst, order, budget)?;
    ratio_report(
        Measure::SPoA,
        &optimal_social(inst, f, budget)?,
        spe.values(f),
    )
}

pub fn spos<S: Scalar>(
    inst: &Instance<S>,
    f: SocialFn,
    order: &MoveOrder,
    budget: &Budget,
) -> Result<RatioReport<S>> {
    let spe = spe_outcomes(inst, order, budget)?;
    ratio_report(
        Measure::SPoS,
        &optimal_social(inst, f, budget)?,
        spe.values(f),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::RawInstance;
    use num_rational::Rational64;

    type R = Rational64;

    fn uniform(n: usize, m: usize, d: i64) -> Instance<R> {
        let mut dist = vec![vec![R::from_integer(d); n + 1]; n + 1];
        for (k, row) in dist.iter_mut().enumerate() {
            row[k] = R::from_integer(0);
        }
        Instance::from_raw(RawInstance {
            n,
            m,
            distances: dist,
            permutations: vec![(1..=n).collect(); m],
            metric: None,
        })
        .unwrap()
    }

    #[test]
    fn profile_counts() {
        assert_eq!(strategy_profile_count(3, 2), Some(128));
        assert_eq!(strategy_profile_count(2, 3), Some(81));
        assert_eq!(strategy_profile_count(1, 2), Some(2));
        assert_eq!(strategy_profile_count(8, 3), None);
    }

    #[test]
    fn zero_distances_tie_to_bus_one() {
        let inst = uniform(4, 3, 0);
        let (sigma, costs) =
            zermelo_outcome(&inst, &MoveOrder::identity(4), &Budget::default()).unwrap();
        assert_eq!(sigma.to_one_based(), vec![1, 1, 1, 1]);
        assert!(costs.costs.iter().all(|c| *c == R::from_integer(0)));
        let all = spe_outcomes(&inst, &MoveOrder::identity(4), &Budget::default()).unwrap();
        assert_eq!(all.len(), 81);
    }

    #[test]
    fn set_overflow_is_reported() {
        let inst = uniform(4, 2, 0);
        let budget = Budget {
            max_node_set: 5,
            ..Budget::default()
        };
        assert!(matches!(
            spe_outcomes(&inst, &MoveOrder::identity(4), &budget),
            Err(Error::SetOverflow { cap: 5, .. })
        ));
    }

    #[test]
    fn oracle_budget_is_enforced() {
        let inst = uniform(4, 3, 1);
        assert!(matches!(
            spe_oracle(&inst, &MoveOrder::identity(4), &Budget::default()),
            Err(Error::OracleBudgetExceeded { .. })
        ));
    }

    #[test]
    fn single_player_oracle_keeps_tied_buses() {
        let inst = uniform(1, 2, 3);
        let res = spe_oracle(&inst, &MoveOrder::identity(1), &Budget::default()).unwrap();
        assert_eq!(res.profiles, 2);
        assert_eq!(res.outcomes.len(), 2);
    }

    #[test]
    fn move_order_parsing() {
        let o: MoveOrder = "3,1,2".parse().unwrap();
        assert_eq!(o.players(), &[2, 0, 1]);
        assert_eq!(o.to_string(), "3,1,2");
        assert!("1,1,2".parse::<MoveOrder>().is_err());
        assert!("0,1".parse::<MoveOrder>().is_err());
        assert!("a".parse::<MoveOrder>().is_err());
        let inst = uniform(2, 2, 1);
        assert!(matches!(
            spe_outcomes(&inst, &o, &Budget::default()),
            Err(Error::InvalidOrder(_))
        ));
    }

    #[test]
    fn leaf_codes_follow_move_order() {
        // order (2,1): player 2's action is the most significant digit
        assert_eq!(decode_leaf(1, &[1, 0], 2), vec![1, 0]);
        assert_eq!(decode_leaf(2, &[1, 0], 2), vec![0, 1]);
    }
}
