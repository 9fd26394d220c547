//! Simultaneous game: Nash equilibria by exhaustive enumeration, social
//! optima, and the price of anarchy / stability.

use std::collections::BTreeMap;

use crate::budget::{advance, Budget};
use crate::error::{Error, Result};
use crate::game::{Instance, Outcome, SocialFn, SocialValues};
use crate::ratio::{ratio_report, Measure, Optimum, RatioReport};
use crate::scalar::Scalar;

/// A unilateral move that strictly lowers the mover's cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Deviation<S> {
    pub player: usize,
    pub from_bus: usize,
    pub to_bus: usize,
    pub current_cost: S,
    pub deviation_cost: S,
}

/// First strictly improving deviation, scanning players then buses in
/// index order; `None` means `sigma` is a Nash equilibrium.
pub fn improving_deviation<S: Scalar>(
    inst: &Instance<S>,
    sigma: &Outcome,
) -> Result<Option<Deviation<S>>> {
    inst.check_outcome(sigma)?;
    Ok(deviation_unchecked(inst, sigma.buses()))
}

pub fn is_nash_equilibrium<S: Scalar>(inst: &Instance<S>, sigma: &Outcome) -> Result<bool> {
    Ok(improving_deviation(inst, sigma)?.is_none())
}

fn deviation_unchecked<S: Scalar>(inst: &Instance<S>, sigma: &[usize]) -> Option<Deviation<S>> {
    let costs = inst.evaluate_unchecked(sigma).costs.costs;
    deviation_given_costs(inst, sigma, &costs)
}

fn deviation_given_costs<S: Scalar>(
    inst: &Instance<S>,
    sigma: &[usize],
    costs: &[S],
) -> Option<Deviation<S>> {
    for (player, current) in costs.iter().enumerate() {
        for bus in (0..inst.m()).filter(|&b| b != sigma[player]) {
            let alt = inst.cost_on_bus(sigma, player, bus);
            if alt < *current {
                return Some(Deviation {
                    player,
                    from_bus: sigma[player],
                    to_bus: bus,
                    current_cost: current.clone(),
                    deviation_cost: alt,
                });
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NashOptions {
    /// Enumerate only outcomes with player 1 on bus 1 and recover the rest by
    /// bus relabeling. Applied only when every bus has the same permutation.
    pub symmetry_reduction: bool,
}

/// Nash equilibria in lexicographic order, with their social values.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSet<S> {
    pub outcomes: Vec<Outcome>,
    pub values: Vec<SocialValues<S>>,
}

impl<S: Scalar> EquilibriumSet<S> {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn contains(&self, sigma: &Outcome) -> bool {
        self.outcomes.binary_search(sigma).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Outcome, &SocialValues<S>)> {
        self.outcomes.iter().zip(&self.values)
    }
}

/// Everything one pass over the outcome space yields.
#[derive(Debug, Clone, PartialEq)]
pub struct SimultaneousAnalysis<S> {
    pub equilibria: EquilibriumSet<S>,
    /// Optimum for D, E and U, in that order.
    pub optima: Vec<Optimum<S>>,
    /// Whether the symmetry reduction was actually applied.
    pub reduced: bool,
}

impl<S: Scalar> SimultaneousAnalysis<S> {
    pub fn run(inst: &Instance<S>, budget: &Budget, opts: NashOptions) -> Result<Self> {
        let reduced = opts.symmetry_reduction && inst.all_perms_equal() && inst.n() > 0;
        let mut found: Vec<(Outcome, SocialValues<S>)> = Vec::new();
        let mut best: Vec<Option<(S, Outcome)>> = vec![None; 3];
        let fixed = usize::from(reduced);
        budget.outcome_count(inst.n() - fixed, inst.m())?;
        let mut sigma = vec![0; inst.n()];
        loop {
            let ev = inst.evaluate_unchecked(&sigma);
            for (slot, f) in best.iter_mut().zip(SocialFn::ALL) {
                let v = ev.values.get(f);
                if slot.as_ref().is_none_or(|(cur, _)| v < *cur) {
                    *slot = Some((v, Outcome::new(sigma.clone())));
                }
            }
            if deviation_given_costs(inst, &sigma, &ev.costs.costs).is_none() {
                found.push((Outcome::new(sigma.clone()), ev.values));
            }
            if !advance(&mut sigma[fixed..], inst.m()) {
                break;
            }
        }
        if reduced {
            found = expand_relabelings(found, inst.m());
        }
        let (outcomes, values) = found.into_iter().unzip();
        let optima = best
            .into_iter()
            .zip(SocialFn::ALL)
            .map(|(slot, social)| {
                let (value, witness) = slot.expect("outcome space is nonempty");
                Optimum {
                    social,
                    value,
                    witness,
                }
            })
            .collect();
        Ok(SimultaneousAnalysis {
            equilibria: EquilibriumSet { outcomes, values },
            optima,
            reduced,
        })
    }

    pub fn optimum(&self, f: SocialFn) -> &Optimum<S> {
        &self.optima[f as usize]
    }

    pub fn poa(&self, f: SocialFn) -> Result<RatioReport<S>> {
        self.ratio(Measure::PoA, f)
    }

    pub fn pos(&self, f: SocialFn) -> Result<RatioReport<S>> {
        self.ratio(Measure::PoS, f)
    }

    fn ratio(&self, measure: Measure, f: SocialFn) -> Result<RatioReport<S>> {
        ratio_report(
            measure,
            self.optimum(f),
            self.equilibria.iter().map(|(o, v)| (o, v.get(f))),
        )
    }
}

/// Closes a set of equilibria under every bijection of bus labels.
fn expand_relabelings<S: Scalar>(
    found: Vec<(Outcome, SocialValues<S>)>,
    m: usize,
) -> Vec<(Outcome, SocialValues<S>)> {
    let maps = bus_permutations(m);
    let mut all = BTreeMap::new();
    for (sigma, values) in found {
        for g in &maps {
            let image = Outcome::new(sigma.buses().iter().map(|&b| g[b]).collect());
            all.entry(image).or_insert_with(|| values.clone());
        }
    }
    all.into_iter().collect()
}

fn bus_permutations(m: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for b in 0..used.len() {
            if !used[b] {
                used[b] = true;
                prefix.push(b);
                extend(prefix, used, out);
                prefix.pop();
                used[b] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(m), &mut vec![false; m], &mut out);
    out
}

pub fn enumerate_nash<S: Scalar>(
    inst: &Instance<S>,
    budget: &Budget,
    opts: NashOptions,
) -> Result<EquilibriumSet<S>> {
    Ok(SimultaneousAnalysis::run(inst, budget, opts)?.equilibria)
}

/// Minimum of `f` over all outcomes, with the lexicographically smallest minimizer.
pub fn optimal_social<S: Scalar>(
    inst: &Instance<S>,
    f: SocialFn,
    budget: &Budget,
) -> Result<Optimum<S>> {
    let mut best: Option<(S, Outcome)> = None;
    crate::budget::for_each_outcome(inst.n(), inst.m(), budget, |sigma| {
        let v = inst.evaluate_unchecked(sigma).values.get(f);
        if best.as_ref().is_none_or(|(cur, _)| v < *cur) {
            best = Some((v, Outcome::new(sigma.to_vec())));
        }
    })?;
    let (value, witness) =
        best.ok_or_else(|| Error::ParameterDomain("empty outcome space".into()))?;
    Ok(Optimum {
        social: f,
        value,
        witness,
    })
}

pub fn poa<S: Scalar>(inst: &Instance<S>, f: SocialFn, budget: &Budget) -> Result<RatioReport<S>> {
    SimultaneousAnalysis::run(inst, budget, NashOptions::default())?.poa(f)
}

pub fn pos<S: Scalar>(inst: &Instance<S>, f: SocialFn, budget: &Budget) -> Result<RatioReport<S>> {
    SimultaneousAnalysis::run(inst, budget, NashOptions::default())?.pos(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::RawInstance;
    use num_rational::Rational64;

    type R = Rational64;

    fn zero_instance(n: usize, m: usize) -> Instance<R> {
        Instance::from_raw(RawInstance {
            n,
            m,
            distances: vec![vec![R::from_integer(0); n + 1]; n + 1],
            permutations: vec![(1..=n).collect(); m],
            metric: Some(true),
        })
        .unwrap()
    }

    #[test]
    fn zero_distances_make_everything_an_equilibrium() {
        let inst = zero_instance(3, 2);
        let ne = enumerate_nash(&inst, &Budget::default(), NashOptions::default()).unwrap();
        assert_eq!(ne.len(), 8);
        let analysis =
            SimultaneousAnalysis::run(&inst, &Budget::default(), NashOptions::default()).unwrap();
        for f in SocialFn::ALL {
            assert!(matches!(analysis.poa(f), Err(Error::DegenerateOptimum)));
            assert!(matches!(analysis.pos(f), Err(Error::DegenerateOptimum)));
        }
    }

    #[test]
    fn single_player_is_always_in_equilibrium() {
        let inst = Instance::from_raw(RawInstance {
            n: 1,
            m: 3,
            distances: vec![
                vec![R::from_integer(0), R::new(7, 2)],
                vec![R::new(7, 2), R::from_integer(0)],
            ],
            permutations: vec![vec![1]; 3],
            metric: None,
        })
        .unwrap();
        for b in 1..=3 {
            assert!(is_nash_equilibrium(&inst, &Outcome::one_based(&[b])).unwrap());
        }
        let p = poa(&inst, SocialFn::U, &Budget::default()).unwrap();
        assert_eq!(p.ratio, R::from_integer(1));
        assert_eq!(p.witnesses.len(), 3);
    }

    #[test]
    fn relabeling_covers_every_bus_bijection() {
        assert_eq!(bus_permutations(3).len(), 6);
        assert_eq!(bus_permutations(1), vec![vec![0]]);
    }

    #[test]
    fn out_of_range_outcome_is_rejected() {
        let inst = zero_instance(2, 2);
        assert!(matches!(
            is_nash_equilibrium(&inst, &Outcome::one_based(&[1, 3])),
            Err(Error::BusOutOfRange { bus: 2, m: 2 })
        ));
    }
}
