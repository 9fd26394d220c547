//! Naive reference implementations used as test oracles. Nothing here calls
//! the engines under test; only instance accessors are shared.

#![allow(dead_code)]

use std::collections::BTreeSet;

use transit_games::{Instance, MoveOrder, Rational, SocialFn};

pub fn r(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(p)
}

/// Every outcome as 0-based bus vectors, last player fastest.
pub fn all_outcomes(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..m).map(move |b| {
                    let mut q = p.clone();
                    q.push(b);
                    q
                })
            })
            .collect();
    }
    out
}

/// Riders of `bus` in pickup order.
pub fn route(inst: &Instance, sigma: &[usize], bus: usize) -> Vec<usize> {
    inst.perm(bus)
        .iter()
        .copied()
        .filter(|&p| sigma[p] == bus)
        .collect()
}

/// Forward walk: from the player's pickup along the rest of the route, then to t.
pub fn costs(inst: &Instance, sigma: &[usize]) -> Vec<Rational> {
    let t = inst.target();
    (0..inst.n())
        .map(|i| {
            let rt = route(inst, sigma, sigma[i]);
            let start = rt.iter().position(|&p| p == i).unwrap();
            let mut total = int(0);
            let mut at = i;
            for &next in &rt[start + 1..] {
                total += *inst.d(at, next);
                at = next;
            }
            total + *inst.d(at, t)
        })
        .collect()
}

/// Total length of all non-empty bus routes.
pub fn social_d(inst: &Instance, sigma: &[usize]) -> Rational {
    let t = inst.target();
    (0..inst.m())
        .map(|b| {
            let rt = route(inst, sigma, b);
            if rt.is_empty() {
                return int(0);
            }
            let legs: Rational = rt.windows(2).map(|w| *inst.d(w[0], w[1])).sum();
            legs + *inst.d(*rt.last().unwrap(), t)
        })
        .sum()
}

pub fn social(inst: &Instance, sigma: &[usize], f: SocialFn) -> Rational {
    let c = costs(inst, sigma);
    match f {
        SocialFn::D => social_d(inst, sigma),
        SocialFn::E => c.into_iter().max().unwrap(),
        SocialFn::U => c.into_iter().sum(),
    }
}

pub fn optimum(inst: &Instance, f: SocialFn) -> Rational {
    all_outcomes(inst.n(), inst.m())
        .iter()
        .map(|s| social(inst, s, f))
        .min()
        .unwrap()
}

pub fn worst(inst: &Instance, f: SocialFn) -> Rational {
    all_outcomes(inst.n(), inst.m())
        .iter()
        .map(|s| social(inst, s, f))
        .max()
        .unwrap()
}

pub fn is_nash(inst: &Instance, sigma: &[usize]) -> bool {
    let base = costs(inst, sigma);
    (0..inst.n()).all(|i| {
        (0..inst.m()).all(|b| {
            let mut dev = sigma.to_vec();
            dev[i] = b;
            costs(inst, &dev)[i] >= base[i]
        })
    })
}

pub fn nash_set(inst: &Instance) -> BTreeSet<Vec<usize>> {
    all_outcomes(inst.n(), inst.m())
        .into_iter()
        .filter(|s| is_nash(inst, s))
        .collect()
}

/// SPE outcomes by brute force over all strategy profiles.
///
/// A profile assigns an action to every history; it is subgame perfect iff
/// at every history the mover cannot lower its cost by changing only the
/// action taken there (one-shot deviation principle).
pub fn spe_set(inst: &Instance, order: &MoveOrder) -> BTreeSet<Vec<usize>> {
    let (n, m) = (inst.n(), inst.m());
    let movers = order.players();
    // Histories of length k, as action sequences.
    let levels: Vec<Vec<Vec<usize>>> = (0..n).map(|k| all_outcomes(k, m)).collect();
    let index = |h: &[usize]| h.iter().fold(0usize, |acc, &a| acc * m + a);
    let slots: usize = levels.iter().map(Vec::len).sum();
    let offsets: Vec<usize> = levels
        .iter()
        .scan(0, |acc, l| {
            let o = *acc;
            *acc += l.len();
            Some(o)
        })
        .collect();

    let to_outcome = |actions: &[usize]| {
        let mut sigma = vec![0; n];
        for (k, &a) in actions.iter().enumerate() {
            sigma[movers[k]] = a;
        }
        sigma
    };
    let mut found = BTreeSet::new();
    let mut profile = vec![0usize; slots];
    loop {
        let play = |prefix: &[usize]| {
            let mut h = prefix.to_vec();
            while h.len() < n {
                let k = h.len();
                h.push(profile[offsets[k] + index(&h)]);
            }
            to_outcome(&h)
        };
        let perfect = (0..n).all(|k| {
            let mover = movers[k];
            levels[k].iter().all(|h| {
                let chosen = profile[offsets[k] + index(h)];
                let mut with = h.clone();
                with.push(chosen);
                let cur = costs(inst, &play(&with))[mover];
                (0..m).all(|a| {
                    let mut alt = h.clone();
                    alt.push(a);
                    costs(inst, &play(&alt))[mover] >= cur
                })
            })
        });
        if perfect {
            found.insert(play(&[]));
        }
        // odometer over the profile
        let mut k = 0;
        loop {
            if k == slots {
                return found;
            }
            profile[k] += 1;
            if profile[k] < m {
                break;
            }
            profile[k] = 0;
            k += 1;
        }
    }
}
