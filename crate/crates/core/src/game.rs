//! Transportation game instances and the route/cost semantics shared by the
//! simultaneous and sequential engines.
//!
//! Players, buses and permutation entries are 0-based internally. Anything
//! user facing (`Display`, serialized files, [`Outcome::one_based`]) uses the
//! 1-based labels of the model, with the destination written as `t`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result, Violation};
use crate::scalar::{max_of, Scalar};

/// A vertex of the distance graph: a player location or the destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Player(usize),
    Target,
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Player(p) => write!(f, "{}", p + 1),
            Vertex::Target => write!(f, "t"),
        }
    }
}

/// Bus chosen by each player, indexed by player.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Outcome(Vec<usize>);

impl Outcome {
    pub fn new(buses: Vec<usize>) -> Self {
        Outcome(buses)
    }

    /// Builds an outcome from 1-based bus labels, as written in the model.
    ///
    /// Panics if a label is 0.
    pub fn one_based(labels: &[usize]) -> Self {
        Outcome(
            labels
                .iter()
                .map(|&b| b.checked_sub(1).expect("bus labels are 1-based"))
                .collect(),
        )
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|b| b + 1).collect()
    }

    pub fn buses(&self) -> &[usize] {
        &self.0
    }

    pub fn bus_of(&self, player: usize) -> usize {
        self.0[player]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Outcome with `player` moved to `bus`.
    pub fn with(&self, player: usize, bus: usize) -> Outcome {
        let mut v = self.0.clone();
        v[player] = bus;
        Outcome(v)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, b) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", b + 1)?;
        }
        write!(f, ")")
    }
}

impl Serialize for Outcome {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        self.to_one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<usize>::deserialize(d)?;
        if labels.contains(&0) {
            return Err(serde::de::Error::custom("bus labels are 1-based"));
        }
        Ok(Outcome::one_based(&labels))
    }
}

/// Social cost function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SocialFn {
    /// Total distance driven by all buses.
    D,
    /// Largest player cost.
    E,
    /// Sum of player costs.
    U,
}

impl SocialFn {
    pub const ALL: [SocialFn; 3] = [SocialFn::D, SocialFn::E, SocialFn::U];
}

impl fmt::Display for SocialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SocialFn::D => "D",
            SocialFn::E => "E",
            SocialFn::U => "U",
        };
        f.write_str(s)
    }
}

impl FromStr for SocialFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "D" | "d" => Ok(SocialFn::D),
            "E" | "e" => Ok(SocialFn::E),
            "U" | "u" => Ok(SocialFn::U),
            other => Err(Error::Parse(format!("unknown social function {other:?}"))),
        }
    }
}

/// Per-player travel costs under one outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector<S> {
    pub costs: Vec<S>,
}

impl<S: Scalar> CostVector<S> {
    pub fn get(&self, player: usize) -> &S {
        &self.costs[player]
    }

    pub fn max(&self) -> S {
        self.costs.iter().cloned().fold(S::zero(), max_of)
    }

    pub fn sum(&self) -> S {
        self.costs.iter().cloned().fold(S::zero(), |a, b| a + b)
    }

    pub fn scaled(&self, alpha: &S) -> CostVector<S> {
        CostVector {
            costs: self
                .costs
                .iter()
                .map(|c| c.clone() * alpha.clone())
                .collect(),
        }
    }
}

impl<S: fmt::Display> fmt::Display for CostVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.costs.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// D, E and U of one outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SocialValues<S> {
    pub d: S,
    pub e: S,
    pub u: S,
}

impl<S: Clone> SocialValues<S> {
    pub fn get(&self, f: SocialFn) -> S {
        match f {
            SocialFn::D => self.d.clone(),
            SocialFn::E => self.e.clone(),
            SocialFn::U => self.u.clone(),
        }
    }
}

/// An outcome evaluated once: costs plus social values.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<S> {
    pub costs: CostVector<S>,
    pub values: SocialValues<S>,
}

/// Unvalidated instance description with 1-based permutations.
#[derive(Debug, Clone, PartialEq)]
pub struct RawInstance<S> {
    pub n: usize,
    pub m: usize,
    /// `(n+1) x (n+1)` matrix; the last row/column is the destination.
    pub distances: Vec<Vec<S>>,
    /// One permutation of `1..=n` per bus.
    pub permutations: Vec<Vec<usize>>,
    pub metric: Option<bool>,
}

/// A validated transportation game.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<S> {
    n: usize,
    m: usize,
    dist: Vec<Vec<S>>,
    perms: Vec<Vec<usize>>,
    // rank[j][p]: position of player p in perms[j]
    rank: Vec<Vec<usize>>,
    declared_metric: Option<bool>,
}

/// A triple `(x, y, w)` with `d(x,w) > d(x,y) + d(y,w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricViolation {
    pub x: Vertex,
    pub y: Vertex,
    pub w: Vertex,
}

impl<S: Scalar> Instance<S> {
    /// Validates a raw description, collecting every violation found.
    pub fn from_raw(raw: RawInstance<S>) -> Result<Self> {
        let RawInstance {
            n,
            m,
            distances,
            permutations,
            metric,
        } = raw;
        let mut violations = Vec::new();
        if n == 0 {
            violations.push(Violation::NoPlayers);
        }
        if m < 2 {
            violations.push(Violation::TooFewBuses { m });
        }
        let size = n + 1;
        let vertex = |k: usize| {
            if k == n {
                Vertex::Target
            } else {
                Vertex::Player(k)
            }
        };

        let mut square = distances.len() == size;
        if !square {
            violations.push(Violation::DimensionMismatch(format!(
                "distance matrix has {} rows, expected {size}",
                distances.len()
            )));
        }
        for (r, row) in distances.iter().enumerate() {
            if row.len() != size {
                square = false;
                violations.push(Violation::DimensionMismatch(format!(
                    "row {} has {} entries, expected {size}",
                    vertex(r),
                    row.len()
                )));
            }
        }
        if square {
            for r in 0..size {
                if !distances[r][r].is_zero() {
                    violations.push(Violation::NonZeroDiagonal { vertex: vertex(r) });
                }
                for c in 0..size {
                    if distances[r][c].is_negative() {
                        violations.push(Violation::NegativeDistance {
                            row: vertex(r),
                            col: vertex(c),
                        });
                    }
                    if c > r && distances[r][c] != distances[c][r] {
                        violations.push(Violation::Asymmetric {
                            row: vertex(r),
                            col: vertex(c),
                        });
                    }
                }
            }
        }

        if permutations.len() != m {
            violations.push(Violation::DimensionMismatch(format!(
                "{} permutations given for {m} buses",
                permutations.len()
            )));
        }
        let mut perms = Vec::with_capacity(permutations.len());
        for (j, perm) in permutations.iter().enumerate() {
            match normalize_permutation(perm, n) {
                Ok(p) => perms.push(p),
                Err(reason) => violations.push(Violation::NotAPermutation { bus: j, reason }),
            }
        }

        if !violations.is_empty() {
            return Err(Error::InvalidInstance(violations));
        }
        let rank = perms
            .iter()
            .map(|p| {
                let mut r = vec![0; n];
                for (pos, &player) in p.iter().enumerate() {
                    r[player] = pos;
                }
                r
            })
            .collect();
        let inst = Instance {
            n,
            m,
            dist: distances,
            perms,
            rank,
            declared_metric: metric,
        };
        if metric == Some(true) {
            if let Err(MetricViolation { x, y, w }) = inst.check_metric() {
                return Err(Error::InvalidInstance(vec![
                    Violation::DeclaredMetricViolated { x, y, w },
                ]));
            }
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Matrix index of the destination.
    pub fn target(&self) -> usize {
        self.n
    }

    /// Distance between matrix indices `u` and `v` (index `n` is the destination).
    pub fn d(&self, u: usize, v: usize) -> &S {
        &self.dist[u][v]
    }

    pub fn distances(&self) -> &[Vec<S>] {
        &self.dist
    }

    /// 0-based permutation of bus `j`.
    pub fn perm(&self, j: usize) -> &[usize] {
        &self.perms[j]
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    /// Position of `player` in the permutation of bus `j`.
    pub fn rank(&self, j: usize, player: usize) -> usize {
        self.rank[j][player]
    }

    pub fn declared_metric(&self) -> Option<bool> {
        self.declared_metric
    }

    pub fn vertex(&self, k: usize) -> Vertex {
        if k == self.n {
            Vertex::Target
        } else {
            Vertex::Player(k)
        }
    }

    pub fn all_perms_equal(&self) -> bool {
        self.perms.windows(2).all(|w| w[0] == w[1])
    }

    /// Converts to the equivalent 1-based raw description.
    pub fn to_raw(&self) -> RawInstance<S> {
        RawInstance {
            n: self.n,
            m: self.m,
            distances: self.dist.clone(),
            permutations: self
                .perms
                .iter()
                .map(|p| p.iter().map(|x| x + 1).collect())
                .collect(),
            metric: self.declared_metric,
        }
    }

    /// Same instance with every distance passed through `f`.
    pub fn map_distances<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Instance<T> {
        Instance {
            n: self.n,
            m: self.m,
            dist: self
                .dist
                .iter()
                .map(|row| row.iter().map(&f).collect())
                .collect(),
            perms: self.perms.clone(),
            rank: self.rank.clone(),
            declared_metric: self.declared_metric,
        }
    }

    /// Every distance multiplied by `alpha`.
    pub fn scaled(&self, alpha: &S) -> Instance<S> {
        self.map_distances(|x| x.clone() * alpha.clone())
    }

    /// Checks the triangle inequality over all ordered vertex triples.
    pub fn check_metric(&self) -> std::result::Result<(), MetricViolation> {
        let size = self.n + 1;
        for x in 0..size {
            for w in 0..size {
                for y in 0..size {
                    let via = self.dist[x][y].clone() + self.dist[y][w].clone();
                    if self.dist[x][w] > via {
                        return Err(MetricViolation {
                            x: self.vertex(x),
                            y: self.vertex(y),
                            w: self.vertex(w),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_metric(&self) -> bool {
        self.check_metric().is_ok()
    }

    pub fn check_outcome(&self, sigma: &Outcome) -> Result<()> {
        if sigma.len() != self.n {
            return Err(Error::OutcomeLength {
                len: sigma.len(),
                n: self.n,
            });
        }
        match sigma.buses().iter().find(|&&b| b >= self.m) {
            Some(&bus) => Err(Error::BusOutOfRange { bus, m: self.m }),
            None => Ok(()),
        }
    }

    /// Players picked up by `bus`, in pickup order. `bus` is 0-based.
    pub fn bus_route(&self, sigma: &Outcome, bus: usize) -> Result<Vec<usize>> {
        self.check_outcome(sigma)?;
        if bus >= self.m {
            return Err(Error::BusOutOfRange { bus, m: self.m });
        }
        Ok(self.route_unchecked(sigma.buses(), bus))
    }

    pub(crate) fn route_unchecked(&self, sigma: &[usize], bus: usize) -> Vec<usize> {
        self.perms[bus]
            .iter()
            .copied()
            .filter(|&p| sigma[p] == bus)
            .collect()
    }

    /// Distance the bus of `player` travels from the player's location to `t`.
    pub fn player_cost(&self, sigma: &Outcome, player: usize) -> Result<S> {
        self.check_outcome(sigma)?;
        if player >= self.n {
            return Err(Error::PlayerOutOfRange { player, n: self.n });
        }
        let bus = sigma.bus_of(player);
        Ok(self.cost_on_bus(sigma.buses(), player, bus))
    }

    /// Cost `player` would pay riding `bus`, with everyone else as in `sigma`.
    pub(crate) fn cost_on_bus(&self, sigma: &[usize], player: usize, bus: usize) -> S {
        let perm = &self.perms[bus];
        let mut cost = S::zero();
        let mut at = player;
        for &p in &perm[self.rank[bus][player] + 1..] {
            if p != player && sigma[p] == bus {
                cost = cost + self.dist[at][p].clone();
                at = p;
            }
        }
        cost + self.dist[at][self.n].clone()
    }

    pub fn cost_vector(&self, sigma: &Outcome) -> Result<CostVector<S>> {
        self.check_outcome(sigma)?;
        Ok(self.evaluate_unchecked(sigma.buses()).costs)
    }

    /// Costs and D/E/U of a checked outcome.
    pub fn evaluate(&self, sigma: &Outcome) -> Result<Evaluation<S>> {
        self.check_outcome(sigma)?;
        Ok(self.evaluate_unchecked(sigma.buses()))
    }

    /// Walks each bus route backwards from `t`. D is the sum of the costs of
    /// the first player picked up by each nonempty bus.
    pub(crate) fn evaluate_unchecked(&self, sigma: &[usize]) -> Evaluation<S> {
        let t = self.n;
        let mut costs = vec![S::zero(); self.n];
        let mut d = S::zero();
        for (j, perm) in self.perms.iter().enumerate() {
            let mut next = t;
            let mut acc = S::zero();
            for &p in perm.iter().rev() {
                if sigma[p] == j {
                    acc = acc + self.dist[p][next].clone();
                    costs[p] = acc.clone();
                    next = p;
                }
            }
            d = d + acc;
        }
        let costs = CostVector { costs };
        let values = SocialValues {
            e: costs.max(),
            u: costs.sum(),
            d,
        };
        Evaluation { costs, values }
    }

    /// Total bus distance, summed leg by leg over every route.
    pub fn social_d(&self, sigma: &Outcome) -> Result<S> {
        self.check_outcome(sigma)?;
        Ok(self.weighted_legs(sigma.buses(), false))
    }

    pub fn social_e(&self, sigma: &Outcome) -> Result<S> {
        Ok(self.cost_vector(sigma)?.max())
    }

    pub fn social_u(&self, sigma: &Outcome) -> Result<S> {
        Ok(self.cost_vector(sigma)?.sum())
    }

    /// U computed from route legs: the `r`-th leg of a route is paid by the
    /// `r` players already aboard.
    pub fn social_u_by_legs(&self, sigma: &Outcome) -> Result<S> {
        self.check_outcome(sigma)?;
        Ok(self.weighted_legs(sigma.buses(), true))
    }

    fn weighted_legs(&self, sigma: &[usize], by_load: bool) -> S {
        let mut total = S::zero();
        for j in 0..self.m {
            let route = self.route_unchecked(sigma, j);
            for (r, &p) in route.iter().enumerate() {
                let next = route.get(r + 1).copied().unwrap_or(self.n);
                let leg = self.dist[p][next].clone();
                total = total
                    + if by_load {
                        S::from_count(r + 1) * leg
                    } else {
                        leg
                    };
            }
        }
        total
    }

    pub fn social(&self, sigma: &Outcome, f: SocialFn) -> Result<S> {
        match f {
            SocialFn::D => self.social_d(sigma),
            SocialFn::E => self.social_e(sigma),
            SocialFn::U => self.social_u(sigma),
        }
    }
}

fn normalize_permutation(perm: &[usize], n: usize) -> std::result::Result<Vec<usize>, String> {
    if perm.len() != n {
        return Err(format!("length {} instead of {n}", perm.len()));
    }
    let mut seen = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for &label in perm {
        if label == 0 || label > n {
            return Err(format!("entry {label} outside 1..={n}"));
        }
        if std::mem::replace(&mut seen[label - 1], true) {
            return Err(format!("entry {label} repeated"));
        }
        out.push(label - 1);
    }
    Ok(out)
}
