//! Instance generators: the witness families used for the inefficiency
//! bounds, random instances, and shortest-path completion of partial graphs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Instance, RawInstance, Vertex};
use crate::scalar::Scalar;
use crate::Rational;

/// Distances known so far; `None` marks a missing edge.
pub type PartialDistances<S> = Vec<Vec<Option<S>>>;

/// Partial matrix of size `size` holding the given undirected edges.
pub fn partial_from_edges<S: Scalar>(
    size: usize,
    edges: &[(usize, usize, S)],
) -> PartialDistances<S> {
    let mut partial = vec![vec![None; size]; size];
    for (u, v, w) in edges {
        partial[*u][*v] = Some(w.clone());
        partial[*v][*u] = Some(w.clone());
    }
    partial
}

/// All-pairs shortest paths (Floyd-Warshall) over an undirected partial
/// graph. When both directions of an edge are given, the smaller weight is
/// used. The last index is reported as `t` in errors.
pub fn shortest_path_closure<S: Scalar>(partial: &PartialDistances<S>) -> Result<Vec<Vec<S>>> {
    let size = partial.len();
    let vertex = |k: usize| {
        if k + 1 == size {
            Vertex::Target
        } else {
            Vertex::Player(k)
        }
    };
    let mut dist: Vec<Vec<Option<S>>> = vec![vec![None; size]; size];
    for u in 0..size {
        if partial[u].len() != size {
            return Err(Error::ParameterDomain(format!(
                "partial distance row {u} has {} entries, expected {size}",
                partial[u].len()
            )));
        }
        dist[u][u] = Some(S::zero());
        for v in 0..size {
            if u == v {
                continue;
            }
            for w in [&partial[u][v], &partial[v][u]].into_iter().flatten() {
                if w.is_negative() {
                    return Err(Error::ParameterDomain(format!(
                        "negative edge weight between {} and {}",
                        vertex(u),
                        vertex(v)
                    )));
                }
                if dist[u][v].as_ref().is_none_or(|cur| w < cur) {
                    dist[u][v] = Some(w.clone());
                }
            }
        }
    }
    for k in 0..size {
        for u in 0..size {
            let Some(uk) = dist[u][k].clone() else {
                continue;
            };
            for v in 0..size {
                let Some(kv) = dist[k][v].clone() else {
                    continue;
                };
                let via = uk.clone() + kv;
                if dist[u][v].as_ref().is_none_or(|cur| via < *cur) {
                    dist[u][v] = Some(via);
                }
            }
        }
    }
    dist.into_iter()
        .enumerate()
        .map(|(u, row)| {
            row.into_iter()
                .enumerate()
                .map(|(v, d)| d.ok_or(Error::Disconnected(vertex(u), vertex(v))))
                .collect()
        })
        .collect()
}

fn int<S: Scalar>(k: usize) -> S {
    S::from_count(k)
}

fn build<S: Scalar>(
    n: usize,
    m: usize,
    distances: Vec<Vec<S>>,
    permutations: Vec<Vec<usize>>,
    metric: Option<bool>,
) -> Result<Instance<S>> {
    Instance::from_raw(RawInstance {
        n,
        m,
        distances,
        permutations,
        metric,
    })
}

fn identity(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

fn positive<S: Scalar>(x: &S, name: &'static str) -> Result<()> {
    if *x > S::zero() {
        Ok(())
    } else {
        Err(Error::NonPositiveParameter { name })
    }
}

/// Five players on two buses with identity permutations; the explicit
/// edges are completed by shortest paths.
pub fn example1<S: Scalar>() -> Instance<S> {
    let t = 5;
    let mut edges: Vec<(usize, usize, S)> = (0..5).map(|p| (p, t, int(3))).collect();
    // (1,4)=1, (4,3)=2, (3,5)=2, (5,2)=1 in 1-based labels
    edges.extend([
        (0, 3, int(1)),
        (3, 2, int(2)),
        (2, 4, int(2)),
        (4, 1, int(1)),
    ]);
    let dist = shortest_path_closure(&partial_from_edges(6, &edges)).expect("connected");
    build(5, 2, dist, vec![identity(5); 2], Some(true)).expect("valid by construction")
}

/// Four players on the path 3 - 4 - t - 1 - 2 with unit edges, both buses
/// using the permutation (1,2,4,3).
pub fn example2<S: Scalar>() -> Instance<S> {
    let t = 4;
    let edges = [
        (2, 3, int(1)),
        (3, t, int(1)),
        (t, 0, int(1)),
        (0, 1, int(1)),
    ];
    let dist = shortest_path_closure(&partial_from_edges(5, &edges)).expect("connected");
    build(4, 2, dist, vec![vec![1, 2, 4, 3]; 2], Some(true)).expect("valid by construction")
}

/// Three players, two buses, both with permutation (1,3,2). Player 1 is at
/// distance `x` from `t` and from player 3; every other pair is 0 except
/// `d(3,t) = 1`. Not metric.
pub fn nonmetric_triangle<S: Scalar>(x: S) -> Result<Instance<S>> {
    positive(&x, "X")?;
    let z = S::zero;
    let dist = vec![
        vec![z(), z(), x.clone(), x.clone()],
        vec![z(), z(), z(), z()],
        vec![x.clone(), z(), z(), S::one()],
        vec![x, z(), S::one(), z()],
    ];
    build(3, 2, dist, vec![vec![1, 3, 2]; 2], Some(false))
}

/// Bus permutation scheme for the symmetric families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PermScheme {
    Identity,
    Reverse,
}

impl PermScheme {
    fn permutation(self, n: usize) -> Vec<usize> {
        match self {
            PermScheme::Identity => identity(n),
            PermScheme::Reverse => (1..=n).rev().collect(),
        }
    }
}

impl FromStr for PermScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(PermScheme::Identity),
            "reverse" => Ok(PermScheme::Reverse),
            other => Err(Error::Parse(format!(
                "unknown permutation scheme {other:?}"
            ))),
        }
    }
}

impl fmt::Display for PermScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PermScheme::Identity => "identity",
            PermScheme::Reverse => "reverse",
        })
    }
}

/// Every player at distance 1 from `t` and `eps` from every other player.
pub fn epsilon_star<S: Scalar>(
    n: usize,
    m: usize,
    eps: S,
    scheme: PermScheme,
) -> Result<Instance<S>> {
    positive(&eps, "eps")?;
    if n == 0 || m < 2 {
        return Err(Error::ParameterDomain(format!(
            "need n >= 1 and m >= 2, got n={n}, m={m}"
        )));
    }
    let metric = eps <= int(2);
    let mut dist = vec![vec![eps; n + 1]; n + 1];
    for (u, row) in dist.iter_mut().enumerate() {
        row[u] = S::zero();
        row[n] = S::one();
    }
    dist[n] = vec![S::one(); n + 1];
    dist[n][n] = S::zero();
    build(n, m, dist, vec![scheme.permutation(n); m], Some(metric))
}

/// Left/right group instance with `k` levels of `m` players per side.
///
/// Labels: on level `i` (1-based), `l_{i,j}` is player `2m(i-1) + j` and
/// `r_{i,j}` is player `2m(i-1) + m + j`, so the shared permutation is
/// `(n, n-1, ..., 1)`. `pad` extra players sit on `t` and are appended at
/// the end of the permutation with labels `2km+1 ..`.
pub fn group_levels<S: Scalar>(k: usize, m: usize, a: S, pad: usize) -> Result<Instance<S>> {
    if k == 0 || m < 2 || a <= S::one() {
        return Err(Error::ParameterDomain(format!(
            "group levels need k >= 1, m >= 2 and a > 1 (k={k}, m={m}, a={a})"
        )));
    }
    let core = 2 * k * m;
    let n = core + pad;
    let is_left = |p: usize| p < core && (p % (2 * m)) < m;
    let to_t = |p: usize| -> S {
        if p >= core {
            S::zero()
        } else if is_left(p) {
            a.clone() * a.clone()
        } else {
            a.clone()
        }
    };
    let mut dist = vec![vec![S::zero(); n + 1]; n + 1];
    for u in 0..n {
        dist[u][n] = to_t(u);
        dist[n][u] = to_t(u);
        for v in 0..n {
            dist[u][v] = if u == v {
                S::zero()
            } else if u >= core || v >= core {
                // a padded player is coincident with t
                to_t(u) + to_t(v)
            } else if is_left(u) == is_left(v) {
                S::one()
            } else {
                a.clone() * (a.clone() + S::one())
            };
        }
    }
    let mut perm: Vec<usize> = (1..=core).rev().collect();
    perm.extend(core + 1..=n);
    build(n, m, dist, vec![perm; m], Some(true))
}

/// `n - m` players coincident with `t`, `m` far players at distance 1 from
/// `t` and `eps` from each other. Permutation `(1, .., n-m, n, n-1, .., n-m+1)`.
pub fn zero_cluster_far<S: Scalar>(n: usize, m: usize, eps: S) -> Result<Instance<S>> {
    if m < 2 || n <= m {
        return Err(Error::ParameterDomain(format!(
            "need n > m >= 2, got n={n}, m={m}"
        )));
    }
    if eps.is_negative() {
        return Err(Error::ParameterDomain("eps must be nonnegative".into()));
    }
    let t = n;
    let near = n - m;
    let mut edges = Vec::new();
    for u in 0..n {
        edges.push((u, t, if u < near { S::zero() } else { S::one() }));
        for v in u + 1..n {
            if v < near {
                edges.push((u, v, S::zero()));
            } else if u >= near {
                edges.push((u, v, eps.clone()));
            }
        }
    }
    let dist = shortest_path_closure(&partial_from_edges(n + 1, &edges))?;
    let mut perm = identity(near);
    perm.extend((near + 1..=n).rev());
    build(n, m, dist, vec![perm; m], Some(true))
}

/// Players `1..n-1` coincident with `t`, player `n` at distance 1; `m = n`
/// buses with identity permutations.
pub fn zero_cluster_single<S: Scalar>(n: usize) -> Result<Instance<S>> {
    if n < 2 {
        return Err(Error::ParameterDomain(format!("need n >= 2, got {n}")));
    }
    let t = n;
    let mut edges = vec![(n - 1, t, S::one())];
    for u in 0..n - 1 {
        edges.push((u, t, S::zero()));
        for v in u + 1..n - 1 {
            edges.push((u, v, S::zero()));
        }
    }
    let dist = shortest_path_closure(&partial_from_edges(n + 1, &edges))?;
    build(n, n, dist, vec![identity(n); n], Some(true))
}

/// Bounds for random rational distances `p/q` with `q <= max_denominator`
/// and value at most `max_value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueRange {
    pub max_value: u32,
    pub max_denominator: u32,
}

impl Default for ValueRange {
    fn default() -> Self {
        ValueRange {
            max_value: 10,
            max_denominator: 4,
        }
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, size: usize, range: ValueRange) -> Vec<Vec<Rational>> {
    let den = range.max_denominator.max(1) as i64;
    let mut dist = vec![vec![Rational::zero(); size]; size];
    for u in 0..size {
        for v in u + 1..size {
            let q = rng.gen_range(1..=den);
            let p = rng.gen_range(0..=range.max_value as i64 * q);
            dist[u][v] = Rational::new(p, q);
            dist[v][u] = dist[u][v];
        }
    }
    dist
}

fn random_perms(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<usize>> {
    (0..m)
        .map(|_| {
            let mut p = identity(n);
            p.shuffle(rng);
            p
        })
        .collect()
}

fn check_random_domain(n: usize, m: usize, range: ValueRange) -> Result<()> {
    if n == 0 || m < 2 || range.max_denominator == 0 {
        return Err(Error::ParameterDomain(format!(
            "random instances need n >= 1, m >= 2 and a positive denominator bound (n={n}, m={m})"
        )));
    }
    Ok(())
}

/// Random distances made metric by shortest-path closure, with random bus
/// permutations. Deterministic per seed.
pub fn random_metric(
    n: usize,
    m: usize,
    seed: u64,
    range: ValueRange,
) -> Result<Instance<Rational>> {
    check_random_domain(n, m, range)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = random_matrix(&mut rng, n + 1, range);
    let partial = raw
        .into_iter()
        .map(|row| row.into_iter().map(Some).collect())
        .collect();
    let dist = shortest_path_closure(&partial)?;
    let perms = random_perms(&mut rng, n, m);
    build(n, m, dist, perms, Some(true))
}

/// Random symmetric distances without closure (usually not metric), with
/// random bus permutations. Deterministic per seed.
pub fn random_instance(
    n: usize,
    m: usize,
    seed: u64,
    range: ValueRange,
) -> Result<Instance<Rational>> {
    check_random_domain(n, m, range)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = random_matrix(&mut rng, n + 1, range);
    let perms = random_perms(&mut rng, n, m);
    build(n, m, dist, perms, None)
}

/// Named generator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Example1,
    Example2,
    NonmetricTriangle,
    EpsilonStar,
    GroupLevels,
    ZeroClusterFar,
    ZeroClusterSingle,
    RandomMetric,
    Random,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Example1,
        Family::Example2,
        Family::NonmetricTriangle,
        Family::EpsilonStar,
        Family::GroupLevels,
        Family::ZeroClusterFar,
        Family::ZeroClusterSingle,
        Family::RandomMetric,
        Family::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Example1 => "example1",
            Family::Example2 => "example2",
            Family::NonmetricTriangle => "nonmetric-triangle",
            Family::EpsilonStar => "epsilon-star",
            Family::GroupLevels => "group-levels",
            Family::ZeroClusterFar => "zero-cluster-far",
            Family::ZeroClusterSingle => "zero-cluster-single",
            Family::RandomMetric => "random-metric",
            Family::Random => "random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

/// A family plus its parameters.
///
/// Parameter names: `n`, `m`, `k`, `pad`, `seed`, `max_value`,
/// `max_denominator` (nonnegative integers) and `eps`, `x`, `a` (rationals).
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub params: BTreeMap<String, Rational>,
    pub scheme: Option<PermScheme>,
}

impl FamilySpec {
    pub fn new(family: Family) -> Self {
        FamilySpec {
            family,
            params: BTreeMap::new(),
            scheme: None,
        }
    }

    pub fn with(mut self, name: &str, value: Rational) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn scheme(mut self, scheme: PermScheme) -> Self {
        self.scheme = Some(scheme);
        self
    }

    fn rational(&self, name: &str) -> Result<Rational> {
        self.params.get(name).copied().ok_or_else(|| {
            Error::ParameterDomain(format!("{} needs parameter {name}", self.family))
        })
    }

    fn count(&self, name: &str) -> Result<usize> {
        let v = self.rational(name)?;
        if !v.is_integer() || v < Rational::zero() {
            return Err(Error::ParameterDomain(format!(
                "{name} must be a nonnegative integer, got {v}"
            )));
        }
        v.to_integer()
            .to_usize()
            .ok_or_else(|| Error::ParameterDomain(format!("{name} too large")))
    }

    fn count_or(&self, name: &str, default: usize) -> Result<usize> {
        if self.params.contains_key(name) {
            self.count(name)
        } else {
            Ok(default)
        }
    }

    fn range(&self) -> Result<ValueRange> {
        let d = ValueRange::default();
        let as_u32 = |v: usize| {
            u32::try_from(v).map_err(|_| Error::ParameterDomain("value bound too large".into()))
        };
        Ok(ValueRange {
            max_value: as_u32(self.count_or("max_value", d.max_value as usize)?)?,
            max_denominator: as_u32(self.count_or("max_denominator", d.max_denominator as usize)?)?,
        })
    }

    pub fn build(&self) -> Result<Instance<Rational>> {
        match self.family {
            Family::Example1 => Ok(example1()),
            Family::Example2 => Ok(example2()),
            Family::NonmetricTriangle => nonmetric_triangle(self.rational("x")?),
            Family::EpsilonStar => epsilon_star(
                self.count("n")?,
                self.count("m")?,
                self.rational("eps")?,
                self.scheme.unwrap_or(PermScheme::Identity),
            ),
            Family::GroupLevels => group_levels(
                self.count("k")?,
                self.count("m")?,
                self.rational("a")?,
                self.count_or("pad", 0)?,
            ),
            Family::ZeroClusterFar => {
                zero_cluster_far(self.count("n")?, self.count("m")?, self.rational("eps")?)
            }
            Family::ZeroClusterSingle => zero_cluster_single(self.count("n")?),
            Family::RandomMetric => random_metric(
                self.count("n")?,
                self.count("m")?,
                self.count("seed")? as u64,
                self.range()?,
            ),
            Family::Random => random_instance(
                self.count("n")?,
                self.count("m")?,
                self.count("seed")? as u64,
                self.range()?,
            ),
        }
    }
}
