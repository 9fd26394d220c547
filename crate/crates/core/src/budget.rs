use crate::error::{Error, Result};
use crate::game::Outcome;

pub const DEFAULT_MAX_OUTCOMES: u64 = 10_000_000;
pub const DEFAULT_MAX_NODE_SET: usize = 1_000_000;
pub const DEFAULT_MAX_PROFILES: u64 = 1_000_000;

/// Caps on exhaustive searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest `m^n` an enumeration or game tree may have.
    pub max_outcomes: u64,
    /// Largest result set a single node of backward induction may hold.
    pub max_node_set: usize,
    /// Largest number of strategy profiles the SPE oracle may visit.
    pub max_profiles: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_outcomes: DEFAULT_MAX_OUTCOMES,
            max_node_set: DEFAULT_MAX_NODE_SET,
            max_profiles: DEFAULT_MAX_PROFILES,
        }
    }
}

impl Budget {
    /// Returns `m^n` if it fits the outcome budget.
    pub fn outcome_count(&self, n: usize, m: usize) -> Result<u64> {
        let count = checked_pow(m, n);
        match count {
            Some(c) if c <= self.max_outcomes => Ok(c),
            _ => Err(Error::BudgetExceeded {
                required: format!("{m}^{n} outcomes"),
                cap: self.max_outcomes,
            }),
        }
    }
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<u64> {
    let exp = u32::try_from(exp).ok()?;
    (base as u64).checked_pow(exp)
}

/// All `m^n` outcomes in lexicographic order (last player varies fastest).
#[derive(Debug, Clone)]
pub struct Outcomes {
    current: Vec<usize>,
    m: usize,
    done: bool,
}

impl Outcomes {
    pub fn new(n: usize, m: usize, budget: &Budget) -> Result<Self> {
        budget.outcome_count(n, m)?;
        Ok(Outcomes {
            current: vec![0; n],
            m,
            done: false,
        })
    }
}

impl Iterator for Outcomes {
    type Item = Outcome;

    fn next(&mut self) -> Option<Outcome> {
        if self.done {
            return None;
        }
        let item = Outcome::new(self.current.clone());
        self.done = !advance(&mut self.current, self.m);
        Some(item)
    }
}

/// Odometer step; returns false once every digit has wrapped.
pub(crate) fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Calls `visit` on every outcome in lexicographic order without allocating.
pub(crate) fn for_each_outcome(
    n: usize,
    m: usize,
    budget: &Budget,
    mut visit: impl FnMut(&[usize]),
) -> Result<()> {
    budget.outcome_count(n, m)?;
    let mut sigma = vec![0; n];
    loop {
        visit(&sigma);
        if !advance(&mut sigma, m) {
            return Ok(());
        }
    }
}
