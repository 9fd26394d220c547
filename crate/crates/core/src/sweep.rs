//! Parameter sweeps that compare measured ratios with closed-form bounds.
//!
//! A sweep file names a family, a grid of parameter values, optional derived
//! parameters and a list of checks:
//!
//! ```json
//! {
//!   "family": "epsilon-star",
//!   "grid": { "n": [2, 3, 4], "eps": ["1/8", "1/2"] },
//!   "derived": { "m": "n" },
//!   "checks": [
//!     { "measure": "poa", "social": "U", "relation": "eq",
//!       "bound": "n/(1+(n-1)*eps)" }
//!   ]
//! }
//! ```
//!
//! Every grid point is built, analyzed and checked independently; points run
//! in parallel and rows come back in grid order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{for_each_outcome, Budget};
use crate::error::{Error, Result};
use crate::expr;
use crate::factory::{Family, FamilySpec, PermScheme};
use crate::format::{exact_opt, format_rational, NumberEntry};
use crate::game::SocialFn;
use crate::report::align;
use crate::sequential::{MoveOrder, SequentialAnalysis};
use crate::simultaneous::{NashOptions, SimultaneousAnalysis};
use crate::{Instance, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMeasure {
    Poa,
    Pos,
    Spoa,
    Spos,
    /// Optimal social value.
    Opt,
    /// Largest social value over all outcomes.
    MaxOutcome,
    /// `MaxOutcome / Opt`.
    WorstRatio,
}

impl SweepMeasure {
    fn simultaneous(self) -> bool {
        matches!(self, SweepMeasure::Poa | SweepMeasure::Pos)
    }

    fn sequential(self) -> bool {
        matches!(self, SweepMeasure::Spoa | SweepMeasure::Spos)
    }
}

impl fmt::Display for SweepMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SweepMeasure::Poa => "poa",
            SweepMeasure::Pos => "pos",
            SweepMeasure::Spoa => "spoa",
            SweepMeasure::Spos => "spos",
            SweepMeasure::Opt => "opt",
            SweepMeasure::MaxOutcome => "max-outcome",
            SweepMeasure::WorstRatio => "worst-ratio",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Eq,
    Le,
    Ge,
    Between,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundCheck {
    pub measure: SweepMeasure,
    pub social: SocialFn,
    pub relation: Relation,
    pub bound: String,
    /// Upper end for `between`; `bound` is then the lower end.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<PermScheme>,
    pub grid: BTreeMap<String, Vec<NumberEntry>>,
    #[serde(default)]
    pub derived: BTreeMap<String, String>,
    /// Move order for sequential measures, e.g. `"3,1,2"`; identity otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<String>,
    pub checks: Vec<BoundCheck>,
}

impl SweepSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: SweepSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("sweep file: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.checks.is_empty() {
            return Err(Error::Parse("sweep has no checks".into()));
        }
        if let Some((name, _)) = self.grid.iter().find(|(_, v)| v.is_empty()) {
            return Err(Error::Parse(format!("grid parameter {name} has no values")));
        }
        if let Some(name) = self.derived.keys().find(|k| self.grid.contains_key(*k)) {
            return Err(Error::Parse(format!(
                "{name} is both a grid and a derived parameter"
            )));
        }
        for c in &self.checks {
            c.bound.parse::<expr::Expr>()?;
            match (&c.upper, c.relation) {
                (Some(u), Relation::Between) => {
                    u.parse::<expr::Expr>()?;
                }
                (None, Relation::Between) => {
                    return Err(Error::Parse("relation between needs an upper bound".into()))
                }
                (Some(_), _) => {
                    return Err(Error::Parse("upper is only valid with between".into()))
                }
                (None, _) => {}
            }
        }
        Ok(())
    }

    /// Grid points in lexicographic order of parameter name, last name fastest.
    pub fn points(&self) -> Result<Vec<BTreeMap<String, Rational>>> {
        let axes = self
            .grid
            .iter()
            .map(|(k, vs)| {
                Ok((
                    k.clone(),
                    vs.iter()
                        .map(NumberEntry::value)
                        .collect::<Result<Vec<_>>>()?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut points = vec![BTreeMap::new()];
        for (name, values) in &axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.insert(name.clone(), *v);
                        q
                    })
                })
                .collect();
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail", rename_all = "kebab-case")]
pub enum RowStatus {
    Pass,
    Fail,
    /// The measure does not exist at this point (no equilibrium, zero optimum).
    Undefined(String),
    BudgetExceeded(String),
    /// The point lies outside the family's parameter domain.
    Invalid(String),
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStatus::Pass => f.write_str("pass"),
            RowStatus::Fail => f.write_str("FAIL"),
            RowStatus::Undefined(d) => write!(f, "undefined ({d})"),
            RowStatus::BudgetExceeded(d) => write!(f, "budget-exceeded ({d})"),
            RowStatus::Invalid(d) => write!(f, "invalid ({d})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: BTreeMap<String, String>,
    pub check: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub measure: SweepMeasure,
    pub social: SocialFn,
    pub relation: Relation,
    #[serde(with = "exact_opt")]
    pub measured: Option<Rational>,
    #[serde(with = "exact_opt")]
    pub expected: Option<Rational>,
    #[serde(with = "exact_opt")]
    pub expected_upper: Option<Rational>,
    #[serde(flatten)]
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub family: Family,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn failures(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| matches!(r.status, RowStatus::Fail | RowStatus::Invalid(_)))
            .count()
    }

    pub fn budget_exceeded(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| matches!(r.status, RowStatus::BudgetExceeded(_)))
            .count()
    }

    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.status == RowStatus::Pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sweep table serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "point,check,measure,social,relation,measured,expected,expected_upper,status\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "\"{}\",{},{},{},{:?},{},{},{},{}\n",
                point_text(&r.point),
                r.check,
                r.measure,
                r.social,
                r.relation,
                opt_text(&r.measured),
                opt_text(&r.expected),
                opt_text(&r.expected_upper),
                r.status
            ));
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut rows = vec![[
            "point", "check", "measured", "relation", "expected", "status",
        ]
        .map(String::from)
        .to_vec()];
        for r in &self.rows {
            let expected = match r.expected_upper {
                Some(u) => format!("[{}, {}]", opt_text(&r.expected), format_rational(&u)),
                None => opt_text(&r.expected),
            };
            let check = r
                .label
                .clone()
                .unwrap_or_else(|| format!("{}({})", r.measure, r.social));
            rows.push(vec![
                point_text(&r.point),
                check,
                r.measured
                    .map(|v| format_rational(&v))
                    .unwrap_or_else(|| "—".into()),
                format!("{:?}", r.relation).to_lowercase(),
                expected,
                r.status.to_string(),
            ]);
        }
        let mut out = align(&rows);
        out.push_str(&format!(
            "{} rows, {} failed, {} over budget\n",
            self.rows.len(),
            self.failures(),
            self.budget_exceeded()
        ));
        out
    }
}

fn opt_text(v: &Option<Rational>) -> String {
    v.map(|v| format_rational(&v)).unwrap_or_default()
}

fn point_text(point: &BTreeMap<String, String>) -> String {
    point
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Adds derived parameters, resolving references between them in any order.
fn resolve_derived(
    mut vars: BTreeMap<String, Rational>,
    derived: &BTreeMap<String, String>,
) -> Result<BTreeMap<String, Rational>> {
    let mut pending: Vec<(&String, &String)> = derived.iter().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut last_err = None;
        pending.retain(|(name, src)| match expr::evaluate(src, &vars) {
            Ok(v) => {
                vars.insert((*name).clone(), v);
                false
            }
            Err(e) => {
                last_err = Some(e);
                true
            }
        });
        if pending.len() == before {
            return Err(last_err.expect("pending derivation failed"));
        }
    }
    Ok(vars)
}

/// Minimum and maximum of each social function over all outcomes.
fn outcome_extremes(inst: &Instance, budget: &Budget) -> Result<[(Rational, Rational); 3]> {
    let mut ext: Option<[(Rational, Rational); 3]> = None;
    for_each_outcome(inst.n(), inst.m(), budget, |sigma| {
        let v = inst.evaluate_unchecked(sigma).values;
        let vals = [v.d, v.e, v.u];
        match &mut ext {
            None => ext = Some(vals.map(|x| (x, x))),
            Some(cur) => {
                for (c, x) in cur.iter_mut().zip(vals) {
                    c.0 = c.0.min(x);
                    c.1 = c.1.max(x);
                }
            }
        }
    })?;
    ext.ok_or_else(|| Error::ParameterDomain("empty outcome space".into()))
}

enum Measured {
    Value(Rational),
    Undefined(String),
}

type Analysis<T> = Option<std::result::Result<T, RowStatus>>;

struct PointAnalyses {
    sim: Analysis<SimultaneousAnalysis<Rational>>,
    seq: Analysis<SequentialAnalysis<Rational>>,
    extremes: Analysis<[(Rational, Rational); 3]>,
}

fn row_status(e: Error) -> RowStatus {
    match e {
        Error::BudgetExceeded { .. }
        | Error::SetOverflow { .. }
        | Error::OracleBudgetExceeded { .. } => RowStatus::BudgetExceeded(e.to_string()),
        _ => RowStatus::Invalid(e.to_string()),
    }
}

fn ready<T>(a: &Analysis<T>) -> std::result::Result<&T, RowStatus> {
    a.as_ref()
        .expect("analysis requested")
        .as_ref()
        .map_err(Clone::clone)
}

fn measure(
    a: &PointAnalyses,
    m: SweepMeasure,
    f: SocialFn,
) -> std::result::Result<Measured, RowStatus> {
    let ratio = |r: Result<crate::RatioReport>| match r {
        Ok(r) => Ok(Measured::Value(r.ratio)),
        Err(Error::NoEquilibrium) => Ok(Measured::Undefined("no equilibrium".into())),
        Err(Error::DegenerateOptimum) => Ok(Measured::Undefined("zero optimum".into())),
        Err(e) => Err(row_status(e)),
    };
    let ext = || ready(&a.extremes).map(|e| e[f as usize]);
    match m {
        SweepMeasure::Poa => ratio(ready(&a.sim)?.poa(f)),
        SweepMeasure::Pos => ratio(ready(&a.sim)?.pos(f)),
        SweepMeasure::Spoa => ratio(ready(&a.seq)?.spoa(f)),
        SweepMeasure::Spos => ratio(ready(&a.seq)?.spos(f)),
        SweepMeasure::Opt => Ok(Measured::Value(ext()?.0)),
        SweepMeasure::MaxOutcome => Ok(Measured::Value(ext()?.1)),
        SweepMeasure::WorstRatio => {
            let (lo, hi) = ext()?;
            if lo == Rational::from_integer(0) {
                Ok(Measured::Undefined("zero optimum".into()))
            } else {
                Ok(Measured::Value(hi / lo))
            }
        }
    }
}

fn run_point(
    spec: &SweepSpec,
    params: &BTreeMap<String, Rational>,
    budget: &Budget,
) -> Vec<SweepRow> {
    let point_labels: BTreeMap<String, String> = params
        .iter()
        .map(|(k, v)| (k.clone(), format_rational(v)))
        .collect();
    let row = |idx: usize, c: &BoundCheck, status: RowStatus| SweepRow {
        point: point_labels.clone(),
        check: idx,
        label: c.label.clone(),
        measure: c.measure,
        social: c.social,
        relation: c.relation,
        measured: None,
        expected: None,
        expected_upper: None,
        status,
    };
    let all_fail = |status: RowStatus| {
        spec.checks
            .iter()
            .enumerate()
            .map(|(i, c)| row(i, c, status.clone()))
            .collect::<Vec<_>>()
    };

    let built = resolve_derived(params.clone(), &spec.derived).and_then(|vars| {
        let mut fam = FamilySpec::new(spec.family);
        fam.params = vars.clone();
        fam.scheme = spec.scheme;
        Ok((vars, fam.build()?))
    });
    let (mut vars, inst) = match built {
        Ok(b) => b,
        Err(e) => return all_fail(RowStatus::Invalid(e.to_string())),
    };
    vars.entry("n".into())
        .or_insert(Rational::from_integer(inst.n() as i64));
    vars.entry("m".into())
        .or_insert(Rational::from_integer(inst.m() as i64));

    let order = match &spec.order {
        Some(s) => match s
            .parse::<MoveOrder>()
            .and_then(|o| o.check_for(&inst).map(|_| o))
        {
            Ok(o) => o,
            Err(e) => return all_fail(RowStatus::Invalid(e.to_string())),
        },
        None => MoveOrder::identity(inst.n()),
    };
    let needs = |p: fn(SweepMeasure) -> bool| spec.checks.iter().any(|c| p(c.measure));
    let analyses = PointAnalyses {
        sim: needs(SweepMeasure::simultaneous).then(|| {
            SimultaneousAnalysis::run(&inst, budget, NashOptions::default()).map_err(row_status)
        }),
        seq: needs(SweepMeasure::sequential)
            .then(|| SequentialAnalysis::run(&inst, &order, budget).map_err(row_status)),
        extremes: needs(|m| !m.simultaneous() && !m.sequential())
            .then(|| outcome_extremes(&inst, budget).map_err(row_status)),
    };

    spec.checks
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let expected = expr::evaluate(&c.bound, &vars);
            let upper = c
                .upper
                .as_ref()
                .map(|u| expr::evaluate(u, &vars))
                .transpose();
            let (expected, upper) = match (expected, upper) {
                (Ok(e), Ok(u)) => (e, u),
                (Err(e), _) | (_, Err(e)) => return row(idx, c, RowStatus::Invalid(e.to_string())),
            };
            let mut r = row(idx, c, RowStatus::Pass);
            r.expected = Some(expected);
            r.expected_upper = upper;
            match measure(&analyses, c.measure, c.social) {
                Ok(Measured::Value(v)) => {
                    r.measured = Some(v);
                    let ok = match c.relation {
                        Relation::Eq => v == expected,
                        Relation::Le => v <= expected,
                        Relation::Ge => v >= expected,
                        Relation::Between => expected <= v && upper.is_some_and(|u| v <= u),
                    };
                    if !ok {
                        r.status = RowStatus::Fail;
                    }
                }
                Ok(Measured::Undefined(why)) => r.status = RowStatus::Undefined(why),
                Err(status) => r.status = status,
            }
            r
        })
        .collect()
}

/// Runs every grid point of `spec` and checks each bound.
pub fn run_sweep(spec: &SweepSpec, budget: &Budget) -> Result<SweepTable> {
    spec.validate()?;
    let points = spec.points()?;
    let rows = points
        .par_iter()
        .map(|p| run_point(spec, p, budget))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(SweepTable {
        family: spec.family,
        rows,
    })
}

impl FromStr for SweepSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepSpec::parse(s)
    }
}
