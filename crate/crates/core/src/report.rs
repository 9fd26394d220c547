//! Analysis reports: equilibrium sets, optima and inefficiency ratios of one
//! instance, serializable as JSON, CSV or a text table.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::format::{digest, exact, exact_opt, format_rational};
use crate::game::{Outcome, SocialFn};
use crate::ratio::{Measure, Optimum, RatioReport};
use crate::sequential::{MoveOrder, SequentialAnalysis};
use crate::simultaneous::{NashOptions, SimultaneousAnalysis};
use crate::{Instance, Rational, SocialValues};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Simultaneous,
    Sequential,
}

impl Mode {
    pub fn measures(self) -> [Measure; 2] {
        match self {
            Mode::Simultaneous => [Measure::PoA, Measure::PoS],
            Mode::Sequential => [Measure::SPoA, Measure::SPoS],
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simultaneous" | "sim" => Ok(Mode::Simultaneous),
            "sequential" | "seq" => Ok(Mode::Sequential),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Table,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "table" => Ok(ReportFormat::Table),
            other => Err(Error::Parse(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub mode: Mode,
    pub functions: Vec<SocialFn>,
    /// Move order for the sequential mode; identity when `None`.
    pub order: Option<MoveOrder>,
    pub budget: Budget,
    pub symmetry_reduction: bool,
    /// Record wall-clock time. Off by default so reports are reproducible.
    pub timing: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            mode: Mode::Simultaneous,
            functions: SocialFn::ALL.to_vec(),
            order: None,
            budget: Budget::default(),
            symmetry_reduction: false,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    NoEquilibrium,
    DegenerateOptimum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureEntry {
    pub measure: Measure,
    pub status: Status,
    #[serde(with = "exact_opt")]
    pub ratio: Option<Rational>,
    #[serde(with = "exact_opt")]
    pub equilibrium_value: Option<Rational>,
    pub witnesses: Vec<Outcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionBlock {
    pub social: SocialFn,
    #[serde(with = "exact")]
    pub optimal_value: Rational,
    pub optimal_witness: Outcome,
    #[serde(with = "exact_opt")]
    pub min_value: Option<Rational>,
    #[serde(with = "exact_opt")]
    pub max_value: Option<Rational>,
    pub measures: Vec<MeasureEntry>,
}

impl FunctionBlock {
    pub fn measure(&self, m: Measure) -> Option<&MeasureEntry> {
        self.measures.iter().find(|e| e.measure == m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumEntry {
    pub outcome: Outcome,
    #[serde(with = "exact")]
    pub d: Rational,
    #[serde(with = "exact")]
    pub e: Rational,
    #[serde(with = "exact")]
    pub u: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub instance_digest: String,
    pub n: usize,
    pub m: usize,
    pub metric: bool,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
    pub equilibrium_count: usize,
    /// Nash equilibria (simultaneous) or SPE outcomes (sequential).
    pub equilibria: Vec<EquilibriumEntry>,
    pub functions: Vec<FunctionBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl AnalysisReport {
    pub fn block(&self, f: SocialFn) -> Option<&FunctionBlock> {
        self.functions.iter().find(|b| b.social == f)
    }

    pub fn ratio(&self, f: SocialFn, m: Measure) -> Option<Rational> {
        self.block(f)?.measure(m)?.ratio
    }
}

fn entry(measure: Measure, result: Result<RatioReport<Rational>>) -> Result<MeasureEntry> {
    match result {
        Ok(r) => Ok(MeasureEntry {
            measure,
            status: Status::Ok,
            ratio: Some(r.ratio),
            equilibrium_value: Some(r.equilibrium_value),
            witnesses: r.witnesses,
        }),
        Err(Error::NoEquilibrium) => Ok(MeasureEntry {
            measure,
            status: Status::NoEquilibrium,
            ratio: None,
            equilibrium_value: None,
            witnesses: Vec::new(),
        }),
        Err(Error::DegenerateOptimum) => Ok(MeasureEntry {
            measure,
            status: Status::DegenerateOptimum,
            ratio: None,
            equilibrium_value: None,
            witnesses: Vec::new(),
        }),
        Err(e) => Err(e),
    }
}

fn block<'a>(
    f: SocialFn,
    optimum: &Optimum<Rational>,
    values: impl Iterator<Item = &'a SocialValues> + Clone,
    measures: [(Measure, Result<RatioReport<Rational>>); 2],
) -> Result<FunctionBlock> {
    let vals = values.map(|v| v.get(f));
    let measures = measures
        .into_iter()
        .map(|(m, r)| {
            let mut e = entry(m, r)?;
            if e.status == Status::DegenerateOptimum {
                e.equilibrium_value = if m.takes_worst() {
                    vals.clone().max()
                } else {
                    vals.clone().min()
                };
            }
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FunctionBlock {
        social: f,
        optimal_value: optimum.value,
        optimal_witness: optimum.witness.clone(),
        min_value: vals.clone().min(),
        max_value: vals.max(),
        measures,
    })
}

/// Runs the chosen engine once and assembles the report.
pub fn analyze(inst: &Instance, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let started = Instant::now();
    let mut functions = Vec::new();
    let (equilibria, order) = match opts.mode {
        Mode::Simultaneous => {
            let nash = NashOptions {
                symmetry_reduction: opts.symmetry_reduction,
            };
            let a = SimultaneousAnalysis::run(inst, &opts.budget, nash)?;
            for &f in &opts.functions {
                functions.push(block(
                    f,
                    a.optimum(f),
                    a.equilibria.values.iter(),
                    [(Measure::PoA, a.poa(f)), (Measure::PoS, a.pos(f))],
                )?);
            }
            let eq = a
                .equilibria
                .iter()
                .map(|(o, v)| EquilibriumEntry {
                    outcome: o.clone(),
                    d: v.d,
                    e: v.e,
                    u: v.u,
                })
                .collect::<Vec<_>>();
            (eq, None)
        }
        Mode::Sequential => {
            let order = opts
                .order
                .clone()
                .unwrap_or_else(|| MoveOrder::identity(inst.n()));
            let a = SequentialAnalysis::run(inst, &order, &opts.budget)?;
            for &f in &opts.functions {
                functions.push(block(
                    f,
                    a.optimum(f),
                    a.spe.members.iter().map(|m| &m.values),
                    [(Measure::SPoA, a.spoa(f)), (Measure::SPoS, a.spos(f))],
                )?);
            }
            let eq = a
                .spe
                .members
                .iter()
                .map(|m| EquilibriumEntry {
                    outcome: m.outcome.clone(),
                    d: m.values.d,
                    e: m.values.e,
                    u: m.values.u,
                })
                .collect::<Vec<_>>();
            (eq, Some(order.to_one_based()))
        }
    };
    Ok(AnalysisReport {
        instance_digest: digest(inst),
        n: inst.n(),
        m: inst.m(),
        metric: inst.is_metric(),
        mode: opts.mode,
        order,
        equilibrium_count: equilibria.len(),
        equilibria,
        functions,
        elapsed_ms: opts.timing.then(|| started.elapsed().as_millis() as u64),
    })
}

fn opt_text(v: &Option<Rational>) -> String {
    v.as_ref().map(format_rational).unwrap_or_default()
}

fn status_text(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::NoEquilibrium => "no-equilibrium",
        Status::DegenerateOptimum => "degenerate-optimum",
    }
}

/// Ratio cell for the text table.
fn ratio_cell(e: &MeasureEntry) -> String {
    match e.status {
        Status::Ok => opt_text(&e.ratio),
        Status::NoEquilibrium => "—".to_string(),
        Status::DegenerateOptimum => match e.equilibrium_value {
            Some(v) if !v.is_zero() => "unbounded".to_string(),
            _ => "0/0".to_string(),
        },
    }
}

pub fn serialize_report(report: &AnalysisReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut s =
                String::from("function,measure,status,equilibrium_value,optimal_value,ratio\n");
            for b in &report.functions {
                for e in &b.measures {
                    writeln!(
                        s,
                        "{},{},{},{},{},{}",
                        b.social,
                        e.measure,
                        status_text(e.status),
                        opt_text(&e.equilibrium_value),
                        format_rational(&b.optimal_value),
                        opt_text(&e.ratio)
                    )
                    .unwrap();
                }
            }
            s
        }
        ReportFormat::Table => render_table(report),
    }
}

pub fn parse_report_json(text: &str) -> Result<AnalysisReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("report: {e}")))
}

fn render_table(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let [first, second] = report.mode.measures();
    writeln!(out, "instance  {}", report.instance_digest).unwrap();
    write!(
        out,
        "n={} m={} metric={} mode={:?}",
        report.n, report.m, report.metric, report.mode
    )
    .unwrap();
    if let Some(order) = &report.order {
        let labels: Vec<String> = order.iter().map(|p| p.to_string()).collect();
        write!(out, " order=({})", labels.join(",")).unwrap();
    }
    writeln!(out, "\nequilibria: {}", report.equilibrium_count).unwrap();
    let header = vec![
        "f".to_string(),
        "optimum".into(),
        "witness".into(),
        "eq-min".into(),
        "eq-max".into(),
        first.to_string(),
        second.to_string(),
    ];
    let mut rows = vec![header];
    for b in &report.functions {
        let cell = |m: Measure| b.measure(m).map(ratio_cell).unwrap_or_default();
        rows.push(vec![
            b.social.to_string(),
            format_rational(&b.optimal_value),
            b.optimal_witness.to_string(),
            b.min_value
                .map(|v| format_rational(&v))
                .unwrap_or_else(|| "—".into()),
            b.max_value
                .map(|v| format_rational(&v))
                .unwrap_or_else(|| "—".into()),
            cell(first),
            cell(second),
        ]);
    }
    out.push_str(&align(&rows));
    if let Some(ms) = report.elapsed_ms {
        writeln!(out, "elapsed: {ms} ms").unwrap();
    }
    out
}

/// Left-aligns cells into columns separated by two spaces.
pub(crate) fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s}{}", " ".repeat(widths[c] - s.chars().count())))
            .collect();
        writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
    }
    out
}
