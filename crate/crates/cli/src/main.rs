use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use transit_games::factory::{Family, FamilySpec, PermScheme};
use transit_games::format::{instance_to_json, parse_rational, read_instance, write_instance};
use transit_games::report::{analyze, serialize_report, AnalyzeOptions, Mode, ReportFormat};
use transit_games::sweep::{run_sweep, SweepSpec};
use transit_games::{Budget, Error, MoveOrder, Rational, SocialFn};

const EXIT_INVALID: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "transit-games",
    version,
    about = "Equilibria and inefficiency of bus transportation games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file and list every violation.
    Validate { file: PathBuf },
    /// Build a witness family or random instance and write it as an instance file.
    Generate(GenerateArgs),
    /// Enumerate equilibria and report optima and inefficiency ratios.
    Analyze(AnalyzeArgs),
    /// Run a parameter sweep and compare measured ratios with closed-form bounds.
    VerifyBounds(VerifyArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// example1, example2, nonmetric-triangle, epsilon-star, group-levels,
    /// zero-cluster-far, zero-cluster-single, random-metric or random
    family: Family,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Extra players located at t (group-levels).
    #[arg(long)]
    pad: Option<String>,
    /// Bus permutations of epsilon-star: identity or reverse.
    #[arg(long)]
    scheme: Option<PermScheme>,
    #[arg(long)]
    max_value: Option<String>,
    #[arg(long = "max-den")]
    max_denominator: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = Budget::default().max_outcomes)]
    budget_outcomes: u64,
    #[arg(long, default_value_t = Budget::default().max_node_set)]
    budget_node_set: usize,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            max_outcomes: self.budget_outcomes,
            max_node_set: self.budget_node_set,
            ..Budget::default()
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    file: PathBuf,
    #[arg(long, default_value = "simultaneous")]
    mode: Mode,
    /// Comma list of D, E, U.
    #[arg(long, value_delimiter = ',', default_value = "D,E,U")]
    social: Vec<SocialFn>,
    /// Move order as a comma-separated permutation of 1..n (sequential mode).
    #[arg(long)]
    order: Option<MoveOrder>,
    #[arg(long, default_value = "json")]
    format: ReportFormat,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Fix player 1 on bus 1 when all buses share one permutation.
    #[arg(long)]
    symmetry_reduction: bool,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value = "table")]
    format: ReportFormat,
    #[command(flatten)]
    budget: BudgetArgs,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => EXIT_IO,
            Error::BudgetExceeded { .. }
            | Error::SetOverflow { .. }
            | Error::OracleBudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_INVALID,
        };
        let message = match &e {
            Error::InvalidInstance(violations) => violations
                .iter()
                .map(|v| format!("violation: {v}"))
                .collect::<Vec<_>>()
                .join("\n"),
            _ => format!("error: {e}"),
        };
        Failure { code, message }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("error: cannot read {}: {e}", path.display()),
    })
}

fn validate(file: &Path) -> Result<u8, Failure> {
    read_text(file)?;
    let inst = read_instance(file)?;
    println!(
        "valid: n={} m={} metric={}",
        inst.n(),
        inst.m(),
        inst.is_metric()
    );
    Ok(0)
}

fn generate(args: &GenerateArgs) -> Result<u8, Failure> {
    let mut spec = FamilySpec::new(args.family);
    let params = [
        ("n", &args.n),
        ("m", &args.m),
        ("k", &args.k),
        ("a", &args.a),
        ("eps", &args.eps),
        ("x", &args.x),
        ("seed", &args.seed),
        ("pad", &args.pad),
        ("max_value", &args.max_value),
        ("max_denominator", &args.max_denominator),
    ];
    for (name, value) in params {
        if let Some(v) = value {
            let r: Rational = parse_rational(v)?;
            spec = spec.with(name, r);
        }
    }
    spec.scheme = args.scheme;
    let inst = spec.build()?;
    match &args.output {
        Some(path) => write_instance(path, &inst)?,
        None => print!("{}", instance_to_json(&inst)),
    }
    Ok(0)
}

fn run_analyze(args: &AnalyzeArgs) -> Result<u8, Failure> {
    read_text(&args.file)?;
    let inst = read_instance(&args.file)?;
    if let Some(order) = &args.order {
        order.check_for(&inst)?;
    }
    let opts = AnalyzeOptions {
        mode: args.mode,
        functions: args.social.clone(),
        order: args.order.clone(),
        budget: args.budget.budget(),
        symmetry_reduction: args.symmetry_reduction,
        timing: args.timing,
    };
    let report = analyze(&inst, &opts)?;
    print!("{}", serialize_report(&report, args.format));
    Ok(0)
}

fn verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let spec = SweepSpec::parse(&read_text(&args.spec)?)?;
    let table = run_sweep(&spec, &args.budget.budget())?;
    let text = match args.format {
        ReportFormat::Json => table.to_json(),
        ReportFormat::Csv => table.to_csv(),
        ReportFormat::Table => table.to_table(),
    };
    print!("{text}");
    Ok(if table.failures() > 0 {
        EXIT_INVALID
    } else if table.budget_exceeded() > 0 {
        EXIT_BUDGET
    } else {
        0
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Validate { file } => validate(file),
        Command::Generate(args) => generate(args),
        Command::Analyze(args) => run_analyze(args),
        Command::VerifyBounds(args) => verify(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
