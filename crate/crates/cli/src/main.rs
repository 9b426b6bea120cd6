use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use rpn_geodesics::acceptance;
use rpn_geodesics::exact::parse_rational;
use rpn_geodesics::homology::{resonance_check, resonance_check_bumpy, BettiTable, ResonanceReport};
use rpn_geodesics::interval::{kronecker_scan, KroneckerOutcome, Rank1Model};
use rpn_geodesics::iteration::{mean_index, IndexSequence};
use rpn_geodesics::normal_form::GeodesicModel;
use rpn_geodesics::obstruction::obstruction_scenario;
use rpn_geodesics::systems::{classify, effective_difference_number, reduce, IrrationalSystem, Reduction};
use rpn_geodesics::{Error, ErrorKind, ExactReal, Rational};

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 3;
const EXIT_PRECONDITION: u8 = 4;
const EXIT_BUDGET: u8 = 5;

#[derive(Parser)]
#[command(name = "rpn-geodesics", version, about = "Index iteration and irrational-system tools for closed geodesics on RP^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Index and nullity of the iterates of a geodesic model.
    Index {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        max_m: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Betti numbers of the non-contractible loop space component.
    Betti {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        n: u32,
        #[arg(long, default_value_t = 20)]
        max_q: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Exact residual of the resonance identity for a family of geodesics.
    Resonance {
        #[arg(long)]
        models: PathBuf,
    },
    /// Effective difference number of a rank-one system.
    Edn {
        #[arg(long)]
        system: PathBuf,
    },
    /// Reduce a rank-one system to unit coefficients.
    Reduce {
        #[arg(long)]
        system: PathBuf,
        /// Include every intermediate system.
        #[arg(long)]
        trace: bool,
    },
    /// Smallest m with every {m theta_i} inside the given open box.
    Kronecker {
        /// Comma-separated generators, e.g. "sqrt(2) - 1,sqrt(3)".
        #[arg(long)]
        thetas: String,
        /// One "lo,hi" side per generator.
        #[arg(long = "box", required = true)]
        boxes: Vec<String>,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
    },
    /// Run the single-geodesic contradiction pipeline on a rank-one model.
    Obstruction {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
    },
    /// Run every acceptance check and print a pass/fail line for each.
    Selftest,
}

#[derive(Debug)]
enum CliError {
    Io(PathBuf, std::io::Error),
    Core(Error),
    SelftestFailed(usize),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(..) | CliError::SelftestFailed(_) => EXIT_FAILURE,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Parse => EXIT_PARSE,
                ErrorKind::Precondition => EXIT_PRECONDITION,
                ErrorKind::BudgetExhausted => EXIT_BUDGET,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(path, e) => write!(f, "cannot read {}: {e}", path.display()),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::SelftestFailed(n) => write!(f, "{n} acceptance check(s) failed"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_owned(), e))
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize") + "\n"
}

#[derive(Serialize)]
struct IndexRow {
    m: u64,
    index: i64,
    nullity: i64,
}

#[derive(Serialize)]
struct IndexReport {
    mean_index: ExactReal,
    iterates: Vec<IndexRow>,
}

fn run_index(model: &Path, max_m: u64, format: Format) -> CliResult<String> {
    let g = GeodesicModel::from_json(&read(model)?)?;
    let mean = mean_index(&g)?;
    let rows = IndexSequence::new(g)?.table(max_m)?;
    let iterates: Vec<IndexRow> = rows.into_iter().map(|(m, index, nullity)| IndexRow { m, index, nullity }).collect();
    Ok(match format {
        Format::Json => json(&IndexReport { mean_index: mean, iterates }),
        Format::Csv => {
            let mut out = String::from("m,index,nullity\n");
            for r in &iterates {
                let _ = writeln!(out, "{},{},{}", r.m, r.index, r.nullity);
            }
            out
        }
    })
}

fn run_betti(n: u32, max_q: u64, format: Format) -> CliResult<String> {
    let table = BettiTable::new(n, max_q)?;
    Ok(match format {
        Format::Json => json(&table),
        Format::Csv => {
            let mut out = String::from("q,betti\n");
            for (q, b) in table.values.iter().enumerate() {
                let _ = writeln!(out, "{q},{b}");
            }
            out
        }
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ResonanceInput {
    n: u32,
    models: Vec<GeodesicModel>,
}

#[derive(Serialize)]
struct ResonanceOutput {
    full: ResonanceReport,
    /// Present when every model is bumpy.
    bumpy: Option<ResonanceReport>,
}

fn run_resonance(models: &Path) -> CliResult<String> {
    let input: ResonanceInput = serde_json::from_str(&read(models)?).map_err(|e| Error::Parse(e.to_string()))?;
    let full = resonance_check(&input.models, input.n)?;
    let bumpy = if input.models.iter().all(GeodesicModel::is_bumpy) {
        Some(resonance_check_bumpy(&input.models, input.n)?)
    } else {
        None
    };
    Ok(json(&ResonanceOutput { full, bumpy }))
}

#[derive(Serialize)]
struct EdnReport {
    effective_difference: u64,
    #[serde(with = "rpn_geodesics::exact::rational_serde")]
    witness: Rational,
    k0_plus: Vec<usize>,
    k0_minus: Vec<usize>,
    k1: Vec<usize>,
    coefficient_sum_zero: bool,
    #[serde(with = "rpn_geodesics::exact::rational_serde")]
    offset_sum: Rational,
    offset_condition: bool,
    /// Reduction steps, when the system meets both sum conditions.
    reduction: Option<Reduction>,
}

fn run_edn(system: &Path) -> CliResult<String> {
    let sys = IrrationalSystem::from_json(&read(system)?)?;
    let edn = effective_difference_number(&sys)?;
    let c = classify(&sys, &edn.witness)?;
    let reduction = if sys.check_preconditions().is_ok() { Some(reduce(&sys)?) } else { None };
    Ok(json(&EdnReport {
        effective_difference: edn.value,
        witness: edn.witness,
        k0_plus: c.k0_plus,
        k0_minus: c.k0_minus,
        k1: c.k1,
        coefficient_sum_zero: sys.coefficient_sums_vanish(),
        offset_sum: sys.offset_sum_fraction(),
        offset_condition: sys.offset_condition_holds(),
        reduction,
    }))
}

fn run_reduce(system: &Path, trace: bool) -> CliResult<String> {
    let sys = IrrationalSystem::from_json(&read(system)?)?;
    let mut red = reduce(&sys)?;
    if !trace {
        red.steps.clear();
    }
    Ok(json(&red))
}

fn parse_box(side: &str) -> CliResult<(Rational, Rational)> {
    let (lo, hi) = side
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("box side {side:?} is not of the form lo,hi")))?;
    Ok((parse_rational(lo.trim())?, parse_rational(hi.trim())?))
}

fn run_kronecker(thetas: &str, boxes: &[String], budget: u64) -> CliResult<String> {
    let thetas: Vec<ExactReal> = thetas.split(',').map(|t| t.trim().parse()).collect::<Result<_, _>>()?;
    let boxes: Vec<(Rational, Rational)> = boxes.iter().map(|b| parse_box(b)).collect::<CliResult<_>>()?;
    let outcome = kronecker_scan(&thetas, &boxes, budget)?;
    let out = json(&outcome);
    if let KroneckerOutcome::NotFound { scanned } = outcome {
        print!("{out}");
        return Err(Error::BudgetExhausted { budget, scanned }.into());
    }
    Ok(out)
}

fn run_obstruction(model: &Path, budget: u64) -> CliResult<String> {
    let model = Rank1Model::from_json(&read(model)?)?;
    Ok(json(&obstruction_scenario(&model, budget)?))
}

fn run_selftest() -> CliResult<String> {
    let outcomes = acceptance::run_all();
    let mut out = String::new();
    for o in &outcomes {
        let _ = writeln!(out, "{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        print!("{out}");
        return Err(CliError::SelftestFailed(failed));
    }
    Ok(out)
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Index { model, max_m, format } => run_index(&model, max_m, format),
        Command::Betti { n, max_q, format } => run_betti(n, max_q, format),
        Command::Resonance { models } => run_resonance(&models),
        Command::Edn { system } => run_edn(&system),
        Command::Reduce { system, trace } => run_reduce(&system, trace),
        Command::Kronecker { thetas, boxes, budget } => run_kronecker(&thetas, &boxes, budget),
        Command::Obstruction { model, budget } => run_obstruction(&model, budget),
        Command::Selftest => run_selftest(),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
