//! Command-line interface.
//!
//! Exit codes: 0 success, 1 usage, 2 parse or validation failure,
//! 3 budget exceeded, 4 internal error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use vse_core::groebner::{self, BasisConfig, BasisLevel, GroebnerBasis};
use vse_core::invariant::{self, EtaError, InvariantContext, OracleError};
use vse_core::reference;
use vse_core::statesum::{self, Level};
use vse_core::{LinkDiagram, Verdict};

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "vse",
    about = "State-sum invariants of link diagrams via the 3-fold shaded expansion",
    version
)]
struct Cli {
    /// Override the state budget for full expansions (default 3^14).
    #[arg(long, global = true, value_name = "N")]
    max_states: Option<BigUint>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the state sum of a link diagram.
    Statesum(StatesumArgs),
    /// Print the invariant: the normal form of the state sum at a level.
    Eta(EtaArgs),
    /// Compare two diagrams by their invariants at a level.
    Compare(CompareArgs),
    /// Print the move-relation generators (27 polynomials).
    Relations(RelationsArgs),
    /// Compute (and cache) the basis for a level.
    Gb(GbArgs),
    /// Print the bracket specialization of the full state sum.
    Bracket(BracketArgs),
    /// Print the number of states of an n-crossing diagram at level k.
    Count(CountArgs),
}

#[derive(Args)]
struct StatesumArgs {
    /// Link file.
    #[arg(long, value_name = "FILE")]
    link: PathBuf,
    /// Truncation level.
    #[arg(long, value_name = "K", conflicts_with = "full")]
    k: Option<u32>,
    /// Full 3^n expansion.
    #[arg(long)]
    full: bool,
}

#[derive(Args)]
struct EtaArgs {
    /// Link file.
    #[arg(long, value_name = "FILE")]
    link: PathBuf,
    /// Level: a non-negative integer or `inf`.
    #[arg(long, value_name = "K|inf", value_parser = parse_level)]
    k: BasisLevel,
}

#[derive(Args)]
struct CompareArgs {
    /// First link file.
    #[arg(long, value_name = "FILE")]
    a: PathBuf,
    /// Second link file.
    #[arg(long, value_name = "FILE")]
    b: PathBuf,
    /// Level: a non-negative integer or `inf`.
    #[arg(long, value_name = "K|inf", value_parser = parse_level)]
    k: BasisLevel,
}

#[derive(Args)]
struct RelationsArgs {
    /// Write to a file instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GbArgs {
    /// Level: a non-negative integer or `inf`.
    #[arg(long, value_name = "K|inf", value_parser = parse_level)]
    k: BasisLevel,
    /// Write the basis to a file instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Check mutual ideal membership against a polynomial-list file.
    #[arg(long, value_name = "FILE")]
    verify_reference: Option<PathBuf>,
}

#[derive(Args)]
struct BracketArgs {
    /// Link file.
    #[arg(long, value_name = "FILE")]
    link: PathBuf,
    /// Cross-check against the independent 2^n bracket oracle.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct CountArgs {
    /// Crossing count.
    #[arg(long)]
    n: u64,
    /// Truncation level.
    #[arg(long)]
    k: u32,
}

fn parse_level(s: &str) -> Result<BasisLevel, String> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(BasisLevel::Inf);
    }
    s.parse::<u32>()
        .map(BasisLevel::K)
        .map_err(|_| format!("expected a non-negative integer or 'inf', got '{s}'"))
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<EtaError> for Failure {
    fn from(e: EtaError) -> Failure {
        let code = match &e {
            EtaError::StateSum(_) => EXIT_PARSE,
            EtaError::StateBudget { .. } => EXIT_BUDGET,
            EtaError::Groebner(g) => groebner_code(g),
        };
        Failure::new(code, e.to_string())
    }
}

fn groebner_code(e: &groebner::GroebnerError) -> u8 {
    match e {
        groebner::GroebnerError::BudgetExceeded(_) => EXIT_BUDGET,
        groebner::GroebnerError::CacheParse { .. } | groebner::GroebnerError::CacheFormat { .. } => {
            EXIT_PARSE
        }
        _ => EXIT_INTERNAL,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            // clap renders its own message
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let context = {
        let mut ctx = InvariantContext::new(BasisConfig::default());
        if let Some(budget) = cli.max_states.clone() {
            ctx = ctx.with_state_budget(budget);
        }
        ctx
    };

    let result = match &cli.command {
        Command::Statesum(args) => cmd_statesum(args, &cli),
        Command::Eta(args) => cmd_eta(args, &context),
        Command::Compare(args) => cmd_compare(args, &context),
        Command::Relations(args) => cmd_relations(args),
        Command::Gb(args) => cmd_gb(args, &context),
        Command::Bracket(args) => cmd_bracket(args, &cli),
        Command::Count(args) => cmd_count(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_link(path: &Path) -> Result<LinkDiagram, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Failure::new(EXIT_PARSE, format!("cannot read {}: {e}", path.display()))
    })?;
    let diagram = LinkDiagram::parse(&text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let report = diagram.validate();
    if !report.is_ok() {
        return Err(Failure::new(
            EXIT_PARSE,
            format!("{}: invalid diagram: {report}", path.display()),
        ));
    }
    Ok(diagram)
}

fn state_budget(cli: &Cli) -> BigUint {
    cli.max_states
        .clone()
        .unwrap_or_else(invariant::default_state_budget)
}

fn check_budget(n: u64, level: Level, budget: &BigUint) -> Result<BigUint, Failure> {
    let states = statesum::count_states(n, level);
    if states > *budget {
        return Err(Failure::new(
            EXIT_BUDGET,
            format!("{states} states exceeds the budget of {budget} (use a smaller k or --max-states)"),
        ));
    }
    Ok(states)
}

fn cmd_statesum(args: &StatesumArgs, cli: &Cli) -> Result<(), Failure> {
    let level = match (args.k, args.full) {
        (Some(k), false) => Level::K(k),
        (None, true) => Level::Full,
        (None, false) => {
            return Err(Failure::new(EXIT_USAGE, "one of --k or --full is required"))
        }
        (Some(_), true) => unreachable!("clap conflict"),
    };
    let diagram = load_link(&args.link)?;
    check_budget(diagram.crossing_count() as u64, level, &state_budget(cli))?;
    let sum = statesum::state_sum(&diagram, level)
        .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
    println!("{sum}");
    Ok(())
}

fn cmd_eta(args: &EtaArgs, context: &InvariantContext) -> Result<(), Failure> {
    let diagram = load_link(&args.link)?;
    let id = args.link.display().to_string();
    let result = context.eta(&id, &diagram, args.k)?;
    println!("{}", result.value);
    println!("states: {}", result.state_count);
    if result.provisional_basis {
        println!("basis: provisional (reference fallback)");
    }
    Ok(())
}

fn cmd_compare(args: &CompareArgs, context: &InvariantContext) -> Result<(), Failure> {
    let da = load_link(&args.a)?;
    let db = load_link(&args.b)?;
    let comparison = context.compare(
        (&args.a.display().to_string(), &da),
        (&args.b.display().to_string(), &db),
        args.k,
    )?;
    println!("verdict: {}", comparison.verdict);
    println!("a: {}", comparison.first.value);
    println!("b: {}", comparison.second.value);
    if comparison.verdict == Verdict::EqualAtLevel {
        println!("note: equality at a level does not certify link equivalence");
    }
    Ok(())
}

fn cmd_relations(args: &RelationsArgs) -> Result<(), Failure> {
    let mut out = String::new();
    for r in vse_core::relations::generate_all_relations() {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    match &args.out {
        Some(path) => std::fs::write(path, out).map_err(|e| {
            Failure::new(EXIT_INTERNAL, format!("cannot write {}: {e}", path.display()))
        })?,
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_gb(args: &GbArgs, context: &InvariantContext) -> Result<(), Failure> {
    let basis = context
        .basis(args.k)
        .map_err(|e| Failure::new(groebner_code(&e), e.to_string()))?;
    let rendered = groebner::format_cache(&basis);
    match &args.out {
        Some(path) => std::fs::write(path, &rendered).map_err(|e| {
            Failure::new(EXIT_INTERNAL, format!("cannot write {}: {e}", path.display()))
        })?,
        None => print!("{rendered}"),
    }
    if basis.provisional {
        println!("basis: provisional (reference fallback)");
    }
    if let Some(ref_path) = &args.verify_reference {
        let text = std::fs::read_to_string(ref_path).map_err(|e| {
            Failure::new(EXIT_PARSE, format!("cannot read {}: {e}", ref_path.display()))
        })?;
        let reference = reference::parse_reference_list(&text)
            .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", ref_path.display())))?;
        let report = groebner::verify_against_reference(&basis, &reference);
        print_verify_report(&basis, &report);
        if !report.all_pass() {
            return Err(Failure::new(EXIT_PARSE, "reference verification failed"));
        }
    }
    Ok(())
}

fn print_verify_report(basis: &GroebnerBasis, report: &groebner::VerifyReport) {
    for (i, ok) in report.reference_in_basis.iter().enumerate() {
        println!(
            "reference[{}] reduces to 0 mod basis: {}",
            i + 1,
            if *ok { "ok" } else { "FAIL" }
        );
    }
    for (j, ok) in report.basis_in_reference.iter().enumerate() {
        println!(
            "basis[{}] (lm {}) reduces to 0 mod reference: {}",
            j + 1,
            basis.polys[j]
                .leading_monomial()
                .map(|m| m.to_string())
                .unwrap_or_else(|| "0".into()),
            if *ok { "ok" } else { "FAIL" }
        );
    }
    println!(
        "verify: {}",
        if report.all_pass() { "all-pass" } else { "FAILED" }
    );
}

fn cmd_bracket(args: &BracketArgs, cli: &Cli) -> Result<(), Failure> {
    let diagram = load_link(&args.link)?;
    let n = diagram.crossing_count() as u64;
    check_budget(n, Level::Full, &state_budget(cli))?;
    let sum = statesum::state_sum(&diagram, Level::Full)
        .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
    let specialized = invariant::bracket_specialize(&sum);
    println!("{specialized}");
    if args.oracle {
        let oracle = invariant::kauffman_bracket_oracle(&diagram, invariant::DEFAULT_ORACLE_BUDGET)
            .map_err(|e| match e {
                OracleError::Budget { .. } => Failure::new(EXIT_BUDGET, e.to_string()),
                OracleError::InvalidDiagram(_) => Failure::new(EXIT_PARSE, e.to_string()),
            })?;
        if oracle == specialized {
            println!("oracle: match");
        } else {
            println!("oracle: MISMATCH {oracle}");
            return Err(Failure::new(
                EXIT_INTERNAL,
                "bracket oracle disagrees with the specialized state sum",
            ));
        }
    }
    Ok(())
}

fn cmd_count(args: &CountArgs) -> Result<(), Failure> {
    println!("{}", statesum::count_states(args.n, Level::K(args.k)));
    Ok(())
}
