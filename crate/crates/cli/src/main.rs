//! `eslmc`: command-line front end.
//!
//! Exit codes: 0 true or satisfiable, 1 false or unsatisfiable, 2 usage or
//! validation error, 3 strategy-space cap exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eslmc_core::checker::{check_with, CheckOptions, Closure, Report};
use eslmc_core::eval::{EvalConfig, EvalError, Evaluator};
use eslmc_core::model::{load_model, Ecgm, LoadError};
use eslmc_core::qptl::{self, QptlError, QptlVerdict};
use eslmc_core::strategy::{
    feasible_windows, StrategyError, StrategyLayout, StrategyMode, DEFAULT_CAP,
};
use eslmc_core::{parse_formula, Formula};
use serde_json::json;

#[derive(Parser)]
#[command(name = "eslmc", version, about = "Model checker for epistemic strategy logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a formula at the initial state of a model.
    Check(CheckArgs),
    /// Validate a model file and summarise it.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Print reachable states and strategy counts.
    Info {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        recall: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Decide satisfiability of a QPTL formula through model checking.
    QptlSat(QptlArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Perfect,
    Uniform,
}

impl From<ModeArg> for StrategyMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Perfect => StrategyMode::Perfect,
            ModeArg::Uniform => StrategyMode::Uniform,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ClosureArg {
    Existential,
    Universal,
}

#[derive(Args)]
struct Engine {
    /// Recall bound γ of all strategies.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    recall: u64,
    /// Largest strategy space a single quantifier may range over.
    #[arg(long, env = "ESLMC_CAP", default_value_t = DEFAULT_CAP)]
    cap: u128,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=256))]
    jobs: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Print evaluation statistics to stderr.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, conflicts_with = "formula_file", required_unless_present = "formula_file")]
    formula: Option<String>,
    #[arg(long)]
    formula_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Perfect)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = ClosureArg::Existential)]
    closure: ClosureArg,
    /// Print witness strategy tables.
    #[arg(long)]
    witness: bool,
    /// Disable memoization.
    #[arg(long)]
    no_cache: bool,
    #[command(flatten)]
    engine: Engine,
}

#[derive(Args)]
struct QptlArgs {
    #[arg(long)]
    formula: String,
    /// Comma-separated propositions; defaults to those in the formula.
    #[arg(long, value_delimiter = ',')]
    props: Vec<String>,
    #[command(flatten)]
    engine: Engine,
}

enum Failure {
    Usage(String),
    Cap(String),
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Strategy(StrategyError::SearchSpaceExceeded { .. }) => {
                Failure::Cap(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<QptlError> for Failure {
    fn from(e: QptlError) -> Self {
        match e {
            QptlError::Eval(e) => e.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check(args) => check(args),
        Command::Validate { model } => validate(&model),
        Command::Info {
            model,
            recall,
            format,
        } => info(&model, recall as usize, format),
        Command::QptlSat(args) => qptl_sat(args),
    };
    match outcome {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load(path: &PathBuf) -> Result<Ecgm, Failure> {
    match load_model(path) {
        Ok((model, warnings)) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            Ok(model)
        }
        Err(LoadError::Invalid(errors)) => {
            let lines: Vec<String> = errors.errors().iter().map(|e| format!("  {e}")).collect();
            Err(Failure::Usage(format!(
                "invalid model {}:\n{}",
                path.display(),
                lines.join("\n")
            )))
        }
        Err(e) => Err(Failure::Usage(format!("{}: {e}", path.display()))),
    }
}

fn config(engine: &Engine, mode: StrategyMode, cache: bool) -> EvalConfig {
    EvalConfig {
        recall: engine.recall as usize,
        mode,
        cap: engine.cap,
        cache,
        jobs: engine.jobs as usize,
    }
}

fn check(args: CheckArgs) -> Result<bool, Failure> {
    let model = load(&args.model)?;
    let text = match (&args.formula, &args.formula_file) {
        (Some(f), _) => f.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        (None, None) => unreachable!("clap requires one of the two"),
    };
    let roster = model.agent_names();
    let phi: Formula = parse_formula(text.trim(), &roster).map_err(|e| Failure::Usage(e.to_string()))?;
    let cfg = config(&args.engine, args.mode.into(), !args.no_cache);
    let ev = Evaluator::new(&model, cfg)?;
    let opts = CheckOptions {
        closure: match args.closure {
            ClosureArg::Existential => Closure::Existential,
            ClosureArg::Universal => Closure::Universal,
        },
        witness: args.witness || args.engine.format == Format::Json,
    };
    let verdict = check_with(&ev, &phi, opts)?;
    let report = Report::new(&ev, &phi, opts, &verdict);
    match args.engine.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text(args.witness)),
    }
    if args.engine.stats {
        let s = verdict.stats;
        eprintln!(
            "stats: evaluations {} cache hits {} branches {} runs {} time {:.3?}",
            s.evaluations, s.cache_hits, s.branches, s.runs, verdict.wall_time
        );
    }
    Ok(verdict.result)
}

fn validate(path: &PathBuf) -> Result<bool, Failure> {
    let model = load(path)?;
    println!(
        "{} agents, {} reachable states",
        model.num_agents(),
        model.num_states()
    );
    Ok(true)
}

fn info(path: &PathBuf, recall: usize, format: Format) -> Result<bool, Failure> {
    let model = load(path)?;
    let windows = feasible_windows(&model, recall).map_err(|e| Failure::Usage(e.to_string()))?;
    let count = |agent, mode| {
        StrategyLayout::new(&model, &windows, agent, mode)
            .space_size()
            .map_or_else(|| "overflow".to_string(), |n| n.to_string())
    };
    let states: Vec<String> = model
        .reachable_states()
        .iter()
        .map(|s| model.state_label(s))
        .collect();
    let strategies: Vec<(String, String, String)> = (0..model.num_agents())
        .map(|i| {
            (
                model.agent(i).name.clone(),
                count(i, StrategyMode::Perfect),
                count(i, StrategyMode::Uniform),
            )
        })
        .collect();
    match format {
        Format::Json => {
            let report = json!({
                "agents": model.num_agents(),
                "states": states,
                "edges": model.edge_count(),
                "recall": recall,
                "windows": windows.len(),
                "strategies": strategies
                    .iter()
                    .map(|(a, p, u)| json!({"agent": a, "perfect": p, "uniform": u}))
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("json"));
        }
        Format::Text => {
            println!(
                "{} agents, {} reachable states, {} edges",
                model.num_agents(),
                model.num_states(),
                model.edge_count()
            );
            println!("states:");
            for s in &states {
                println!("  {s}");
            }
            println!("recall {recall}: {} feasible windows", windows.len());
            println!("strategies:");
            for (a, p, u) in &strategies {
                println!("  {a}: {p} perfect, {u} uniform");
            }
        }
    }
    Ok(true)
}

fn qptl_sat(args: QptlArgs) -> Result<bool, Failure> {
    let phi = qptl::parse_qptl(&args.formula)?;
    let props = if args.props.is_empty() {
        phi.propositions()
    } else {
        args.props.clone()
    };
    let cfg = config(&args.engine, StrategyMode::Perfect, true);
    let outcome = qptl::qptl_sat(&phi, &props, cfg)?;
    match args.engine.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&outcome).expect("json")
        ),
        Format::Text => {
            println!("formula: {}", outcome.formula);
            println!("translated: {}", outcome.translated);
            println!("verdict: {}", outcome.verdict.label());
            match &outcome.verdict {
                QptlVerdict::Sat { evaluation } | QptlVerdict::Unconfirmed { evaluation, .. } => {
                    for (p, w) in &evaluation.words {
                        println!("  {p}: {w}");
                    }
                }
                QptlVerdict::Unsat { .. } => {}
            }
        }
    }
    Ok(outcome.verdict.is_sat())
}
