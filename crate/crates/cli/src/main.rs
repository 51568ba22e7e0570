//! `bollobas`: verify set-pair and subspace-pair systems, evaluate their
//! sums, generate constructions and run exhaustive searches.
//!
//! Exit codes: 0 when the checked inequality holds (or nothing was found),
//! 1 for a mathematical finding (a sum above 1, a violation, a system that
//! is not strong), 2 for usage and input errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bollobas", version, about = "Set-pair and subspace-pair system toolkit")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct GlobalArgs {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Search worker threads; 0 uses every available core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Wall-clock budget for searches, in seconds.
    #[arg(long, global = true)]
    pub time_budget: Option<f64>,
    /// Checkpoint file for searches; an existing file is resumed.
    #[arg(long, global = true)]
    pub checkpoint: Option<PathBuf>,
    /// Seconds between checkpoint writes.
    #[arg(long, global = true, default_value_t = 30.0)]
    pub checkpoint_every: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a system as strong, skew or neither.
    Classify {
        path: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long, value_enum, default_value_t = Kind::Sets)]
        kind: Kind,
    },
    /// Evaluate a sum exactly.
    Sum {
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        t: usize,
        #[arg(long, value_enum, default_value_t = Which::Furedi)]
        which: Which,
        #[arg(long, value_enum, default_value_t = Kind::Sets)]
        kind: Kind,
    },
    /// Write the sharp construction for (a, b, t).
    Generate {
        a: usize,
        b: usize,
        t: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed a set-pair system as coordinate subspaces.
    Embed {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a subspace t-system to a 0-system.
    Reduce {
        input: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive search over systems on a small ground set.
    Search(SearchArgs),
    /// Check every applicable inequality on every enumerated system.
    VerifyCorpus {
        #[command(flatten)]
        space: SpaceArgs,
        /// Write violations as a JSON array of findings.
        #[arg(long)]
        findings: Option<PathBuf>,
        /// Write the full corpus report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Sets,
    Subspaces,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Furedi,
    Zhu,
    Lym,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strong,
    Skew,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderingArg {
    None,
    Monotone,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Goal {
    /// Maximum Füredi sum over the space.
    Max,
    /// Smallest skew 0-system with sum above 1.
    Violation,
}

#[derive(Args, Clone)]
pub struct SpaceArgs {
    /// Ground set size.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub t: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Strong)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = OrderingArg::None)]
    pub ordering: OrderingArg,
    /// Require |A_i| + |B_i| = N.
    #[arg(long)]
    pub uniform_n: Option<usize>,
    /// Require (|A_i|, |B_i|) = (R, S), given as R,S.
    #[arg(long, value_parser = parse_rs)]
    pub uniform_rs: Option<(usize, usize)>,
    /// Require |A_i ∩ B_i| = t exactly.
    #[arg(long)]
    pub exact_self: bool,
    #[arg(long)]
    pub max_pairs: Option<usize>,
    #[arg(long)]
    pub node_budget: Option<u64>,
    /// Walk the unpruned tree (cross-check only; much slower).
    #[arg(long)]
    pub no_prune: bool,
}

#[derive(Args, Clone)]
pub struct SearchArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, value_enum, default_value_t = Goal::Max)]
    pub goal: Goal,
    /// Write the best system (or the witness) as a set-pair file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the search record as JSON.
    #[arg(long)]
    pub record: Option<PathBuf>,
}

fn parse_rs(s: &str) -> Result<(usize, usize), String> {
    let (r, t) = s.split_once(',').ok_or_else(|| format!("expected R,S, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(r)?, parse(t)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match cli.command {
        Command::Classify { path, t, kind } => commands::classify(g, &path, t, kind),
        Command::Sum { path, t, which, kind } => commands::sum(g, &path, t, which, kind),
        Command::Generate { a, b, t, out } => commands::generate(g, a, b, t, out.as_deref()),
        Command::Embed { input, out } => commands::embed(g, &input, out.as_deref()),
        Command::Reduce { input, t, out } => commands::reduce(g, &input, t, out.as_deref()),
        Command::Search(args) => commands::search(g, &args),
        Command::VerifyCorpus { space, findings, report } => {
            commands::verify_corpus(g, &space, findings.as_deref(), report.as_deref())
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
