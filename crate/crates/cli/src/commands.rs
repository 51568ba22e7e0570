use std::error::Error as StdError;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use bollobas::search::{
    self, Finding, Mode, OrderingConstraint, RunOptions, SearchConfig, SearchRecord,
};
use bollobas::setpair::{
    self, has_exact_self_intersection, is_antichain, ClassificationReport, SetFamily, SetPairSystem,
    DEFAULT_MAX_GROUND,
};
use bollobas::subspace::{self, SubspacePairSystem};
use bollobas::Rational;

use crate::{GlobalArgs, Goal, Kind, ModeArg, OrderingArg, SearchArgs, SpaceArgs, Which};

type CmdResult = Result<u8, Box<dyn StdError>>;

const MAX_GROUND_VAR: &str = "SETPAIR_MAX_GROUND";

fn max_ground() -> Result<usize, Box<dyn StdError>> {
    match std::env::var(MAX_GROUND_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|e| format!("{MAX_GROUND_VAR}={v:?}: {e}").into()),
        Err(_) => Ok(DEFAULT_MAX_GROUND),
    }
}

fn read(path: &Path) -> Result<String, Box<dyn StdError>> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn write(path: &Path, text: &str) -> Result<(), Box<dyn StdError>> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn with_path(path: &Path, e: bollobas::Error) -> Box<dyn StdError> {
    format!("{}: {e}", path.display()).into()
}

fn read_sets(path: &Path) -> Result<SetPairSystem, Box<dyn StdError>> {
    SetPairSystem::from_json_with_cap(&read(path)?, max_ground()?).map_err(|e| with_path(path, e))
}

fn read_subspaces(path: &Path) -> Result<SubspacePairSystem, Box<dyn StdError>> {
    SubspacePairSystem::from_json(&read(path)?).map_err(|e| with_path(path, e))
}

/// Always `p/q`, so an exact 1 prints as `1/1`.
fn frac(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Writes to stdout, ignoring a closed pipe.
fn stdout(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit(g: &GlobalArgs, value: Value, text: String) {
    if g.json {
        stdout(&(serde_json::to_string_pretty(&value).expect("JSON values serialize") + "\n"));
    } else {
        stdout(&text);
    }
}

fn exceeds_one(r: &Rational) -> bool {
    *r > 1
}

pub fn classify(g: &GlobalArgs, path: &Path, t: usize, kind: Kind) -> CmdResult {
    let (report, m, kind_name) = match kind {
        Kind::Sets => {
            let s = read_sets(path)?;
            (setpair::classify(&s, t), s.m(), "sets")
        }
        Kind::Subspaces => {
            let s = read_subspaces(path)?;
            (subspace::classify_subspace(&s, t), s.m(), "subspaces")
        }
    };
    let text = classification_text(&report, m);
    let value = json!({ "kind": kind_name, "m": m, "verdict": report.verdict(), "report": report });
    emit(g, value, text);
    Ok(if report.strong { 0 } else { 1 })
}

fn classification_text(report: &ClassificationReport, m: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "verdict: {}", report.verdict());
    let _ = writeln!(out, "t: {}", report.t);
    let _ = writeln!(out, "pairs: {m}");
    let _ = writeln!(out, "self-intersections within t: {}", yes_no(report.self_ok));
    if report.witnesses.is_empty() {
        out.push_str("witnesses: none\n");
    } else {
        out.push_str("witnesses:\n");
        for w in &report.witnesses {
            let _ = writeln!(out, "  ({}, {}) meet {}", w.i, w.j, w.observed);
        }
    }
    out
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn sum(g: &GlobalArgs, path: &Path, t: usize, which: Which, kind: Kind) -> CmdResult {
    let mut notes = Vec::new();
    let value = match (kind, which) {
        (Kind::Sets, Which::Furedi) => setpair::furedi_sum(&read_sets(path)?, t)?,
        (Kind::Sets, Which::Zhu) => {
            let s = read_sets(path)?;
            if !has_exact_self_intersection(&s, t) {
                notes.push(format!("not every |A_i ∩ B_i| equals t = {t}"));
            }
            setpair::zhu_sum(&s, t)?
        }
        (Kind::Sets, Which::Lym) => {
            let fam = SetFamily::from_json_with_cap(&read(path)?, max_ground()?)
                .map_err(|e| with_path(path, e))?;
            if !is_antichain(&fam.members) {
                notes.push("family is not an antichain".to_string());
            }
            setpair::lym_sum(&fam.members, fam.ground_size)?
        }
        (Kind::Subspaces, Which::Furedi) => subspace::subspace_furedi_sum(&read_subspaces(path)?, t)?,
        (Kind::Subspaces, _) => return Err("only the furedi sum is defined for subspace systems".into()),
    };
    let name = match which {
        Which::Furedi => "furedi",
        Which::Zhu => "zhu",
        Which::Lym => "lym",
    };
    let over = exceeds_one(&value);
    let decimal = value.to_decimal_string(12);
    let mut text = format!("{name} sum: {}\ndecimal: {decimal}\nexceeds 1: {}\n", frac(&value), yes_no(over));
    for n in &notes {
        let _ = writeln!(text, "note: {n}");
    }
    let json = json!({
        "which": name,
        "t": t,
        "sum": frac(&value),
        "decimal": decimal,
        "exceeds_one": over,
        "notes": notes,
    });
    emit(g, json, text);
    Ok(if over { 1 } else { 0 })
}

fn write_or_print(g: &GlobalArgs, out: Option<&Path>, content: &str, summary: Value, text: String) -> CmdResult {
    match out {
        None => stdout(content),
        Some(p) => {
            write(p, content)?;
            emit(g, summary, text);
        }
    }
    Ok(0)
}

pub fn generate(g: &GlobalArgs, a: usize, b: usize, t: usize, out: Option<&Path>) -> CmdResult {
    let s = setpair::generate_sharp_system_with_cap(a, b, t, max_ground()?)?;
    let sum = setpair::furedi_sum(&s, t)?;
    let summary = json!({
        "out": out.map(|p| p.display().to_string()),
        "ground_size": s.ground_size(),
        "m": s.m(),
        "furedi_sum": frac(&sum),
    });
    let text = format!(
        "wrote {} pairs on [{}], furedi sum {}\n",
        s.m(),
        s.ground_size(),
        frac(&sum)
    );
    write_or_print(g, out, &s.to_json(), summary, text)
}

pub fn embed(g: &GlobalArgs, input: &Path, out: Option<&Path>) -> CmdResult {
    let s = read_sets(input)?;
    let e = subspace::embed_sets_as_coordinate_subspaces(&s);
    let summary = json!({
        "out": out.map(|p| p.display().to_string()),
        "ambient_dim": e.ambient_dim(),
        "m": e.m(),
    });
    let text = format!("wrote {} subspace pairs in dimension {}\n", e.m(), e.ambient_dim());
    write_or_print(g, out, &e.to_json(), summary, text)
}

pub fn reduce(g: &GlobalArgs, input: &Path, t: usize, out: Option<&Path>) -> CmdResult {
    let s = read_subspaces(input)?;
    let before = subspace::subspace_furedi_sum(&s, t)?;
    let red = subspace::reduce_to_zero_system(&s, t, g.seed)?;
    let after = subspace::subspace_furedi_sum(&red.system, 0)?;
    if let Some(p) = out {
        write(p, &red.system.to_json())?;
    }
    let dims: Vec<Value> = s
        .dims()
        .iter()
        .zip(red.system.dims())
        .map(|(&(u0, v0), (u1, v1))| json!({ "before": [u0, v0], "after": [u1, v1] }))
        .collect();
    let mut text = String::new();
    let _ = writeln!(text, "seed: {}", g.seed);
    let _ = writeln!(text, "t: {t}");
    let _ = writeln!(text, "ambient: {} (padded by {})", red.system.ambient_dim(), red.padded_by);
    let _ = writeln!(text, "W0 dimension: {}", red.w0.dim());
    let _ = writeln!(text, "attempts: {}", red.attempts);
    for (k, (&(u0, v0), (u1, v1))) in s.dims().iter().zip(red.system.dims()).enumerate() {
        let _ = writeln!(text, "pair {}: U {u0}→{u1}, V {v0}→{v1}", k + 1);
    }
    let _ = writeln!(text, "sum: {}→{}", frac(&before), frac(&after));
    let value = json!({
        "seed": g.seed,
        "t": t,
        "ambient_dim": red.system.ambient_dim(),
        "padded_by": red.padded_by,
        "w0_dim": red.w0.dim(),
        "attempts": red.attempts,
        "dims": dims,
        "sum_before": frac(&before),
        "sum_after": frac(&after),
        "out": out.map(|p| p.display().to_string()),
    });
    emit(g, value, text);
    Ok(0)
}

fn config_of(g: &GlobalArgs, a: &SpaceArgs) -> Result<SearchConfig, Box<dyn StdError>> {
    let mode = match a.mode {
        ModeArg::Strong => Mode::Strong,
        ModeArg::Skew => Mode::Skew,
    };
    let mut c = SearchConfig::new(a.n, a.t, mode);
    c.ordering = match a.ordering {
        OrderingArg::None => OrderingConstraint::None,
        OrderingArg::Monotone => OrderingConstraint::Monotone,
    };
    c.uniform_n = a.uniform_n;
    c.uniform_rs = a.uniform_rs;
    c.exact_self_intersection = a.exact_self;
    if let Some(m) = a.max_pairs {
        c.max_pairs = m;
    }
    c.node_budget = a.node_budget;
    c.pruning = !a.no_prune;
    c.seed = g.seed;
    c.time_budget = g.time_budget;
    c.workers = g.workers;
    c.validate()?;
    Ok(c)
}

/// Prints `completed/total` to stderr at most a few times per second.
struct Progress {
    last: Mutex<Option<Instant>>,
}

impl Progress {
    fn new() -> Self {
        Progress { last: Mutex::new(None) }
    }

    fn report(&self, done: usize, total: usize) {
        let mut last = self.last.lock().unwrap_or_else(|e| e.into_inner());
        let due = last.is_none_or(|t| t.elapsed() >= Duration::from_millis(250));
        if due || done == total {
            eprintln!("progress: {done}/{total} branches");
            *last = Some(Instant::now());
        }
    }
}

fn run_options<'a>(g: &GlobalArgs, progress: &'a (dyn Fn(usize, usize) + Sync)) -> Result<RunOptions<'a>, Box<dyn StdError>> {
    if !(g.checkpoint_every.is_finite() && g.checkpoint_every >= 0.0) {
        return Err(format!("--checkpoint-every {} is not a non-negative number", g.checkpoint_every).into());
    }
    Ok(RunOptions {
        checkpoint: g.checkpoint.clone(),
        checkpoint_every: Duration::from_secs_f64(g.checkpoint_every),
        resume: true,
        progress: Some(progress),
    })
}

fn record_text(config: &SearchConfig, record: &SearchRecord) -> String {
    let mut out = String::new();
    let mode = match config.mode {
        Mode::Strong => "strong",
        Mode::Skew => "skew",
    };
    let _ = writeln!(out, "mode: {mode}, n: {}, t: {}, seed: {}", config.ground_size, config.t, config.seed);
    let _ = writeln!(out, "systems enumerated: {}", record.systems_enumerated);
    let _ = writeln!(out, "nodes pruned: {}", record.nodes_pruned);
    let _ = writeln!(out, "exhausted: {}", record.exhausted);
    let _ = writeln!(
        out,
        "best sum: {} ({}) with {} pairs",
        frac(&record.best_sum),
        record.best_sum.to_decimal_string(6),
        record.best_system.m()
    );
    out
}

pub fn search(g: &GlobalArgs, args: &SearchArgs) -> CmdResult {
    let config = config_of(g, &args.space)?;
    let progress = Progress::new();
    let report = |d, t| progress.report(d, t);
    let opts = run_options(g, &report)?;
    let (record, witness) = match args.goal {
        Goal::Max => (search::max_furedi_sum_with(&config, &opts)?, None),
        Goal::Violation => search::find_skew_violation_with(&config, &opts)?,
    };
    if let Some(p) = &args.record {
        write(p, &(serde_json::to_string_pretty(&record)? + "\n"))?;
    }
    let (finding, system) = match args.goal {
        Goal::Max => (exceeds_one(&record.best_sum), Some(&record.best_system)),
        Goal::Violation => (witness.is_some(), witness.as_ref()),
    };
    if let (Some(p), Some(s)) = (&args.out, system) {
        write(p, &s.to_json())?;
    }
    let mut text = record_text(&config, &record);
    let witness_sum = witness.as_ref().map(|w| setpair::furedi_sum(w, 0)).transpose()?;
    match (&witness, &witness_sum) {
        (Some(w), Some(s)) => {
            let _ = writeln!(text, "witness: {} pairs, sum {}", w.m(), frac(s));
            text.push_str(&w.to_json());
        }
        _ if args.goal == Goal::Violation => text.push_str("witness: none\n"),
        _ => {}
    }
    let _ = writeln!(text, "finding: {}", yes_no(finding));
    let value = json!({
        "config": config,
        "record": record,
        "witness": witness,
        "witness_sum": witness_sum.as_ref().map(frac),
        "finding": finding,
    });
    emit(g, value, text);
    Ok(if finding { 1 } else { 0 })
}

pub fn verify_corpus(g: &GlobalArgs, space: &SpaceArgs, findings: Option<&Path>, report_path: Option<&Path>) -> CmdResult {
    let config = config_of(g, space)?;
    let progress = Progress::new();
    let report_fn = |d, t| progress.report(d, t);
    let opts = run_options(g, &report_fn)?;
    let report = search::verify_corpus_with(&config, &opts)?;
    let found: Vec<Finding> = report
        .violations()
        .iter()
        .map(|v| Finding::from_violation(v, &config))
        .collect();
    if let Some(p) = findings {
        write(p, &(serde_json::to_string_pretty(&found)? + "\n"))?;
    }
    if let Some(p) = report_path {
        write(p, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    let tally = &report.tally;
    let mut text = record_text(&config, &report.record);
    let _ = writeln!(text, "systems checked: {}", tally.checked);
    for (statement, count) in &tally.checks {
        let kind = if statement.is_conjecture() { "conjecture" } else { "theorem" };
        let _ = writeln!(text, "  {} ({kind}): {count}", statement.name());
    }
    let _ = writeln!(text, "violations: {}", tally.violation_count);
    for v in report.violations() {
        let _ = writeln!(text, "  {}: {} > {}", v.statement.name(), frac(&v.value), frac(&v.bound));
    }
    let _ = writeln!(text, "spot checks: {} ({} failed)", tally.spot_checked, tally.soundness_failures);
    let value = json!({ "report": report, "findings": found });
    emit(g, value, text);
    if tally.soundness_failures > 0 {
        return Err(format!("{} spot checks disagreed with the search", tally.soundness_failures).into());
    }
    Ok(if tally.violation_count > 0 { 1 } else { 0 })
}
