//! Exhaustive search over small set-pair systems.
//!
//! Candidate pairs `(A, B)` with `|A ∩ B| ≤ t` are enumerated up front and
//! sorted by `(|A|, A, |B|, B)`. Strong systems are then exactly the cliques
//! of the two-way compatibility graph (`|A_i ∩ B_j| > t` and
//! `|A_j ∩ B_i| > t`), enumerated as increasing index sets. Skew systems
//! are ordered sequences in which every earlier `A` meets every later `B`
//! in more than `t` elements.
//!
//! Every Füredi-type sum over these ground sets has a denominator dividing
//! one fixed integer `D` (the lcm of all binomials `C(k, j)` with
//! `k ≤ 2n`), so sums are carried exactly as integer multiples of `1/D`.
//!
//! The search tree is split at its first level into independent branches.
//! Branch results merge by exact maximum and counter addition, in branch
//! order, so parallel and sequential runs agree. A checkpoint records the
//! number of completed leading branches and their merged state.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num_integer::Integer;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bitset::ElementSet;
use crate::error::{Error, Result};
use crate::exact::{binomial_u, Rational};
use crate::setpair::{classify, furedi_sum, is_monotone_ordered, SetPair, SetPairSystem};

/// Largest ground set the exhaustive search accepts.
pub const MAX_SEARCH_GROUND: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strong,
    Skew,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderingConstraint {
    #[default]
    None,
    /// `|A_i|` nondecreasing and `|B_i|` nonincreasing along the sequence.
    Monotone,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub ground_size: usize,
    pub t: usize,
    pub mode: Mode,
    #[serde(default)]
    pub ordering: OrderingConstraint,
    /// Require `|A_i| + |B_i| = N` for every pair.
    #[serde(default)]
    pub uniform_n: Option<usize>,
    /// Require `(|A_i|, |B_i|) = (r, s)` for every pair.
    #[serde(default)]
    pub uniform_rs: Option<(usize, usize)>,
    /// Require `|A_i ∩ B_i| = t` exactly.
    #[serde(default)]
    pub exact_self_intersection: bool,
    pub max_pairs: usize,
    #[serde(default)]
    pub seed: u64,
    /// Wall-clock budget in seconds.
    #[serde(default)]
    pub time_budget: Option<f64>,
    /// Budget on search-tree nodes (deterministic when sequential).
    #[serde(default)]
    pub node_budget: Option<u64>,
    /// Disabling pruning walks every subset/sequence and filters at the
    /// nodes; only useful as a cross-check.
    #[serde(default = "default_true")]
    pub pruning: bool,
    /// Worker threads; 0 means all available cores, 1 is sequential.
    #[serde(default)]
    pub workers: usize,
}

fn default_true() -> bool {
    true
}

impl SearchConfig {
    pub fn new(ground_size: usize, t: usize, mode: Mode) -> Self {
        SearchConfig {
            ground_size,
            t,
            mode,
            ordering: OrderingConstraint::None,
            uniform_n: None,
            uniform_rs: None,
            exact_self_intersection: false,
            max_pairs: usize::MAX,
            seed: 0,
            time_budget: None,
            node_budget: None,
            pruning: true,
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ground_size == 0 || self.ground_size > MAX_SEARCH_GROUND {
            return Err(Error::InvalidConfig(format!(
                "ground_size must be in 1..={MAX_SEARCH_GROUND}, got {}",
                self.ground_size
            )));
        }
        if self.max_pairs == 0 {
            return Err(Error::InvalidConfig("max_pairs must be at least 1".into()));
        }
        if self.mode == Mode::Strong && self.ordering == OrderingConstraint::Monotone {
            return Err(Error::InvalidConfig(
                "the monotone ordering constraint only applies to skew mode".into(),
            ));
        }
        if let Some(b) = self.time_budget {
            if !(b.is_finite() && b >= 0.0) {
                return Err(Error::InvalidConfig(format!("time budget {b} is not a non-negative number")));
            }
        }
        Ok(())
    }

    /// The fields that determine the search space (everything except
    /// budgets and scheduling).
    fn space_key(&self) -> SearchConfig {
        SearchConfig {
            time_budget: None,
            node_budget: None,
            workers: 0,
            seed: 0,
            ..self.clone()
        }
    }
}

/// A candidate pair with its cached statistics.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub a: u64,
    pub b: u64,
    pub a_len: usize,
    pub b_len: usize,
    pub self_meet: usize,
}

impl Candidate {
    pub fn to_pair(&self) -> SetPair {
        SetPair::new(ElementSet::from_bits(self.a), ElementSet::from_bits(self.b))
    }
}

type Row = Vec<u64>;

fn row_set(row: &mut Row, i: usize) {
    row[i / 64] |= 1 << (i % 64);
}

fn row_get(row: &Row, i: usize) -> bool {
    row[i / 64] & (1 << (i % 64)) != 0
}

fn row_count(row: &Row) -> usize {
    row.iter().map(|w| w.count_ones() as usize).sum()
}

fn row_and(a: &Row, b: &Row) -> Row {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

/// Count of set bits at indices `> after`.
fn row_count_after(row: &Row, after: usize) -> usize {
    let start = after + 1;
    let mut total = 0;
    for (w, &word) in row.iter().enumerate() {
        let lo = w * 64;
        if lo + 64 <= start {
            continue;
        }
        let masked = if start > lo { word & (!0u64 << (start - lo)) } else { word };
        total += masked.count_ones() as usize;
    }
    total
}

fn row_ones_after(row: &Row, after: Option<usize>) -> impl Iterator<Item = usize> + '_ {
    let start = after.map_or(0, |a| a + 1);
    row.iter().enumerate().flat_map(move |(w, &word)| {
        let lo = w * 64;
        let mut rest = if lo + 64 <= start {
            0
        } else if start > lo {
            word & (!0u64 << (start - lo))
        } else {
            word
        };
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(lo + b)
        })
    })
}

/// Precomputed candidates, compatibility rows and exact weights.
pub struct SearchSpace {
    config: SearchConfig,
    candidates: Vec<Candidate>,
    /// `forward[i][j]`: `|A_i ∩ B_j| > t`.
    forward: Vec<Row>,
    /// Both directions; strong-mode adjacency.
    compat: Vec<Row>,
    /// `monotone[i][j]`: `j` may follow `i` under the ordering constraint.
    monotone: Vec<Row>,
    scale: u128,
    /// `weights[k][j] = scale / C(k, j)`.
    weights: Vec<Vec<u128>>,
}

impl SearchSpace {
    pub fn new(config: &SearchConfig) -> Result<Self> {
        config.validate()?;
        let n = config.ground_size;
        let t = config.t;
        let mut candidates = Vec::new();
        for a in 0u64..(1 << n) {
            for b in 0u64..(1 << n) {
                let a_len = a.count_ones() as usize;
                let b_len = b.count_ones() as usize;
                let self_meet = (a & b).count_ones() as usize;
                if self_meet > t || (config.exact_self_intersection && self_meet != t) {
                    continue;
                }
                if config.uniform_n.is_some_and(|big_n| a_len + b_len != big_n) {
                    continue;
                }
                if config.uniform_rs.is_some_and(|(r, s)| (a_len, b_len) != (r, s)) {
                    continue;
                }
                candidates.push(Candidate { a, b, a_len, b_len, self_meet });
            }
        }
        candidates.sort_by_key(|c| (c.a_len, c.a, c.b_len, c.b));

        let k = candidates.len();
        let words = k.div_ceil(64).max(1);
        let mut forward = vec![vec![0u64; words]; k];
        let mut monotone = vec![vec![0u64; words]; k];
        for (i, ci) in candidates.iter().enumerate() {
            for (j, cj) in candidates.iter().enumerate() {
                if (ci.a & cj.b).count_ones() as usize > t {
                    row_set(&mut forward[i], j);
                }
                if ci.a_len <= cj.a_len && ci.b_len >= cj.b_len {
                    row_set(&mut monotone[i], j);
                }
            }
        }
        let mut compat = vec![vec![0u64; words]; k];
        for i in 0..k {
            for j in 0..k {
                if row_get(&forward[i], j) && row_get(&forward[j], i) {
                    row_set(&mut compat[i], j);
                }
            }
        }
        let top = 2 * n;
        let mut scale: u128 = 1;
        for big in 0..=top {
            for j in 0..=big {
                let c: u128 = binomial_u(big as u64, j as i64).try_into().expect("small binomial");
                scale = scale.lcm(&c);
            }
        }
        let weights = (0..=top)
            .map(|big| {
                (0..=big)
                    .map(|j| {
                        let c: u128 = binomial_u(big as u64, j as i64).try_into().expect("small binomial");
                        scale / c
                    })
                    .collect()
            })
            .collect();

        Ok(SearchSpace {
            config: config.clone(),
            candidates,
            forward,
            compat,
            monotone,
            scale,
            weights,
        })
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    /// Common denominator of every sum in this space.
    pub fn scale(&self) -> u128 {
        self.scale
    }

    /// `scale / C(top, j)`; zero outside the binomial's support.
    pub fn weight(&self, top: usize, j: usize) -> u128 {
        self.weights.get(top).and_then(|row| row.get(j)).copied().unwrap_or(0)
    }

    /// Scaled `1 / C(a + b - 2t, a - t)`, or `None` if `a < t` or `b < t`.
    fn furedi_weight(&self, c: &Candidate) -> Option<u128> {
        let t = self.config.t;
        (c.a_len >= t && c.b_len >= t).then(|| self.weight(c.a_len + c.b_len - 2 * t, c.a_len - t))
    }

    pub fn to_rational(&self, scaled: u128) -> Rational {
        Rational::new(
            num_bigint::BigInt::from(scaled),
            num_bigint::BigInt::from(self.scale),
        )
        .expect("nonzero scale")
    }

    pub fn system_of(&self, indices: &[usize]) -> SetPairSystem {
        SetPairSystem::new(
            self.config.ground_size,
            indices.iter().map(|&i| self.candidates[i].to_pair()).collect(),
        )
        .expect("candidates lie in the ground set")
    }

    fn is_valid_extension(&self, chosen: &[usize], next: usize) -> bool {
        let c = &self.config;
        if chosen.contains(&next) {
            return false;
        }
        match c.mode {
            Mode::Strong => chosen.iter().all(|&i| row_get(&self.compat[i], next)),
            Mode::Skew => {
                chosen.iter().all(|&i| row_get(&self.forward[i], next))
                    && (c.ordering == OrderingConstraint::None
                        || chosen.last().is_none_or(|&l| row_get(&self.monotone[l], next)))
            }
        }
    }

    fn has_extension(&self, chosen: &[usize]) -> bool {
        (0..self.candidates.len()).any(|j| self.is_valid_extension(chosen, j))
    }
}

/// One system handed to a visitor.
pub struct SystemView<'a> {
    pub space: &'a SearchSpace,
    /// Candidate indices in list order.
    pub indices: &'a [usize],
    /// No candidate can be added (strong) or appended (skew), or the
    /// system already has `max_pairs` pairs.
    pub maximal: bool,
    /// Füredi sum as a multiple of `1 / space.scale()`; `None` when some
    /// pair has `|A| < t` or `|B| < t`.
    pub scaled_sum: Option<u128>,
}

impl SystemView<'_> {
    pub fn to_system(&self) -> SetPairSystem {
        self.space.system_of(self.indices)
    }

    pub fn furedi_sum(&self) -> Option<Rational> {
        self.scaled_sum.map(|s| self.space.to_rational(s))
    }

    pub fn pairs(&self) -> impl Iterator<Item = &Candidate> + '_ {
        self.indices.iter().map(|&i| &self.space.candidates[i])
    }
}

/// Per-branch accumulator. `merge` receives the state of a later branch.
pub trait Collector: Send {
    fn visit(&mut self, view: &SystemView<'_>);
    fn merge(&mut self, later: Self);
}

impl Collector for () {
    fn visit(&mut self, _view: &SystemView<'_>) {}
    fn merge(&mut self, _later: Self) {}
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub best_sum: Rational,
    pub best_system: SetPairSystem,
    pub systems_enumerated: u64,
    pub nodes_pruned: u64,
    pub exhausted: bool,
}

/// The mergeable core of a record: best kept as (scaled sum, indices).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
struct Tally {
    best_scaled: Option<u128>,
    best_indices: Vec<usize>,
    systems: u64,
    pruned: u64,
}

impl Tally {
    fn offer(&mut self, scaled: u128, indices: &[usize]) {
        let better = match self.best_scaled {
            None => true,
            Some(b) => scaled > b || (scaled == b && indices < self.best_indices.as_slice()),
        };
        if better {
            self.best_scaled = Some(scaled);
            self.best_indices = indices.to_vec();
        }
    }

    fn merge(&mut self, later: Tally) {
        if let Some(s) = later.best_scaled {
            self.offer(s, &later.best_indices);
        }
        self.systems += later.systems;
        self.pruned += later.pruned;
    }

    fn to_record(&self, space: &SearchSpace, exhausted: bool) -> SearchRecord {
        SearchRecord {
            best_sum: space.to_rational(self.best_scaled.unwrap_or(0)),
            best_system: space.system_of(&self.best_indices),
            systems_enumerated: self.systems,
            nodes_pruned: self.pruned,
            exhausted,
        }
    }
}

struct Budget {
    start: Instant,
    time: Option<Duration>,
    nodes: Option<u64>,
    node_count: AtomicU64,
    stop: AtomicBool,
}

impl Budget {
    fn new(config: &SearchConfig) -> Self {
        Budget {
            start: Instant::now(),
            time: config.time_budget.map(Duration::from_secs_f64),
            nodes: config.node_budget,
            node_count: AtomicU64::new(0),
            stop: AtomicBool::new(false),
        }
    }

    /// Registers one node; returns false once the budget is spent.
    fn tick(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return false;
        }
        let n = self.node_count.fetch_add(1, Ordering::Relaxed) + 1;
        let over_nodes = self.nodes.is_some_and(|limit| n > limit);
        let over_time = n.is_multiple_of(256) && self.time.is_some_and(|limit| self.start.elapsed() >= limit);
        if over_nodes || over_time {
            self.stop.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }
}

struct Walker<'a, C> {
    space: &'a SearchSpace,
    budget: &'a Budget,
    tally: Tally,
    collector: C,
    chosen: Vec<usize>,
    cut: bool,
}

impl<C: Collector> Walker<'_, C> {
    fn emit(&mut self, scaled: Option<u128>, maximal: bool) {
        self.tally.systems += 1;
        if let Some(s) = scaled {
            self.tally.offer(s, &self.chosen);
        }
        let view = SystemView { space: self.space, indices: &self.chosen, maximal, scaled_sum: scaled };
        self.collector.visit(&view);
    }

    fn add_weight(&self, sum: Option<u128>, c: usize) -> Option<u128> {
        Some(sum? + self.space.furedi_weight(&self.space.candidates[c])?)
    }

    /// Pruned walk. `ext` holds every candidate that can extend `chosen`.
    fn pruned(&mut self, ext: &Row, sum: Option<u128>) {
        if !self.budget.tick() {
            self.cut = true;
            return;
        }
        let space = self.space;
        let max = space.config.max_pairs;
        let at_cap = self.chosen.len() >= max;
        let last = *self.chosen.last().expect("nonempty");
        match space.config.mode {
            Mode::Strong => {
                let open = row_count_after(ext, last);
                self.emit(sum, at_cap || row_count(ext) == 0);
                if at_cap {
                    return;
                }
                let k = space.candidates.len();
                self.tally.pruned += (k - last - 1 - open) as u64;
                let next: Vec<usize> = row_ones_after(ext, Some(last)).collect();
                for c in next {
                    let child = row_and(ext, &space.compat[c]);
                    self.chosen.push(c);
                    self.pruned(&child, self.add_weight(sum, c));
                    self.chosen.pop();
                    if self.cut {
                        return;
                    }
                }
            }
            Mode::Skew => {
                let open = row_count(ext);
                self.emit(sum, at_cap || open == 0);
                if at_cap {
                    return;
                }
                let k = space.candidates.len();
                self.tally.pruned += (k - self.chosen.len() - open) as u64;
                let next: Vec<usize> = row_ones_after(ext, None).collect();
                for c in next {
                    let mut child = row_and(ext, &space.forward[c]);
                    if space.config.ordering == OrderingConstraint::Monotone {
                        child = row_and(&child, &space.monotone[c]);
                    }
                    self.chosen.push(c);
                    self.pruned(&child, self.add_weight(sum, c));
                    self.chosen.pop();
                    if self.cut {
                        return;
                    }
                }
            }
        }
    }

    /// Unpruned walk: every subset (strong) or sequence (skew) up to
    /// `max_pairs`, validity tracked along the way.
    fn unpruned(&mut self, valid: bool, sum: Option<u128>) {
        if !self.budget.tick() {
            self.cut = true;
            return;
        }
        let space = self.space;
        let max = space.config.max_pairs;
        let at_cap = self.chosen.len() >= max;
        if valid {
            let maximal = at_cap || !space.has_extension(&self.chosen);
            self.emit(sum, maximal);
        }
        if at_cap {
            return;
        }
        let k = space.candidates.len();
        let start = match space.config.mode {
            Mode::Strong => self.chosen.last().map_or(0, |l| l + 1),
            Mode::Skew => 0,
        };
        for c in start..k {
            if self.chosen.contains(&c) {
                continue;
            }
            let ok = valid && space.is_valid_extension(&self.chosen, c);
            self.chosen.push(c);
            self.unpruned(ok, self.add_weight(sum, c));
            self.chosen.pop();
            if self.cut {
                return;
            }
        }
    }
}

struct BranchResult<C> {
    tally: Tally,
    collector: C,
    complete: bool,
}

fn run_branch<C: Collector>(space: &SearchSpace, budget: &Budget, first: usize, collector: C) -> BranchResult<C> {
    let mut walker = Walker {
        space,
        budget,
        tally: Tally::default(),
        collector,
        chosen: vec![first],
        cut: false,
    };
    let sum = walker.add_weight(Some(0), first);
    if space.config.pruning {
        let ext = match space.config.mode {
            Mode::Strong => space.compat[first].clone(),
            Mode::Skew => {
                let mut e = space.forward[first].clone();
                if space.config.ordering == OrderingConstraint::Monotone {
                    e = row_and(&e, &space.monotone[first]);
                }
                e
            }
        };
        walker.pruned(&ext, sum);
    } else {
        walker.unpruned(true, sum);
    }
    BranchResult { tally: walker.tally, collector: walker.collector, complete: !walker.cut }
}

type Persist<'a, C> = dyn Fn(usize, &Tally, &C) -> Result<()> + 'a;

const CHECKPOINT_FORMAT: &str = "bollobas-search-checkpoint";
const CHECKPOINT_VERSION: u32 = 1;

/// On-disk search frontier: the first `next_branch` top-level branches are
/// complete and folded into `tally` and `collector`.
#[derive(Serialize, Deserialize)]
pub struct Checkpoint<C> {
    format: String,
    version: u32,
    config: SearchConfig,
    total_branches: usize,
    next_branch: usize,
    tally: Tally,
    collector: C,
}

impl<C: Serialize + DeserializeOwned> Checkpoint<C> {
    pub fn next_branch(&self) -> usize {
        self.next_branch
    }

    pub fn total_branches(&self) -> usize {
        self.total_branches
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cp: Checkpoint<C> = serde_json::from_str(&text)
            .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
        if cp.format != CHECKPOINT_FORMAT || cp.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "{}: unsupported format {:?} version {}",
                path.display(),
                cp.format,
                cp.version
            )));
        }
        Ok(cp)
    }
}

/// Checkpointing and progress options for a search run.
#[derive(Default)]
pub struct RunOptions<'a> {
    pub checkpoint: Option<PathBuf>,
    /// Minimum time between checkpoint writes; zero writes after every batch.
    pub checkpoint_every: Duration,
    /// Continue from `checkpoint` if the file exists.
    pub resume: bool,
    /// Called with (completed branches, total branches) after each batch.
    pub progress: Option<&'a (dyn Fn(usize, usize) + Sync)>,
}

fn thread_pool(workers: usize) -> Result<Option<rayon::ThreadPool>> {
    if workers == 1 {
        return Ok(None);
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if workers > 1 {
        builder = builder.num_threads(workers);
    }
    builder
        .build()
        .map(Some)
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))
}

/// Runs the search, folding branch results in order. Collectors are built
/// per branch with `make`. When `persist` is set, the frontier is written
/// through it.
fn drive<C, M>(
    space: &SearchSpace,
    make: M,
    mut start: (usize, Tally, C),
    opts: &RunOptions<'_>,
    persist: Option<&Persist<'_, C>>,
) -> Result<(SearchRecord, C)>
where
    C: Collector,
    M: Fn() -> C + Sync,
{
    let budget = Budget::new(&space.config);
    let pool = thread_pool(space.config.workers)?;
    let total = space.candidates.len();
    let batch = match &pool {
        None => 1,
        Some(p) => p.current_num_threads() * 4,
    };
    let mut last_write = Instant::now();
    let mut exhausted = true;
    // Results of branches that did not finish, or finished after an
    // unfinished one; they count toward the record but not the checkpoint.
    let mut partial: Option<(Tally, C)> = None;

    while start.0 < total && exhausted {
        let end = (start.0 + batch).min(total);
        let run = |i: usize| run_branch(space, &budget, i, make());
        let results: Vec<BranchResult<C>> = match &pool {
            None => (start.0..end).map(run).collect(),
            Some(p) => p.install(|| (start.0..end).into_par_iter().map(run).collect()),
        };
        for r in results {
            if r.complete && exhausted {
                start.1.merge(r.tally);
                start.2.merge(r.collector);
                start.0 += 1;
                continue;
            }
            exhausted = false;
            match partial.as_mut() {
                None => partial = Some((r.tally, r.collector)),
                Some((t, c)) => {
                    t.merge(r.tally);
                    c.merge(r.collector);
                }
            }
        }
        if let Some(cb) = opts.progress {
            cb(start.0, total);
        }
        if let Some(save) = persist {
            let finished = start.0 >= total || !exhausted;
            if finished || last_write.elapsed() >= opts.checkpoint_every {
                save(start.0, &start.1, &start.2)?;
                last_write = Instant::now();
            }
        }
    }

    let (_, mut tally, mut collector) = start;
    if let Some((t, c)) = partial {
        tally.merge(t);
        collector.merge(c);
    }
    Ok((tally.to_record(space, exhausted), collector))
}

/// Runs a search with a serializable collector, honoring checkpoint and
/// resume options.
pub fn run_search<C, M>(config: &SearchConfig, make: M, opts: &RunOptions<'_>) -> Result<(SearchRecord, C)>
where
    C: Collector + Serialize + DeserializeOwned,
    M: Fn() -> C + Sync,
{
    let space = SearchSpace::new(config)?;
    let total = space.candidates.len();
    let mut start = (0, Tally::default(), make());
    if let (true, Some(path)) = (opts.resume, &opts.checkpoint) {
        if path.exists() {
            let cp: Checkpoint<C> = Checkpoint::read(path)?;
            if cp.config.space_key() != config.space_key() || cp.total_branches != total {
                return Err(Error::Checkpoint(format!(
                    "{} was written for a different search configuration",
                    path.display()
                )));
            }
            start = (cp.next_branch, cp.tally, cp.collector);
        }
    }
    match &opts.checkpoint {
        None => drive(&space, make, start, opts, None),
        Some(path) => {
            let save = |next: usize, tally: &Tally, collector: &C| -> Result<()> {
                // Serialize through a borrowed view to avoid cloning.
                #[derive(Serialize)]
                struct View<'a, C> {
                    format: &'a str,
                    version: u32,
                    config: &'a SearchConfig,
                    total_branches: usize,
                    next_branch: usize,
                    tally: &'a Tally,
                    collector: &'a C,
                }
                let text = serde_json::to_string_pretty(&View {
                    format: CHECKPOINT_FORMAT,
                    version: CHECKPOINT_VERSION,
                    config,
                    total_branches: total,
                    next_branch: next,
                    tally,
                    collector,
                })?;
                let tmp = path.with_extension("tmp");
                std::fs::write(&tmp, text + "\n")?;
                std::fs::rename(&tmp, path)?;
                Ok(())
            };
            drive(&space, make, start, opts, Some(&save))
        }
    }
}

struct CallbackCollector<'f, F> {
    f: &'f F,
}

impl<F: Fn(&SystemView<'_>) + Sync> Collector for CallbackCollector<'_, F> {
    fn visit(&mut self, view: &SystemView<'_>) {
        (self.f)(view)
    }
    fn merge(&mut self, _later: Self) {}
}

/// Visits every system satisfying the config's filters. With several
/// workers the visitor is called concurrently from different branches.
pub fn enumerate_systems<F>(config: &SearchConfig, visitor: F) -> Result<SearchRecord>
where
    F: Fn(&SystemView<'_>) + Sync,
{
    let space = SearchSpace::new(config)?;
    let make = || CallbackCollector { f: &visitor };
    let (record, _) = drive(&space, make, (0, Tally::default(), make()), &RunOptions::default(), None)?;
    Ok(record)
}

/// Exact maximum of the Füredi sum over all visited systems.
pub fn max_furedi_sum(config: &SearchConfig) -> Result<SearchRecord> {
    max_furedi_sum_with(config, &RunOptions::default())
}

pub fn max_furedi_sum_with(config: &SearchConfig, opts: &RunOptions<'_>) -> Result<SearchRecord> {
    Ok(run_search(config, || (), opts)?.0)
}

/// Keeps the skew system with sum above 1 that has the fewest pairs, then
/// the smallest sum, then the earliest candidate sequence.
#[derive(Default, Serialize, Deserialize)]
struct ViolationHunt {
    best: Option<(usize, u128, Vec<usize>)>,
}

impl ViolationHunt {
    fn offer(&mut self, key: (usize, u128, Vec<usize>)) {
        if self.best.as_ref().is_none_or(|b| key < *b) {
            self.best = Some(key);
        }
    }
}

impl Collector for ViolationHunt {
    fn visit(&mut self, view: &SystemView<'_>) {
        if let Some(s) = view.scaled_sum {
            if s > view.space.scale() {
                self.offer((view.indices.len(), s, view.indices.to_vec()));
            }
        }
    }

    fn merge(&mut self, later: Self) {
        if let Some(k) = later.best {
            self.offer(k);
        }
    }
}

/// Searches skew 0-systems for one whose Füredi sum exceeds 1. Returns the
/// witness with the fewest pairs and, among those, the smallest excess.
pub fn find_skew_violation(config: &SearchConfig) -> Result<Option<SetPairSystem>> {
    Ok(find_skew_violation_with(config, &RunOptions::default())?.1)
}

/// [`find_skew_violation`] with checkpointing, also returning the run's
/// record so callers can tell whether the space was exhausted.
pub fn find_skew_violation_with(
    config: &SearchConfig,
    opts: &RunOptions<'_>,
) -> Result<(SearchRecord, Option<SetPairSystem>)> {
    if config.mode != Mode::Skew {
        return Err(Error::InvalidConfig(
            "violations are only searched among skew systems; strong systems obey the bound".into(),
        ));
    }
    if config.t != 0 {
        return Err(Error::InvalidConfig("skew violation search runs at t = 0".into()));
    }
    let (record, hunt) = run_search(config, ViolationHunt::default, opts)?;
    let Some((_, _, indices)) = hunt.best else {
        return Ok((record, None));
    };
    let space = SearchSpace::new(config)?;
    let system = space.system_of(&indices);
    let report = classify(&system, 0);
    let sum = furedi_sum(&system, 0)?;
    if !report.skew || sum <= 1 || is_monotone_ordered(&system) {
        return Err(Error::ConstructionFailed {
            attempts: 1,
            reason: format!("witness failed re-verification (sum {sum})"),
        });
    }
    Ok((record, Some(system)))
}

/// The inequalities checked by [`verify_corpus`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statement {
    /// Strong 0-systems: `Σ 1/C(a_i + b_i, a_i) ≤ 1`.
    BollobasSum,
    /// Strong t-systems with constant `a_i + b_i`.
    ConstantSum,
    /// Skew t-systems with `a` nondecreasing and `b` nonincreasing.
    MonotoneSkew,
    /// Strong systems with `|A_i ∩ B_i| = t`: `Σ 1/C(a_i + b_i - t, b_i - t) ≤ 1`.
    ZhuSum,
    /// Uniform skew t-systems: `m ≤ C(r + s - 2t, r - t)`.
    UniformBound,
    /// Strong t-systems: `Σ 1/C(a_i + b - 2t, a_i - t) ≤ 1`, `b = max |B_i|`.
    MaxBSum,
    /// Strong t-systems in general (open).
    FurediConjecture,
}

impl Statement {
    pub fn is_conjecture(self) -> bool {
        matches!(self, Statement::FurediConjecture)
    }

    pub fn name(self) -> &'static str {
        match self {
            Statement::BollobasSum => "bollobas-sum",
            Statement::ConstantSum => "constant-sum",
            Statement::MonotoneSkew => "monotone-skew",
            Statement::ZhuSum => "zhu-sum",
            Statement::UniformBound => "uniform-bound",
            Statement::MaxBSum => "max-b-sum",
            Statement::FurediConjecture => "furedi-conjecture",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub statement: Statement,
    pub conjecture: bool,
    pub system: SetPairSystem,
    /// Left-hand side (a sum, or `m` for the uniform bound).
    pub value: Rational,
    pub bound: Rational,
}

/// Stored violations per report; the count is always exact.
pub const MAX_STORED_VIOLATIONS: usize = 64;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusTally {
    pub checked: u64,
    pub checks: BTreeMap<Statement, u64>,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    /// Spot-checked systems whose full re-classification disagreed with the
    /// search; must stay zero.
    pub soundness_failures: u64,
    pub spot_checked: u64,
    #[serde(skip)]
    seed: u64,
}

impl CorpusTally {
    fn with_seed(seed: u64) -> Self {
        CorpusTally { seed, ..Default::default() }
    }

    fn record(&mut self, statement: Statement, holds: bool, view: &SystemView<'_>, value: Rational, bound: Rational) {
        *self.checks.entry(statement).or_default() += 1;
        if holds {
            return;
        }
        self.violation_count += 1;
        if self.violations.len() < MAX_STORED_VIOLATIONS {
            self.violations.push(Violation {
                statement,
                conjecture: statement.is_conjecture(),
                system: view.to_system(),
                value,
                bound,
            });
        }
    }

    /// Roughly one system in a hundred, chosen by a seeded hash of its
    /// candidate indices.
    fn sampled(&self, indices: &[usize]) -> bool {
        let mut h = crate::linalg::derive_seed(self.seed, indices.len() as u64);
        for &i in indices {
            h = crate::linalg::derive_seed(h, i as u64);
        }
        h.is_multiple_of(100)
    }

    fn spot_check(&mut self, view: &SystemView<'_>, strong: bool) {
        self.spot_checked += 1;
        let space = view.space;
        let config = space.config();
        let system = view.to_system();
        let report = classify(&system, config.t);
        let filters_ok = system.pairs().iter().all(|p| {
            let (a, b, s) = (p.a_len(), p.b_len(), p.self_intersection());
            s <= config.t
                && (!config.exact_self_intersection || s == config.t)
                && config.uniform_n.is_none_or(|big_n| a + b == big_n)
                && config.uniform_rs.is_none_or(|rs| (a, b) == rs)
        });
        let order_ok = config.ordering == OrderingConstraint::None || is_monotone_ordered(&system);
        let sum_ok = match (view.furedi_sum(), furedi_sum(&system, config.t)) {
            (Some(x), Ok(y)) => x == y,
            (None, Err(_)) => true,
            _ => false,
        };
        let class_ok = report.skew && report.strong == strong && (config.mode == Mode::Skew || report.strong);
        if !(filters_ok && order_ok && sum_ok && class_ok) {
            self.soundness_failures += 1;
        }
    }
}

impl Collector for CorpusTally {
    fn visit(&mut self, view: &SystemView<'_>) {
        self.checked += 1;
        let space = view.space;
        let t = space.config().t;
        let pairs: Vec<&Candidate> = view.pairs().collect();
        let m = pairs.len();
        let strong = match space.config().mode {
            Mode::Strong => true,
            Mode::Skew => (0..m).all(|i| (0..i).all(|j| row_get(&space.forward[view.indices[i]], view.indices[j]))),
        };
        if self.sampled(view.indices) {
            self.spot_check(view, strong);
        }
        let one = Rational::one();
        let scale = space.scale();

        if let Some(s) = view.scaled_sum {
            let holds = s <= scale;
            let value = || space.to_rational(s);
            let constant_sum = pairs.iter().all(|p| p.a_len + p.b_len == pairs[0].a_len + pairs[0].b_len);
            if strong && t == 0 {
                self.record(Statement::BollobasSum, holds, view, value(), one.clone());
            }
            if strong && constant_sum {
                self.record(Statement::ConstantSum, holds, view, value(), one.clone());
            }
            if strong && t > 0 && !constant_sum {
                self.record(Statement::FurediConjecture, holds, view, value(), one.clone());
            }
            let monotone = pairs.windows(2).all(|w| w[0].a_len <= w[1].a_len && w[0].b_len >= w[1].b_len);
            if monotone {
                self.record(Statement::MonotoneSkew, holds, view, value(), one.clone());
            }
        }

        if strong && pairs.iter().all(|p| p.self_meet == t) {
            let zhu: u128 = pairs
                .iter()
                .map(|p| space.weight(p.a_len + p.b_len - t, p.b_len - t))
                .sum();
            self.record(Statement::ZhuSum, zhu <= scale, view, space.to_rational(zhu), one.clone());
        }

        let (r, s) = (pairs[0].a_len, pairs[0].b_len);
        if r >= t && s >= t && pairs.iter().all(|p| (p.a_len, p.b_len) == (r, s)) {
            let bound = binomial_u((r + s - 2 * t) as u64, (r - t) as i64);
            let bound_q = Rational::from_integer(num_bigint::BigInt::from(bound.clone()));
            let holds = num_bigint::BigUint::from(m) <= bound;
            self.record(Statement::UniformBound, holds, view, Rational::from_integer(m as i64), bound_q);
        }

        if strong {
            let b = pairs.iter().map(|p| p.b_len).max().unwrap_or(0);
            if b >= t && pairs.iter().all(|p| p.a_len >= t) {
                let total: u128 = pairs.iter().map(|p| space.weight(p.a_len + b - 2 * t, p.a_len - t)).sum();
                self.record(Statement::MaxBSum, total <= scale, view, space.to_rational(total), one.clone());
            }
        }
    }

    fn merge(&mut self, later: Self) {
        self.checked += later.checked;
        for (k, v) in later.checks {
            *self.checks.entry(k).or_default() += v;
        }
        self.violation_count += later.violation_count;
        for v in later.violations {
            if self.violations.len() < MAX_STORED_VIOLATIONS {
                self.violations.push(v);
            }
        }
        self.soundness_failures += later.soundness_failures;
        self.spot_checked += later.spot_checked;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub config: SearchConfig,
    pub record: SearchRecord,
    #[serde(flatten)]
    pub tally: CorpusTally,
}

impl CorpusReport {
    pub fn checked(&self) -> u64 {
        self.tally.checked
    }

    pub fn violations(&self) -> &[Violation] {
        &self.tally.violations
    }

    /// Violations of statements that are theorems, as opposed to open
    /// conjectures.
    pub fn proven_violations(&self) -> impl Iterator<Item = &Violation> {
        self.tally.violations.iter().filter(|v| !v.conjecture)
    }
}

/// Checks every applicable inequality on every enumerated system.
pub fn verify_corpus(config: &SearchConfig) -> Result<CorpusReport> {
    verify_corpus_with(config, &RunOptions::default())
}

pub fn verify_corpus_with(config: &SearchConfig, opts: &RunOptions<'_>) -> Result<CorpusReport> {
    let seed = config.seed;
    let (record, mut tally) = run_search(config, || CorpusTally::with_seed(seed), opts)?;
    tally.seed = seed;
    Ok(CorpusReport { config: config.clone(), record, tally })
}

/// A research finding: a violating system with the run that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Finding {
    pub statement: String,
    pub conjecture: bool,
    pub system: SetPairSystem,
    pub value: Rational,
    pub bound: Rational,
    pub config: SearchConfig,
    pub seed: u64,
}

impl Finding {
    pub fn from_violation(v: &Violation, config: &SearchConfig) -> Self {
        Finding {
            statement: v.statement.name().to_string(),
            conjecture: v.conjecture,
            system: v.system.clone(),
            value: v.value.clone(),
            bound: v.bound.clone(),
            config: config.clone(),
            seed: config.seed,
        }
    }
}

/// Calls `visit` on every antichain of subsets of `[n]` (including the
/// empty family), enumerated as cliques of the incomparability graph.
pub fn enumerate_antichains(n: usize, mut visit: impl FnMut(&[ElementSet])) -> Result<u64> {
    if n == 0 || n > MAX_SEARCH_GROUND {
        return Err(Error::InvalidConfig(format!("antichain ground set must be in 1..={MAX_SEARCH_GROUND}")));
    }
    let subsets: Vec<u64> = (0u64..(1 << n)).collect();
    let k = subsets.len();
    let words = k.div_ceil(64);
    let mut incomparable = vec![vec![0u64; words]; k];
    for i in 0..k {
        for j in 0..k {
            let (a, b) = (subsets[i], subsets[j]);
            if a & b != a && a & b != b {
                row_set(&mut incomparable[i], j);
            }
        }
    }
    fn rec(
        subsets: &[u64],
        incomparable: &[Row],
        chosen: &mut Vec<ElementSet>,
        ext: &Row,
        after: Option<usize>,
        visit: &mut dyn FnMut(&[ElementSet]),
        count: &mut u64,
    ) {
        *count += 1;
        visit(chosen);
        let next: Vec<usize> = row_ones_after(ext, after).collect();
        for c in next {
            let child = row_and(ext, &incomparable[c]);
            chosen.push(ElementSet::from_bits(subsets[c]));
            rec(subsets, incomparable, chosen, &child, Some(c), visit, count);
            chosen.pop();
        }
    }
    let mut all = vec![0u64; words];
    for i in 0..k {
        row_set(&mut all, i);
    }
    let mut count = 0;
    rec(&subsets, &incomparable, &mut Vec::new(), &all, None, &mut visit, &mut count);
    Ok(count)
}
