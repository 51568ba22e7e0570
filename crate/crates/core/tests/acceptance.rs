//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any fails. Set `BOLLOBAS_LONG=1` to include the
//! five-element strong 0-system census.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bollobas::linalg::{general_position_subspace, intersection_dim, RationalMatrix, Subspace};
use bollobas::search::{
    enumerate_antichains, enumerate_systems, find_skew_violation, max_furedi_sum, verify_corpus, Mode,
    OrderingConstraint, SearchConfig, SearchRecord,
};
use bollobas::setpair::{
    check_uniform_bound, classify, furedi_sum, generate_sharp_system, is_antichain, lym_sum, zhu_sum,
};
use bollobas::subspace::{
    classify_subspace, embed_sets_as_coordinate_subspaces, random_invertible, reduce_to_zero_system,
    subspace_furedi_sum,
};
use bollobas::{ElementSet, SetPair, SetPairSystem};

use common::{naive_furedi, naive_meet_dim, naive_rank, naive_systems, naive_zhu, pascal, Filters, Kind, Pair, Set};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let spent = start.elapsed();
    if spent > limit {
        return Err(format!("{what} took {spent:.2?}, limit {limit:?}"));
    }
    Ok(())
}

fn config(n: usize, t: usize, mode: Mode) -> SearchConfig {
    SearchConfig::new(n, t, mode)
}

fn big(r: &bollobas::Rational) -> BigRational {
    r.as_big().clone()
}

/// Count and maximum defined Füredi sum from the naive enumerator.
fn naive_census(n: usize, t: usize, kind: Kind, f: &Filters) -> (u64, BigRational) {
    let mut count = 0;
    let mut best = BigRational::zero();
    naive_systems(n, t, kind, f, &mut |s: &[Pair]| {
        count += 1;
        if let Some(v) = naive_furedi(s, t) {
            if v > best {
                best = v;
            }
        }
    });
    (count, best)
}

fn agree(record: &SearchRecord, naive: &(u64, BigRational), label: &str) -> Result<(), String> {
    ensure!(record.exhausted, "{label}: search not exhausted");
    ensure!(
        record.systems_enumerated == naive.0,
        "{label}: search visited {} systems, brute force {}",
        record.systems_enumerated,
        naive.0
    );
    ensure!(
        big(&record.best_sum) == naive.1,
        "{label}: search max {}, brute force {}",
        record.best_sum,
        naive.1
    );
    Ok(())
}

fn sharpness() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for a in 1..=3 {
        for b in 1..=3 {
            for t in 0..=2 {
                let s = generate_sharp_system(a, b, t).map_err(|e| e.to_string())?;
                let report = classify(&s, t);
                ensure!(report.strong, "sharp({a},{b},{t}) is {}", report.verdict());
                ensure!(
                    pascal(a + b, a) == s.m().into(),
                    "sharp({a},{b},{t}) has {} pairs, expected C({}, {a})",
                    s.m(),
                    a + b
                );
                let sum = furedi_sum(&s, t).map_err(|e| e.to_string())?;
                ensure!(sum == 1, "sharp({a},{b},{t}) sums to {sum}");
                count += 1;
            }
        }
    }
    within(start, Duration::from_secs(1), "sharpness")?;
    Ok(format!("{count} triples strong with m = C(a+b, a) and sum 1/1"))
}

/// All families of disjoint pairs over [2], checked pair by pair.
fn powerset_census_n2() -> (u64, BigRational) {
    let all = common::subsets(2);
    let cands: Vec<Pair> = all
        .iter()
        .flat_map(|a| all.iter().map(move |b| (a.clone(), b.clone())))
        .filter(|(a, b)| common::meet(a, b) == 0)
        .collect();
    assert_eq!(cands.len(), 9);
    let mut count = 0;
    let mut best = BigRational::zero();
    for mask in 1u32..(1 << cands.len()) {
        let fam: Vec<Pair> = (0..cands.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| cands[i].clone())
            .collect();
        let strong = fam.iter().enumerate().all(|(i, (ai, _))| {
            fam.iter()
                .enumerate()
                .all(|(j, (_, bj))| i == j || common::meet(ai, bj) > 0)
        });
        if strong {
            count += 1;
            best = best.max(naive_furedi(&fam, 0).expect("t = 0 terms are defined"));
        }
    }
    (count, best)
}

fn strong_zero_systems() -> Outcome {
    let start = Instant::now();
    let mut visited = 0;
    for n in 1..=4 {
        let c = config(n, 0, Mode::Strong);
        let record = max_furedi_sum(&c).map_err(|e| e.to_string())?;
        ensure!(record.best_sum == 1, "n = {n}: maximum {} is not exactly 1", record.best_sum);
        agree(&record, &naive_census(n, 0, Kind::Strong, &Filters::default()), &format!("n = {n}"))?;
        let corpus = verify_corpus(&c).map_err(|e| e.to_string())?;
        ensure!(corpus.violations().is_empty(), "n = {n}: {} violations", corpus.violations().len());
        ensure!(corpus.tally.soundness_failures == 0, "n = {n}: spot check failed");
        visited += record.systems_enumerated;
    }
    let p = powerset_census_n2();
    agree(&max_furedi_sum(&config(2, 0, Mode::Strong)).map_err(|e| e.to_string())?, &p, "n = 2 powerset")?;
    let mut extra = String::new();
    if std::env::var_os("BOLLOBAS_LONG").is_some() {
        let mut c = config(5, 0, Mode::Strong);
        c.workers = 0;
        let record = max_furedi_sum(&c).map_err(|e| e.to_string())?;
        ensure!(record.exhausted && record.best_sum == 1, "n = 5: maximum {}", record.best_sum);
        extra = format!(", n = 5 long run {} systems", record.systems_enumerated);
    } else {
        extra.push_str(", n = 5 skipped (set BOLLOBAS_LONG=1)");
    }
    within(start, Duration::from_secs(300), "strong 0-system census")?;
    Ok(format!("{visited} systems over n <= 4, maximum exactly 1, brute force agrees{extra}"))
}

fn constant_sum_one_systems() -> Outcome {
    let mut visited = 0;
    let mut classes = 0;
    for n in 1..=5 {
        for big_n in 0..=2 * n {
            let mut c = config(n, 1, Mode::Strong);
            c.uniform_n = Some(big_n);
            let record = max_furedi_sum(&c).map_err(|e| e.to_string())?;
            ensure!(record.best_sum <= 1, "n = {n}, N = {big_n}: sum {}", record.best_sum);
            let f = Filters { uniform_n: Some(big_n), ..Filters::default() };
            agree(&record, &naive_census(n, 1, Kind::Strong, &f), &format!("n = {n}, N = {big_n}"))?;
            visited += record.systems_enumerated;
            classes += 1;
        }
    }
    Ok(format!("{visited} strong 1-systems in {classes} (n, N) classes, all sums <= 1"))
}

fn monotone_skew() -> Outcome {
    let start = Instant::now();
    let mut visited = 0;
    for n in 1..=4 {
        let mut c = config(n, 0, Mode::Skew);
        c.ordering = OrderingConstraint::Monotone;
        let record = max_furedi_sum(&c).map_err(|e| e.to_string())?;
        ensure!(record.best_sum <= 1, "n = {n}: monotone skew sum {}", record.best_sum);
        agree(&record, &naive_census(n, 0, Kind::SkewMonotone, &Filters::default()), &format!("n = {n}"))?;
        visited += record.systems_enumerated;
    }

    let mut c = config(2, 0, Mode::Skew);
    c.max_pairs = 2;
    let witness = find_skew_violation(&c)
        .map_err(|e| e.to_string())?
        .ok_or("no skew witness at n = 2")?;
    let sum = furedi_sum(&witness, 0).map_err(|e| e.to_string())?;

    // Brute force: smallest sum above 1 among the shortest violating sequences.
    let mut best: Option<(usize, BigRational)> = None;
    let f = Filters { max_pairs: Some(2), ..Filters::default() };
    naive_systems(2, 0, Kind::Skew, &f, &mut |s: &[Pair]| {
        let v = naive_furedi(s, 0).expect("defined at t = 0");
        if v > BigRational::one() {
            let key = (s.len(), v);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
    });
    let (_, expected) = best.ok_or("brute force found no violation")?;
    ensure!(big(&sum) == expected, "witness sum {sum}, brute force minimum {expected}");
    ensure!(big(&sum) == common::ratio(3, 2), "witness sum {sum}, expected 3/2");
    ensure!(classify(&witness, 0).skew, "witness is not skew");
    within(start, Duration::from_secs(30), "monotone skew census")?;
    Ok(format!("{visited} monotone skew 0-systems over n <= 4 with sum <= 1; unordered witness at n = 2 has sum {sum}"))
}

fn uniform_bound() -> Outcome {
    let mut checked = 0u64;
    let mut attained = 0;
    for n in 1..=4 {
        for t in 0..=1 {
            for r in t..=n {
                for s in t..=n {
                    let mut c = config(n, t, Mode::Skew);
                    c.uniform_rs = Some((r, s));
                    let max_m = AtomicU64::new(0);
                    let failures = AtomicU64::new(0);
                    let record = enumerate_systems(&c, |view| {
                        let system = view.to_system();
                        let ok = check_uniform_bound(&system, t).is_ok_and(|v| v.holds == Some(true));
                        if !ok {
                            failures.fetch_add(1, Ordering::Relaxed);
                        }
                        max_m.fetch_max(system.m() as u64, Ordering::Relaxed);
                    })
                    .map_err(|e| e.to_string())?;
                    ensure!(record.exhausted, "({n}, {t}, {r}, {s}) not exhausted");
                    ensure!(failures.into_inner() == 0, "bound check failed at n = {n}, t = {t}, (r, s) = ({r}, {s})");
                    let bound = pascal(r + s - 2 * t, r - t);
                    let m = max_m.into_inner();
                    ensure!(bound >= m.into(), "m = {m} exceeds C({}, {}) at n = {n}", r + s - 2 * t, r - t);
                    if r > t && s > t && r + s - t <= n {
                        ensure!(bound == m.into(), "n = {n}, t = {t}, (r, s) = ({r}, {s}): maximum m {m} below bound {bound}");
                        attained += 1;
                    }
                    checked += record.systems_enumerated;
                }
            }
        }
    }
    let mut sharp = 0;
    for t in 0..=1 {
        for a in 1..=3 {
            for b in 1..=3 {
                let s = generate_sharp_system(a, b, t).map_err(|e| e.to_string())?;
                let v = check_uniform_bound(&s, t).map_err(|e| e.to_string())?;
                ensure!(v.uniform && v.holds == Some(true), "sharp({a},{b},{t}) fails the bound");
                ensure!(v.bound == Some(pascal(a + b, a)) && pascal(a + b, a) == s.m().into(), "sharp({a},{b},{t}) not extremal");
                sharp += 1;
            }
        }
    }
    Ok(format!(
        "{checked} uniform skew systems within the bound; maximum attained in {attained} classes; {sharp} sharp systems meet it"
    ))
}

fn zhu_inequality() -> Outcome {
    let mut visited = 0;
    for n in 1..=4 {
        for t in 0..=1 {
            let mut c = config(n, t, Mode::Strong);
            c.exact_self_intersection = true;
            let best = Mutex::new(BigRational::zero());
            let errors = AtomicU64::new(0);
            let record = enumerate_systems(&c, |view| match zhu_sum(&view.to_system(), t) {
                Ok(v) => {
                    let mut b = best.lock().unwrap();
                    if big(&v) > *b {
                        *b = big(&v);
                    }
                }
                Err(_) => {
                    errors.fetch_add(1, Ordering::Relaxed);
                }
            })
            .map_err(|e| e.to_string())?;
            ensure!(errors.into_inner() == 0, "undefined Zhu term at n = {n}, t = {t}");
            let best = best.into_inner().unwrap();
            ensure!(best <= BigRational::one(), "n = {n}, t = {t}: Zhu sum {best}");

            let mut count = 0;
            let mut naive_best = BigRational::zero();
            let f = Filters { exact_self: true, ..Filters::default() };
            naive_systems(n, t, Kind::Strong, &f, &mut |s: &[Pair]| {
                count += 1;
                naive_best = naive_best.clone().max(naive_zhu(s, t).expect("b >= t"));
            });
            ensure!(count == record.systems_enumerated, "n = {n}, t = {t}: {} vs {count} systems", record.systems_enumerated);
            ensure!(naive_best == best, "n = {n}, t = {t}: maximum {best} vs brute force {naive_best}");
            visited += count;
        }
    }
    Ok(format!("{visited} exact-self-intersection systems, Zhu sums <= 1"))
}

fn rows_of(s: &Subspace) -> Vec<Vec<BigRational>> {
    s.basis().row_vecs().iter().map(|r| r.iter().map(big).collect()).collect()
}

fn random_obstacle(n: usize, rng: &mut ChaCha8Rng) -> Subspace {
    if rng.gen_bool(0.3) {
        let size = rng.gen_range(0..n);
        let mut elems: Vec<usize> = (1..=n).collect();
        for i in (1..n).rev() {
            elems.swap(i, rng.gen_range(0..=i));
        }
        let set = ElementSet::from_elements(elems[..size].iter().copied());
        return Subspace::coordinate(n, &set).expect("set inside [n]");
    }
    let d = rng.gen_range(0..n);
    let rows: Vec<Vec<i64>> = (0..d).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect();
    let m = RationalMatrix::from_int_rows(n, &rows).expect("rectangular");
    Subspace::span(n, &m).expect("ambient matches")
}

fn general_position() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let calls = 100;
    let mut retries = 0;
    for case in 0..calls {
        let n = rng.gen_range(1..=8);
        let t = rng.gen_range(0..=3.min(n));
        let m = rng.gen_range(1..=10);
        let obstacles: Vec<Subspace> = (0..m).map(|_| random_obstacle(n, &mut rng)).collect();
        let gp = general_position_subspace(&obstacles, t, n, 1000 + case).map_err(|e| format!("case {case}: {e}"))?;
        let v_rows = rows_of(&gp.subspace);
        ensure!(naive_rank(&v_rows) == n - t, "case {case}: dim V' = {}, expected {}", naive_rank(&v_rows), n - t);
        for (i, w) in obstacles.iter().enumerate() {
            let w_rows = rows_of(w);
            let expect = naive_rank(&w_rows).saturating_sub(t);
            let got = naive_meet_dim(&w_rows, &v_rows);
            ensure!(got == expect, "case {case}, obstacle {i}: dim(W ∩ V') = {got}, expected {expect}");
        }
        retries += gp.attempts as usize - 1;
    }
    ensure!(retries * 20 <= calls as usize, "{retries} retries over {calls} calls exceeds 5%");
    within(start, Duration::from_secs(30), "general position suite")?;
    Ok(format!("{calls} obstacle collections verified, {retries} retries"))
}

fn sizes_at_least(s: &SetPairSystem, t: usize) -> bool {
    s.pairs().iter().all(|p| p.a_len() >= t && p.b_len() >= t)
}

/// Evenly spaced picks from the systems an enumeration yields.
fn pick(c: &SearchConfig, keep: impl Fn(&SetPairSystem) -> bool + Sync, count: usize) -> Result<Vec<SetPairSystem>, String> {
    let found = Mutex::new(Vec::new());
    enumerate_systems(c, |view| {
        let s = view.to_system();
        if keep(&s) {
            found.lock().unwrap().push(s);
        }
    })
    .map_err(|e| e.to_string())?;
    let found = found.into_inner().unwrap();
    ensure!(found.len() >= count, "only {} candidate systems", found.len());
    let step = found.len() / count;
    Ok((0..count).map(|k| found[k * step].clone()).collect())
}

fn reduction_pipeline() -> Outcome {
    let mut cases: Vec<(SetPairSystem, usize)> = Vec::new();
    for t in 1..=2 {
        for (a, b) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            cases.push((generate_sharp_system(a, b, t).map_err(|e| e.to_string())?, t));
        }
    }
    let strong_extra = |s: &SetPairSystem| s.m() >= 2 && sizes_at_least(s, 1);
    for s in pick(&config(4, 1, Mode::Strong), strong_extra, 2)? {
        cases.push((s, 1));
    }
    let skew_only = |t: usize| {
        move |s: &SetPairSystem| {
            let r = classify(s, t);
            s.m() >= 2 && r.skew && !r.strong && sizes_at_least(s, t)
        }
    };
    let mut c = config(4, 1, Mode::Skew);
    c.max_pairs = 3;
    for s in pick(&c, skew_only(1), 6)? {
        cases.push((s, 1));
    }
    let mut c = config(5, 2, Mode::Skew);
    c.max_pairs = 3;
    c.uniform_rs = Some((3, 3));
    for s in pick(&c, skew_only(2), 4)? {
        cases.push((s, 2));
    }
    ensure!(cases.len() == 20, "built {} cases", cases.len());

    let mut skew_cases = 0;
    for (k, (sets, t)) in cases.iter().enumerate() {
        let t = *t;
        let strong = classify(sets, t).strong;
        skew_cases += usize::from(!strong);
        let e = embed_sets_as_coordinate_subspaces(sets);
        let red = reduce_to_zero_system(&e, t, 77 + k as u64).map_err(|err| format!("case {k}: {err}"))?;
        let out = &red.system;
        for (i, (&(u, v), (u2, v2))) in e.dims().iter().zip(out.dims()).enumerate() {
            ensure!((u2, v2) == (u - t, v - t), "case {k}, pair {i}: ({u}, {v}) became ({u2}, {v2})");
            ensure!(
                common::furedi_term(u, v, t) == common::furedi_term(u2, v2, 0),
                "case {k}, pair {i}: term changed"
            );
        }
        let before = subspace_furedi_sum(&e, t).map_err(|err| err.to_string())?;
        let after = subspace_furedi_sum(out, 0).map_err(|err| err.to_string())?;
        ensure!(before == after, "case {k}: sum {before} became {after}");
        let pairs = out.pairs();
        for i in 0..pairs.len() {
            let d = intersection_dim(&pairs[i].u_space, &pairs[i].v_space).map_err(|err| err.to_string())?;
            let oracle = naive_meet_dim(&rows_of(&pairs[i].u_space), &rows_of(&pairs[i].v_space));
            ensure!(d == 0 && oracle == 0, "case {k}: condition (i) fails at pair {i}");
            ensure!(red.w0.contains(&pairs[i].u_space).map_err(|err| err.to_string())?, "case {k}: U'_{i} outside W0");
            for j in 0..pairs.len() {
                if i == j || (!strong && j < i) {
                    continue;
                }
                let d = intersection_dim(&pairs[i].u_space, &pairs[j].v_space).map_err(|err| err.to_string())?;
                let oracle = naive_meet_dim(&rows_of(&pairs[i].u_space), &rows_of(&pairs[j].v_space));
                ensure!(d > 0 && oracle == d, "case {k}: condition (ii) fails at ({i}, {j})");
            }
        }
    }
    Ok(format!(
        "{} systems ({} strong, {skew_cases} skew only) reduced by t with sums preserved term by term",
        cases.len(),
        cases.len() - skew_cases
    ))
}

fn random_system(rng: &mut ChaCha8Rng) -> SetPairSystem {
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(1..=5);
    let random_set = |rng: &mut ChaCha8Rng| ElementSet::from_bits(rng.gen_range(0..(1u64 << n)));
    let pairs = (0..m)
        .map(|_| SetPair::new(random_set(rng), random_set(rng)))
        .collect();
    SetPairSystem::new(n, pairs).expect("valid system")
}

fn embedding_fidelity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut verdicts = BTreeSet::new();
    for k in 0..50u64 {
        let s = random_system(&mut rng);
        let t = rng.gen_range(0..=2);
        let e = embed_sets_as_coordinate_subspaces(&s);
        let g = random_invertible(s.ground_size(), 500 + k);
        let moved = e.transform(&g).map_err(|err| err.to_string())?;
        let report = classify(&s, t);
        verdicts.insert(report.verdict());
        for (label, sub) in [("embedded", &e), ("transformed", &moved)] {
            ensure!(classify_subspace(sub, t) == report, "system {k}: {label} classification differs");
            let a = furedi_sum(&s, t).ok();
            let b = subspace_furedi_sum(sub, t).ok();
            ensure!(a == b, "system {k}: {label} sum {b:?} vs {a:?}");
        }
        for (i, p) in s.pairs().iter().enumerate() {
            for (j, q) in s.pairs().iter().enumerate() {
                let d = naive_meet_dim(&rows_of(&moved.pairs()[i].u_space), &rows_of(&moved.pairs()[j].v_space));
                ensure!(d == p.a_set.intersection_len(&q.b_set), "system {k}: dim(U_{i} ∩ V_{j}) = {d}");
            }
        }
    }
    Ok(format!("50 systems agree across embedding and change of basis (verdicts seen: {verdicts:?})"))
}

fn full_level(n: usize, k: usize) -> BTreeSet<Set> {
    common::subsets(n).into_iter().filter(|s| s.len() == k).collect()
}

/// Antichain count and equality families by checking every family of
/// subsets of `[n]`.
fn brute_antichains(n: usize) -> (u64, Vec<BTreeSet<Set>>) {
    let all = common::subsets(n);
    let mut count = 0;
    let mut equal = Vec::new();
    for mask in 0u64..(1 << all.len()) {
        let fam: Vec<&Set> = (0..all.len()).filter(|i| mask & (1 << i) != 0).map(|i| &all[i]).collect();
        let anti = fam
            .iter()
            .enumerate()
            .all(|(i, f)| fam.iter().enumerate().all(|(j, g)| i == j || !f.is_subset(g)));
        if !anti {
            continue;
        }
        count += 1;
        let sum: BigRational = fam.iter().map(|f| common::inv(pascal(n, f.len()))).sum();
        if sum == BigRational::one() {
            equal.push(fam.into_iter().cloned().collect());
        }
    }
    (count, equal)
}

fn lym() -> Outcome {
    let start = Instant::now();
    let dedekind = [3u64, 6, 20, 168, 7581];
    let mut total = 0;
    for n in 1..=5 {
        let mut over = 0;
        let mut not_anti = 0;
        let mut equal: Vec<BTreeSet<Set>> = Vec::new();
        let count = enumerate_antichains(n, |fam| {
            if !is_antichain(fam) {
                not_anti += 1;
            }
            let sum = lym_sum(fam, n).expect("members inside [n]");
            if sum > 1 {
                over += 1;
            } else if sum == 1 {
                equal.push(fam.iter().map(|f| f.iter().collect()).collect());
            }
        })
        .map_err(|e| e.to_string())?;
        ensure!(not_anti == 0, "n = {n}: {not_anti} enumerated families are not antichains");
        ensure!(over == 0, "n = {n}: {over} antichains exceed 1");
        ensure!(count == dedekind[n - 1], "n = {n}: {count} antichains, expected {}", dedekind[n - 1]);
        let levels: BTreeSet<BTreeSet<Set>> = (0..=n).map(|k| full_level(n, k)).collect();
        let found: BTreeSet<BTreeSet<Set>> = equal.iter().cloned().collect();
        ensure!(equal.len() == n + 1 && found == levels, "n = {n}: equality families are not exactly the full levels");
        if n <= 4 {
            let (bc, be) = brute_antichains(n);
            ensure!(bc == count, "n = {n}: brute force finds {bc} antichains");
            ensure!(be.into_iter().collect::<BTreeSet<_>>() == levels, "n = {n}: brute-force equality census differs");
        }
        total += count;
    }
    within(start, Duration::from_secs(60), "LYM census")?;
    Ok(format!("{total} antichains over n <= 5, all <= 1, equality exactly on the n + 1 full levels"))
}

fn determinism() -> Outcome {
    let mut runs = 0;
    for n in 1..=3 {
        let mut configs = vec![config(n, 0, Mode::Strong), config(n, 1, Mode::Strong), config(n, 0, Mode::Skew)];
        let mut mono = config(n, 0, Mode::Skew);
        mono.ordering = OrderingConstraint::Monotone;
        configs.push(mono);
        let mut uni = config(n, 1, Mode::Strong);
        uni.uniform_n = Some(n);
        configs.push(uni);
        for mut c in configs {
            c.seed = 42;
            c.workers = 1;
            let first = max_furedi_sum(&c).map_err(|e| e.to_string())?;
            let again = max_furedi_sum(&c).map_err(|e| e.to_string())?;
            ensure!(first == again, "n = {n}: repeated run differs");
            c.workers = 4;
            let par = max_furedi_sum(&c).map_err(|e| e.to_string())?;
            ensure!(
                par.systems_enumerated == first.systems_enumerated && par.best_sum == first.best_sum,
                "n = {n}: parallel {} / {} vs sequential {} / {}",
                par.systems_enumerated,
                par.best_sum,
                first.systems_enumerated,
                first.best_sum
            );
            ensure!(par == first, "n = {n}: parallel record differs");
            let visits = AtomicU64::new(0);
            enumerate_systems(&c, |_| {
                visits.fetch_add(1, Ordering::Relaxed);
            })
            .map_err(|e| e.to_string())?;
            ensure!(visits.into_inner() == first.systems_enumerated, "n = {n}: parallel visitor count differs");
            let seq_corpus = verify_corpus(&SearchConfig { workers: 1, ..c.clone() }).map_err(|e| e.to_string())?;
            let par_corpus = verify_corpus(&c).map_err(|e| e.to_string())?;
            ensure!(seq_corpus.tally == par_corpus.tally, "n = {n}: corpus tallies differ");
            runs += 1;
        }
    }
    Ok(format!("{runs} configurations reproduce exactly, sequential and parallel agree"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("sharp construction", sharpness),
        ("strong 0-systems, n <= 4", strong_zero_systems),
        ("constant-sum strong 1-systems, n <= 5", constant_sum_one_systems),
        ("monotone skew systems and unordered witness", monotone_skew),
        ("uniform skew bound", uniform_bound),
        ("exact self-intersection sums", zhu_inequality),
        ("general position subspaces", general_position),
        ("reduction to 0-systems", reduction_pipeline),
        ("embedding fidelity", embedding_fidelity),
        ("LYM over antichains, n <= 5", lym),
        ("determinism and parallel equivalence", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail} ({secs:.2}s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {why} ({secs:.2}s)", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
