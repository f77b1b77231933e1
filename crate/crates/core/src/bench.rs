//! Experiment bookkeeping: run records, the CSV result store, gap accounting,
//! aggregated tables and a small self-check suite.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::MmrError;
use crate::instances::{random_corpus, ParseError, RandomShape, SplitMix64};
use crate::mmr::{
    best_scenario_cut, dominance_holds, evaluate_max_regret, fixed_scenario, AlgorithmKind,
    AlgorithmReport, BinarySolution, IdsConfig, ReportStatus,
};
use crate::oracle::{brute_force_max_regret, brute_force_mmr};
use crate::tolerance::TimeBudget;

/// Version written in every record; bumped whenever the columns change.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "REGRET_FORGE_THREADS";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Store {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("{path}: unsupported schema version {found} (expected {SCHEMA_VERSION})")]
    Schema { path: PathBuf, found: u32 },
    #[error("result store {0} holds no records")]
    EmptyStore(PathBuf),
    #[error(transparent)]
    Mmr(#[from] MmrError),
}

impl BenchError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        BenchError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// One line of the result store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub instance: String,
    pub family: String,
    pub algorithm: String,
    /// Max regret of the returned solution; empty when none was found.
    pub obj: Option<i64>,
    pub time_s: f64,
    pub iterations: usize,
    pub lower_bound: i64,
    pub gap_percent: Option<f64>,
    pub status: String,
}

/// `100 (obj - lb) / obj`, and 0 when `obj` is 0. The bound is clamped into
/// `[0, obj]` so the gap is never negative.
pub fn gap_percent(obj: i64, lower_bound: i64) -> f64 {
    if obj <= 0 {
        return 0.0;
    }
    let lb = lower_bound.clamp(0, obj);
    100.0 * (obj - lb) as f64 / obj as f64
}

/// Default family of an instance: its name up to the last `-`.
pub fn family_of(instance: &str) -> &str {
    instance.rsplit_once('-').map_or(instance, |(f, _)| f)
}

impl RunRecord {
    pub fn from_report(instance: &str, family: &str, report: &AlgorithmReport) -> Self {
        RunRecord {
            schema_version: SCHEMA_VERSION,
            instance: instance.to_string(),
            family: family.to_string(),
            algorithm: report.algorithm.as_str().to_string(),
            obj: report.max_regret,
            time_s: report.elapsed.as_secs_f64(),
            iterations: report.iterations,
            lower_bound: report.lower_bound,
            gap_percent: report
                .max_regret
                .map(|r| gap_percent(r, report.lower_bound)),
            status: report.status.as_str().to_string(),
        }
    }
}

/// Appends `records` to the CSV store at `path`, writing the header first if
/// the file is new or empty.
pub fn append_records(path: &Path, records: &[RunRecord]) -> Result<(), BenchError> {
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| BenchError::io(path, e))?;
    let empty = file.metadata().map_err(|e| BenchError::io(path, e))?.len() == 0;
    let mut w = csv::WriterBuilder::new()
        .has_headers(empty)
        .from_writer(file);
    for r in records {
        w.serialize(r).map_err(|e| BenchError::Store {
            path: path.to_path_buf(),
            source: e,
        })?;
    }
    w.flush().map_err(|e| BenchError::io(path, e))
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, BenchError> {
    let store_err = |e| BenchError::Store {
        path: path.to_path_buf(),
        source: e,
    };
    let mut rd = csv::Reader::from_path(path).map_err(store_err)?;
    let mut out = Vec::new();
    for r in rd.deserialize::<RunRecord>() {
        let r = r.map_err(store_err)?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(BenchError::Schema {
                path: path.to_path_buf(),
                found: r.schema_version,
            });
        }
        out.push(r);
    }
    Ok(out)
}

/// Per instance, the largest lower bound recorded by any run, with every
/// gap recomputed against it.
pub fn apply_best_bounds(records: &mut [RunRecord]) {
    let mut best: HashMap<String, i64> = HashMap::new();
    for r in records.iter().filter(|r| r.obj.is_some()) {
        let e = best.entry(r.instance.clone()).or_insert(0);
        *e = (*e).max(r.lower_bound);
    }
    for r in records.iter_mut() {
        if let Some(obj) = r.obj {
            r.lower_bound = best[&r.instance];
            r.gap_percent = Some(gap_percent(obj, r.lower_bound));
        }
    }
}

/// Aggregate of one algorithm over one family of instances.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub family: String,
    pub algorithm: String,
    pub instances: usize,
    pub avg_time_s: f64,
    pub avg_iterations: f64,
    /// Average over instances with a solution; `None` if there are none.
    pub avg_gap_percent: Option<f64>,
    pub opt: usize,
    pub best: usize,
    /// Smallest average gap of the family.
    pub best_gap: bool,
    /// Largest `best` count of the family.
    pub most_best: bool,
}

fn algorithm_rank(name: &str) -> usize {
    AlgorithmKind::ALL
        .iter()
        .position(|k| k.as_str() == name)
        .unwrap_or(AlgorithmKind::ALL.len())
}

fn record_key(r: &RunRecord) -> impl Ord + '_ {
    (
        r.obj.is_none(),
        r.obj,
        r.time_s.to_bits(),
        r.iterations,
        r.lower_bound,
        r.status.as_str(),
        r.family.as_str(),
    )
}

/// Groups records by family and algorithm. Repeated runs of the same
/// instance and algorithm are reduced to the best one, so the result does
/// not depend on the order of `records`. An instance counts towards `best`
/// for every algorithm whose objective equals the smallest objective any
/// algorithm reached on it.
pub fn aggregate(records: &[RunRecord]) -> Vec<TableRow> {
    let mut recs = records.to_vec();
    apply_best_bounds(&mut recs);

    let mut chosen: BTreeMap<(String, String), RunRecord> = BTreeMap::new();
    for r in recs {
        let key = (r.instance.clone(), r.algorithm.clone());
        match chosen.get(&key) {
            Some(old) if record_key(old) <= record_key(&r) => {}
            _ => {
                chosen.insert(key, r);
            }
        }
    }

    let mut min_obj: HashMap<&str, i64> = HashMap::new();
    for r in chosen.values() {
        if let Some(o) = r.obj {
            let e = min_obj.entry(r.instance.as_str()).or_insert(o);
            *e = (*e).min(o);
        }
    }

    // BTreeMap iteration visits instances in name order, which fixes the
    // summation order of the averages.
    let mut groups: BTreeMap<(String, usize, String), Vec<&RunRecord>> = BTreeMap::new();
    for r in chosen.values() {
        groups
            .entry((
                r.family.clone(),
                algorithm_rank(&r.algorithm),
                r.algorithm.clone(),
            ))
            .or_default()
            .push(r);
    }

    let mut rows: Vec<TableRow> = groups
        .into_iter()
        .map(|((family, _, algorithm), rs)| {
            let k = rs.len() as f64;
            let gaps: Vec<f64> = rs.iter().filter_map(|r| r.gap_percent).collect();
            TableRow {
                family,
                algorithm,
                instances: rs.len(),
                avg_time_s: rs.iter().map(|r| r.time_s).sum::<f64>() / k,
                avg_iterations: rs.iter().map(|r| r.iterations as f64).sum::<f64>() / k,
                avg_gap_percent: (!gaps.is_empty())
                    .then(|| gaps.iter().sum::<f64>() / gaps.len() as f64),
                opt: rs
                    .iter()
                    .filter(|r| r.status == ReportStatus::Optimal.as_str())
                    .count(),
                best: rs
                    .iter()
                    .filter(|r| {
                        r.obj.is_some() && r.obj == min_obj.get(r.instance.as_str()).copied()
                    })
                    .count(),
                best_gap: false,
                most_best: false,
            }
        })
        .collect();

    let mut start = 0;
    while start < rows.len() {
        let end = start
            + rows[start..]
                .iter()
                .take_while(|r| r.family == rows[start].family)
                .count();
        let group = &mut rows[start..end];
        // Compare gaps as printed so that displayed ties are marked alike.
        let shown = |g: f64| (g * 100.0).round() as i64;
        let min_gap = group
            .iter()
            .filter_map(|r| r.avg_gap_percent)
            .map(shown)
            .min();
        let max_best = group.iter().map(|r| r.best).max().unwrap_or(0);
        for r in group.iter_mut() {
            r.best_gap = min_gap.is_some() && r.avg_gap_percent.map(shown) == min_gap;
            r.most_best = r.best == max_best;
        }
        start = end;
    }
    rows
}

fn marker(r: &TableRow) -> &'static str {
    match (r.best_gap, r.most_best) {
        (true, true) => "gap+best",
        (true, false) => "gap",
        (false, true) => "best",
        (false, false) => "",
    }
}

fn fmt_gap(g: Option<f64>) -> String {
    g.map_or_else(|| "-".to_string(), |g| format!("{g:.2}"))
}

pub fn render_csv(rows: &[TableRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = [
        "family",
        "algorithm",
        "instances",
        "time_s",
        "iterations",
        "gap_percent",
        "opt",
        "best",
        "marker",
    ];
    w.write_record(header).expect("writing to memory");
    for r in rows {
        w.write_record([
            r.family.clone(),
            r.algorithm.clone(),
            r.instances.to_string(),
            format!("{:.2}", r.avg_time_s),
            format!("{:.2}", r.avg_iterations),
            fmt_gap(r.avg_gap_percent),
            r.opt.to_string(),
            r.best.to_string(),
            marker(r).to_string(),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

/// Aligned plain-text table; `*` follows the gap or `#best` entries that are
/// the best of their family.
pub fn render_text(rows: &[TableRow]) -> String {
    let header = [
        "family",
        "algorithm",
        "n",
        "time",
        "iter",
        "%gap",
        "#opt",
        "#best",
    ];
    let star = |b: bool| if b { "*" } else { "" };
    let body: Vec<[String; 8]> = rows
        .iter()
        .map(|r| {
            [
                r.family.clone(),
                r.algorithm.clone(),
                r.instances.to_string(),
                format!("{:.2}", r.avg_time_s),
                format!("{:.2}", r.avg_iterations),
                format!("{}{}", fmt_gap(r.avg_gap_percent), star(r.best_gap)),
                r.opt.to_string(),
                format!("{}{}", r.best, star(r.most_best)),
            ]
        })
        .collect();
    let mut width = header.map(str::len);
    for row in &body {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[String]| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(width).enumerate() {
            if i < 2 {
                let _ = write!(s, "{cell:<w$}  ");
            } else {
                let _ = write!(s, "{cell:>w$}  ");
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(&header.map(String::from));
    for row in &body {
        line(row);
    }
    out
}

/// Worker count: the machine's parallelism, capped by [`THREADS_ENV`] when it
/// holds a positive integer.
pub fn worker_count() -> usize {
    let hw = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        Some(cap) if cap > 0 => hw.min(cap),
        _ => hw,
    }
}

/// Runs `work` on every job with up to `threads` workers and hands the
/// results to `sink` on the calling thread, in job order.
pub fn run_pool<J, R, E>(
    jobs: &[J],
    threads: usize,
    work: impl Fn(&J) -> R + Sync,
    mut sink: impl FnMut(usize, R) -> Result<(), E>,
) -> Result<(), E>
where
    J: Sync,
    R: Send,
{
    let threads = threads.clamp(1, jobs.len().max(1));
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|s| {
        for _ in 0..threads {
            let tx = tx.clone();
            let (next, work) = (&next, &work);
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                if tx.send((i, work(job))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut pending = BTreeMap::new();
        let mut due = 0;
        for (i, r) in rx {
            pending.insert(i, r);
            while let Some(r) = pending.remove(&due) {
                sink(due, r)?;
                due += 1;
            }
        }
        Ok(())
    })
}

/// Pass count of one check of [`verify_suite`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
}

impl CheckResult {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

fn tally(name: &'static str, outcomes: impl IntoIterator<Item = bool>) -> CheckResult {
    let (mut passed, mut total) = (0, 0);
    for ok in outcomes {
        total += 1;
        passed += usize::from(ok);
    }
    CheckResult {
        name,
        passed,
        total,
    }
}

/// Compares the exact algorithms with the oracle and checks the bounds of
/// the heuristics on `count` random instances of each shape.
pub fn verify_suite(count: usize, seed: u64) -> Result<Vec<CheckResult>, MmrError> {
    let mut corpus = random_corpus(RandomShape::Knapsack, count, seed)?;
    corpus.extend(random_corpus(RandomShape::Covering, count, seed ^ 0x5EED)?);
    let unlimited = TimeBudget::unlimited();

    let mut exact = Vec::new();
    let mut fix_bound = Vec::new();
    let mut dominance = Vec::new();
    let mut cut_sound = Vec::new();
    let mut rng = SplitMix64::new(seed);
    for inst in &corpus {
        let opt = brute_force_mmr(inst)?.max_regret;
        for report in [
            crate::mmr::branch_and_cut(inst, &unlimited)?,
            crate::mmr::iterated_ds(inst, &IdsConfig::best_scenario())?,
            crate::mmr::iterated_ds(inst, &IdsConfig::hamming(1))?,
        ] {
            exact.push(report.max_regret == opt);
        }
        if let Some(opt) = opt {
            let fix = fixed_scenario(inst, &unlimited)?;
            fix_bound.push(fix.max_regret.is_some_and(|r| r <= 2 * opt));
        }

        let n = inst.num_vars();
        let feasible: Vec<BinarySolution> = (0..1u64 << n)
            .map(|m| BinarySolution::from_mask(m, n))
            .filter(|x| inst.is_feasible(x))
            .collect();
        if feasible.len() < 2 {
            continue;
        }
        let pick = |rng: &mut SplitMix64| {
            feasible[rng.uniform(0, feasible.len() as i64 - 1) as usize].clone()
        };
        for _ in 0..4 {
            let (xb, xh) = (pick(&mut rng), pick(&mut rng));
            if dominance_holds(inst, &xb, &xh)? {
                let rb = brute_force_max_regret(inst, &xb)?.max_regret;
                let rh = brute_force_max_regret(inst, &xh)?.max_regret;
                dominance.push(rh <= rb);
            }
        }
        let xh = pick(&mut rng);
        let cut = best_scenario_cut(inst, &xh)?;
        let mut sound = true;
        for x in &feasible {
            sound &= cut.is_satisfied(x) != dominance_holds(inst, x, &xh)?;
        }
        cut_sound.push(sound);
        let ev = evaluate_max_regret(inst, &xh, &unlimited)?;
        exact.push(ev.max_regret == brute_force_max_regret(inst, &xh)?.max_regret);
    }
    Ok(vec![
        tally("exact algorithms match the oracle", exact),
        tally("fixed scenario within twice the optimum", fix_bound),
        tally("dominated solutions have no smaller regret", dominance),
        tally(
            "best-scenario cut removes exactly the dominated set",
            cut_sound,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(instance: &str, alg: &str, obj: Option<i64>, lb: i64, status: &str) -> RunRecord {
        RunRecord {
            schema_version: SCHEMA_VERSION,
            instance: instance.into(),
            family: family_of(instance).into(),
            algorithm: alg.into(),
            obj,
            time_s: 1.0,
            iterations: 1,
            lower_bound: lb,
            gap_percent: obj.map(|o| gap_percent(o, lb)),
            status: status.into(),
        }
    }

    #[test]
    fn gap_formula() {
        assert_eq!(gap_percent(10, 5), 50.0);
        assert_eq!(gap_percent(0, 0), 0.0);
        assert_eq!(gap_percent(7, 7), 0.0);
        assert_eq!(gap_percent(4, 9), 0.0);
    }

    #[test]
    fn families() {
        assert_eq!(family_of("a0504010-01"), "a0504010");
        assert_eq!(family_of("1-50-01-45-10"), "1-50-01-45");
        assert_eq!(family_of("plain"), "plain");
    }

    #[test]
    fn ties_count_for_both_algorithms() {
        let rows = aggregate(&[
            rec("f-1", "ids-b", Some(4), 0, "FEASIBLE"),
            rec("f-1", "ids-h", Some(4), 0, "FEASIBLE"),
        ]);
        assert_eq!(rows.iter().map(|r| r.best).collect::<Vec<_>>(), vec![1, 1]);
        assert!(rows.iter().all(|r| r.most_best && r.best_gap));
    }

    #[test]
    fn best_bound_is_shared_across_algorithms() {
        let rows = aggregate(&[
            rec("f-1", "fix", Some(10), 5, "FEASIBLE"),
            rec("f-1", "bc", Some(8), 8, "OPTIMAL"),
        ]);
        let fix = rows.iter().find(|r| r.algorithm == "fix").unwrap();
        assert_eq!(fix.avg_gap_percent, Some(20.0));
        let bc = rows.iter().find(|r| r.algorithm == "bc").unwrap();
        assert_eq!((bc.opt, bc.best, bc.avg_gap_percent), (1, 1, Some(0.0)));
        assert_eq!(rows[0].algorithm, "bc");
    }

    #[test]
    fn single_record_gap() {
        let rows = aggregate(&[rec("f-1", "fix", Some(10), 5, "FEASIBLE")]);
        assert_eq!(rows[0].avg_gap_percent, Some(50.0));
        assert!(render_text(&rows).contains("50.00*"));
    }

    #[test]
    fn store_round_trip_appends() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        let a = rec("f-1", "fix", Some(10), 5, "FEASIBLE");
        let b = rec("f,\"2", "ds", None, 0, "TIME_LIMIT");
        append_records(&path, std::slice::from_ref(&a)).unwrap();
        append_records(&path, std::slice::from_ref(&b)).unwrap();
        assert_eq!(read_records(&path).unwrap(), vec![a, b]);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.matches("schema_version").count(), 1);
    }

    #[test]
    fn pool_preserves_job_order() {
        let jobs: Vec<u64> = (0..50).collect();
        let mut seen = Vec::new();
        run_pool(
            &jobs,
            4,
            |&j| j * j,
            |i, r| {
                seen.push((i, r));
                Ok::<_, ()>(())
            },
        )
        .unwrap();
        assert_eq!(
            seen,
            jobs.iter()
                .map(|&j| (j as usize, j * j))
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn small_verify_run_passes() {
        let checks = verify_suite(6, 3).unwrap();
        for c in &checks {
            assert!(c.ok(), "{c:?}");
        }
        assert!(checks[0].total >= 36);
    }
}
