use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use regret_forge::bench::{
    aggregate, append_records, family_of, read_records, render_csv, render_text, run_pool,
    verify_suite, worker_count, BenchError, RunRecord,
};
use regret_forge::instances::{
    gen_gap, gen_kp, gen_scp_intervals, overlay_intervals, parse_chubeasley_mkp_file, parse_native,
    parse_orlib_scp, random_corpus, serialize_native, GapType, RandomShape, ScpFlavor, SplitMix64,
};
use regret_forge::mmr::{run_algorithm, RunOptions};
use regret_forge::problems::{encode_gap, encode_kp, encode_mkp, encode_scp, MkpSpec, ScpSpec};
use regret_forge::{AlgorithmKind, BipInstance, CutFlavor, MmrError, ReportStatus, TimeBudget};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "regret-forge",
    version,
    about = "Interval min-max regret experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write generated instances in the native format.
    Gen(GenArgs),
    /// Run algorithms on instance files and record the results.
    Run(RunArgs),
    /// Aggregate a result store into a table.
    Table(TableArgs),
    /// Check the exact algorithms and heuristic bounds on small random instances.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFamily {
    Kp,
    Gap,
    Scp,
    Mkp,
    RandKp,
    RandCov,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: GenFamily,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Interval width for families built by overlaying base costs.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Number of instances (random corpora, knapsack and GAP).
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 50)]
    n: usize,
    /// Agents for GAP.
    #[arg(long, default_value_t = 5)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    kp_type: u8,
    #[arg(long, default_value_t = 1000)]
    r: i64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value = "A")]
    gap_type: GapType,
    #[arg(long, default_value = "B")]
    scp_flavor: ScpFlavor,
    /// Benchmark file supplying the base problem (set covering, MKP).
    #[arg(long)]
    base: Option<PathBuf>,
    /// Output directory; instances go to standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Instance file in the native format; may be repeated.
    #[arg(long, required = true)]
    instance: Vec<PathBuf>,
    /// fix, ds, ids, ids-h, ids-b, bc or oracle; may be repeated.
    #[arg(long, required = true)]
    alg: Vec<String>,
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    /// Accepted for symmetry with `gen`; the algorithms are deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Hamming radius of the ids cuts.
    #[arg(long, default_value_t = 1)]
    d: u32,
    /// Cut family used by `--alg ids`.
    #[arg(long, default_value = "hamming")]
    cut: CutFlavor,
    #[arg(long)]
    local_exact: bool,
    /// Result store to append to.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Family label; defaults to the instance name up to its last `-`.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct TableArgs {
    /// Result store written by `run`.
    store: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instances per orientation.
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Text,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Bench(#[from] BenchError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Bench(BenchError::Mmr(MmrError::Solver(_))) => EXIT_NUMERICAL,
            CliError::Bench(BenchError::Mmr(MmrError::Infeasible)) => EXIT_INFEASIBLE,
            _ => EXIT_USAGE,
        }
    }
}

impl From<MmrError> for CliError {
    fn from(e: MmrError) -> Self {
        CliError::Bench(e.into())
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| {
        BenchError::Io {
            path: path.to_path_buf(),
            source: e,
        }
        .into()
    })
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| {
            BenchError::Io {
                path: p.to_path_buf(),
                source: e,
            }
            .into()
        }),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("standard output: {e}"))),
    }
}

fn pct(x: f64) -> u32 {
    (x * 100.0).round() as u32
}

fn problem_error(e: regret_forge::problems::ProblemError) -> CliError {
    CliError::Usage(e.to_string())
}

fn generate(a: &GenArgs) -> Result<Vec<BipInstance>, CliError> {
    let need_base = || {
        a.base
            .as_deref()
            .ok_or_else(|| CliError::Usage("this family needs --base FILE".into()))
    };
    let parse_err = |path: &Path, e| -> CliError {
        BenchError::Parse {
            path: path.to_path_buf(),
            source: e,
        }
        .into()
    };
    let mut out = Vec::new();
    match a.family {
        GenFamily::RandKp => out = random_corpus(RandomShape::Knapsack, a.count, a.seed)?,
        GenFamily::RandCov => out = random_corpus(RandomShape::Covering, a.count, a.seed)?,
        GenFamily::Kp => {
            for k in 0..a.count {
                let mut rng = SplitMix64::new(a.seed.wrapping_add(k as u64));
                let (spec, _) = gen_kp(a.kp_type, a.n, a.r, a.gamma, a.delta, &mut rng)?;
                let name = format!(
                    "{}-{}-{:02}-{}-{}-{:02}",
                    a.kp_type,
                    a.n,
                    a.r / 1000,
                    pct(a.gamma),
                    pct(a.delta),
                    k + 1
                );
                out.push(encode_kp(&name, &spec).map_err(problem_error)?);
            }
        }
        GenFamily::Gap => {
            let t = format!("{:?}", a.gap_type).to_lowercase();
            for k in 0..a.count {
                let mut rng = SplitMix64::new(a.seed.wrapping_add(k as u64));
                let (spec, _) = gen_gap(a.gap_type, a.m, a.n, a.delta, &mut rng)?;
                let name = format!("{t}{:02}{:03}{:02}-{:02}", a.m, a.n, pct(a.delta), k + 1);
                out.push(encode_gap(&name, &spec).map_err(problem_error)?);
            }
        }
        GenFamily::Scp => {
            let path = need_base()?;
            let base = parse_orlib_scp(&read_file(path)?).map_err(|e| parse_err(path, e))?;
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("scp")
                .trim_start_matches("scp");
            let mut rng = SplitMix64::new(a.seed);
            let (lower, upper) = gen_scp_intervals(&base.lower, a.scp_flavor, a.delta, &mut rng);
            let spec = ScpSpec {
                lower,
                upper,
                ..base
            };
            let name = format!("{:?}{stem}{:02}", a.scp_flavor, pct(a.delta));
            out.push(encode_scp(&name, &spec).map_err(problem_error)?);
        }
        GenFamily::Mkp => {
            let path = need_base()?;
            let all =
                parse_chubeasley_mkp_file(&read_file(path)?).map_err(|e| parse_err(path, e))?;
            let mut rng = SplitMix64::new(a.seed);
            for (k, (base, _)) in all.into_iter().enumerate() {
                let (lower, upper) = overlay_intervals(&base.lower, a.delta, &mut rng);
                let (m, n) = (base.capacities.len(), base.lower.len());
                let spec = MkpSpec {
                    lower,
                    upper,
                    ..base
                };
                let name = format!("{m:02}{n:03}{:02}-{:02}", pct(a.delta), k + 1);
                out.push(encode_mkp(&name, &spec).map_err(problem_error)?);
            }
        }
    }
    Ok(out)
}

fn cmd_gen(a: &GenArgs) -> Result<(), CliError> {
    let instances = generate(a)?;
    match &a.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| BenchError::Io {
                path: dir.clone(),
                source: e,
            })?;
            for inst in &instances {
                let path = dir.join(format!("{}.mmr", inst.name()));
                write_output(Some(&path), &serialize_native(inst))?;
                println!("{}", path.display());
            }
            Ok(())
        }
        None => {
            let text: String = instances.iter().map(serialize_native).collect();
            write_output(None, &text)
        }
    }
}

fn algorithm_of(name: &str, cut: CutFlavor) -> Result<AlgorithmKind, CliError> {
    if name == "ids" {
        return Ok(match cut {
            CutFlavor::Hamming => AlgorithmKind::IdsH,
            CutFlavor::BestScenario => AlgorithmKind::IdsB,
        });
    }
    name.parse()
        .map_err(|_| CliError::Usage(format!("unknown algorithm {name:?}")))
}

fn record_lines(records: &[RunRecord], format: Format, header: bool) -> String {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(header)
                .from_writer(Vec::new());
            for r in records {
                w.serialize(r).expect("writing to memory");
            }
            String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8")
        }
        Format::Text => records
            .iter()
            .map(|r| {
                format!(
                    "{} {} obj={} lb={} gap={} iter={} time={:.3}s {}\n",
                    r.instance,
                    r.algorithm,
                    r.obj.map_or("-".into(), |o| o.to_string()),
                    r.lower_bound,
                    r.gap_percent.map_or("-".into(), |g| format!("{g:.2}")),
                    r.iterations,
                    r.time_s,
                    r.status
                )
            })
            .collect(),
    }
}

fn cmd_run(a: &RunArgs) -> Result<(), CliError> {
    if a.time_limit.is_nan() || a.time_limit < 0.0 {
        return Err(CliError::Usage("--time-limit must be nonnegative".into()));
    }
    let algs = a
        .alg
        .iter()
        .map(|s| algorithm_of(s, a.cut))
        .collect::<Result<Vec<_>, _>>()?;
    let mut instances = Vec::new();
    for path in &a.instance {
        let inst = parse_native(&read_file(path)?).map_err(|e| BenchError::Parse {
            path: path.clone(),
            source: e,
        })?;
        instances.push(inst);
    }
    let jobs: Vec<(usize, AlgorithmKind)> = (0..instances.len())
        .flat_map(|i| algs.iter().map(move |&k| (i, k)))
        .collect();

    let mut infeasible = false;
    let mut first = true;
    run_pool(
        &jobs,
        worker_count(),
        |&(i, kind)| {
            let opts = RunOptions {
                budget: TimeBudget::from_secs_f64(a.time_limit),
                d: a.d,
                local_exact: a.local_exact,
            };
            run_algorithm(&instances[i], kind, &opts)
        },
        |j, result| -> Result<(), CliError> {
            let inst = &instances[jobs[j].0];
            let report = result?;
            let family = a
                .family
                .as_deref()
                .unwrap_or_else(|| family_of(inst.name()));
            let rec = RunRecord::from_report(inst.name(), family, &report);
            infeasible |= report.status == ReportStatus::Infeasible;
            if let Some(store) = &a.out {
                append_records(store, std::slice::from_ref(&rec))?;
            }
            write_output(
                None,
                &record_lines(std::slice::from_ref(&rec), a.format, first),
            )?;
            first = false;
            Ok(())
        },
    )?;
    if infeasible {
        return Err(BenchError::Mmr(MmrError::Infeasible).into());
    }
    Ok(())
}

fn cmd_table(a: &TableArgs) -> Result<(), CliError> {
    let records = read_records(&a.store)?;
    if records.is_empty() {
        return Err(BenchError::EmptyStore(a.store.clone()).into());
    }
    let rows = aggregate(&records);
    let text = match a.format {
        Format::Csv => render_csv(&rows),
        Format::Text => render_text(&rows),
    };
    write_output(a.out.as_deref(), &text)
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool, CliError> {
    let checks = verify_suite(a.count, a.seed)?;
    let mut all = true;
    for c in &checks {
        let verdict = if c.ok() { "PASS" } else { "FAIL" };
        println!("{verdict} {}/{} {}", c.passed, c.total, c.name);
        all &= c.ok();
    }
    Ok(all)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::Table(a) => cmd_table(a),
        Command::Verify(a) => match cmd_verify(a) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(EXIT_NUMERICAL),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("regret-forge: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
