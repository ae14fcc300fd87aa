//! `unital`: batch front end for the point counts, verification suites and
//! triple / random-cubic searches.
//!
//! Exit codes: 0 when every asserted check passes, 1 when one fails (the
//! failing checks are named on stderr), 2 on usage or configuration errors.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use unital::hermitian::{count_points_formula, hermitian_points, DEFAULT_BUDGET};
use unital::search::{exhaustive_triples, orbit_triples, random_cubic_sample, write_histogram_csv};
use unital::sequences::BoundTable;
use unital::suites::{run_suite, SuiteOptions, SuiteReport};
use unital::{Error, FieldCtx, HermitianForm};

const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "unital", version, about = "Hermitian variety counts, checks and searches over F_{q^2}")]
struct Cli {
    /// Maximum number of point evaluations (or triples) a single step may use.
    #[arg(long, global = true, env = "UNITAL_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, global = true, env = "UNITAL_WORKERS", default_value_t = 0)]
    workers: usize,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form and (within budget) enumerated point counts.
    Count {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        /// Rank of the form; defaults to the non-degenerate case n+1.
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Run a verification suite: sequences, sections, incidence, extremal, lachaud.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
    },
    /// Triple search (`triples`, `orbit`) or random cubic sampling (`random`).
    Search {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        mode: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Random triples re-counted by enumeration.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

/// Resolved settings of one invocation.
#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    q: u32,
    n: usize,
    budget: u64,
    seed: u64,
    output_format: Format,
    #[serde(skip)]
    output_path: Option<PathBuf>,
}

impl RunConfig {
    fn new(cli: &Cli, q: u32, n: usize) -> Result<Self, Error> {
        FieldCtx::new(q)?;
        if cli.budget == 0 {
            return Err(Error::OutOfRange("budget must be positive".into()));
        }
        Ok(RunConfig {
            q,
            n,
            budget: cli.budget,
            seed: cli.seed,
            output_format: cli.format,
            output_path: cli.output.clone(),
        })
    }
}

/// A finished command: its JSON body, an optional CSV rendering, and the
/// names of failed assertions.
struct Outcome {
    command: &'static str,
    result: Value,
    csv: Option<Vec<u8>>,
    failures: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    if cli.workers > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global()?;
    }
    let start = Instant::now();
    let (cfg, outcome) = match &cli.command {
        Command::Count { q, n, rank } => {
            let cfg = RunConfig::new(cli, *q, *n)?;
            let o = cmd_count(&cfg, *rank)?;
            (cfg, o)
        }
        Command::Verify { suite, q, n } => {
            let cfg = RunConfig::new(cli, *q, *n)?;
            let o = cmd_verify(&cfg, suite)?;
            (cfg, o)
        }
        Command::Search { q, n, mode, trials, samples } => {
            if !["triples", "orbit", "random"].contains(&mode.as_str()) {
                return Err(Error::UnknownMode(mode.clone()).into());
            }
            let cfg = RunConfig::new(cli, *q, *n)?;
            let o = cmd_search(&cfg, mode, *trials, *samples)?;
            (cfg, o)
        }
    };
    let wall = start.elapsed().as_secs_f64();
    emit(&cfg, &outcome, wall)?;
    for f in &outcome.failures {
        eprintln!("FAILED: {f}");
    }
    Ok(if outcome.failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn emit(cfg: &RunConfig, o: &Outcome, wall: f64) -> io::Result<()> {
    let bytes = match (cfg.output_format, &o.csv) {
        (Format::Csv, Some(csv)) => csv.clone(),
        _ => {
            let generated = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            let doc = json!({
                "schema": SCHEMA,
                "command": o.command,
                "config": cfg,
                "passed": o.failures.is_empty(),
                "failures": o.failures,
                "result": o.result,
                "timestamp": { "generated_unix": generated, "wall_time_s": wall },
            });
            let mut s = serde_json::to_vec_pretty(&doc)?;
            s.push(b'\n');
            s
        }
    };
    match &cfg.output_path {
        Some(p) => File::create(p)?.write_all(&bytes),
        None => io::stdout().lock().write_all(&bytes),
    }
}

fn cmd_count(cfg: &RunConfig, rank: Option<usize>) -> Result<Outcome, Error> {
    let f = FieldCtx::new(cfg.q)?;
    let n = cfg.n;
    let q = cfg.q as u64;
    let r = rank.unwrap_or(n + 1);
    let formula = count_points_formula(n, q, r)?;
    let form = HermitianForm::with_rank(n, r)?;
    let enumerated = match form.count_points_enum(&f, cfg.budget) {
        Ok(c) => Some(c),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut failures = Vec::new();
    if let Some(e) = enumerated {
        if e as u128 != formula {
            failures.push(format!("point count formula {formula} != enumeration {e}"));
        }
    }
    let result = json!({
        "rank": r,
        "formula": formula.to_string(),
        "enumerated": enumerated,
        "nondegenerate_formula": hermitian_points(n as isize, q).to_string(),
    });
    let csv = format!(
        "q,n,rank,formula,enumerated\n{},{},{},{},{}\n",
        cfg.q,
        n,
        r,
        formula,
        enumerated.map(|e| e.to_string()).unwrap_or_default()
    );
    Ok(Outcome { command: "count", result, csv: Some(csv.into_bytes()), failures })
}

fn suite_csv(report: &SuiteReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "passed", "asserted", "detail"]).expect("in-memory write");
    for (c, asserted) in report.checks.iter().map(|c| (c, true)).chain(report.informational.iter().map(|c| (c, false))) {
        w.write_record([c.name.as_str(), &c.passed.to_string(), &asserted.to_string(), c.detail.as_str()])
            .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn cmd_verify(cfg: &RunConfig, suite: &str) -> Result<Outcome, Error> {
    let report = run_suite(suite, cfg.q, cfg.n, SuiteOptions { budget: cfg.budget, seed: cfg.seed })?;
    let failures = report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
    let csv = if suite == "sequences" {
        let mut buf = Vec::new();
        BoundTable::build(cfg.q as u64, cfg.n)?.write_csv(&mut buf).expect("in-memory write");
        buf
    } else {
        suite_csv(&report)
    };
    let result = serde_json::to_value(&report).expect("serializable report");
    Ok(Outcome { command: "verify", result, csv: Some(csv), failures })
}

fn cmd_search(cfg: &RunConfig, mode: &str, trials: usize, samples: usize) -> Result<Outcome, Error> {
    let f = FieldCtx::new(cfg.q)?;
    let form = HermitianForm::standard(cfg.n);
    let mut failures = Vec::new();
    let (result, hist) = if mode == "random" {
        let r = random_cubic_sample(&f, &form, trials, cfg.seed, cfg.budget)?;
        if !r.passed() {
            for e in &r.exceedances {
                failures.push(format!("cubic exceeds B_{} = {} with {} points: {}", cfg.n, r.threshold, e.count, e.polynomial));
            }
        }
        (serde_json::to_value(&r).expect("serializable report"), r.histogram)
    } else {
        let r = if mode == "orbit" {
            orbit_triples(&f, &form, cfg.budget, samples, cfg.seed)?
        } else {
            exhaustive_triples(&f, &form, cfg.budget, samples, cfg.seed)?
        };
        if r.sample_check.mismatches > 0 {
            failures.push(format!("{} sampled triples disagree with enumeration", r.sample_check.mismatches));
        }
        if !r.argmax_verified {
            failures.push("an argmax triple failed re-verification by enumeration".into());
        }
        (serde_json::to_value(&r).expect("serializable report"), r.histogram)
    };
    let mut csv = Vec::new();
    write_histogram_csv(&hist, &mut csv).expect("in-memory write");
    Ok(Outcome { command: "search", result, csv: Some(csv), failures })
}
