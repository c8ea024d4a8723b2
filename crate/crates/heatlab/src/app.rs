//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::{config_hash, parse_config, ExperimentConfig};
use crate::error::{exit, HarnessError, HarnessResult};
use crate::harness::{find_suite, registry, run_suite, SuiteReport, DEFAULT_SEED};
use crate::report::{regression_gate, write_all};

pub const OUT_ENV: &str = "HEATLAB_OUT";
pub const DEFAULT_OUT: &str = "heatlab_out";

#[derive(Debug, Parser)]
#[command(name = "heatlab", version, about = "Numerical experiments on Neumann heat kernels and heat traces of convex domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the suites listed in a JSON config.
    Run {
        config: PathBuf,
        /// Output directory (HEATLAB_OUT takes precedence).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for intra-suite parallelism.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        /// Seed for every suite, overriding the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the available suites.
    List,
    /// Print the statement, parameters and assertions of a suite.
    Describe { suite: String },
}

pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub parallel: usize,
    pub seed: Option<u64>,
}

/// Result of a completed run, with the files it wrote.
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub reports: Vec<SuiteReport>,
    pub artifacts: Vec<String>,
    pub exit_code: i32,
}

/// Output directory: `HEATLAB_OUT`, then `--out`, then the config, then the default.
pub fn resolve_out_dir(cli_out: Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    if let Some(env) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(env);
    }
    cli_out
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

/// Runs every suite before touching the output directory, so a
/// configuration or numerical error leaves no partial artifacts.
pub fn run_config(cfg: &ExperimentConfig, opts: RunOptions) -> HarnessResult<RunOutcome> {
    if opts.parallel == 0 {
        return Err(HarnessError::config("parallel", "need at least one thread"));
    }
    let hash = config_hash(cfg);
    let default_seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let run_seed = opts.seed.unwrap_or(default_seed);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.parallel)
        .build()
        .map_err(|e| HarnessError::config("parallel", e.to_string()))?;
    let mut reports = pool.install(|| {
        cfg.suites
            .iter()
            .map(|s| run_suite(s, default_seed, opts.seed))
            .collect::<HarnessResult<Vec<_>>>()
    })?;
    let out_dir = resolve_out_dir(opts.out, cfg);
    regression_gate(&out_dir, &hash, &mut reports);
    let artifacts = write_all(&out_dir, &hash, run_seed, &reports)?;
    let exit_code = if reports.iter().all(SuiteReport::passed) {
        exit::PASS
    } else {
        exit::ASSERTION_FAILED
    };
    Ok(RunOutcome { out_dir, reports, artifacts, exit_code })
}

fn run_command(config: PathBuf, opts: RunOptions) -> i32 {
    let text = match std::fs::read_to_string(&config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config.display());
            return exit::CONFIG_ERROR;
        }
    };
    let outcome = parse_config(&text).and_then(|cfg| run_config(&cfg, opts));
    match outcome {
        Ok(o) => {
            for r in &o.reports {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                println!("{status} {} ({} rows, {:.2} s)", r.suite, r.rows.len(), r.wall_clock_s);
                for a in r.failures() {
                    println!(
                        "  failed {}: value {:e}, bound {:e}, tolerance {:e} {}",
                        a.name, a.value, a.bound, a.tolerance, a.detail
                    );
                }
            }
            println!("wrote {} artifacts to {}", o.artifacts.len(), o.out_dir.display());
            o.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn list() -> i32 {
    let width = registry().iter().map(|s| s.name.len()).max().unwrap_or(0);
    let mut out = std::io::stdout().lock();
    for s in registry() {
        // a closed pipe (e.g. `heatlab list | head`) is not an error
        if writeln!(out, "{:width$}  {}", s.name, s.summary).is_err() {
            break;
        }
    }
    exit::PASS
}

fn describe(name: &str) -> i32 {
    let Some(s) = find_suite(name) else {
        eprintln!("error: unknown suite `{name}`; see `heatlab list`");
        return exit::CONFIG_ERROR;
    };
    println!("{}\n\n{}\n\n{}\n", s.name, s.summary, s.statement);
    println!("parameters:");
    for (p, d) in s.params {
        println!("  {p}: {d}");
    }
    println!("tolerances:");
    for (t, v, d) in s.tolerances {
        println!("  {t} = {v:e}: {d}");
    }
    println!("assertions:");
    for a in s.assertions {
        println!("  {a}");
    }
    exit::PASS
}

pub fn dispatch(cli: Cli) -> i32 {
    match cli.command {
        Command::Run { config, out, parallel, seed } => run_command(config, RunOptions { out, parallel, seed }),
        Command::List => list(),
        Command::Describe { suite } => describe(&suite),
    }
}

/// Parses the process arguments and runs; returns the exit code.
pub fn main() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => dispatch(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                exit::CONFIG_ERROR
            } else {
                exit::PASS
            }
        }
    }
}
