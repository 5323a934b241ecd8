use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use scfw::problems::synth;
use scfw::profile::write_profiles_csv;
use scfw::suite::{self, Method, ProblemSpec, SuiteConfig};
use scfw::trace_io::{save_trace_csv, save_trace_json};
use scfw::{Execution, RunConfig};

#[derive(Parser)]
#[command(name = "scfw", version, about = "Frank-Wolfe methods for self-concordant objectives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemKind {
    Portfolio,
    PortfolioCsv,
    Poisson,
    Logistic,
    LogisticSynthetic,
}

#[derive(Subcommand)]
enum Command {
    /// Run one method on one problem and write its trace.
    Solve {
        #[arg(long, value_enum)]
        problem: ProblemKind,
        /// standard, line, v1, v2 or lloo
        #[arg(long, default_value = "v1")]
        method: String,
        /// Stop once the duality gap is at most this value.
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
        #[arg(long, default_value_t = 50_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trace CSV path; the JSON run record goes next to it.
        #[arg(long)]
        out: PathBuf,
        /// LIBSVM or portfolio CSV input for file-based problems.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long = "T", default_value_t = 50)]
        periods: usize,
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Samples for the synthetic logistic problem.
        #[arg(long = "N", default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 10.0)]
        radius: f64,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        intercept: f64,
        /// Evaluate oracles on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Run a suite described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
    /// Recompute profile metrics from a directory of trace CSVs.
    Profile {
        /// Directory holding `<problem>__<method>.csv` files.
        traces: PathBuf,
        /// Comma-separated relative-error thresholds.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic portfolio returns matrix as CSV.
    GenData {
        #[arg(long = "T")]
        periods: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(serde::Serialize)]
struct SolveRecord<'a> {
    problem: &'a ProblemSpec,
    method: Method,
    eps: f64,
    max_iter: usize,
    seed: u64,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Solve {
            problem,
            method,
            eps,
            max_iter,
            seed,
            out,
            data,
            periods,
            n,
            samples,
            radius,
            gamma,
            intercept,
            sequential,
        } => {
            let method: Method = method.parse()?;
            let need = |d: Option<PathBuf>| d.context("--data is required for this problem");
            let spec = match problem {
                ProblemKind::Portfolio => ProblemSpec::Portfolio { periods, n },
                ProblemKind::PortfolioCsv => ProblemSpec::PortfolioCsv { path: need(data)? },
                ProblemKind::Poisson => ProblemSpec::Poisson {
                    path: need(data)?,
                    radius,
                },
                ProblemKind::Logistic => ProblemSpec::Logistic {
                    path: need(data)?,
                    radius,
                    gamma,
                    intercept,
                },
                ProblemKind::LogisticSynthetic => ProblemSpec::LogisticSynthetic {
                    samples,
                    n,
                    radius,
                    gamma,
                },
            };
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let instance = spec.build(seed, exec)?;
            let mut config = RunConfig::default().epsilon(eps).max_iter(max_iter);
            config.seed = seed;
            let trace = instance.run(method, &config)?;
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            save_trace_csv(&out, &trace.records)?;
            let record = SolveRecord {
                problem: &spec,
                method,
                eps,
                max_iter,
                seed,
            };
            save_trace_json(out.with_extension("json"), &record, &trace)?;
            let last = trace.last();
            println!(
                "{} on {}: {} after {} iterations, f = {:.12e}, gap = {:.3e}",
                method,
                spec.id(seed),
                trace.termination.as_str(),
                trace.iterations(),
                last.f,
                last.gap
            );
        }
        Command::Bench { config } => {
            let cfg = SuiteConfig::from_json_file(&config)?;
            let result = suite::run_suite(&cfg)?;
            let failed = result.runs.iter().filter(|r| r.error.is_some()).count();
            for r in &result.runs {
                match &r.error {
                    Some(e) => eprintln!("{} / {}: error: {e}", r.problem, r.method),
                    None => println!(
                        "{} / {}: {} after {} records",
                        r.problem,
                        r.method,
                        r.termination.as_deref().unwrap_or("-"),
                        r.iterations
                    ),
                }
            }
            println!(
                "{} runs ({} failed), results in {}",
                result.runs.len(),
                failed,
                cfg.out_dir.display()
            );
        }
        Command::Profile { traces, eps, out } => {
            let grid = eps.unwrap_or_else(suite::default_eps);
            let rows = suite::recompute_profiles(&traces, &grid)?;
            match out {
                Some(path) => {
                    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    write_profiles_csv(BufWriter::new(f), &rows)?;
                }
                None => write_profiles_csv(io::stdout().lock(), &rows)?,
            }
        }
        Command::GenData {
            periods,
            n,
            seed,
            out,
        } => {
            if periods == 0 || n == 0 {
                bail!("--T and --n must be positive");
            }
            let data = synth::gen_portfolio_data(periods, n, seed);
            let f = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            let mut w = BufWriter::new(f);
            synth::write_portfolio_csv(&mut w, periods, n, seed, &data)?;
            w.flush()?;
        }
    }
    Ok(())
}
