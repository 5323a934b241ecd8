//! Benchmark suite: builds problem instances, runs every (method, problem)
//! pair, writes traces and summaries, and computes performance profiles.
//!
//! Output layout under `out_dir`:
//!
//! ```text
//! traces/<problem>__<method>.csv   one trace per run
//! summary.json                     config echo and one entry per run
//! profiles.csv                     method,eps,frac_solved,iter_ratio,time_ratio
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::problems::{
    logistic, poisson, read_libsvm, synth, LogisticProblem, PoissonProblem, PortfolioProblem,
};
use crate::profile::{write_profiles_csv, ProfileRow, ProfileTable, RunSeries};
use crate::sc::ScOracle;
use crate::sets::FeasibleSet;
use crate::solver::{
    certificate_lower_bound, estimate_sigma, fw_solve, lloo_fw_solve, LlooConfig, RunConfig,
    RunTrace,
};
use crate::step::{BacktrackParams, StepPolicy};
use crate::trace_io::{load_trace_csv, save_trace_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Standard,
    Line,
    V1,
    V2,
    Lloo,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Standard, Method::Line, Method::V1, Method::V2, Method::Lloo];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Standard => "standard",
            Method::Line => "line",
            Method::V1 => "v1",
            Method::V2 => "v2",
            Method::Lloo => "lloo",
        }
    }

    /// Step policy for the adaptive driver; `None` for the LLOO driver.
    pub fn policy(&self) -> Option<StepPolicy> {
        match self {
            Method::Standard => Some(StepPolicy::Standard),
            Method::Line => Some(StepPolicy::LineSearch),
            Method::V1 => Some(StepPolicy::V1),
            Method::V2 => Some(StepPolicy::V2(BacktrackParams::default())),
            Method::Lloo => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidInput(format!("unknown method `{s}`")))
    }
}

fn default_radius() -> f64 {
    poisson::DEFAULT_RADIUS
}

/// A problem family entry of the suite config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    /// Synthetic portfolio, one instance per seed.
    Portfolio {
        #[serde(rename = "T")]
        periods: usize,
        n: usize,
    },
    /// Portfolio returns loaded from the `T,n,seed` CSV format.
    PortfolioCsv { path: PathBuf },
    /// Poisson instance from a LIBSVM file, unit counts, raw features as `W`.
    Poisson {
        path: PathBuf,
        #[serde(default = "default_radius")]
        radius: f64,
    },
    /// Logistic regression on a LIBSVM file with +/-1 labels.
    Logistic {
        path: PathBuf,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default)]
        gamma: Option<f64>,
        #[serde(default)]
        intercept: f64,
    },
    /// Synthetic logistic regression, one instance per seed.
    LogisticSynthetic {
        #[serde(rename = "N")]
        samples: usize,
        n: usize,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default)]
        gamma: Option<f64>,
    },
}

impl ProblemSpec {
    fn seeded(&self) -> bool {
        matches!(self, ProblemSpec::Portfolio { .. } | ProblemSpec::LogisticSynthetic { .. })
    }

    fn stem(path: &Path) -> String {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "data".into())
    }

    /// Identifier of the instance built for `seed`.
    pub fn id(&self, seed: u64) -> String {
        match self {
            ProblemSpec::Portfolio { periods, n } => format!("portfolio_T{periods}_n{n}_s{seed}"),
            ProblemSpec::PortfolioCsv { path } => format!("portfolio_{}", Self::stem(path)),
            ProblemSpec::Poisson { path, .. } => format!("poisson_{}", Self::stem(path)),
            ProblemSpec::Logistic { path, .. } => format!("logistic_{}", Self::stem(path)),
            ProblemSpec::LogisticSynthetic { samples, n, .. } => {
                format!("logistic_N{samples}_n{n}_s{seed}")
            }
        }
    }

    pub fn build(&self, seed: u64, exec: Execution) -> Result<Instance> {
        Ok(match self {
            ProblemSpec::Portfolio { periods, n } => Instance::Portfolio(
                PortfolioProblem::new(synth::portfolio_matrix(*periods, *n, seed))?.with_execution(exec),
            ),
            ProblemSpec::PortfolioCsv { path } => {
                let d = synth::load_portfolio_csv(path)?;
                let m = crate::problems::DataMatrix::dense(d.periods, d.assets, d.data)?;
                Instance::Portfolio(PortfolioProblem::new(m)?.with_execution(exec))
            }
            ProblemSpec::Poisson { path, radius } => {
                let data = read_libsvm(path)?;
                let w = data.to_matrix(1)?;
                Instance::Poisson(PoissonProblem::with_unit_counts(w, *radius)?.with_execution(exec))
            }
            ProblemSpec::Logistic {
                path,
                radius,
                gamma,
                intercept,
            } => {
                let data = read_libsvm(path)?;
                let phi = data.to_matrix(1)?;
                let g = gamma.unwrap_or(1.0 / data.len().max(1) as f64);
                Instance::Logistic(
                    LogisticProblem::new(phi, data.labels, *intercept, g, *radius)?.with_execution(exec),
                )
            }
            ProblemSpec::LogisticSynthetic {
                samples,
                n,
                radius,
                gamma,
            } => {
                let (phi, y) = synth::gen_logistic_data(*samples, *n, seed);
                let g = gamma.unwrap_or(1.0 / (*samples).max(1) as f64);
                Instance::Logistic(LogisticProblem::new(phi, y, 0.0, g, *radius)?.with_execution(exec))
            }
        })
    }
}

/// A built problem together with its feasible set.
#[derive(Debug, Clone)]
pub enum Instance {
    Portfolio(PortfolioProblem),
    Poisson(PoissonProblem),
    Logistic(LogisticProblem),
}

impl Instance {
    pub fn oracle(&self) -> &dyn ScOracle {
        match self {
            Instance::Portfolio(p) => p,
            Instance::Poisson(p) => p,
            Instance::Logistic(p) => p,
        }
    }

    pub fn feasible_set(&self) -> Box<dyn FeasibleSet + Send> {
        match self {
            Instance::Portfolio(p) => Box::new(p.feasible_set()),
            Instance::Poisson(p) => Box::new(p.feasible_set()),
            Instance::Logistic(p) => Box::new(p.feasible_set()),
        }
    }

    /// Runs `method` with the tolerances of `base`. The LLOO driver estimates
    /// `sigma_f` at the start point and only accepts simplex instances.
    pub fn run(&self, method: Method, base: &RunConfig) -> Result<RunTrace> {
        match method.policy() {
            Some(policy) => {
                let cfg = RunConfig { policy, ..*base };
                fw_solve(self.oracle(), self.feasible_set().as_ref(), &cfg)
            }
            None => {
                let Instance::Portfolio(p) = self else {
                    return Err(Error::InvalidInput(
                        "the LLOO method needs a simplex-constrained problem".into(),
                    ));
                };
                let simplex = p.feasible_set();
                let sigma = estimate_sigma(p, &simplex.start_point())?;
                let lcfg = LlooConfig::for_simplex(simplex.dim(), sigma);
                lloo_fw_solve(p, &simplex, base, &lcfg)
            }
        }
    }
}

fn default_eps_grid() -> Vec<f64> {
    (1..=8).map(|i| 10f64.powi(-i)).collect()
}

fn default_max_iter() -> usize {
    50_000
}

fn default_gap_tol() -> f64 {
    1e-10
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub problems: Vec<ProblemSpec>,
    pub methods: Vec<Method>,
    #[serde(default = "default_eps_grid")]
    pub eps_grid: Vec<f64>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_gap_tol")]
    pub gap_tol: f64,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    /// Whether independent runs go to the rayon pool.
    #[serde(default)]
    pub execution: Execution,
}

impl SuiteConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: SuiteConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() || self.methods.is_empty() {
            return Err(Error::InvalidInput("suite needs at least one problem and one method".into()));
        }
        if self.eps_grid.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::InvalidInput("eps_grid entries must be positive".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidInput("seeds must not be empty".into()));
        }
        RunConfig {
            epsilon: self.gap_tol,
            max_iter: self.max_iter,
            ..RunConfig::default()
        }
        .validate()
    }

    fn run_config(&self, seed: u64) -> RunConfig {
        RunConfig {
            epsilon: self.gap_tol,
            max_iter: self.max_iter,
            policy: StepPolicy::V1,
            record_times: true,
            seed,
        }
    }
}

/// Summary of one (problem, method) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub problem: String,
    pub method: Method,
    pub seed: u64,
    pub termination: Option<String>,
    pub iterations: usize,
    pub final_f: Option<f64>,
    pub final_gap: Option<f64>,
    pub lower_bound: Option<f64>,
    pub time_ns: u64,
    pub trace_file: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
struct SummaryDoc<'a> {
    config: &'a SuiteConfig,
    runs: &'a [RunSummary],
    best_values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub runs: Vec<RunSummary>,
    pub traces: BTreeMap<(String, String), RunTrace>,
    pub profiles: Vec<ProfileRow>,
}

pub fn trace_file_name(problem: &str, method: &str) -> String {
    format!("{problem}__{method}.csv")
}

fn mkdir(p: &Path) -> Result<()> {
    std::fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

/// Runs the whole grid. Failures of individual runs are recorded in the
/// summary; only I/O on the output directory and profile computation abort.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteResult> {
    config.validate()?;
    let trace_dir = config.out_dir.join("traces");
    mkdir(&trace_dir)?;

    // instances are built once; oracles evaluate sequentially inside a run
    // since runs themselves are spread across the pool
    let mut instances: Vec<(String, u64, std::result::Result<Instance, String>)> = Vec::new();
    for spec in &config.problems {
        let seeds: Vec<u64> = if spec.seeded() {
            config.seeds.clone()
        } else {
            vec![config.seeds[0]]
        };
        for seed in seeds {
            let built = spec
                .build(seed, Execution::Sequential)
                .map_err(|e| e.to_string());
            instances.push((spec.id(seed), seed, built));
        }
    }

    let jobs: Vec<(usize, Method)> = (0..instances.len())
        .flat_map(|i| config.methods.iter().map(move |&m| (i, m)))
        .collect();

    let outcomes: Vec<(RunSummary, Option<RunTrace>)> = config.execution.map_items(&jobs, |&(i, method)| {
        let (id, seed, built) = &instances[i];
        let mut summary = RunSummary {
            problem: id.clone(),
            method,
            seed: *seed,
            termination: None,
            iterations: 0,
            final_f: None,
            final_gap: None,
            lower_bound: None,
            time_ns: 0,
            trace_file: None,
            error: None,
        };
        let result = match built {
            Ok(inst) => inst.run(method, &config.run_config(*seed)),
            Err(e) => Err(Error::InvalidInput(format!("instance construction failed: {e}"))),
        };
        match result {
            Ok(trace) => {
                let name = trace_file_name(id, method.as_str());
                if let Err(e) = save_trace_csv(trace_dir.join(&name), &trace.records) {
                    summary.error = Some(e.to_string());
                } else {
                    summary.trace_file = Some(format!("traces/{name}"));
                }
                let last = trace.last();
                summary.termination = Some(trace.termination.as_str().into());
                summary.iterations = trace.records.len();
                summary.final_f = Some(last.f);
                summary.final_gap = Some(last.gap);
                summary.lower_bound = Some(certificate_lower_bound(&trace));
                summary.time_ns = last.time_ns;
                (summary, Some(trace))
            }
            Err(e) => {
                summary.error = Some(e.to_string());
                (summary, None)
            }
        }
    });

    let mut runs = Vec::with_capacity(outcomes.len());
    let mut traces = BTreeMap::new();
    for (summary, trace) in outcomes {
        if let (Some(t), true) = (trace, summary.trace_file.is_some()) {
            traces.insert((summary.method.as_str().to_string(), summary.problem.clone()), t);
        }
        runs.push(summary);
    }

    let series: BTreeMap<(String, String), RunSeries> = traces
        .iter()
        .map(|(key, t)| {
            (
                key.clone(),
                RunSeries {
                    values: t.records.iter().map(|r| r.f).collect(),
                    times_ns: t.records.iter().map(|r| r.time_ns).collect(),
                },
            )
        })
        .collect();
    let (profiles, best_values) = if series.is_empty() {
        (Vec::new(), BTreeMap::new())
    } else {
        let table = ProfileTable::new(series)?;
        let best = table
            .problems()
            .iter()
            .cloned()
            .zip(table.best_values().iter().copied())
            .collect();
        (table.rows(&config.eps_grid)?, best)
    };

    let summary_path = config.out_dir.join("summary.json");
    let file = std::fs::File::create(&summary_path).map_err(|e| Error::io(&summary_path, e))?;
    serde_json::to_writer_pretty(
        std::io::BufWriter::new(file),
        &SummaryDoc {
            config,
            runs: &runs,
            best_values,
        },
    )?;
    let prof_path = config.out_dir.join("profiles.csv");
    let file = std::fs::File::create(&prof_path).map_err(|e| Error::io(&prof_path, e))?;
    write_profiles_csv(std::io::BufWriter::new(file), &profiles)?;

    Ok(SuiteResult {
        runs,
        traces,
        profiles,
    })
}

/// Rebuilds the profile table from a directory of `<problem>__<method>.csv`
/// traces.
pub fn load_profile_table(trace_dir: impl AsRef<Path>) -> Result<ProfileTable> {
    let dir = trace_dir.as_ref();
    let mut series = BTreeMap::new();
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|s| s.to_str()) != Some("csv") {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let Some((problem, method)) = stem.rsplit_once("__") else {
            continue;
        };
        let rows = load_trace_csv(&path)?;
        series.insert(
            (method.to_string(), problem.to_string()),
            RunSeries {
                values: rows.iter().map(|r| r.f).collect(),
                times_ns: rows.iter().map(|r| r.time_ns).collect(),
            },
        );
    }
    ProfileTable::new(series)
}

/// Recomputes `profiles.csv` rows from stored traces.
pub fn recompute_profiles(trace_dir: impl AsRef<Path>, eps_grid: &[f64]) -> Result<Vec<ProfileRow>> {
    load_profile_table(trace_dir)?.rows(eps_grid)
}

pub fn default_eps() -> Vec<f64> {
    default_eps_grid()
}

pub use logistic::DEFAULT_RADIUS as LOGISTIC_DEFAULT_RADIUS;
