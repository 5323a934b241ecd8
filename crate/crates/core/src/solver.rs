//! Frank-Wolfe drivers: the adaptive method with a pluggable step policy and
//! the linearly convergent variant built on the simplex local oracle.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, step_along, sub};
use crate::lloo::{lloo, simplex_rho};
use crate::sc::{dist_like, gap_with_gradient, ScOracle};
use crate::sets::{FeasibleSet, Simplex};
use crate::step::{
    backtrack_step, exact_line_search, init_lipschitz, standard_step, v1_step, BacktrackState,
    StepPolicy,
};

/// Steps below this size count towards stall detection.
pub const STALL_ALPHA: f64 = 1e-16;
/// Consecutive tiny steps that end a run as stalled.
pub const STALL_PATIENCE: usize = 10;
/// Allowed increase of `f` in one V1 step before the run is aborted.
pub const V1_MONOTONE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Stop once `gap(x^k) <= epsilon`.
    pub epsilon: f64,
    pub max_iter: usize,
    pub policy: StepPolicy,
    pub record_times: bool,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-10,
            max_iter: 50_000,
            policy: StepPolicy::V1,
            record_times: true,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn new(policy: StepPolicy) -> Self {
        Self {
            policy,
            ..Self::default()
        }
    }

    pub fn epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn record_times(mut self, on: bool) -> Self {
        self.record_times = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidInput(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be at least 1".into()));
        }
        if let StepPolicy::V2(p) = self.policy {
            p.validate()?;
        }
        Ok(())
    }
}

/// How the LLOO radius shrinks with the contraction factor `c_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RadiusSchedule {
    /// `r_k = r_0 sqrt(c_k)`, which keeps `r_k² = r_0² c_k`.
    #[default]
    SqrtContraction,
    /// `r_k = r_0 c_k`.
    LinearContraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlooConfig {
    /// Strong-convexity parameter of `f` on the level set of `x^0`.
    pub sigma_f: f64,
    /// Oracle parameter, `sqrt(n)` for the simplex.
    pub rho: f64,
    pub schedule: RadiusSchedule,
}

impl LlooConfig {
    pub fn for_simplex(n: usize, sigma_f: f64) -> Self {
        Self {
            sigma_f,
            rho: simplex_rho(n),
            schedule: RadiusSchedule::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_f > 0.0) || !self.sigma_f.is_finite() {
            return Err(Error::InvalidInput(format!("sigma_f must be positive, got {}", self.sigma_f)));
        }
        if !(self.rho >= 1.0) {
            return Err(Error::InvalidInput(format!("rho must be at least 1, got {}", self.rho)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GapBelowEps,
    MaxIter,
    Stalled,
    /// The last step produced a point outside `dom f` (only possible for
    /// policies without a domain guarantee).
    LeftDomain,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::GapBelowEps => "gap_below_eps",
            Termination::MaxIter => "max_iter",
            Termination::Stalled => "stalled",
            Termination::LeftDomain => "left_domain",
        }
    }
}

/// State at iterate `k` and the step taken from it (`alpha = 0` on the final
/// record of a run that stopped on the gap or iteration cap).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub k: usize,
    pub f: f64,
    pub gap: f64,
    pub alpha: f64,
    pub e: f64,
    /// Accepted Lipschitz estimate (V2).
    #[serde(rename = "L")]
    pub lipschitz: Option<f64>,
    /// Nanoseconds since the run started, taken when the record is complete.
    pub time_ns: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evals: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_decrease: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contraction: Option<f64>,
}

impl IterRecord {
    fn new(k: usize, f: f64, gap: f64, e: f64) -> Self {
        Self {
            k,
            f,
            gap,
            alpha: 0.0,
            e,
            lipschitz: None,
            time_ns: 0,
            evals: None,
            model_decrease: None,
            radius: None,
            contraction: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub method: String,
    pub records: Vec<IterRecord>,
    pub final_x: Vec<f64>,
    pub termination: Termination,
    /// Initial Lipschitz estimate `L_{-1}` for V2 runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_lipschitz: Option<f64>,
}

impl RunTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn last(&self) -> &IterRecord {
        self.records.last().expect("traces hold at least one record")
    }

    /// Smallest finite objective value along the run.
    pub fn best_value(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.f)
            .filter(|f| f.is_finite())
            .fold(f64::INFINITY, f64::min)
    }
}

/// `max_k (f(x^k) - gap(x^k))`, a lower bound on the optimal value.
pub fn certificate_lower_bound(trace: &RunTrace) -> f64 {
    trace
        .records
        .iter()
        .filter(|r| r.f.is_finite())
        .map(|r| r.f - r.gap)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Running maximum of `f(x^k) - gap(x^k)`.
pub fn running_lower_bound(trace: &RunTrace) -> Vec<f64> {
    let mut best = f64::NEG_INFINITY;
    trace
        .records
        .iter()
        .map(|r| {
            if r.f.is_finite() {
                best = best.max(r.f - r.gap);
            }
            best
        })
        .collect()
}

struct Clock {
    start: Instant,
    on: bool,
}

impl Clock {
    fn new(on: bool) -> Self {
        Self {
            start: Instant::now(),
            on,
        }
    }

    fn ns(&self) -> u64 {
        if self.on {
            self.start.elapsed().as_nanos() as u64
        } else {
            0
        }
    }
}

fn start_point<O, S>(oracle: &O, set: &S) -> Result<Vec<f64>>
where
    O: ScOracle + ?Sized,
    S: FeasibleSet + ?Sized,
{
    if oracle.dim() != set.dim() {
        return Err(Error::InvalidInput(format!(
            "oracle dimension {} does not match set dimension {}",
            oracle.dim(),
            set.dim()
        )));
    }
    let x0 = set.start_point();
    if !oracle.in_domain(&x0) {
        return Err(Error::Precondition("start point lies outside dom f".into()));
    }
    Ok(x0)
}

/// Adaptive Frank-Wolfe: `x^{k+1} = x^k + alpha_k (s(x^k) - x^k)` from
/// `set.start_point()` until `gap(x^k) <= epsilon` or `max_iter` steps.
pub fn fw_solve<O, S>(oracle: &O, set: &S, config: &RunConfig) -> Result<RunTrace>
where
    O: ScOracle + ?Sized,
    S: FeasibleSet + ?Sized,
{
    config.validate()?;
    let mut x = start_point(oracle, set)?;
    let clock = Clock::new(config.record_times);
    let sc = oracle.sc_param();
    let mut fx = oracle.value(&x);
    let mut backtrack: Option<BacktrackState> = None;
    let mut records = Vec::new();
    let mut stall = 0usize;
    let mut initial_lipschitz = None;

    for k in 0..=config.max_iter {
        let gr = gap_with_gradient(oracle, set, &x, oracle.gradient(&x)?)?;
        let mut rec = IterRecord::new(k, fx, gr.gap, gr.e);
        if gr.gap <= config.epsilon || k == config.max_iter {
            rec.time_ns = clock.ns();
            records.push(rec);
            let termination = if gr.gap <= config.epsilon {
                Termination::GapBelowEps
            } else {
                Termination::MaxIter
            };
            return Ok(RunTrace {
                method: config.policy.name().to_string(),
                records,
                final_x: x,
                termination,
                initial_lipschitz,
            });
        }

        let v = sub(&gr.target, &x);
        let alpha = match config.policy {
            StepPolicy::Standard => standard_step(k),
            StepPolicy::LineSearch => exact_line_search(oracle, &x, &v, gr.e),
            StepPolicy::V1 => {
                let step = v1_step(gr.gap, gr.e, sc)?;
                rec.model_decrease = Some(step.model_decrease);
                step.alpha
            }
            StepPolicy::V2(params) => {
                if backtrack.is_none() {
                    let l0 = init_lipschitz(oracle, &x, &gr.target)?;
                    initial_lipschitz = Some(l0);
                    backtrack = Some(BacktrackState::new(l0, params)?);
                }
                let state = backtrack.as_mut().expect("initialized above");
                let step = backtrack_step(oracle, &x, &v, fx, gr.gap, state)?;
                rec.lipschitz = step.lipschitz;
                rec.evals = Some(step.evals_used);
                step.alpha
            }
        };
        rec.alpha = alpha;

        let x_next = step_along(&x, alpha, &v);
        let f_next = oracle.value(&x_next);
        rec.time_ns = clock.ns();
        records.push(rec);

        if !f_next.is_finite() {
            return Ok(RunTrace {
                method: config.policy.name().to_string(),
                records,
                final_x: x_next,
                termination: Termination::LeftDomain,
                initial_lipschitz,
            });
        }
        if matches!(config.policy, StepPolicy::V1) && f_next > fx + V1_MONOTONE_SLACK {
            return Err(Error::Invariant(format!(
                "V1 increased the objective at iteration {k}: {fx} -> {f_next}"
            )));
        }
        if let Some(state) = backtrack.as_mut() {
            state.prev_decrease = Some(fx - f_next);
        }

        x = x_next;
        fx = f_next;
        if alpha < STALL_ALPHA {
            stall += 1;
            if stall >= STALL_PATIENCE {
                let gr = gap_with_gradient(oracle, set, &x, oracle.gradient(&x)?)?;
                let mut last = IterRecord::new(k + 1, fx, gr.gap, gr.e);
                last.time_ns = clock.ns();
                records.push(last);
                return Ok(RunTrace {
                    method: config.policy.name().to_string(),
                    records,
                    final_x: x,
                    termination: Termination::Stalled,
                    initial_lipschitz,
                });
            }
        } else {
            stall = 0;
        }
    }
    unreachable!("the loop returns at k == max_iter")
}

/// Frank-Wolfe on the simplex with the local oracle and the step
/// `alpha_k = min(c_k gap(x^0) / ((4/M²) e_k²), 1) / (1 + e_k)`, where
/// `c_k = exp(-½ Σ_{i<k} alpha_i)` and `e_k` is measured at the local point.
pub fn lloo_fw_solve<O>(
    oracle: &O,
    simplex: &Simplex,
    config: &RunConfig,
    lconfig: &LlooConfig,
) -> Result<RunTrace>
where
    O: ScOracle + ?Sized,
{
    if config.epsilon <= 0.0 || config.max_iter == 0 {
        return Err(Error::InvalidInput("epsilon must be positive and max_iter at least 1".into()));
    }
    lconfig.validate()?;
    let mut x = start_point(oracle, simplex)?;
    let clock = Clock::new(config.record_times);
    let kappa = 4.0 / oracle.sc_param().powi(2);
    let mut fx = oracle.value(&x);
    let mut records = Vec::new();
    let mut gap0 = None;
    let mut r0 = 0.0;
    let mut alpha_sum = 0.0_f64;
    let mut stall = 0usize;

    for k in 0..=config.max_iter {
        let grad = oracle.gradient(&x)?;
        let gr = gap_with_gradient(oracle, simplex, &x, grad.clone())?;
        let g0 = *gap0.get_or_insert(gr.gap);
        if k == 0 {
            r0 = (6.0 * g0 / lconfig.sigma_f).sqrt();
        }
        let contraction = (-0.5 * alpha_sum).exp();
        let radius = match lconfig.schedule {
            RadiusSchedule::SqrtContraction => r0 * contraction.sqrt(),
            RadiusSchedule::LinearContraction => r0 * contraction,
        };
        let mut rec = IterRecord::new(k, fx, gr.gap, gr.e);
        rec.radius = Some(radius);
        rec.contraction = Some(contraction);

        let done = gr.gap <= config.epsilon || k == config.max_iter;
        if done || !(radius > 0.0) {
            rec.time_ns = clock.ns();
            records.push(rec);
            let termination = if gr.gap <= config.epsilon {
                Termination::GapBelowEps
            } else if k == config.max_iter {
                Termination::MaxIter
            } else {
                Termination::Stalled
            };
            return Ok(RunTrace {
                method: "lloo".into(),
                records,
                final_x: x,
                termination,
                initial_lipschitz: None,
            });
        }

        let local = lloo(&x, radius, &grad)?.point;
        let e = dist_like(oracle, &x, &local)?;
        let alpha = if e > 0.0 {
            (contraction * g0 / (kappa * e * e)).min(1.0) / (1.0 + e)
        } else {
            1.0
        };
        rec.e = e;
        rec.alpha = alpha;

        let v = sub(&local, &x);
        let x_next = step_along(&x, alpha, &v);
        let f_next = oracle.value(&x_next);
        rec.time_ns = clock.ns();
        records.push(rec);
        if !f_next.is_finite() {
            return Ok(RunTrace {
                method: "lloo".into(),
                records,
                final_x: x_next,
                termination: Termination::LeftDomain,
                initial_lipschitz: None,
            });
        }
        alpha_sum += alpha;
        x = x_next;
        fx = f_next;
        if alpha < STALL_ALPHA || norm2(&v) == 0.0 {
            stall += 1;
            if stall >= STALL_PATIENCE {
                let gr = gap_with_gradient(oracle, simplex, &x, oracle.gradient(&x)?)?;
                let mut last = IterRecord::new(k + 1, fx, gr.gap, gr.e);
                last.time_ns = clock.ns();
                records.push(last);
                return Ok(RunTrace {
                    method: "lloo".into(),
                    records,
                    final_x: x,
                    termination: Termination::Stalled,
                    initial_lipschitz: None,
                });
            }
        } else {
            stall = 0;
        }
    }
    unreachable!("the loop returns at k == max_iter")
}

/// Heuristic strong-convexity estimate: smallest eigenvalue of `∇²f(x)` by 30
/// steps of inverse iteration, each solve done by conjugate gradients on
/// Hessian-vector products. This is a local value, not the level-set minimum.
pub fn estimate_sigma<O: ScOracle + ?Sized>(oracle: &O, x: &[f64]) -> Result<f64> {
    const STEPS: usize = 30;
    let n = oracle.dim();
    let mut u: Vec<f64> = (0..n)
        .map(|i| crate::rng::uniform(0x5167_A5EED, i as u64) - 0.5)
        .collect();
    normalize(&mut u)?;
    for _ in 0..STEPS {
        let mut y = conjugate_gradient(oracle, x, &u, 1e-12, 10 * n.max(10))?;
        normalize(&mut y)?;
        u = y;
    }
    let hu = oracle.hess_vec(x, &u)?;
    let lambda = dot(&hu, &u);
    if !(lambda > 0.0) {
        return Err(Error::Degenerate(format!(
            "estimated smallest Hessian eigenvalue is {lambda}"
        )));
    }
    Ok(lambda)
}

fn normalize(u: &mut [f64]) -> Result<()> {
    let n = norm2(u);
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Degenerate("cannot normalize a zero or non-finite vector".into()));
    }
    u.iter_mut().for_each(|v| *v /= n);
    Ok(())
}

/// Solves `∇²f(x) y = b` by conjugate gradients.
fn conjugate_gradient<O: ScOracle + ?Sized>(
    oracle: &O,
    x: &[f64],
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let n = b.len();
    let mut y = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let stop = rel_tol * rel_tol * rr;
    for _ in 0..max_iter {
        if rr <= stop {
            break;
        }
        let hp = oracle.hess_vec(x, &p)?;
        let php = dot(&p, &hp);
        if !(php > 0.0) {
            return Err(Error::Degenerate("Hessian is not positive definite at x".into()));
        }
        let a = rr / php;
        for i in 0..n {
            y[i] += a * p[i];
            r[i] -= a * hp[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    Ok(y)
}

/// Constants `(a, b)` of the per-step decrease bound
/// `Δ_k >= min(a gap, b gap²)` for V1, given a Lipschitz constant of `∇f` on
/// the initial level set.
pub fn v1_decrease_constants(sc_param: f64, lipschitz: f64, diameter: f64) -> (f64, f64) {
    let c = 1.0 - std::f64::consts::LN_2;
    let a = (0.5f64).min(2.0 * c / (sc_param * lipschitz.sqrt() * diameter));
    let b = c / (lipschitz * diameter * diameter);
    (a, b)
}

/// Lower bound on every LLOO step size, given a Lipschitz constant of `∇f`.
pub fn lloo_step_floor(sigma_f: f64, lipschitz: f64, rho: f64, sc_param: f64, diameter: f64) -> f64 {
    let first = (sigma_f / (6.0 * lipschitz * rho * rho)).min(1.0);
    first / (1.0 + lipschitz.sqrt() * sc_param * diameter / 2.0)
}
