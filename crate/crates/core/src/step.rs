//! Step-size policies: the classical `2/(k+2)` schedule, exact line search,
//! the analytic self-concordant step (V1) and backtracking on a local
//! Lipschitz estimate (V2).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, step_along, sub};
use crate::sc::{omega_star, ScOracle};

/// Final bracket width of the golden-section search.
pub const LINE_SEARCH_WIDTH: f64 = 1e-10;

/// Fraction of the Dikin radius `1/e` the line search may probe.
pub const LINE_SEARCH_DIKIN_FRACTION: f64 = 0.99;

/// Maximum number of increases of the Lipschitz estimate in one backtrack.
pub const MAX_BACKTRACKS: usize = 100;

/// Step used to build the initial Lipschitz estimate.
pub const INIT_LIPSCHITZ_EPS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepPolicy {
    /// `2 / (k + 2)`
    Standard,
    /// Golden-section line search capped inside the Dikin ellipsoid.
    LineSearch,
    /// Analytic step minimizing the self-concordant upper model.
    V1,
    /// Backtracking on the quadratic model with an adaptive Lipschitz estimate.
    V2(BacktrackParams),
}

impl StepPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            StepPolicy::Standard => "standard",
            StepPolicy::LineSearch => "line",
            StepPolicy::V1 => "v1",
            StepPolicy::V2(_) => "v2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacktrackParams {
    /// Multiplier applied to the estimate when sufficient decrease fails (> 1).
    pub gamma_u: f64,
    /// Lower end of the window for the first trial estimate (in (0, 1)).
    pub gamma_d: f64,
}

impl Default for BacktrackParams {
    fn default() -> Self {
        Self {
            gamma_u: 2.0,
            gamma_d: 0.9,
        }
    }
}

impl BacktrackParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_u > 1.0) || !(self.gamma_d > 0.0 && self.gamma_d < 1.0) {
            return Err(Error::InvalidInput(format!(
                "backtracking needs gamma_u > 1 and gamma_d in (0, 1), got {} and {}",
                self.gamma_u, self.gamma_d
            )));
        }
        Ok(())
    }
}

/// Mutable state carried by V2 across iterations of a single run.
#[derive(Debug, Clone, PartialEq)]
pub struct BacktrackState {
    /// Current Lipschitz estimate `L_k`.
    pub lipschitz: f64,
    pub params: BacktrackParams,
    /// Cumulative number of sufficient-decrease evaluations `N_k`.
    pub eval_count: u64,
    /// `f(x^{k-1}) - f(x^k)`; `None` before the first step.
    pub prev_decrease: Option<f64>,
}

impl BacktrackState {
    pub fn new(initial_lipschitz: f64, params: BacktrackParams) -> Result<Self> {
        params.validate()?;
        if !(initial_lipschitz > 0.0) || !initial_lipschitz.is_finite() {
            return Err(Error::InvalidInput(format!(
                "initial Lipschitz estimate must be positive, got {initial_lipschitz}"
            )));
        }
        Ok(Self {
            lipschitz: initial_lipschitz,
            params,
            eval_count: 0,
            prev_decrease: None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub alpha: f64,
    /// Accepted Lipschitz estimate (V2 only).
    pub lipschitz: Option<f64>,
    pub evals_used: u64,
    /// Guaranteed decrease `alpha gap - (4/M²) ω*(alpha e)` of the V1 model.
    pub model_decrease: f64,
}

pub fn standard_step(k: usize) -> f64 {
    2.0 / (k as f64 + 2.0)
}

/// The V1 step `min(1, gap / (e (gap + (4/M²) e)))`.
pub fn v1_step(gap: f64, e: f64, sc_param: f64) -> Result<StepResult> {
    if !(gap > 0.0) {
        return Err(Error::Precondition(format!("v1_step requires gap > 0, got {gap}")));
    }
    if !(e >= 0.0) {
        return Err(Error::Precondition(format!("v1_step requires e >= 0, got {e}")));
    }
    let kappa = 4.0 / (sc_param * sc_param);
    let alpha = if e == 0.0 {
        1.0
    } else {
        let t = gap / (e * (gap + kappa * e));
        t.min(1.0)
    };
    let ae = alpha * e;
    if !(ae < 1.0) {
        return Err(Error::Invariant(format!(
            "V1 step leaves the Dikin ellipsoid: alpha * e = {ae}"
        )));
    }
    let model_decrease = alpha * gap - kappa * omega_star(ae)?;
    Ok(StepResult {
        alpha,
        lipschitz: None,
        evals_used: 0,
        model_decrease,
    })
}

/// Golden-section minimizer of a function on `[lo, hi]` down to `width`.
/// Non-finite values count as `+inf`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut phi: F, lo: f64, hi: f64, width: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut eval = |t: f64| {
        let v = phi(t);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    while b - a > width {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    0.5 * (a + b)
}

/// Exact line search for `t -> f(x + t v)` over `[0, min(1, 0.99 / e)]`.
///
/// Returns 0 when no probed step beats `f(x)`.
pub fn exact_line_search<O: ScOracle + ?Sized>(oracle: &O, x: &[f64], v: &[f64], e: f64) -> f64 {
    let t_max = if e > 0.0 {
        (LINE_SEARCH_DIKIN_FRACTION / e).min(1.0)
    } else {
        1.0
    };
    let phi = |t: f64| oracle.value(&step_along(x, t, v));
    let t = golden_section(phi, 0.0, t_max, LINE_SEARCH_WIDTH);
    let f0 = phi(0.0);
    let (t, ft) = {
        let ft = phi(t);
        let fmax = phi(t_max);
        // the search brackets the interior minimizer; the cap itself can be
        // best when the function keeps decreasing up to it
        if fmax < ft {
            (t_max, fmax)
        } else {
            (t, ft)
        }
    };
    if ft < f0 {
        t
    } else {
        0.0
    }
}

/// Quadratic model `f(x) - t gap + (t² mu / 2) ‖v‖²`.
#[inline]
pub fn quadratic_model(fx: f64, t: f64, gap: f64, mu: f64, v_sq: f64) -> f64 {
    fx - t * gap + 0.5 * t * t * mu * v_sq
}

/// Backtracking from a given trial estimate `mu0`: increases `mu` by `gamma_u`
/// until `f(x + alpha v) <= Q(x, alpha, mu)` with `alpha = min(gap / (mu ‖v‖²), 1)`.
pub fn backtrack_from<O: ScOracle + ?Sized>(
    oracle: &O,
    x: &[f64],
    v: &[f64],
    fx: f64,
    gap: f64,
    mu0: f64,
    gamma_u: f64,
) -> Result<StepResult> {
    let v_sq = dot(v, v);
    if !(v_sq > 0.0) {
        return Err(Error::Precondition("backtracking along a zero direction".into()));
    }
    if !(gap > 0.0) {
        return Err(Error::Precondition(format!("backtracking requires gap > 0, got {gap}")));
    }
    let mut mu = mu0;
    for evals in 1..=MAX_BACKTRACKS as u64 + 1 {
        let alpha = (gap / (mu * v_sq)).min(1.0);
        let trial = oracle.value(&step_along(x, alpha, v));
        if trial <= quadratic_model(fx, alpha, gap, mu, v_sq) {
            return Ok(StepResult {
                alpha,
                lipschitz: Some(mu),
                evals_used: evals,
                model_decrease: 0.0,
            });
        }
        mu *= gamma_u;
    }
    Err(Error::Nontermination(MAX_BACKTRACKS))
}

/// One V2 step: picks the trial estimate in `[gamma_d L, L]` by the clipping
/// heuristic, backtracks, and updates `state`.
pub fn backtrack_step<O: ScOracle + ?Sized>(
    oracle: &O,
    x: &[f64],
    v: &[f64],
    fx: f64,
    gap: f64,
    state: &mut BacktrackState,
) -> Result<StepResult> {
    let l = state.lipschitz;
    let lo = state.params.gamma_d * l;
    let v_sq = dot(v, v);
    let mu0 = match state.prev_decrease {
        Some(dec) if dec > 0.0 && v_sq > 0.0 => {
            let guess = gap * gap / (2.0 * dec * v_sq);
            if guess.is_finite() {
                guess.clamp(lo, l)
            } else {
                lo
            }
        }
        _ => lo,
    };
    let res = backtrack_from(oracle, x, v, fx, gap, mu0, state.params.gamma_u)?;
    state.eval_count += res.evals_used;
    if let Some(mu) = res.lipschitz {
        state.lipschitz = mu;
    }
    Ok(res)
}

/// `‖∇f(x0) - ∇f(x0 + eps (s0 - x0))‖ / (eps ‖s0 - x0‖)` with `eps = 1e-3`,
/// halved until the probe lies in `dom f`.
pub fn init_lipschitz<O: ScOracle + ?Sized>(oracle: &O, x0: &[f64], s0: &[f64]) -> Result<f64> {
    let d = sub(s0, x0);
    let dn = norm2(&d);
    if dn == 0.0 {
        return Err(Error::Degenerate("init_lipschitz: s0 equals x0".into()));
    }
    let g0 = oracle.gradient(x0)?;
    let mut eps = INIT_LIPSCHITZ_EPS;
    for _ in 0..=60 {
        let probe = step_along(x0, eps, &d);
        if oracle.in_domain(&probe) {
            let g1 = oracle.gradient(&probe)?;
            let l = norm2(&sub(&g0, &g1)) / (eps * dn);
            if l > 0.0 && l.is_finite() {
                return Ok(l);
            }
            return Err(Error::Degenerate(format!(
                "init_lipschitz: gradient difference gives estimate {l}"
            )));
        }
        eps *= 0.5;
    }
    Err(Error::Domain("init_lipschitz: no probe along s0 - x0 lies in dom f".into()))
}
