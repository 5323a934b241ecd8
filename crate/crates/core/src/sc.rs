//! Self-concordant function machinery: the oracle contract, the `omega` pair
//! bounding an SC function around its linearization, local norms and the
//! Frank-Wolfe duality gap.

use crate::error::{Error, Result};
use crate::linalg::{dot, sub};
use crate::sets::FeasibleSet;

/// Below this magnitude `omega`/`omega_star` switch to their power series.
const SERIES_CUTOFF: f64 = 1e-4;

/// Round-off allowance for the duality gap, relative to `max(1, |<g, x>|)`.
const GAP_SLACK: f64 = 1e-12;

/// Evaluation interface for a self-concordant function `f` with parameter `M`.
///
/// `value` never fails: outside `dom f` it returns `+inf` so that step-size
/// probes are cheap to reject. `gradient` and `hess_vec` return
/// [`Error::Domain`] outside `dom f`.
///
/// Implementations are immutable after construction and may be shared across
/// threads.
pub trait ScOracle: Sync {
    fn dim(&self) -> usize;

    /// Self-concordance parameter `M`.
    fn sc_param(&self) -> f64;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// `∇²f(x) u`, computed without materializing the Hessian.
    fn hess_vec(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>>;

    fn in_domain(&self, x: &[f64]) -> bool;
}

/// `ω(t) = t - ln(1 + t)` for `t > -1`.
pub fn omega(t: f64) -> Result<f64> {
    if !(t > -1.0) {
        return Err(Error::Domain(format!("omega requires t > -1, got {t}")));
    }
    if t.abs() < SERIES_CUTOFF {
        // Σ_{j=2..7} (-1)^j t^j / j
        let mut sum = 0.0;
        let mut pow = t;
        for j in 2..=7 {
            pow *= t;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * pow / j as f64;
        }
        return Ok(sum);
    }
    Ok(t - t.ln_1p())
}

/// `ω*(t) = -t - ln(1 - t)` for `t < 1`.
pub fn omega_star(t: f64) -> Result<f64> {
    if !(t < 1.0) {
        return Err(Error::Domain(format!("omega_star requires t < 1, got {t}")));
    }
    if t.abs() < SERIES_CUTOFF {
        // Σ_{j=2..7} t^j / j
        let mut sum = 0.0;
        let mut pow = t;
        for j in 2..=7 {
            pow *= t;
            sum += pow / j as f64;
        }
        return Ok(sum);
    }
    Ok(-t - (-t).ln_1p())
}

fn require_domain<O: ScOracle + ?Sized>(oracle: &O, x: &[f64], what: &str) -> Result<()> {
    if oracle.in_domain(x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what}: point outside dom f")))
    }
}

/// Local norm `‖u‖_x = sqrt(<∇²f(x) u, u>)`.
pub fn local_norm<O: ScOracle + ?Sized>(oracle: &O, x: &[f64], u: &[f64]) -> Result<f64> {
    require_domain(oracle, x, "local_norm")?;
    let hu = oracle.hess_vec(x, u)?;
    let q = dot(&hu, u);
    let scale = 1.0 + dot(u, u);
    if q < -1e-12 * scale {
        return Err(Error::Invariant(format!(
            "negative curvature <H u, u> = {q:e} in local_norm"
        )));
    }
    Ok(q.max(0.0).sqrt())
}

/// `d(x, y) = (M / 2) ‖y - x‖_x`.
pub fn dist_like<O: ScOracle + ?Sized>(oracle: &O, x: &[f64], y: &[f64]) -> Result<f64> {
    let u = sub(y, x);
    Ok(0.5 * oracle.sc_param() * local_norm(oracle, x, &u)?)
}

/// Bregman divergence `f(y) - f(x) - <∇f(x), y - x>`.
pub fn bregman<O: ScOracle + ?Sized>(oracle: &O, y: &[f64], x: &[f64]) -> Result<f64> {
    require_domain(oracle, y, "bregman")?;
    require_domain(oracle, x, "bregman")?;
    let g = oracle.gradient(x)?;
    let d = sub(y, x);
    Ok(oracle.value(y) - oracle.value(x) - dot(&g, &d))
}

/// Frank-Wolfe target, duality gap and the SC step controller at one point.
#[derive(Debug, Clone)]
pub struct GapResult {
    /// `s(x)`, the LMO answer for `∇f(x)`.
    pub target: Vec<f64>,
    /// `<∇f(x), x - s(x)>`, clamped at zero after the round-off check.
    pub gap: f64,
    /// `e(x) = (M/2) ‖s(x) - x‖_x`.
    pub e: f64,
    /// `<∇f(x), s(x)>`.
    pub lmo_value: f64,
    pub gradient: Vec<f64>,
}

/// Computes `s(x)`, `gap(x)` and `e(x)`.
pub fn gap_and_target<O, S>(oracle: &O, set: &S, x: &[f64]) -> Result<GapResult>
where
    O: ScOracle + ?Sized,
    S: FeasibleSet + ?Sized,
{
    if !oracle.in_domain(x) {
        return Err(Error::Precondition("gap_and_target: x outside dom f".into()));
    }
    if !set.contains(x) {
        return Err(Error::Precondition("gap_and_target: x outside the feasible set".into()));
    }
    let gradient = oracle.gradient(x)?;
    gap_with_gradient(oracle, set, x, gradient)
}

/// Same as [`gap_and_target`] with a gradient the caller already holds.
pub(crate) fn gap_with_gradient<O, S>(
    oracle: &O,
    set: &S,
    x: &[f64],
    gradient: Vec<f64>,
) -> Result<GapResult>
where
    O: ScOracle + ?Sized,
    S: FeasibleSet + ?Sized,
{
    let target = set.lmo(&gradient)?;
    let gx = dot(&gradient, x);
    let lmo_value = dot(&gradient, &target);
    let gap = checked_gap(gx - lmo_value, gx)?;
    let e = dist_like(oracle, x, &target)?;
    Ok(GapResult {
        target,
        gap,
        e,
        lmo_value,
        gradient,
    })
}

pub(crate) fn checked_gap(raw: f64, scale: f64) -> Result<f64> {
    if raw < -GAP_SLACK * scale.abs().max(1.0) || raw.is_nan() {
        return Err(Error::Invariant(format!(
            "duality gap {raw:e} is negative beyond round-off; the LMO is not optimal"
        )));
    }
    Ok(raw.max(0.0))
}
