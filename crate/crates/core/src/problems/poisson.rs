//! Poisson inverse problem: `f(x) = Σ_i w_iᵀx - Σ_i y_i ln(w_iᵀx)` over
//! `{x >= 0, ‖x‖₁ <= R}`.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::problems::DataMatrix;
use crate::sc::ScOracle;
use crate::sets::NonnegL1Ball;

/// Default l1 radius for Poisson instances.
pub const DEFAULT_RADIUS: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct PoissonProblem {
    design: DataMatrix,
    counts: Vec<f64>,
    radius: f64,
    sc_param: f64,
    exec: Execution,
}

impl PoissonProblem {
    /// `design` has nonnegative rows `w_i`; `counts` are nonnegative integers.
    /// Every row with a positive count needs at least one positive entry.
    pub fn new(design: DataMatrix, counts: Vec<f64>, radius: f64) -> Result<Self> {
        if counts.len() != design.n_rows() {
            return Err(Error::InvalidInput(format!(
                "poisson: {} counts for {} rows",
                counts.len(),
                design.n_rows()
            )));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!("poisson: radius must be positive, got {radius}")));
        }
        let mut sc_param: f64 = 0.0;
        for (i, &y) in counts.iter().enumerate() {
            if !(y >= 0.0) || y.fract() != 0.0 || !y.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "poisson: count {i} must be a nonnegative integer, got {y}"
                )));
            }
            let mut positive = false;
            for (j, v) in design.row_entries(i) {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "poisson: design entry ({i}, {j}) must be nonnegative, got {v}"
                    )));
                }
                positive |= v > 0.0;
            }
            if y > 0.0 {
                if !positive {
                    return Err(Error::InvalidInput(format!(
                        "poisson: row {i} has count {y} but no positive entry"
                    )));
                }
                sc_param = sc_param.max(2.0 / y.sqrt());
            }
        }
        if sc_param == 0.0 {
            // purely linear objective: self-concordant for any M
            sc_param = 2.0;
        }
        Ok(Self {
            design,
            counts,
            radius,
            sc_param,
            exec: Execution::default(),
        })
    }

    /// Unit counts for every row, the convention used for classification data.
    pub fn with_unit_counts(design: DataMatrix, radius: f64) -> Result<Self> {
        let m = design.n_rows();
        Self::new(design, vec![1.0; m], radius)
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn feasible_set(&self) -> NonnegL1Ball {
        NonnegL1Ball::new(self.design.n_cols(), self.radius).expect("radius validated")
    }

    fn check(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::InvalidInput("poisson: dimension mismatch".into()));
        }
        let w = &self.design;
        let d = self
            .exec
            .map_rows(w.n_rows(), w.work_per_row(), |i| w.row_dot(i, x));
        let ok = d
            .iter()
            .zip(&self.counts)
            .all(|(&v, &y)| v.is_finite() && (y == 0.0 || v > 0.0));
        if ok {
            Ok(d)
        } else {
            Err(Error::Domain("poisson: w_iᵀx <= 0 for a row with positive count".into()))
        }
    }
}

impl ScOracle for PoissonProblem {
    fn dim(&self) -> usize {
        self.design.n_cols()
    }

    fn sc_param(&self) -> f64 {
        self.sc_param
    }

    fn value(&self, x: &[f64]) -> f64 {
        if x.len() != self.dim() {
            return f64::INFINITY;
        }
        let w = &self.design;
        let y = &self.counts;
        let v = self.exec.sum_rows(w.n_rows(), w.work_per_row(), |i| {
            let d = w.row_dot(i, x);
            if y[i] == 0.0 {
                d
            } else if d > 0.0 {
                d - y[i] * d.ln()
            } else {
                f64::INFINITY
            }
        });
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let d = self.check(x)?;
        let w = &self.design;
        let y = &self.counts;
        Ok(self.exec.accumulate_rows(w.n_rows(), w.n_cols(), |i, acc| {
            let scale = if y[i] == 0.0 { 1.0 } else { 1.0 - y[i] / d[i] };
            w.row_axpy(i, scale, acc)
        }))
    }

    fn hess_vec(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let d = self.check(x)?;
        let w = &self.design;
        let y = &self.counts;
        Ok(self.exec.accumulate_rows(w.n_rows(), w.n_cols(), |i, acc| {
            if y[i] > 0.0 {
                let wu = w.row_dot(i, u);
                w.row_axpy(i, y[i] * wu / (d[i] * d[i]), acc)
            }
        }))
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        self.value(x).is_finite()
    }
}
