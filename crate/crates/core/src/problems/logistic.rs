//! l2-regularized logistic regression over an l1-ball.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::dot;
use crate::problems::DataMatrix;
use crate::sc::ScOracle;
use crate::sets::L1Ball;

/// Default l1 radius for logistic instances.
pub const DEFAULT_RADIUS: f64 = 10.0;

/// `ln(1 + e^{-t})` without overflow.
pub fn logistic_loss(t: f64) -> f64 {
    if t > 0.0 {
        (-t).exp().ln_1p()
    } else {
        -t + t.exp().ln_1p()
    }
}

/// `1 / (1 + e^{-t})`
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone)]
pub struct LogisticProblem {
    features: DataMatrix,
    labels: Vec<f64>,
    intercept: f64,
    gamma: f64,
    radius: f64,
    sc_param: f64,
    exec: Execution,
}

impl LogisticProblem {
    pub fn new(
        features: DataMatrix,
        labels: Vec<f64>,
        intercept: f64,
        gamma: f64,
        radius: f64,
    ) -> Result<Self> {
        if labels.len() != features.n_rows() || labels.is_empty() {
            return Err(Error::InvalidInput(format!(
                "logistic: {} labels for {} samples",
                labels.len(),
                features.n_rows()
            )));
        }
        if let Some(i) = labels.iter().position(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::InvalidInput(format!(
                "logistic: label {i} is {}, expected +1 or -1",
                labels[i]
            )));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!("logistic: gamma must be positive, got {gamma}")));
        }
        if !(radius > 0.0) || !radius.is_finite() || !intercept.is_finite() {
            return Err(Error::InvalidInput("logistic: radius must be positive and intercept finite".into()));
        }
        let max_norm = (0..features.n_rows())
            .map(|i| features.row_norm2(i))
            .fold(0.0f64, f64::max);
        // a zero design leaves only the quadratic term, SC for any M
        let sc_param = if max_norm > 0.0 { max_norm / gamma.sqrt() } else { 1.0 };
        Ok(Self {
            features,
            labels,
            intercept,
            gamma,
            radius,
            sc_param,
            exec: Execution::default(),
        })
    }

    /// Intercept 0, `gamma = 1/N`.
    pub fn with_defaults(features: DataMatrix, labels: Vec<f64>, radius: f64) -> Result<Self> {
        let n = labels.len().max(1) as f64;
        Self::new(features, labels, 0.0, 1.0 / n, radius)
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn feasible_set(&self) -> L1Ball {
        L1Ball::new(self.features.n_cols(), self.radius).expect("radius validated")
    }

    fn margin(&self, i: usize, x: &[f64]) -> f64 {
        self.labels[i] * (self.features.row_dot(i, x) + self.intercept)
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(Error::Domain("logistic: point has wrong length or non-finite entries".into()))
        }
    }
}

impl ScOracle for LogisticProblem {
    fn dim(&self) -> usize {
        self.features.n_cols()
    }

    fn sc_param(&self) -> f64 {
        self.sc_param
    }

    fn value(&self, x: &[f64]) -> f64 {
        if !self.in_domain(x) {
            return f64::INFINITY;
        }
        let phi = &self.features;
        let n = phi.n_rows() as f64;
        let loss = self
            .exec
            .sum_rows(phi.n_rows(), phi.work_per_row(), |i| logistic_loss(self.margin(i, x)));
        loss / n + 0.5 * self.gamma * dot(x, x)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        let phi = &self.features;
        let n = phi.n_rows() as f64;
        let mut g = self.exec.accumulate_rows(phi.n_rows(), phi.n_cols(), |i, acc| {
            // ℓ'(t) = -σ(-t)
            let d = -sigmoid(-self.margin(i, x));
            phi.row_axpy(i, d * self.labels[i], acc)
        });
        for (gi, xi) in g.iter_mut().zip(x) {
            *gi = *gi / n + self.gamma * xi;
        }
        Ok(g)
    }

    fn hess_vec(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        let phi = &self.features;
        let n = phi.n_rows() as f64;
        let mut h = self.exec.accumulate_rows(phi.n_rows(), phi.n_cols(), |i, acc| {
            let t = self.margin(i, x);
            let curv = sigmoid(t) * sigmoid(-t);
            let y = self.labels[i];
            phi.row_axpy(i, curv * y * y * phi.row_dot(i, u), acc)
        });
        for (hi, ui) in h.iter_mut().zip(u) {
            *hi = *hi / n + self.gamma * ui;
        }
        Ok(h)
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use approx::assert_abs_diff_eq;

    fn max_row_norm(rows: &[Vec<f64>]) -> f64 {
        rows.iter().map(|r| norm2(r)).fold(0.0, f64::max)
    }

    #[test]
    fn loss_is_stable() {
        assert_abs_diff_eq!(logistic_loss(0.0), 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(logistic_loss(800.0), 0.0, epsilon = 1e-300);
        assert_abs_diff_eq!(logistic_loss(-800.0), 800.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
    }

    #[test]
    fn value_at_origin_is_ln2() {
        let phi = DataMatrix::from_rows(&[vec![1.0, 2.0], vec![-3.0, 0.5], vec![0.0, 1.0]]).unwrap();
        let p = LogisticProblem::new(phi, vec![1.0, -1.0, 1.0], 0.0, 0.3, 10.0).unwrap();
        assert_abs_diff_eq!(p.value(&[0.0, 0.0]), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn single_sample_gradient() {
        let phi = DataMatrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let p = LogisticProblem::new(phi, vec![1.0], 0.0, 1.0, 10.0).unwrap();
        assert_eq!(p.gradient(&[0.0, 0.0]).unwrap(), vec![-0.5, 0.0]);
        assert_eq!(p.sc_param(), 1.0);
    }

    #[test]
    fn hessian_at_origin() {
        let rows = vec![vec![1.0, 2.0], vec![-3.0, 0.5]];
        let phi = DataMatrix::from_rows(&rows).unwrap();
        let gamma = 0.7;
        let p = LogisticProblem::new(phi, vec![1.0, -1.0], 0.0, gamma, 10.0).unwrap();
        let u = [0.3, -1.1];
        let h = p.hess_vec(&[0.0, 0.0], &u).unwrap();
        let mut want = [gamma * u[0], gamma * u[1]];
        for r in &rows {
            let s = 0.25 * (r[0] * u[0] + r[1] * u[1]) / 2.0;
            want[0] += s * r[0];
            want[1] += s * r[1];
        }
        assert_abs_diff_eq!(h[0], want[0], epsilon = 1e-15);
        assert_abs_diff_eq!(h[1], want[1], epsilon = 1e-15);
        assert_abs_diff_eq!(p.sc_param(), max_row_norm(&rows) / gamma.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_labels() {
        let phi = DataMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert!(LogisticProblem::new(phi.clone(), vec![0.0], 0.0, 1.0, 1.0).is_err());
        assert!(LogisticProblem::new(phi, vec![1.0], 0.0, 0.0, 1.0).is_err());
    }
}
