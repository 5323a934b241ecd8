//! Log-optimal portfolio selection: `f(x) = -Σ_t ln(r_tᵀ x)` over the simplex.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::problems::DataMatrix;
use crate::sc::ScOracle;
use crate::sets::Simplex;

#[derive(Debug, Clone)]
pub struct PortfolioProblem {
    returns: DataMatrix,
    exec: Execution,
}

impl PortfolioProblem {
    /// `returns` holds one period of price ratios per row; every entry must
    /// be positive.
    pub fn new(returns: DataMatrix) -> Result<Self> {
        for i in 0..returns.n_rows() {
            let mut count = 0;
            for (j, v) in returns.row_entries(i) {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "portfolio returns must be positive, entry ({i}, {j}) is {v}"
                    )));
                }
                count += 1;
            }
            if count != returns.n_cols() {
                return Err(Error::InvalidInput(format!(
                    "portfolio returns must be positive, row {i} has implicit zeros"
                )));
            }
        }
        if returns.n_rows() == 0 || returns.n_cols() == 0 {
            return Err(Error::InvalidInput("empty returns matrix".into()));
        }
        Ok(Self {
            returns,
            exec: Execution::default(),
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn returns(&self) -> &DataMatrix {
        &self.returns
    }

    pub fn feasible_set(&self) -> Simplex {
        Simplex::new(self.returns.n_cols())
    }

    fn dots(&self, x: &[f64]) -> Vec<f64> {
        let r = &self.returns;
        self.exec
            .map_rows(r.n_rows(), r.work_per_row(), |t| r.row_dot(t, x))
    }

    fn check(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::InvalidInput("portfolio: dimension mismatch".into()));
        }
        let d = self.dots(x);
        if d.iter().all(|&v| v > 0.0 && v.is_finite()) {
            Ok(d)
        } else {
            Err(Error::Domain("portfolio: some period has nonpositive wealth".into()))
        }
    }
}

impl ScOracle for PortfolioProblem {
    fn dim(&self) -> usize {
        self.returns.n_cols()
    }

    fn sc_param(&self) -> f64 {
        2.0
    }

    fn value(&self, x: &[f64]) -> f64 {
        if x.len() != self.dim() {
            return f64::INFINITY;
        }
        let r = &self.returns;
        let v = self.exec.sum_rows(r.n_rows(), r.work_per_row(), |t| {
            let d = r.row_dot(t, x);
            if d > 0.0 {
                -d.ln()
            } else {
                f64::INFINITY
            }
        });
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let d = self.check(x)?;
        let r = &self.returns;
        Ok(self
            .exec
            .accumulate_rows(r.n_rows(), r.n_cols(), |t, acc| r.row_axpy(t, -1.0 / d[t], acc)))
    }

    fn hess_vec(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let d = self.check(x)?;
        let r = &self.returns;
        Ok(self.exec.accumulate_rows(r.n_rows(), r.n_cols(), |t, acc| {
            let ru = r.row_dot(t, u);
            r.row_axpy(t, ru / (d[t] * d[t]), acc)
        }))
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        self.value(x).is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn single(r: Vec<f64>) -> PortfolioProblem {
        PortfolioProblem::new(DataMatrix::from_rows(&[r]).unwrap()).unwrap()
    }

    #[test]
    fn flat_returns() {
        let p = single(vec![1.0, 1.0]);
        assert_eq!(p.value(&[0.5, 0.5]), 0.0);
        assert_eq!(p.gradient(&[0.5, 0.5]).unwrap(), vec![-1.0, -1.0]);
    }

    #[test]
    fn hand_computed_single_period() {
        let p = single(vec![2.0, 1.0]);
        let x = [0.5, 0.5];
        assert_abs_diff_eq!(p.value(&x), -(1.5f64.ln()), epsilon = 1e-15);
        let g = p.gradient(&x).unwrap();
        assert_abs_diff_eq!(g[0], -4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g[1], -2.0 / 3.0, epsilon = 1e-15);
        let h = p.hess_vec(&x, &[1.0, 0.0]).unwrap();
        // r r^T e1 / (r.x)^2 = (4, 2) / 2.25
        assert_abs_diff_eq!(h[0], 16.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h[1], 8.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn outside_domain() {
        let p = single(vec![2.0, 1.0]);
        assert_eq!(p.value(&[-1.0, 0.5]), f64::INFINITY);
        assert!(!p.in_domain(&[-1.0, 0.5]));
        assert!(matches!(p.gradient(&[-1.0, 0.5]), Err(Error::Domain(_))));
        assert!(matches!(p.hess_vec(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_nonpositive_entries() {
        let m = DataMatrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        assert!(PortfolioProblem::new(m).is_err());
    }
}
