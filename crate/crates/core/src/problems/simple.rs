//! Small closed-form oracles used in examples and tests.

use crate::error::{Error, Result};
use crate::sc::ScOracle;

/// `f(x) = -Σ ln x_i` on the positive orthant, `M = 2`.
#[derive(Debug, Clone)]
pub struct LogBarrier {
    dim: usize,
}

impl LogBarrier {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl ScOracle for LogBarrier {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sc_param(&self) -> f64 {
        2.0
    }

    fn value(&self, x: &[f64]) -> f64 {
        if self.in_domain(x) {
            -x.iter().map(|v| v.ln()).sum::<f64>()
        } else {
            f64::INFINITY
        }
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        if !self.in_domain(x) {
            return Err(Error::Domain("log barrier: nonpositive coordinate".into()));
        }
        Ok(x.iter().map(|v| -1.0 / v).collect())
    }

    fn hess_vec(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        if !self.in_domain(x) {
            return Err(Error::Domain("log barrier: nonpositive coordinate".into()));
        }
        Ok(x.iter().zip(u).map(|(v, w)| w / (v * v)).collect())
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.dim && x.iter().all(|&v| v > 0.0 && v.is_finite())
    }
}

/// `f(x) = ½ Σ d_i x_i²` with `d_i > 0`. Convex quadratics are self-concordant
/// for every `M > 0`, so `M` is a free parameter.
#[derive(Debug, Clone)]
pub struct DiagQuadratic {
    diag: Vec<f64>,
    sc_param: f64,
}

impl DiagQuadratic {
    pub fn new(diag: Vec<f64>, sc_param: f64) -> Result<Self> {
        if diag.iter().any(|&d| !(d > 0.0)) || !(sc_param > 0.0) {
            return Err(Error::InvalidInput(
                "diagonal quadratic needs positive curvature and M > 0".into(),
            ));
        }
        Ok(Self { diag, sc_param })
    }

    pub fn identity(dim: usize, sc_param: f64) -> Self {
        Self::new(vec![1.0; dim], sc_param).expect("positive identity diagonal")
    }
}

impl ScOracle for DiagQuadratic {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn sc_param(&self) -> f64 {
        self.sc_param
    }

    fn value(&self, x: &[f64]) -> f64 {
        if !self.in_domain(x) {
            return f64::INFINITY;
        }
        0.5 * self.diag.iter().zip(x).map(|(d, v)| d * v * v).sum::<f64>()
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        if !self.in_domain(x) {
            return Err(Error::Domain("quadratic: non-finite point".into()));
        }
        Ok(self.diag.iter().zip(x).map(|(d, v)| d * v).collect())
    }

    fn hess_vec(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        if !self.in_domain(x) {
            return Err(Error::Domain("quadratic: non-finite point".into()));
        }
        Ok(self.diag.iter().zip(u).map(|(d, w)| d * w).collect())
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.diag.len() && x.iter().all(|v| v.is_finite())
    }
}
