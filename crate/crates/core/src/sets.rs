//! Compact convex feasible sets with exact linear minimization oracles.
//!
//! Ties in every oracle go to the lowest index, so runs are deterministic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on linear constraints in `contains`.
pub const CONTAINS_TOL: f64 = 1e-9;

/// A compact convex set accessed through its linear minimization oracle.
pub trait FeasibleSet: Sync {
    fn dim(&self) -> usize;

    /// A minimizer of `<c, s>` over the set.
    fn lmo(&self, c: &[f64]) -> Result<Vec<f64>>;

    /// Membership with tolerance [`CONTAINS_TOL`].
    fn contains(&self, x: &[f64]) -> bool;

    /// Euclidean diameter.
    fn diameter(&self) -> f64;

    /// A point in the relative interior.
    fn start_point(&self) -> Vec<f64>;
}

fn check_cost(c: &[f64], dim: usize) -> Result<()> {
    if c.len() != dim {
        return Err(Error::InvalidInput(format!(
            "cost vector has length {}, set dimension is {dim}",
            c.len()
        )));
    }
    if let Some(i) = c.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite cost entry at index {i}")));
    }
    Ok(())
}

/// First index of the minimum entry.
pub(crate) fn argmin(c: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in c.iter().enumerate().skip(1) {
        if v < c[best] {
            best = i;
        }
    }
    best
}

fn unit(dim: usize, i: usize, scale: f64) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = scale;
    v
}

/// Vertex `e_i` of the unit simplex with `i = argmin c`.
pub fn lmo_simplex(c: &[f64]) -> Result<Vec<f64>> {
    if c.is_empty() {
        return Err(Error::InvalidInput("empty cost vector".into()));
    }
    check_cost(c, c.len())?;
    Ok(unit(c.len(), argmin(c), 1.0))
}

/// `-sign(c_i) R e_i` with `i = argmax |c_i|`; `sign(0)` is `+1`.
pub fn lmo_l1ball(c: &[f64], radius: f64) -> Result<Vec<f64>> {
    if c.is_empty() {
        return Err(Error::InvalidInput("empty cost vector".into()));
    }
    check_cost(c, c.len())?;
    check_radius(radius)?;
    let mut best = 0;
    for (i, v) in c.iter().enumerate().skip(1) {
        if v.abs() > c[best].abs() {
            best = i;
        }
    }
    let sign = if c[best] < 0.0 { -1.0 } else { 1.0 };
    Ok(unit(c.len(), best, -sign * radius))
}

/// Origin when `c >= 0`, else `R e_i` with `i = argmin c`.
pub fn lmo_nonneg_l1(c: &[f64], radius: f64) -> Result<Vec<f64>> {
    if c.is_empty() {
        return Err(Error::InvalidInput("empty cost vector".into()));
    }
    check_cost(c, c.len())?;
    check_radius(radius)?;
    let i = argmin(c);
    if c[i] >= 0.0 {
        Ok(vec![0.0; c.len()])
    } else {
        Ok(unit(c.len(), i, radius))
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("radius must be positive, got {radius}")))
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(Error::InvalidInput("set dimension must be positive".into()))
    } else {
        Ok(())
    }
}

/// The unit simplex `{x >= 0, Σ x = 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    dim: usize,
}

impl Simplex {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "simplex dimension must be positive");
        Self { dim }
    }

    pub fn vertices(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| unit(self.dim, i, 1.0)).collect()
    }
}

impl FeasibleSet for Simplex {
    fn dim(&self) -> usize {
        self.dim
    }

    fn lmo(&self, c: &[f64]) -> Result<Vec<f64>> {
        check_cost(c, self.dim)?;
        lmo_simplex(c)
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x.iter().all(|&v| v >= -CONTAINS_TOL)
            && (x.iter().sum::<f64>() - 1.0).abs() <= CONTAINS_TOL
    }

    fn diameter(&self) -> f64 {
        if self.dim == 1 {
            0.0
        } else {
            std::f64::consts::SQRT_2
        }
    }

    fn start_point(&self) -> Vec<f64> {
        vec![1.0 / self.dim as f64; self.dim]
    }
}

/// The l1-ball `{‖x‖₁ <= R}`.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Ball {
    dim: usize,
    radius: f64,
}

impl L1Ball {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        check_radius(radius)?;
        Ok(Self { dim, radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn vertices(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .flat_map(|i| [unit(self.dim, i, self.radius), unit(self.dim, i, -self.radius)])
            .collect()
    }
}

impl FeasibleSet for L1Ball {
    fn dim(&self) -> usize {
        self.dim
    }

    fn lmo(&self, c: &[f64]) -> Result<Vec<f64>> {
        check_cost(c, self.dim)?;
        lmo_l1ball(c, self.radius)
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x.iter().map(|v| v.abs()).sum::<f64>() <= self.radius + CONTAINS_TOL * self.radius.max(1.0)
    }

    fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    fn start_point(&self) -> Vec<f64> {
        vec![0.0; self.dim]
    }
}

/// `{x >= 0, Σ x <= R}`: the nonnegative orthant cut by an l1-ball.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegL1Ball {
    dim: usize,
    radius: f64,
}

impl NonnegL1Ball {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        check_radius(radius)?;
        Ok(Self { dim, radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn vertices(&self) -> Vec<Vec<f64>> {
        std::iter::once(vec![0.0; self.dim])
            .chain((0..self.dim).map(|i| unit(self.dim, i, self.radius)))
            .collect()
    }
}

impl FeasibleSet for NonnegL1Ball {
    fn dim(&self) -> usize {
        self.dim
    }

    fn lmo(&self, c: &[f64]) -> Result<Vec<f64>> {
        check_cost(c, self.dim)?;
        lmo_nonneg_l1(c, self.radius)
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x.iter().all(|&v| v >= -CONTAINS_TOL)
            && x.iter().sum::<f64>() <= self.radius + CONTAINS_TOL * self.radius.max(1.0)
    }

    fn diameter(&self) -> f64 {
        if self.dim == 1 {
            self.radius
        } else {
            std::f64::consts::SQRT_2 * self.radius
        }
    }

    fn start_point(&self) -> Vec<f64> {
        vec![self.radius / (2.0 * self.dim as f64); self.dim]
    }
}

/// Serializable description of one of the built-in sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetKind {
    Simplex,
    L1Ball { radius: f64 },
    NonnegL1 { radius: f64 },
}

impl SetKind {
    pub fn build(self, dim: usize) -> Result<Box<dyn FeasibleSet + Send>> {
        Ok(match self {
            SetKind::Simplex => {
                check_dim(dim)?;
                Box::new(Simplex::new(dim))
            }
            SetKind::L1Ball { radius } => Box::new(L1Ball::new(dim, radius)?),
            SetKind::NonnegL1 { radius } => Box::new(NonnegL1Ball::new(dim, radius)?),
        })
    }
}
