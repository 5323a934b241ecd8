//! Performance-profile metrics over a (method x problem) grid of runs.
//!
//! For problem `j`, `F*_j` is the best value any method reached. The relative
//! error of method `i` at iterate `k` is `(f_k - F*_j) / |F*_j|`. From it:
//! the fraction of problems solved to `eps`, and the average ratios of
//! iterations and time to the best method on each problem.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::problems::synth::fmt17;

/// Relative error `(f_k - F*) / |F*|`.
pub fn relative_error(f_k: f64, f_best: f64) -> Result<f64> {
    if !(f_best.abs() >= 1e-300) {
        return Err(Error::Degenerate(format!(
            "reference value {f_best:e} is too close to zero for a relative error"
        )));
    }
    if !f_k.is_finite() {
        return Ok(f64::INFINITY);
    }
    Ok((f_k - f_best) / f_best.abs())
}

/// Objective values and cumulative times of one run, one entry per iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSeries {
    pub values: Vec<f64>,
    pub times_ns: Vec<u64>,
}

impl RunSeries {
    pub fn best(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone)]
pub struct ProfileTable {
    methods: Vec<String>,
    problems: Vec<String>,
    /// `runs[i][j]` for method `i`, problem `j`.
    runs: Vec<Vec<Option<RunSeries>>>,
    best: Vec<f64>,
}

/// One line of `profiles.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub method: String,
    pub eps: f64,
    pub frac_solved: f64,
    pub iter_ratio: Option<f64>,
    pub time_ratio: Option<f64>,
}

impl ProfileTable {
    /// Builds the table from `(method, problem) -> series`. Methods and
    /// problems are ordered by name; problems without a finite value are
    /// dropped.
    pub fn new(runs: BTreeMap<(String, String), RunSeries>) -> Result<Self> {
        let mut methods: Vec<String> = runs.keys().map(|(m, _)| m.clone()).collect();
        methods.dedup();
        let mut problems: Vec<String> = runs.keys().map(|(_, p)| p.clone()).collect();
        problems.sort();
        problems.dedup();
        problems.retain(|p| {
            runs.iter()
                .any(|((_, q), s)| q == p && s.best().is_finite())
        });
        if methods.is_empty() || problems.is_empty() {
            return Err(Error::InvalidInput("profile table needs at least one finite run".into()));
        }
        let grid: Vec<Vec<Option<RunSeries>>> = methods
            .iter()
            .map(|m| {
                problems
                    .iter()
                    .map(|p| runs.get(&(m.clone(), p.clone())).cloned())
                    .collect()
            })
            .collect();
        let best: Vec<f64> = (0..problems.len())
            .map(|j| {
                grid.iter()
                    .filter_map(|row| row[j].as_ref().map(RunSeries::best))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        for (p, &b) in problems.iter().zip(&best) {
            relative_error(b, b).map_err(|_| {
                Error::Degenerate(format!("problem {p}: best value {b:e} is zero"))
            })?;
        }
        Ok(Self {
            methods,
            problems,
            runs: grid,
            best,
        })
    }

    pub fn methods(&self) -> &[String] {
        &self.methods
    }

    pub fn problems(&self) -> &[String] {
        &self.problems
    }

    /// `min_s F_sj` for each problem.
    pub fn best_values(&self) -> &[f64] {
        &self.best
    }

    pub fn rel_err_series(&self, method: usize, problem: usize) -> Option<Vec<f64>> {
        let b = self.best[problem];
        self.runs[method][problem].as_ref().map(|s| {
            s.values
                .iter()
                .map(|&f| relative_error(f, b).expect("best values checked at construction"))
                .collect()
        })
    }

    /// `N_ij(eps)`: first iterate with relative error at most `eps`.
    pub fn first_hit(&self, method: usize, problem: usize, eps: f64) -> Option<usize> {
        self.rel_err_series(method, problem)?
            .iter()
            .position(|&r| r <= eps)
    }

    /// `T_ij(eps)`: elapsed time at iterate `N_ij(eps)`.
    pub fn time_to_hit(&self, method: usize, problem: usize, eps: f64) -> Option<u64> {
        let k = self.first_hit(method, problem, eps)?;
        self.runs[method][problem].as_ref().map(|s| s.times_ns[k])
    }

    /// Fraction of problems each method solves to relative error `eps`.
    pub fn fraction_solved(&self, eps: f64) -> Vec<f64> {
        let np = self.problems.len() as f64;
        (0..self.methods.len())
            .map(|i| {
                let solved = (0..self.problems.len())
                    .filter(|&j| self.first_hit(i, j, eps).is_some())
                    .count();
                solved as f64 / np
            })
            .collect()
    }

    fn mean_ratio(&self, eps: f64, cost: impl Fn(usize, usize) -> Option<f64>) -> Result<Vec<Option<f64>>> {
        let np = self.problems.len();
        let nm = self.methods.len();
        let costs: Vec<Vec<Option<f64>>> = (0..nm)
            .map(|i| (0..np).map(|j| cost(i, j)).collect())
            .collect();
        let best: Vec<Option<f64>> = (0..np)
            .map(|j| {
                costs
                    .iter()
                    .filter_map(|row| row[j])
                    .fold(None, |acc: Option<f64>, c| Some(acc.map_or(c, |a| a.min(c))))
            })
            .collect();
        if best.iter().all(Option::is_none) {
            return Err(Error::EmptyAverage(eps));
        }
        Ok(costs
            .iter()
            .map(|row| {
                let ratios: Vec<f64> = row
                    .iter()
                    .zip(&best)
                    .filter_map(|(c, b)| {
                        let (c, b) = ((*c)?, (*b)?);
                        Some(if c == b { 1.0 } else { c / b })
                    })
                    .collect();
                if ratios.is_empty() {
                    None
                } else {
                    Some(ratios.iter().sum::<f64>() / ratios.len() as f64)
                }
            })
            .collect())
    }

    /// Average of `N_ij(eps) / min_s N_sj(eps)` over the problems method `i`
    /// solved; `None` for a method that solved none.
    pub fn iteration_ratio(&self, eps: f64) -> Result<Vec<Option<f64>>> {
        self.mean_ratio(eps, |i, j| self.first_hit(i, j, eps).map(|k| k as f64))
    }

    /// Same as [`Self::iteration_ratio`] with `T_ij(eps)`.
    pub fn time_ratio(&self, eps: f64) -> Result<Vec<Option<f64>>> {
        self.mean_ratio(eps, |i, j| self.time_to_hit(i, j, eps).map(|t| t as f64))
    }

    /// All three metrics on an `eps` grid, one row per (method, eps).
    pub fn rows(&self, eps_grid: &[f64]) -> Result<Vec<ProfileRow>> {
        let mut out = Vec::new();
        for &eps in eps_grid {
            let frac = self.fraction_solved(eps);
            let none = || vec![None; self.methods.len()];
            let iters = match self.iteration_ratio(eps) {
                Err(Error::EmptyAverage(_)) => none(),
                other => other?,
            };
            let times = match self.time_ratio(eps) {
                Err(Error::EmptyAverage(_)) => none(),
                other => other?,
            };
            for (i, m) in self.methods.iter().enumerate() {
                out.push(ProfileRow {
                    method: m.clone(),
                    eps,
                    frac_solved: frac[i],
                    iter_ratio: iters[i],
                    time_ratio: times[i],
                });
            }
        }
        Ok(out)
    }
}

pub fn write_profiles_csv<W: Write>(out: W, rows: &[ProfileRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "eps", "frac_solved", "iter_ratio", "time_ratio"])?;
    for r in rows {
        w.write_record([
            r.method.clone(),
            fmt17(r.eps),
            fmt17(r.frac_solved),
            r.iter_ratio.map(fmt17).unwrap_or_default(),
            r.time_ratio.map(fmt17).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<profiles csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: &[f64]) -> RunSeries {
        RunSeries {
            values: values.to_vec(),
            times_ns: (0..values.len() as u64).map(|k| 10 * (k + 1)).collect(),
        }
    }

    #[test]
    fn relative_error_examples() {
        assert_eq!(relative_error(1.0, 1.0).unwrap(), 0.0);
        assert!((relative_error(1.1, 1.0).unwrap() - 0.1).abs() < 1e-15);
        assert!((relative_error(-0.9, -1.0).unwrap() - 0.1).abs() < 1e-15);
        assert!(matches!(relative_error(1.0, 0.0), Err(Error::Degenerate(_))));
        assert_eq!(relative_error(f64::INFINITY, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn single_method_ratios_are_one() {
        let mut runs = BTreeMap::new();
        runs.insert(("a".into(), "p".into()), series(&[3.0, 2.0, 1.0]));
        let t = ProfileTable::new(runs).unwrap();
        for eps in [1.0, 0.5, 0.0] {
            assert_eq!(t.iteration_ratio(eps).unwrap(), vec![Some(1.0)]);
            assert_eq!(t.time_ratio(eps).unwrap(), vec![Some(1.0)]);
            assert_eq!(t.fraction_solved(eps), vec![1.0]);
        }
    }

    #[test]
    fn empty_average() {
        let mut runs = BTreeMap::new();
        runs.insert(("a".into(), "p".into()), series(&[3.0, 2.0]));
        runs.insert(("b".into(), "p".into()), series(&[3.0, 1.0]));
        let t = ProfileTable::new(runs).unwrap();
        // nothing reaches a negative relative error
        assert!(matches!(t.iteration_ratio(-1.0), Err(Error::EmptyAverage(_))));
        let rows = t.rows(&[-1.0]).unwrap();
        assert!(rows.iter().all(|r| r.iter_ratio.is_none() && r.frac_solved == 0.0));
    }

    #[test]
    fn zero_reference_rejected() {
        let mut runs = BTreeMap::new();
        runs.insert(("a".into(), "p".into()), series(&[1.0, 0.0]));
        assert!(ProfileTable::new(runs).is_err());
    }
}
