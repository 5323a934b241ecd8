//! Execution mode for the row-wise reductions inside the problem oracles.
//!
//! Every reduction splits its rows into fixed-size chunks, reduces each chunk
//! sequentially, then folds the chunk partials left to right. The chunking
//! does not depend on the mode or on the thread pool, so sequential and
//! parallel evaluation return bit-identical results.

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rows per chunk.
pub const CHUNK_ROWS: usize = 256;

/// Below this many `rows * cols` entries the parallel mode runs inline.
pub const PARALLEL_MIN_WORK: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise the same
    /// as `Sequential`.
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this mode actually fans out to the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    fn fan_out(self, rows: usize, cols: usize) -> bool {
        self.is_parallel() && rows > CHUNK_ROWS && rows.saturating_mul(cols) >= PARALLEL_MIN_WORK
    }

    /// Sum of `f(i)` over `0..rows`. `f` may return `+inf` or `NaN`; those
    /// propagate through the sum.
    pub fn sum_rows<F>(self, rows: usize, cols: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync,
    {
        let chunk = |c: usize| -> f64 {
            let end = ((c + 1) * CHUNK_ROWS).min(rows);
            (c * CHUNK_ROWS..end).map(&f).sum()
        };
        let n_chunks = rows.div_ceil(CHUNK_ROWS);
        let partials: Vec<f64> = if self.fan_out(rows, cols) {
            par_map(n_chunks, chunk)
        } else {
            (0..n_chunks).map(chunk).collect()
        };
        partials.into_iter().fold(0.0, |acc, p| acc + p)
    }

    /// Vector sum of per-row contributions: `out = Σ_i contrib(i, out_i)` where
    /// `contrib` adds row `i`'s contribution into the accumulator it is given.
    pub fn accumulate_rows<F>(self, rows: usize, cols: usize, contrib: F) -> Vec<f64>
    where
        F: Fn(usize, &mut [f64]) + Sync,
    {
        let chunk = |c: usize| -> Vec<f64> {
            let mut acc = vec![0.0; cols];
            let end = ((c + 1) * CHUNK_ROWS).min(rows);
            for i in c * CHUNK_ROWS..end {
                contrib(i, &mut acc);
            }
            acc
        };
        let n_chunks = rows.div_ceil(CHUNK_ROWS);
        let partials: Vec<Vec<f64>> = if self.fan_out(rows, cols) {
            par_map(n_chunks, chunk)
        } else {
            (0..n_chunks).map(chunk).collect()
        };
        let mut out = vec![0.0; cols];
        for p in partials {
            for (o, v) in out.iter_mut().zip(p) {
                *o += v;
            }
        }
        out
    }

    /// `f(i)` for every row, in row order.
    pub fn map_rows<F>(self, rows: usize, cols: usize, f: F) -> Vec<f64>
    where
        F: Fn(usize) -> f64 + Sync,
    {
        let chunk = |c: usize| -> Vec<f64> {
            let end = ((c + 1) * CHUNK_ROWS).min(rows);
            (c * CHUNK_ROWS..end).map(&f).collect()
        };
        let n_chunks = rows.div_ceil(CHUNK_ROWS);
        if self.fan_out(rows, cols) {
            par_map(n_chunks, chunk).concat()
        } else {
            (0..rows).map(f).collect()
        }
    }

    /// Maps `f` over `items`, in parallel when enabled. Output order matches
    /// input order.
    pub fn map_items<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}

#[cfg(feature = "parallel")]
fn par_map<U: Send, F: Fn(usize) -> U + Sync + Send>(n: usize, f: F) -> Vec<U> {
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<U, F: Fn(usize) -> U>(n: usize, f: F) -> Vec<U> {
    (0..n).map(f).collect()
}
