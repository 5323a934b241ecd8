use crate::error::{Error, Result};

/// Row-oriented data matrix: dense row-major or compressed sparse rows.
#[derive(Debug, Clone, PartialEq)]
pub enum DataMatrix {
    Dense {
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    },
    Sparse {
        cols: usize,
        row_ptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    },
}

impl DataMatrix {
    pub fn dense(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "dense matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(DataMatrix::Dense { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Self::dense(rows.len(), cols, rows.concat())
    }

    /// CSR matrix from per-row `(index, value)` lists with 0-based indices.
    pub fn sparse(cols: usize, rows: &[Vec<(usize, f64)>]) -> Result<Self> {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for (r, row) in rows.iter().enumerate() {
            for &(j, v) in row {
                if j >= cols {
                    return Err(Error::InvalidInput(format!(
                        "row {r}: column {j} out of range for {cols} columns"
                    )));
                }
                indices.push(j);
                values.push(v);
            }
            row_ptr.push(indices.len());
        }
        Ok(DataMatrix::Sparse {
            cols,
            row_ptr,
            indices,
            values,
        })
    }

    pub fn n_rows(&self) -> usize {
        match self {
            DataMatrix::Dense { rows, .. } => *rows,
            DataMatrix::Sparse { row_ptr, .. } => row_ptr.len() - 1,
        }
    }

    pub fn n_cols(&self) -> usize {
        match self {
            DataMatrix::Dense { cols, .. } => *cols,
            DataMatrix::Sparse { cols, .. } => *cols,
        }
    }

    /// Stored entries of row `i` as `(column, value)` pairs.
    pub fn row_entries(&self, i: usize) -> Box<dyn Iterator<Item = (usize, f64)> + '_> {
        match self {
            DataMatrix::Dense { cols, data, .. } => {
                Box::new(data[i * cols..(i + 1) * cols].iter().copied().enumerate())
            }
            DataMatrix::Sparse {
                row_ptr,
                indices,
                values,
                ..
            } => {
                let (a, b) = (row_ptr[i], row_ptr[i + 1]);
                Box::new(indices[a..b].iter().copied().zip(values[a..b].iter().copied()))
            }
        }
    }

    #[inline]
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        match self {
            DataMatrix::Dense { cols, data, .. } => data[i * cols..(i + 1) * cols]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum(),
            DataMatrix::Sparse {
                row_ptr,
                indices,
                values,
                ..
            } => {
                let (a, b) = (row_ptr[i], row_ptr[i + 1]);
                indices[a..b]
                    .iter()
                    .zip(&values[a..b])
                    .map(|(&j, v)| v * x[j])
                    .sum()
            }
        }
    }

    /// `out += scale * row_i`
    #[inline]
    pub fn row_axpy(&self, i: usize, scale: f64, out: &mut [f64]) {
        match self {
            DataMatrix::Dense { cols, data, .. } => {
                for (o, a) in out.iter_mut().zip(&data[i * cols..(i + 1) * cols]) {
                    *o += scale * a;
                }
            }
            DataMatrix::Sparse {
                row_ptr,
                indices,
                values,
                ..
            } => {
                let (a, b) = (row_ptr[i], row_ptr[i + 1]);
                for (&j, v) in indices[a..b].iter().zip(&values[a..b]) {
                    out[j] += scale * v;
                }
            }
        }
    }

    pub fn row_norm2(&self, i: usize) -> f64 {
        self.row_entries(i).map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    /// Number of stored entries (all entries for dense matrices).
    pub fn nnz(&self) -> usize {
        match self {
            DataMatrix::Dense { data, .. } => data.len(),
            DataMatrix::Sparse { values, .. } => values.len(),
        }
    }

    /// Average stored entries per row, the work estimate used for parallel cut-offs.
    pub fn work_per_row(&self) -> usize {
        let r = self.n_rows().max(1);
        self.nnz().div_ceil(r).max(1)
    }

    pub fn to_dense_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows())
            .map(|i| {
                let mut row = vec![0.0; self.n_cols()];
                for (j, v) in self.row_entries(i) {
                    row[j] = v;
                }
                row
            })
            .collect()
    }

    /// Copy of the rows in the given order.
    pub fn permute_rows(&self, order: &[usize]) -> Result<Self> {
        let rows = self.to_dense_rows();
        if order.len() != rows.len() {
            return Err(Error::InvalidInput("row permutation has the wrong length".into()));
        }
        let permuted: Vec<Vec<f64>> = order.iter().map(|&i| rows[i].clone()).collect();
        Self::dense(permuted.len(), self.n_cols(), permuted.concat())
    }
}
