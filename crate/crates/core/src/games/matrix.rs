use crate::error::GameError;

/// Sparse payoff matrix with both row-major and column-major adjacency.
/// Rows are x-sequences, columns are y-sequences, values are the
/// chance-weighted payoff to y.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    row_val: Vec<f64>,
    col_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    col_val: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffStats {
    pub max_abs: f64,
    pub nnz: usize,
    pub n_rows: usize,
    pub n_cols: usize,
}

fn compress(n: usize, mut entries: Vec<(usize, usize, f64)>) -> (Vec<usize>, Vec<u32>, Vec<f64>) {
    entries.sort_unstable_by_key(|e| (e.0, e.1));
    let mut ptr = vec![0usize; n + 1];
    for e in &entries {
        ptr[e.0 + 1] += 1;
    }
    for i in 0..n {
        ptr[i + 1] += ptr[i];
    }
    let idx = entries.iter().map(|e| e.1 as u32).collect();
    let val = entries.iter().map(|e| e.2).collect();
    (ptr, idx, val)
}

impl PayoffMatrix {
    /// Rejects out-of-range indices, duplicates and non-finite values.
    pub fn from_triples(
        n_rows: usize,
        n_cols: usize,
        triples: Vec<(usize, usize, f64)>,
    ) -> Result<Self, GameError> {
        for (i, &(r, c, v)) in triples.iter().enumerate() {
            if r >= n_rows || c >= n_cols {
                return Err(GameError::Format(format!(
                    "payoffs[{i}]: index ({r}, {c}) out of range"
                )));
            }
            if !v.is_finite() {
                return Err(GameError::Format(format!("payoffs[{i}]: non-finite value")));
            }
        }
        assert!(n_rows <= u32::MAX as usize && n_cols <= u32::MAX as usize);
        let transposed: Vec<_> = triples.iter().map(|&(r, c, v)| (c, r, v)).collect();
        let (row_ptr, row_idx, row_val) = compress(n_rows, triples);
        for r in 0..n_rows {
            let cols = &row_idx[row_ptr[r]..row_ptr[r + 1]];
            if let Some(w) = cols.windows(2).find(|w| w[0] == w[1]) {
                return Err(GameError::Format(format!(
                    "payoffs: duplicate entry ({r}, {})",
                    w[0]
                )));
            }
        }
        let (col_ptr, col_idx, col_val) = compress(n_cols, transposed);
        Ok(PayoffMatrix {
            n_rows,
            n_cols,
            row_ptr,
            row_idx,
            row_val,
            col_ptr,
            col_idx,
            col_val,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.row_val.len()
    }

    pub fn stats(&self) -> PayoffStats {
        PayoffStats {
            max_abs: self.row_val.iter().fold(0.0, |m, v| m.max(v.abs())),
            nnz: self.nnz(),
            n_rows: self.n_rows,
            n_cols: self.n_cols,
        }
    }

    /// Triples in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |r| {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            self.row_idx[span.clone()]
                .iter()
                .zip(&self.row_val[span])
                .map(move |(&c, &v)| (r, c as usize, v))
        })
    }

    /// Triples in column-major order.
    pub fn triples_by_col(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_cols).flat_map(move |c| {
            let span = self.col_ptr[c]..self.col_ptr[c + 1];
            self.col_idx[span.clone()]
                .iter()
                .zip(&self.col_val[span])
                .map(move |(&r, &v)| (r as usize, c, v))
        })
    }

    pub fn row_len(&self, r: usize) -> usize {
        self.row_ptr[r + 1] - self.row_ptr[r]
    }

    pub fn col_len(&self, c: usize) -> usize {
        self.col_ptr[c + 1] - self.col_ptr[c]
    }

    /// `sum_c M[r][c] * y[c]`; adds the number of entries visited to `touches`.
    #[inline]
    pub fn row_dot(&self, r: usize, y: &[f64], touches: &mut u64) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        let mut acc = 0.0;
        for (&c, &v) in self.row_idx[span.clone()].iter().zip(&self.row_val[span]) {
            acc += v * y[c as usize];
            *touches += 1;
        }
        acc
    }

    /// `sum_r M[r][c] * x[r]`; adds the number of entries visited to `touches`.
    #[inline]
    pub fn col_dot(&self, c: usize, x: &[f64], touches: &mut u64) -> f64 {
        let span = self.col_ptr[c]..self.col_ptr[c + 1];
        let mut acc = 0.0;
        for (&r, &v) in self.col_idx[span.clone()].iter().zip(&self.col_val[span]) {
            acc += v * x[r as usize];
            *touches += 1;
        }
        acc
    }

    /// `M y`, the gradient seen by x.
    pub fn mul(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.n_cols);
        let mut t = 0;
        (0..self.n_rows)
            .map(|r| self.row_dot(r, y, &mut t))
            .collect()
    }

    /// `M^T x`, the gradient seen by y.
    pub fn mul_t(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_rows);
        let mut t = 0;
        (0..self.n_cols)
            .map(|c| self.col_dot(c, x, &mut t))
            .collect()
    }

    /// `M y` computed by scattering over the column-major view.
    pub fn mul_by_cols(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_rows];
        for (r, c, v) in self.triples_by_col() {
            out[r] += v * y[c];
        }
        out
    }

    /// `x^T M y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn transpose_negated(&self) -> PayoffMatrix {
        PayoffMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr: self.col_ptr.clone(),
            row_idx: self.col_idx.clone(),
            row_val: self.col_val.iter().map(|v| -v).collect(),
            col_ptr: self.row_ptr.clone(),
            col_idx: self.row_idx.clone(),
            col_val: self.row_val.iter().map(|v| -v).collect(),
        }
    }
}
