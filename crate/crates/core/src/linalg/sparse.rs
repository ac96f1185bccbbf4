use super::DenseMatrix;

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row `(column, value)` lists. Duplicate columns are
    /// summed in list order; explicit zeros are dropped.
    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut m = CsrMatrix {
            rows: rows.len(),
            cols,
            indptr: Vec::with_capacity(rows.len() + 1),
            indices: Vec::new(),
            values: Vec::new(),
        };
        m.indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            let start = m.indices.len();
            for (j, v) in row {
                assert!(j < cols, "column {j} out of range {cols}");
                if m.indices.len() > start && *m.indices.last().unwrap() == j {
                    *m.values.last_mut().unwrap() += v;
                } else {
                    m.indices.push(j);
                    m.values.push(v);
                }
            }
            m.prune_from(start);
            m.indptr.push(m.indices.len());
        }
        m
    }

    fn prune_from(&mut self, start: usize) {
        let mut w = start;
        for r in start..self.indices.len() {
            if self.values[r] != 0.0 {
                self.indices[w] = self.indices[r];
                self.values[w] = self.values[r];
                w += 1;
            }
        }
        self.indices.truncate(w);
        self.values.truncate(w);
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix::from_rows(n, (0..n).map(|i| vec![(i, 1.0)]).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzeros of row `i` as parallel slices of columns and values.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (idx, val) = self.row(i);
        idx.binary_search(&j).map_or(0.0, |k| val[k])
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                d[(i, j)] += v;
            }
        }
        d
    }

    pub fn from_dense(d: &DenseMatrix) -> Self {
        let rows = (0..d.rows())
            .map(|i| {
                d.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(j, &v)| (j, v))
                    .collect()
            })
            .collect();
        CsrMatrix::from_rows(d.cols(), rows)
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut rows = vec![Vec::new(); self.cols];
        for i in 0..self.rows {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                rows[j].push((i, v));
            }
        }
        CsrMatrix::from_rows(self.rows, rows)
    }

    pub fn scale(&mut self, s: f64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let rows = (0..self.rows)
            .map(|i| {
                let (ia, va) = self.row(i);
                let (ib, vb) = other.row(i);
                let mut r: Vec<(usize, f64)> = ia.iter().copied().zip(va.iter().copied()).collect();
                r.extend(ib.iter().zip(vb).map(|(&j, &v)| (j, s * v)));
                r
            })
            .collect();
        CsrMatrix::from_rows(self.cols, rows)
    }

    /// Sparse product via a dense accumulator per row.
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut acc = vec![0.0; other.cols];
        let mut mark = vec![usize::MAX; other.cols];
        let mut touched = Vec::new();
        let mut out = CsrMatrix {
            rows: self.rows,
            cols: other.cols,
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
        };
        for i in 0..self.rows {
            touched.clear();
            let (ia, va) = self.row(i);
            for (&k, &a) in ia.iter().zip(va) {
                let (ib, vb) = other.row(k);
                for (&j, &b) in ib.iter().zip(vb) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = 0.0;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            let start = out.indices.len();
            for &j in &touched {
                out.indices.push(j);
                out.values.push(acc[j]);
            }
            out.prune_from(start);
            out.indptr.push(out.indices.len());
        }
        out
    }

    /// Dense times sparse.
    pub fn dense_mul(d: &DenseMatrix, s: &CsrMatrix) -> DenseMatrix {
        assert_eq!(d.cols(), s.rows, "inner dimensions differ");
        let mut out = DenseMatrix::zeros(d.rows(), s.cols);
        for i in 0..d.rows() {
            let src = d.row(i);
            let dst = out.row_mut(i);
            for (k, &a) in src.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let (idx, val) = s.row(k);
                for (&j, &b) in idx.iter().zip(val) {
                    dst[j] += a * b;
                }
            }
        }
        out
    }

    /// Sparse times dense.
    pub fn mul_dense(&self, d: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, d.rows(), "inner dimensions differ");
        let mut out = DenseMatrix::zeros(self.rows, d.cols());
        for i in 0..self.rows {
            let (idx, val) = self.row(i);
            let dst = out.row_mut(i);
            for (&k, &a) in idx.iter().zip(val) {
                for (o, &b) in dst.iter_mut().zip(d.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Row vector times matrix, accumulated into `out`.
    pub fn left_mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                out[j] += xi * v;
            }
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).1.iter().sum()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix {
        CsrMatrix::from_rows(
            3,
            vec![
                vec![(2, 1.0), (0, 2.0), (2, 0.5)],
                vec![],
                vec![(1, -1.0), (1, 1.0), (0, 3.0)],
            ],
        )
    }

    #[test]
    fn builds_sorted_and_merged() {
        let a = sample();
        assert_eq!(a.row(0), (&[0usize, 2][..], &[2.0, 1.5][..]));
        assert_eq!(a.row(2), (&[0usize][..], &[3.0][..]));
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(0, 2), 1.5);
        assert_eq!(a.get(1, 1), 0.0);
    }

    #[test]
    fn products_match_dense() {
        let a = sample();
        let d = a.to_dense();
        let ref_sq = d.matmul(&d);
        assert!(a.matmul(&a).to_dense().max_abs_diff(&ref_sq) < 1e-15);
        assert!(CsrMatrix::dense_mul(&d, &a).max_abs_diff(&ref_sq) < 1e-15);
        assert!(a.mul_dense(&d).max_abs_diff(&ref_sq) < 1e-15);
        assert_eq!(a.transpose().to_dense(), d.transpose());
        let mut out = vec![0.0; 3];
        a.left_mul_vec_into(&[1.0, 1.0, 1.0], &mut out);
        assert_eq!(out, d.left_mul_vec(&[1.0, 1.0, 1.0]));
        assert_eq!(CsrMatrix::from_dense(&d), a);
    }
}
