use std::io::Write;

/// Compressed sparse row matrix with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the given per-row sorted, deduplicated column sets.
    pub fn from_pattern(ncols: usize, rows: Vec<Vec<usize>>) -> Self {
        let nrows = rows.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for r in rows {
            debug_assert!(r.windows(2).all(|w| w[0] < w[1]));
            col_idx.extend(r);
            row_ptr.push(col_idx.len());
        }
        let values = vec![0.0; col_idx.len()];
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed in
    /// input order after a stable sort, so the result is deterministic.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(column, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let start = self.row_ptr[i];
        self.col_idx[start..self.row_ptr[i + 1]]
            .binary_search(&j)
            .ok()
            .map(|k| start + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |k| self.values[k])
    }

    /// Adds to an entry that must exist in the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .position(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) is outside the sparsity pattern"));
        self.values[k] += v;
    }

    /// Adds a dense block indexed by `dofs` in both directions.
    pub fn add_block(&mut self, dofs: &[usize], block: &nalgebra::DMatrix<f64>) {
        for (p, &i) in dofs.iter().enumerate() {
            for (q, &j) in dofs.iter().enumerate() {
                let v = block[(p, q)];
                if v != 0.0 {
                    self.add(i, j, v);
                }
            }
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// `b − A x` with compensated (twice-working-precision) row sums, so the
    /// result stays accurate when `A x` and `b` nearly cancel.
    pub fn residual_compensated(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                let (mut s, mut c) = (b[i], 0.0);
                for (j, v) in self.row(i) {
                    let p = -v * x[j];
                    let pe = (-v).mul_add(x[j], -p);
                    let t = s + p;
                    let z = t - s;
                    let se = (s - (t - z)) + (p - z);
                    s = t;
                    c += se + pe;
                }
                s + c
            })
            .collect()
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.mul_vec(y);
        x.iter().zip(&ay).map(|(a, b)| a * b).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max|A − Aᵀ| / max|A|` (0 for the zero matrix).
    pub fn symmetry_error(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    /// Entrywise sum of two matrices of equal shape.
    pub fn add_matrix(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for m in [self, other] {
            for i in 0..m.nrows {
                t.extend(m.row(i).map(|(j, v)| (i, j, v)));
            }
        }
        CsrMatrix::from_triplets(self.nrows, self.ncols, t)
    }

    /// Submatrix on the given rows and columns (index maps old → new, `None` to drop).
    pub fn select(&self, row_map: &[Option<usize>], col_map: &[Option<usize>], nrows: usize, ncols: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for (i, mapped) in row_map.iter().enumerate().take(self.nrows) {
            if let Some(ni) = *mapped {
                for (j, v) in self.row(i) {
                    if let Some(nj) = col_map[j] {
                        t.push((ni, nj, v));
                    }
                }
            }
        }
        CsrMatrix::from_triplets(nrows, ncols, t)
    }

    /// Coordinate text export, one `row col value` line per stored entry.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "% {} {} {}", self.nrows, self.ncols, self.nnz())?;
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                writeln!(out, "{i} {j} {v:.17e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_are_summed() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(1, 1, 2.0), (0, 1, 1.0), (1, 1, 3.0), (1, 0, 1.0)]);
        assert_eq!(a.get(1, 1), 5.0);
        assert_eq!(a.get(0, 0), 0.0);
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.mul_vec(&[1.0, 2.0]), vec![2.0, 11.0]);
        assert_eq!(a.symmetry_error(), 0.0);
    }

    #[test]
    fn symmetry_error_is_relative() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 1, 4.0), (1, 0, 3.0)]);
        assert!((a.symmetry_error() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn coordinate_export() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.5)]);
        let mut buf = Vec::new();
        a.write_coordinate(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 2);
        assert!(s.lines().nth(1).unwrap().starts_with("0 0 1.5"));
    }
}
