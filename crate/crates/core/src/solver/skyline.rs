use crate::assembly::CsrMatrix;

/// Pivots at or below this fraction of the original diagonal count as
/// breakdown.
pub const PIVOT_TOL: f64 = 1e-14;

/// Envelope (variable-band) Cholesky factor `A = L Lᵀ`, stored row by row
/// from the first structurally nonzero column to the diagonal.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    first: Vec<usize>,
    start: Vec<usize>,
    values: Vec<f64>,
}

/// A pivot that was not safely positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotFailure {
    pub pivot: usize,
    pub value: f64,
}

/// Number of stored entries the envelope factor of `a` would need.
pub fn envelope_size(a: &CsrMatrix) -> usize {
    (0..a.nrows())
        .map(|i| {
            let f = a.row(i).map(|(j, _)| j).filter(|&j| j <= i).min().unwrap_or(i);
            i - f + 1
        })
        .sum()
}

impl SkylineCholesky {
    /// Factors the lower triangle of a symmetric matrix.
    pub fn factor(a: &CsrMatrix) -> Result<Self, PivotFailure> {
        let n = a.nrows();
        let mut first = Vec::with_capacity(n);
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            let f = a.row(i).map(|(j, _)| j).filter(|&j| j <= i).min().unwrap_or(i);
            first.push(f);
            start.push(start[i] + i - f + 1);
        }
        let mut values = vec![0.0; start[n]];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    values[start[i] + j - first[i]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            let si = start[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let sj = start[j];
                let dot: f64 = values[si + k0 - fi..si + j - fi]
                    .iter()
                    .zip(&values[sj + k0 - fj..sj + j - fj])
                    .map(|(x, y)| x * y)
                    .sum();
                let diag = values[sj + j - fj];
                values[si + j - fi] = (values[si + j - fi] - dot) / diag;
            }
            let orig = values[si + i - fi];
            let sq: f64 = values[si..si + i - fi].iter().map(|x| x * x).sum();
            let d = orig - sq;
            if !d.is_finite() || d <= PIVOT_TOL * orig.abs() || orig <= 0.0 {
                return Err(PivotFailure { pivot: i, value: d });
            }
            values[si + i - fi] = d.sqrt();
        }
        Ok(Self { first, start, values })
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    pub fn stored_entries(&self) -> usize {
        self.values.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.values[self.start[i]..self.start[i + 1]]
    }

    /// Solves `L Lᵀ x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = b.to_vec();
        for i in 0..n {
            let r = self.row(i);
            let fi = self.first[i];
            let dot: f64 = r[..i - fi].iter().zip(&y[fi..i]).map(|(l, v)| l * v).sum();
            y[i] = (y[i] - dot) / r[i - fi];
        }
        for i in (0..n).rev() {
            let r = self.row(i);
            let fi = self.first[i];
            y[i] /= r[i - fi];
            let yi = y[i];
            for (k, l) in r[..i - fi].iter().enumerate() {
                y[fi + k] -= l * yi;
            }
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, t)
    }

    #[test]
    fn solves_tridiagonal() {
        let a = laplacian(20);
        let x: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.mul_vec(&x);
        let f = SkylineCholesky::factor(&a).unwrap();
        let y = f.solve(&b);
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-12);
        }
        assert_eq!(envelope_size(&a), 39);
    }

    #[test]
    fn one_by_one() {
        let a = CsrMatrix::from_triplets(1, 1, vec![(0, 0, 2.0)]);
        let x = SkylineCholesky::factor(&a).unwrap().solve(&[4.0]);
        assert!((x[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn indefinite_reports_pivot() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        let err = SkylineCholesky::factor(&a).unwrap_err();
        assert_eq!(err.pivot, 1);
        assert!(err.value < 0.0);
        let singular = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]);
        assert_eq!(SkylineCholesky::factor(&singular).unwrap_err().pivot, 1);
    }
}
