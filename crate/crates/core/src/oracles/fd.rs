//! Finite-difference reference for the clamped unit square, `Δ²w = 1`.

use std::sync::OnceLock;

use crate::assembly::CsrMatrix;
use crate::solver::SkylineCholesky;

/// Grid sizes (cells per side) of the nested finite-difference solves.
pub const CLAMPED_FD_GRIDS: [usize; 4] = [16, 32, 64, 128];

/// Centre deflection of `Δ²w = 1` on the unit square with `w = ∂w/∂n = 0`,
/// 13-point stencil on an `n × n` cell grid. The clamped condition uses
/// mirror ghost values `w₋₁ = w₁`.
pub fn clamped_fd_center(n: usize) -> f64 {
    assert!(n >= 4 && n.is_multiple_of(2), "grid size must be even and at least 4");
    let m = n - 1;
    let idx = |i: usize, j: usize| (i - 1) * m + (j - 1);
    let h4 = (1.0 / n as f64).powi(4);
    let mut t = Vec::with_capacity(13 * m * m);
    for i in 1..n {
        for j in 1..n {
            let row = idx(i, j);
            let mut add = |di: i64, dj: i64, w: f64| {
                let (ii, jj) = (i as i64 + di, j as i64 + dj);
                // Mirror ghosts across the clamped boundary; w = 0 on it.
                let fold = |k: i64| -> Option<usize> {
                    if k == 0 || k == n as i64 {
                        None
                    } else if k < 0 {
                        Some((-k) as usize)
                    } else if k > n as i64 {
                        Some((2 * n as i64 - k) as usize)
                    } else {
                        Some(k as usize)
                    }
                };
                if let (Some(a), Some(b)) = (fold(ii), fold(jj)) {
                    t.push((row, idx(a, b), w));
                }
            };
            add(0, 0, 20.0);
            for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                add(di, dj, -8.0);
                add(2 * di, 2 * dj, 1.0);
            }
            for (di, dj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                add(di, dj, 2.0);
            }
        }
    }
    let a = CsrMatrix::from_triplets(m * m, m * m, t);
    let factor = SkylineCholesky::factor(&a).expect("the clamped biharmonic stencil is SPD");
    let w = factor.solve(&vec![h4; m * m]);
    w[idx(n / 2, n / 2)]
}

/// Richardson table over the nested grids assuming an even error
/// expansion in `h`; returns the last diagonal entry.
pub fn richardson(values: &[f64]) -> f64 {
    let mut table = values.to_vec();
    let mut p = 2;
    while table.len() > 1 {
        let f = 2f64.powi(p);
        table = table.windows(2).map(|w| (f * w[1] - w[0]) / (f - 1.0)).collect();
        p += 2;
    }
    table[0]
}

/// `α` with `w_center = α q a⁴ / D` for the clamped square, from the
/// extrapolated finite-difference solves (computed once per process).
pub fn clamped_alpha() -> f64 {
    static ALPHA: OnceLock<f64> = OnceLock::new();
    *ALPHA.get_or_init(|| {
        let values: Vec<f64> = CLAMPED_FD_GRIDS.iter().map(|&n| clamped_fd_center(n)).collect();
        richardson(&values)
    })
}
