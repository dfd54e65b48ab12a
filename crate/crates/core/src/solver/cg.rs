use crate::assembly::CsrMatrix;

/// Outcome of a preconditioned conjugate-gradient run.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Relative residual `‖r_k‖ / ‖b‖` after each iteration, starting with k = 0.
    pub history: Vec<f64>,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned CG from a zero initial guess.
pub fn jacobi_cg(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> CgOutcome {
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return CgOutcome {
            x,
            iterations: 0,
            history: vec![0.0],
            converged: true,
        };
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut history = vec![1.0];
    for it in 1..=max_iter {
        let ap = a.mul_vec(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return CgOutcome {
                x,
                iterations: it,
                history,
                converged: false,
            };
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rel = dot(&r, &r).sqrt() / bnorm;
        history.push(rel);
        if rel <= tol {
            return CgOutcome {
                x,
                iterations: it,
                history,
                converged: true,
            };
        }
        for k in 0..n {
            z[k] = r[k] * inv_diag[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    CgOutcome {
        x,
        iterations: max_iter,
        history,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_on_spd() {
        let n = 30;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 + i as f64 * 0.1));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, t);
        let b = vec![1.0; n];
        let out = jacobi_cg(&a, &b, 1e-12, 20 * n);
        assert!(out.converged);
        let r = a.mul_vec(&out.x);
        assert!(r.iter().all(|v| (v - 1.0).abs() < 1e-10));
        assert_eq!(out.history.len(), out.iterations + 1);
    }

    #[test]
    fn reports_stall() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 1, -1.0)]);
        let out = jacobi_cg(&a, &[1.0, 1.0], 1e-12, 40);
        assert!(!out.converged);
    }
}
