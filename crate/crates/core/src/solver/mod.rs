//! Linear solves and postprocessing.

mod cg;
mod ordering;
mod post;
mod skyline;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

pub use cg::{jacobi_cg, CgOutcome};
pub use ordering::{permute_symmetric, reverse_cuthill_mckee};
pub use post::{energies, residual_indicators, trace_diagnostics, EdgeDiagnostic, Energies, TraceDiagnostics};
pub use skyline::{envelope_size, PivotFailure, SkylineCholesky, PIVOT_TOL};

use crate::assembly::{apply_constraints, DofMap, ReducedSystem, SparseSystem};
use crate::error::{PlateError, Result};
use crate::problem::Problem;

/// Relative residual target for CG.
pub const CG_TOL: f64 = 1e-12;
/// CG iteration cap as a multiple of the system dimension.
pub const CG_MAX_ITER_FACTOR: usize = 20;
/// Envelope size above which `Auto` switches to CG.
pub const AUTO_ENVELOPE_LIMIT: usize = 150_000_000;
/// Maximum iterative-refinement sweeps after a direct solve.
pub const REFINEMENT_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    /// Envelope Cholesky after reverse Cuthill–McKee ordering.
    #[default]
    Direct,
    /// Jacobi-preconditioned conjugate gradients.
    Cg,
    /// Direct unless the factor would be too large; a failed factorization
    /// is reported, never retried with CG.
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverStats {
    pub method: SolverKind,
    /// Reduced system dimension.
    pub dim: usize,
    /// CG iterations (0 for the direct solver).
    pub iterations: usize,
    /// Stored entries of the Cholesky factor (0 for CG).
    pub factor_entries: usize,
    /// `‖A_ff u_f − b_f‖ / ‖b_f‖` (absolute if `b_f = 0`).
    pub relative_residual: f64,
}

/// Solves a constrained system and returns the full DOF vector.
pub fn solve_system(system: &SparseSystem, dofmap: &DofMap, kind: SolverKind) -> Result<(Vec<f64>, SolverStats)> {
    let reduced = apply_constraints(system, dofmap)?;
    let (u, stats) = solve_reduced(&reduced, kind)?;
    Ok((reduced.expand(&u), stats))
}

fn residual_norm(a: &crate::assembly::CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    a.residual_compensated(x, b).iter().map(|r| r * r).sum::<f64>().sqrt()
}

/// Solves the reduced system `A_ff u_f = b_f`.
pub fn solve_reduced(reduced: &ReducedSystem, kind: SolverKind) -> Result<(Vec<f64>, SolverStats)> {
    let n = reduced.dim();
    let a = &reduced.matrix;
    let b = &reduced.rhs;
    let (method, x, iterations, factor_entries) = if n == 0 {
        (kind, Vec::new(), 0, 0)
    } else {
        let perm = reverse_cuthill_mckee(a);
        let pa = permute_symmetric(a, &perm);
        let envelope = envelope_size(&pa);
        let method = match kind {
            SolverKind::Auto if envelope > AUTO_ENVELOPE_LIMIT => SolverKind::Cg,
            SolverKind::Auto => SolverKind::Direct,
            k => k,
        };
        match method {
            SolverKind::Cg => {
                let out = jacobi_cg(a, b, CG_TOL, CG_MAX_ITER_FACTOR * n);
                if !out.converged {
                    return Err(PlateError::CgNotConverged {
                        iterations: out.iterations,
                        residual_history: out.history,
                    });
                }
                (SolverKind::Cg, out.x, out.iterations, 0)
            }
            _ => {
                let factor = SkylineCholesky::factor(&pa).map_err(|f| PlateError::NotPositiveDefinite {
                    pivot: f.pivot,
                    dof: reduced.free[perm[f.pivot]],
                    value: f.value,
                })?;
                let solve_perm = |rhs: &[f64]| {
                    let pb: Vec<f64> = perm.iter().map(|&old| rhs[old]).collect();
                    let py = factor.solve(&pb);
                    let mut x = vec![0.0; n];
                    for (new, &old) in perm.iter().enumerate() {
                        x[old] = py[new];
                    }
                    x
                };
                let mut x = solve_perm(b);
                // Iterative refinement against round-off growth on fine meshes.
                let mut best = residual_norm(a, &x, b);
                for _ in 0..REFINEMENT_STEPS {
                    let r = a.residual_compensated(&x, b);
                    let dx = solve_perm(&r);
                    let cand: Vec<f64> = x.iter().zip(&dx).map(|(p, q)| p + q).collect();
                    let res = residual_norm(a, &cand, b);
                    if !(res < best) {
                        break;
                    }
                    x = cand;
                    best = res;
                }
                (SolverKind::Direct, x, 0, factor.stored_entries())
            }
        }
    };
    let rnorm = residual_norm(a, &x, b);
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let relative_residual = if bnorm > 0.0 { rnorm / bnorm } else { rnorm };
    Ok((
        x,
        SolverStats {
            method,
            dim: n,
            iterations,
            factor_entries,
            relative_residual,
        },
    ))
}

/// A solved problem: nodal displacements plus the system they solve.
#[derive(Debug, Clone)]
pub struct Solution<'p> {
    pub problem: &'p Problem,
    /// Full DOF vector, `3·node + component`.
    pub dofs: Vec<f64>,
    pub system: SparseSystem,
    pub stats: SolverStats,
}

impl<'p> Solution<'p> {
    pub fn displacement(&self, node: usize) -> Vector3<f64> {
        Vector3::new(self.dofs[3 * node], self.dofs[3 * node + 1], self.dofs[3 * node + 2])
    }

    pub fn displacements(&self) -> Vec<Vector3<f64>> {
        (0..self.problem.mesh.nodes.len()).map(|i| self.displacement(i)).collect()
    }

    /// `A_h(U, U)`.
    pub fn operator_energy(&self) -> f64 {
        self.system.matrix.bilinear(&self.dofs, &self.dofs)
    }

    /// `l_h(U)`.
    pub fn load_work(&self) -> f64 {
        self.system.rhs.iter().zip(&self.dofs).map(|(b, u)| b * u).sum()
    }
}

/// Assembles and solves a problem.
pub fn solve(problem: &Problem, kind: SolverKind) -> Result<Solution<'_>> {
    let system = problem.system()?;
    let (dofs, stats) = solve_system(&system, &problem.dofmap, kind)?;
    Ok(Solution {
        problem,
        dofs,
        system,
        stats,
    })
}
