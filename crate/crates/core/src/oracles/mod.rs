//! Reference values and the convergence-study driver.

mod fd;

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

pub use fd::{clamped_alpha, clamped_fd_center, richardson, CLAMPED_FD_GRIDS};

use crate::error::{PlateError, Result};
use crate::mesh::{mesh_structure, EdgeKind, TriMesh6};
use crate::model::{BoundaryTag, LoadRegion, Material, PlatePatch, Point3, StructureModel};
use crate::problem::Problem;
use crate::solver::{solve, SolverKind};

/// Centre deflection of a simply supported square plate under uniform load,
///
/// ```text
/// w = 16 q a⁴ / (π⁶ D) · Σ_{m,n odd} (−1)^((m+n)/2 − 1) / (m n (m² + n²)²)
/// ```
///
/// summed over the first `terms` odd indices in each direction.
pub fn navier_deflection(a: f64, q: f64, d: f64, terms: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..terms {
        let m = (2 * i + 1) as f64;
        for j in 0..terms {
            let n = (2 * j + 1) as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign / (m * n * (m * m + n * n).powi(2));
        }
    }
    16.0 * q * a.powi(4) / (PI.powi(6) * d) * sum
}

/// Odd-index count used by the benchmarks.
pub const NAVIER_TERMS: usize = 99;

/// Centre deflection `α q a⁴ / D` of a clamped square plate under uniform load.
pub fn clamped_square_reference(a: f64, q: f64, d: f64) -> f64 {
    clamped_alpha() * q * a.powi(4) / d
}

/// Tip deflection of a clamped beam under a tip force, `F L³ / (3 (E t³/12) b)`.
pub fn cantilever_strip_reference(force: f64, length: f64, youngs_modulus: f64, thickness: f64, width: f64) -> f64 {
    force * length.powi(3) / (3.0 * (youngs_modulus * thickness.powi(3) / 12.0) * width)
}

/// Least-squares slope of `log(error)` against `log(h)`.
pub fn observed_order(h: &[f64], errors: &[f64]) -> Option<f64> {
    if h.len() < 2 || h.len() != errors.len() || errors.iter().any(|e| !(*e > 0.0)) {
        return None;
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkId {
    SsSquare,
    ClampedSquare,
    CantileverStrip,
    MembranePatch,
}

impl BenchmarkId {
    pub const ALL: [BenchmarkId; 4] = [
        BenchmarkId::SsSquare,
        BenchmarkId::ClampedSquare,
        BenchmarkId::CantileverStrip,
        BenchmarkId::MembranePatch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BenchmarkId::SsSquare => "ss_square",
            BenchmarkId::ClampedSquare => "clamped_square",
            BenchmarkId::CantileverStrip => "cantilever_strip",
            BenchmarkId::MembranePatch => "membrane_patch",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|b| b.as_str() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|b| b.as_str()).collect();
            PlateError::Config(format!("unknown benchmark `{s}`; options: {}", names.join(", ")))
        })
    }

    pub fn quantity(self) -> &'static str {
        match self {
            BenchmarkId::SsSquare | BenchmarkId::ClampedSquare => "center deflection",
            BenchmarkId::CantileverStrip => "mean tip deflection",
            BenchmarkId::MembranePatch => "max nodal error / max displacement",
        }
    }
}

/// Geometry, material and load of a benchmark, plus its base subdivision.
#[derive(Debug, Clone)]
pub struct BenchmarkSetup {
    pub id: BenchmarkId,
    pub model: StructureModel,
    pub base_subdivisions: usize,
    /// Exact value of the measured quantity.
    pub reference: f64,
    /// Prescribed linear field (membrane patch test only).
    pub linear_field: Option<(Matrix3<f64>, Vector3<f64>)>,
}

fn rect(id: usize, x0: f64, x1: f64, y0: f64, y1: f64, tags: [BoundaryTag; 4]) -> PlatePatch {
    PlatePatch::new(
        id,
        vec![
            Point3::new(x0, y0, 0.0),
            Point3::new(x1, y0, 0.0),
            Point3::new(x1, y1, 0.0),
            Point3::new(x0, y1, 0.0),
        ],
        Some(Vector3::z()),
        tags.to_vec(),
    )
    .expect("benchmark patches are valid")
}

/// Strip length for the cantilever benchmark.
pub const CANTILEVER_LENGTH: f64 = 1.0;
/// Strip width for the cantilever benchmark.
pub const CANTILEVER_WIDTH: f64 = 0.25;
/// Tip line load per unit length (per unit thickness).
pub const CANTILEVER_LINE_LOAD: f64 = 1.0;

impl BenchmarkSetup {
    pub fn new(id: BenchmarkId) -> Self {
        use BoundaryTag::{Clamped as C, Free as F, Junction as J, SimplySupported as S};
        // t = √12 gives t̃ = 1.
        let t = 12f64.sqrt();
        match id {
            BenchmarkId::SsSquare | BenchmarkId::ClampedSquare => {
                let tag = if id == BenchmarkId::SsSquare { S } else { C };
                let mat = Material::new(1.0, 0.3, t).expect("valid");
                let d = mat.scaled_bending_rigidity();
                let reference = if tag == S {
                    navier_deflection(1.0, 1.0, d, NAVIER_TERMS)
                } else {
                    clamped_square_reference(1.0, 1.0, d)
                };
                let model = StructureModel::new(vec![rect(0, 0.0, 1.0, 0.0, 1.0, [tag; 4])], mat)
                    .with_load(LoadRegion::Patch(0), Vector3::new(0.0, 0.0, 1.0));
                Self {
                    id,
                    model,
                    base_subdivisions: 4,
                    reference,
                    linear_field: None,
                }
            }
            BenchmarkId::CantileverStrip => {
                // Four coplanar square patches along x, clamped at x = 0.
                let thickness = 0.1;
                let e = 1.0;
                let mat = Material::new(e, 0.0, thickness).expect("valid");
                let n = 4;
                let s = CANTILEVER_LENGTH / n as f64;
                let patches = (0..n)
                    .map(|k| {
                        let left = if k == 0 { C } else { J };
                        let right = if k + 1 == n { F } else { J };
                        rect(k, k as f64 * s, (k + 1) as f64 * s, 0.0, CANTILEVER_WIDTH, [F, right, F, left])
                    })
                    .collect();
                let mut model = StructureModel::new(patches, mat);
                model = model.with_line_load(n - 1, 1, Vector3::new(0.0, 0.0, CANTILEVER_LINE_LOAD));
                // Loads are per unit thickness, so the physical tip force is t·g·b.
                let force = thickness * CANTILEVER_LINE_LOAD * CANTILEVER_WIDTH;
                let reference = cantilever_strip_reference(force, CANTILEVER_LENGTH, e, thickness, CANTILEVER_WIDTH);
                Self {
                    id,
                    model,
                    base_subdivisions: 1,
                    reference,
                    linear_field: None,
                }
            }
            BenchmarkId::MembranePatch => {
                // A unit square in a tilted plane with every perimeter node
                // prescribed from a linear in-plane field.
                let rot = nalgebra::Rotation3::from_euler_angles(0.3, -0.5, 0.7);
                let verts: Vec<Point3> = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
                    .iter()
                    .map(|&(x, y)| rot * Point3::new(x, y, 0.0) + Vector3::new(0.2, -0.1, 0.4))
                    .collect();
                // Simply supported: displacements prescribed, no rotation terms.
                let normal = rot * Vector3::z();
                let patch = PlatePatch::new(0, verts, Some(normal), vec![S; 4]).expect("valid");
                let mat = Material::new(1.0, 0.3, 0.05).expect("valid");
                let p = Matrix3::identity() - normal * normal.transpose();
                let grad = p * Matrix3::new(0.2, -0.1, 0.05, 0.3, 0.1, -0.2, 0.02, 0.04, 0.1) * p;
                let offset = p * Vector3::new(0.01, -0.02, 0.03);
                Self {
                    id,
                    model: StructureModel::new(vec![patch], mat),
                    base_subdivisions: 2,
                    reference: 0.0,
                    linear_field: Some((grad, offset)),
                }
            }
        }
    }

    /// Problem on the given mesh, with the linear field prescribed on
    /// perimeter nodes for the patch test.
    pub fn problem(&self, mesh: TriMesh6) -> Result<Problem> {
        let mut p = Problem::new(self.model.clone(), mesh)?;
        if let Some((g, c)) = self.linear_field {
            let nodes = p.mesh.nodes_on_edges(&[EdgeKind::DirichletSimplySupported]);
            for n in nodes {
                let x = p.mesh.nodes[n];
                p.dofmap.constrain_node(n, g * x + c)?;
            }
        }
        Ok(p)
    }

    /// The benchmark moved by `x ↦ R x + b`. The prescribed field follows
    /// as `u'(x') = R u(Rᵀ(x' − b))`. The measured quantity is defined in
    /// the original frame, so only the model and field are meaningful here.
    pub fn transformed(&self, rotation: &nalgebra::Rotation3<f64>, shift: &Vector3<f64>) -> Result<Self> {
        let r = rotation.matrix();
        Ok(Self {
            id: self.id,
            model: self.model.transformed(rotation, shift)?,
            base_subdivisions: self.base_subdivisions,
            reference: self.reference,
            linear_field: self.linear_field.map(|(g, c)| {
                let g2 = r * g * r.transpose();
                (g2, r * c - g2 * shift)
            }),
        })
    }

    /// The measured quantity on a solved mesh.
    pub fn measure(&self, problem: &Problem, dofs: &[f64]) -> Result<f64> {
        let mesh = &problem.mesh;
        let u = |n: usize| Vector3::new(dofs[3 * n], dofs[3 * n + 1], dofs[3 * n + 2]);
        match self.id {
            BenchmarkId::SsSquare | BenchmarkId::ClampedSquare => {
                let c = find_node(mesh, &Point3::new(0.5, 0.5, 0.0))?;
                Ok(u(c).z)
            }
            BenchmarkId::CantileverStrip => {
                let tip: Vec<usize> = (0..mesh.nodes.len())
                    .filter(|&n| (mesh.nodes[n].x - CANTILEVER_LENGTH).abs() < 1e-9)
                    .collect();
                Ok(tip.iter().map(|&n| u(n).z).sum::<f64>() / tip.len() as f64)
            }
            BenchmarkId::MembranePatch => {
                let (g, c) = self.linear_field.expect("patch test has a field");
                let mut err: f64 = 0.0;
                let mut scale: f64 = 0.0;
                for (n, x) in mesh.nodes.iter().enumerate() {
                    let exact = g * x + c;
                    err = err.max((u(n) - exact).norm());
                    scale = scale.max(exact.norm());
                }
                Ok(err / scale)
            }
        }
    }
}

fn find_node(mesh: &TriMesh6, p: &Point3) -> Result<usize> {
    mesh.nodes
        .iter()
        .position(|x| (x - p).norm() < 1e-9)
        .ok_or_else(|| PlateError::InvalidInput(format!("no mesh node at {p:?}; use an even subdivision")))
}

/// Outcome of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkResult {
    pub name: String,
    pub quantity: String,
    /// Measured value per mesh.
    pub values: Vec<f64>,
    pub reference: f64,
    /// Relative error per mesh (absolute measure for the patch test).
    pub errors: Vec<f64>,
    /// Mesh size per mesh.
    pub h: Vec<f64>,
    pub observed_order: Option<f64>,
    pub monotone: bool,
    pub warnings: Vec<String>,
}

impl BenchmarkResult {
    pub fn computed(&self) -> f64 {
        *self.values.last().expect("at least one mesh")
    }

    pub fn relative_error(&self) -> f64 {
        *self.errors.last().expect("at least one mesh")
    }

    /// Golden-file table: a provenance comment, a header and one row per mesh.
    pub fn to_table(&self, provenance: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {provenance}");
        let _ = writeln!(s, "# benchmark {} ({}), reference {:.10e}", self.name, self.quantity, self.reference);
        let _ = writeln!(s, "# h value error order");
        for i in 0..self.values.len() {
            let order = if i == 0 {
                "-".to_string()
            } else {
                observed_order(&self.h[i - 1..=i], &self.errors[i - 1..=i])
                    .map(|o| format!("{o:.4}"))
                    .unwrap_or_else(|| "-".into())
            };
            let _ = writeln!(
                s,
                "{:.6e} {:.10e} {:.6e} {order}",
                self.h[i], self.values[i], self.errors[i]
            );
        }
        s
    }
}

/// Errors below this are treated as exact reproduction (no order).
pub const ROUND_OFF: f64 = 1e-9;

/// Solves the benchmark on the base mesh and `refinements` nested uniform
/// refinements (the subdivision count doubles each time; the grid mesher's
/// meshes at `n` and `2n` are nested) and fits the observed order.
pub fn convergence_study(setup: &BenchmarkSetup, refinements: usize, solver: SolverKind) -> Result<BenchmarkResult> {
    if refinements < 3 {
        return Err(PlateError::InvalidInput(format!(
            "a convergence study needs at least 3 refinements, got {refinements}"
        )));
    }
    let mut values = Vec::new();
    let mut errors = Vec::new();
    let mut h = Vec::new();
    for level in 0..=refinements {
        let mesh = mesh_structure(&setup.model, setup.base_subdivisions << level)?;
        let problem = setup.problem(mesh)?;
        let sol = solve(&problem, solver)?;
        let v = setup.measure(&problem, &sol.dofs)?;
        let err = if setup.id == BenchmarkId::MembranePatch {
            v
        } else {
            ((v - setup.reference) / setup.reference).abs()
        };
        values.push(v);
        errors.push(err);
        h.push(problem.mesh.mesh_size_h);
    }
    let mut warnings = Vec::new();
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let observed_order = if errors.iter().all(|e| *e <= ROUND_OFF) {
        warnings.push("errors at round-off level on every mesh; order undefined".to_string());
        None
    } else {
        observed_order(&h, &errors)
    };
    if !monotone && observed_order.is_some() {
        warnings.push("error sequence is not monotonically decreasing".to_string());
    }
    Ok(BenchmarkResult {
        name: setup.id.as_str().to_string(),
        quantity: setup.id.quantity().to_string(),
        values,
        reference: setup.reference,
        errors,
        h,
        observed_order,
        monotone,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn navier_unit_plate() {
        let w = navier_deflection(1.0, 1.0, 1.0, NAVIER_TERMS);
        assert!((w - 4.0624e-3).abs() < 5e-8, "{w}");
        assert_eq!(navier_deflection(1.0, 0.0, 1.0, 25), 0.0);
        let a = navier_deflection(1.0, 1.0, 1.0, 50);
        let b = navier_deflection(1.0, 1.0, 2.0, 50);
        assert!((a - 2.0 * b).abs() < 1e-18);
    }

    #[test]
    fn navier_truncation_is_monotone() {
        let diffs: Vec<f64> = [12, 25, 50, 99]
            .iter()
            .map(|&n| (navier_deflection(1.0, 1.0, 1.0, n) - navier_deflection(1.0, 1.0, 1.0, 2 * n)).abs())
            .collect();
        assert!(diffs.windows(2).all(|w| w[1] < w[0]));
        assert!(diffs[3] < 1e-8);
    }

    #[test]
    fn cantilever_formula() {
        assert!((cantilever_strip_reference(1.0, 1.0, 12.0, 1.0, 1.0) - 1.0 / 3.0).abs() < 1e-15);
        let a = cantilever_strip_reference(1.0, 1.0, 12.0, 1.0, 1.0);
        let b = cantilever_strip_reference(1.0, 1.0, 12.0, 2.0, 1.0);
        assert!((a / b - 8.0).abs() < 1e-12);
    }

    #[test]
    fn clamped_scaling() {
        let w1 = clamped_square_reference(1.0, 1.0, 1.0);
        assert!((w1 - 1.26e-3).abs() < 1e-5);
        assert!((clamped_square_reference(2.0, 1.0, 1.0) / w1 - 16.0).abs() < 1e-12);
        assert_eq!(clamped_square_reference(1.0, -1.0, 1.0), -w1);
    }

    #[test]
    fn order_fit() {
        let h = [0.4, 0.2, 0.1];
        let e = [1.6e-2, 4e-3, 1e-3];
        assert!((observed_order(&h, &e).unwrap() - 2.0).abs() < 1e-12);
        assert!(observed_order(&h, &[0.0, 0.0, 0.0]).is_none());
    }

    #[test]
    fn benchmark_names_round_trip() {
        for b in BenchmarkId::ALL {
            assert_eq!(BenchmarkId::parse(b.as_str()).unwrap(), b);
        }
        let err = BenchmarkId::parse("nope").unwrap_err().to_string();
        assert!(err.contains("ss_square") && err.contains("membrane_patch"));
    }
}
