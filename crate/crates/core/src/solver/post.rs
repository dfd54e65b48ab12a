use nalgebra::{DVector, Matrix3, Vector3};
use rayon::prelude::*;

use super::Solution;
use crate::assembly::{
    bending_block, edge_blocks, edge_line_force, element_body_force, element_dofs, membrane_block, EDGE_QUADRATURE,
};
use crate::forms::{
    bending_hessian, corner_force, eps_gamma, force_traces, moment, sigma_gamma, EdgeTraces, MultilinearTrace,
    SideState, TraceValue, FORCE_DEGREE, MOMENT_DEGREE,
};
use crate::mesh::{EdgeKind, EdgeRecord, TriMesh6};
use crate::model::{Material, Point3};
use crate::tdc::{p2_shape, physical_gradients, physical_hessians, seg_quadrature, ElementFrame};

/// Quadratic-form values of the solution, split by term.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Energies {
    /// `a_h(u_t, u_t)`.
    pub membrane: f64,
    /// `t̃² Σ_K (σ_Γ(∇_Γu_n), ε_Γ(∇_Γu_n))_K`.
    pub bending_volume: f64,
    /// `−2 (⟨M(u)⟩, [ν·∇_Γu_n])` over interior and clamped edges.
    pub consistency: f64,
    /// `(β t̃²/h_E) ‖[ν·∇_Γu_n]‖²` over the same edges.
    pub penalty: f64,
}

impl Energies {
    /// Bending energy including the edge terms.
    pub fn bending(&self) -> f64 {
        self.bending_volume + self.consistency + self.penalty
    }

    pub fn total(&self) -> f64 {
        self.membrane + self.bending()
    }

    pub fn membrane_to_bending(&self) -> f64 {
        self.membrane / self.bending()
    }
}

fn local(dofs: &[f64], ids: &[usize]) -> DVector<f64> {
    DVector::from_iterator(ids.len(), ids.iter().map(|&d| dofs[d]))
}

/// Term-by-term values of `A_h(U, U)`; they sum to the full quadratic form.
pub fn energies(sol: &Solution<'_>) -> Energies {
    let mesh = &sol.problem.mesh;
    let mat = sol.problem.material();
    let u = &sol.dofs;
    let per_element: Vec<(f64, f64)> = (0..mesh.elements.len())
        .into_par_iter()
        .map(|e| {
            let frame = mesh.frame(e);
            let ue = local(u, &element_dofs(mesh, e));
            let m = ue.dot(&(membrane_block(&frame, mat) * &ue));
            let b = ue.dot(&(bending_block(&frame, mat) * &ue));
            (m, b)
        })
        .collect();
    let per_edge: Vec<(f64, f64)> = mesh
        .edges
        .par_iter()
        .map(|edge| match edge_blocks(mesh, edge, mat, sol.problem.beta0()) {
            Ok(Some(b)) => {
                let ue = local(u, &b.dofs);
                (ue.dot(&(&b.consistency * &ue)), ue.dot(&(&b.penalty * &ue)))
            }
            _ => (0.0, 0.0),
        })
        .collect();
    let mut out = Energies::default();
    for (m, b) in per_element {
        out.membrane += m;
        out.bending_volume += b;
    }
    for (c, p) in per_edge {
        out.consistency += c;
        out.penalty += p;
    }
    out
}

/// Element data needed to evaluate stresses from the solution.
struct ElementState {
    frame: ElementFrame,
    hessians: [Matrix3<f64>; 6],
    u: [Vector3<f64>; 6],
    kappa: Matrix3<f64>,
}

fn element_state(mesh: &TriMesh6, dofs: &[f64], e: usize) -> ElementState {
    let frame = mesh.frame(e);
    let hessians = physical_hessians(&frame);
    let nodes = mesh.elements[e].nodes;
    let u = nodes.map(|n| Vector3::new(dofs[3 * n], dofs[3 * n + 1], dofs[3 * n + 2]));
    let kappa = bending_hessian(&hessians, &u, &frame.normal);
    ElementState {
        frame,
        hessians,
        u,
        kappa,
    }
}

impl ElementState {
    /// `σ_Γ(P u)` at a point of the element.
    fn membrane_stress(&self, mat: &Material, x: &Point3) -> Matrix3<f64> {
        let p = self.frame.projector;
        let g = physical_gradients(&self.frame, &p2_shape(self.frame.pullback(x)));
        let jac = (0..6).fold(Matrix3::zeros(), |acc, i| acc + (p * self.u[i]) * g[i].transpose());
        sigma_gamma(&eps_gamma(&jac, &self.frame.normal), mat, &p)
    }

    /// `∇_Γ·σ_Γ(P u)`, constant on a quadratic element.
    fn membrane_divergence(&self, mat: &Material) -> Vector3<f64> {
        let p = self.frame.projector;
        let n = self.frame.normal;
        let mut div = Vector3::zeros();
        for k in 0..3 {
            let djac = (0..6).fold(Matrix3::zeros(), |acc, i| {
                acc + (p * self.u[i]) * self.hessians[i].column(k).transpose()
            });
            let ds = sigma_gamma(&eps_gamma(&djac, &n), mat, &p);
            div += ds.column(k);
        }
        div
    }
}

/// Jump norms on one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeDiagnostic {
    pub edge: usize,
    pub kind: EdgeKind,
    /// `‖[M]‖_{L²(E)}`; on free edges the one-sided moment.
    pub moment_jump: f64,
    /// `‖[F]‖_{L²(E)}`; on free edges the one-sided force plus any line load.
    pub force_jump: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceDiagnostics {
    /// Interior and free edges, in mesh edge order. Dirichlet edges carry
    /// reactions and are skipped.
    pub edges: Vec<EdgeDiagnostic>,
    /// Sum of Kirchhoff corner forces at each mesh vertex off the Dirichlet
    /// boundary, in node order.
    pub corner_sums: Vec<(usize, Vector3<f64>)>,
    /// `‖[M]‖_{L²}` over all junction edges.
    pub junction_moment_jump: f64,
    /// `‖[F]‖_{L²}` over all junction edges.
    pub junction_force_jump: f64,
    /// `‖[M]‖_{L²}` over all coplanar interior edges.
    pub interior_moment_jump: f64,
}

fn traces<V: TraceValue>(v: Vec<MultilinearTrace<V>>) -> EdgeTraces<V> {
    match v.len() {
        2 => EdgeTraces::Interior {
            plus: v[0],
            minus: v[1],
        },
        _ => EdgeTraces::Boundary(v[0]),
    }
}

fn edge_diagnostic(sol: &Solution<'_>, idx: usize, edge: &EdgeRecord, states: &[ElementState]) -> EdgeDiagnostic {
    let mat = sol.problem.material();
    let mesh = &sol.problem.mesh;
    let moments: Vec<MultilinearTrace<f64>> = edge
        .sides
        .iter()
        .map(|s| {
            let st = &states[s.element];
            moment(&st.kappa, mat, &st.frame.normal, &s.conormal)
        })
        .collect();
    let m_jump = traces(moments).jump().expect("equal degrees");
    debug_assert_eq!(MOMENT_DEGREE, 2);

    let line = edge_line_force(edge, &sol.problem.model.line_loads);
    let (xa, xb) = (mesh.nodes[edge.nodes[0]], mesh.nodes[edge.nodes[1]]);
    let mut f_sq = 0.0;
    for q in seg_quadrature(EDGE_QUADRATURE).expect("supported order") {
        let x = xa + (xb - xa) * q.point;
        let forces: Vec<MultilinearTrace<Vector3<f64>>> = edge
            .sides
            .iter()
            .map(|s| {
                let st = &states[s.element];
                let state = SideState::quadratic(st.membrane_stress(mat, &x));
                let (f_n, f_t) = force_traces(&state, &s.conormal, &st.frame.normal, mat);
                MultilinearTrace::new(f_n.value + f_t.value, FORCE_DEGREE)
            })
            .collect();
        let mut jump = traces(forces).jump().expect("equal degrees");
        if edge.sides.len() == 1 {
            jump += line;
        }
        f_sq += q.weight * edge.length * jump.norm_squared();
    }
    EdgeDiagnostic {
        edge: idx,
        kind: edge.kind,
        moment_jump: m_jump.abs() * edge.length.sqrt(),
        force_jump: f_sq.sqrt(),
    }
}

fn states(sol: &Solution<'_>) -> Vec<ElementState> {
    let mesh = &sol.problem.mesh;
    (0..mesh.elements.len())
        .into_par_iter()
        .map(|e| element_state(mesh, &sol.dofs, e))
        .collect()
}

fn diagnosed(kind: EdgeKind) -> bool {
    matches!(kind, EdgeKind::InteriorSamePlane | EdgeKind::InteriorJunction | EdgeKind::Free)
}

/// Moment and force jumps per edge and corner-force sums per vertex.
pub fn trace_diagnostics(sol: &Solution<'_>) -> TraceDiagnostics {
    let mesh = &sol.problem.mesh;
    let mat = sol.problem.material();
    let st = states(sol);
    let edges: Vec<EdgeDiagnostic> = mesh
        .edges
        .par_iter()
        .enumerate()
        .filter(|(_, e)| diagnosed(e.kind))
        .map(|(i, e)| edge_diagnostic(sol, i, e, &st))
        .collect();
    let norm = |kind: EdgeKind, f: fn(&EdgeDiagnostic) -> f64| {
        edges
            .iter()
            .filter(|d| d.kind == kind)
            .map(|d| f(d).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let junction_moment_jump = norm(EdgeKind::InteriorJunction, |d| d.moment_jump);
    let junction_force_jump = norm(EdgeKind::InteriorJunction, |d| d.force_jump);
    let interior_moment_jump = norm(EdgeKind::InteriorSamePlane, |d| d.moment_jump);

    let dirichlet = mesh.nodes_on_edges(&[EdgeKind::DirichletClamped, EdgeKind::DirichletSimplySupported]);
    let mut sums: Vec<Option<Vector3<f64>>> = vec![None; mesh.nodes.len()];
    for (e, el) in mesh.elements.iter().enumerate() {
        let c = mesh.element_corners(e);
        let centroid = mesh.centroid(e);
        let n = st[e].frame.normal;
        for k in 0..3 {
            let mut f = Vector3::zeros();
            // The two element edges meeting at corner k, each directed into it.
            for other in [(k + 1) % 3, (k + 2) % 3] {
                let tau = (c[k] - c[other]).normalize();
                let mut nu = tau.cross(&n);
                if nu.dot(&(0.5 * (c[k] + c[other]) - centroid)) < 0.0 {
                    nu = -nu;
                }
                f += corner_force(&st[e].kappa, mat, &n, &tau, &nu);
            }
            let slot = sums[el.nodes[k]].get_or_insert_with(Vector3::zeros);
            *slot += f;
        }
    }
    let corner_sums = sums
        .into_iter()
        .enumerate()
        .filter_map(|(i, s)| s.map(|v| (i, v)))
        .filter(|(i, _)| dirichlet.binary_search(i).is_err())
        .collect();
    TraceDiagnostics {
        edges,
        corner_sums,
        junction_moment_jump,
        junction_force_jump,
        interior_moment_jump,
    }
}

/// Residual error indicators `η_K` (nonnegative, one per element):
///
/// ```text
/// η_K² = h_K² ‖P f + ∇_Γ·σ_Γ(P u)‖²_K
///      + h_K⁴ t̃⁻² ‖f·n‖²_K
///      + Σ_{E ⊂ ∂K} ω_E h_K ( ‖[F]‖²_E + t̃⁻² ‖[M]‖²_E )
/// ```
///
/// with `ω_E = ½` on interior edges (shared by two elements), `ω_E = 1` on
/// free edges and `ω_E = 0` on Dirichlet edges. `h_K` is the element
/// diameter. Quadratic elements have constant curvature, so the normal
/// interior residual reduces to the normal load.
pub fn residual_indicators(sol: &Solution<'_>) -> Vec<f64> {
    let mesh = &sol.problem.mesh;
    let mat = sol.problem.material();
    let st = states(sol);
    let t2 = mat.t_tilde_sq();
    let mut eta_sq: Vec<f64> = (0..mesh.elements.len())
        .into_par_iter()
        .map(|e| {
            let s = &st[e];
            let f = element_body_force(mesh, &sol.problem.model.loads, e);
            let h = mesh.element_diameter(e);
            let area = s.frame.area;
            let r_t = s.frame.projector * f + s.membrane_divergence(mat);
            let r_n = f.dot(&s.frame.normal);
            h * h * r_t.norm_squared() * area + h.powi(4) / t2 * r_n * r_n * area
        })
        .collect();
    let diags: Vec<EdgeDiagnostic> = mesh
        .edges
        .par_iter()
        .enumerate()
        .filter(|(_, e)| diagnosed(e.kind))
        .map(|(i, e)| edge_diagnostic(sol, i, e, &st))
        .collect();
    for d in diags {
        let edge = &mesh.edges[d.edge];
        let omega = if edge.kind.is_interior() { 0.5 } else { 1.0 };
        let jump = d.force_jump.powi(2) + d.moment_jump.powi(2) / t2;
        for s in &edge.sides {
            eta_sq[s.element] += omega * mesh.element_diameter(s.element) * jump;
        }
    }
    eta_sq.into_iter().map(f64::sqrt).collect()
}
