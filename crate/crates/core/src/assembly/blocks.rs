//! Dense local matrices for one element or one edge.

use nalgebra::{DMatrix, Matrix3, Vector3};

use crate::error::{PlateError, Result};
use crate::forms::{average_weights, eps_gamma, jump_weights, moment, sigma_gamma, MOMENT_DEGREE, ROTATION_DEGREE};
use crate::mesh::{EdgeKind, EdgeRecord, TriMesh6};
use crate::model::Material;
use crate::tdc::{p2_shape, physical_gradients, physical_hessians, seg_quadrature, tri_quadrature, ElementFrame};

/// Quadrature order for element integrals.
pub const ELEMENT_QUADRATURE: usize = 4;
/// Quadrature order along edges (3-point Gauss).
pub const EDGE_QUADRATURE: usize = 4;

/// Global DOFs of an element in local order `3·i + component`.
pub fn element_dofs(mesh: &TriMesh6, e: usize) -> Vec<usize> {
    mesh.elements[e]
        .nodes
        .iter()
        .flat_map(|&n| [3 * n, 3 * n + 1, 3 * n + 2])
        .collect()
}

/// `Σ_K (σ_Γ(P v), ε_Γ(P w))` on one element, 18×18.
pub fn membrane_block(frame: &ElementFrame, material: &Material) -> DMatrix<f64> {
    let n = frame.normal;
    let p = frame.projector;
    let mut k = DMatrix::zeros(18, 18);
    let rule = tri_quadrature(ELEMENT_QUADRATURE).expect("supported order");
    for qp in rule {
        let g = physical_gradients(frame, &p2_shape(qp.point));
        let mut eps = [Matrix3::zeros(); 18];
        let mut sig = [Matrix3::zeros(); 18];
        for i in 0..6 {
            for a in 0..3 {
                let jac = p.column(a) * g[i].transpose();
                eps[3 * i + a] = eps_gamma(&jac, &n);
                sig[3 * i + a] = sigma_gamma(&eps[3 * i + a], material, &p);
            }
        }
        let w = qp.weight * 2.0 * frame.area;
        for r in 0..18 {
            for c in r..18 {
                let v = w * sig[r].dot(&eps[c]);
                k[(r, c)] += v;
                if c != r {
                    k[(c, r)] += v;
                }
            }
        }
    }
    k
}

/// Curvature of the unit displacement `φᵢ e_a`: `n_a Hᵢ`.
fn unit_curvatures(frame: &ElementFrame) -> [Matrix3<f64>; 18] {
    let h = physical_hessians(frame);
    let mut out = [Matrix3::zeros(); 18];
    for i in 0..6 {
        for a in 0..3 {
            out[3 * i + a] = h[i] * frame.normal[a];
        }
    }
    out
}

/// `t̃² (σ_Γ(∇_Γv_n), ε_Γ(∇_Γw_n))_K` on one element, 18×18. The Hessians
/// are element constants, so the integral is exact.
pub fn bending_block(frame: &ElementFrame, material: &Material) -> DMatrix<f64> {
    let kappa = unit_curvatures(frame);
    let sig: Vec<Matrix3<f64>> = kappa
        .iter()
        .map(|k| sigma_gamma(k, material, &frame.projector))
        .collect();
    let scale = material.t_tilde_sq() * frame.area;
    DMatrix::from_fn(18, 18, |r, c| scale * sig[r].dot(&kappa[c]))
}

/// Edge contributions split into the two consistency terms and the penalty.
#[derive(Debug, Clone)]
pub struct EdgeBlocks {
    /// Global DOFs of the union of the incident elements' nodes.
    pub dofs: Vec<usize>,
    /// `−(⟨M(v)⟩,[r(w)]) − (⟨M(w)⟩,[r(v)])` where `r = ν·∇_Γu_n`.
    pub consistency: DMatrix<f64>,
    /// `(β t̃² / h_E) ([r(v)], [r(w)])`.
    pub penalty: DMatrix<f64>,
}

/// One incident element as seen from an edge.
struct SideData {
    frame: ElementFrame,
    conormal: Vector3<f64>,
    /// Position of each local DOF in the union DOF list.
    slot: [usize; 18],
    /// Moment of each unit displacement (element constant).
    moment: [f64; 18],
}

/// Whether an edge carries consistency and penalty terms.
pub fn edge_has_terms(kind: EdgeKind) -> bool {
    matches!(
        kind,
        EdgeKind::InteriorSamePlane | EdgeKind::InteriorJunction | EdgeKind::DirichletClamped
    )
}

/// Local edge matrices, or `None` for edges without terms.
pub fn edge_blocks(mesh: &TriMesh6, edge: &EdgeRecord, material: &Material, beta0: f64) -> Result<Option<EdgeBlocks>> {
    if !edge_has_terms(edge.kind) {
        return Ok(None);
    }
    let expected = if edge.kind.is_interior() { 2 } else { 1 };
    if edge.sides.len() != expected {
        return Err(PlateError::Topology(format!(
            "{} edge ({}, {}) has {} sides, expected {expected}",
            edge.kind.as_str(),
            edge.nodes[0],
            edge.nodes[1],
            edge.sides.len()
        )));
    }

    let mut dofs: Vec<usize> = Vec::with_capacity(27);
    let mut sides = Vec::with_capacity(2);
    for s in &edge.sides {
        let frame = mesh.frame(s.element);
        let kappa = unit_curvatures(&frame);
        let mut slot = [0; 18];
        let mut m = [0.0; 18];
        for (l, d) in element_dofs(mesh, s.element).into_iter().enumerate() {
            slot[l] = match dofs.iter().position(|&x| x == d) {
                Some(p) => p,
                None => {
                    dofs.push(d);
                    dofs.len() - 1
                }
            };
            m[l] = moment(&kappa[l], material, &frame.normal, &s.conormal).value;
        }
        sides.push(SideData {
            frame,
            conormal: s.conormal,
            slot,
            moment: m,
        });
    }

    let (avg_w, jump_w) = if sides.len() == 2 {
        (average_weights(MOMENT_DEGREE), jump_weights(ROTATION_DEGREE))
    } else {
        // Dirichlet edge: ⟨w⟩ = [w] = w.
        ([1.0, 0.0], [1.0, 0.0])
    };

    let nd = dofs.len();
    let mut avg_moment = vec![0.0; nd];
    for (s, side) in sides.iter().enumerate() {
        for l in 0..18 {
            avg_moment[side.slot[l]] += avg_w[s] * side.moment[l];
        }
    }

    let xa = mesh.nodes[edge.nodes[0]];
    let xb = mesh.nodes[edge.nodes[1]];
    let len = edge.length;
    let mut jump_int = vec![0.0; nd];
    let mut penalty = DMatrix::zeros(nd, nd);
    let beta = beta0 * (2.0 * material.mu() + 2.0 * material.lambda());
    let pen_scale = beta * material.t_tilde_sq() / len;
    for qp in seg_quadrature(EDGE_QUADRATURE)? {
        let x = xa + (xb - xa) * qp.point;
        let mut jump = vec![0.0; nd];
        for (s, side) in sides.iter().enumerate() {
            let g = physical_gradients(&side.frame, &p2_shape(side.frame.pullback(&x)));
            for i in 0..6 {
                let r = side.conormal.dot(&g[i]);
                for a in 0..3 {
                    jump[side.slot[3 * i + a]] += jump_w[s] * r * side.frame.normal[a];
                }
            }
        }
        let w = qp.weight * len;
        for p in 0..nd {
            jump_int[p] += w * jump[p];
            if jump[p] == 0.0 {
                continue;
            }
            for q in 0..nd {
                penalty[(p, q)] += w * pen_scale * jump[p] * jump[q];
            }
        }
    }
    let consistency = DMatrix::from_fn(nd, nd, |p, q| -(avg_moment[p] * jump_int[q] + jump_int[p] * avg_moment[q]));
    Ok(Some(EdgeBlocks {
        dofs,
        consistency,
        penalty,
    }))
}
