//! Global system assembly.
//!
//! Local blocks are computed in parallel in fixed-size chunks and then added
//! into a precomputed sparsity pattern in element/edge order, so the matrix
//! is bitwise independent of the thread count.

mod blocks;
mod dofmap;
mod sparse;

use nalgebra::{DMatrix, Vector3};
use rayon::prelude::*;

pub use blocks::{
    bending_block, edge_blocks, edge_has_terms, element_dofs, membrane_block, EdgeBlocks, EDGE_QUADRATURE,
    ELEMENT_QUADRATURE,
};
pub use dofmap::{support_nodes, DofMap};
pub use sparse::CsrMatrix;

use crate::error::{PlateError, Result};
use crate::mesh::{EdgeRecord, TriMesh6};
use crate::model::{BodyLoad, LineLoad, Material};
use crate::tdc::{p2_shape, seg_quadrature, tri_quadrature};

const CHUNK: usize = 2048;

/// A global matrix with its right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

impl SparseSystem {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }
}

/// Which bilinear-form contributions to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Terms {
    pub membrane: bool,
    pub bending: bool,
    pub consistency: bool,
    pub penalty: bool,
}

impl Terms {
    pub const ALL: Terms = Terms {
        membrane: true,
        bending: true,
        consistency: true,
        penalty: true,
    };
    pub const NONE: Terms = Terms {
        membrane: false,
        bending: false,
        consistency: false,
        penalty: false,
    };
}

/// Zero matrix with the pattern of the full operator: node pairs sharing an
/// element, or lying on the two elements of an edge with terms.
pub fn sparsity_pattern(mesh: &TriMesh6) -> CsrMatrix {
    let nn = mesh.nodes.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nn];
    let mut link = |nodes: &[usize]| {
        for &a in nodes {
            adj[a].extend_from_slice(nodes);
        }
    };
    for el in &mesh.elements {
        link(&el.nodes);
    }
    for e in &mesh.edges {
        if edge_has_terms(e.kind) && e.sides.len() == 2 {
            let mut nodes: Vec<usize> = e.sides.iter().flat_map(|s| mesh.elements[s.element].nodes).collect();
            nodes.sort_unstable();
            nodes.dedup();
            link(&nodes);
        }
    }
    let mut rows = Vec::with_capacity(3 * nn);
    for mut a in adj {
        a.sort_unstable();
        a.dedup();
        let cols: Vec<usize> = a.iter().flat_map(|&n| [3 * n, 3 * n + 1, 3 * n + 2]).collect();
        for _ in 0..3 {
            rows.push(cols.clone());
        }
    }
    CsrMatrix::from_pattern(3 * nn, rows)
}

/// Assembles the selected terms of the bilinear form.
pub fn assemble_operator(mesh: &TriMesh6, material: &Material, beta0: f64, terms: Terms) -> Result<CsrMatrix> {
    if !(beta0 > 0.0 && beta0.is_finite()) {
        return Err(PlateError::InvalidInput(format!("penalty beta0 must be positive, got {beta0}")));
    }
    let mut a = sparsity_pattern(mesh);
    if terms.membrane || terms.bending {
        let ids: Vec<usize> = (0..mesh.elements.len()).collect();
        for chunk in ids.chunks(CHUNK) {
            let blocks: Vec<(Vec<usize>, DMatrix<f64>)> = chunk
                .par_iter()
                .map(|&e| {
                    let frame = mesh.frame(e);
                    let mut k = DMatrix::zeros(18, 18);
                    if terms.membrane {
                        k += membrane_block(&frame, material);
                    }
                    if terms.bending {
                        k += bending_block(&frame, material);
                    }
                    (element_dofs(mesh, e), k)
                })
                .collect();
            for (dofs, k) in &blocks {
                a.add_block(dofs, k);
            }
        }
    }
    if terms.consistency || terms.penalty {
        for chunk in mesh.edges.chunks(CHUNK) {
            let blocks: Vec<Option<EdgeBlocks>> = chunk
                .par_iter()
                .map(|e| edge_blocks(mesh, e, material, beta0))
                .collect::<Result<_>>()?;
            for b in blocks.into_iter().flatten() {
                let mut k = DMatrix::zeros(b.dofs.len(), b.dofs.len());
                if terms.consistency {
                    k += &b.consistency;
                }
                if terms.penalty {
                    k += &b.penalty;
                }
                a.add_block(&b.dofs, &k);
            }
        }
    }
    Ok(a)
}

/// Membrane term `Σ_K (σ_Γ(P v), ε_Γ(P w))_K`.
pub fn assemble_membrane(mesh: &TriMesh6, material: &Material) -> CsrMatrix {
    let terms = Terms {
        membrane: true,
        ..Terms::NONE
    };
    assemble_operator(mesh, material, 1.0, terms).expect("element terms cannot fail")
}

/// Bending volume term `t̃² Σ_K (σ_Γ(∇_Γv_n), ε_Γ(∇_Γw_n))_K`.
pub fn assemble_bending_volume(mesh: &TriMesh6, material: &Material) -> CsrMatrix {
    let terms = Terms {
        bending: true,
        ..Terms::NONE
    };
    assemble_operator(mesh, material, 1.0, terms).expect("element terms cannot fail")
}

/// Consistency, symmetry and penalty terms on interior and clamped edges.
pub fn assemble_edge_terms(mesh: &TriMesh6, material: &Material, beta0: f64) -> Result<CsrMatrix> {
    let terms = Terms {
        consistency: true,
        penalty: true,
        ..Terms::NONE
    };
    assemble_operator(mesh, material, beta0, terms)
}

/// Sum of the body forces acting on element `e`.
pub fn element_body_force(mesh: &TriMesh6, loads: &[BodyLoad], e: usize) -> Vector3<f64> {
    let c = mesh.centroid(e);
    let patch = mesh.elements[e].patch;
    loads
        .iter()
        .filter(|l| l.region.contains(patch, &c))
        .fold(Vector3::zeros(), |acc, l| acc + l.force)
}

/// Sum of the line loads acting on a one-sided edge.
pub fn edge_line_force(edge: &EdgeRecord, line_loads: &[LineLoad]) -> Vector3<f64> {
    let Some((patch, bs)) = edge.boundary else {
        return Vector3::zeros();
    };
    line_loads
        .iter()
        .filter(|l| l.patch == patch && l.side == bs.side)
        .fold(Vector3::zeros(), |acc, l| acc + l.force)
}

/// Load vector `(f, v)_Γ` plus line tractions `(g, v)_E`.
pub fn assemble_load(mesh: &TriMesh6, loads: &[BodyLoad], line_loads: &[LineLoad]) -> Result<Vec<f64>> {
    let mut rhs = vec![0.0; 3 * mesh.nodes.len()];
    let rule = tri_quadrature(ELEMENT_QUADRATURE)?;
    let weights: Vec<f64> = (0..6)
        .map(|i| rule.iter().map(|q| q.weight * p2_shape(q.point).values[i]).sum())
        .collect();
    for (e, el) in mesh.elements.iter().enumerate() {
        let f = element_body_force(mesh, loads, e);
        if f == Vector3::zeros() {
            continue;
        }
        let jac = 2.0 * mesh.element_area(e);
        for i in 0..6 {
            for a in 0..3 {
                rhs[3 * el.nodes[i] + a] += f[a] * weights[i] * jac;
            }
        }
    }
    let seg = seg_quadrature(EDGE_QUADRATURE)?;
    for ll in line_loads {
        let mut hits = 0;
        for edge in &mesh.edges {
            let Some((patch, bs)) = edge.boundary else { continue };
            if patch != ll.patch || bs.side != ll.side {
                continue;
            }
            hits += 1;
            let s = &edge.sides[0];
            let frame = mesh.frame(s.element);
            let el = &mesh.elements[s.element];
            let (xa, xb) = (mesh.nodes[edge.nodes[0]], mesh.nodes[edge.nodes[1]]);
            for q in &seg {
                let shape = p2_shape(frame.pullback(&(xa + (xb - xa) * q.point)));
                let w = q.weight * edge.length;
                for i in 0..6 {
                    for a in 0..3 {
                        rhs[3 * el.nodes[i] + a] += w * shape.values[i] * ll.force[a];
                    }
                }
            }
        }
        if hits == 0 {
            return Err(PlateError::InvalidInput(format!(
                "line load on patch {} side {} matches no boundary edge (junction sides cannot carry line loads)",
                ll.patch, ll.side
            )));
        }
    }
    Ok(rhs)
}

/// The system on free DOFs after symmetric elimination of prescribed ones.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Global index of each reduced unknown.
    pub free: Vec<usize>,
    /// Full-length vector holding prescribed values (zero on free DOFs).
    pub prescribed: Vec<f64>,
}

impl ReducedSystem {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Scatters a reduced solution into a full DOF vector.
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        assert_eq!(reduced.len(), self.free.len());
        let mut full = self.prescribed.clone();
        for (k, &d) in self.free.iter().enumerate() {
            full[d] = reduced[k];
        }
        full
    }
}

/// Removes prescribed DOFs: `A_ff u_f = b_f − A_fc u_c`.
pub fn apply_constraints(system: &SparseSystem, dofmap: &DofMap) -> Result<ReducedSystem> {
    let n = system.dim();
    if dofmap.len() != n || system.matrix.nrows() != n || system.matrix.ncols() != n {
        return Err(PlateError::InvalidInput(format!(
            "dof map has {} dofs but the system has dimension {n}",
            dofmap.len()
        )));
    }
    if let Some((&d, _)) = dofmap.constraints().iter().next_back() {
        if d >= n {
            return Err(PlateError::InvalidInput(format!("constraint on nonexistent dof {d}")));
        }
    }
    let mut prescribed = vec![0.0; n];
    for (&d, &v) in dofmap.constraints() {
        prescribed[d] = v;
    }
    let free = dofmap.free_dofs();
    let mut map = vec![None; n];
    for (k, &d) in free.iter().enumerate() {
        map[d] = Some(k);
    }
    let lifted = system.matrix.mul_vec(&prescribed);
    let rhs = free.iter().map(|&d| system.rhs[d] - lifted[d]).collect();
    let matrix = system.matrix.select(&map, &map, free.len(), free.len());
    Ok(ReducedSystem {
        matrix,
        rhs,
        free,
        prescribed,
    })
}
