use std::collections::BTreeMap;

use nalgebra::Vector3;

use crate::error::{PlateError, Result};
use crate::mesh::{EdgeKind, TriMesh6};
use crate::model::Support;

/// Three displacement DOFs per node (`3·node + component`) and the set of
/// strongly prescribed DOFs.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    n_nodes: usize,
    constraints: BTreeMap<usize, f64>,
}

impl DofMap {
    pub fn new(n_nodes: usize) -> Self {
        Self {
            n_nodes,
            constraints: BTreeMap::new(),
        }
    }

    /// Homogeneous constraints from clamped and simply supported edges and
    /// from the given supports.
    pub fn from_mesh(mesh: &TriMesh6, supports: &[Support]) -> Result<Self> {
        let mut map = Self::new(mesh.nodes.len());
        for node in mesh.nodes_on_edges(&[EdgeKind::DirichletClamped, EdgeKind::DirichletSimplySupported]) {
            map.constrain_node(node, Vector3::zeros())?;
        }
        for s in supports {
            for node in support_nodes(mesh, s) {
                map.constrain_node(node, Vector3::zeros())?;
            }
        }
        Ok(map)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Total DOF count, `3 · nodes`.
    pub fn len(&self) -> usize {
        3 * self.n_nodes
    }

    pub fn is_empty(&self) -> bool {
        self.n_nodes == 0
    }

    pub fn dof(&self, node: usize, component: usize) -> usize {
        debug_assert!(node < self.n_nodes && component < 3);
        3 * node + component
    }

    pub fn node_dofs(&self, node: usize) -> [usize; 3] {
        [3 * node, 3 * node + 1, 3 * node + 2]
    }

    pub fn constrain(&mut self, dof: usize, value: f64) -> Result<()> {
        if dof >= self.len() {
            return Err(PlateError::InvalidInput(format!(
                "constraint on dof {dof}, but only {} dofs exist",
                self.len()
            )));
        }
        if !value.is_finite() {
            return Err(PlateError::InvalidInput(format!("constraint value for dof {dof} is not finite")));
        }
        self.constraints.insert(dof, value);
        Ok(())
    }

    pub fn constrain_node(&mut self, node: usize, value: Vector3<f64>) -> Result<()> {
        if node >= self.n_nodes {
            return Err(PlateError::InvalidInput(format!("constraint on missing node {node}")));
        }
        for a in 0..3 {
            self.constrain(3 * node + a, value[a])?;
        }
        Ok(())
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constraints.contains_key(&dof)
    }

    pub fn prescribed(&self, dof: usize) -> Option<f64> {
        self.constraints.get(&dof).copied()
    }

    pub fn constraints(&self) -> &BTreeMap<usize, f64> {
        &self.constraints
    }

    pub fn free_dofs(&self) -> Vec<usize> {
        (0..self.len()).filter(|d| !self.constraints.contains_key(d)).collect()
    }
}

/// Nodes fixed by a support.
pub fn support_nodes(mesh: &TriMesh6, support: &Support) -> Vec<usize> {
    let mut nodes: Vec<usize> = match *support {
        Support::FixPatch { patch } => mesh
            .elements
            .iter()
            .filter(|el| el.patch == patch)
            .flat_map(|el| el.nodes)
            .collect(),
        // Edges with exactly one incident element from the patch form its perimeter.
        Support::FixPatchBoundary { patch } => mesh
            .edges
            .iter()
            .filter(|e| e.sides.iter().filter(|s| mesh.elements[s.element].patch == patch).count() == 1)
            .flat_map(|e| e.nodes)
            .collect(),
    };
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_patch_mesh;
    use crate::model::{BoundaryTag, PlatePatch, Point3};

    fn square(tags: [BoundaryTag; 4]) -> TriMesh6 {
        let p = PlatePatch::new(
            0,
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(1.0, 1.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            Some(Vector3::z()),
            tags.to_vec(),
        )
        .unwrap();
        build_patch_mesh(&p, 2).unwrap()
    }

    #[test]
    fn clamped_square_fixes_perimeter() {
        let m = square([BoundaryTag::Clamped; 4]);
        let d = DofMap::from_mesh(&m, &[]).unwrap();
        // 5×5 node grid, 16 on the perimeter.
        assert_eq!(d.constraints().len(), 3 * 16);
        assert_eq!(d.free_dofs().len(), 3 * 9);
    }

    #[test]
    fn free_square_has_no_constraints() {
        let m = square([BoundaryTag::Free; 4]);
        let d = DofMap::from_mesh(&m, &[]).unwrap();
        assert!(d.constraints().is_empty());
        let d = DofMap::from_mesh(&m, &[Support::FixPatchBoundary { patch: 0 }]).unwrap();
        assert_eq!(d.constraints().len(), 3 * 16);
        let d = DofMap::from_mesh(&m, &[Support::FixPatch { patch: 0 }]).unwrap();
        assert_eq!(d.constraints().len(), d.len());
    }

    #[test]
    fn out_of_range_constraint_is_rejected() {
        let mut d = DofMap::new(2);
        assert!(d.constrain(6, 0.0).is_err());
        assert!(d.constrain(5, 1.0).is_ok());
        assert!(d.constrain_node(2, Vector3::zeros()).is_err());
    }
}
