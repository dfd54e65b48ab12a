use std::collections::HashMap;

use super::{build_patch_mesh, Element, PointMerger, TriMesh6};
use crate::error::{PlateError, Result};
use crate::model::StructureModel;

/// Merges per-patch meshes into one conforming mesh.
///
/// Nodes closer than `1e-9 · diameter` are identified, so shared junction
/// segments become single sets of nodes and the displacement space is
/// continuous across plates. Edge classification then checks that every
/// junction side found a partner and that no segment is shared by more than
/// two plates.
pub fn stitch_structure(model: &StructureModel, meshes: &[TriMesh6]) -> Result<TriMesh6> {
    model.validate()?;
    if meshes.is_empty() {
        return Err(PlateError::InvalidInput("no patch meshes to stitch".into()));
    }
    for m in meshes {
        if let Some(el) = m.elements.first() {
            if model.patch(el.patch).is_none() {
                return Err(PlateError::InvalidInput(format!(
                    "mesh refers to patch {} which is not part of the structure",
                    el.patch
                )));
            }
        }
    }
    let tol = 1e-9 * model.diameter();
    let mut merger = PointMerger::new(tol);
    let mut elements = Vec::new();
    for mesh in meshes {
        let map: Vec<usize> = mesh.nodes.iter().map(|p| merger.insert(*p)).collect();
        for el in &mesh.elements {
            elements.push(Element {
                nodes: el.nodes.map(|i| map[i]),
                ..el.clone()
            });
        }
    }
    let nodes = merger.into_points();
    // Every node must still be used by its elements with distinct ids.
    for (e, el) in elements.iter().enumerate() {
        let mut ids = el.nodes;
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(PlateError::Topology(format!(
                "element {e} collapsed while merging nodes; patches overlap or are too small"
            )));
        }
    }
    let mut seen: HashMap<[usize; 3], usize> = HashMap::new();
    for (e, el) in elements.iter().enumerate() {
        let mut key = el.corners();
        key.sort_unstable();
        if let Some(prev) = seen.insert(key, e) {
            return Err(PlateError::Topology(format!(
                "elements {prev} and {e} coincide; patches overlap"
            )));
        }
    }
    TriMesh6::from_parts(nodes, elements)
}

/// Meshes every patch with the same subdivision count and stitches them.
pub fn mesh_structure(model: &StructureModel, subdivisions: usize) -> Result<TriMesh6> {
    let meshes = model
        .patches
        .iter()
        .map(|p| build_patch_mesh(p, subdivisions))
        .collect::<Result<Vec<_>>>()?;
    stitch_structure(model, &meshes)
}
