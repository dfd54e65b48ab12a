use std::collections::{HashMap, HashSet};

use super::{Element, TriMesh6};
use crate::error::{PlateError, Result};
use crate::model::Point3;

/// Red refinement of every element: each triangle splits into four similar
/// children and the mesh size halves.
pub fn refine_uniform(mesh: &TriMesh6) -> TriMesh6 {
    refine_marked(mesh, &vec![true; mesh.elements.len()])
        .expect("uniform refinement of a valid mesh cannot fail")
}

/// Dörfler bulk marking: the smallest set of elements (largest indicators
/// first, ties by index) whose indicator sum reaches `theta` of the total.
pub fn dorfler_mark(indicators: &[f64], theta: f64) -> Result<Vec<bool>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(PlateError::InvalidInput(format!("theta must lie in (0, 1], got {theta}")));
    }
    if indicators.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(PlateError::InvalidInput("indicators must be finite and nonnegative".into()));
    }
    let total: f64 = indicators.iter().sum();
    let mut marked = vec![false; indicators.len()];
    if total == 0.0 {
        return Ok(marked);
    }
    let mut order: Vec<usize> = (0..indicators.len()).collect();
    order.sort_by(|&a, &b| indicators[b].total_cmp(&indicators[a]).then(a.cmp(&b)));
    let target = theta * total;
    let mut acc = 0.0;
    for i in order {
        if acc >= target * (1.0 - 1e-12) {
            break;
        }
        marked[i] = true;
        acc += indicators[i];
    }
    Ok(marked)
}

/// Marks by [`dorfler_mark`] and refines with red-green closure.
pub fn mark_and_refine(mesh: &TriMesh6, indicators: &[f64], theta: f64) -> Result<TriMesh6> {
    if mesh.elements.is_empty() {
        return Err(PlateError::InvalidInput("cannot refine an empty mesh".into()));
    }
    if indicators.len() != mesh.elements.len() {
        return Err(PlateError::InvalidInput(format!(
            "expected {} indicators, got {}",
            mesh.elements.len(),
            indicators.len()
        )));
    }
    let marked = dorfler_mark(indicators, theta)?;
    refine_marked(mesh, &marked)
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Refines marked elements red; the closure turns elements with two split
/// edges red and bisects elements with one split edge (green), so the
/// result has no hanging nodes.
pub fn refine_marked(mesh: &TriMesh6, marked: &[bool]) -> Result<TriMesh6> {
    if mesh.elements.is_empty() {
        return Err(PlateError::InvalidInput("cannot refine an empty mesh".into()));
    }
    if marked.len() != mesh.elements.len() {
        return Err(PlateError::InvalidInput("marker length does not match element count".into()));
    }
    let mut split: HashSet<(usize, usize)> = HashSet::new();
    for (el, _) in mesh.elements.iter().zip(marked).filter(|(_, m)| **m) {
        for k in 0..3 {
            let (a, b) = el.edge_corners(k);
            split.insert(key(a, b));
        }
    }
    loop {
        let mut changed = false;
        for el in &mesh.elements {
            let flags: Vec<bool> = (0..3)
                .map(|k| {
                    let (a, b) = el.edge_corners(k);
                    split.contains(&key(a, b))
                })
                .collect();
            if flags.iter().filter(|f| **f).count() == 2 {
                let k = flags.iter().position(|f| !*f).unwrap();
                let (a, b) = el.edge_corners(k);
                split.insert(key(a, b));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut nodes: Vec<Point3> = mesh.nodes.clone();
    let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
    for el in &mesh.elements {
        for k in 0..3 {
            let (a, b) = el.edge_corners(k);
            if !split.contains(&key(a, b)) {
                mids.insert(key(a, b), el.nodes[3 + k]);
            }
        }
    }
    let mut mid = |a: usize, b: usize, nodes: &mut Vec<Point3>| -> usize {
        *mids.entry(key(a, b)).or_insert_with(|| {
            nodes.push(0.5 * (nodes[a] + nodes[b]));
            nodes.len() - 1
        })
    };
    let mut child = |corners: [usize; 3], boundary, parent: &Element, nodes: &mut Vec<Point3>| Element {
        nodes: [
            corners[0],
            corners[1],
            corners[2],
            mid(corners[0], corners[1], nodes),
            mid(corners[1], corners[2], nodes),
            mid(corners[2], corners[0], nodes),
        ],
        patch: parent.patch,
        normal: parent.normal,
        boundary,
    };

    let mut elements = Vec::with_capacity(mesh.elements.len() * 4);
    for el in &mesh.elements {
        let flags: [bool; 3] = [0, 1, 2].map(|k| {
            let (a, b) = el.edge_corners(k);
            split.contains(&key(a, b))
        });
        let nsplit = flags.iter().filter(|f| **f).count();
        let [c0, c1, c2, m01, m12, m20] = el.nodes;
        let b = el.boundary;
        match nsplit {
            0 => elements.push(el.clone()),
            3 => {
                elements.push(child([c0, m01, m20], [b[0], None, b[2]], el, &mut nodes));
                elements.push(child([m01, c1, m12], [b[0], b[1], None], el, &mut nodes));
                elements.push(child([m20, m12, c2], [None, b[1], b[2]], el, &mut nodes));
                elements.push(child([m01, m12, m20], [None, None, None], el, &mut nodes));
            }
            1 => {
                let k = flags.iter().position(|f| *f).unwrap();
                let ck = el.nodes[k];
                let ck1 = el.nodes[(k + 1) % 3];
                let o = el.nodes[(k + 2) % 3];
                let m = el.nodes[3 + k];
                elements.push(child([ck, m, o], [b[k], None, b[(k + 2) % 3]], el, &mut nodes));
                elements.push(child([m, ck1, o], [b[k], b[(k + 1) % 3], None], el, &mut nodes));
            }
            _ => unreachable!("closure leaves no element with exactly two split edges"),
        }
    }
    TriMesh6::from_parts_open(nodes, elements)
}
