//! Piecewise-planar six-node triangulations of plate structures.
//!
//! Elements store corners first, then the mid-sides of edges 0-1, 1-2, 2-0.
//! Corners are ordered counter-clockwise about the element normal. Local
//! edge `k` runs from corner `k` to corner `(k+1) % 3` and carries mid-side
//! node `3 + k`.

mod build;
mod dump;
mod refine;
mod stitch;

use std::collections::BTreeMap;

use nalgebra::Vector3;

pub use build::{build_patch_grid, build_patch_mesh};
pub use dump::write_mesh_dump;
pub use refine::{dorfler_mark, mark_and_refine, refine_marked, refine_uniform};
pub use stitch::{mesh_structure, stitch_structure};

use crate::error::{PlateError, Result};
use crate::model::{BoundaryTag, Point3};
use crate::tdc::{element_frame, ElementFrame};

/// The polygon side an element edge lies on, with its tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundarySide {
    pub side: usize,
    pub tag: BoundaryTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub nodes: [usize; 6],
    pub patch: usize,
    pub normal: Vector3<f64>,
    /// Per local edge: the patch side it lies on, if any.
    pub boundary: [Option<BoundarySide>; 3],
}

impl Element {
    pub fn corners(&self) -> [usize; 3] {
        [self.nodes[0], self.nodes[1], self.nodes[2]]
    }

    /// Corner node ids of local edge `k`.
    pub fn edge_corners(&self, k: usize) -> (usize, usize) {
        (self.nodes[k], self.nodes[(k + 1) % 3])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    InteriorSamePlane,
    InteriorJunction,
    DirichletClamped,
    DirichletSimplySupported,
    Free,
}

impl EdgeKind {
    pub fn is_interior(self) -> bool {
        matches!(self, EdgeKind::InteriorSamePlane | EdgeKind::InteriorJunction)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::InteriorSamePlane => "interior_same_plane",
            EdgeKind::InteriorJunction => "interior_junction",
            EdgeKind::DirichletClamped => "dirichlet_clamped",
            EdgeKind::DirichletSimplySupported => "dirichlet_ss",
            EdgeKind::Free => "free",
        }
    }
}

/// One element incident to an edge, with its outward unit conormal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSide {
    pub element: usize,
    pub local_edge: usize,
    pub conormal: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    /// Endpoints (ascending) and mid-side node.
    pub nodes: [usize; 3],
    pub kind: EdgeKind,
    pub sides: Vec<EdgeSide>,
    pub length: f64,
    /// Patch side for one-sided edges.
    pub boundary: Option<(usize, BoundarySide)>,
}

/// A conforming quadratic triangulation of a plate structure.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh6 {
    pub nodes: Vec<Point3>,
    pub elements: Vec<Element>,
    pub edges: Vec<EdgeRecord>,
    /// Largest element diameter.
    pub mesh_size_h: f64,
}

/// Tolerance for calling two conormals opposite.
const SAME_PLANE_TOL: f64 = 1e-10;

impl TriMesh6 {
    /// Assembles a mesh from nodes and elements, classifying all edges.
    pub fn from_parts(nodes: Vec<Point3>, elements: Vec<Element>) -> Result<Self> {
        Self::assemble(nodes, elements, true)
    }

    /// Like [`TriMesh6::from_parts`], but a junction side without a partner
    /// is kept as a free edge. Used for single patches before stitching.
    pub fn from_parts_open(nodes: Vec<Point3>, elements: Vec<Element>) -> Result<Self> {
        Self::assemble(nodes, elements, false)
    }

    fn assemble(nodes: Vec<Point3>, elements: Vec<Element>, strict: bool) -> Result<Self> {
        let edges = classify_edges(&nodes, &elements, strict)?;
        let mesh_size_h = elements
            .iter()
            .map(|e| element_diameter(&nodes, e))
            .fold(0.0, f64::max);
        Ok(Self {
            nodes,
            elements,
            edges,
            mesh_size_h,
        })
    }

    pub fn element_corners(&self, e: usize) -> [Point3; 3] {
        self.elements[e].corners().map(|i| self.nodes[i])
    }

    pub fn frame(&self, e: usize) -> ElementFrame {
        element_frame(self.element_corners(e), self.elements[e].normal)
            .expect("mesh elements are validated on construction")
    }

    pub fn centroid(&self, e: usize) -> Point3 {
        let c = self.element_corners(e);
        (c[0] + c[1] + c[2]) / 3.0
    }

    pub fn element_diameter(&self, e: usize) -> f64 {
        element_diameter(&self.nodes, &self.elements[e])
    }

    pub fn element_area(&self, e: usize) -> f64 {
        let c = self.element_corners(e);
        0.5 * (c[1] - c[0]).cross(&(c[2] - c[0])).norm()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.elements.len()).map(|e| self.element_area(e)).sum()
    }

    /// Ids of nodes lying on edges of the given kinds.
    pub fn nodes_on_edges(&self, kinds: &[EdgeKind]) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .edges
            .iter()
            .filter(|e| kinds.contains(&e.kind))
            .flat_map(|e| e.nodes)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Per-node normal of the lowest-id patch touching the node.
    pub fn dominant_normals(&self) -> Vec<Vector3<f64>> {
        let mut best: Vec<Option<(usize, Vector3<f64>)>> = vec![None; self.nodes.len()];
        for el in &self.elements {
            for &n in &el.nodes {
                match best[n] {
                    Some((p, _)) if p <= el.patch => {}
                    _ => best[n] = Some((el.patch, el.normal)),
                }
            }
        }
        best.into_iter().map(|b| b.map(|(_, n)| n).unwrap_or_else(Vector3::zeros)).collect()
    }
}

fn element_diameter(nodes: &[Point3], el: &Element) -> f64 {
    let c = el.corners().map(|i| nodes[i]);
    (c[1] - c[0]).norm().max((c[2] - c[1]).norm()).max((c[0] - c[2]).norm())
}

/// Outward conormal of local edge `k` of an element, using `tangent` (the
/// unit edge direction) so that both sides of a flat edge get exactly
/// opposite vectors.
fn outward_conormal(nodes: &[Point3], el: &Element, k: usize, tangent: &Vector3<f64>) -> Vector3<f64> {
    let nu = tangent.cross(&el.normal).normalize();
    let c = el.corners().map(|i| nodes[i]);
    let centroid = (c[0] + c[1] + c[2]) / 3.0;
    let mid = 0.5 * (c[k] + c[(k + 1) % 3]);
    if nu.dot(&(mid - centroid)) > 0.0 {
        nu
    } else {
        -nu
    }
}

fn classify_edges(nodes: &[Point3], elements: &[Element], strict: bool) -> Result<Vec<EdgeRecord>> {
    let mut incidence: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for (e, el) in elements.iter().enumerate() {
        let frame = element_frame(el.corners().map(|i| nodes[i]), el.normal)?;
        if frame.det() <= 0.0 {
            return Err(PlateError::Topology(format!(
                "element {e} is not counter-clockwise about its normal"
            )));
        }
        for k in 0..3 {
            let (a, b) = el.edge_corners(k);
            incidence.entry((a.min(b), a.max(b))).or_default().push((e, k));
        }
    }
    let mut edges = Vec::with_capacity(incidence.len());
    for ((a, b), sides) in incidence {
        let (e0, k0) = sides[0];
        let mid = elements[e0].nodes[3 + k0];
        for &(e, k) in &sides[1..] {
            if elements[e].nodes[3 + k] != mid {
                return Err(PlateError::Topology(format!(
                    "edge ({a}, {b}) has inconsistent mid-side nodes"
                )));
            }
        }
        let tangent = (nodes[b] - nodes[a]).normalize();
        let length = (nodes[b] - nodes[a]).norm();
        let edge_sides: Vec<EdgeSide> = sides
            .iter()
            .map(|&(e, k)| EdgeSide {
                element: e,
                local_edge: k,
                conormal: outward_conormal(nodes, &elements[e], k, &tangent),
            })
            .collect();
        let (kind, boundary) = match edge_sides.len() {
            1 => {
                let s = &edge_sides[0];
                let bs = elements[s.element].boundary[s.local_edge].ok_or_else(|| {
                    PlateError::Topology(format!("edge ({a}, {b}) has one side but lies inside its patch"))
                })?;
                let kind = match bs.tag {
                    BoundaryTag::Clamped => EdgeKind::DirichletClamped,
                    BoundaryTag::SimplySupported => EdgeKind::DirichletSimplySupported,
                    BoundaryTag::Free => EdgeKind::Free,
                    BoundaryTag::Junction if !strict => EdgeKind::Free,
                    BoundaryTag::Junction => {
                        return Err(PlateError::Topology(format!(
                            "patch {} side {} is tagged junction but edge ({a}, {b}) has no partner \
                             (non-conforming or missing neighbour)",
                            elements[s.element].patch, bs.side
                        )))
                    }
                };
                (kind, Some((elements[s.element].patch, bs)))
            }
            2 => {
                let (s0, s1) = (&edge_sides[0], &edge_sides[1]);
                let (el0, el1) = (&elements[s0.element], &elements[s1.element]);
                for (el, s) in [(el0, s0), (el1, s1)] {
                    if let Some(bs) = el.boundary[s.local_edge] {
                        if bs.tag != BoundaryTag::Junction {
                            return Err(PlateError::Topology(format!(
                                "patch {} side {} is tagged {:?} but is shared with another patch",
                                el.patch, bs.side, bs.tag
                            )));
                        }
                    }
                }
                let orient0 = el0.normal.cross(&s0.conormal);
                let orient1 = el1.normal.cross(&s1.conormal);
                if orient0.dot(&orient1) >= 0.0 {
                    return Err(PlateError::Topology(format!(
                        "inconsistent normal orientation across edge ({a}, {b}) between patches {} and {}",
                        el0.patch, el1.patch
                    )));
                }
                let kind = if (s0.conormal + s1.conormal).norm() <= SAME_PLANE_TOL {
                    EdgeKind::InteriorSamePlane
                } else {
                    EdgeKind::InteriorJunction
                };
                (kind, None)
            }
            n => {
                return Err(PlateError::Topology(format!(
                    "edge ({a}, {b}) is shared by {n} elements; at most two plates may meet on a segment"
                )))
            }
        };
        edges.push(EdgeRecord {
            nodes: [a, b, mid],
            kind,
            sides: edge_sides,
            length,
            boundary,
        });
    }
    Ok(edges)
}

/// Merges points closer than a tolerance, using a uniform hash grid.
pub(crate) struct PointMerger {
    tol: f64,
    cell: f64,
    points: Vec<Point3>,
    grid: std::collections::HashMap<(i64, i64, i64), Vec<usize>>,
}

impl PointMerger {
    pub(crate) fn new(tol: f64) -> Self {
        Self {
            tol,
            cell: 4.0 * tol,
            points: Vec::new(),
            grid: std::collections::HashMap::new(),
        }
    }

    fn key(&self, p: &Point3) -> (i64, i64, i64) {
        (
            (p.x / self.cell).floor() as i64,
            (p.y / self.cell).floor() as i64,
            (p.z / self.cell).floor() as i64,
        )
    }

    pub(crate) fn insert(&mut self, p: Point3) -> usize {
        let (i, j, k) = self.key(&p);
        for di in -1..=1 {
            for dj in -1..=1 {
                for dk in -1..=1 {
                    if let Some(ids) = self.grid.get(&(i + di, j + dj, k + dk)) {
                        for &id in ids {
                            if (self.points[id] - p).norm() <= self.tol {
                                return id;
                            }
                        }
                    }
                }
            }
        }
        let id = self.points.len();
        self.points.push(p);
        self.grid.entry((i, j, k)).or_default().push(id);
        id
    }

    pub(crate) fn into_points(self) -> Vec<Point3> {
        self.points
    }
}
