use std::collections::HashMap;

use nalgebra::Vector2;

use super::{BoundarySide, Element, PointMerger, TriMesh6};
use crate::error::{PlateError, Result};
use crate::model::{PlatePatch, Point3};

/// Structured triangulation of a single patch with `subdivisions` segments
/// along every polygon side.
///
/// Convex quadrilaterals get a `subdivisions × subdivisions` grid of cells,
/// each split along one diagonal with the direction alternating in a
/// checkerboard. Other polygons are ear-clipped and every ear is refined
/// into `subdivisions²` similar triangles.
pub fn build_patch_mesh(patch: &PlatePatch, subdivisions: usize) -> Result<TriMesh6> {
    if patch.vertices.len() == 4 && is_convex(patch) {
        build_patch_grid(patch, subdivisions, subdivisions)
    } else {
        build_polygon(patch, subdivisions)
    }
}

/// Grid triangulation of a convex quadrilateral with `nu` cells along sides
/// 0 and 2 and `nv` cells along sides 1 and 3.
pub fn build_patch_grid(patch: &PlatePatch, nu: usize, nv: usize) -> Result<TriMesh6> {
    patch.validate()?;
    if nu == 0 || nv == 0 {
        return Err(PlateError::InvalidInput("subdivisions must be positive".into()));
    }
    if patch.vertices.len() != 4 || !is_convex(patch) {
        return Err(PlateError::Geometry(format!(
            "patch {}: grid meshing needs a convex quadrilateral",
            patch.id
        )));
    }
    let v = &patch.vertices;
    let mut merger = PointMerger::new(1e-9 * patch.diameter());
    let mut ids = vec![vec![0usize; nv + 1]; nu + 1];
    for (i, row) in ids.iter_mut().enumerate() {
        for (j, id) in row.iter_mut().enumerate() {
            let s = i as f64 / nu as f64;
            let t = j as f64 / nv as f64;
            let p = v[0] * ((1.0 - s) * (1.0 - t)) + v[1] * (s * (1.0 - t)) + v[2] * (s * t) + v[3] * ((1.0 - s) * t);
            *id = merger.insert(p);
        }
    }
    let mut tris = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (c00, c10, c11, c01) = (ids[i][j], ids[i + 1][j], ids[i + 1][j + 1], ids[i][j + 1]);
            if (i + j) % 2 == 0 {
                tris.push([c00, c10, c11]);
                tris.push([c00, c11, c01]);
            } else {
                tris.push([c00, c10, c01]);
                tris.push([c10, c11, c01]);
            }
        }
    }
    finalize_patch(patch, merger.into_points(), tris)
}

fn build_polygon(patch: &PlatePatch, subdivisions: usize) -> Result<TriMesh6> {
    patch.validate()?;
    if subdivisions == 0 {
        return Err(PlateError::InvalidInput("subdivisions must be positive".into()));
    }
    let ears = ear_clip(&patch.planar_coordinates())?;
    let n = subdivisions;
    let mut merger = PointMerger::new(1e-9 * patch.diameter());
    let mut tris = Vec::new();
    for [ia, ib, ic] in ears {
        let (a, b, c) = (patch.vertices[ia], patch.vertices[ib], patch.vertices[ic]);
        let mut id = HashMap::new();
        for i in 0..=n {
            for j in 0..=(n - i) {
                let p = a + (b - a) * (i as f64 / n as f64) + (c - a) * (j as f64 / n as f64);
                id.insert((i, j), merger.insert(p));
            }
        }
        for i in 0..n {
            for j in 0..(n - i) {
                tris.push([id[&(i, j)], id[&(i + 1, j)], id[&(i, j + 1)]]);
                if i + j + 1 < n {
                    tris.push([id[&(i + 1, j)], id[&(i + 1, j + 1)], id[&(i, j + 1)]]);
                }
            }
        }
    }
    finalize_patch(patch, merger.into_points(), tris)
}

/// Orients corner triangles, adds mid-side nodes and tags patch-boundary edges.
fn finalize_patch(patch: &PlatePatch, mut nodes: Vec<Point3>, tris: Vec<[usize; 3]>) -> Result<TriMesh6> {
    let n = patch.normal;
    let tol = 1e-9 * patch.diameter();
    let nv = patch.vertices.len();
    let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut elements = Vec::with_capacity(tris.len());
    for [a, mut b, mut c] in tris {
        if (nodes[b] - nodes[a]).cross(&(nodes[c] - nodes[a])).dot(&n) < 0.0 {
            std::mem::swap(&mut b, &mut c);
        }
        let corners = [a, b, c];
        let mut el_nodes = [a, b, c, 0, 0, 0];
        let mut boundary = [None; 3];
        for k in 0..3 {
            let (p, q) = (corners[k], corners[(k + 1) % 3]);
            let key = (p.min(q), p.max(q));
            let mid = *mids.entry(key).or_insert_with(|| {
                nodes.push(0.5 * (nodes[p] + nodes[q]));
                nodes.len() - 1
            });
            el_nodes[3 + k] = mid;
            boundary[k] = (0..nv)
                .find(|&s| {
                    let (s0, s1) = (patch.vertices[s], patch.vertices[(s + 1) % nv]);
                    point_segment_distance(&nodes[p], &s0, &s1) <= tol
                        && point_segment_distance(&nodes[q], &s0, &s1) <= tol
                })
                .map(|s| BoundarySide {
                    side: s,
                    tag: patch.boundary_tags[s],
                });
        }
        elements.push(Element {
            nodes: el_nodes,
            patch: patch.id,
            normal: n,
            boundary,
        });
    }
    TriMesh6::from_parts_open(nodes, elements)
}

pub(crate) fn point_segment_distance(p: &Point3, a: &Point3, b: &Point3) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn is_convex(patch: &PlatePatch) -> bool {
    let pts = patch.planar_coordinates();
    let n = pts.len();
    let mut sign = 0.0;
    for i in 0..n {
        let (a, b, c) = (pts[i], pts[(i + 1) % n], pts[(i + 2) % n]);
        let cross = (b - a).perp(&(c - b));
        if cross.abs() < 1e-14 {
            return false;
        }
        if sign == 0.0 {
            sign = cross.signum();
        } else if cross.signum() != sign {
            return false;
        }
    }
    true
}

/// Ear clipping of a simple polygon given in planar coordinates.
fn ear_clip(pts: &[Vector2<f64>]) -> Result<Vec<[usize; 3]>> {
    let area2: f64 = (0..pts.len())
        .map(|i| pts[i].perp(&pts[(i + 1) % pts.len()]))
        .sum();
    let ccw = area2 > 0.0;
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    if !ccw {
        idx.reverse();
    }
    let mut out = Vec::with_capacity(pts.len() - 2);
    while idx.len() > 3 {
        let m = idx.len();
        let ear = (0..m).find(|&i| {
            let (a, b, c) = (pts[idx[(i + m - 1) % m]], pts[idx[i]], pts[idx[(i + 1) % m]]);
            if (b - a).perp(&(c - b)) <= 1e-14 {
                return false;
            }
            idx.iter().all(|&j| {
                let p = pts[j];
                if p == a || p == b || p == c {
                    return true;
                }
                !point_in_triangle(p, a, b, c)
            })
        });
        let i = ear.ok_or_else(|| PlateError::Geometry("polygon could not be triangulated".into()))?;
        out.push([idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]]);
        idx.remove(i);
    }
    out.push([idx[0], idx[1], idx[2]]);
    Ok(out)
}

fn point_in_triangle(p: Vector2<f64>, a: Vector2<f64>, b: Vector2<f64>, c: Vector2<f64>) -> bool {
    let d1 = (b - a).perp(&(p - a));
    let d2 = (c - b).perp(&(p - b));
    let d3 = (a - c).perp(&(p - c));
    d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0
}
