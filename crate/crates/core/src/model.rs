//! Structure description: plate patches, material, loads and supports.
//!
//! Loads follow the thickness-scaled convention of the governing equations:
//! the bending form carries `t̃² = t²/12` and the membrane form carries no
//! thickness factor, so a body force `f` here is the physical load per unit
//! area divided by `t`.

use nalgebra::{Rotation3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{PlateError, Result};

pub type Point3 = Vector3<f64>;

/// Condition attached to one side of a patch polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTag {
    Clamped,
    SimplySupported,
    Free,
    Junction,
}

/// Isotropic plane-stress material with constant thickness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub thickness: f64,
}

impl Material {
    pub fn new(youngs_modulus: f64, poisson_ratio: f64, thickness: f64) -> Result<Self> {
        if !(youngs_modulus > 0.0 && youngs_modulus.is_finite()) {
            return Err(PlateError::InvalidInput(format!(
                "Young's modulus must be positive, got {youngs_modulus}"
            )));
        }
        if !(poisson_ratio > -1.0 && poisson_ratio < 1.0) {
            return Err(PlateError::InvalidInput(format!(
                "Poisson's ratio must lie in (-1, 1), got {poisson_ratio}"
            )));
        }
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(PlateError::InvalidInput(format!(
                "thickness must be positive, got {thickness}"
            )));
        }
        Ok(Self {
            youngs_modulus,
            poisson_ratio,
            thickness,
        })
    }

    /// Shear modulus `E / (2(1+ν))`.
    pub fn mu(&self) -> f64 {
        self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))
    }

    /// Plane-stress Lamé parameter `Eν / (1-ν²)`.
    pub fn lambda(&self) -> f64 {
        self.youngs_modulus * self.poisson_ratio / (1.0 - self.poisson_ratio * self.poisson_ratio)
    }

    /// Effective bending thickness `t / √12`.
    pub fn t_tilde(&self) -> f64 {
        self.thickness / 12f64.sqrt()
    }

    /// `t̃² = t² / 12`, the factor multiplying the bending form.
    pub fn t_tilde_sq(&self) -> f64 {
        self.thickness * self.thickness / 12.0
    }

    /// Bending rigidity in the thickness-scaled convention, `E t̃² / (1-ν²)`.
    ///
    /// Equals the classical `E t³ / (12(1-ν²))` divided by `t`, matching loads
    /// given per unit thickness.
    pub fn scaled_bending_rigidity(&self) -> f64 {
        self.youngs_modulus * self.t_tilde_sq() / (1.0 - self.poisson_ratio * self.poisson_ratio)
    }

    /// Returns a copy with a different Young's modulus.
    pub fn with_youngs_modulus(self, youngs_modulus: f64) -> Self {
        Self {
            youngs_modulus,
            ..self
        }
    }
}

/// A planar polygonal plate with a unit normal and per-side boundary tags.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatePatch {
    pub id: usize,
    pub vertices: Vec<Point3>,
    pub normal: Vector3<f64>,
    /// One tag per side; side `k` runs from vertex `k` to vertex `k+1`.
    pub boundary_tags: Vec<BoundaryTag>,
}

impl PlatePatch {
    /// Builds a patch, normalizing `normal`. When `normal` is `None` it is
    /// computed from the vertex ordering (Newell's method).
    pub fn new(
        id: usize,
        vertices: Vec<Point3>,
        normal: Option<Vector3<f64>>,
        boundary_tags: Vec<BoundaryTag>,
    ) -> Result<Self> {
        let raw = match normal {
            Some(n) => n,
            None => newell_normal(&vertices),
        };
        let len = raw.norm();
        if !(len > 0.0 && len.is_finite()) {
            return Err(PlateError::Geometry(format!(
                "patch {id}: normal has zero or invalid length"
            )));
        }
        let patch = Self {
            id,
            vertices,
            normal: raw / len,
            boundary_tags,
        };
        patch.validate()?;
        Ok(patch)
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Signed area with respect to `normal`.
    pub fn signed_area(&self) -> f64 {
        0.5 * newell_normal(&self.vertices).dot(&self.normal)
    }

    /// Checks coplanarity, unit normal, tag count, non-degeneracy and simplicity.
    pub fn validate(&self) -> Result<()> {
        let id = self.id;
        let nv = self.vertices.len();
        if nv < 3 {
            return Err(PlateError::Geometry(format!(
                "patch {id}: polygon needs at least 3 vertices, got {nv}"
            )));
        }
        if self.boundary_tags.len() != nv {
            return Err(PlateError::Geometry(format!(
                "patch {id}: expected {nv} boundary tags, got {}",
                self.boundary_tags.len()
            )));
        }
        if (self.normal.norm() - 1.0).abs() > 1e-14 {
            return Err(PlateError::Geometry(format!("patch {id}: normal is not unit length")));
        }
        let diam = self.diameter();
        let origin = self.vertices[0];
        for (k, v) in self.vertices.iter().enumerate() {
            let off = (v - origin).dot(&self.normal);
            if off.abs() > 1e-12 * diam {
                return Err(PlateError::Geometry(format!(
                    "patch {id}: vertex {k} is {off:e} off the patch plane"
                )));
            }
        }
        let area = self.signed_area().abs();
        if area < 1e-12 {
            return Err(PlateError::Geometry(format!(
                "patch {id}: degenerate polygon (area {area:e})"
            )));
        }
        let pts = self.planar_coordinates();
        for i in 0..nv {
            let (a0, a1) = (pts[i], pts[(i + 1) % nv]);
            if (a1 - a0).norm() <= 1e-12 * diam {
                return Err(PlateError::Geometry(format!(
                    "patch {id}: side {i} has zero length"
                )));
            }
            for j in i + 1..nv {
                let adjacent = j == i + 1 || (i == 0 && j == nv - 1);
                if adjacent {
                    continue;
                }
                let (b0, b1) = (pts[j], pts[(j + 1) % nv]);
                if segments_intersect(a0, a1, b0, b1) {
                    return Err(PlateError::Geometry(format!(
                        "patch {id}: sides {i} and {j} intersect (polygon is not simple)"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Orthonormal in-plane axes `(e1, e2)` with `e1 × e2 = n`.
    pub fn plane_axes(&self) -> (Vector3<f64>, Vector3<f64>) {
        plane_axes(&self.normal)
    }

    /// Vertex coordinates in the patch's own in-plane frame.
    pub fn planar_coordinates(&self) -> Vec<Vector2<f64>> {
        let (e1, e2) = self.plane_axes();
        let o = self.vertices[0];
        self.vertices
            .iter()
            .map(|v| Vector2::new((v - o).dot(&e1), (v - o).dot(&e2)))
            .collect()
    }
}

/// Orthonormal tangent pair for a unit normal, right-handed with `n`.
pub fn plane_axes(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if n.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let e1 = (helper - n * helper.dot(n)).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}

fn newell_normal(vertices: &[Point3]) -> Vector3<f64> {
    let mut n = Vector3::zeros();
    for (i, a) in vertices.iter().enumerate() {
        let b = vertices[(i + 1) % vertices.len()];
        n += a.cross(&b);
    }
    n
}

fn orient(a: Vector2<f64>, b: Vector2<f64>, c: Vector2<f64>) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn segments_intersect(a0: Vector2<f64>, a1: Vector2<f64>, b0: Vector2<f64>, b1: Vector2<f64>) -> bool {
    let d1 = orient(b0, b1, a0);
    let d2 = orient(b0, b1, a1);
    let d3 = orient(a0, a1, b0);
    let d4 = orient(a0, a1, b1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Vector2<f64>, q: Vector2<f64>, r: Vector2<f64>, d: f64| {
        d == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(b0, b1, a0, d1) || on(b0, b1, a1, d2) || on(a0, a1, b0, d3) || on(a0, a1, b1, d4)
}

/// Where a body load applies.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadRegion {
    /// Every element of the patch with this id.
    Patch(usize),
    /// Every element whose centroid lies inside the axis-aligned box.
    Within { min: Point3, max: Point3 },
}

impl LoadRegion {
    pub fn contains(&self, patch: usize, centroid: &Point3) -> bool {
        match self {
            LoadRegion::Patch(id) => *id == patch,
            LoadRegion::Within { min, max } => (0..3).all(|k| centroid[k] >= min[k] && centroid[k] <= max[k]),
        }
    }
}

/// Constant body force per unit area.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyLoad {
    pub region: LoadRegion,
    pub force: Vector3<f64>,
}

/// Constant force per unit length on one side of a patch (a Neumann traction).
#[derive(Debug, Clone, PartialEq)]
pub struct LineLoad {
    pub patch: usize,
    pub side: usize,
    pub force: Vector3<f64>,
}

/// Strong displacement supports beyond those implied by boundary tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Support {
    /// Every node of the patch is fixed.
    FixPatch { patch: usize },
    /// Every node on the patch perimeter is fixed, junction sides included.
    FixPatchBoundary { patch: usize },
}

/// A plate structure ready for meshing.
#[derive(Debug, Clone)]
pub struct StructureModel {
    pub patches: Vec<PlatePatch>,
    pub material: Material,
    pub loads: Vec<BodyLoad>,
    pub line_loads: Vec<LineLoad>,
    pub supports: Vec<Support>,
    pub penalty_beta0: f64,
}

impl StructureModel {
    pub fn new(patches: Vec<PlatePatch>, material: Material) -> Self {
        Self {
            patches,
            material,
            loads: Vec::new(),
            line_loads: Vec::new(),
            supports: Vec::new(),
            penalty_beta0: 10.0,
        }
    }

    pub fn with_load(mut self, region: LoadRegion, force: Vector3<f64>) -> Self {
        self.loads.push(BodyLoad { region, force });
        self
    }

    pub fn with_line_load(mut self, patch: usize, side: usize, force: Vector3<f64>) -> Self {
        self.line_loads.push(LineLoad { patch, side, force });
        self
    }

    pub fn with_support(mut self, support: Support) -> Self {
        self.supports.push(support);
        self
    }

    pub fn with_penalty(mut self, beta0: f64) -> Self {
        self.penalty_beta0 = beta0;
        self
    }

    pub fn patch(&self, id: usize) -> Option<&PlatePatch> {
        self.patches.iter().find(|p| p.id == id)
    }

    /// Largest distance between any two patch vertices.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<&Point3> = self.patches.iter().flat_map(|p| p.vertices.iter()).collect();
        let mut d: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max((*a - *b).norm());
            }
        }
        d
    }

    /// The structure moved by `x ↦ R x + b`, with loads rotated along.
    /// Box-shaped load regions are axis-aligned and cannot follow a
    /// rotation, so they are rejected.
    pub fn transformed(&self, rotation: &Rotation3<f64>, shift: &Vector3<f64>) -> Result<Self> {
        let patches = self
            .patches
            .iter()
            .map(|p| PlatePatch {
                id: p.id,
                vertices: p.vertices.iter().map(|v| rotation * v + shift).collect(),
                normal: (rotation * p.normal).normalize(),
                boundary_tags: p.boundary_tags.clone(),
            })
            .collect();
        let loads = self
            .loads
            .iter()
            .map(|l| match l.region {
                LoadRegion::Patch(_) => Ok(BodyLoad {
                    region: l.region.clone(),
                    force: rotation * l.force,
                }),
                LoadRegion::Within { .. } => Err(PlateError::InvalidInput(
                    "box load regions cannot be rotated".into(),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        let line_loads = self
            .line_loads
            .iter()
            .map(|l| LineLoad {
                force: rotation * l.force,
                ..l.clone()
            })
            .collect();
        Ok(Self {
            patches,
            material: self.material,
            loads,
            line_loads,
            supports: self.supports.clone(),
            penalty_beta0: self.penalty_beta0,
        })
    }

    /// Checks per-patch invariants, id uniqueness, references and `β₀ > 0`.
    /// Junction pairing is verified when the structure is stitched.
    pub fn validate(&self) -> Result<()> {
        if self.patches.is_empty() {
            return Err(PlateError::InvalidInput("structure has no patches".into()));
        }
        if !(self.penalty_beta0 > 0.0 && self.penalty_beta0.is_finite()) {
            return Err(PlateError::InvalidInput(format!(
                "penalty beta0 must be positive, got {}",
                self.penalty_beta0
            )));
        }
        let mut ids: Vec<usize> = self.patches.iter().map(|p| p.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(PlateError::InvalidInput("duplicate patch ids".into()));
        }
        for p in &self.patches {
            p.validate()?;
        }
        for load in &self.loads {
            if let LoadRegion::Patch(id) = load.region {
                if self.patch(id).is_none() {
                    return Err(PlateError::InvalidInput(format!("load references unknown patch {id}")));
                }
            }
        }
        for ll in &self.line_loads {
            let p = self.patch(ll.patch).ok_or_else(|| {
                PlateError::InvalidInput(format!("line load references unknown patch {}", ll.patch))
            })?;
            if ll.side >= p.vertices.len() {
                return Err(PlateError::InvalidInput(format!(
                    "line load side {} out of range for patch {}",
                    ll.side, ll.patch
                )));
            }
        }
        for s in &self.supports {
            let (Support::FixPatch { patch } | Support::FixPatchBoundary { patch }) = *s;
            if self.patch(patch).is_none() {
                return Err(PlateError::InvalidInput(format!("support references unknown patch {patch}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Vec<Point3> {
        vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ]
    }

    #[test]
    fn lame_parameters_recompute() {
        let m = Material::new(1e9, 0.5, 1e-2).unwrap();
        assert!((m.mu() - 1e9 / 3.0).abs() < 1e-3);
        assert!((m.lambda() - 2e9 / 3.0).abs() < 1e-3);
        assert!((m.t_tilde_sq() - 1e-4 / 12.0).abs() < 1e-20);
        assert!((m.t_tilde() * m.t_tilde() - m.t_tilde_sq()).abs() < 1e-20);
    }

    #[test]
    fn material_rejects_bad_values() {
        assert!(Material::new(-1.0, 0.3, 1.0).is_err());
        assert!(Material::new(1.0, 1.0, 1.0).is_err());
        assert!(Material::new(1.0, -1.0, 1.0).is_err());
        assert!(Material::new(1.0, 0.3, 0.0).is_err());
    }

    #[test]
    fn newell_normal_follows_ordering() {
        let p = PlatePatch::new(0, unit_square(), None, vec![BoundaryTag::Free; 4]).unwrap();
        assert!((p.normal - Vector3::z()).norm() < 1e-15);
        assert!((p.signed_area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_planar_and_degenerate() {
        let mut v = unit_square();
        v[2].z = 0.1;
        assert!(PlatePatch::new(0, v, Some(Vector3::z()), vec![BoundaryTag::Free; 4]).is_err());
        let line = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(2.0, 0.0, 0.0),
        ];
        assert!(PlatePatch::new(0, line, Some(Vector3::z()), vec![BoundaryTag::Free; 3]).is_err());
    }

    #[test]
    fn rejects_self_intersecting_polygon() {
        let bowtie = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ];
        let err = PlatePatch::new(0, bowtie, Some(Vector3::z()), vec![BoundaryTag::Free; 4]);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_wrong_tag_count() {
        assert!(PlatePatch::new(0, unit_square(), None, vec![BoundaryTag::Free; 3]).is_err());
    }

    #[test]
    fn model_validation_catches_bad_references() {
        let p = PlatePatch::new(3, unit_square(), None, vec![BoundaryTag::Clamped; 4]).unwrap();
        let m = Material::new(1.0, 0.3, 1.0).unwrap();
        let model = StructureModel::new(vec![p.clone()], m).with_load(LoadRegion::Patch(7), Vector3::z());
        assert!(model.validate().is_err());
        let model = StructureModel::new(vec![p.clone()], m).with_penalty(0.0);
        assert!(model.validate().is_err());
        let model = StructureModel::new(vec![p], m).with_line_load(3, 4, Vector3::z());
        assert!(model.validate().is_err());
    }
}
