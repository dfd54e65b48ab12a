use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{BoundaryTag, LoadRegion, Material, PlatePatch, Point3, StructureModel, Support};

/// Young's modulus of the box demo.
pub const BOX_YOUNGS_MODULUS: f64 = 1e9;
/// Poisson ratio of the box demo.
pub const BOX_POISSON_RATIO: f64 = 0.5;
/// Penalty parameter of the box demo.
pub const BOX_BETA0: f64 = 10.0;
/// Load on the `x = 0` wall before the `t²` factor.
pub const BOX_LOAD: f64 = 4e7;

/// Patch ids of the box faces.
pub const FLOOR: usize = 0;
pub const TOP: usize = 1;
pub const WALL_X0: usize = 2;
pub const WALL_Y0: usize = 3;
pub const WALL_Y1: usize = 4;

/// How the floor is held.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FloorMode {
    /// Floor perimeter nodes are fixed and its open side is clamped; the
    /// floor plate may bend.
    #[default]
    ClampBoundary,
    /// Every floor node is fixed.
    FixFace,
}

impl FloorMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FloorMode::FixFace => "fix_face",
            FloorMode::ClampBoundary => "clamp_boundary",
        }
    }
}

fn face(id: usize, corners: [[f64; 3]; 4], normal: [f64; 3], tags: [BoundaryTag; 4]) -> Result<PlatePatch> {
    let vertices = corners.iter().map(|c| Point3::new(c[0], c[1], c[2])).collect();
    PlatePatch::new(id, vertices, Some(Vector3::from(normal)), tags.to_vec())
}

/// The surface of `[0,1]³` without the `x = 1` wall, outward normals,
/// loaded by `t²(4·10⁷, 0, 0)` per unit area on the `x = 0` wall.
pub fn box_structure(thickness: f64, floor: FloorMode) -> Result<StructureModel> {
    use BoundaryTag::{Clamped as C, Free as F, Junction as J};
    let open_side = match floor {
        FloorMode::ClampBoundary => C,
        FloorMode::FixFace => F,
    };
    let patches = vec![
        face(FLOOR, [[0., 0., 0.], [0., 1., 0.], [1., 1., 0.], [1., 0., 0.]], [0., 0., -1.], [J, J, open_side, J])?,
        face(TOP, [[0., 0., 1.], [1., 0., 1.], [1., 1., 1.], [0., 1., 1.]], [0., 0., 1.], [J, F, J, J])?,
        face(WALL_X0, [[0., 0., 0.], [0., 0., 1.], [0., 1., 1.], [0., 1., 0.]], [-1., 0., 0.], [J; 4])?,
        face(WALL_Y0, [[0., 0., 0.], [1., 0., 0.], [1., 0., 1.], [0., 0., 1.]], [0., -1., 0.], [J, F, J, J])?,
        face(WALL_Y1, [[0., 1., 0.], [0., 1., 1.], [1., 1., 1.], [1., 1., 0.]], [0., 1., 0.], [J, J, F, J])?,
    ];
    let material = Material::new(BOX_YOUNGS_MODULUS, BOX_POISSON_RATIO, thickness)?;
    let support = match floor {
        FloorMode::FixFace => Support::FixPatch { patch: FLOOR },
        FloorMode::ClampBoundary => Support::FixPatchBoundary { patch: FLOOR },
    };
    let model = StructureModel::new(patches, material)
        .with_penalty(BOX_BETA0)
        .with_load(LoadRegion::Patch(WALL_X0), Vector3::new(thickness * thickness * BOX_LOAD, 0.0, 0.0))
        .with_support(support);
    model.validate()?;
    Ok(model)
}
