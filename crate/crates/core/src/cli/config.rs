use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::demo::{box_structure, FloorMode};
use crate::error::{PlateError, Result};
use crate::model::{BoundaryTag, LoadRegion, Material, PlatePatch, Point3, StructureModel, Support};
use crate::oracles::BenchmarkId;
use crate::solver::SolverKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Solve,
    Converge,
    Demo,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Solve => "solve",
            Mode::Converge => "converge",
            Mode::Demo => "demo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub thickness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchConfig {
    pub id: usize,
    pub vertices: Vec<[f64; 3]>,
    /// Defaults to the normal implied by the vertex order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<[f64; 3]>,
    pub tags: Vec<BoundaryTag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxRegion {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

/// A body load on one patch or on every element centred inside a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patch: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub within: Option<BoxRegion>,
    pub force: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineLoadConfig {
    pub patch: usize,
    pub side: usize,
    pub force: [f64; 3],
}

fn default_beta0() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureConfig {
    pub material: MaterialConfig,
    #[serde(default = "default_beta0")]
    pub penalty_beta0: f64,
    pub patches: Vec<PatchConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loads: Vec<LoadConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub line_loads: Vec<LineLoadConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub supports: Vec<Support>,
}

/// Segments per patch side when a solve config gives none.
pub const DEFAULT_SUBDIVISIONS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshConfig {
    /// Segments per patch side on the initial mesh. Solves default to
    /// [`DEFAULT_SUBDIVISIONS`]; convergence studies default to the
    /// benchmark's own base mesh.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subdivisions: Option<usize>,
    /// Uniform refinements in a convergence study.
    pub refinements: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self {
            subdivisions: None,
            refinements: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdaptivityConfig {
    pub enabled: bool,
    /// Dörfler bulk fraction.
    pub theta: f64,
    /// Refine-and-resolve cycles after the first solve.
    pub steps: usize,
}

impl Default for AdaptivityConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            theta: 0.5,
            steps: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// File stem; derived from the mode when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vtk: bool,
    /// Displacement scale of the deformed geometry.
    pub scale: f64,
    pub mesh_dump: bool,
    pub matrix: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            name: None,
            vtk: true,
            scale: 1.0,
            mesh_dump: false,
            matrix: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemoKind {
    Box,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemoConfig {
    pub kind: DemoKind,
    pub thickness: f64,
    #[serde(default)]
    pub floor: FloorMode,
}

/// A complete run description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub solver: SolverKind,
    /// Benchmark id for `converge`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<String>,
    #[serde(default)]
    pub mesh: MeshConfig,
    #[serde(default)]
    pub adaptivity: AdaptivityConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demo: Option<DemoConfig>,
}

fn field_err(path: &str, msg: impl std::fmt::Display) -> PlateError {
    PlateError::Config(format!("{path}: {msg}"))
}

fn vec3(a: [f64; 3]) -> Vector3<f64> {
    Vector3::new(a[0], a[1], a[2])
}

fn finite3(path: &str, a: &[f64; 3]) -> Result<()> {
    if a.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(field_err(path, "components must be finite"))
    }
}

impl RunConfig {
    /// Parses and validates TOML text. Syntax errors carry line and column.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| PlateError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PlateError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            PlateError::Config(m) => PlateError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| PlateError::Config(e.to_string()))
    }

    /// A box demo run with default mesh and outputs.
    pub fn box_demo(thickness: f64, floor: FloorMode) -> Self {
        Self {
            mode: Mode::Demo,
            solver: SolverKind::Direct,
            benchmark: None,
            mesh: MeshConfig {
                subdivisions: Some(8),
                ..MeshConfig::default()
            },
            adaptivity: AdaptivityConfig::default(),
            output: OutputConfig::default(),
            structure: None,
            demo: Some(DemoConfig {
                kind: DemoKind::Box,
                thickness,
                floor,
            }),
        }
    }

    /// File stem for outputs.
    pub fn output_name(&self) -> String {
        if let Some(n) = &self.output.name {
            return n.clone();
        }
        match self.mode {
            Mode::Solve => "solve".into(),
            Mode::Converge => self.benchmark.clone().unwrap_or_else(|| "converge".into()),
            Mode::Demo => match &self.demo {
                Some(d) => format!("box_t{:e}", d.thickness),
                None => "demo".into(),
            },
        }
    }

    /// Checks mode consistency and every cross-reference, reporting the
    /// offending field path.
    pub fn validate(&self) -> Result<()> {
        let sections = [
            ("structure", self.structure.is_some(), Mode::Solve),
            ("benchmark", self.benchmark.is_some(), Mode::Converge),
            ("demo", self.demo.is_some(), Mode::Demo),
        ];
        for (name, present, owner) in sections {
            if present && owner != self.mode {
                return Err(field_err(
                    name,
                    format!("only allowed with mode = \"{}\" (mode is \"{}\")", owner.as_str(), self.mode.as_str()),
                ));
            }
            if !present && owner == self.mode {
                return Err(field_err(name, format!("required for mode = \"{}\"", owner.as_str())));
            }
        }
        if self.mesh.subdivisions == Some(0) {
            return Err(field_err("mesh.subdivisions", "must be at least 1"));
        }
        if self.mode == Mode::Converge && self.mesh.refinements < 3 {
            return Err(field_err("mesh.refinements", "a convergence study needs at least 3"));
        }
        if self.adaptivity.enabled {
            if self.mode == Mode::Converge {
                return Err(field_err("adaptivity.enabled", "not supported for convergence studies"));
            }
            if !(self.adaptivity.theta > 0.0 && self.adaptivity.theta <= 1.0) {
                return Err(field_err("adaptivity.theta", "must lie in (0, 1]"));
            }
        }
        if !self.output.scale.is_finite() {
            return Err(field_err("output.scale", "must be finite"));
        }
        if let Some(name) = &self.output.name {
            if name.is_empty() || name.contains(['/', '\\']) {
                return Err(field_err("output.name", "must be a plain, non-empty file stem"));
            }
        }
        if let Some(b) = &self.benchmark {
            BenchmarkId::parse(b).map_err(|e| match e {
                PlateError::Config(m) => field_err("benchmark", m),
                other => other,
            })?;
        }
        if let Some(d) = &self.demo {
            if !(d.thickness > 0.0 && d.thickness.is_finite()) {
                return Err(field_err("demo.thickness", "must be positive"));
            }
        }
        if let Some(s) = &self.structure {
            s.to_model()?;
        }
        Ok(())
    }

    /// The structure to solve in `solve` and `demo` modes.
    pub fn structure_model(&self) -> Result<StructureModel> {
        match (&self.structure, &self.demo) {
            (Some(s), _) => s.to_model(),
            (None, Some(d)) => match d.kind {
                DemoKind::Box => box_structure(d.thickness, d.floor),
            },
            (None, None) => Err(field_err("structure", "no structure in this config")),
        }
    }
}

impl StructureConfig {
    /// Builds the model, checking ids and references with field paths.
    pub fn to_model(&self) -> Result<StructureModel> {
        let m = &self.material;
        let material = Material::new(m.youngs_modulus, m.poisson_ratio, m.thickness)
            .map_err(|e| field_err("structure.material", e))?;
        if !(self.penalty_beta0 > 0.0 && self.penalty_beta0.is_finite()) {
            return Err(field_err("structure.penalty_beta0", "must be positive"));
        }
        if self.patches.is_empty() {
            return Err(field_err("structure.patches", "at least one patch is required"));
        }
        let mut patches = Vec::with_capacity(self.patches.len());
        for (i, p) in self.patches.iter().enumerate() {
            let path = format!("structure.patches[{i}]");
            if self.patches[..i].iter().any(|q| q.id == p.id) {
                return Err(field_err(&format!("{path}.id"), format!("duplicate patch id {}", p.id)));
            }
            for (k, v) in p.vertices.iter().enumerate() {
                finite3(&format!("{path}.vertices[{k}]"), v)?;
            }
            if p.tags.len() != p.vertices.len() {
                return Err(field_err(
                    &format!("{path}.tags"),
                    format!("expected one tag per side ({}), got {}", p.vertices.len(), p.tags.len()),
                ));
            }
            let verts: Vec<Point3> = p.vertices.iter().copied().map(vec3).collect();
            let patch = PlatePatch::new(p.id, verts, p.normal.map(vec3), p.tags.clone())
                .map_err(|e| field_err(&path, e))?;
            patches.push(patch);
        }
        let exists = |id: usize| self.patches.iter().find(|p| p.id == id);
        let mut model = StructureModel::new(patches, material).with_penalty(self.penalty_beta0);
        for (i, l) in self.loads.iter().enumerate() {
            let path = format!("structure.loads[{i}]");
            finite3(&format!("{path}.force"), &l.force)?;
            let region = match (l.patch, &l.within) {
                (Some(id), None) => {
                    exists(id).ok_or_else(|| field_err(&format!("{path}.patch"), format!("unknown patch id {id}")))?;
                    LoadRegion::Patch(id)
                }
                (None, Some(b)) => {
                    finite3(&format!("{path}.within.min"), &b.min)?;
                    finite3(&format!("{path}.within.max"), &b.max)?;
                    LoadRegion::Within {
                        min: vec3(b.min),
                        max: vec3(b.max),
                    }
                }
                _ => return Err(field_err(&path, "give exactly one of `patch` or `within`")),
            };
            model = model.with_load(region, vec3(l.force));
        }
        for (i, l) in self.line_loads.iter().enumerate() {
            let path = format!("structure.line_loads[{i}]");
            let p = exists(l.patch)
                .ok_or_else(|| field_err(&format!("{path}.patch"), format!("unknown patch id {}", l.patch)))?;
            if l.side >= p.vertices.len() {
                return Err(field_err(
                    &format!("{path}.side"),
                    format!("patch {} has {} sides", l.patch, p.vertices.len()),
                ));
            }
            finite3(&format!("{path}.force"), &l.force)?;
            model = model.with_line_load(l.patch, l.side, vec3(l.force));
        }
        for (i, s) in self.supports.iter().enumerate() {
            let (Support::FixPatch { patch } | Support::FixPatchBoundary { patch }) = *s;
            exists(patch).ok_or_else(|| {
                field_err(&format!("structure.supports[{i}].patch"), format!("unknown patch id {patch}"))
            })?;
            model = model.with_support(*s);
        }
        model.validate()?;
        Ok(model)
    }
}
