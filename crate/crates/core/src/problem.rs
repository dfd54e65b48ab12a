use crate::assembly::{assemble_load, assemble_operator, CsrMatrix, DofMap, SparseSystem, Terms};
use crate::error::Result;
use crate::mesh::{mesh_structure, TriMesh6};
use crate::model::{Material, StructureModel};

/// A meshed structure with its constraints, ready to assemble and solve.
#[derive(Debug, Clone)]
pub struct Problem {
    pub model: StructureModel,
    pub mesh: TriMesh6,
    pub dofmap: DofMap,
}

impl Problem {
    pub fn new(model: StructureModel, mesh: TriMesh6) -> Result<Self> {
        model.validate()?;
        let dofmap = DofMap::from_mesh(&mesh, &model.supports)?;
        Ok(Self { model, mesh, dofmap })
    }

    /// Meshes every patch with `subdivisions` segments per side and stitches.
    pub fn from_model(model: StructureModel, subdivisions: usize) -> Result<Self> {
        let mesh = mesh_structure(&model, subdivisions)?;
        Self::new(model, mesh)
    }

    /// Same structure on another mesh (e.g. after refinement).
    pub fn with_mesh(&self, mesh: TriMesh6) -> Result<Self> {
        Self::new(self.model.clone(), mesh)
    }

    pub fn material(&self) -> &Material {
        &self.model.material
    }

    pub fn beta0(&self) -> f64 {
        self.model.penalty_beta0
    }

    pub fn operator(&self, terms: Terms) -> Result<CsrMatrix> {
        assemble_operator(&self.mesh, self.material(), self.beta0(), terms)
    }

    pub fn rhs(&self) -> Result<Vec<f64>> {
        assemble_load(&self.mesh, &self.model.loads, &self.model.line_loads)
    }

    /// Full unconstrained system `A_h U = l_h`.
    pub fn system(&self) -> Result<SparseSystem> {
        Ok(SparseSystem {
            matrix: self.operator(Terms::ALL)?,
            rhs: self.rhs()?,
        })
    }
}
