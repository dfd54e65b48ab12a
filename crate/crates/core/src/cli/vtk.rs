use std::io::Write;
use std::path::Path;

use crate::error::{PlateError, Result};
use crate::mesh::TriMesh6;

/// VTK cell type of the six-node triangle.
pub const VTK_QUADRATIC_TRIANGLE: u8 = 22;

fn num(v: f64) -> String {
    // Avoid a distinct "-0" so files do not depend on the sign of zero.
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.12e}")
}

/// Writes a legacy ASCII unstructured grid: points displaced by
/// `scale · u`, six-node triangles, nodal displacement vectors, the normal
/// displacement against each node's dominant patch normal, and one
/// indicator value per cell.
pub fn write_vtk<W: Write>(
    mesh: &TriMesh6,
    dofs: &[f64],
    indicators: &[f64],
    scale: f64,
    mut out: W,
) -> std::io::Result<()> {
    let n = mesh.nodes.len();
    let ne = mesh.elements.len();
    assert_eq!(dofs.len(), 3 * n, "one displacement per node");
    assert_eq!(indicators.len(), ne, "one indicator per cell");
    let u = |i: usize| [dofs[3 * i], dofs[3 * i + 1], dofs[3 * i + 2]];
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "tdc-plates deformed structure")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {n} double")?;
    for (i, p) in mesh.nodes.iter().enumerate() {
        let d = u(i);
        writeln!(
            out,
            "{} {} {}",
            num(p.x + scale * d[0]),
            num(p.y + scale * d[1]),
            num(p.z + scale * d[2])
        )?;
    }
    writeln!(out, "CELLS {ne} {}", 7 * ne)?;
    for el in &mesh.elements {
        let ids: Vec<String> = el.nodes.iter().map(|v| v.to_string()).collect();
        writeln!(out, "6 {}", ids.join(" "))?;
    }
    writeln!(out, "CELL_TYPES {ne}")?;
    for _ in 0..ne {
        writeln!(out, "{VTK_QUADRATIC_TRIANGLE}")?;
    }
    writeln!(out, "POINT_DATA {n}")?;
    writeln!(out, "VECTORS displacement double")?;
    for i in 0..n {
        let d = u(i);
        writeln!(out, "{} {} {}", num(d[0]), num(d[1]), num(d[2]))?;
    }
    writeln!(out, "SCALARS normal_displacement double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for (i, nrm) in mesh.dominant_normals().iter().enumerate() {
        let d = u(i);
        writeln!(out, "{}", num(d[0] * nrm.x + d[1] * nrm.y + d[2] * nrm.z))?;
    }
    writeln!(out, "CELL_DATA {ne}")?;
    writeln!(out, "SCALARS indicator double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for v in indicators {
        writeln!(out, "{}", num(*v))?;
    }
    writeln!(out, "SCALARS patch int 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for el in &mesh.elements {
        writeln!(out, "{}", el.patch)?;
    }
    Ok(())
}

/// Writes the VTK file at `path`.
pub fn export_vtk(mesh: &TriMesh6, dofs: &[f64], indicators: &[f64], scale: f64, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)
        .map_err(|e| PlateError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let mut w = std::io::BufWriter::new(file);
    write_vtk(mesh, dofs, indicators, scale, &mut w)?;
    w.flush()?;
    Ok(())
}
