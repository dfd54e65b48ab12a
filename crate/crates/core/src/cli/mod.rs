//! Command-line front end: run configs, reports and file exports.

mod config;
pub mod demo;
mod report;
mod vtk;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub use config::{
    AdaptivityConfig, BoxRegion, DemoConfig, DemoKind, LineLoadConfig, LoadConfig, MaterialConfig, MeshConfig, Mode,
    OutputConfig, PatchConfig, RunConfig, StructureConfig, DEFAULT_SUBDIVISIONS,
};
pub use demo::{box_structure, FloorMode};
pub use report::{parse_values, Report, Value};
pub use vtk::{export_vtk, write_vtk, VTK_QUADRATIC_TRIANGLE};

use crate::assembly::Terms;
use crate::error::{PlateError, Result};
use crate::mesh::{mark_and_refine, mesh_structure, write_mesh_dump, EdgeKind};
use crate::oracles::{convergence_study, BenchmarkId, BenchmarkSetup};
use crate::problem::Problem;
use crate::solver::{energies, residual_indicators, solve, trace_diagnostics, Solution};

/// Report and files produced by a run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    pub files: Vec<PathBuf>,
}

/// Dispatches on the config mode.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    match config.mode {
        config::Mode::Solve | config::Mode::Demo => run_solve(config),
        config::Mode::Converge => run_converge(config),
    }
}

fn io_at(path: &Path, e: std::io::Error) -> PlateError {
    PlateError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| io_at(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| io_at(path, e))
}

fn prepare_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_at(dir, e))
}

fn norm_l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Mesh, solver, energy and trace lines for a solved problem.
fn describe_solution(r: &mut Report, sol: &Solution<'_>, eta: &[f64]) {
    let mesh = &sol.problem.mesh;
    r.int("nodes", mesh.nodes.len());
    r.int("elements", mesh.elements.len());
    r.int("edges", mesh.edges.len());
    r.int(
        "junction_edges",
        mesh.edges.iter().filter(|e| e.kind == EdgeKind::InteriorJunction).count(),
    );
    r.int("dofs", 3 * mesh.nodes.len());
    r.int("free_dofs", sol.stats.dim);
    r.real("mesh_size", mesh.mesh_size_h);
    r.text("solver", format!("{:?}", sol.stats.method).to_lowercase());
    r.int("factor_entries", sol.stats.factor_entries);
    r.int("cg_iterations", sol.stats.iterations);
    r.real("relative_residual", sol.stats.relative_residual);

    let e = energies(sol);
    r.real("energy_membrane", e.membrane);
    r.real("energy_bending_volume", e.bending_volume);
    r.real("energy_consistency", e.consistency);
    r.real("energy_penalty", e.penalty);
    r.real("energy_bending", e.bending());
    r.real("energy_total", e.total());
    r.real("membrane_to_bending", e.membrane_to_bending());
    let a = sol.operator_energy();
    let l = sol.load_work();
    r.real("operator_energy", a);
    r.real("load_work", l);
    r.real(
        "energy_identity_error",
        if l != 0.0 { ((a - l) / l).abs() } else { (a - l).abs() },
    );

    let u = sol.displacements();
    let normals = mesh.dominant_normals();
    r.real("max_displacement", u.iter().map(|v| v.norm()).fold(0.0, f64::max));
    r.real(
        "max_normal_displacement",
        u.iter().zip(&normals).map(|(v, n)| v.dot(n).abs()).fold(0.0, f64::max),
    );

    let t = trace_diagnostics(sol);
    r.real("junction_moment_jump", t.junction_moment_jump);
    r.real("junction_force_jump", t.junction_force_jump);
    r.real("interior_moment_jump", t.interior_moment_jump);
    r.real(
        "max_corner_force_sum",
        t.corner_sums.iter().map(|(_, f)| f.norm()).fold(0.0, f64::max),
    );
    r.real("estimator", norm_l2(eta));
}

/// Solves the config's structure (or demo), optionally adapting the mesh,
/// and writes the report, deformed geometry and requested dumps.
pub fn run_solve(config: &RunConfig) -> Result<RunOutput> {
    let model = config.structure_model()?;
    let dir = &config.output.dir;
    prepare_dir(dir)?;
    let name = config.output_name();
    let mut report = Report::new(format!("tdc-plates {} report: {name}", config.mode.as_str()));
    if let Some(d) = &config.demo {
        report.text("demo", "box");
        report.real("thickness", d.thickness);
        report.text("floor", d.floor.as_str());
    }
    let subdivisions = config.mesh.subdivisions.unwrap_or(DEFAULT_SUBDIVISIONS);
    report.int("subdivisions", subdivisions);
    let steps = if config.adaptivity.enabled { config.adaptivity.steps } else { 0 };
    let mut mesh = mesh_structure(&model, subdivisions)?;
    for step in 0..=steps {
        let problem = Problem::new(model.clone(), mesh)?;
        let sol = solve(&problem, config.solver)?;
        let eta = residual_indicators(&sol);
        if config.adaptivity.enabled {
            report.int(format!("adapt_{step}_elements"), problem.mesh.elements.len());
            report.real(format!("adapt_{step}_estimator"), norm_l2(&eta));
        }
        if step < steps {
            mesh = mark_and_refine(&problem.mesh, &eta, config.adaptivity.theta)?;
            continue;
        }
        describe_solution(&mut report, &sol, &eta);
        let mut files = Vec::new();
        if config.output.vtk {
            let path = dir.join(format!("{name}.vtk"));
            export_vtk(&problem.mesh, &sol.dofs, &eta, config.output.scale, &path)?;
            files.push(path);
        }
        if config.output.mesh_dump {
            let path = dir.join(format!("{name}.mesh"));
            write_file(&path, |w| write_mesh_dump(&problem.mesh, w))?;
            files.push(path);
        }
        if config.output.matrix {
            let path = dir.join(format!("{name}.matrix"));
            write_file(&path, |w| sol.system.matrix.write_coordinate(w))?;
            files.push(path);
        }
        let path = dir.join(format!("{name}.report.txt"));
        let text = report.to_text();
        write_file(&path, |w| w.write_all(text.as_bytes()))?;
        files.push(path);
        return Ok(RunOutput { report, files });
    }
    unreachable!("the loop returns on its last step")
}

/// Runs a benchmark convergence study and writes its table and report.
pub fn run_converge(config: &RunConfig) -> Result<RunOutput> {
    let name = config
        .benchmark
        .as_deref()
        .ok_or_else(|| PlateError::Config("benchmark: required for mode = \"converge\"".into()))?;
    let id = BenchmarkId::parse(name)?;
    let mut setup = BenchmarkSetup::new(id);
    if let Some(n) = config.mesh.subdivisions {
        setup.base_subdivisions = n;
    }
    let refinements = config.mesh.refinements;
    let result = convergence_study(&setup, refinements, config.solver)?;
    let dir = &config.output.dir;
    prepare_dir(dir)?;
    let stem = config.output_name();

    let mut report = Report::new(format!("tdc-plates converge report: {stem}"));
    report.text("benchmark", id.as_str());
    report.text("quantity", id.quantity());
    report.int("base_subdivisions", setup.base_subdivisions);
    report.int("refinements", refinements);
    report.real("reference", result.reference);
    for (k, ((h, v), e)) in result.h.iter().zip(&result.values).zip(&result.errors).enumerate() {
        report.real(format!("level_{k}_h"), *h);
        report.real(format!("level_{k}_value"), *v);
        report.real(format!("level_{k}_error"), *e);
    }
    report.real("computed", result.computed());
    report.real("final_error", result.relative_error());
    report.real("observed_order", result.observed_order.unwrap_or(f64::NAN));
    report.text("monotone", result.monotone.to_string());
    report.text("warnings", result.warnings.join("; "));

    let table_path = dir.join(format!("{stem}.table"));
    let table = result.to_table(&format!(
        "tdc-plates converge {} (base {}, {} refinements, {:?} solver)",
        id.as_str(),
        setup.base_subdivisions,
        refinements,
        config.solver
    ));
    write_file(&table_path, |w| w.write_all(table.as_bytes()))?;
    let report_path = dir.join(format!("{stem}.report.txt"));
    let text = report.to_text();
    write_file(&report_path, |w| w.write_all(text.as_bytes()))?;
    Ok(RunOutput {
        report,
        files: vec![table_path, report_path],
    })
}

/// Artifacts requested from `export`; each is written only when set.
#[derive(Debug, Clone, Default)]
pub struct ExportOptions {
    pub vtk: Option<PathBuf>,
    pub scale: Option<f64>,
    pub mesh_dump: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
}

/// Meshes the config's structure and writes the requested files. Only
/// the deformed geometry needs a solve.
pub fn run_export(config: &RunConfig, opts: &ExportOptions) -> Result<Vec<PathBuf>> {
    config.validate()?;
    if config.mode == config::Mode::Converge {
        return Err(PlateError::Config(
            "mode: export needs a structure (mode = \"solve\" or \"demo\")".into(),
        ));
    }
    if opts.vtk.is_none() && opts.mesh_dump.is_none() && opts.matrix.is_none() {
        return Err(PlateError::InvalidInput(
            "nothing to export; give --vtk, --mesh-dump or --matrix".into(),
        ));
    }
    let scale = opts.scale.unwrap_or(config.output.scale);
    if !scale.is_finite() {
        return Err(PlateError::InvalidInput("scale must be finite".into()));
    }
    let model = config.structure_model()?;
    let subdivisions = config.mesh.subdivisions.unwrap_or(DEFAULT_SUBDIVISIONS);
    let problem = Problem::from_model(model, subdivisions)?;
    let mut files = Vec::new();
    if let Some(path) = &opts.mesh_dump {
        write_file(path, |w| write_mesh_dump(&problem.mesh, w))?;
        files.push(path.clone());
    }
    if let Some(path) = &opts.matrix {
        let a = problem.operator(Terms::ALL)?;
        write_file(path, |w| a.write_coordinate(w))?;
        files.push(path.clone());
    }
    if let Some(path) = &opts.vtk {
        let sol = solve(&problem, config.solver)?;
        let eta = residual_indicators(&sol);
        export_vtk(&problem.mesh, &sol.dofs, &eta, scale, path)?;
        files.push(path.clone());
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_load_gives_zero_field() {
        let dir = tempfile::tempdir().unwrap();
        let text = format!(
            r#"
mode = "solve"
[mesh]
subdivisions = 2
[output]
dir = "{}"
name = "still"
[structure.material]
youngs_modulus = 1.0
poisson_ratio = 0.3
thickness = 0.1
[[structure.patches]]
id = 0
vertices = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]
tags = ["clamped", "free", "free", "free"]
"#,
            dir.path().display()
        );
        let cfg = RunConfig::from_toml_str(&text).unwrap();
        let out = run(&cfg).unwrap();
        assert_eq!(out.report.real_value("max_displacement"), Some(0.0));
        let vtk = std::fs::read_to_string(dir.path().join("still.vtk")).unwrap();
        let disp = vtk.split("VECTORS displacement double\n").nth(1).unwrap();
        let first = disp.lines().next().unwrap();
        assert_eq!(first, "0.000000000000e0 0.000000000000e0 0.000000000000e0");
    }
}
