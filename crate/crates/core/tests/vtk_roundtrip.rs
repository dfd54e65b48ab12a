//! Re-reads the deformed-geometry export of the box demo and checks it
//! against the solution it was written from.

use std::collections::HashMap;

use tdc_plates::cli::{box_structure, run, FloorMode, RunConfig, VTK_QUADRATIC_TRIANGLE};
use tdc_plates::problem::Problem;
use tdc_plates::solver::{solve, SolverKind};

/// Sections of a legacy ASCII unstructured grid, keyed by their header
/// line, each with the whitespace-separated tokens that follow it.
struct LegacyVtk {
    header: Vec<String>,
    sections: HashMap<String, Vec<String>>,
}

const KEYWORDS: [&str; 8] = [
    "POINTS",
    "CELLS",
    "CELL_TYPES",
    "POINT_DATA",
    "CELL_DATA",
    "VECTORS",
    "SCALARS",
    "LOOKUP_TABLE",
];

fn parse(text: &str) -> LegacyVtk {
    let mut lines = text.lines();
    let header = lines.by_ref().take(4).map(String::from).collect();
    let mut sections: HashMap<String, Vec<String>> = HashMap::new();
    let mut current = String::new();
    for line in lines {
        let first = line.split_whitespace().next().unwrap_or("");
        if KEYWORDS.contains(&first) {
            if first != "LOOKUP_TABLE" {
                current = line.to_string();
                assert!(sections.insert(current.clone(), Vec::new()).is_none(), "duplicate section {line}");
            }
            continue;
        }
        sections.get_mut(&current).expect("data before any section").extend(line.split_whitespace().map(String::from));
    }
    LegacyVtk { header, sections }
}

impl LegacyVtk {
    fn numbers(&self, section: &str) -> Vec<f64> {
        self.sections[section].iter().map(|t| t.parse().unwrap()).collect()
    }
}

fn export(scale: f64, dir: &std::path::Path) -> String {
    let mut cfg = RunConfig::box_demo(1e-2, FloorMode::ClampBoundary);
    cfg.output.dir = dir.to_path_buf();
    cfg.output.scale = scale;
    run(&cfg).unwrap();
    std::fs::read_to_string(dir.join(format!("{}.vtk", cfg.output_name()))).unwrap()
}

#[test]
fn box_export_matches_the_solution() {
    let dir = tempfile::tempdir().unwrap();
    let scale = 25.0;
    let vtk = parse(&export(scale, dir.path()));
    assert_eq!(vtk.header[0], "# vtk DataFile Version 3.0");
    assert_eq!(vtk.header[2], "ASCII");
    assert_eq!(vtk.header[3], "DATASET UNSTRUCTURED_GRID");

    let problem = Problem::from_model(box_structure(1e-2, FloorMode::ClampBoundary).unwrap(), 8).unwrap();
    let sol = solve(&problem, SolverKind::Direct).unwrap();
    let mesh = &problem.mesh;
    let (n, ne) = (mesh.nodes.len(), mesh.elements.len());

    let points = vtk.numbers(&format!("POINTS {n} double"));
    let disp = vtk.numbers("VECTORS displacement double");
    assert_eq!(points.len(), 3 * n);
    assert_eq!(disp.len(), 3 * n);
    let umax = sol.dofs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..n {
        for k in 0..3 {
            let u = sol.dofs[3 * i + k];
            assert!((disp[3 * i + k] - u).abs() <= 1e-11 * umax);
            assert!((points[3 * i + k] - (mesh.nodes[i][k] + scale * u)).abs() <= 1e-11 * (1.0 + scale * umax));
        }
    }

    let cells = vtk.numbers(&format!("CELLS {ne} {}", 7 * ne));
    for (el, row) in mesh.elements.iter().zip(cells.chunks(7)) {
        assert_eq!(row[0], 6.0);
        let ids: Vec<usize> = row[1..].iter().map(|v| *v as usize).collect();
        assert_eq!(ids, el.nodes.to_vec());
    }
    let types = vtk.numbers(&format!("CELL_TYPES {ne}"));
    assert!(types.iter().all(|t| *t == VTK_QUADRATIC_TRIANGLE as f64));

    let normal = vtk.numbers("SCALARS normal_displacement double 1");
    let indicator = vtk.numbers("SCALARS indicator double 1");
    let patch = vtk.numbers("SCALARS patch int 1");
    assert_eq!(normal.len(), n);
    assert_eq!((indicator.len(), patch.len()), (ne, ne));
    assert!(indicator.iter().all(|v| *v >= 0.0));
    for (el, p) in mesh.elements.iter().zip(&patch) {
        assert_eq!(el.patch as f64, *p);
    }
}

#[test]
fn zero_scale_writes_the_undeformed_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let vtk = parse(&export(0.0, dir.path()));
    let problem = Problem::from_model(box_structure(1e-2, FloorMode::ClampBoundary).unwrap(), 8).unwrap();
    let n = problem.mesh.nodes.len();
    let points = vtk.numbers(&format!("POINTS {n} double"));
    for (i, p) in problem.mesh.nodes.iter().enumerate() {
        for k in 0..3 {
            assert!((points[3 * i + k] - p[k]).abs() <= 1e-12);
        }
    }
}
