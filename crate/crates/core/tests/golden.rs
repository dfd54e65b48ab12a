//! Golden files for the mesh dump and convergence tables. Set
//! `TDC_PLATES_BLESS=1` to regenerate them.

mod common;

use std::path::PathBuf;

use tdc_plates::mesh::{mesh_structure, write_mesh_dump};
use tdc_plates::oracles::{convergence_study, BenchmarkId, BenchmarkSetup};
use tdc_plates::solver::SolverKind;

const PROVENANCE: &str = "# provenance: generated by the golden test target; regenerate with TDC_PLATES_BLESS=1";

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn tokens_match(a: &str, b: &str) -> bool {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => (x - y).abs() <= 1e-9 * x.abs().max(y.abs()) + 1e-11,
        _ => a == b,
    }
}

fn check(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var("TDC_PLATES_BLESS").as_deref() == Ok("1") {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, format!("{PROVENANCE}\n{actual}")).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}; run with TDC_PLATES_BLESS=1 to create it", path.display()));
    let expected: Vec<&str> = expected.lines().filter(|l| !l.starts_with("# provenance:")).collect();
    let actual: Vec<&str> = actual.lines().collect();
    assert_eq!(expected.len(), actual.len(), "{name}: line count changed");
    for (k, (e, a)) in expected.iter().zip(&actual).enumerate() {
        let (et, at): (Vec<&str>, Vec<&str>) = (e.split_whitespace().collect(), a.split_whitespace().collect());
        assert!(
            et.len() == at.len() && et.iter().zip(&at).all(|(x, y)| tokens_match(x, y)),
            "{name}:{}: expected `{e}`, got `{a}`",
            k + 2
        );
    }
}

#[test]
fn angle_section_mesh_dump() {
    let mesh = mesh_structure(&common::angle_section(0.1), 2).unwrap();
    let mut out = Vec::new();
    write_mesh_dump(&mesh, &mut out).unwrap();
    check("angle_section_n2.mesh", &String::from_utf8(out).unwrap());
}

#[test]
fn benchmark_tables() {
    for id in [BenchmarkId::SsSquare, BenchmarkId::CantileverStrip, BenchmarkId::MembranePatch] {
        let r = convergence_study(&BenchmarkSetup::new(id), 3, SolverKind::Direct).unwrap();
        let table = r.to_table(&format!("benchmark {}", id.as_str()));
        check(&format!("{}.table", id.as_str()), &table);
    }
}
