//! End-to-end runs of the command-line binary.

use std::path::Path;
use std::process::{Command, Output};

use tdc_plates::cli::{parse_values, RunConfig};

const BIN: &str = env!("CARGO_BIN_EXE_tdc-plates");

fn configs_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn tdc(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("TDC_PLATES_THREADS");
    if let Some(t) = threads {
        cmd.env("TDC_PLATES_THREADS", t);
    }
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Writes `body` as a solve config whose outputs go to `dir`.
fn solve_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let text = format!(
        "mode = \"solve\"\n[output]\ndir = \"{}\"\nname = \"{name}\"\n{body}",
        dir.join("out").display()
    );
    let path = dir.join(format!("{name}.toml"));
    std::fs::write(&path, text).unwrap();
    path
}

const SQUARE: &str = r#"
[mesh]
subdivisions = 3
[structure.material]
youngs_modulus = 1.0
poisson_ratio = 0.3
thickness = 0.1
[[structure.patches]]
id = 0
vertices = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]
"#;

#[test]
fn demo_box_reports_and_writes_the_deformed_box() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = tdc(&["demo", "box", "--t", "1e-3", "--out", out_dir.to_str().unwrap()], None);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = String::from_utf8(out.stdout.clone()).unwrap();
    let values = parse_values(&report).expect("values block");
    assert_eq!(values["solver"].as_str(), Some("direct"));
    assert!(values["membrane_to_bending"].as_float().unwrap() < 1e-2);
    assert!(out_dir.join("box_t1e-3.vtk").exists());
    assert!(stderr(&out).contains("wrote"));
}

#[test]
fn solve_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = solve_config(
        dir.path(),
        "square",
        &format!(
            "{SQUARE}tags = [\"clamped\", \"free\", \"free\", \"free\"]\n[[structure.loads]]\npatch = 0\nforce = [0, 0, 1]\n"
        ),
    );
    let out = tdc(&["solve", cfg.to_str().unwrap()], None);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let values = parse_values(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(values["max_normal_displacement"].as_float().unwrap() > 0.0);
    assert!(values["energy_identity_error"].as_float().unwrap() <= 1e-10);
    for ext in ["vtk", "report.txt"] {
        assert!(dir.path().join(format!("out/square.{ext}")).exists());
    }
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let unknown_patch = solve_config(
        dir.path(),
        "bad_patch",
        &format!("{SQUARE}tags = [\"clamped\", \"free\", \"free\", \"free\"]\n[[structure.loads]]\npatch = 7\nforce = [0, 0, 1]\n"),
    );
    let out = tdc(&["solve", unknown_patch.to_str().unwrap()], None);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("structure.loads[0].patch"), "{}", stderr(&out));

    let typo = solve_config(dir.path(), "typo", &format!("{SQUARE}tags = [\"clamped\", \"free\", \"free\", \"free\"]\nthicknes = 2\n"));
    let out = tdc(&["solve", typo.to_str().unwrap()], None);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("thicknes"), "{}", stderr(&out));

    let out = tdc(&["solve", dir.path().join("missing.toml").to_str().unwrap()], None);
    assert_eq!(code(&out), 1);

    let out = tdc(&["demo", "box", "--t", "-1"], None);
    assert_eq!(code(&out), 1);

    let out = tdc(&["frobnicate"], None);
    assert_eq!(code(&out), 1);

    let out = tdc(&["demo", "box", "--t", "1e-2"], Some("zero"));
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("TDC_PLATES_THREADS"));
}

#[test]
fn unsupported_structure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = solve_config(
        dir.path(),
        "floating",
        &format!("{SQUARE}tags = [\"free\", \"free\", \"free\", \"free\"]\n[[structure.loads]]\npatch = 0\nforce = [0, 0, 1]\n"),
    );
    let out = tdc(&["solve", cfg.to_str().unwrap()], None);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("not positive definite"));
}

#[test]
fn help_and_version_exit_cleanly() {
    assert_eq!(code(&tdc(&["--help"], None)), 0);
    assert_eq!(code(&tdc(&["--version"], None)), 0);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    let mut reports = Vec::new();
    for threads in ["1", "4"] {
        let out_dir = dir.path().join(format!("threads{threads}"));
        let out = tdc(
            &["demo", "box", "--t", "1e-2", "--subdivisions", "4", "--out", out_dir.to_str().unwrap()],
            Some(threads),
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        reports.push(out.stdout);
        files.push(std::fs::read(out_dir.join("box_t1e-2.vtk")).unwrap());
    }
    assert!(reports[0] == reports[1], "reports differ between thread counts");
    assert!(files[0] == files[1], "VTK files differ between thread counts");
}

#[test]
fn export_writes_only_what_was_asked() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("angle.mesh");
    let matrix = dir.path().join("angle.matrix");
    let cfg = configs_dir().join("angle_section.toml");
    let out = tdc(
        &[
            "export",
            cfg.to_str().unwrap(),
            "--mesh-dump",
            mesh.to_str().unwrap(),
            "--matrix",
            matrix.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(std::fs::read_to_string(&mesh).unwrap().starts_with("# tdc-plates mesh v1"));
    assert!(matrix.exists());
    assert!(!dir.path().join("angle.vtk").exists());

    let out = tdc(&["export", cfg.to_str().unwrap()], None);
    assert_eq!(code(&out), 1);
}

#[test]
fn shipped_configs_parse_and_round_trip() {
    let mut count = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let cfg = RunConfig::from_file(&path).unwrap();
        let again = RunConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
        count += 1;
    }
    assert!(count >= 8);
}

#[test]
fn converge_config_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs_dir().join("cantilever_strip.toml")).unwrap();
    let mut cfg = RunConfig::from_toml_str(&text).unwrap();
    cfg.output.dir = dir.path().to_path_buf();
    let path = dir.path().join("cantilever.toml");
    std::fs::write(&path, cfg.to_toml_string().unwrap()).unwrap();
    let out = tdc(&["converge", path.to_str().unwrap()], None);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let values = parse_values(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(values["final_error"].as_float().unwrap() <= 0.02);
    let table = std::fs::read_to_string(dir.path().join(format!("{}.table", cfg.output_name()))).unwrap();
    assert_eq!(table.lines().filter(|l| !l.starts_with('#')).count(), 4);
}
