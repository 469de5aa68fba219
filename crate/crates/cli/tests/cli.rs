use std::path::Path;
use std::process::{Command, Output};

use serde::de::DeserializeOwned;
use serde::Serialize;
use steklov_core::analytic::{rectangle_spectrum, RectCondition};
use steklov_core::experiments::{AttachmentResult, ConvergenceReport, MultiplicityResult, SweepReport};
use steklov_core::mesh::Mesh;
use steklov_core::steklov::SpectrumReport;

const SMALL: &[&str] = &["--n-radial", "8", "--n-angular", "64", "--ny", "16"];

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steklov-lab"))
        .current_dir(dir)
        .env("STEKLOV_LAB_OUT", dir.join("reports"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_kind(o: &Output) -> (i32, String, String) {
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).expect("stderr is one JSON object");
    (o.status.code().unwrap(), v["error"].as_str().unwrap().into(), v["message"].as_str().unwrap().into())
}

/// Parse the `--json` output and check that it serializes back to the same value.
fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(text: &str) -> T {
    let x: T = serde_json::from_str(text).unwrap();
    let again: T = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
    assert_eq!(again, x);
    x
}

#[test]
fn rect_analytic_prints_seven_digits() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["rect-analytic", "--eps", "0.2", "--h", "1.0", "--condition", "dirichlet", "--count", "4"]);
    assert_eq!(stdout(&o).trim(), "4.778617 17.49532 34.70008 51.63421");
    assert!(d.path().join("reports/rect-analytic.json").exists());
}

#[test]
fn topology_of_a_handle() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["topology", "--orientable", "--genus", "0", "--k", "1", "--same-component", "--preserve"]);
    assert_eq!(stdout(&o).trim(), "orientable genus=0 k=2");
    let o = run(d.path(), &["--json", "topology", "--genus", "1", "--k", "2", "--different-components", "--reverse"]);
    let r: AttachmentResult = round_trip(&stdout(&o));
    assert_eq!((r.orientable, r.genus, r.boundary_components), (false, 4, 1));
}

#[test]
fn validation_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    let (code, kind, msg) = error_kind(&run(d.path(), &["spectrum", "--mesh", "missing.msh"]));
    assert_eq!((code, kind.as_str()), (2, "io"));
    assert!(msg.contains("missing.msh"));

    let (code, kind, _) = error_kind(&run(d.path(), &["rect-analytic", "--eps=-1"]));
    assert_eq!((code, kind.as_str()), (2, "invalid-argument"));

    let (code, kind, _) = error_kind(&run(d.path(), &["topology", "--k", "1", "--different-components"]));
    assert_eq!((code, kind.as_str()), (2, "invalid-argument"));

    let (code, kind, _) = error_kind(&run(d.path(), &["no-such-command"]));
    assert_eq!((code, kind.as_str()), (2, "usage"));

    std::fs::write(d.path().join("bad.msh"), "not a mesh\n").unwrap();
    let (code, _, _) = error_kind(&run(d.path(), &["spectrum", "--mesh", "bad.msh"]));
    assert_eq!(code, 2);
}

#[test]
fn no_crossing_exits_1() {
    let d = tempfile::tempdir().unwrap();
    let mut args = vec!["find-multiplicity", "--eps", "0.3", "--h0", "1.2", "--h1", "1.6", "--grid", "9"];
    args.extend_from_slice(SMALL);
    let (code, kind, _) = error_kind(&run(d.path(), &args));
    assert_eq!((code, kind.as_str()), (1, "no-crossing"));
}

#[test]
fn config_file_precedence() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("run.cfg"), "# strip\neps = 0.2\nh = 1.0\ncount = 2\n").unwrap();
    let o = run(d.path(), &["--config", "run.cfg", "rect-analytic"]);
    assert_eq!(stdout(&o).trim(), "4.778617 17.49532");
    let o = run(d.path(), &["--config", "run.cfg", "rect-analytic", "--count", "1", "--condition", "neumann"]);
    assert_eq!(stdout(&o).trim(), "0");

    std::fs::write(d.path().join("bad.cfg"), "eps = 0.2\nepsilon = 0.1\n").unwrap();
    let (code, kind, msg) = error_kind(&run(d.path(), &["--config", "bad.cfg", "rect-analytic"]));
    assert_eq!((code, kind.as_str()), (2, "parse"));
    assert!(msg.contains("epsilon") && msg.contains("line 2"));
}

#[test]
fn output_directory_flag_beats_environment() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["--out", "mine", "topology"]);
    stdout(&o);
    assert!(d.path().join("mine/topology.json").exists());
    assert!(!d.path().join("reports").exists());
}

#[test]
fn mesh_then_spectrum_round_trips() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["mesh", "--kind", "disk", "--n-radial", "6", "--n-angular", "48", "--output", "disk.msh"]);
    stdout(&o);
    let mesh = Mesh::read(&d.path().join("disk.msh")).unwrap();
    let o = run(d.path(), &["--json", "spectrum", "--mesh", "disk.msh", "--count", "4"]);
    let text = stdout(&o);
    let r: SpectrumReport = round_trip(&text);
    assert_eq!(r.mesh_hash, mesh.metadata_hash());
    assert!((r.eigenvalues[1] - 1.0).abs() < 0.05);
    let file = std::fs::read_to_string(d.path().join("reports/spectrum.json")).unwrap();
    assert_eq!(serde_json::from_str::<SpectrumReport>(&file).unwrap(), r);
    let csv = std::fs::read_to_string(d.path().join("reports/spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);

    let o = run(d.path(), &["mesh", "--kind", "rectangle", "--eps", "0.5", "--h", "2", "--nx", "4", "--ny", "8"]);
    stdout(&o);
    let o = run(
        d.path(),
        &["--json", "spectrum", "--mesh", "reports/mesh.msh", "--dirichlet", "I_bottom", "--dirichlet", "I_top", "--count", "1"],
    );
    let r: SpectrumReport = round_trip(&stdout(&o));
    let exact = rectangle_spectrum(0.5, 2.0, RectCondition::DirichletOnI, 1).unwrap()[0];
    assert!((r.eigenvalues[0] - exact).abs() < 0.02 * exact, "{} vs {exact}", r.eigenvalues[0]);
}

#[test]
fn glue_writes_a_readable_surface() {
    let d = tempfile::tempdir().unwrap();
    let mut args = vec!["glue", "--eps", "0.3", "--h", "2"];
    args.extend_from_slice(SMALL);
    stdout(&run(d.path(), &args));
    let m = Mesh::read(&d.path().join("reports/glued.msh")).unwrap();
    let t = m.topology();
    assert!(t.orientable);
    assert_eq!((t.genus, t.boundary_components), (0, 2));
    assert!(m.has_label("free_left") && m.has_label("free_right"));
}

#[test]
fn grid_experiments_are_deterministic_across_thread_counts() {
    let d = tempfile::tempdir().unwrap();
    let mut sweep = vec!["--json", "sweep-h", "--eps", "0.3", "--h0", "1.5", "--h1", "3.0", "--grid", "7"];
    sweep.extend_from_slice(SMALL);
    let mut one = vec!["--jobs", "1"];
    one.extend_from_slice(&sweep);
    let a: SweepReport = round_trip(&stdout(&run(d.path(), &one)));
    let b: SweepReport = round_trip(&stdout(&run(d.path(), &sweep)));
    assert_eq!(a, b);
    assert_eq!(a.h.len(), 7);
    assert!(d.path().join("reports/sweep-h.csv").exists());

    let mut conv = vec!["--json", "--jobs", "2", "converge-eps", "--h", "2.5", "--eps-list", "0.4,0.3", "--j", "3"];
    conv.extend_from_slice(SMALL);
    let r: ConvergenceReport = round_trip(&stdout(&run(d.path(), &conv)));
    assert_eq!(r.epsilons, vec![0.4, 0.3]);
    assert_eq!(r.eigenvalues[0].len(), 4);
    let csv = std::fs::read_to_string(d.path().join("reports/converge-eps.csv")).unwrap();
    assert!(csv.starts_with("epsilon,j,sigma,target,deviation"));
}

#[test]
fn multiplicity_search_reports_json() {
    let d = tempfile::tempdir().unwrap();
    let mut args = vec!["--json", "find-multiplicity", "--eps", "0.3", "--h0", "1.5", "--h1", "3.3", "--grid", "9"];
    args.extend_from_slice(SMALL);
    let r: MultiplicityResult = round_trip(&stdout(&run(d.path(), &args)));
    assert!(r.converged);
    assert!(r.h_eps > 1.5 && r.h_eps < 3.3);
}
