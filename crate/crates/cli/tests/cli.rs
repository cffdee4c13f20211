use std::path::Path;
use std::process::Command;

fn run(args: &[&str], dir: &Path, config: &str) -> (i32, String) {
    let cfg = dir.join("in.toml");
    std::fs::write(&cfg, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_steadyfsi"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out-dir")
        .arg("out")
        .current_dir(dir)
        .env("STEADYFSI_THREADS", "2")
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

const SMALL: &str = "[grid]\nnx = 16\nnz = 16\n";

#[test]
fn zero_inflow_solve_writes_zero_state() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL}[bc]\nprofile = {{ kind = \"parabolic\", peak = 0.0 }}\n");
    let (code, err) = run(&["solve"], dir.path(), &cfg);
    assert_eq!(code, 0, "{err}");
    let out = dir.path().join("out");
    for f in [
        "summary.json",
        "fields.csv",
        "beam.csv",
        "run.log",
        "config.toml",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let fields = std::fs::read_to_string(out.join("fields.csv")).unwrap();
    let mut lines = fields.lines();
    assert_eq!(lines.next(), Some("x,z,rho,ux,uz"));
    for l in lines {
        let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(&v[2..], &[0.0, 0.0, 0.0]);
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["state"]["iterations"], 1);
    assert_eq!(summary["state"]["converged"], true);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let (code, err) = run(&["diagnose", "--seed", "3"], d.path(), SMALL);
        assert_eq!(code, 0, "{err}");
    }
    for f in [
        "summary.json",
        "fields.csv",
        "beam.csv",
        "run.log",
        "config.toml",
    ] {
        let x = std::fs::read(a.path().join("out").join(f)).unwrap();
        let y = std::fs::read(b.path().join("out").join(f)).unwrap();
        assert_eq!(x, y, "{f} differs");
    }
}

#[test]
fn kappa_table_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        "{SMALL}[sweep]\nkappa_lo = 1e-3\nkappa_hi = 1e-2\nscan_points = 3\nbracket = 0.2\n"
    );
    let (code, err) = run(&["sweep-kappa"], dir.path(), &cfg);
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(dir.path().join("out/kappa.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("kappa,lip_norm,kappa_times_lip,converged,beta_margin")
    );
    assert!(csv.lines().count() > 3);
}

#[test]
fn non_convergence_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(
        &["solve"],
        dir.path(),
        &format!("{SMALL}[solver]\nmax_outer = 2\n"),
    );
    assert_eq!(code, 2);
    assert!(dir.path().join("out/summary.json").exists());
}

#[test]
fn bad_config_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run(&["solve"], dir.path(), "[eos]\nrho_bar = -1.0\n");
    assert_eq!(code, 1);
    assert!(err.contains("rho_bar"), "{err}");
    let (code, err) = run(&["solve"], dir.path(), "[grid]\nnx = 16\nbogus = 1\n");
    assert_eq!(code, 1);
    assert!(err.contains("line"), "{err}");
}

#[test]
fn delta_continuation_writes_trend() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run(
        &["continue-delta"],
        dir.path(),
        &format!("{SMALL}[continuation]\nstages = 2\n"),
    );
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(dir.path().join("out/trend.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}
