use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_hemivar");

fn configs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

fn hemivar(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn list_names_the_core_fixtures() {
    let out = hemivar(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["circle-spectral", "square-nonmonotone", "ocp1-inverse-crime", "stability-obstacle"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing from\n{text}");
    }
}

#[test]
fn solve_canonical_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = hemivar(&["solve", "--fixture", "square-nonmonotone", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out.join("solution.json"));
    assert_eq!(v["converged"], true);
    assert!(v["margin"].as_f64().unwrap() > 0.0);
    assert_eq!(v["transmission"]["dirichlet_jump"].as_f64().unwrap(), 0.0);
    for f in ["resolved_config.toml", "mesh.txt", "trace.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = hemivar(&["stability", "--h", "0.15", "--seed", "3", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["stability.json", "stability.csv", "resolved_config.toml"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn obstacle_stability_rows_decrease() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let o = hemivar(&["stability", "--kind", "obstacle", "--N", "8", "--h", "0.15", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("stability.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let errors: Vec<f64> = rdr.records().map(|r| r.unwrap()[2].parse().unwrap()).collect();
    assert_eq!(errors.len(), 8);
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

#[test]
fn shipped_configs_parse_and_resolve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let cfg = configs().join("square-nonmonotone.toml");
    let o = hemivar(&["solve", "--config", cfg.to_str().unwrap(), "--h", "0.2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // The echoed configuration is itself a valid input.
    let again = dir.path().join("d");
    let resolved = out.join("resolved_config.toml");
    let o = hemivar(&["solve", "--config", resolved.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        std::fs::read(out.join("solution.json")).unwrap(),
        std::fs::read(again.join("solution.json")).unwrap()
    );
    for name in ["stability-obstacle.toml", "ocp4-obstacle.toml"] {
        let text = std::fs::read_to_string(configs().join(name)).unwrap();
        let s: hemivar::scenario::Scenario = toml::from_str(&text).unwrap();
        s.validate().unwrap();
    }
}

#[test]
fn exported_mesh_can_be_imported() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let o = hemivar(&["solve", "--h", "0.15", "--out", first.to_str().unwrap()]);
    assert!(o.status.success());
    let second = dir.path().join("b");
    let mesh = first.join("mesh.txt");
    let o = hemivar(&["solve", "--mesh", mesh.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (a, b) = (json(&first.join("solution.json")), json(&second.join("solution.json")));
    let ea = a["energy"].as_f64().unwrap();
    let eb = b["energy"].as_f64().unwrap();
    assert!((ea - eb).abs() <= 1e-12 * ea.abs(), "{ea} vs {eb}");
}

#[test]
fn invalid_friction_law_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("square-nonmonotone.toml"))
        .unwrap()
        .replace("mu1 = 2.0", "mu1 = 0.5");
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, text).unwrap();
    let o = hemivar(&["solve", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mu1 > mu2"));
}

#[test]
fn unknown_fixture_and_mismatched_config_exit_with_code_2() {
    let o = hemivar(&["solve", "--fixture", "no-such-fixture"]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = configs().join("square-nonmonotone.toml");
    let o = hemivar(&["stability", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solver_failure_exits_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("square-nonmonotone.toml"))
        .unwrap()
        .replace("max_outer = 200", "max_outer = 1");
    let cfg = dir.path().join("short.toml");
    std::fs::write(&cfg, text).unwrap();
    let o = hemivar(&["solve", "--config", cfg.to_str().unwrap(), "--h", "0.2", "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn spectra_and_field_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sp");
    assert!(hemivar(&["spectra", "--out", out.to_str().unwrap()]).status.success());
    let v = json(&out.join("spectra.json"));
    for row in v["rows"].as_array().unwrap().iter().filter(|r| r["panels"] == 128) {
        assert!(row["rel_error"].as_f64().unwrap() < 0.03);
    }
    let out = dir.path().join("fd");
    assert!(hemivar(&["field", "--h", "0.15", "--workers", "2", "--out", out.to_str().unwrap()]).status.success());
    let text = std::fs::read_to_string(out.join("field.csv")).unwrap();
    assert!(text.starts_with("x,y,u2\n"));
    assert!(text.lines().count() > 100);
}
