use std::path::{Path, PathBuf};
use std::process::Command;

use rdito::cli::{run, RunManifest};

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn rdito(args: &[&str]) -> i32 {
    run(std::iter::once("rdito").chain(args.iter().copied()))
}

/// Rows of a field CSV (comment lines skipped).
fn rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

const DEATH: &str = r#"{"kind":"death_diffusion","d":1,"box":[10.0],"shape":[16],"D":1.0,
  "mu":{"const":0.5},"v":{"expr":{"gaussian":{"mass":20.0,"center":[5.0],"sigma":1.0}}}}"#;

#[test]
fn derive_table_writes_golden_text_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("t1");
    assert_eq!(rdito(&["--out", prefix.to_str().unwrap(), "derive-table", "Lambda", "A", "Adag", "dt"]), 0);
    let text = std::fs::read_to_string(dir.path().join("t1.txt")).unwrap();
    assert_eq!(text, include_str!("golden/table1.txt"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("t1.json")).unwrap()).unwrap();
    assert!(json.is_object() || json.is_array());
    let m: RunManifest =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("t1.manifest.json")).unwrap()).unwrap();
    assert_eq!(m.command, "derive-table");
    assert_eq!(m.outputs.len(), 2);
    assert!(m.outputs.values().all(|h| h.len() == 64));
}

#[test]
fn unknown_family_is_a_usage_error() {
    assert_eq!(rdito(&["derive-table", "Nope"]), 2);
    assert_eq!(rdito(&["no-such-command"]), 2);
}

#[test]
fn unrecognized_products_need_the_flag() {
    assert_eq!(rdito(&["derive-table", "Xi", "Lambda"]), 3);
    assert_eq!(rdito(&["derive-table", "Xi", "Lambda", "--allow-unrecognized"]), 0);
}

#[test]
fn density_at_zero_reproduces_initial_samples() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "m.json", DEATH);
    let out = dir.path().join("d.csv");
    assert_eq!(rdito(&["--out", out.to_str().unwrap(), "density", model.to_str().unwrap(), "--t", "0"]), 0);
    let spec = rdito::spec::ModelSpec::from_json(DEATH).unwrap();
    let torus = spec.validate().unwrap();
    let v = spec.v.sample(&torus, 0.0);
    let r = rows(&out);
    assert_eq!(r.len(), 16);
    for (i, row) in r.iter().enumerate() {
        assert_eq!(row[0], torus.position(i)[0]);
        assert!((row[1] - v.values[i].re).abs() <= 1e-12 * v.values[i].re.abs().max(1e-300));
    }
}

#[test]
fn static_tree_density_grows_exponentially() {
    let dir = tempfile::tempdir().unwrap();
    let json = r#"{"kind":"brownian_tree","d":1,"box":[6.0],"shape":[12],"D":0.0,"mu":{"const":0.7},
      "v":{"expr":{"cosine":{"base":2.0,"amplitude":1.0,"modes":[1]}}}}"#;
    let model = write(dir.path(), "m.json", json);
    let out = dir.path().join("d.csv");
    assert_eq!(rdito(&["--out", out.to_str().unwrap(), "density", model.to_str().unwrap(), "--t", "1.5"]), 0);
    for row in rows(&out) {
        let v = 2.0 + (2.0 * std::f64::consts::PI * row[0] / 6.0).cos();
        assert!((row[1] - v * (0.7f64 * 1.5).exp()).abs() < 1e-10 * row[1]);
    }
}

#[test]
fn malformed_model_json_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"kind":"death_diffusion","d":1,"box":[10.0],"#);
    assert_eq!(rdito(&["density", bad.to_str().unwrap(), "--t", "1"]), 2);
    let unknown = write(dir.path(), "u.json", r#"{"kind":"death_diffusion","d":1,"box":[10.0],"shape":[4],"v":{"const":1.0},"extra":1}"#);
    assert_eq!(rdito(&["density", unknown.to_str().unwrap(), "--t", "1"]), 2);
}

#[test]
fn simulation_is_reproducible_and_comparable() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "m.json", DEATH);
    let sim = write(dir.path(), "s.json", r#"{"dt":0.01,"replicas":1000,"seed":3}"#);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for p in [&a, &b] {
        let code = rdito(&[
            "--out", p.to_str().unwrap(), "--threads", "1", "simulate", model.to_str().unwrap(),
            sim.to_str().unwrap(), "--t", "1",
        ]);
        assert_eq!(code, 0);
    }
    let read = |p: &Path| std::fs::read(PathBuf::from(format!("{}.density.csv", p.display()))).unwrap();
    assert_eq!(read(&a), read(&b));
    let ma: RunManifest =
        serde_json::from_str(&std::fs::read_to_string(format!("{}.manifest.json", a.display())).unwrap()).unwrap();
    assert_eq!(ma.seed, Some(3));
    let round: RunManifest = serde_json::from_str(&serde_json::to_string(&ma).unwrap()).unwrap();
    assert_eq!(round, ma);

    let analytic = dir.path().join("an.csv");
    assert_eq!(
        rdito(&["--out", analytic.to_str().unwrap(), "density", model.to_str().unwrap(), "--t", "1", "--cell-average"]),
        0
    );
    let mc = format!("{}.density.csv", a.display());
    assert_eq!(rdito(&["compare", analytic.to_str().unwrap(), &mc]), 0);

    // shift every MC value by ten standard errors
    let text = std::fs::read_to_string(&mc).unwrap();
    let shifted: String = text
        .lines()
        .map(|l| {
            if l.starts_with('#') {
                return format!("{l}\n");
            }
            let c: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            format!("{},{},{}\n", c[0], c[1] + 10.0 * c[2].max(1e-3), c[2].max(1e-3))
        })
        .collect();
    let bad = write(dir.path(), "shift.csv", &shifted);
    assert_eq!(rdito(&["compare", analytic.to_str().unwrap(), bad.to_str().unwrap()]), 1);
}

#[test]
fn oversized_step_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(
        dir.path(),
        "m.json",
        r#"{"kind":"death_diffusion","d":1,"box":[10.0],"shape":[8],"D":1.0,"mu":{"const":50.0},"v":{"const":1.0}}"#,
    );
    let sim = write(dir.path(), "s.json", r#"{"dt":0.01,"replicas":10}"#);
    assert_eq!(rdito(&["simulate", model.to_str().unwrap(), sim.to_str().unwrap(), "--t", "0.1"]), 3);
}

#[test]
fn perturb_pde_conserves_a_free_field() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(
        dir.path(),
        "m.json",
        r#"{"kind":"annihilation","d":1,"box":[10.0],"shape":[16],"D":1.0,"v":{"const":2.0},
            "kernel":{"gaussian":{"integral":0.0,"sigma":0.5,"cutoff":2.0}}}"#,
    );
    let out = dir.path().join("p.csv");
    let code =
        rdito(&["--out", out.to_str().unwrap(), "perturb", model.to_str().unwrap(), "--method", "pde", "--t", "0.5", "--steps", "10", "--every", "5"]);
    assert_eq!(code, 0);
    let r = rows(&out);
    assert_eq!(r.len(), 3 * 16);
    assert!(r.iter().all(|row| (row[2] - 2.0).abs() < 1e-12));
}

#[test]
fn binary_prints_help_and_rejects_bad_usage() {
    let bin = env!("CARGO_BIN_EXE_rdito");
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert!(help.status.success());
    let text = String::from_utf8_lossy(&help.stdout);
    for cmd in ["derive-table", "density", "gf", "fn", "simulate", "perturb", "compare"] {
        assert!(text.contains(cmd), "help lacks {cmd}");
    }
    let out = Command::new(bin).args(["derive-table", "Lambda", "A", "Adag", "dt"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), include_str!("golden/table1.txt"));
    assert_eq!(Command::new(bin).arg("density").output().unwrap().status.code(), Some(2));
}
