use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lpmult(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpmult")).args(args).output().unwrap()
}

const SMALL: &str = r#"
seed = 3
[grid]
n = [128, 256]
[sweep]
s = [0.6, -0.6, 0.3]
p = [2.0, 3.0]
gamma = [0.0, 0.5]
families = [
    { kind = "scale_ladder", depth = 4, modulations = [0.5] },
    { kind = "fixed", member = { kind = "random_bandlimited", k_lo = 0.0, k_hi = 10.0 } },
]
spaces = [{ kind = "bessel" }, { kind = "besov", q = 2.0 }, { kind = "triebel_lizorkin", q = inf }]
"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn sweep_is_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let mut outputs = Vec::new();
    for workers in ["1", "8"] {
        let out = dir.path().join(format!("w{workers}.csv"));
        let o = lpmult(&[
            "sweep",
            "--config",
            &cfg,
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.starts_with("s,p,gamma,N,family,space,ratio,admissible\n"));
    // 3 s x 2 p x 2 gamma x 2 N x 2 families x 3 spaces
    assert_eq!(text.lines().count(), 1 + 144);
}

#[test]
fn csv_and_json_hold_the_same_records() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let csv_path = dir.path().join("r.csv");
    let json_path = dir.path().join("r.json");
    for (fmt, path) in [("csv", &csv_path), ("json", &json_path)] {
        let o = lpmult(&[
            "sweep",
            "--config",
            &cfg,
            "--format",
            fmt,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let a = lpmult::report::read_csv(fs::File::open(csv_path).unwrap()).unwrap();
    let b = lpmult::report::read_json(fs::File::open(json_path).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let run = |seed: &str| lpmult(&["sweep", "--config", &cfg, "--seed", seed]).stdout;
    assert_eq!(run("3"), lpmult(&["sweep", "--config", &cfg]).stdout);
    assert_ne!(run("3"), run("4"));
}

#[test]
fn empty_s_grid_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[sweep]\ns = []\n");
    let o = lpmult(&["sweep", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("s_list"));
}

#[test]
fn malformed_config_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[grid]\nn = [256]\ndim = \"two\"\n");
    let o = lpmult(&["norm", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn verify_exit_codes() {
    let o = lpmult(&["verify", "dyadic"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("PASS dyadic/invariants_d1_n1024_k6"));
    assert!(text.contains(" 0 failed"));
    assert_eq!(lpmult(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(lpmult(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_writes_machine_readable_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("checks.json");
    let o = lpmult(&[
        "verify",
        "paraproduct",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&fs::read(out).unwrap()).unwrap();
    let checks = v.as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["passed"] == true));
}

#[test]
fn verify_all_is_quick() {
    let start = std::time::Instant::now();
    let o = lpmult(&["verify", "all"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(start.elapsed().as_secs() < 300);
}

#[test]
fn norm_table_examples() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "norm.toml",
        r#"
        [grid]
        n = [256]
        [norm]
        fields = [{ kind = "constant", value = 0.0 }, { kind = "constant", value = 1.0 }]
        spaces = [{ kind = "lp", p = 3.0, gamma = 0.0 }, { kind = "besov", s = 0.3, p = 2.0, q = 1.0, gamma = 0.5 }]
        "#,
    );
    let o = lpmult(&["norm", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for r in &rows[..2] {
        assert_eq!(r[3].parse::<f64>().unwrap(), 0.0);
    }
    let lp: f64 = rows[2][3].parse().unwrap();
    assert!((lp - 32f64.powf(1.0 / 3.0)).abs() < 1e-12);
}

#[test]
fn default_config_parses_and_runs_norms() {
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/default.toml");
    let o = lpmult(&["norm", "--config", cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
