use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const PLAIN: &str = r#"{"n":2,"delta":1.0471975512,"d":2}"#;
const SIGMA: &str = r#"{"n":3,"delta":1.0471975512,"d":2,"sigma_mode":true}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hoferlab"))
        .args(args)
        .env_remove("HOFERLAB_THREADS")
        .output()
        .expect("spawn hoferlab")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "exit {:?}: {}",
        o.status,
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn selftest_passes() {
    let out = stdout(&run(&["selftest"]));
    assert!(out.contains("0 failed"), "{out}");
}

#[test]
fn chords_lists_two_k_twist_chords() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", PLAIN);
    let out = stdout(&run(&[
        "chords",
        "--config",
        s(&cfg),
        "--i",
        "0",
        "--k",
        "3",
        "--v",
        "1.5,0.2",
    ]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("sector,s,m,branch,index,action"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.iter().filter(|r| r.starts_with("tau,")).count(), 6);
    assert!(rows.iter().any(|r| r.starts_with("phi")));
    for r in &rows {
        assert_eq!(r.split(',').count(), 6, "{r}");
    }
}

#[test]
fn indices_agree_with_oracle_for_negative_coefficients() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", PLAIN);
    let out = stdout(&run(&[
        "indices",
        "--config",
        s(&cfg),
        "--i",
        "1",
        "--k",
        "2",
        "--v",
        "-1.5,0.7",
    ]));
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.ends_with(",true,true")), "{out}");
}

#[test]
fn non_transverse_v_needs_nudge_flag() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", PLAIN);
    // 2π/6 = δ, so the first coefficient resonates.
    let args = [
        "chords",
        "--config",
        s(&cfg),
        "--k",
        "1",
        "--v",
        "0.16666666666666666,0.4",
    ];
    let rejected = run(&args);
    assert!(!rejected.status.success());
    assert!(String::from_utf8_lossy(&rejected.stderr).contains("--allow-nudge"));

    let mut nudged = args.to_vec();
    nudged.push("--allow-nudge");
    let out = run(&nudged);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nudged"));
}

#[test]
fn malformed_config_fails_with_diagnostic() {
    let dir = TempDir::new().unwrap();
    for (name, body) in [
        ("trunc.json", r#"{"n":2,"delta":1.0"#),
        (
            "unknown.json",
            r#"{"n":2,"delta":1.0,"d":2,"colour":"red"}"#,
        ),
        ("delta.json", r#"{"n":2,"delta":4.0,"d":2}"#),
    ] {
        let cfg = write(&dir, name, body);
        let o = run(&["boundary-depth", "--config", s(&cfg), "--kmax", "2"]);
        assert!(!o.status.success(), "{name}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.starts_with("error:"), "{name}: {err}");
    }
    let missing = dir.path().join("absent.json");
    assert!(
        !run(&["chords", "--config", s(&missing), "--k", "1", "--v", "1"])
            .status
            .success()
    );
}

#[test]
fn unknown_subcommand_fails() {
    let o = run(&["frobnicate"]);
    assert!(!o.status.success());
    assert!(!o.stderr.is_empty());
}

#[test]
fn boundary_depth_rows_respect_lower_bound() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", PLAIN);
    let out = stdout(&run(&[
        "boundary-depth",
        "--config",
        s(&cfg),
        "--kmax",
        "6",
        "--ell",
        "0",
    ]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("k,beta,lower_bound"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], (i + 1) as f64);
        assert!(r[1] >= r[2] - 1e-9, "{r:?}");
    }
    assert!(rows[5][1] > rows[0][1]);
}

#[test]
fn barcode_of_emitted_complex_matches_scenario() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", PLAIN);
    let cx = dir.path().join("complex.json");
    let direct = stdout(&run(&[
        "barcode",
        "--config",
        s(&cfg),
        "--k",
        "2",
        "--v",
        "1.5,0.2",
        "--emit-complex",
        s(&cx),
    ]));
    let reread = stdout(&run(&["barcode", "--complex", s(&cx)]));
    assert_eq!(direct, reread);
    let parsed: serde_json::Value = serde_json::from_str(&direct).unwrap();
    assert!(parsed["bars"].as_array().is_some_and(|b| !b.is_empty()));
}

#[test]
fn barcode_rejects_invalid_complex() {
    let dir = TempDir::new().unwrap();
    let cx = write(
        &dir,
        "bad.json",
        r#"{"generators":[{"id":"a","degree":1,"action":0.0},{"id":"b","degree":0,"action":1.0}],
            "boundary":{"a":["b"]}}"#,
    );
    let o = run(&["barcode", "--complex", s(&cx)]);
    assert!(!o.status.success());
}

#[test]
fn quasiflat_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "s.json", SIGMA);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (out, seq) in [(&a, false), (&b, true)] {
        let mut args = vec![
            "quasiflat",
            "--config",
            s(&cfg),
            "--pairs",
            "12",
            "--seed",
            "5",
            "--out",
            s(out),
        ];
        if seq {
            args.push("--sequential");
        }
        stdout(&run(&args));
    }
    let a = fs::read(a).unwrap();
    assert_eq!(a, fs::read(b).unwrap());

    let text = String::from_utf8(a).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "v,w,k,lower,upper_plain,upper_sigma,exact_inf_norm,exact_one_norm,spectral_differences,nudged,group_bound"
    );
    assert_eq!(text.lines().count(), 13);
}

#[test]
fn sweep_triples_are_sandwiched() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "s.json", SIGMA);
    let out = stdout(&run(&[
        "sweep",
        "--config",
        s(&cfg),
        "--pairs",
        "10",
        "--seed",
        "9",
    ]));
    for line in out.lines().skip(1) {
        let x: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        let (norm, lower, upper) = (x[0], x[1], x[2]);
        assert!((lower - norm / 2.0).abs() < 1e-9);
        assert!(upper <= 2.0 * norm + 1e-9);
    }
}

#[test]
fn thread_cap_is_validated() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "s.json", SIGMA);
    let args = ["sweep", "--config", s(&cfg), "--pairs", "3"];
    let capped = Command::new(env!("CARGO_BIN_EXE_hoferlab"))
        .args(args)
        .env("HOFERLAB_THREADS", "1")
        .output()
        .unwrap();
    assert!(capped.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_hoferlab"))
        .args(args)
        .env("HOFERLAB_THREADS", "many")
        .output()
        .unwrap();
    assert!(!bad.status.success());
}
