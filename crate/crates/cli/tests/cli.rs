use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn jointloop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jointloop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn simulate(dir: &Path, name: &str, extra: &[&str]) -> String {
    let out = path(dir, name);
    let mut args = vec![
        "simulate", "--shape", "2,3,4,1", "--frames", "25", "--seed", "9", "--out", &out,
    ];
    args.extend_from_slice(extra);
    let o = jointloop(&args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    out
}

fn read_json(path: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn simulate_then_solve_recovers_lengths() {
    let dir = tempfile::tempdir().unwrap();
    let frames = simulate(dir.path(), "f.csv", &[]);
    let text = std::fs::read_to_string(&frames).unwrap();
    assert!(text.starts_with("frame,pq,qr,rs,sp\n"));
    assert_eq!(text.lines().count(), 26);

    let result = path(dir.path(), "r.json");
    let o = jointloop(&["solve", "--in", &frames, "--out", &result]);
    assert_eq!(o.status.code(), Some(0));
    let doc = read_json(&result);
    for (got, want) in doc["lengths"]
        .as_array()
        .unwrap()
        .iter()
        .zip([2.0, 3.0, 4.0, 1.0])
    {
        assert!((got.as_f64().unwrap() - want).abs() < 1e-8);
    }
    assert_eq!(doc["x"].as_array().unwrap().len(), 19);
    assert_eq!(doc["sq_lengths"].as_array().unwrap().len(), 4);
    assert_eq!(doc["consistency"].as_array().unwrap().len(), 15);
    assert_eq!(doc["per_frame_closure"].as_array().unwrap().len(), 25);
    assert_eq!(doc["rank_deficient"], Value::Bool(false));
    assert!(doc["condition_number"].as_f64().unwrap() > 1.0);
    assert!(doc["residual_norm"].as_f64().unwrap() < 1e-6);
}

#[test]
fn outputs_are_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = simulate(dir.path(), "a.csv", &["--noise", "gauss:0.001"]);
    let b = simulate(dir.path(), "b.csv", &["--noise", "gauss:0.001"]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let ra = path(dir.path(), "ra.json");
    let rb = path(dir.path(), "rb.json");
    jointloop(&["solve", "--in", &a, "--out", &ra]);
    jointloop(&["solve", "--in", &b, "--out", &rb]);
    assert_eq!(std::fs::read(&ra).unwrap(), std::fs::read(&rb).unwrap());

    let sens = |name: &str| {
        let out = path(dir.path(), name);
        let o = jointloop(&[
            "sensitivity",
            "--shape",
            "2,3,4,1",
            "--trials",
            "6",
            "--frames",
            "19,25",
            "--noise",
            "none,round:3",
            "--seed",
            "5",
            "--out",
            &out,
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        std::fs::read(out).unwrap()
    };
    let (sa, sb) = (sens("sa.json"), sens("sb.json"));
    assert_eq!(sa, sb);
    let doc: Value = serde_json::from_slice(&sa).unwrap();
    assert_eq!(doc["cells"].as_array().unwrap().len(), 4);
}

#[test]
fn rounding_noise_writes_three_digit_distances() {
    let dir = tempfile::tempdir().unwrap();
    let frames = simulate(dir.path(), "f.csv", &["--noise", "round:3"]);
    let text = std::fs::read_to_string(frames).unwrap();
    for line in text.lines().skip(1) {
        for v in line.split(',').skip(1) {
            let digits: String = v.chars().filter(char::is_ascii_digit).collect();
            assert!(digits.trim_start_matches('0').len() <= 3, "{v}");
        }
    }
}

#[test]
fn residual_and_depths() {
    let dir = tempfile::tempdir().unwrap();
    let frames = simulate(dir.path(), "f.csv", &[]);
    let o = jointloop(&["residual", "--shape", "2,3,4,1", "--in", &frames]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["consistent"], Value::Bool(true));
    assert_eq!(doc["frames"].as_array().unwrap().len(), 25);

    let o = jointloop(&["residual", "--shape", "2,3,4.2,1", "--in", &frames]);
    assert_eq!(o.status.code(), Some(2));

    let o = jointloop(&[
        "depths", "--shape", "2,3,4,1", "--in", &frames, "--frame", "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let set = doc["assignments"].as_array().unwrap();
    assert!(set.len() >= 2 && set.len() % 2 == 0);

    let o = jointloop(&[
        "depths", "--shape", "2,3,4,1", "--in", &frames, "--frame", "99",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reproduce_paper_prints_checks() {
    let o = jointloop(&["reproduce-paper"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert_eq!(text.matches("[FAIL]").count(), 1);

    let o = jointloop(&["reproduce-paper", "--strict"]);
    assert_eq!(o.status.code(), Some(2));

    let o = jointloop(&[
        "reproduce-paper",
        "--noise",
        "round3",
        "--square-solve",
        "--trials",
        "20",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("[PASS]")), "{text}");
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "x");
    for args in [
        vec![
            "simulate", "--shape", "1,1,1,10", "--frames", "3", "--out", &out,
        ],
        vec![
            "simulate", "--shape", "2,3,4,1", "--frames", "0", "--out", &out,
        ],
        vec![
            "simulate", "--shape", "2,3,x,1", "--frames", "3", "--out", &out,
        ],
        vec![
            "simulate", "--shape", "2,3,4,1", "--frames", "3", "--noise", "round:0", "--out", &out,
        ],
        vec!["solve", "--in", "/nonexistent.csv", "--out", &out],
        vec!["frobnicate"],
    ] {
        let o = jointloop(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn too_few_frames_and_square_mode() {
    let dir = tempfile::tempdir().unwrap();
    let frames = simulate(dir.path(), "f.csv", &[]);
    let out = path(dir.path(), "r.json");
    let o = jointloop(&[
        "solve",
        "--in",
        &frames,
        "--out",
        &out,
        "--min-frames",
        "30",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = jointloop(&["solve", "--in", &frames, "--out", &out, "--square-solve"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn strict_mode_rejects_static_frames() {
    let dir = tempfile::tempdir().unwrap();
    let frames = simulate(dir.path(), "s.csv", &["--motion", "static"]);
    let out = path(dir.path(), "r.json");
    let o = jointloop(&["solve", "--in", &frames, "--out", &out, "--strict"]);
    assert_eq!(o.status.code(), Some(2));
    let o = jointloop(&["solve", "--in", &frames, "--out", &out]);
    assert_ne!(o.status.code(), Some(1));
    assert_eq!(read_json(&out)["rank_deficient"], Value::Bool(true));
}
