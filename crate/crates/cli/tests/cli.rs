use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn minsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minsurf")).args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn strip_files(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let s3 = dir.join("strip.json");
    let s5 = dir.join("strip_bipolar.json");
    assert!(minsurf(&["catalog", "lawson-2-1-strip", "--grid", "64x64", "--output", p(&s3)]).status.success());
    let out = minsurf(&["bipolar", "--input", p(&s3), "--output", p(&s5)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    (s3, s5)
}

#[test]
fn catalog_bipolar_check_pipeline_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (s3, s5) = strip_files(dir.path());
    for f in [&s3, &s5] {
        let out = minsurf(&["check", "--input", p(f)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (_, s5) = strip_files(dir.path());
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for r in [&a, &b] {
        assert!(minsurf(&["analyze", "--input", p(&s5), "--output", p(r)]).status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn corrupted_surface_fails_the_check_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let (_, s5) = strip_files(dir.path());
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&s5).unwrap()).unwrap();
    // Push one interior row off the sphere.
    let row = &mut v["values"][64 * 32 + 32];
    for c in row.as_array_mut().unwrap() {
        *c = serde_json::json!(c.as_f64().unwrap() * 1.05);
    }
    let bad = dir.path().join("bad.json");
    fs::write(&bad, v.to_string()).unwrap();
    let out = minsurf(&["check", "--input", p(&bad)]);
    assert_ne!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("norm"), "{text}");

    // A bump that stays on the sphere but breaks minimality.
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&s5).unwrap()).unwrap();
    for i in 28..36 {
        for j in 28..36 {
            let row = v["values"][64 * i + j].as_array_mut().unwrap();
            let mut x: Vec<f64> = row.iter().map(|c| c.as_f64().unwrap()).collect();
            x[0] += 0.02;
            let n = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            *row = x.iter().map(|c| serde_json::json!(c / n)).collect();
        }
    }
    let bumped = dir.path().join("bumped.json");
    fs::write(&bumped, v.to_string()).unwrap();
    let out = minsurf(&["check", "--input", p(&bumped)]);
    assert_eq!(out.status.code(), Some(1));
    let text = format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
    assert!(text.contains("check failed:"), "{text}");
}

#[test]
fn transform_steps_writes_each_surface() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.json");
    assert!(minsurf(&["catalog", "flat-torus", "--grid", "32x32", "--output", p(&flat)]).status.success());
    let seq = dir.path().join("seq");
    let out = minsurf(&["transform", "--input", p(&flat), "--steps", "-2..2", "--output", p(&seq)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for k in -2..=2 {
        assert!(seq.join(format!("f_{k}.json")).exists(), "missing f_{k}");
    }
}

#[test]
fn export_formats() {
    let dir = tempfile::tempdir().unwrap();
    let (_, s5) = strip_files(dir.path());
    let obj = dir.path().join("m.obj");
    assert!(minsurf(&["export", "--input", p(&s5), "--export", "obj", "--output", p(&obj)]).status.success());
    let mesh = fs::read_to_string(&obj).unwrap();
    assert_eq!(mesh.lines().filter(|l| l.starts_with("v ")).count(), 4096);
    // The strip is open in y.
    assert_eq!(mesh.lines().filter(|l| l.starts_with("f ")).count(), 64 * 63);
    let csv = dir.path().join("m.csv");
    assert!(minsurf(&["export", "--input", p(&s5), "--export", "csv", "--output", p(&csv)]).status.success());
    assert_eq!(minsurf(&["check", "--input", p(&csv)]).status.code(), Some(0));
    let out = minsurf(&["export", "--input", p(&s5), "--export", "ply", "--output", p(&dir.path().join("m.ply"))]);
    assert!(!out.status.success());
}

#[test]
fn rejections() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    assert!(!minsurf(&["catalog", "lawson-2-4", "--output", p(&out)]).status.success());
    assert!(!minsurf(&["catalog", "clifford", "--grid", "8x8", "--output", p(&out)]).status.success());
    assert!(minsurf(&["catalog", "clifford", "--grid", "32x32", "--output", p(&out)]).status.success());
    let bip = dir.path().join("b.json");
    let r = minsurf(&["bipolar", "--input", p(&out), "--output", p(&bip)]);
    assert!(!r.status.success());
    assert!(!minsurf(&["analyze", "--input", p(&out), "--order", "3"]).status.success());
}

#[test]
fn convergence_suite_passes() {
    let out = minsurf(&["check", "--convergence", "--suite", "9", "--grid", "64x64"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
