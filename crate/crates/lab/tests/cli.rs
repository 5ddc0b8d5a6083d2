use std::path::Path;
use std::process::{Command, Output};

use randers_core::metric::random_polynomial_metric;
use randers_core::sampling::SplitMix64;
use randers_lab::metric_file::write_metric_file;
use serde_json::Value;

const SPHERE: &str = r#"dim = 3
note = "round unit sphere"

[alpha]
a11 = "1/(1 + (x1^2+x2^2+x3^2)/4)^2"
a22 = "1/(1 + (x1^2+x2^2+x3^2)/4)^2"
a33 = "1/(1 + (x1^2+x2^2+x3^2)/4)^2"
"#;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_randers-lab"))
        .args(args)
        .env_remove("RANDERS_LAB_THREADS")
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--json", "-", "--quiet"]);
    let out = lab(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text} {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn check(doc: &Value, name: &str) -> Value {
    doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))
        .clone()
}

#[test]
fn report_example_s_curvature() {
    let (code, doc) = json(&["report", "--builtin", "example_1_1", "--param", "n=2", "--param", "a=1,0", "--at", "x=0.3,0.4;y=1,0.5"]);
    assert_eq!(code, 0);
    let r = &doc["reports"][0];
    assert!((f(&r["s_over_f"]) - 0.9).abs() < 1e-8);
    assert!((f(&r["isotropic_c"]) - 0.3).abs() < 1e-12);
    assert!((f(&r["isotropic_c_alternate"]) - 0.9).abs() < 1e-12);
}

#[test]
fn report_minkowski_is_flat() {
    let (code, doc) = json(&["report", "--builtin", "minkowski_randers", "--param", "b=0.3,0", "--at", "x=0.5,-1;y=0.2,1"]);
    assert_eq!(code, 0);
    let r = &doc["reports"][0];
    for k in ["ricci", "ricci_def", "r_closed", "r_semi", "r_def", "s_curvature"] {
        assert!(f(&r[k]).abs() < 1e-12, "{k}");
    }
}

#[test]
fn report_sphere_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "sphere.fmt", SPHERE);
    let (code, doc) = json(&["report", "--metric", &path, "--at", "x=0.2,-0.1,0.4;y=1,2,-0.5"]);
    assert_eq!(code, 0);
    let r = &doc["reports"][0];
    for k in ["r_closed", "r_semi", "r_def"] {
        assert!((f(&r[k]) - 6.0).abs() < 1e-6, "{k}");
    }
    assert_eq!(doc["metric"]["kind"], "file");
}

#[test]
fn verify_example_and_funk() {
    let (code, doc) = json(&["verify", "--builtin", "example_1_1", "--param", "a=1,0", "--samples", "50", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(doc["passed"], true);
    assert_eq!(check(&doc, "scalar_published")["status"], "explained");
    assert_eq!(doc["samples"].as_array().unwrap().len(), 50);

    let (code, doc) = json(&["verify", "--builtin", "funk", "--samples", "10"]);
    assert_eq!(code, 0);
    for c in doc["classification"].as_array().unwrap() {
        let e = &c["weak_einstein"];
        assert_eq!(e["verdict"], "holds");
        assert!((f(&e["mu"]) + 0.25).abs() < 1e-8);
    }
}

#[test]
fn verify_random_metric_file() {
    let dir = tempfile::tempdir().unwrap();
    let metric = random_polynomial_metric(3, &mut SplitMix64::new(99)).unwrap();
    let path = write(dir.path(), "random-poly.fmt", &write_metric_file(&metric));
    let (code, doc) = json(&["verify", "--metric", &path, "--samples", "20"]);
    assert_eq!(code, 0);
    for name in ["ricci_routes", "scalar_semi", "scalar_closed"] {
        assert!(f(&check(&doc, name)["max_error"]) < 1e-6);
    }
}

#[test]
fn classify_examples() {
    let (code, doc) = json(&["classify", "--builtin", "example_1_1", "--param", "a=1,0", "--grid", "x1=-0.4:0.4:3,x2=-0.4:0.4:3"]);
    assert_eq!(code, 0);
    for c in doc["classification"].as_array().unwrap() {
        assert_eq!(c["isotropic_s"]["verdict"], "holds");
        assert!((f(&c["isotropic_s"]["c"]) - f(&c["x"][0])).abs() < 1e-12);
    }
    assert_eq!(doc["implication"]["confirmed"], 9);

    let (code, doc) = json(&["classify", "--builtin", "conformal_minkowski", "--param", "b=0.3,0", "--param", "sigma=0.2*x1", "--grid", "x1=-0.5:0.5:3,x2=-0.5:0.5:3"]);
    assert_eq!(code, 0);
    for c in doc["classification"].as_array().unwrap() {
        assert_eq!(c["weakly_isotropic_r"]["verdict"], "fails");
        assert_eq!(c["implication"], "antecedent false");
    }

    let (code, doc) = json(&["classify", "--builtin", "sphere_alpha", "--at", "x=0.3,0.1"]);
    assert_eq!(code, 0);
    let r = &doc["classification"][0]["weakly_isotropic_r"];
    assert_eq!(r["verdict"], "holds");
    assert!(r["theta"].as_array().unwrap().iter().all(|t| f(t).abs() < 1e-8));
}

#[test]
fn classify_skips_inadmissible_points() {
    let (code, doc) = json(&["classify", "--builtin", "funk", "--grid", "x1=0:1.5:2"]);
    assert_eq!(code, 0);
    let pts = doc["classification"].as_array().unwrap();
    assert!(pts[0].get("error").is_none());
    assert!(pts[1]["error"].is_string());
    assert_eq!(doc["implication"]["evaluated"], 1);
}

fn strip_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--builtin", "example_1_1", "--param", "a=0.6,-0.3,0.2", "--samples", "8", "--seed", "3", "--json", "-", "--quiet"];
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_randers-lab"))
            .args(args)
            .env("RANDERS_LAB_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        serde_json::to_string(&strip_timings(v)).unwrap()
    };
    let a = run("1");
    assert_eq!(a, run("1"));
    assert_eq!(a, run("4"));
    let text = String::from_utf8(lab(&args).stdout).unwrap();
    let first = text.find("\"tool\"").unwrap();
    assert!(first < text.find("\"metric\"").unwrap() && text.find("\"checks\"").unwrap() < text.find("\"timings\"").unwrap());
}

#[test]
fn json_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = lab(&["report", "--builtin", "funk", "--at", "x=0.1,0.2;y=1,0", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("all checks passed"));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["command"], "report");
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| lab(args).status.code().unwrap();
    assert_eq!(code(&["report", "--builtin", "funk", "--at", "x=0.1,0.2;y=1,0", "--quiet"]), 0);
    assert_eq!(code(&["report", "--builtin", "funk", "--at", "x=0.1,0.2;y=1,0", "--tol", "1e-300", "--quiet"]), 1);
    assert_eq!(code(&["report", "--builtin", "nope", "--at", "x=0.1,0.2;y=1,0"]), 2);
    assert_eq!(code(&["report", "--builtin", "funk", "--at", "x=0.1;y=1,0"]), 2);
    assert_eq!(code(&["report", "--builtin", "funk", "--at", "x=2,0;y=1,0"]), 2);
    assert_eq!(code(&["report", "--builtin", "funk"]), 2);
    assert_eq!(code(&["report", "--metric", "/nonexistent/metric.fmt", "--at", "x=0,0;y=1,0"]), 2);
    assert_eq!(code(&["report", "--metric", "a.fmt", "--builtin", "funk"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["classify", "--builtin", "funk", "--samples", "3"]), 2);
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_randers-lab"))
        .args(["classify", "--builtin", "funk"])
        .env("RANDERS_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}
