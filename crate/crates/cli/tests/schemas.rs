//! Command output validates against the schemas shipped in `schemas/`.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn schema(name: &str) -> jsonschema::Validator {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.schema.json"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    jsonschema::validator_for(&v).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn assert_valid(name: &str, doc: &Value) {
    let v = schema(name);
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{name}: {errors:#?}\n{doc:#}");
}

fn gou_json(args: &[&str]) -> Value {
    let o = Command::new(env!("CARGO_BIN_EXE_gou")).args(args).output().unwrap();
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

const SPECS: [&str; 5] = [
    r#"{"preset":"continuous_example","c":0}"#,
    r#"{"preset":"jump_example","c":1,"lambda":1}"#,
    r#"{"gamma_tilde":[0,1],"sigma":[[1,0],[0,1]]}"#,
    r#"{"gamma_tilde":[0.5,-1],"sigma":[[0,0],[0,0]],"jumps":{"atoms":[{"x":-1,"y":5,"rate":2},{"x":0.5,"y":0.2,"rate":1}]}}"#,
    r#"{"gamma_tilde":[0,0],"sigma":[[0,0],[0,0]],"jumps":{"density":{"kind":"exp_tails","params":{"scale":1,"rate_x":2,"rate_y":2},"box":[0.1,3,0.1,3],"tol":1e-9}}}"#,
];

#[test]
fn specs_and_check_output() {
    for s in SPECS {
        let spec: Value = serde_json::from_str(s).unwrap();
        if gou_cli::ProcessSpec::from_json(s).is_err() {
            continue;
        }
        assert_valid("process_spec", &spec);
        let out = gou_json(&["check", s, "--delta-at", "-1,0.5,3"]);
        assert_valid("check_output", &out);
        assert_valid("process_spec", &out["spec"]);
    }
}

#[test]
fn schema_rejects_bad_specs() {
    let v = schema("process_spec");
    for bad in [
        r#"{"preset":"jump_example","c":1}"#,
        r#"{"preset":"continuous_example","c":0,"extra":1}"#,
        r#"{"gamma_tilde":[0],"sigma":[[0,0],[0,0]]}"#,
        r#"{"gamma_tilde":[0,0],"sigma":[[0,0],[0,0]],"jumps":{"atoms":[{"x":1,"y":1,"rate":0}]}}"#,
    ] {
        assert!(!v.is_valid(&serde_json::from_str(bad).unwrap()), "{bad}");
    }
}

#[test]
fn estimate_output() {
    let bm = r#"{"gamma_tilde":[0,0],"sigma":[[0,0],[0,1]]}"#;
    let drift = r#"{"gamma_tilde":[1,0],"sigma":[[0,0],[0,1]]}"#;
    let jump = SPECS[1];
    let small = ["--horizon", "2", "--step", "0.01", "--paths", "200"];
    for (spec, what, z) in [(bm, "negprob", None), (jump, "ruin", Some("0.5,2")), (drift, "zinf", None), (drift, "theorem3", Some("0,0.5"))] {
        let mut args = vec!["estimate", spec, "--what", what];
        if let Some(z) = z {
            args.extend(["--z", z]);
        }
        args.extend(small);
        assert_valid("estimate_output", &gou_json(&args));
    }
}

#[test]
fn manifest_and_validation_report() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().to_str().unwrap();
    let m = gou_json(&["simulate", SPECS[0], "--z", "1", "--horizon", "1", "--step", "0.1", "--paths", "2", "--out", out]);
    assert_valid("simulate_manifest", &m);

    let json = d.path().join("report.json");
    let o = Command::new(env!("CARGO_BIN_EXE_gou"))
        .args(["validate", "--suite", "exact", "--json", json.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_valid("validation_report", &r);
}
