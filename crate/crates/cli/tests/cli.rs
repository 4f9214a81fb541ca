use rotelast::fieldio::{read_field, AnyField};
use std::path::Path;
use std::process::{Command, Output};

fn rotelast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotelast")).args(args).output().unwrap()
}

#[test]
fn material_json_report() {
    let out = rotelast(&["material", "--c1", "5", "--c2", "1", "--c3", "1", "--rho", "1", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let obj = v.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["boundary_flag", "class", "lambda", "mu", "nu", "sigma", "v_l", "v_t", "youngs_modulus"]);
    for k in ["lambda", "mu", "nu", "sigma", "v_l", "v_t", "youngs_modulus"] {
        assert!(obj[k].is_f64(), "{k}");
    }
    assert_eq!(obj["class"], "ordinary");
    assert_eq!(obj["boundary_flag"], false);
    assert!((obj["sigma"].as_f64().unwrap() - 0.125).abs() < 1e-15);
    assert!((obj["youngs_modulus"].as_f64().unwrap() - 9.0).abs() < 1e-14);
    assert!((obj["nu"].as_f64().unwrap() - (3.0f64 / 7.0).sqrt()).abs() < 1e-15);
    let again = rotelast(&["material", "--c1", "5", "--c2", "1", "--c3", "1", "--rho", "1", "--json"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn auxetic_and_boundary_classes() {
    let out = rotelast(&["material", "--c1", "3", "--c2", "1", "--c3", "1", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["class"], "auxetic");
    // c1 = 3 c2 + c3 sits on the ordinary/auxetic border.
    let out = rotelast(&["material", "--c1", "4", "--c2", "1", "--c3", "1", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["boundary_flag"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(rotelast(&["material", "--bogus"]).status.code(), Some(2));
    assert_eq!(rotelast(&["material", "-c", "1"]).status.code(), Some(2));
    assert_eq!(rotelast(&["frobnicate"]).status.code(), Some(2));
    let help = rotelast(&["validate", "--suite", "nope"]);
    assert_eq!(help.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&help.stderr).contains("possible values"));
    // Singular moduli and non-positive moduli are rejected at run time.
    assert_eq!(rotelast(&["material", "--c1", "1", "--c2", "1", "--c3", "1"]).status.code(), Some(1));
    assert_eq!(rotelast(&["material", "--c1=-1"]).status.code(), Some(1));
    // An unreachable tolerance is a validation failure.
    let out = rotelast(&["gradcheck", "--grid", "6", "--tolerance", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_rotelast"))
        .env("ROTELAST_THREADS", "zero")
        .args(["material"])
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn validate_identities_suite() {
    let out = Command::new(env!("CARGO_BIN_EXE_rotelast"))
        .env("ROTELAST_THREADS", "2")
        .args(["validate", "--suite", "identities", "--grid", "16", "--seed", "7"])
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("reduction factor"));
    assert!(text.trim_end().ends_with("PASS"));
}

fn dump_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn simulate_dumps_are_reproducible_and_readable() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let dir = tmp.path().join(name);
        let out = rotelast(&[
            "simulate", "--mode", "longitudinal", "--nodes", "64", "--steps", "40", "--saves", "3", "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        dir
    };
    let (a, b) = (run("a"), run("b"));
    let files = dump_dir(&a);
    assert_eq!(files, dump_dir(&b));
    let names: Vec<&str> = files.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(names, ["energy.csv", "snapshot_0000.csv", "snapshot_0001.csv", "snapshot_0002.csv"]);
    let field = read_field(files[1].1.as_slice()).unwrap();
    assert_eq!(field.grid().dims(), [1, 1, 64]);
    assert!(matches!(field, AnyField::Scalar(_)));
    let energy = String::from_utf8(files[0].1.clone()).unwrap();
    assert_eq!(energy.lines().count(), 4);
}

#[test]
fn render_planar_dump() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("sim");
    let out = rotelast(&[
        "simulate", "--initial", "radial", "--nodes", "21", "--spacing", "0.5", "--steps", "4", "--saves", "2",
        "--out", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = tmp.path().join("a.svg");
    let out = rotelast(&[
        "render", "--input", dir.join("snapshot_0000.csv").to_str().unwrap(), "--output", svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<use ").count(), 441);
    // The centre node carries the half turn.
    assert!(text.contains("rotate(-180.0000)"));
    let longitudinal = tmp.path().join("line");
    rotelast(&["simulate", "--mode", "longitudinal", "--nodes", "16", "--steps", "2", "--saves", "2", "--out", longitudinal.to_str().unwrap()]);
    let out = rotelast(&[
        "render", "--input", longitudinal.join("snapshot_0000.csv").to_str().unwrap(), "--output", svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}
