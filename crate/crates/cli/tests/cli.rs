use std::path::Path;
use std::process::Command;

use serde_json::Value;

const TREFOIL: &str = "X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]";

fn khx(args: &[&str]) -> (Value, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_khx")).args(args).arg("--compact").output().expect("khx runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let report: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("bad report {text:?}: {e}"));
    (report, out.status.code().unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn dims(report: &Value) -> Vec<(i64, i64, u64)> {
    report["payload"]["homology"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["i"].as_i64().unwrap(), r["j"].as_i64().unwrap(), r["dim"].as_u64().unwrap()))
        .collect()
}

fn strip_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings_ms");
    v
}

fn failed_checks(report: &Value) -> Vec<&Value> {
    report["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect()
}

#[test]
fn unknot_homology() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "u.pd", "U\n");
    let (r, code) = khx(&["kh", &f]);
    assert_eq!(code, 0);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(dims(&r), vec![(0, -1, 1), (0, 1, 1)]);
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn trefoil_over_both_rings() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "t.pd", TREFOIL);
    let (r, code) = khx(&["kh", &f, "--ring", "f2"]);
    assert_eq!(code, 0);
    assert_eq!(r["payload"]["total_dim"], 6);
    let (z, code) = khx(&["kh", &f, "--ring", "z"]);
    assert_eq!(code, 0);
    let twos: Vec<&Value> = z["payload"]["homology"].as_array().unwrap().iter().filter(|g| g["factors"].as_array().unwrap().contains(&"2".into())).collect();
    assert_eq!(twos.len(), 1);
    assert_eq!((twos[0]["i"].as_i64(), twos[0]["j"].as_i64()), (Some(-2), Some(-7)));
    let (red, _) = khx(&["kh", &f, "--reduced"]);
    assert_eq!(red["payload"]["basepoint"], 1);
    assert_eq!(red["payload"]["total_dim"], 3);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "t.pd", TREFOIL);
    let (a, _) = khx(&["kh", &f, "--ring", "z"]);
    let (b, _) = khx(&["kh", &f, "--ring", "z"]);
    assert_eq!(strip_timings(a), strip_timings(b));
    let single = Command::new(env!("CARGO_BIN_EXE_khx")).args(["kh", &f]).env("KH_THREADS", "1").output().unwrap();
    let (c, _) = khx(&["kh", &f]);
    let single: Value = serde_json::from_slice(&single.stdout).unwrap();
    let mut c = strip_timings(c);
    let mut single = strip_timings(single);
    // only the echoed flags differ
    c["command"] = Value::Null;
    single["command"] = Value::Null;
    assert_eq!(c, single);
}

#[test]
fn empty_movie_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "m.jsonl", &format!("{{\"start\":\"{TREFOIL}\"}}\n"));
    let (r, code) = khx(&["map", &f]);
    assert_eq!(code, 0);
    let m = &r["payload"]["map"];
    assert_eq!(m["identity"], true);
    assert_eq!(m["injective"], true);
    assert_eq!(m["blocks"].as_array().unwrap().len(), 6);
}

#[test]
fn companion_bundle_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b2");
    let (c, code) = khx(&["construct", "--n", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(c["payload"]["companion"]["crossings"], 8);
    assert_eq!(c["payload"]["composite"]["crossings"], 6);
    for name in ["composite.pd", "companion.pd", "movie.jsonl", "bundle.json"] {
        assert!(out.join(name).exists(), "{name}");
    }
    let movie = out.join("movie.jsonl");
    let (m, code) = khx(&["map", movie.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(m["payload"]["map"]["injective"], true);
    assert_eq!(m["payload"]["ribbon"], true);
    let (red, code) = khx(&["map", movie.to_str().unwrap(), "--reduced"]);
    assert_eq!(code, 0);
    assert_eq!(red["payload"]["map"]["injective"], true);

    // the bundled movie run backwards
    let mv = kh_core::movie::Movie::from_jsonl(&std::fs::read_to_string(&movie).unwrap()).unwrap();
    let back = write(dir.path(), "back.jsonl", &mv.reverse().unwrap().to_jsonl());
    let (b, code) = khx(&["map", &back]);
    assert_eq!(code, 0);
    assert_eq!(b["payload"]["map"]["surjective"], true);
    assert_eq!(b["payload"]["ribbon"], false);
}

#[test]
fn verify_suites_pass_on_bundle_and_knot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b2");
    khx(&["construct", "--n", "2", "--out", out.to_str().unwrap()]);
    for suite in ["ribbon", "steenrod", "shumakovitch"] {
        let (r, code) = khx(&["verify", suite, out.to_str().unwrap()]);
        assert_eq!(code, 0, "{suite}: {:?}", failed_checks(&r));
        assert!(!r["checks"].as_array().unwrap().is_empty());
    }
    let f = write(dir.path(), "t.pd", TREFOIL);
    let (r, code) = khx(&["verify", "all", &f]);
    assert_eq!(code, 0, "{:?}", failed_checks(&r));
}

#[test]
fn failed_checks_exit_one_and_name_a_location() {
    let dir = tempfile::tempdir().unwrap();
    // a lone birth: its reverse is a death and the round trip is a sphere, so zero
    let f = write(dir.path(), "cap.jsonl", "{\"start\":\"X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]\"}\n{\"move\":\"birth\",\"new_edges\":[7]}\n");
    let (r, code) = khx(&["verify", "ribbon", &f]);
    assert_eq!(code, 1);
    let failed = failed_checks(&r);
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| c.get("bidegree").is_some() || c.get("move_index").is_some()), "{failed:?}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let parse = write(dir.path(), "p.pd", "X[1,2,3]");
    assert_eq!(khx(&["kh", &parse]).1, 2);
    let dangling = write(dir.path(), "v.pd", "X[1,2,3,5]");
    let (r, code) = khx(&["kh", &dangling]);
    assert_eq!(code, 3);
    assert_eq!(r["error"]["kind"], "validation");
    let t = write(dir.path(), "t.pd", TREFOIL);
    assert_eq!(khx(&["kh", &t, "--bp", "99"]).1, 3);
    let bad_move = write(dir.path(), "m.jsonl", &format!("{{\"start\":\"{TREFOIL}\"}}\n{{\"move\":\"death\",\"edges\":[2]}}\n"));
    let (r, code) = khx(&["map", &bad_move]);
    assert_eq!(code, 4);
    assert_eq!(r["error"]["move_index"], 0);
    let touched = write(dir.path(), "bp.jsonl", &format!("{{\"start\":\"{TREFOIL};bp=3\"}}\n{{\"move\":\"r1_pos\",\"edges\":[3],\"new_edges\":[7,8,9],\"over_first\":true}}\n"));
    assert_eq!(khx(&["map", &touched]).1, 4);
    assert_eq!(khx(&["kh", dir.path().join("missing.pd").to_str().unwrap()]).1, 2);
}

#[test]
fn reversed_ribbon_movie_is_onto_but_not_injective() {
    let dir = tempfile::tempdir().unwrap();
    let mv = kh_core::constructions::square_knot_ribbon_movie();
    let fwd = write(dir.path(), "fwd.jsonl", &mv.to_jsonl());
    let back = write(dir.path(), "back.jsonl", &mv.reverse().unwrap().to_jsonl());
    let (f, code) = khx(&["map", &fwd]);
    assert_eq!(code, 0);
    assert_eq!((&f["payload"]["map"]["injective"], &f["payload"]["map"]["surjective"]), (&true.into(), &false.into()));
    let (b, code) = khx(&["map", &back]);
    assert_eq!(code, 0);
    let m = &b["payload"]["map"];
    assert_eq!((&m["injective"], &m["surjective"]), (&false.into(), &true.into()));
    assert!(m["kernel_at"].is_array());
    let (r, code) = khx(&["verify", "ribbon", &fwd]);
    assert_eq!(code, 0, "{:?}", failed_checks(&r));
}
