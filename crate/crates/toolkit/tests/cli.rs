use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use morita_core::{group_as_groupoid, identity_bibundle, pair_groupoid, unit_groupoid, GroupTable};
use morita_toolkit::corpus::pair_to_point;
use morita_toolkit::format::{load, save, Object};

fn morita(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morita")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("p2.json");
    save(&Object::Groupoid(Arc::new(pair_groupoid(2))), &good).unwrap();
    let out = morita(&["validate", path(&good)]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("groupoid"));

    let text = std::fs::read_to_string(&good).unwrap().replacen("\"(0,1)\"", "\"(9,9)\"", 1);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, text).unwrap();
    let out = morita(&["validate", path(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("invalid"), "{}", stdout(&out));

    let out = morita(&["--json", "validate", path(&bad)]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ok"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn info_reports_orbits_and_isotropy() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.json");
    let g =
        morita_core::FiniteGroupoid::disjoint_union(&[&pair_groupoid(2), &group_as_groupoid(&GroupTable::cyclic(3))]);
    save(&Object::Groupoid(Arc::new(g)), &file).unwrap();
    let out = morita(&["--json", "info", path(&file)]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["objects"], 3);
    assert_eq!(v["arrows"], 7);
    let orders: Vec<u64> =
        v["orbits"].as_array().unwrap().iter().map(|o| o["isotropy_order"].as_u64().unwrap()).collect();
    assert_eq!(orders.len(), 2);
    assert!(orders.contains(&1) && orders.contains(&3));
    assert_eq!(v["fibrating"], false);
}

#[test]
fn compose_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("c.json"));
    let g = Arc::new(pair_groupoid(2));
    save(&Object::Bibundle(identity_bibundle(&g)), &a).unwrap();
    save(&Object::Bibundle(pair_to_point(2)), &b).unwrap();
    let out = morita(&["compose", path(&a), path(&b), "-o", path(&c)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let Object::Bibundle(composite) = load(&c).unwrap() else { panic!("not a bibundle") };
    assert_eq!(composite.len(), 2);

    let out = morita(&["check", path(&c)]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("biprincipal: true"));

    // The opposite order does not compose.
    let out = morita(&["compose", path(&b), path(&a), "-o", path(&c)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_fails_for_non_biprincipal() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("b.json");
    let z2 = Arc::new(group_as_groupoid(&GroupTable::cyclic(2)));
    let pt = Arc::new(unit_groupoid(1));
    let b = morita_core::Bibundle::from_fns(
        &z2,
        &pt,
        vec!["x".into()],
        vec![morita_core::ObjId(0)],
        vec![morita_core::ObjId(0)],
        |_, x| x,
        |_, x| x,
    )
    .unwrap();
    save(&Object::Bibundle(b), &file).unwrap();
    let out = morita(&["--json", "check", path(&file)]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["left_pre_principal"], false);
    assert_eq!(v["biprincipal"], false);
}

#[test]
fn morita_search_writes_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let (g, h, cert) = (dir.path().join("g.json"), dir.path().join("h.json"), dir.path().join("cert.json"));
    save(&Object::Groupoid(Arc::new(pair_groupoid(2))), &g).unwrap();
    save(&Object::Groupoid(Arc::new(unit_groupoid(1))), &h).unwrap();
    let out = morita(&["morita", path(&g), path(&h), "--budget", "2", "-o", path(&cert)]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("verified"));
    let out = morita(&["info", path(&cert)]);
    assert!(stdout(&out).contains("verifies: true"), "{}", stdout(&out));

    let z2 = dir.path().join("z2.json");
    let trivial = dir.path().join("t.json");
    save(&Object::Groupoid(Arc::new(group_as_groupoid(&GroupTable::cyclic(2)))), &z2).unwrap();
    save(&Object::Groupoid(Arc::new(group_as_groupoid(&GroupTable::trivial()))), &trivial).unwrap();
    let out = morita(&["--json", "morita", path(&z2), path(&trivial), "--budget", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["equivalent"].is_null());
}

#[test]
fn suites_from_the_command_line() {
    let spec = "max_objects=2,max_arrows=2,max_carrier=2,max_bibundle_carrier=2";
    let out = morita(&["suite", "division", "--corpus", spec]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).ends_with("PASS\n"));

    let out = morita(&["--json", "suite", "axioms", "--corpus", spec]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);

    let out = morita(&["suite", "pentagon", "--corpus", spec]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));

    let out = morita(&["suite", "axioms", "--corpus", "max_objects=9,max_arrows=40,max_carrier=9"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn corpus_spec_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("spec.json");
    std::fs::write(&file, r#"{"max_objects": 1, "max_arrows": 2, "max_carrier": 2}"#).unwrap();
    let out = morita(&["suite", "morita-forward", "--corpus", path(&file)]);
    assert!(out.status.success(), "{}", stdout(&out));
}

#[test]
fn missing_reference_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("b.json");
    save(&Object::Bibundle(pair_to_point(2)), &file).unwrap();
    std::fs::remove_file(dir.path().join("b.left.json")).unwrap();
    let out = morita(&["validate", path(&file)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("unresolved reference"), "{}", stdout(&out));
}
