mod common;

use common::{code, json, run, LADDERPOLE_SURFACE};
use serde_json::Value;

#[test]
fn exit_codes() {
    assert_eq!(code(&["validate", "f8"]), 0);
    assert_eq!(code(&["validate", "taut_not_veering"]), 2);
    assert_eq!(code(&["validate", "no_such_file"]), 1);
    assert_eq!(code(&["validate", "six_prong.json"]), 1);
    assert_eq!(code(&["cone", "f8", "--class", "1"]), 0);
    assert_eq!(code(&["cone", "f8", "--class", "-1"]), 2);
    assert_eq!(code(&["cone", "f8", "--class", "1,1"]), 1);
    assert_eq!(code(&["cone", "f8", "--class", "1", "--weights", "[0,0,1,1]"]), 1);
    assert_eq!(code(&["cone", "f8", "--weights", "[1,0,0,0]"]), 1);
    assert_eq!(code(&["norm", "f8", "--class", "-1"]), 2);
    assert_eq!(code(&["transverse", "f8", "--class", "-1"]), 2);
    assert_eq!(code(&["birkhoff", "f8", "--class", "-1"]), 2);
    assert_eq!(code(&["flip", "f8", "--weights", "[0,0,1,1]", "--tet", "1"]), 1);
    assert_eq!(code(&["flip", "f8", "--weights", "[0,0,1,1]"]), 1);
    assert_eq!(code(&["blowup", "--arcs", "incoherent.json"]), 1);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["cone", "f8", "--class", "1", "--ambient", "sideways"]), 1);
}

#[test]
fn errors_are_reported_as_json() {
    let (c, v) = json(&["cone", "f8", "--class", "x"]);
    assert_eq!(c, 1);
    assert!(v["error"].as_str().unwrap().contains("bad class coordinate"));
    let out = run(&["cone", "f8", "--class", "x"]);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn validate_json() {
    let (c, v) = json(&["validate", "f8"]);
    assert_eq!(c, 0);
    assert_eq!(v["valid"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 7);
    let (c, v) = json(&["validate", "taut_not_veering"]);
    assert_eq!(c, 2);
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec!["veer_colorability"]);
}

#[test]
fn homology_basis_round_trips_through_cone() {
    let (_, h) = json(&["homology", "f8_two_cusps"]);
    assert_eq!(h["betti_1"], 2);
    for (k, b) in h["basis"].as_array().unwrap().iter().enumerate() {
        let weights = b.to_string();
        let (c1, by_weights) = json(&["cone", "f8_two_cusps", "--weights", &weights]);
        let coords = if k == 0 { "1,0" } else { "0,1" };
        let (c2, by_class) = json(&["cone", "f8_two_cusps", "--class", coords]);
        assert_eq!(c1, c2);
        assert_eq!(by_weights["verdict"], by_class["verdict"]);
        if by_class["verdict"] == "member" {
            // The witness is itself a carried surface of the class.
            let w = by_class["witness"]["weights"].to_string();
            let (c, again) = json(&["cone", "f8_two_cusps", "--weights", &w]);
            assert_eq!(c, 0);
            assert_eq!(again["witness"]["weights"], by_class["witness"]["weights"]);
            let (c, surf) = json(&["carry", "f8_two_cusps", "--weights", &w]);
            assert_eq!(c, 0);
            assert_eq!(surf["weights"], by_class["witness"]["weights"]);
        }
    }
}

#[test]
fn figure_eight_values() {
    let (_, n) = json(&["norm", "f8", "--class", "1"]);
    assert_eq!(n["value"], "1");
    assert_eq!(n["certificate"]["total_weight"], 2);
    let (_, half) = json(&["norm", "f8", "--class", "1/2"]);
    assert_eq!(half["value"], "1/2");
    let (_, cone) = json(&["cone", "f8", "--class", "-1"]);
    assert_eq!(cone["verdict"], "non_member");
    assert!(cone["witness"]["pairing"].as_i64().unwrap() < 0);
    let (_, walk) = json(&["flip", "f8", "--weights", "[0,0,1,1]", "--walk", "10"]);
    assert_eq!(walk["cycle_start"], 0);
    let (_, flip) = json(&["flip", "f8", "--weights", "[0,0,1,1]", "--tet", "0"]);
    assert_eq!(flip["same_class"], true);
    assert_eq!(flip["restrictions_equal"], true);
    let (_, tubes) = json(&["tubes", "f8", "--tubes", "f8_solid.json"]);
    assert_eq!(tubes["cusps"][0]["prongs"], 2);
    assert_eq!(tubes["strict"], false);
    let (_, solid) = json(&["carry", "f8", "--weights", "[0,0,1,1]", "--tubes", "f8_solid.json"]);
    assert_eq!(solid["euler_char"], 0);
    let (_, face) = json(&["cone-face", "f8_two_cusps"]);
    assert_eq!(face["extreme_rays"], serde_json::json!([[2, -1], [2, 1]]));
    let (c, filled) = json(&[
        "cone",
        "f8",
        "--class",
        "1",
        "--tubes",
        "f8_solid.json",
        "--ambient",
        "filled",
    ]);
    assert_eq!((c, filled["verdict"].as_str()), (0, Some("member")));
}

#[test]
fn efficient_carry_and_surface_reports() {
    let (_, before) = json(&["carry", "sister_five_cusps", "--weights", LADDERPOLE_SURFACE]);
    let pairs = |v: &Value| -> i64 {
        v["cusps"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["ladderpole_pairs"].as_i64().unwrap())
            .sum()
    };
    assert!(pairs(&before) > 0);
    let (_, after) = json(&[
        "carry",
        "sister_five_cusps",
        "--weights",
        LADDERPOLE_SURFACE,
        "--efficient",
    ]);
    assert_eq!(pairs(&after), 0);
    assert!(!after["annulus_moves"].as_array().unwrap().is_empty());
    assert_eq!(after["euler_char"], before["euler_char"]);
    let (c, r) = json(&[
        "transverse",
        "sister_five_cusps",
        "--weights",
        LADDERPOLE_SURFACE,
        "--as-surface",
    ]);
    assert_eq!(c, 0);
    assert_eq!(r["verdict"], "honest");
    let before_pairs: i64 = r["tubes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["pairs_before"].as_i64().unwrap())
        .sum();
    assert!(before_pairs > 0);
}

#[test]
fn blowup_json() {
    let (c, g) = json(&["blowup", "--arcs", "six_prong.json", "--dot"]);
    assert_eq!(c, 0);
    assert_eq!(g["kind"], "tree");
    assert_eq!(g["vertices"].as_array().unwrap().len(), 2);
    assert_eq!(g["edges"].as_array().unwrap().len(), 1);
    assert!(g["dot"].as_str().unwrap().starts_with("digraph"));
    let (_, g) = json(&["blowup", "--arcs", "adjacent.json"]);
    assert_eq!(g["needs_blowup"], false);
    let (_, g) = json(&["blowup", "--arcs", "annulus_inner.json"]);
    assert_eq!(g["kind"], "circle_graph");
    let text = String::from_utf8(run(&["blowup", "--arcs", "adjacent.json"]).stdout).unwrap();
    assert!(text.starts_with("no blowup is necessary"));
}

#[test]
fn every_subcommand_emits_json() {
    for args in common::every_subcommand() {
        if args == ["--version"] {
            continue;
        }
        let (c, _) = json(&args);
        assert!(c == 0 || c == 2, "{args:?} exited {c}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in common::every_subcommand() {
        for json in [false, true] {
            let mut full: Vec<&str> = if json { vec!["--json"] } else { vec![] };
            full.extend(&args);
            let a = run(&full);
            let b = run(&full);
            assert_eq!(a.stdout, b.stdout, "{full:?}");
            assert_eq!(a.status, b.status, "{full:?}");
            assert!(!a.stdout.is_empty(), "{full:?}");
        }
    }
}
