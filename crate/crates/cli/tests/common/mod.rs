#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_veerweave"))
        .args(args)
        .env("VEERWEAVE_FIXTURES", fixtures())
        .current_dir(data_dir())
        .output()
        .expect("binary runs")
}

pub fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

pub fn json(args: &[&str]) -> (i32, serde_json::Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

/// Weights on sister_five_cusps carrying a ladderpole annulus.
pub const LADDERPOLE_SURFACE: &str = "[1,0,0,0,1,0,0,0,0,1,0,0,0,1,0,1,0,0,1,0]";

/// One invocation of every subcommand on the fixtures.
pub fn every_subcommand() -> Vec<Vec<&'static str>> {
    vec![
        vec!["validate", "f8"],
        vec!["validate", "taut_not_veering"],
        vec!["cusps", "f8_two_cusps"],
        vec!["tubes", "f8", "--tubes", "f8_solid.json"],
        vec!["homology", "f8_cyclic3"],
        vec!["cone", "f8", "--class", "1"],
        vec!["cone", "f8", "--class", "-1"],
        vec!["cone", "f8_two_cusps", "--class", "1,1", "--seed", "7"],
        vec![
            "cone",
            "f8",
            "--class",
            "1",
            "--tubes",
            "f8_solid.json",
            "--ambient",
            "filled",
        ],
        vec!["cone-face", "f8_two_cusps"],
        vec!["norm", "f8", "--class", "1"],
        vec!["norm", "sister_two_cusps", "--class", "1,0"],
        vec!["carry", "f8", "--weights", "[0,0,1,1]"],
        vec!["carry", "f8", "--weights", "[0,0,1,1]", "--tubes", "f8_solid.json"],
        vec!["carry", "sister_five_cusps", "--class", "1,1,0,0,0", "--efficient"],
        vec![
            "carry",
            "sister_five_cusps",
            "--weights",
            LADDERPOLE_SURFACE,
            "--efficient",
        ],
        vec!["flip", "f8", "--weights", "[0,0,1,1]", "--walk", "10"],
        vec!["flip", "f8", "--weights", "[0,0,1,1]", "--tet", "0"],
        vec![
            "transverse",
            "sister_five_cusps",
            "--weights",
            LADDERPOLE_SURFACE,
            "--as-surface",
        ],
        vec!["transverse", "f8", "--class", "1"],
        vec![
            "transverse",
            "sister_five_cusps",
            "--class",
            "1,1,0,0,0",
            "--completion",
            "innermost-minus",
        ],
        vec!["blowup", "--arcs", "six_prong.json", "--dot"],
        vec!["blowup", "--arcs", "annulus_inner.json"],
        vec!["birkhoff", "f8", "--class", "1"],
        vec!["fixtures"],
        vec!["--version"],
    ]
}
