//! Shared inputs for the criterion benches.

use std::path::PathBuf;

use veerweave::VeeringTriangulation;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn load(name: &str) -> VeeringTriangulation {
    let path = fixture_dir().join(format!("{name}.vtri"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    VeeringTriangulation::from_vtri(&text).expect("fixture validates")
}
