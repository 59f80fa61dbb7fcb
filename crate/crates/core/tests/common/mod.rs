#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use veerweave::flowgraph::cone_membership;
use veerweave::homology::{homology_summary, Cocycle};
use veerweave::tri::edge_fans;
use veerweave::{ConeCertificate, VeeringTriangulation};

/// Every valid fixture, smallest first.
pub const FIXTURES: &[&str] = &[
    "f8",
    "f8_sister",
    "f8_two_cusps",
    "sister_two_cusps",
    "f8_cyclic2",
    "f8_cyclic3",
    "sister_five_cusps",
];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.vtri"))
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).expect("fixture readable")
}

pub fn load(name: &str) -> VeeringTriangulation {
    VeeringTriangulation::from_vtri(&read(name)).expect("fixture is veering")
}

/// Fan sums computed straight from the fan lists: `Some(W)` when both fans
/// agree at every edge.
pub fn fan_sums(tri: &VeeringTriangulation, w: &[i64]) -> Option<Vec<i64>> {
    (0..tri.num_edges())
        .map(|e| {
            let (a, b) = edge_fans(tri, e);
            let sa: i64 = a.iter().map(|&f| w[f]).sum();
            let sb: i64 = b.iter().map(|&f| w[f]).sum();
            (sa == sb).then_some(sa)
        })
        .collect()
}

/// Directed simple cycles of the dual graph as face lists, by plain DFS from
/// each least vertex. Independent of the library's enumerator.
pub fn naive_cycles(tri: &VeeringTriangulation) -> Vec<Vec<usize>> {
    let n = tri.num_tets();
    let mut out_faces: Vec<Vec<usize>> = vec![Vec::new(); n];
    for f in 0..tri.num_faces() {
        out_faces[tri.below(f)].push(f);
    }
    let mut cycles = Vec::new();
    for s in 0..n {
        let mut path = Vec::new();
        let mut on = vec![false; n];
        dfs(tri, &out_faces, s, s, &mut on, &mut path, &mut cycles);
    }
    cycles
}

fn dfs(
    tri: &VeeringTriangulation,
    out: &[Vec<usize>],
    s: usize,
    v: usize,
    on: &mut Vec<bool>,
    path: &mut Vec<usize>,
    cycles: &mut Vec<Vec<usize>>,
) {
    on[v] = true;
    for &f in &out[v] {
        let u = tri.above(f);
        path.push(f);
        if u == s {
            cycles.push(path.clone());
        } else if u > s && !on[u] {
            dfs(tri, out, s, u, on, path, cycles);
        }
        path.pop();
    }
    on[v] = false;
}

pub fn random_class(tri: &VeeringTriangulation, rng: &mut ChaCha8Rng, range: i64) -> Cocycle {
    let summary = homology_summary(tri).expect("homology");
    let coords: Vec<i64> = (0..summary.betti_1).map(|_| rng.gen_range(-range..=range)).collect();
    summary.from_coordinates(tri, &coords).expect("class")
}

/// Nonnegative witnesses of random member classes, to be combined into
/// random nonnegative cocycles.
pub fn witness_pool(tri: &VeeringTriangulation, rng: &mut ChaCha8Rng, tries: usize) -> Vec<Cocycle> {
    let mut pool = Vec::new();
    for _ in 0..tries {
        let w = random_class(tri, rng, 3);
        if let ConeCertificate::Member { weights, .. } = cone_membership(tri, &w.0, 0).unwrap() {
            if weights.total() > 0 && !pool.contains(&weights) {
                pool.push(weights);
            }
        }
    }
    pool
}

/// A random nonnegative combination of pool elements, optionally pushed
/// through a few random up-flips.
pub fn random_nonnegative(tri: &VeeringTriangulation, pool: &[Cocycle], rng: &mut ChaCha8Rng) -> Cocycle {
    let mut w = Cocycle::zero(tri.num_faces());
    for p in pool {
        w = w.add(&p.scale(rng.gen_range(0..=2)));
    }
    if w.total() == 0 {
        w = pool[rng.gen_range(0..pool.len())].clone();
    }
    for _ in 0..rng.gen_range(0..4) {
        let t = rng.gen_range(0..tri.num_tets());
        if let Ok(next) = veerweave::carry::flip_up(tri, &w.0, t) {
            w = next;
        }
    }
    w
}
