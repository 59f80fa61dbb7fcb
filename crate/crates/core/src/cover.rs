//! Finite covers of a veering triangulation, used to grow the fixture set.
//!
//! A degree-`d` cover is given by a permutation of `0..d` per face: copy `i`
//! of `below(f)` is glued across `f` to copy `sigma_f(i)` of `above(f)`.

use crate::error::{Error, Result};
use crate::homology::{homology_summary, spanning_tree};
use crate::tri::{parse_triangulation, Triangulation, VeeringTriangulation};

/// Lift along per-face permutations. Copy `i` of tet `t` becomes tet `t*d + i`.
pub fn lift(tri: &VeeringTriangulation, perms: &[Vec<usize>]) -> Result<Triangulation> {
    let nf = tri.num_faces();
    if perms.len() != nf {
        return Err(Error::Input(format!("expected {nf} face permutations")));
    }
    let d = perms.first().map_or(1, |p| p.len());
    let mut inverse = Vec::with_capacity(nf);
    for p in perms {
        let mut inv = vec![usize::MAX; d];
        for (i, &j) in p.iter().enumerate() {
            if p.len() != d || j >= d || inv[j] != usize::MAX {
                return Err(Error::Input("face labels are not permutations".into()));
            }
            inv[j] = i;
        }
        inverse.push(inv);
    }
    let n = tri.num_tets();
    let mut top_edges = Vec::with_capacity(n * d);
    let mut gluings = Vec::with_capacity(n * d);
    for t in 0..n {
        let tet = tri.tet(t);
        for i in 0..d {
            top_edges.push(tet.top_edge);
            let row: Vec<(usize, u8, [u8; 4])> = (0..4u8)
                .map(|g| {
                    let gl = tet.gluings[g as usize];
                    let f = tri.face_of(t, g);
                    let j = if tet.is_top_face(g) { perms[f][i] } else { inverse[f][i] };
                    (gl.tet * d + j, gl.face, gl.perm)
                })
                .collect();
            gluings.push(row);
        }
    }
    let doc = serde_json::json!({"tets": n * d, "top_edges": top_edges, "gluings": gluings});
    parse_triangulation(&doc.to_string())
}

/// Whether the permutations act transitively, so the cover is connected.
pub fn is_connected(tri: &VeeringTriangulation, perms: &[Vec<usize>]) -> bool {
    let d = perms.first().map_or(1, |p| p.len());
    let n = tri.num_tets();
    let mut seen = vec![false; n * d];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        let (t, i) = (x / d, x % d);
        for f in 0..tri.num_faces() {
            let mut next = Vec::new();
            if tri.below(f) == t {
                next.push(tri.above(f) * d + perms[f][i]);
            }
            if tri.above(f) == t {
                let j = perms[f].iter().position(|&y| y == i).unwrap();
                next.push(tri.below(f) * d + j);
            }
            for y in next {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// The connected cyclic cover given by face labels `phi` mod `d`, if the
/// labels satisfy the fan equations mod `d`.
pub fn cyclic_cover(tri: &VeeringTriangulation, phi: &[i64], d: usize) -> Result<VeeringTriangulation> {
    let m = d as i64;
    for e in 0..tri.num_edges() {
        let fans = tri.fans(e);
        let edge = tri.edge(e);
        let s: i64 = fans.a.iter().map(|&k| phi[edge.crossings[k].face]).sum::<i64>()
            - fans.b.iter().map(|&k| phi[edge.crossings[k].face]).sum::<i64>();
        if s.rem_euclid(m) != 0 {
            return Err(Error::NotCocycle(format!(
                "labels violate the fan equation mod {d} at edge {e}"
            )));
        }
    }
    let perms: Vec<Vec<usize>> = phi
        .iter()
        .map(|&x| (0..d).map(|i| (i as i64 + x).rem_euclid(m) as usize).collect())
        .collect();
    if !is_connected(tri, &perms) {
        return Err(Error::Input("labels do not generate the cyclic group".into()));
    }
    VeeringTriangulation::new(lift(tri, &perms)?)
}

/// All connected cyclic covers of degree `d`, one per label vector vanishing
/// on the spanning tree, in lexicographic order of the labels.
pub fn cyclic_covers(tri: &VeeringTriangulation, d: usize) -> Vec<(Vec<i64>, VeeringTriangulation)> {
    let (tree, _) = spanning_tree(tri);
    let free: Vec<usize> = (0..tri.num_faces()).filter(|&f| !tree[f]).collect();
    let mut out = Vec::new();
    let total = d.pow(free.len() as u32);
    for code in 0..total {
        let mut phi = vec![0i64; tri.num_faces()];
        let mut c = code;
        for &f in free.iter().rev() {
            phi[f] = (c % d) as i64;
            c /= d;
        }
        if let Ok(cover) = cyclic_cover(tri, &phi, d) {
            out.push((phi, cover));
        }
    }
    out
}

/// Invariants used to tell covers apart: tets, cusps, betti number, torsion.
pub fn cover_signature(tri: &VeeringTriangulation) -> Result<(usize, usize, usize, Vec<String>)> {
    let cusps = crate::cusp::build_cusps(tri)?;
    let h = homology_summary(tri)?;
    Ok((tri.num_tets(), cusps.len(), h.betti_1, h.torsion))
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for k in 0..d {
            let mut q = p.clone();
            q.insert(k, d - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Connected covers of degree `d` with identity labels on the spanning tree,
/// found by exhaustive search over the other faces; at most `limit` results.
pub fn permutation_covers(
    tri: &VeeringTriangulation,
    d: usize,
    limit: usize,
) -> Vec<(Vec<Vec<usize>>, VeeringTriangulation)> {
    let (tree, _) = spanning_tree(tri);
    let free: Vec<usize> = (0..tri.num_faces()).filter(|&f| !tree[f]).collect();
    let all = permutations(d);
    let identity: Vec<usize> = (0..d).collect();
    let mut out = Vec::new();
    let total = all.len().pow(free.len() as u32);
    for code in 0..total {
        let mut perms = vec![identity.clone(); tri.num_faces()];
        let mut c = code;
        for &f in free.iter().rev() {
            perms[f] = all[c % all.len()].clone();
            c /= all.len();
        }
        if !is_connected(tri, &perms) {
            continue;
        }
        let Ok(lifted) = lift(tri, &perms) else { continue };
        if let Ok(v) = VeeringTriangulation::new(lifted) {
            out.push((perms, v));
            if out.len() >= limit {
                break;
            }
        }
    }
    out
}
