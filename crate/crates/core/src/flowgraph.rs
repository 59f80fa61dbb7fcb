//! The directed dual graph, cone membership certificates, simple cycles and
//! the face of the cone spanned by directed cycles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cusp::{Cusps, TubeSystem};
use crate::error::{Error, Result};
use crate::homology::{check_cocycle, coboundary, Cocycle, HomologySummary};
use crate::linalg;
use crate::lp;
use crate::tri::VeeringTriangulation;

/// Vertices are tets; edge `f` runs from `below(f)` to `above(f)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl DualGraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> DualGraph {
        DualGraph { vertices, edges }
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.0 == v)
            .map(|(f, e)| (f, e.1))
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == v).count()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v).count()
    }

    pub fn reversed(&self) -> DualGraph {
        DualGraph::new(self.vertices, self.edges.iter().map(|&(a, b)| (b, a)).collect())
    }

    /// Strongly connected components (Tarjan), each sorted, listed in order
    /// of their smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_within(&vec![true; self.vertices])
    }

    fn components_within(&self, alive: &[bool]) -> Vec<Vec<usize>> {
        struct State<'a> {
            g: &'a DualGraph,
            alive: &'a [bool],
            index: Vec<Option<usize>>,
            low: Vec<usize>,
            on_stack: Vec<bool>,
            stack: Vec<usize>,
            next: usize,
            out: Vec<Vec<usize>>,
        }
        fn visit(s: &mut State, v: usize) {
            s.index[v] = Some(s.next);
            s.low[v] = s.next;
            s.next += 1;
            s.stack.push(v);
            s.on_stack[v] = true;
            let succ: Vec<usize> = s.g.out_edges(v).map(|(_, w)| w).collect();
            for w in succ {
                if !s.alive[w] {
                    continue;
                }
                match s.index[w] {
                    None => {
                        visit(s, w);
                        s.low[v] = s.low[v].min(s.low[w]);
                    }
                    Some(i) if s.on_stack[w] => s.low[v] = s.low[v].min(i),
                    _ => {}
                }
            }
            if Some(s.low[v]) == s.index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = s.stack.pop().unwrap();
                    s.on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                s.out.push(comp);
            }
        }
        let n = self.vertices;
        let mut s = State {
            g: self,
            alive,
            index: vec![None; n],
            low: vec![0; n],
            on_stack: vec![false; n],
            stack: Vec::new(),
            next: 0,
            out: Vec::new(),
        };
        for v in 0..n {
            if alive[v] && s.index[v].is_none() {
                visit(&mut s, v);
            }
        }
        let mut out = s.out;
        out.sort();
        out
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.components().len() == 1
    }
}

pub fn dual_graph(tri: &VeeringTriangulation) -> Result<DualGraph> {
    let g = DualGraph::new(
        tri.num_tets(),
        (0..tri.num_faces()).map(|f| (tri.below(f), tri.above(f))).collect(),
    );
    for v in 0..g.vertices {
        if g.in_degree(v) != 2 || g.out_degree(v) != 2 {
            return Err(Error::Structure(format!(
                "tet {v} has in-degree {} and out-degree {} in the dual graph",
                g.in_degree(v),
                g.out_degree(v)
            )));
        }
    }
    if !g.is_strongly_connected() {
        return Err(Error::Structure("dual graph is not strongly connected".into()));
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "witness", rename_all = "snake_case")]
pub enum ConeCertificate {
    Member {
        weights: Cocycle,
        potential: Vec<i64>,
    },
    NonMember {
        /// Faces of a directed cycle in traversal order.
        cycle: Vec<usize>,
        tets: Vec<usize>,
        pairing: i64,
    },
}

impl ConeCertificate {
    pub fn is_member(&self) -> bool {
        matches!(self, ConeCertificate::Member { .. })
    }
}

/// Relaxation order of the faces: ascending, or shuffled by a nonzero seed.
fn face_order(nfaces: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..nfaces).collect();
    if seed != 0 {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    order
}

/// Is `w0 + dc >= 0` solvable? Difference constraints
/// `c(below f) - c(above f) <= w0(f)` solved by Bellman-Ford from a virtual
/// source joined to every tet.
pub fn cone_membership(tri: &VeeringTriangulation, w0: &[i64], seed: u64) -> Result<ConeCertificate> {
    check_cocycle(tri, w0)?;
    let n = tri.num_tets();
    let order = face_order(tri.num_faces(), seed);
    let mut dist = vec![0i64; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut last = None;
    for _ in 0..=n {
        last = None;
        for &f in &order {
            let (u, v) = (tri.above(f), tri.below(f));
            if dist[u] + w0[f] < dist[v] {
                dist[v] = dist[u] + w0[f];
                pred[v] = Some(f);
                last = Some(v);
            }
        }
        if last.is_none() {
            break;
        }
    }
    let Some(mut x) = last else {
        let weights = Cocycle(w0.to_vec()).add(&coboundary(tri, &dist));
        return Ok(ConeCertificate::Member {
            weights,
            potential: dist,
        });
    };
    for _ in 0..n {
        x = tri.above(pred[x].expect("relaxed vertex has a predecessor"));
    }
    let start = x;
    let mut cycle = Vec::new();
    let mut tets = Vec::new();
    loop {
        let f = pred[x].expect("cycle vertex has a predecessor");
        cycle.push(f);
        tets.push(x);
        x = tri.above(f);
        if x == start {
            break;
        }
    }
    let pairing = cycle.iter().map(|&f| w0[f]).sum();
    Ok(ConeCertificate::NonMember { cycle, tets, pairing })
}

/// Independent check of a certificate for the class of `w0`.
pub fn verify_certificate(
    tri: &VeeringTriangulation,
    w0: &[i64],
    cert: &ConeCertificate,
) -> std::result::Result<(), String> {
    match cert {
        ConeCertificate::Member { weights, .. } => {
            let w = &weights.0;
            if w.len() != w0.len() {
                return Err("witness has the wrong length".into());
            }
            if let Some(f) = w.iter().position(|&x| x < 0) {
                return Err(format!("witness is negative on face {f}"));
            }
            for e in 0..tri.num_edges() {
                let edge = tri.edge(e);
                let mut s = 0;
                for c in &edge.crossings {
                    let up = tri.tet(c.tet).is_top_face(c.exit);
                    s += if up { w[c.face] } else { -w[c.face] };
                }
                if s != 0 {
                    return Err(format!("witness violates the switch condition at edge {e}"));
                }
            }
            // w - w0 must be a coboundary: propagate a potential.
            let d: Vec<i64> = w.iter().zip(w0).map(|(a, b)| a - b).collect();
            let n = tri.num_tets();
            let mut c: Vec<Option<i64>> = vec![None; n];
            c[0] = Some(0);
            let mut stack = vec![0usize];
            while let Some(t) = stack.pop() {
                for f in 0..tri.num_faces() {
                    let (lo, hi) = (tri.below(f), tri.above(f));
                    let (next, val) = if lo == t {
                        (hi, c[t].unwrap() + d[f])
                    } else if hi == t {
                        (lo, c[t].unwrap() - d[f])
                    } else {
                        continue;
                    };
                    if c[next].is_none() {
                        c[next] = Some(val);
                        stack.push(next);
                    }
                }
            }
            for f in 0..tri.num_faces() {
                match (c[tri.above(f)], c[tri.below(f)]) {
                    (Some(a), Some(b)) if a - b == d[f] => {}
                    _ => return Err(format!("witness differs from the class on face {f}")),
                }
            }
            Ok(())
        }
        ConeCertificate::NonMember { cycle, pairing, .. } => {
            if cycle.is_empty() {
                return Err("empty cycle".into());
            }
            for k in 0..cycle.len() {
                let (f, g) = (cycle[k], cycle[(k + 1) % cycle.len()]);
                if f >= tri.num_faces() || g >= tri.num_faces() {
                    return Err("face out of range".into());
                }
                let head = tri.tri().faces[f]
                    .sides
                    .iter()
                    .find(|&&(t, h)| !tri.tet(t).is_top_face(h))
                    .map(|s| s.0);
                let tail = tri.tri().faces[g]
                    .sides
                    .iter()
                    .find(|&&(t, h)| tri.tet(t).is_top_face(h))
                    .map(|s| s.0);
                if head != tail {
                    return Err(format!("faces {f} and {g} are not consecutive"));
                }
            }
            let p: i64 = cycle.iter().map(|&f| w0[f]).sum();
            if p != *pairing {
                return Err("recorded pairing is wrong".into());
            }
            if p >= 0 {
                return Err("cycle pairs nonnegatively".into());
            }
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleList {
    /// Each cycle as faces in traversal order, starting at its least vertex.
    pub cycles: Vec<Vec<usize>>,
    pub truncated: bool,
}

/// Johnson's enumeration of simple directed cycles, stopping at `cap`.
pub fn simple_cycles(g: &DualGraph, cap: usize) -> CycleList {
    struct Search<'a> {
        g: &'a DualGraph,
        alive: Vec<bool>,
        blocked: Vec<bool>,
        b: Vec<Vec<usize>>,
        path: Vec<usize>,
        out: Vec<Vec<usize>>,
        cap: usize,
        truncated: bool,
    }
    fn unblock(s: &mut Search, u: usize) {
        s.blocked[u] = false;
        while let Some(w) = s.b[u].pop() {
            if s.blocked[w] {
                unblock(s, w);
            }
        }
    }
    fn circuit(s: &mut Search, v: usize, start: usize) -> bool {
        let mut found = false;
        s.blocked[v] = true;
        let succ: Vec<(usize, usize)> = s.g.out_edges(v).collect();
        for &(f, w) in &succ {
            if s.truncated {
                return true;
            }
            if !s.alive[w] {
                continue;
            }
            if w == start {
                s.path.push(f);
                s.out.push(s.path.clone());
                s.path.pop();
                if s.out.len() >= s.cap {
                    s.truncated = true;
                }
                found = true;
            } else if !s.blocked[w] {
                s.path.push(f);
                if circuit(s, w, start) {
                    found = true;
                }
                s.path.pop();
            }
        }
        if found {
            unblock(s, v);
        } else {
            for &(_, w) in &succ {
                if s.alive[w] && !s.b[w].contains(&v) {
                    s.b[w].push(v);
                }
            }
        }
        found
    }
    let n = g.vertices;
    let mut s = Search {
        g,
        alive: vec![false; n],
        blocked: vec![false; n],
        b: vec![Vec::new(); n],
        path: Vec::new(),
        out: Vec::new(),
        cap: cap.max(1),
        truncated: false,
    };
    for start in 0..n {
        if s.truncated {
            break;
        }
        let above: Vec<bool> = (0..n).map(|v| v >= start).collect();
        let comp = g
            .components_within(&above)
            .into_iter()
            .find(|c| c.contains(&start))
            .unwrap_or_default();
        for v in 0..n {
            s.alive[v] = comp.contains(&v);
            s.blocked[v] = false;
            s.b[v].clear();
        }
        circuit(&mut s, start, start);
    }
    // A cycle may have been recorded just before truncation was detected.
    s.out.truncate(s.cap);
    CycleList {
        cycles: s.out,
        truncated: s.truncated,
    }
}

/// Brute-force verdict: nonnegative on every simple cycle.
pub fn brute_force_member(w: &[i64], cycles: &CycleList) -> Option<bool> {
    if cycles.truncated {
        return None;
    }
    Some(cycles.cycles.iter().all(|z| z.iter().map(|&f| w[f]).sum::<i64>() >= 0))
}

/// Pairs positively with every simple cycle (interior of the cone).
pub fn strictly_positive(w: &[i64], cycles: &CycleList) -> Option<bool> {
    if cycles.truncated {
        return None;
    }
    Some(cycles.cycles.iter().all(|z| z.iter().map(|&f| w[f]).sum::<i64>() > 0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ambient {
    Cusped,
    Filled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeFaceSummary {
    pub ambient: Ambient,
    pub dimension: usize,
    pub generators: usize,
    pub lineality_dim: usize,
    pub face_codim: usize,
    /// Generator classes spanning extreme rays modulo the lineality space.
    pub extreme_rays: Vec<Vec<i64>>,
}

/// Cocycles spanning the ambient H^1 (filled: the classes extending over
/// every solid tube).
pub fn ambient_basis(
    tri: &VeeringTriangulation,
    summary: &HomologySummary,
    cusps: &Cusps,
    tubes: &TubeSystem,
    ambient: Ambient,
) -> Result<Vec<Cocycle>> {
    match ambient {
        Ambient::Cusped => Ok(summary.basis.clone()),
        Ambient::Filled => summary
            .filled_basis(tri, cusps, tubes)
            .iter()
            .map(|c| summary.from_coordinates(tri, c))
            .collect(),
    }
}

/// Summary of the cone spanned by cycle classes, from explicit generators
/// given as coordinate vectors of dimension `dim`.
pub fn cone_face_from_generators(generators: &[Vec<i64>], dim: usize, ambient: Ambient) -> ConeFaceSummary {
    let mut gens: Vec<Vec<i64>> = generators
        .iter()
        .filter(|g| g.iter().any(|&x| x != 0))
        .map(|g| primitive(g))
        .collect();
    gens.sort();
    gens.dedup();
    let k = gens.len();
    let col = |i: usize| -> Vec<BigRational> {
        gens[i]
            .iter()
            .map(|&x| BigRational::from_integer(BigInt::from(x)))
            .collect()
    };
    // Generator i lies in the lineality space iff -g_i is a nonnegative
    // combination of the generators.
    let mut lineal = Vec::new();
    for i in 0..k {
        let mut a: Vec<Vec<BigRational>> = (0..dim).map(|r| (0..k).map(|j| col(j)[r].clone()).collect()).collect();
        let mut unit = vec![BigRational::zero(); k];
        unit[i] = BigRational::from_integer(1.into());
        a.push(unit);
        let mut b = vec![BigRational::zero(); dim];
        b.push(BigRational::from_integer(1.into()));
        if lp::feasible(&a, &b).is_some() {
            lineal.push(gens[i].clone());
        }
    }
    let lineality_dim = if lineal.is_empty() {
        0
    } else {
        linalg::rank(&linalg::to_big(&lineal), dim)
    };
    // Quotient by the lineality space, then drop redundant generators.
    let proj: Vec<Vec<i64>> = if lineality_dim == 0 {
        gens.clone()
    } else {
        let q = linalg::integer_kernel(&linalg::to_big(&lineal), dim);
        gens.iter()
            .map(|g| {
                q.iter()
                    .map(|row| {
                        let s: BigInt = row.iter().zip(g).map(|(a, &b)| a * BigInt::from(b)).sum();
                        i64::try_from(s).unwrap_or(0)
                    })
                    .collect()
            })
            .collect()
    };
    let pdim = proj.first().map_or(0, |p| p.len());
    let mut extreme = Vec::new();
    let mut kept: Vec<Vec<i64>> = Vec::new();
    for i in 0..k {
        let pi = &proj[i];
        if pi.iter().all(|&x| x == 0) {
            continue;
        }
        let ppi = primitive(pi);
        if kept.contains(&ppi) {
            continue;
        }
        let others: Vec<usize> = (0..k)
            .filter(|&j| j != i && proj[j].iter().any(|&x| x != 0) && primitive(&proj[j]) != ppi)
            .collect();
        let a: Vec<Vec<BigRational>> = (0..pdim)
            .map(|r| {
                others
                    .iter()
                    .map(|&j| BigRational::from_integer(BigInt::from(proj[j][r])))
                    .collect()
            })
            .collect();
        let b: Vec<BigRational> = pi.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
        let redundant = !others.is_empty() && lp::feasible(&a, &b).is_some();
        if !redundant {
            kept.push(ppi);
            extreme.push(gens[i].clone());
        }
    }
    ConeFaceSummary {
        ambient,
        dimension: dim,
        generators: k,
        lineality_dim,
        face_codim: lineality_dim,
        extreme_rays: extreme,
    }
}

fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |a, &b| linalg::gcd_i64(a, b));
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

pub fn cone_face(
    tri: &VeeringTriangulation,
    summary: &HomologySummary,
    cusps: &Cusps,
    tubes: &TubeSystem,
    ambient: Ambient,
    cap: usize,
) -> Result<ConeFaceSummary> {
    let g = dual_graph(tri)?;
    let cycles = simple_cycles(&g, cap);
    if cycles.truncated {
        return Err(Error::DeskScale(format!(
            "more than {cap} simple cycles in the dual graph"
        )));
    }
    let basis = ambient_basis(tri, summary, cusps, tubes, ambient)?;
    let gens: Vec<Vec<i64>> = cycles
        .cycles
        .iter()
        .map(|z| basis.iter().map(|b| z.iter().map(|&f| b.0[f]).sum()).collect())
        .collect();
    Ok(cone_face_from_generators(&gens, basis.len(), ambient))
}
