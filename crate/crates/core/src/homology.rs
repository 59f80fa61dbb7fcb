//! Cohomology of the cusped manifold through the dual 2-complex: tetrahedra,
//! faces and edges as 0-, 1- and 2-cells. Cocycles are integer face weights
//! satisfying the fan equation at every edge.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cusp::{det, CuspComplex, Cusps, TubeSystem};
use crate::error::{Error, Result};
use crate::linalg::{self, Pivot};
use crate::tri::VeeringTriangulation;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cocycle(pub Vec<i64>);

impl Cocycle {
    pub fn zero(nfaces: usize) -> Cocycle {
        Cocycle(vec![0; nfaces])
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    pub fn add(&self, other: &Cocycle) -> Cocycle {
        Cocycle(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Cocycle) -> Cocycle {
        Cocycle(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Cocycle {
        Cocycle(self.0.iter().map(|a| a * k).collect())
    }
}

/// Signed fan sum at an edge: `sum_A w - sum_B w`.
pub fn fan_defect(tri: &VeeringTriangulation, w: &[i64], e: usize) -> i64 {
    tri.edge(e).crossings.iter().map(|c| c.sign as i64 * w[c.face]).sum()
}

/// Common fan sum `W(e)` of a cocycle at edge `e`.
pub fn fan_sum(tri: &VeeringTriangulation, w: &[i64], e: usize) -> i64 {
    let edge = tri.edge(e);
    tri.fans(e).a.iter().map(|&k| w[edge.crossings[k].face]).sum()
}

pub fn check_cocycle(tri: &VeeringTriangulation, w: &[i64]) -> Result<()> {
    if w.len() != tri.num_faces() {
        return Err(Error::NotCocycle(format!(
            "{} weights for {} faces",
            w.len(),
            tri.num_faces()
        )));
    }
    let bad: Vec<usize> = (0..tri.num_edges()).filter(|&e| fan_defect(tri, w, e) != 0).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::NotCocycle(format!("fan equation fails at edges {bad:?}")))
    }
}

/// `dc(f) = c(above f) - c(below f)`.
pub fn coboundary(tri: &VeeringTriangulation, c: &[i64]) -> Cocycle {
    Cocycle(
        (0..tri.num_faces())
            .map(|f| c[tri.above(f)] - c[tri.below(f)])
            .collect(),
    )
}

/// Rows indexed by faces, columns by tets.
pub fn delta0(tri: &VeeringTriangulation) -> Vec<Vec<i64>> {
    (0..tri.num_faces())
        .map(|f| {
            let mut row = vec![0; tri.num_tets()];
            row[tri.above(f)] += 1;
            row[tri.below(f)] -= 1;
            row
        })
        .collect()
}

/// Rows indexed by edges, columns by faces: the fan relations.
pub fn delta1(tri: &VeeringTriangulation) -> Vec<Vec<i64>> {
    (0..tri.num_edges())
        .map(|e| {
            let mut row = vec![0; tri.num_faces()];
            for c in &tri.edge(e).crossings {
                row[c.face] += c.sign as i64;
            }
            row
        })
        .collect()
}

/// Breadth-first spanning tree of the dual graph from tet 0, neighbours in
/// ascending face order. Returns tree faces and parent data.
pub fn spanning_tree(tri: &VeeringTriangulation) -> (Vec<bool>, Vec<Option<(usize, usize)>>) {
    let n = tri.num_tets();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for f in 0..tri.num_faces() {
        adj[tri.below(f)].push((f, tri.above(f)));
        adj[tri.above(f)].push((f, tri.below(f)));
    }
    let mut tree = vec![false; tri.num_faces()];
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for &(f, y) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                tree[f] = true;
                parent[y] = Some((x, f));
                queue.push_back(y);
            }
        }
    }
    (tree, parent)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologySummary {
    pub betti_1: usize,
    /// Invariant factors of the torsion of H_1.
    pub torsion: Vec<String>,
    /// Cocycles vanishing on the spanning tree, a basis of H^1 mod torsion.
    pub basis: Vec<Cocycle>,
    pub tree_faces: Vec<usize>,
}

pub fn homology_summary(tri: &VeeringTriangulation) -> Result<HomologySummary> {
    let nf = tri.num_faces();
    let (tree, _) = spanning_tree(tri);
    let tree_faces: Vec<usize> = (0..nf).filter(|&f| tree[f]).collect();
    let nontree: Vec<usize> = (0..nf).filter(|&f| !tree[f]).collect();

    // H_1: nontree faces modulo the fan relations.
    let rel: Vec<Vec<i64>> = delta1(tri)
        .iter()
        .map(|row| nontree.iter().map(|&f| row[f]).collect())
        .collect();
    let s = linalg::smith(&linalg::to_big(&rel), nontree.len(), Pivot::MinAbs);
    let betti_1 = nontree.len() - s.rank();
    let torsion = s.torsion().iter().map(|d| d.to_string()).collect();

    // H^1: cocycles zero on the tree.
    let mut sys = delta1(tri);
    for &f in &tree_faces {
        let mut row = vec![0; nf];
        row[f] = 1;
        sys.push(row);
    }
    let kernel = linalg::integer_kernel(&linalg::to_big(&sys), nf);
    let basis: Vec<Cocycle> = linalg::hermite(&kernel, nf)
        .iter()
        .map(|r| linalg::to_i64(r).map(Cocycle))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Internal("basis entries overflow".into()))?;
    if basis.len() != betti_1 {
        return Err(Error::Internal(format!(
            "rank of H^1 ({}) differs from betti number of H_1 ({betti_1})",
            basis.len()
        )));
    }
    Ok(HomologySummary {
        betti_1,
        torsion,
        basis,
        tree_faces,
    })
}

impl HomologySummary {
    pub fn from_coordinates(&self, tri: &VeeringTriangulation, coords: &[i64]) -> Result<Cocycle> {
        if coords.len() != self.basis.len() {
            return Err(Error::Input(format!(
                "{} coordinates given, H^1 has rank {}",
                coords.len(),
                self.basis.len()
            )));
        }
        let mut w = Cocycle::zero(tri.num_faces());
        for (k, b) in coords.iter().zip(&self.basis) {
            w = w.add(&b.scale(*k));
        }
        Ok(w)
    }

    /// Coordinates of the class of `w` in the basis.
    pub fn coordinates(&self, tri: &VeeringTriangulation, w: &[i64]) -> Result<Vec<i64>> {
        check_cocycle(tri, w)?;
        let (nf, _) = normal_form(tri, w);
        let rows = linalg::to_big(&self.basis.iter().map(|b| b.0.clone()).collect::<Vec<_>>());
        let target: Vec<BigInt> = nf.0.iter().map(|&x| BigInt::from(x)).collect();
        let x = linalg::solve_left(&rows, &target)
            .ok_or_else(|| Error::Internal("cocycle outside the span of the basis".into()))?;
        x.iter()
            .map(|q| if q.is_integer() { q.to_integer().to_i64() } else { None })
            .collect::<Option<Vec<i64>>>()
            .ok_or_else(|| Error::Internal("non-integral coordinates".into()))
    }

    /// Integer basis (in coordinates) of the classes extending over the
    /// solid tubes.
    pub fn filled_basis(&self, tri: &VeeringTriangulation, cusps: &Cusps, tubes: &TubeSystem) -> Vec<Vec<i64>> {
        let funcs = filled_conditions(self, tri, cusps, tubes);
        let b = self.basis.len();
        if funcs.is_empty() {
            return (0..b).map(|i| (0..b).map(|j| (i == j) as i64).collect()).collect();
        }
        let rows: Vec<Vec<i64>> = funcs.into_iter().map(|(_, f)| f).collect();
        let k = linalg::integer_kernel(&linalg::to_big(&rows), b);
        linalg::hermite(&k, b)
            .iter()
            .map(|r| linalg::to_i64(r).expect("small"))
            .collect()
    }
}

/// The representative of `[w]` vanishing on the spanning tree, with the
/// potential `c` (zero at tet 0) such that it equals `w + dc`.
pub fn normal_form(tri: &VeeringTriangulation, w: &[i64]) -> (Cocycle, Vec<i64>) {
    let (_, parent) = spanning_tree(tri);
    let n = tri.num_tets();
    let mut c: Vec<Option<i64>> = vec![None; n];
    c[0] = Some(0);
    // Parents are discovered before children in breadth-first order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&t| depth(&parent, t));
    for &t in &order {
        if let Some((p, f)) = parent[t] {
            let cp = c[p].expect("parent first");
            // w(f) + c(above) - c(below) = 0
            let v = if tri.above(f) == t { cp - w[f] } else { cp + w[f] };
            c[t] = Some(v);
        }
    }
    let c: Vec<i64> = c.into_iter().map(|x| x.unwrap_or(0)).collect();
    let d = coboundary(tri, &c);
    (Cocycle(w.to_vec()).add(&d), c)
}

fn depth(parent: &[Option<(usize, usize)>], mut t: usize) -> usize {
    let mut d = 0;
    while let Some((p, _)) = parent[t] {
        t = p;
        d += 1;
    }
    d
}

/// Are `a` and `b` cohomologous?
pub fn same_class(tri: &VeeringTriangulation, a: &[i64], b: &[i64]) -> bool {
    normal_form(tri, a).0 == normal_form(tri, b).0
}

/// Pairing with a closed walk in the dual graph, given as faces in order.
pub fn pair_with_cycle(tri: &VeeringTriangulation, w: &[i64], walk: &[usize]) -> Result<i64> {
    if walk.is_empty() {
        return Err(Error::NotClosed("empty walk".into()));
    }
    for k in 0..walk.len() {
        let f = walk[k];
        let g = walk[(k + 1) % walk.len()];
        if tri.above(f) != tri.below(g) {
            return Err(Error::NotClosed(format!(
                "face {g} does not leave the tet face {f} enters"
            )));
        }
    }
    Ok(walk.iter().map(|&f| w[f]).sum())
}

/// Pairing with a dual chain on a cusp.
pub fn pair_with_dual(cusp: &CuspComplex, w: &[i64], chain: &[i64]) -> i64 {
    cusp.sides
        .iter()
        .zip(chain)
        .map(|(s, &z)| z * s.coorientation() * w[s.face])
        .sum()
}

/// A curve on a cusp as `(tip, opposite)` steps: leave `tip` through its
/// side opposite the tet vertex `opposite`.
pub fn cusp_curve_chain(cusp: &CuspComplex, steps: &[(usize, u8)]) -> Result<Vec<i64>> {
    let mut chain = vec![0i64; cusp.sides.len()];
    if steps.is_empty() {
        return Err(Error::NotClosed("empty curve".into()));
    }
    for k in 0..steps.len() {
        let (tip, c) = steps[k];
        if tip >= cusp.tips.len() || c == cusp.tips[tip].vertex || c > 3 {
            return Err(Error::Input(format!("bad curve step ({tip}, {c})")));
        }
        let s = cusp.tips[tip].sides[c as usize];
        let side = &cusp.sides[s];
        let e = side.end_for(tip, c);
        let next = side.ends[1 - e].tip;
        if next != steps[(k + 1) % steps.len()].0 {
            return Err(Error::NotClosed(format!("step {k} does not reach the next tip")));
        }
        chain[s] += if e == 1 { 1 } else { -1 };
    }
    Ok(chain)
}

/// The boundary multicurve class as a primal chain: each strand on a side
/// runs counterclockwise around the tip the coorientation points into.
pub fn boundary_chain(cusp: &CuspComplex, w: &[i64]) -> Vec<i64> {
    cusp.sides.iter().map(|s| s.coorientation() * w[s.face]).collect()
}

/// `(p, q)` with `[boundary] = p lambda + q rho`.
pub fn restrict_to_cusp(cusp: &CuspComplex, w: &[i64]) -> (i64, i64) {
    (
        pair_with_dual(cusp, w, &cusp.rho),
        -pair_with_dual(cusp, w, &cusp.lambda_dual),
    )
}

/// For each solid tube, the functional `u -> i(restrict(u), m)` on the
/// basis.
pub fn filled_conditions(
    summary: &HomologySummary,
    _tri: &VeeringTriangulation,
    cusps: &Cusps,
    tubes: &TubeSystem,
) -> Vec<(usize, Vec<i64>)> {
    tubes
        .solid()
        .map(|(c, m)| {
            let f = summary
                .basis
                .iter()
                .map(|b| det(restrict_to_cusp(&cusps.cusps[c], &b.0), m))
                .collect();
            (c, f)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorePairing {
    pub cusp: usize,
    pub a: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FilledCheck {
    pub extends: bool,
    pub obstructions: Vec<usize>,
    pub cores: Vec<CorePairing>,
    pub gamma_pairing: i64,
}

pub fn filled_subspace_check(cusps: &Cusps, tubes: &TubeSystem, w: &[i64]) -> Result<FilledCheck> {
    let mut obstructions = Vec::new();
    let mut cores = Vec::new();
    for (c, m) in tubes.solid() {
        let r = restrict_to_cusp(&cusps.cusps[c], w);
        if det(r, m) != 0 {
            obstructions.push(c);
            continue;
        }
        let num = -r.1;
        let den = -m.1;
        if den == 0 || num % den != 0 {
            return Err(Error::Internal(format!(
                "core pairing {num}/{den} at cusp {c} is not integral"
            )));
        }
        cores.push(CorePairing { cusp: c, a: num / den });
    }
    let extends = obstructions.is_empty();
    let gamma_pairing = if extends { cores.iter().map(|c| c.a).sum() } else { 0 };
    Ok(FilledCheck {
        extends,
        obstructions,
        cores,
        gamma_pairing,
    })
}

/// Betti number of H_1 by a second, independent pivoting order, for
/// cross-checks.
pub fn invariant_factors(tri: &VeeringTriangulation, pivot: Pivot) -> (usize, Vec<BigInt>) {
    let (tree, _) = spanning_tree(tri);
    let nontree: Vec<usize> = (0..tri.num_faces()).filter(|&f| !tree[f]).collect();
    let rel: Vec<Vec<i64>> = delta1(tri)
        .iter()
        .map(|row| nontree.iter().map(|&f| row[f]).collect())
        .collect();
    let s = linalg::smith(&linalg::to_big(&rel), nontree.len(), pivot);
    let free = nontree.len() - s.rank();
    (free, s.diag.into_iter().filter(|d| !d.is_zero()).collect())
}
