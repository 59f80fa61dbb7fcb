//! Relatively carried surfaces from nonnegative cocycles: boundary
//! multicurves, tube completions, Euler characteristic, Thurston norm,
//! flips and the annulus move.
//!
//! On a cusp the surface meets the tip complex in strands lying along the
//! sides: `w(f)` parallel strands on each side of face `f`, stacked in the
//! coorientation direction. At a link vertex the strands of the two fans of
//! the edge are merged by height.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::cusp::{ccw_side, det, CuspComplex, Cusps, TubeKind, TubeSystem};
use crate::error::{Error, Result};
use crate::flowgraph::{cone_membership, ConeCertificate};
use crate::homology::{check_cocycle, coboundary, fan_sum, filled_subspace_check, restrict_to_cusp, Cocycle};
use crate::tri::VeeringTriangulation;

/// Sides meeting a link vertex, each fan in ascending height, with whether
/// the vertex is the side's `from` end.
#[derive(Clone, Debug, Default)]
struct VertexFans {
    a: Vec<(usize, bool)>,
    b: Vec<(usize, bool)>,
}

fn link_fans(tri: &VeeringTriangulation, cusps: &Cusps) -> Result<Vec<Vec<VertexFans>>> {
    let mut out: Vec<Vec<VertexFans>> = cusps
        .cusps
        .iter()
        .map(|c| vec![VertexFans::default(); c.num_vertices])
        .collect();
    for e in 0..tri.num_edges() {
        let edge = tri.edge(e);
        let fans = tri.fans(e);
        for end in 0..2 {
            let mut lists = [Vec::new(), Vec::new()];
            let mut vertex = None;
            for (fan, order) in [(0, fans.a.clone()), (1, fans.b.iter().rev().copied().collect())] {
                for k in order {
                    let inc = edge.incidences[k];
                    let (x, other) = (inc.pair[end], inc.pair[1 - end]);
                    let d = edge.crossings[k].exit;
                    let t = edge.crossings[k].tet;
                    let (c, s, idx) = cusps.side(t, x, d);
                    let (tc, tip) = cusps.tip(t, x);
                    debug_assert_eq!(c, tc);
                    let cusp = &cusps.cusps[c];
                    let v = cusp.tips[tip].corners[other as usize];
                    let (a, _) = ccw_side(x, d);
                    let is_from = (other == a) != (idx == 1);
                    let side = &cusp.sides[s];
                    let expect = if is_from { side.from } else { side.to };
                    if expect != v {
                        return Err(Error::Internal(format!(
                            "edge {e}: side {s} does not end at link vertex {v}"
                        )));
                    }
                    match vertex {
                        None => vertex = Some((c, v)),
                        Some(cv) if cv != (c, v) => {
                            return Err(Error::Internal(format!("edge {e} end {end} spans two vertices")))
                        }
                        _ => {}
                    }
                    lists[fan].push((s, is_from));
                }
            }
            let (c, v) = vertex.ok_or_else(|| Error::Internal(format!("edge {e} has no crossings")))?;
            let [a, b] = lists;
            out[c][v] = VertexFans { a, b };
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    /// Null-homologous on the cusp torus.
    Trivial,
    /// Bounds a meridian disk in a solid tube.
    Meridian,
    /// Has the ladderpole slope.
    Ladderpole,
    /// Any other slope; on a hollow tube it runs out to the boundary.
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryComponent {
    /// Sides in traversal order, oriented by the surface coorientation.
    pub sides: Vec<usize>,
    pub class: [i64; 2],
    pub kind: ComponentKind,
    /// For ladderpole components: index `j` of the ladderpole `P_j`
    /// carrying it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pole: Option<usize>,
    /// For ladderpole components: sheet on the first side of its pole.
    #[serde(skip)]
    pub height: usize,
}

/// Weighted boundary track of one cusp resolved into curves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Multicurve {
    pub cusp: usize,
    pub components: Vec<BoundaryComponent>,
    /// Sum of the component classes; equals the restriction of the class.
    pub class: [i64; 2],
}

impl Multicurve {
    pub fn count(&self, kind: ComponentKind) -> usize {
        self.components.iter().filter(|c| c.kind == kind).count()
    }
}

/// Resolve the boundary track of `w` on every cusp.
pub fn resolve_boundary(
    tri: &VeeringTriangulation,
    cusps: &Cusps,
    tubes: &TubeSystem,
    w: &[i64],
) -> Result<Vec<Multicurve>> {
    let fans = link_fans(tri, cusps)?;
    cusps
        .cusps
        .iter()
        .zip(&fans)
        .map(|(cusp, vf)| resolve_cusp(cusp, vf, tubes.meridians.get(cusp.id).copied().flatten(), w))
        .collect()
}

fn resolve_cusp(
    cusp: &CuspComplex,
    vfans: &[VertexFans],
    meridian: Option<(i64, i64)>,
    w: &[i64],
) -> Result<Multicurve> {
    let nsides = cusp.sides.len();
    let mut offset = vec![0usize; nsides + 1];
    for s in 0..nsides {
        let ws = w[cusp.sides[s].face];
        if ws < 0 {
            return Err(Error::NegativeWeight {
                face: cusp.sides[s].face,
                weight: ws,
            });
        }
        offset[s + 1] = offset[s] + ws as usize;
    }
    let nstrands = offset[nsides];
    let side_of = |x: usize| offset.partition_point(|&o| o <= x) - 1;
    // conn[2 * strand + end]: end 0 = from, 1 = to.
    let mut conn = vec![usize::MAX; 2 * nstrands];
    for (v, vf) in vfans.iter().enumerate() {
        let heights = |list: &[(usize, bool)]| -> Vec<usize> {
            let mut out = Vec::new();
            for &(s, is_from) in list {
                let end = if is_from { 0 } else { 1 };
                for j in offset[s]..offset[s + 1] {
                    out.push(2 * j + end);
                }
            }
            out
        };
        let (ha, hb) = (heights(&vf.a), heights(&vf.b));
        if ha.len() != hb.len() {
            return Err(Error::NotCocycle(format!(
                "cusp {}: fans at link vertex {v} carry {} and {} strands",
                cusp.id,
                ha.len(),
                hb.len()
            )));
        }
        for (&x, &y) in ha.iter().zip(&hb) {
            conn[x] = y;
            conn[y] = x;
        }
    }
    if conn.iter().any(|&c| c == usize::MAX) {
        return Err(Error::Internal(format!("cusp {}: unmatched strand end", cusp.id)));
    }
    let mut seen = vec![false; nstrands];
    let mut components = Vec::new();
    for start in 0..nstrands {
        if seen[start] {
            continue;
        }
        let mut steps: Vec<(usize, i64, usize)> = Vec::new();
        let (mut strand, mut dir) = (start, 1i64);
        loop {
            seen[strand] = true;
            steps.push((side_of(strand), dir, strand));
            let arrive = if dir == 1 { 1 } else { 0 };
            let next = conn[2 * strand + arrive];
            strand = next / 2;
            dir = if next % 2 == 0 { 1 } else { -1 };
            if strand == start {
                if dir != 1 {
                    return Err(Error::Internal(format!(
                        "cusp {}: a boundary curve returns reversed",
                        cusp.id
                    )));
                }
                break;
            }
        }
        let sigma = steps[0].1 * cusp.sides[steps[0].0].coorientation();
        if steps
            .iter()
            .any(|&(s, d, _)| d * cusp.sides[s].coorientation() != sigma)
        {
            return Err(Error::Internal(format!(
                "cusp {}: boundary curve is not coherently cooriented",
                cusp.id
            )));
        }
        let mut chain = vec![0i64; nsides];
        for &(s, d, _) in &steps {
            chain[s] += d * sigma;
        }
        if sigma == -1 {
            steps.reverse();
        }
        let (p, q) = cusp.coordinates(&chain);
        let kind = if (p, q) == (0, 0) {
            ComponentKind::Trivial
        } else if q == 0 {
            ComponentKind::Ladderpole
        } else if meridian.map_or(false, |m| det((p, q), m) == 0) {
            ComponentKind::Meridian
        } else {
            ComponentKind::Other
        };
        let (pole, height) = if kind == ComponentKind::Ladderpole {
            let (j, h) = pole_position(cusp, &steps, &offset)?;
            (Some(j), h)
        } else {
            (None, 0)
        };
        components.push(BoundaryComponent {
            sides: steps.iter().map(|s| s.0).collect(),
            class: [p, q],
            kind,
            pole,
            height,
        });
    }
    let class = components
        .iter()
        .fold([0, 0], |acc, c| [acc[0] + c.class[0], acc[1] + c.class[1]]);
    Ok(Multicurve {
        cusp: cusp.id,
        components,
        class,
    })
}

/// The ladderpole carrying a ladderpole-slope curve, and the curve's
/// position across that pole in the transverse direction.
fn pole_position(cusp: &CuspComplex, steps: &[(usize, i64, usize)], offset: &[usize]) -> Result<(usize, usize)> {
    let first = steps[0].0;
    let j = cusp
        .pole_order
        .iter()
        .position(|&p| cusp.poles[p].sides.contains(&first));
    let Some(j) = j else {
        return Err(Error::Internal(format!(
            "cusp {}: ladderpole-slope curve runs along a rung",
            cusp.id
        )));
    };
    let pole = &cusp.poles[cusp.pole_order[j]];
    if steps.len() != pole.sides.len() || steps.iter().any(|s| !pole.sides.contains(&s.0)) {
        return Err(Error::Internal(format!(
            "cusp {}: ladderpole-slope curve leaves ladderpole {j}",
            cusp.id
        )));
    }
    let s0 = pole.sides[0];
    let sheet = steps.iter().find(|s| s.0 == s0).map(|s| s.2 - offset[s0]).unwrap();
    let w = offset[s0 + 1] - offset[s0];
    // Sheets ascend along the coorientation; the transverse direction runs
    // from P_j into the ladder after it.
    let side = &cusp.sides[s0];
    let into = if side.coorientation() == 1 {
        side.ends[0].tip
    } else {
        side.ends[1].tip
    };
    let after = cusp.ladder_order[j];
    let ascending = cusp.ladders[after].tips.contains(&into);
    Ok((j, if ascending { sheet } else { w - 1 - sheet }))
}

/// How ladderpole curves on a tube are paired into annuli.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Completion {
    /// Each positive curve with the nearest negative curve after it.
    #[default]
    InnermostPlus,
    /// Each negative curve with the nearest positive curve after it.
    InnermostMinus,
    /// Explicit pairs of curve indices per cusp; cusps not listed use
    /// `innermost_plus`.
    Explicit(BTreeMap<usize, Vec<[usize; 2]>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleCurve {
    /// Index `j` of the ladderpole `P_j`.
    pub pole: usize,
    /// +1 if oriented along lambda.
    pub sign: i64,
}

/// The combinatorics of one tube: ladderpole curves in transverse cyclic
/// order and their pairing into annuli. Can be built by hand for tests.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TubeModel {
    pub cusp: usize,
    pub kind: TubeKind,
    pub up_ladders: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meridian: Option<[i64; 2]>,
    pub curves: Vec<PoleCurve>,
    /// Annuli `[x, y]`: the annulus is parallel to the part of the torus
    /// swept going forward from curve `x` to curve `y`.
    pub pairs: Vec<[usize; 2]>,
}

impl TubeModel {
    pub fn poles(&self) -> usize {
        2 * self.up_ladders
    }

    /// Forward distance in ladderpoles from curve `x` to curve `y`.
    pub fn gap(&self, x: usize, y: usize) -> usize {
        let n = self.poles();
        let (jx, jy) = (self.curves[x].pole, self.curves[y].pole);
        if y > x {
            jy - jx
        } else {
            jy + n - jx
        }
    }

    fn next_live(&self, x: usize, live: &[bool]) -> Option<usize> {
        let n = self.curves.len();
        (1..=n).map(|k| (x + k) % n).find(|&y| live[y] && y != x)
    }

    /// An annulus is removable if its curves are consecutive and lie on
    /// the two ladderpoles of one ladder (or on one ladderpole).
    pub fn removable(&self) -> Vec<usize> {
        let live: Vec<bool> = vec![true; self.curves.len()];
        self.pairs
            .iter()
            .enumerate()
            .filter(|(_, &[x, y])| self.next_live(x, &live) == Some(y) && self.gap(x, y) <= 1)
            .map(|(k, _)| k)
            .collect()
    }

    /// Remove one innermost removable annulus; `false` if none.
    pub fn annulus_move(&mut self) -> bool {
        let Some(&k) = self.removable().first() else {
            return false;
        };
        let [x, y] = self.pairs.remove(k);
        let keep: Vec<usize> = (0..self.curves.len()).filter(|&i| i != x && i != y).collect();
        let index: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(n, &o)| (o, n)).collect();
        self.curves = keep.iter().map(|&i| self.curves[i]).collect();
        for p in self.pairs.iter_mut() {
            *p = [index[&p[0]], index[&p[1]]];
        }
        true
    }

    /// Apply annulus moves until none is available.
    pub fn make_efficient(&mut self) -> usize {
        let mut moves = 0;
        while self.annulus_move() {
            moves += 1;
        }
        moves
    }

    /// Pairs must join opposite signs and be non-crossing.
    pub fn check_pairs(&self) -> Result<()> {
        let n = self.curves.len();
        let mut used = vec![false; n];
        for &[x, y] in &self.pairs {
            if x >= n || y >= n || x == y || used[x] || used[y] {
                return Err(Error::Input(format!("bad completion pair [{x}, {y}]")));
            }
            used[x] = true;
            used[y] = true;
            if self.curves[x].sign == self.curves[y].sign {
                return Err(Error::Input(format!(
                    "completion pair [{x}, {y}] joins curves of the same orientation"
                )));
            }
        }
        for (i, &[a, b]) in self.pairs.iter().enumerate() {
            for &[c, d] in &self.pairs[i + 1..] {
                let inside = |z: usize| if a < b { a < z && z < b } else { z > a || z < b };
                if inside(c) != inside(d) {
                    return Err(Error::Input("completion annuli cross".into()));
                }
            }
        }
        Ok(())
    }
}

/// Cyclic innermost matching: repeatedly pair a curve of sign `open` with
/// the next remaining curve when that one has the opposite sign.
pub fn innermost_pairs(curves: &[PoleCurve], open: i64) -> Vec<[usize; 2]> {
    let n = curves.len();
    let mut live = vec![true; n];
    let mut pairs = Vec::new();
    loop {
        let mut found = None;
        for x in 0..n {
            if !live[x] || curves[x].sign != open {
                continue;
            }
            let y = (1..n).map(|k| (x + k) % n).find(|&y| live[y]);
            if let Some(y) = y {
                if curves[y].sign == -open {
                    found = Some((x, y));
                    break;
                }
            }
        }
        let Some((x, y)) = found else { break };
        live[x] = false;
        live[y] = false;
        pairs.push([x, y]);
    }
    pairs.sort();
    pairs
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CuspSurfaceData {
    pub id: usize,
    pub kind: TubeKind,
    pub restriction: [i64; 2],
    pub components: Vec<BoundaryComponent>,
    /// Solid tubes: meridian disks, equal to the core pairing `a_i`.
    pub meridian_disks: usize,
    pub core_pairing: i64,
    /// Pairs of oppositely oriented meridian curves joined by annuli.
    pub meridian_annuli: usize,
    pub ladderpole_pairs: usize,
    /// Hollow tubes: curves joined to the boundary of the manifold.
    pub boundary_crossing: usize,
    pub trivial: usize,
    pub model: TubeModel,
    /// Component index of each curve of the model.
    pub model_components: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerCheck {
    /// Sum of face weights, the pairing with the full cycle of the dual graph.
    pub gamma_graph: i64,
    /// Pairing with the solid tube cores.
    pub gamma_cores: i64,
    /// Sum over edges of the common fan sums.
    pub edge_sum: i64,
    pub cell_route: i64,
    pub euler_class_route: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CarriedSurface {
    pub weights: Cocycle,
    pub total_weight: i64,
    pub euler_char: i64,
    pub euler: EulerCheck,
    pub cusps: Vec<CuspSurfaceData>,
    pub completion: Completion,
}

impl CarriedSurface {
    pub fn ladderpole_pairs(&self) -> usize {
        self.cusps.iter().map(|c| c.ladderpole_pairs).sum()
    }
}

pub fn check_nonnegative(w: &[i64]) -> Result<()> {
    match w.iter().position(|&x| x < 0) {
        Some(f) => Err(Error::NegativeWeight { face: f, weight: w[f] }),
        None => Ok(()),
    }
}

/// `chi = sum_f w - sum_e W(e) + sum a_i`, from the cells of the truncated
/// surface and its meridian disks.
pub fn euler_char_cells(tri: &VeeringTriangulation, w: &[i64], cores: i64) -> i64 {
    let faces: i64 = w.iter().sum();
    let edges: i64 = (0..tri.num_edges()).map(|e| fan_sum(tri, w, e)).sum();
    faces - edges + cores
}

/// `chi = e(u) = (2 <gamma, u> - <Gamma, u>) / 2`.
pub fn euler_class_value(gamma_graph: i64, gamma_cores: i64) -> BigRational {
    BigRational::new(BigInt::from(2 * gamma_cores - gamma_graph), BigInt::from(2))
}

pub fn carried_surface(
    tri: &VeeringTriangulation,
    cusps: &Cusps,
    tubes: &TubeSystem,
    w: &[i64],
    completion: &Completion,
) -> Result<CarriedSurface> {
    check_cocycle(tri, w)?;
    check_nonnegative(w)?;
    if tubes.meridians.len() != cusps.len() {
        return Err(Error::Tubes(format!(
            "tube system has {} cusps, triangulation has {}",
            tubes.meridians.len(),
            cusps.len()
        )));
    }
    let filled = filled_subspace_check(cusps, tubes, w)?;
    if !filled.extends {
        return Err(Error::NotFilled(filled.obstructions[0]));
    }
    if let Some(c) = filled.cores.iter().find(|c| c.a < 0) {
        return Err(Error::NegativeCore { cusp: c.cusp, a: c.a });
    }
    let curves = resolve_boundary(tri, cusps, tubes, w)?;
    let mut data = Vec::new();
    for (mc, cusp) in curves.into_iter().zip(&cusps.cusps) {
        let restriction = restrict_to_cusp(cusp, w);
        if (mc.class[0], mc.class[1]) != restriction {
            return Err(Error::Internal(format!(
                "cusp {}: resolved curves have class {:?}, restriction is {:?}",
                cusp.id, mc.class, restriction
            )));
        }
        data.push(complete_cusp(cusp, tubes, mc, restriction, completion)?);
    }
    let gamma_cores: i64 = data.iter().map(|d| d.core_pairing).sum();
    if gamma_cores != filled.gamma_pairing {
        return Err(Error::Internal(
            "meridian disk count disagrees with the core pairing".into(),
        ));
    }
    let gamma_graph: i64 = w.iter().sum();
    let edge_sum: i64 = (0..tri.num_edges()).map(|e| fan_sum(tri, w, e)).sum();
    let disks: i64 = data.iter().map(|d| d.meridian_disks as i64).sum();
    let cell_route = gamma_graph - edge_sum + disks;
    let e = euler_class_value(gamma_graph, gamma_cores);
    if !e.is_integer() || e.to_integer() != BigInt::from(cell_route) {
        return Err(Error::Internal(format!(
            "Euler characteristic routes disagree: {cell_route} from cells, {e} from the Euler class"
        )));
    }
    Ok(CarriedSurface {
        weights: Cocycle(w.to_vec()),
        total_weight: gamma_graph,
        euler_char: cell_route,
        euler: EulerCheck {
            gamma_graph,
            gamma_cores,
            edge_sum,
            cell_route,
            euler_class_route: cell_route,
        },
        cusps: data,
        completion: completion.clone(),
    })
}

fn complete_cusp(
    cusp: &CuspComplex,
    tubes: &TubeSystem,
    mc: Multicurve,
    restriction: (i64, i64),
    completion: &Completion,
) -> Result<CuspSurfaceData> {
    let meridian = tubes.meridians[cusp.id];
    let kind = if meridian.is_some() {
        TubeKind::Solid
    } else {
        TubeKind::Hollow
    };
    let mut lp: Vec<usize> = (0..mc.components.len())
        .filter(|&i| mc.components[i].kind == ComponentKind::Ladderpole)
        .collect();
    lp.sort_by_key(|&i| (mc.components[i].pole, mc.components[i].height));
    let curves: Vec<PoleCurve> = lp
        .iter()
        .map(|&i| PoleCurve {
            pole: mc.components[i].pole.unwrap(),
            sign: mc.components[i].class[0].signum(),
        })
        .collect();
    let pairs = match completion {
        Completion::InnermostPlus => innermost_pairs(&curves, 1),
        Completion::InnermostMinus => innermost_pairs(&curves, -1),
        Completion::Explicit(map) => match map.get(&cusp.id) {
            Some(p) => p.clone(),
            None => innermost_pairs(&curves, 1),
        },
    };
    let model = TubeModel {
        cusp: cusp.id,
        kind,
        up_ladders: cusp.up_ladders(),
        meridian: meridian.map(|(p, q)| [p, q]),
        curves,
        pairs,
    };
    model.check_pairs()?;
    let paired = 2 * model.pairs.len();
    let trivial = mc.count(ComponentKind::Trivial);
    let (mut disks, mut core, mut meridian_annuli, mut boundary_crossing) = (0, 0, 0, 0);
    match meridian {
        Some(m) => {
            if lp.len() != paired {
                return Err(Error::Input(format!(
                    "cusp {}: completion leaves ladderpole curves unpaired in a solid tube",
                    cusp.id
                )));
            }
            if mc.count(ComponentKind::Other) > 0 {
                return Err(Error::NotFilled(cusp.id));
            }
            let plus = mc
                .components
                .iter()
                .filter(|c| c.kind == ComponentKind::Meridian && (c.class[0], c.class[1]) == m)
                .count();
            let minus = mc.count(ComponentKind::Meridian) - plus;
            core = plus as i64 - minus as i64;
            if core < 0 {
                return Err(Error::NegativeCore { cusp: cusp.id, a: core });
            }
            disks = core as usize;
            meridian_annuli = minus;
            let expect = -restriction.1;
            if core * -m.1 != expect {
                return Err(Error::Internal(format!("cusp {}: meridian count mismatch", cusp.id)));
            }
        }
        None => {
            boundary_crossing = mc.components.len() - trivial - paired;
        }
    }
    Ok(CuspSurfaceData {
        id: cusp.id,
        kind,
        restriction: [restriction.0, restriction.1],
        components: mc.components,
        meridian_disks: disks,
        core_pairing: core,
        meridian_annuli,
        ladderpole_pairs: model.pairs.len(),
        boundary_crossing,
        trivial,
        model,
        model_components: lp,
    })
}

/// `w - d(1_t)`: push the surface up through tet `t`.
pub fn flip_up(tri: &VeeringTriangulation, w: &[i64], t: usize) -> Result<Cocycle> {
    if t >= tri.num_tets() {
        return Err(Error::Input(format!("no tetrahedron {t}")));
    }
    if tri.bottom_faces(t).iter().any(|&f| w[f] < 1) {
        return Err(Error::FlipUnavailable(t));
    }
    let mut c = vec![0i64; tri.num_tets()];
    c[t] = 1;
    Ok(Cocycle(w.to_vec()).sub(&coboundary(tri, &c)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlipWalk {
    /// Tets flipped, in order.
    pub flips: Vec<usize>,
    /// Index of the first repeated position, if the walk closed up.
    pub cycle_start: Option<usize>,
    pub cycle_length: Option<usize>,
    /// The walk reached a position admitting no flip.
    pub stuck: bool,
}

/// Flip the lowest available tet repeatedly, hashing positions to detect
/// a revisit.
pub fn flip_walk(tri: &VeeringTriangulation, w: &[i64], max_steps: usize) -> Result<FlipWalk> {
    check_cocycle(tri, w)?;
    check_nonnegative(w)?;
    let mut seen: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let mut cur = w.to_vec();
    let mut flips = Vec::new();
    for step in 0..=max_steps {
        if let Some(&k) = seen.get(&cur) {
            return Ok(FlipWalk {
                flips,
                cycle_start: Some(k),
                cycle_length: Some(step - k),
                stuck: false,
            });
        }
        seen.insert(cur.clone(), step);
        let Some(t) = (0..tri.num_tets()).find(|&t| tri.bottom_faces(t).iter().all(|&f| cur[f] >= 1)) else {
            return Ok(FlipWalk {
                flips,
                cycle_start: None,
                cycle_length: None,
                stuck: true,
            });
        };
        cur = flip_up(tri, &cur, t)?.0;
        flips.push(t);
    }
    Ok(FlipWalk {
        flips,
        cycle_start: None,
        cycle_length: None,
        stuck: false,
    })
}

/// All nonnegative representatives reachable from `w` by up-flips, and
/// whether the flip graph on them has a directed cycle.
pub fn flip_graph_has_cycle(tri: &VeeringTriangulation, w: &[i64], cap: usize) -> Result<Option<bool>> {
    check_nonnegative(w)?;
    let mut index: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let mut adj: Vec<Vec<usize>> = Vec::new();
    let mut queue = vec![w.to_vec()];
    index.insert(w.to_vec(), 0);
    adj.push(Vec::new());
    let mut k = 0;
    while k < queue.len() {
        if queue.len() > cap {
            return Ok(None);
        }
        let cur = queue[k].clone();
        for t in 0..tri.num_tets() {
            if let Ok(next) = flip_up(tri, &cur, t) {
                let id = match index.get(&next.0) {
                    Some(&id) => id,
                    None => {
                        let id = queue.len();
                        index.insert(next.0.clone(), id);
                        queue.push(next.0);
                        adj.push(Vec::new());
                        id
                    }
                };
                adj[k].push(id);
            }
        }
        k += 1;
    }
    // Kahn: a directed cycle exists iff not every vertex gets removed.
    let n = adj.len();
    let mut indeg = vec![0usize; n];
    for a in &adj {
        for &b in a {
            indeg[b] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(v) = stack.pop() {
        removed += 1;
        for &b in &adj[v] {
            indeg[b] -= 1;
            if indeg[b] == 0 {
                stack.push(b);
            }
        }
    }
    Ok(Some(removed < n))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormResult {
    /// Exact value as a reduced fraction.
    pub value: String,
    pub gamma_graph: i64,
    pub gamma_cores: i64,
    pub certificate: CarriedSurface,
    pub note: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum NormOutcome {
    Norm(NormResult),
    OffCone { certificate: ConeCertificate },
}

/// The Thurston norm of the class of `w` when it lies in the carried cone:
/// `x(u) = -e(u) = (<Gamma, u> - 2 <gamma, u>) / 2`.
pub fn thurston_norm(
    tri: &VeeringTriangulation,
    cusps: &Cusps,
    tubes: &TubeSystem,
    w: &[i64],
    seed: u64,
) -> Result<NormOutcome> {
    let cert = cone_membership(tri, w, seed)?;
    let witness = match &cert {
        ConeCertificate::Member { weights, .. } => weights.clone(),
        ConeCertificate::NonMember { .. } => return Ok(NormOutcome::OffCone { certificate: cert }),
    };
    let surface = carried_surface(tri, cusps, tubes, &witness.0, &Completion::default())?;
    let value = -euler_class_value(surface.euler.gamma_graph, surface.euler.gamma_cores);
    if value != BigRational::from_integer(BigInt::from(-surface.euler_char)) {
        return Err(Error::Internal("norm disagrees with the certificate".into()));
    }
    Ok(NormOutcome::Norm(NormResult {
        value: value.to_string(),
        gamma_graph: surface.euler.gamma_graph,
        gamma_cores: surface.euler.gamma_cores,
        certificate: surface,
        note: "e_phi = e_tau for the flow of the triangulation",
    }))
}

/// Tets of the tips of a ladder.
fn ladder_tets(cusp: &CuspComplex, ladder: usize) -> Vec<usize> {
    let mut t: Vec<usize> = cusp.ladders[ladder]
        .tips
        .iter()
        .map(|&tip| cusp.tips[tip].tet)
        .collect();
    t.sort_unstable();
    t.dedup();
    t
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnnulusMove {
    pub cusp: usize,
    pub ladder: usize,
    /// +1 if the ladder's tets were flipped up, -1 if down.
    pub direction: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EfficientPosition {
    pub surface: CarriedSurface,
    pub moves: Vec<AnnulusMove>,
}

/// Remove innermost removable annuli by rerouting the surface across the
/// ladder between their boundary curves (the face weights change by the
/// coboundary of the ladder's tets). A move is kept only if it lowers the
/// total number of ladderpole pairs, so the process terminates.
pub fn efficient_position(
    tri: &VeeringTriangulation,
    cusps: &Cusps,
    tubes: &TubeSystem,
    surface: &CarriedSurface,
) -> Result<EfficientPosition> {
    let mut cur = surface.clone();
    let mut moves = Vec::new();
    'outer: loop {
        for data in &cur.cusps {
            let cusp = &cusps.cusps[data.id];
            for k in data.model.removable() {
                let [x, y] = data.model.pairs[k];
                let (jx, jy) = (data.model.curves[x].pole, data.model.curves[y].pole);
                let mut ladders = vec![cusp.ladder_order[jx]];
                if jy != jx {
                    ladders.push(cusp.ladder_order[jy]);
                }
                let n = cusp.ladder_order.len();
                ladders.push(cusp.ladder_order[(jx + n - 1) % n]);
                for l in ladders {
                    let tets = ladder_tets(cusp, l);
                    for dir in [1i64, -1] {
                        let mut c = vec![0i64; tri.num_tets()];
                        for &t in &tets {
                            c[t] = 1;
                        }
                        let d = coboundary(tri, &c).scale(dir);
                        let w = cur.weights.sub(&d);
                        if !w.is_nonnegative() {
                            continue;
                        }
                        let Ok(next) = carried_surface(tri, cusps, tubes, &w.0, &cur.completion) else {
                            continue;
                        };
                        if next.ladderpole_pairs() < cur.ladderpole_pairs() {
                            moves.push(AnnulusMove {
                                cusp: data.id,
                                ladder: l,
                                direction: dir,
                            });
                            cur = next;
                            continue 'outer;
                        }
                    }
                }
            }
        }
        break;
    }
    Ok(EfficientPosition { surface: cur, moves })
}

/// Distinct nonnegative representatives of the class of `w` with total
/// weight at most `cap`, found by exhaustive search over potentials.
pub fn nonnegative_representatives(tri: &VeeringTriangulation, w: &[i64], cap: i64) -> Vec<Cocycle> {
    let n = tri.num_tets();
    let mut out: HashSet<Vec<i64>> = HashSet::new();
    // Potentials are fixed to 0 at tet 0; each face bounds the difference
    // of its endpoints by the weights, so a window of size cap suffices.
    let bound = cap.max(0) + w.iter().map(|x| x.abs()).max().unwrap_or(0);
    let mut c = vec![0i64; n];
    fn rec(
        tri: &VeeringTriangulation,
        w: &[i64],
        cap: i64,
        bound: i64,
        c: &mut Vec<i64>,
        t: usize,
        out: &mut HashSet<Vec<i64>>,
    ) {
        if t == c.len() {
            let v: Vec<i64> = (0..tri.num_faces())
                .map(|f| w[f] + c[tri.above(f)] - c[tri.below(f)])
                .collect();
            if v.iter().all(|&x| x >= 0) && v.iter().sum::<i64>() <= cap {
                out.insert(v);
            }
            return;
        }
        for x in -bound..=bound {
            c[t] = x;
            rec(tri, w, cap, bound, c, t + 1, out);
        }
    }
    if n > 0 {
        rec(tri, w, cap, bound, &mut c, 1, &mut out);
    }
    let mut v: Vec<Cocycle> = out.into_iter().map(Cocycle).collect();
    v.sort();
    v
}
