//! Honest versus almost transversality, arc systems in prong disks and
//! annuli, and the blowup graphs dual to them.
//!
//! Boundary conventions: prong `x` sits at the start of segment `x`, which
//! runs counterclockwise to prong `x + 1`. Even prongs are stable (sources
//! of the boundary orientation), odd prongs unstable (sinks), so even
//! segments are oriented counterclockwise and odd ones clockwise. Endpoint
//! positions increase counterclockwise within a segment. Segment `-1` is the
//! inner boundary of the annulus model.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::carry::{carried_surface, efficient_position, CarriedSurface, Completion, PoleCurve, TubeModel};
use crate::cusp::{Cusps, TubeKind, TubeSystem};
use crate::error::{Error, Result};
use crate::flowgraph::{brute_force_member, cone_membership, dual_graph, simple_cycles, ConeCertificate};
use crate::homology::{check_cocycle, Cocycle};
use crate::tri::VeeringTriangulation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Disk,
    Annulus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// An endpoint `[segment, position]`.
pub type Endpoint = (i64, usize);

pub const INNER: i64 = -1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub from: Endpoint,
    pub to: Endpoint,
    /// Coorientation, relative to travelling from `from` to `to`.
    pub side: Side,
}

impl Arc {
    pub fn reversed(&self) -> Arc {
        Arc {
            from: self.to,
            to: self.from,
            side: self.side.flip(),
        }
    }

    pub fn is_inner(&self) -> bool {
        self.from.0 == INNER || self.to.0 == INNER
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcSystem {
    pub model: Model,
    pub prongs: usize,
    #[serde(default)]
    pub twist: i64,
    #[serde(default)]
    pub arcs: Vec<Arc>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::ArcSystem(msg.into())
}

/// Whether the coorientation at an outer endpoint agrees with the segment
/// orientation. Left of a chord points clockwise at its start and
/// counterclockwise at its end.
pub fn coherent_at(segment: i64, side: Side, is_from: bool) -> bool {
    let odd = segment.rem_euclid(2) == 1;
    match (side, is_from) {
        (Side::Left, true) | (Side::Right, false) => odd,
        (Side::Right, true) | (Side::Left, false) => !odd,
    }
}

impl ArcSystem {
    pub fn parse(text: &str) -> Result<ArcSystem> {
        let a: ArcSystem = serde_json::from_str(text).map_err(|e| Error::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        a.validate()?;
        Ok(a)
    }

    pub fn twist_mod(&self) -> i64 {
        self.twist.rem_euclid(self.prongs.max(1) as i64)
    }

    fn inner_count(&self) -> usize {
        self.arcs.iter().filter(|a| a.is_inner()).count()
    }

    /// Outer endpoints in counterclockwise order, with their arc and end.
    fn outer_order(&self) -> Vec<(Endpoint, usize, bool)> {
        let mut v: Vec<(Endpoint, usize, bool)> = Vec::new();
        for (i, a) in self.arcs.iter().enumerate() {
            if a.from.0 != INNER {
                v.push((a.from, i, true));
            }
            if a.to.0 != INNER {
                v.push((a.to, i, false));
            }
        }
        v.sort();
        v
    }

    /// Image under the twist, normalized.
    pub fn rotate(&self) -> Vec<Arc> {
        let n = self.prongs as i64;
        let k = self.twist_mod();
        let m = self.inner_count() as i64;
        let inner_shift = if n > 0 { m * k / n } else { 0 };
        let map = |e: Endpoint| -> Endpoint {
            if e.0 == INNER {
                (INNER, ((e.1 as i64 + inner_shift).rem_euclid(m.max(1))) as usize)
            } else {
                ((e.0 + k).rem_euclid(n), e.1)
            }
        };
        let mut out: Vec<Arc> = self
            .arcs
            .iter()
            .map(|a| Arc {
                from: map(a.from),
                to: map(a.to),
                side: a.side,
            })
            .collect();
        out.sort();
        out
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.prongs;
        if n == 0 || n % 2 == 1 {
            return Err(bad(format!("prong count {n} must be positive and even")));
        }
        if self.model == Model::Disk && n < 4 {
            return Err(bad("a prong disk needs at least 4 prongs"));
        }
        if self.twist_mod() % 2 != 0 {
            return Err(bad("twist must preserve the stable/unstable alternation"));
        }
        let mut ends = BTreeSet::new();
        for (i, a) in self.arcs.iter().enumerate() {
            for e in [a.from, a.to] {
                if e.0 == INNER {
                    if self.model == Model::Disk {
                        return Err(bad(format!("arc {i} ends on the inner boundary of a disk")));
                    }
                } else if e.0 < 0 || e.0 >= n as i64 {
                    return Err(bad(format!("arc {i}: no segment {}", e.0)));
                }
                if !ends.insert(e) {
                    return Err(bad(format!("endpoint {e:?} used twice")));
                }
            }
            if a.from.0 == INNER && a.to.0 == INNER {
                return Err(bad(format!("arc {i} has both ends on the inner boundary")));
            }
            if a.from.0 != INNER && !coherent_at(a.from.0, a.side, true) {
                return Err(bad(format!("arc {i} is not coherent at its start")));
            }
            if a.to.0 != INNER && !coherent_at(a.to.0, a.side, false) {
                return Err(bad(format!("arc {i} is not coherent at its end")));
            }
        }
        let m = self.inner_count();
        if m > 0 {
            let inner: BTreeSet<usize> = ends.iter().filter(|e| e.0 == INNER).map(|e| e.1).collect();
            if inner != (0..m).collect() {
                return Err(bad("inner positions must be 0..m"));
            }
            if (m as i64 * self.twist_mod()) % n as i64 != 0 {
                return Err(bad("twist does not act on the inner endpoints"));
            }
        }
        self.check_planar()?;
        let mut sorted = self.arcs.clone();
        sorted.sort();
        if self.rotate() != sorted {
            return Err(bad("arc system is not symmetric under the twist"));
        }
        Ok(())
    }

    fn check_planar(&self) -> Result<()> {
        let order = self.outer_order();
        let idx: BTreeMap<(usize, bool), usize> = order.iter().enumerate().map(|(k, &(_, a, f))| ((a, f), k)).collect();
        let len = order.len();
        // Strict ccw interval (x, y) of outer positions.
        let inside = |x: usize, y: usize, z: usize| {
            let d = (y + len - x) % len;
            let e = (z + len - x) % len;
            e > 0 && e < d
        };
        let outer: Vec<usize> = (0..self.arcs.len()).filter(|&i| !self.arcs[i].is_inner()).collect();
        for (u, &i) in outer.iter().enumerate() {
            let (a, b) = (idx[&(i, true)], idx[&(i, false)]);
            for &j in &outer[u + 1..] {
                let (c, d) = (idx[&(j, true)], idx[&(j, false)]);
                if inside(a, b, c) != inside(a, b, d) {
                    return Err(bad(format!("arcs {i} and {j} cross")));
                }
                if self.model == Model::Annulus && inside(a, b, c) && inside(c, d, a) {
                    return Err(bad(format!("arcs {i} and {j} cut off disks covering the hole")));
                }
            }
        }
        if self.model == Model::Annulus {
            let mut spokes = Vec::new();
            for (i, arc) in self.arcs.iter().enumerate() {
                if !arc.is_inner() {
                    continue;
                }
                let (o, inner) = if arc.from.0 == INNER {
                    (idx[&(i, false)], arc.from.1)
                } else {
                    (idx[&(i, true)], arc.to.1)
                };
                for &j in &outer {
                    if inside(idx[&(j, true)], idx[&(j, false)], o) {
                        return Err(bad(format!(
                            "arc {i} reaches the hole from inside the disk cut off by arc {j}"
                        )));
                    }
                }
                spokes.push((o, inner));
            }
            spokes.sort();
            let m = spokes.len();
            if m > 0 {
                let shift = spokes[0].1;
                if spokes.iter().enumerate().any(|(k, s)| s.1 != (shift + k) % m) {
                    return Err(bad("arcs to the inner boundary cross"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowupVertex {
    /// Prongs attached here.
    pub prongs: Vec<usize>,
    /// On the inner circle of the annulus model.
    pub circle: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Arc,
    Circle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowupEdge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
    /// Arcs of the input in this edge's parallel class.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub arcs: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Tree,
    CircleGraph,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowupGraph {
    pub kind: GraphKind,
    pub prongs: usize,
    pub vertices: Vec<BlowupVertex>,
    pub edges: Vec<BlowupEdge>,
    /// Vertex of each prong.
    pub prong_vertex: Vec<usize>,
    /// Arcs kept after parallel classes and exclusions.
    pub reduced_arcs: Vec<usize>,
    pub needs_blowup: bool,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Item {
    Prong(usize),
    End(usize, bool),
}

/// Prongs and the outer endpoints of `keep`, counterclockwise from prong 0.
fn boundary_items(sys: &ArcSystem, keep: &[usize]) -> Vec<Item> {
    let keep: BTreeSet<usize> = keep.iter().copied().collect();
    let mut by_segment: Vec<Vec<(usize, Item)>> = vec![Vec::new(); sys.prongs];
    for &i in &keep {
        let a = &sys.arcs[i];
        for (e, is_from) in [(a.from, true), (a.to, false)] {
            if e.0 != INNER {
                by_segment[e.0 as usize].push((e.1, Item::End(i, is_from)));
            }
        }
    }
    let mut out = Vec::new();
    for (x, mut seg) in by_segment.into_iter().enumerate() {
        out.push(Item::Prong(x));
        seg.sort_by_key(|s| s.0);
        out.extend(seg.into_iter().map(|s| s.1));
    }
    out
}

/// Representatives (least index) of the parallel classes among the outer
/// arcs of `keep`; inner endpoints in `blockers` separate classes.
fn parallel_representatives(sys: &ArcSystem, keep: &[usize], blockers: &[usize]) -> Vec<usize> {
    let mut all: Vec<usize> = keep.iter().chain(blockers).copied().collect();
    all.sort_unstable();
    all.dedup();
    let items = boundary_items(sys, &all);
    let len = items.len();
    let pos: BTreeMap<(usize, bool), usize> = items
        .iter()
        .enumerate()
        .filter_map(|(k, it)| match *it {
            Item::End(a, f) => Some(((a, f), k)),
            Item::Prong(_) => None,
        })
        .collect();
    let keep_set: BTreeSet<usize> = keep.iter().copied().collect();
    let mut dsu = Dsu::new(sys.arcs.len());
    for &x in keep {
        if sys.arcs[x].is_inner() {
            continue;
        }
        let (i, j) = (pos[&(x, true)], pos[&(x, false)]);
        for (p, q) in [(i, j), (j, i)] {
            let (u, v) = (items[(p + 1) % len], items[(q + len - 1) % len]);
            if let (Item::End(y, _), Item::End(z, _)) = (u, v) {
                if y == z && y != x && keep_set.contains(&y) && !sys.arcs[y].is_inner() {
                    dsu.union(x, y);
                }
            }
        }
    }
    let mut reps: Vec<usize> = keep.iter().copied().filter(|&x| dsu.find(x) == x).collect();
    reps.sort_unstable();
    reps
}

fn members_of(sys: &ArcSystem, keep: &[usize]) -> BTreeMap<usize, Vec<usize>> {
    // Recompute the class of every arc under the final representative set.
    let mut dsu = Dsu::new(sys.arcs.len());
    let all: Vec<usize> = (0..sys.arcs.len()).collect();
    let items = boundary_items(sys, &all);
    let len = items.len();
    let pos: BTreeMap<(usize, bool), usize> = items
        .iter()
        .enumerate()
        .filter_map(|(k, it)| match *it {
            Item::End(a, f) => Some(((a, f), k)),
            Item::Prong(_) => None,
        })
        .collect();
    for x in 0..sys.arcs.len() {
        if sys.arcs[x].is_inner() {
            continue;
        }
        let (i, j) = (pos[&(x, true)], pos[&(x, false)]);
        for (p, q) in [(i, j), (j, i)] {
            if let (Item::End(y, _), Item::End(z, _)) = (items[(p + 1) % len], items[(q + len - 1) % len]) {
                if y == z && y != x && !sys.arcs[y].is_inner() {
                    dsu.union(x, y);
                }
            }
        }
    }
    let mut out: BTreeMap<usize, Vec<usize>> = keep.iter().map(|&k| (k, Vec::new())).collect();
    for x in 0..sys.arcs.len() {
        let r = dsu.find(x);
        if let Some(&k) = keep.iter().find(|&&k| dsu.find(k) == r) {
            out.get_mut(&k).unwrap().push(x);
        }
    }
    out
}

fn adjacent_quadrants(n: usize, a: &Arc) -> bool {
    let d = (a.to.0 - a.from.0).rem_euclid(n as i64);
    d == 1 || d == n as i64 - 1
}

/// The arcs that survive to the blowup: one per parallel class, without
/// adjacent-quadrant arcs or arcs meeting the inner boundary.
pub fn reduced_arcs(sys: &ArcSystem) -> Vec<usize> {
    let all: Vec<usize> = (0..sys.arcs.len()).collect();
    let inner: Vec<usize> = all.iter().copied().filter(|&i| sys.arcs[i].is_inner()).collect();
    let pass1 = parallel_representatives(sys, &all, &inner);
    let kept: Vec<usize> = pass1
        .into_iter()
        .filter(|&i| !sys.arcs[i].is_inner() && !adjacent_quadrants(sys.prongs, &sys.arcs[i]))
        .collect();
    parallel_representatives(sys, &kept, &[])
}

pub fn blowup_graph(sys: &ArcSystem) -> Result<BlowupGraph> {
    sys.validate()?;
    let reduced = reduced_arcs(sys);
    let classes = members_of(sys, &reduced);
    let items = boundary_items(sys, &reduced);
    let n = sys.prongs;
    // Endpoints in cyclic order; gap g follows endpoint g.
    let ends: Vec<(usize, bool)> = items
        .iter()
        .filter_map(|it| match *it {
            Item::End(a, f) => Some((a, f)),
            Item::Prong(_) => None,
        })
        .collect();
    let m = ends.len();
    let end_index: BTreeMap<(usize, bool), usize> = ends.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    // Gap containing each item position.
    let mut gap_of_item = vec![0usize; items.len()];
    let mut last = m.wrapping_sub(1);
    for (k, it) in items.iter().enumerate() {
        if let Item::End(a, f) = *it {
            last = end_index[&(a, f)];
        }
        gap_of_item[k] = if m == 0 { 0 } else { last % m };
    }
    let gaps = m.max(1);
    let mut dsu = Dsu::new(gaps);
    for &x in &reduced {
        let (a, b) = (end_index[&(x, true)], end_index[&(x, false)]);
        dsu.union((a + m - 1) % m, b);
        dsu.union((b + m - 1) % m, a);
    }
    let hole = if sys.model == Model::Annulus {
        let mut covered = vec![false; gaps];
        for &x in &reduced {
            let (a, b) = (end_index[&(x, true)], end_index[&(x, false)]);
            let mut g = a;
            while g != b {
                covered[g] = true;
                g = (g + 1) % m;
            }
        }
        let g = (0..gaps)
            .find(|&g| !covered[g])
            .ok_or_else(|| Error::Internal("no region meets the inner boundary".into()))?;
        Some(dsu.find(g))
    } else {
        None
    };

    let mut vertices: Vec<BlowupVertex> = Vec::new();
    let mut region_vertex: BTreeMap<usize, usize> = BTreeMap::new();
    let mut prong_vertex = vec![usize::MAX; n];
    // Circle items in counterclockwise order: prongs and hole-facing arcs.
    let mut circle_items: Vec<Item> = Vec::new();
    let mut arc_circle_vertex: BTreeMap<usize, usize> = BTreeMap::new();
    for (k, it) in items.iter().enumerate() {
        match *it {
            Item::Prong(x) => {
                let r = dsu.find(gap_of_item[k]);
                if Some(r) == hole {
                    prong_vertex[x] = vertices.len();
                    vertices.push(BlowupVertex {
                        prongs: vec![x],
                        circle: true,
                    });
                    circle_items.push(*it);
                } else {
                    let v = *region_vertex.entry(r).or_insert_with(|| {
                        vertices.push(BlowupVertex {
                            prongs: Vec::new(),
                            circle: false,
                        });
                        vertices.len() - 1
                    });
                    vertices[v].prongs.push(x);
                    prong_vertex[x] = v;
                }
            }
            Item::End(a, true) => {
                let e = end_index[&(a, true)];
                if Some(dsu.find((e + m - 1) % m)) == hole {
                    arc_circle_vertex.insert(a, vertices.len());
                    vertices.push(BlowupVertex {
                        prongs: Vec::new(),
                        circle: true,
                    });
                    circle_items.push(*it);
                }
            }
            Item::End(_, false) => {}
        }
    }
    for &x in &reduced {
        let a = end_index[&(x, true)];
        for r in [dsu.find((a + m - 1) % m), dsu.find(a)] {
            if Some(r) != hole && !region_vertex.contains_key(&r) {
                region_vertex.insert(r, vertices.len());
                vertices.push(BlowupVertex {
                    prongs: Vec::new(),
                    circle: false,
                });
            }
        }
    }

    let vertex_at = |r: usize, arc: usize| -> usize {
        if Some(r) == hole {
            arc_circle_vertex[&arc]
        } else {
            region_vertex[&r]
        }
    };
    let mut edges = Vec::new();
    let mut arc_edge: BTreeMap<usize, usize> = BTreeMap::new();
    for &x in &reduced {
        let a = end_index[&(x, true)];
        let left = vertex_at(dsu.find((a + m - 1) % m), x);
        let right = vertex_at(dsu.find(a), x);
        let (from, to) = match sys.arcs[x].side {
            Side::Left => (right, left),
            Side::Right => (left, right),
        };
        arc_edge.insert(x, edges.len());
        edges.push(BlowupEdge {
            from,
            to,
            kind: EdgeKind::Arc,
            arcs: classes[&x].clone(),
        });
    }
    let circle_vertex = |it: &Item| -> usize {
        match *it {
            Item::Prong(x) => prong_vertex[x],
            Item::End(a, _) => arc_circle_vertex[&a],
        }
    };
    let mut circle_edge: BTreeMap<usize, usize> = BTreeMap::new();
    let c = circle_items.len();
    for k in 0..c {
        let (u, v) = (
            circle_vertex(&circle_items[k]),
            circle_vertex(&circle_items[(k + 1) % c]),
        );
        circle_edge.insert(u, edges.len());
        // Orientation is assigned by the quadrant walks below.
        edges.push(BlowupEdge {
            from: u,
            to: v,
            kind: EdgeKind::Circle,
            arcs: Vec::new(),
        });
    }

    let mut graph = BlowupGraph {
        kind: if sys.model == Model::Disk {
            GraphKind::Tree
        } else {
            GraphKind::CircleGraph
        },
        prongs: n,
        vertices,
        edges,
        prong_vertex,
        needs_blowup: !reduced.is_empty(),
        reduced_arcs: reduced,
    };
    orient_and_check(
        sys,
        &mut graph,
        &items,
        &end_index,
        m,
        &mut dsu,
        hole,
        &arc_edge,
        &circle_edge,
        &arc_circle_vertex,
    )?;
    check_alternation(sys, &graph)?;
    Ok(graph)
}

/// Walk each quadrant from prong `x` to prong `x + 1`. The path must follow
/// edge orientations on even quadrants and oppose them on odd ones; circle
/// edges receive their orientation from the walk.
#[allow(clippy::too_many_arguments)]
fn orient_and_check(
    sys: &ArcSystem,
    g: &mut BlowupGraph,
    items: &[Item],
    end_index: &BTreeMap<(usize, bool), usize>,
    m: usize,
    dsu: &mut Dsu,
    hole: Option<usize>,
    arc_edge: &BTreeMap<usize, usize>,
    circle_edge: &BTreeMap<usize, usize>,
    arc_circle_vertex: &BTreeMap<usize, usize>,
) -> Result<()> {
    let n = sys.prongs;
    let mut assigned: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let start_of = |x: usize| items.iter().position(|it| *it == Item::Prong(x)).unwrap();
    for x in 0..n {
        let forward = x % 2 == 0;
        let mut steps: Vec<(usize, usize, usize)> = Vec::new();
        let mut cur = g.prong_vertex[x];
        let mut k = start_of(x);
        loop {
            k = (k + 1) % items.len();
            match items[k] {
                Item::Prong(y) => {
                    debug_assert_eq!(y, (x + 1) % n);
                    let v = g.prong_vertex[y];
                    if g.vertices[cur].circle && g.vertices[v].circle {
                        steps.push((circle_edge[&cur], cur, v));
                    } else if cur != v {
                        return Err(Error::NoBlowup(format!(
                            "quadrant {x} changes region without crossing an arc"
                        )));
                    }
                    break;
                }
                Item::End(a, is_from) => {
                    let e = end_index[&(a, is_from)];
                    let before = dsu.find((e + m - 1) % m);
                    let after = dsu.find(e);
                    let in_hole = |r: usize| Some(r) == hole;
                    let edge = arc_edge[&a];
                    let (ef, et) = (g.edges[edge].from, g.edges[edge].to);
                    let other = |v: usize| if v == ef { et } else { ef };
                    if in_hole(before) && is_from {
                        let cv = arc_circle_vertex[&a];
                        steps.push((circle_edge[&cur], cur, cv));
                        steps.push((edge, cv, other(cv)));
                        cur = other(cv);
                    } else if in_hole(after) && !is_from {
                        let cv = arc_circle_vertex[&a];
                        steps.push((edge, cur, cv));
                        cur = cv;
                    } else {
                        let next = other(cur);
                        steps.push((edge, cur, next));
                        cur = next;
                    }
                }
            }
        }
        for (edge, u, v) in steps {
            let want = if forward { (u, v) } else { (v, u) };
            match g.edges[edge].kind {
                EdgeKind::Arc => {
                    if (g.edges[edge].from, g.edges[edge].to) != want {
                        return Err(Error::NoBlowup(format!(
                            "quadrant {x} crosses arc class {:?} against its orientation",
                            g.edges[edge].arcs
                        )));
                    }
                }
                EdgeKind::Circle => {
                    if let Some(&prev) = assigned.get(&edge) {
                        if prev != want {
                            return Err(Error::NoBlowup(format!("circle edge {edge} receives two orientations")));
                        }
                    }
                    assigned.insert(edge, want);
                }
            }
        }
    }
    for (edge, (u, v)) in assigned {
        g.edges[edge].from = u;
        g.edges[edge].to = v;
    }
    Ok(())
}

/// Around every region, prongs and arcs alternate between sources and sinks
/// of the boundary orientation: stable prongs and incoming edges are
/// sources. Equivalently each arc's two neighbouring boundary pieces on a
/// side flow the same way, matching the edge direction.
fn check_alternation(sys: &ArcSystem, g: &BlowupGraph) -> Result<()> {
    for &x in &g.reduced_arcs {
        let a = &sys.arcs[x];
        let (sa, sb) = (a.from.0, a.to.0);
        // On the left side: the piece before `from` lies on sa and flows
        // toward the arc iff sa is even; the piece after `to` lies on sb and
        // flows toward the arc iff sb is odd.
        let toward_a = sa.rem_euclid(2) == 0;
        let toward_b = sb.rem_euclid(2) == 1;
        if toward_a != toward_b {
            return Err(Error::NoBlowup(format!("arc {x} does not alternate at its regions")));
        }
        // Left side sees a sink iff the edge points out of the left region.
        let left_sink = toward_a;
        let points_left = a.side == Side::Left;
        if left_sink == points_left {
            return Err(Error::NoBlowup(format!("arc {x} is oriented against its regions")));
        }
    }
    Ok(())
}

impl BlowupGraph {
    /// One vertex, no edges.
    pub fn is_trivial(&self) -> bool {
        self.vertices.len() == 1 && self.edges.is_empty()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64
    }

    fn colors(&self) -> Vec<u64> {
        use std::collections::hash_map::DefaultHasher;
        use std::hash::{Hash, Hasher};
        let h = |x: &dyn Fn(&mut DefaultHasher)| {
            let mut s = DefaultHasher::new();
            x(&mut s);
            s.finish()
        };
        let mut col: Vec<u64> = self
            .vertices
            .iter()
            .map(|v| h(&|s| (&v.prongs, v.circle).hash(s)))
            .collect();
        for _ in 0..self.vertices.len() + 1 {
            let next: Vec<u64> = (0..self.vertices.len())
                .map(|v| {
                    let mut outs: Vec<(EdgeKind, u64)> = Vec::new();
                    let mut ins: Vec<(EdgeKind, u64)> = Vec::new();
                    for e in &self.edges {
                        if e.from == v {
                            outs.push((e.kind, col[e.to]));
                        }
                        if e.to == v {
                            ins.push((e.kind, col[e.from]));
                        }
                    }
                    outs.sort();
                    ins.sort();
                    h(&|s| (col[v], &outs, &ins).hash(s))
                })
                .collect();
            let classes = |c: &[u64]| c.iter().collect::<BTreeSet<_>>().len();
            let done = classes(&next) == classes(&col);
            col = next;
            if done {
                break;
            }
        }
        col
    }

    /// Isomorphism of oriented graphs preserving prong labels, circle flags
    /// and edge kinds.
    pub fn isomorphic(&self, other: &BlowupGraph) -> bool {
        if self.prongs != other.prongs
            || self.kind != other.kind
            || self.vertices.len() != other.vertices.len()
            || self.edges.len() != other.edges.len()
        {
            return false;
        }
        let (ca, cb) = (self.colors(), other.colors());
        let mut sa = ca.clone();
        let mut sb = cb.clone();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return false;
        }
        let count = |g: &BlowupGraph| {
            let mut m: BTreeMap<(usize, usize, EdgeKind), usize> = BTreeMap::new();
            for e in &g.edges {
                *m.entry((e.from, e.to, e.kind)).or_default() += 1;
            }
            m
        };
        let (ea, eb) = (count(self), count(other));
        let n = self.vertices.len();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn extend(
            v: usize,
            n: usize,
            ca: &[u64],
            cb: &[u64],
            ea: &BTreeMap<(usize, usize, EdgeKind), usize>,
            eb: &BTreeMap<(usize, usize, EdgeKind), usize>,
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            if v == n {
                return ea
                    .iter()
                    .all(|(&(a, b, k), &c)| eb.get(&(map[a], map[b], k)) == Some(&c));
            }
            for w in 0..n {
                if used[w] || ca[v] != cb[w] {
                    continue;
                }
                let consistent = ea.iter().all(|(&(a, b, k), &c)| {
                    if a > v || b > v || (a != v && b != v) {
                        return true;
                    }
                    let (ma, mb) = (if a == v { w } else { map[a] }, if b == v { w } else { map[b] });
                    eb.get(&(ma, mb, k)) == Some(&c)
                });
                if !consistent {
                    continue;
                }
                map[v] = w;
                used[w] = true;
                if extend(v + 1, n, ca, cb, ea, eb, map, used) {
                    return true;
                }
                used[w] = false;
                map[v] = usize::MAX;
            }
            false
        }
        extend(0, n, &ca, &cb, &ea, &eb, &mut map, &mut used)
    }
}

/// Prong count and twist of a tube as seen by a transverse section: a
/// solid tube's meridian disk meets `2K|q|` prong quadrants, a hollow
/// tube's annulus `2K`.
pub fn tube_prongs(model: &TubeModel) -> (usize, i64, Model) {
    let k2 = model.poles();
    match model.meridian {
        Some([p, q]) => {
            let q = q.unsigned_abs() as usize;
            let n = k2 * q;
            let twist = (k2 as i64 * p.rem_euclid(q as i64)).rem_euclid(n as i64);
            (n, twist, Model::Disk)
        }
        None => (k2, 0, Model::Annulus),
    }
}

/// Orientation of a tube's section: `+1` if positively oriented curves lie
/// on even ladderpoles. Curve orientation is a function of the ladderpole's
/// parity; anything else is an internal error.
fn section_orientation(model: &TubeModel) -> Result<i64> {
    let eps = |c: &PoleCurve| if c.pole % 2 == 0 { c.sign } else { -c.sign };
    let Some(first) = model.curves.first() else {
        return Ok(1);
    };
    let e = eps(first);
    if model.curves.iter().any(|c| eps(c) != e) {
        return Err(Error::Internal(format!(
            "tube {}: ladderpole curve orientations do not alternate with the ladderpoles",
            model.cusp
        )));
    }
    Ok(e)
}

/// The arcs cut out of a transverse section of the tube by the completion
/// annuli. Ladderpole `P_j` sits in quadrant `j`; each sheet of a solid
/// tube repeats the pattern `2K` quadrants further on. Each arc runs from
/// the curve where its annulus region starts to the curve where it ends.
/// Its coorientation is on the right at a curve whose orientation agrees
/// with the section's, so the start is always coherent; the end is checked.
pub fn arc_system_from_tube(model: &TubeModel) -> Result<ArcSystem> {
    let (n, twist, kind) = tube_prongs(model);
    let eps = section_orientation(model)?;
    let k2 = model.poles();
    let sheets = if k2 == 0 { 0 } else { n / k2 };
    let rank: Vec<usize> = (0..model.curves.len())
        .map(|i| (0..i).filter(|&j| model.curves[j].pole == model.curves[i].pole).count())
        .collect();
    let mut arcs = Vec::new();
    for &[x, y] in &model.pairs {
        let g = model.gap(x, y);
        let side = if model.curves[x].sign * eps > 0 {
            Side::Right
        } else {
            Side::Left
        };
        for t in 0..sheets {
            let a = model.curves[x].pole + k2 * t;
            let b = (a + g) % n;
            arcs.push(Arc {
                from: (a as i64, rank[x]),
                to: (b as i64, rank[y]),
                side,
            });
        }
    }
    if kind == Model::Annulus {
        let paired: BTreeSet<usize> = model.pairs.iter().flatten().copied().collect();
        let mut k = 0;
        for (i, c) in model.curves.iter().enumerate() {
            if paired.contains(&i) {
                continue;
            }
            let side = if c.sign * eps > 0 { Side::Right } else { Side::Left };
            arcs.push(Arc {
                from: (c.pole as i64, rank[i]),
                to: (INNER, k),
                side,
            });
            k += 1;
        }
    }
    arcs.sort();
    let sys = ArcSystem {
        model: kind,
        prongs: n,
        twist,
        arcs,
    };
    sys.validate()
        .map_err(|e| Error::Internal(format!("tube {}: derived arc system is invalid: {e}", model.cusp)))?;
    Ok(sys)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Honest,
    Almost,
    NotTransverse,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstruction {
    /// A dual-graph cycle pairing negatively with the class.
    NonMember { cycle: Vec<usize> },
    /// A solid tube whose core pairs negatively with the class.
    NegativeCore { cusp: usize, a: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TubeTransversality {
    pub cusp: usize,
    pub kind: TubeKind,
    pub pairs_before: usize,
    pub pairs_after: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arc_system: Option<ArcSystem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blowup: Option<BlowupGraph>,
}

/// Conditions under which the carried representative is honestly transverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HonestyConditions {
    pub taut: bool,
    pub nonnegative_on_cycles: bool,
    pub kappa_intersection: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransversalityReport {
    pub verdict: Verdict,
    pub empty_class: bool,
    pub certificate: ConeCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<Obstruction>,
    pub tubes: Vec<TubeTransversality>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface: Option<CarriedSurface>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub honesty: Option<HonestyConditions>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

const CYCLE_CAP: usize = 100_000;

/// Per-tube verdict data for a tube in efficient position: the arc system
/// and blowup graph when ladderpole annuli remain.
pub fn tube_transversality(pairs_before: usize, model: &TubeModel) -> Result<TubeTransversality> {
    let mut entry = TubeTransversality {
        cusp: model.cusp,
        kind: model.kind,
        pairs_before,
        pairs_after: model.pairs.len(),
        arc_system: None,
        blowup: None,
    };
    if !model.pairs.is_empty() {
        let arcs = arc_system_from_tube(model)?;
        let graph = blowup_graph(&arcs).map_err(|e| Error::Internal(format!("tube {}: {e}", model.cusp)))?;
        entry.arc_system = Some(arcs);
        entry.blowup = Some(graph);
    }
    Ok(entry)
}

pub fn transversality_report(
    tri: &VeeringTriangulation,
    cusps: &Cusps,
    tubes: &TubeSystem,
    w: &[i64],
    seed: u64,
    completion: &Completion,
) -> Result<TransversalityReport> {
    check_cocycle(tri, w)?;
    let cert = cone_membership(tri, w, seed)?;
    report_for_certificate(tri, cusps, tubes, w, cert, completion)
}

/// The report for a surface given directly by nonnegative weights, rather
/// than for the witness found by the membership solver.
pub fn transversality_report_for_weights(
    tri: &VeeringTriangulation,
    cusps: &Cusps,
    tubes: &TubeSystem,
    w: &[i64],
    completion: &Completion,
) -> Result<TransversalityReport> {
    check_cocycle(tri, w)?;
    crate::carry::check_nonnegative(w)?;
    let cert = ConeCertificate::Member {
        weights: Cocycle(w.to_vec()),
        potential: vec![0; tri.num_tets()],
    };
    report_for_certificate(tri, cusps, tubes, w, cert, completion)
}

fn report_for_certificate(
    tri: &VeeringTriangulation,
    cusps: &Cusps,
    tubes: &TubeSystem,
    w: &[i64],
    cert: ConeCertificate,
    completion: &Completion,
) -> Result<TransversalityReport> {
    let witness = match &cert {
        ConeCertificate::Member { weights, .. } => weights.clone(),
        ConeCertificate::NonMember { cycle, .. } => {
            return Ok(TransversalityReport {
                verdict: Verdict::NotTransverse,
                empty_class: false,
                obstruction: Some(Obstruction::NonMember { cycle: cycle.clone() }),
                certificate: cert,
                tubes: Vec::new(),
                surface: None,
                honesty: None,
                norm: None,
                note: None,
            })
        }
    };
    let surface = match carried_surface(tri, cusps, tubes, &witness.0, completion) {
        Ok(s) => s,
        Err(Error::NegativeCore { cusp, a }) => {
            return Ok(TransversalityReport {
                verdict: Verdict::NotTransverse,
                empty_class: false,
                certificate: cert,
                obstruction: Some(Obstruction::NegativeCore { cusp, a }),
                tubes: Vec::new(),
                surface: None,
                honesty: None,
                norm: None,
                note: Some(
                    "the class is carried on the cusped manifold but pairs negatively with a tube core; \
                     it is not relatively carried with this filling"
                        .into(),
                ),
            })
        }
        Err(e) => return Err(e),
    };
    let efficient = efficient_position(tri, cusps, tubes, &surface)?;
    let mut tube_data = Vec::new();
    for (before, after) in surface.cusps.iter().zip(&efficient.surface.cusps) {
        let entry = tube_transversality(before.ladderpole_pairs, &after.model)?;
        tube_data.push(entry);
    }
    let honest = tube_data.iter().all(|t| t.pairs_after == 0);
    let final_surface = efficient.surface;
    let nonnegative_on_cycles = {
        let g = dual_graph(tri)?;
        let cycles = simple_cycles(&g, CYCLE_CAP);
        match brute_force_member(w, &cycles) {
            Some(b) => b,
            None => final_surface.weights.is_nonnegative(),
        }
    };
    let norm = -final_surface.euler_char;
    let empty = final_surface.weights == Cocycle::zero(tri.num_faces());
    Ok(TransversalityReport {
        verdict: if honest { Verdict::Honest } else { Verdict::Almost },
        empty_class: empty,
        certificate: cert,
        obstruction: None,
        tubes: tube_data,
        honesty: Some(HonestyConditions {
            taut: final_surface.cusps.iter().all(|c| c.trivial == 0),
            nonnegative_on_cycles,
            kappa_intersection: "satisfied_by_construction",
        }),
        norm: Some(norm),
        note: if empty {
            Some("empty class: the carried surface is empty".into())
        } else {
            None
        },
        surface: Some(final_surface),
    })
}
