//! Cusp tori: tips of truncated tetrahedra, ladders, ladderpoles and the
//! (lambda, rho) basis of each cusp, plus tube systems.
//!
//! Chains on a cusp are dense integer vectors over its sides. A primal
//! chain coefficient is taken relative to the side's canonical direction
//! (`from -> to`, the counterclockwise direction of `ends[0]`'s tip). A dual
//! chain coefficient is +1 for a crossing from `ends[1]`'s tip into
//! `ends[0]`'s tip. With these conventions the algebraic intersection of a
//! primal cycle with a dual cycle is the dot product.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tri::{fourth, perm_parity, VeeringTriangulation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

const NONE: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TipData {
    pub tet: usize,
    pub vertex: u8,
    pub direction: Direction,
    /// Local side id indexed by the opposite tet vertex label.
    pub sides: [usize; 4],
    /// Local link vertex id indexed by tet vertex label.
    pub corners: [usize; 4],
}

impl TipData {
    pub fn side_list(&self) -> impl Iterator<Item = (u8, usize)> + '_ {
        (0..4u8)
            .filter(move |&c| c != self.vertex)
            .map(move |c| (c, self.sides[c as usize]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SideEnd {
    pub tip: usize,
    pub opposite: u8,
    /// The tet face behind this end is a bottom face of its tet.
    pub inward: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SideData {
    pub face: usize,
    pub ends: [SideEnd; 2],
    pub from: usize,
    pub to: usize,
}

impl SideData {
    /// +1 if the face coorientation points into `ends[0]`'s tip.
    pub fn coorientation(&self) -> i64 {
        if self.ends[0].inward {
            1
        } else {
            -1
        }
    }

    /// Index of the end belonging to `tip` through its side opposite `c`.
    pub fn end_for(&self, tip: usize, c: u8) -> usize {
        if self.ends[0].tip == tip && self.ends[0].opposite == c {
            0
        } else {
            1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ladder {
    pub direction: Direction,
    /// Tips in core order; the core leaves `tips[k]` through `rungs[k]`.
    pub tips: Vec<usize>,
    pub rungs: Vec<usize>,
    pub poles: [usize; 2],
    pub core: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ladderpole {
    /// Sides in the order of the pole's orientation.
    pub sides: Vec<usize>,
    pub chain: Vec<i64>,
    pub up_ladder: usize,
    pub down_ladder: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CuspComplex {
    pub id: usize,
    pub tips: Vec<TipData>,
    pub sides: Vec<SideData>,
    pub num_vertices: usize,
    pub ladders: Vec<Ladder>,
    pub poles: Vec<Ladderpole>,
    /// Poles in transverse order `P_0, P_1, ...`; the ladder after `P_j`
    /// is `ladder_order[j]` (downward for even `j`).
    pub pole_order: Vec<usize>,
    pub ladder_order: Vec<usize>,
    pub lambda_primal: Vec<i64>,
    pub lambda_dual: Vec<i64>,
    pub rho: Vec<i64>,
}

pub fn intersect(primal: &[i64], dual: &[i64]) -> i64 {
    primal.iter().zip(dual).map(|(a, b)| a * b).sum()
}

impl CuspComplex {
    pub fn up_ladders(&self) -> usize {
        self.ladders.iter().filter(|l| l.direction == Direction::Up).count()
    }

    /// Boundary of a primal chain, as vertex coefficients.
    pub fn primal_boundary(&self, chain: &[i64]) -> Vec<i64> {
        let mut out = vec![0; self.num_vertices];
        for (s, side) in self.sides.iter().enumerate() {
            out[side.to] += chain[s];
            out[side.from] -= chain[s];
        }
        out
    }

    /// Boundary of a dual chain, as tip coefficients.
    pub fn dual_boundary(&self, chain: &[i64]) -> Vec<i64> {
        let mut out = vec![0; self.tips.len()];
        for (s, side) in self.sides.iter().enumerate() {
            out[side.ends[0].tip] += chain[s];
            out[side.ends[1].tip] -= chain[s];
        }
        out
    }

    /// Fundamental cycles of a breadth-first spanning tree of the tip graph.
    pub fn dual_cycle_basis(&self) -> Vec<Vec<i64>> {
        let n = self.tips.len();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (s, side) in self.sides.iter().enumerate() {
            adj[side.ends[0].tip].push((s, side.ends[1].tip));
            adj[side.ends[1].tip].push((s, side.ends[0].tip));
        }
        let mut path: Vec<Option<Vec<i64>>> = vec![None; n];
        let mut tree = vec![false; self.sides.len()];
        path[0] = Some(vec![0; self.sides.len()]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &(s, y) in &adj[x] {
                if path[y].is_some() {
                    continue;
                }
                let mut p = path[x].clone().unwrap();
                p[s] += if self.sides[s].ends[0].tip == y { 1 } else { -1 };
                path[y] = Some(p);
                tree[s] = true;
                queue.push_back(y);
            }
        }
        let mut out = Vec::new();
        for (s, side) in self.sides.iter().enumerate() {
            if tree[s] {
                continue;
            }
            let a = path[side.ends[1].tip].as_ref().unwrap();
            let b = path[side.ends[0].tip].as_ref().unwrap();
            let mut z: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            z[s] += 1;
            out.push(z);
        }
        out
    }

    /// Fundamental cycles of a breadth-first spanning tree of the 1-skeleton.
    pub fn primal_cycle_basis(&self) -> Vec<Vec<i64>> {
        let n = self.num_vertices;
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (s, side) in self.sides.iter().enumerate() {
            adj[side.from].push((s, side.to));
            adj[side.to].push((s, side.from));
        }
        let mut path: Vec<Option<Vec<i64>>> = vec![None; n];
        let mut tree = vec![false; self.sides.len()];
        path[0] = Some(vec![0; self.sides.len()]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &(s, y) in &adj[x] {
                if path[y].is_some() {
                    continue;
                }
                let mut p = path[x].clone().unwrap();
                p[s] += if self.sides[s].to == y { 1 } else { -1 };
                path[y] = Some(p);
                tree[s] = true;
                queue.push_back(y);
            }
        }
        let mut out = Vec::new();
        for (s, side) in self.sides.iter().enumerate() {
            if tree[s] {
                continue;
            }
            let a = path[side.from].as_ref().unwrap();
            let b = path[side.to].as_ref().unwrap();
            let mut z: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            z[s] += 1;
            out.push(z);
        }
        out
    }

    /// Coordinates `(p, q)` of a primal cycle in the `(lambda, rho)` basis.
    pub fn coordinates(&self, primal: &[i64]) -> (i64, i64) {
        (intersect(primal, &self.rho), -intersect(primal, &self.lambda_dual))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices as i64 - self.sides.len() as i64 + self.tips.len() as i64
    }
}

/// All cusps of a veering triangulation with lookup tables.
#[derive(Clone, Debug)]
pub struct Cusps {
    pub cusps: Vec<CuspComplex>,
    tip_loc: Vec<(usize, usize)>,
    side_loc: Vec<(usize, usize, usize)>,
}

impl Cusps {
    /// `(cusp, local tip)` of the tip at vertex `v` of tet `t`.
    pub fn tip(&self, t: usize, v: u8) -> (usize, usize) {
        self.tip_loc[4 * t + v as usize]
    }

    /// `(cusp, local side, end)` of the side of tip `(t, v)` opposite `c`.
    pub fn side(&self, t: usize, v: u8, c: u8) -> (usize, usize, usize) {
        self.side_loc[16 * t + 4 * v as usize + c as usize]
    }

    pub fn len(&self) -> usize {
        self.cusps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cusps.is_empty()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.0[hi] = lo;
        }
    }
}

/// Counterclockwise corner order `(a, b)` of the side opposite `c` at the
/// tip at `v`: the cycle `(a, b, c)` with `(v, a, b, c)` even.
pub(crate) fn ccw_side(v: u8, c: u8) -> (u8, u8) {
    let rest: Vec<u8> = (0..4u8).filter(|&x| x != v && x != c).collect();
    let (a, b) = (rest[0], rest[1]);
    if perm_parity(&[v, a, b, c]) == 0 {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn build_cusps(tri: &VeeringTriangulation) -> Result<Cusps> {
    let n = tri.num_tets();
    let t = tri.tri();
    // Corners (tet, v, x) of tips, identified across faces.
    let corner = |s: usize, v: u8, x: u8| 16 * s + 4 * v as usize + x as usize;
    let mut uf_corner = UnionFind::new(16 * n);
    let mut uf_tip = UnionFind::new(4 * n);
    for face in &t.faces {
        let (s, g) = face.sides[0];
        let gl = t.tets[s].gluings[g as usize];
        for v in (0..4u8).filter(|&v| v != g) {
            let pv = gl.perm[v as usize];
            uf_tip.union(4 * s + v as usize, 4 * gl.tet + pv as usize);
            for x in (0..4u8).filter(|&x| x != g && x != v) {
                uf_corner.union(corner(s, v, x), corner(gl.tet, pv, gl.perm[x as usize]));
            }
        }
    }
    let mut cusp_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    for tip in 0..4 * n {
        let r = uf_tip.find(tip);
        let k = cusp_of_root.len();
        cusp_of_root.entry(r).or_insert(k);
    }
    let ncusps = cusp_of_root.len();
    let mut tip_loc = vec![(0, 0); 4 * n];
    let mut tips: Vec<Vec<TipData>> = vec![Vec::new(); ncusps];
    for tip in 0..4 * n {
        let c = cusp_of_root[&uf_tip.find(tip)];
        let (s, v) = (tip / 4, (tip % 4) as u8);
        tip_loc[tip] = (c, tips[c].len());
        tips[c].push(TipData {
            tet: s,
            vertex: v,
            direction: if t.tets[s].is_top_vertex(v) {
                Direction::Up
            } else {
                Direction::Down
            },
            sides: [NONE; 4],
            corners: [NONE; 4],
        });
    }
    // Link vertices, numbered per cusp in order of first appearance.
    let mut vertex_ids: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); ncusps];
    for tip in 0..4 * n {
        let (c, l) = tip_loc[tip];
        let (s, v) = (tip / 4, (tip % 4) as u8);
        for x in (0..4u8).filter(|&x| x != v) {
            let r = uf_corner.find(corner(s, v, x));
            let k = vertex_ids[c].len();
            let id = *vertex_ids[c].entry(r).or_insert(k);
            tips[c][l].corners[x as usize] = id;
        }
    }
    let mut sides: Vec<Vec<SideData>> = vec![Vec::new(); ncusps];
    let mut side_loc = vec![(NONE, NONE, NONE); 16 * n];
    for face in &t.faces {
        let (s, g) = face.sides[0];
        let gl = t.tets[s].gluings[g as usize];
        for v in (0..4u8).filter(|&v| v != g) {
            let pv = gl.perm[v as usize];
            let (c, l0) = tip_loc[4 * s + v as usize];
            let (c1, l1) = tip_loc[4 * gl.tet + pv as usize];
            debug_assert_eq!(c, c1);
            let (a, b) = ccw_side(v, g);
            let id = sides[c].len();
            sides[c].push(SideData {
                face: face.id,
                ends: [
                    SideEnd {
                        tip: l0,
                        opposite: g,
                        inward: !t.tets[s].is_top_face(g),
                    },
                    SideEnd {
                        tip: l1,
                        opposite: gl.face,
                        inward: !t.tets[gl.tet].is_top_face(gl.face),
                    },
                ],
                from: tips[c][l0].corners[a as usize],
                to: tips[c][l0].corners[b as usize],
            });
            tips[c][l0].sides[g as usize] = id;
            tips[c][l1].sides[gl.face as usize] = id;
            side_loc[16 * s + 4 * v as usize + g as usize] = (c, id, 0);
            side_loc[16 * gl.tet + 4 * pv as usize + gl.face as usize] = (c, id, 1);
        }
    }
    let mut cusps = Vec::with_capacity(ncusps);
    for (id, (tips, sides)) in tips.into_iter().zip(sides).enumerate() {
        let mut cusp = CuspComplex {
            id,
            tips,
            sides,
            num_vertices: vertex_ids[id].len(),
            ladders: Vec::new(),
            poles: Vec::new(),
            pole_order: Vec::new(),
            ladder_order: Vec::new(),
            lambda_primal: Vec::new(),
            lambda_dual: Vec::new(),
            rho: Vec::new(),
        };
        check_torus(&cusp)?;
        build_ladders(&mut cusp)?;
        cusps.push(cusp);
    }
    Ok(Cusps {
        cusps,
        tip_loc,
        side_loc,
    })
}

/// Euler characteristic 0 and coherent orientation of the tips.
pub fn check_torus(cusp: &CuspComplex) -> Result<()> {
    if cusp.euler_characteristic() != 0 {
        return Err(Error::Structure(format!(
            "cusp {} has Euler characteristic {}",
            cusp.id,
            cusp.euler_characteristic()
        )));
    }
    for (s, side) in cusp.sides.iter().enumerate() {
        let tip = &cusp.tips[side.ends[1].tip];
        let (a, b) = ccw_side(tip.vertex, side.ends[1].opposite);
        if (tip.corners[a as usize], tip.corners[b as usize]) != (side.to, side.from) {
            return Err(Error::Structure(format!(
                "cusp {}: side {s} is not traversed oppositely by its two tips",
                cusp.id
            )));
        }
    }
    Ok(())
}

fn boundary_pattern(cusp: &CuspComplex, msg: String) -> Error {
    Error::BoundaryPattern(format!("cusp {}: {msg}", cusp.id))
}

/// Ladders, ladderpoles and the (lambda, rho) basis. Works on any tip
/// complex whose tips, sides and corners are filled in.
pub fn build_ladders(cusp: &mut CuspComplex) -> Result<()> {
    let ntips = cusp.tips.len();
    let nsides = cusp.sides.len();
    let dir = |c: &CuspComplex, tip: usize| c.tips[tip].direction;

    // Constant-direction regions.
    let mut uf = UnionFind::new(ntips);
    for side in &cusp.sides {
        let [a, b] = [side.ends[0].tip, side.ends[1].tip];
        if dir(cusp, a) == dir(cusp, b) {
            uf.union(a, b);
        }
    }
    let mut ladder_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut ladder_of = vec![0; ntips];
    for tip in 0..ntips {
        let r = uf.find(tip);
        let k = ladder_of_root.len();
        ladder_of[tip] = *ladder_of_root.entry(r).or_insert(k);
    }
    let nladders = ladder_of_root.len();
    let is_rung = |c: &CuspComplex, s: usize| {
        let side = &c.sides[s];
        dir(c, side.ends[0].tip) == dir(c, side.ends[1].tip)
    };

    for l in 0..nladders {
        let members: Vec<usize> = (0..ntips).filter(|&t| ladder_of[t] == l).collect();
        let mut verts = std::collections::BTreeSet::new();
        for &t in &members {
            let tip = &cusp.tips[t];
            for x in (0..4u8).filter(|&x| x != tip.vertex) {
                verts.insert(tip.corners[x as usize]);
            }
        }
        let mut rungs = 0;
        let mut poles = 0;
        let mut pole_deg: BTreeMap<usize, usize> = BTreeMap::new();
        for (s, side) in cusp.sides.iter().enumerate() {
            let inside = side.ends.iter().filter(|e| ladder_of[e.tip] == l).count();
            if inside == 0 {
                continue;
            }
            if is_rung(cusp, s) {
                rungs += 1;
            } else {
                poles += 1;
                *pole_deg.entry(side.from).or_default() += 1;
                *pole_deg.entry(side.to).or_default() += 1;
            }
        }
        let chi = verts.len() as i64 - (rungs + poles) as i64 + members.len() as i64;
        if chi != 0 || poles == 0 || pole_deg.values().any(|&d| d != 2) {
            return Err(boundary_pattern(
                cusp,
                format!("region {l} is not an annulus (chi = {chi}, {poles} boundary sides)"),
            ));
        }
        for &t in &members {
            let nr = cusp.tips[t].side_list().filter(|&(_, s)| is_rung(cusp, s)).count();
            if nr != 2 {
                return Err(boundary_pattern(cusp, format!("tip {t} has {nr} rungs in its ladder")));
            }
        }
    }

    // Ladder cores: leave each tip through its outward rung.
    let mut ladders = Vec::with_capacity(nladders);
    for l in 0..nladders {
        let start = (0..ntips).find(|&t| ladder_of[t] == l).unwrap();
        let size = (0..ntips).filter(|&t| ladder_of[t] == l).count();
        let mut tips = Vec::new();
        let mut rungs = Vec::new();
        let mut core = vec![0i64; nsides];
        let mut cur = start;
        loop {
            let out = cusp.tips[cur]
                .side_list()
                .find(|&(c, s)| is_rung(cusp, s) && !cusp.sides[s].ends[cusp.sides[s].end_for(cur, c)].inward);
            let (c, s) = out.ok_or_else(|| boundary_pattern(cusp, format!("tip {cur} has no outward rung")))?;
            let side = &cusp.sides[s];
            let e = side.end_for(cur, c);
            let next = side.ends[1 - e].tip;
            if !side.ends[1 - e].inward {
                return Err(boundary_pattern(cusp, format!("rung {s} is not cooriented")));
            }
            core[s] += if e == 1 { 1 } else { -1 };
            tips.push(cur);
            rungs.push(s);
            cur = next;
            if cur == start {
                break;
            }
            if tips.len() > size {
                return Err(boundary_pattern(cusp, format!("core of region {l} does not close")));
            }
        }
        if tips.len() != size {
            return Err(boundary_pattern(cusp, format!("core of region {l} misses tips")));
        }
        ladders.push(Ladder {
            direction: dir(cusp, start),
            tips,
            rungs,
            poles: [NONE, NONE],
            core,
        });
    }

    // Ladderpoles: components of the sides separating up from down tips.
    let pole_sides: Vec<usize> = (0..nsides).filter(|&s| !is_rung(cusp, s)).collect();
    let mut uf = UnionFind::new(cusp.num_vertices);
    for &s in &pole_sides {
        uf.union(cusp.sides[s].from, cusp.sides[s].to);
    }
    let mut pole_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut pole_of_side = vec![NONE; nsides];
    for &s in &pole_sides {
        let r = uf.find(cusp.sides[s].from);
        let k = pole_of_root.len();
        pole_of_side[s] = *pole_of_root.entry(r).or_insert(k);
    }
    let npoles = pole_of_root.len();
    let mut poles = Vec::with_capacity(npoles);
    for p in 0..npoles {
        let members: Vec<usize> = pole_sides.iter().copied().filter(|&s| pole_of_side[s] == p).collect();
        let mut chain = vec![0i64; nsides];
        let mut up_ladder = NONE;
        let mut down_ladder = NONE;
        let mut next_of: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for &s in &members {
            let side = &cusp.sides[s];
            let ue = if dir(cusp, side.ends[0].tip) == Direction::Up {
                0
            } else {
                1
            };
            let up = side.ends[ue].tip;
            let down = side.ends[1 - ue].tip;
            for (slot, l) in [(&mut up_ladder, ladder_of[up]), (&mut down_ladder, ladder_of[down])] {
                if *slot == NONE {
                    *slot = l;
                } else if *slot != l {
                    return Err(boundary_pattern(
                        cusp,
                        format!("ladderpole {p} borders two ladders of one direction"),
                    ));
                }
            }
            // Parallel to the core: from the corner shared with the inward
            // rung to the corner shared with the outward rung.
            let tip = &cusp.tips[up];
            let here = side.ends[ue].opposite;
            let mut r_in = None;
            let mut r_out = None;
            for (c, r) in tip.side_list() {
                if r == s || !is_rung(cusp, r) {
                    continue;
                }
                let e = cusp.sides[r].end_for(up, c);
                if cusp.sides[r].ends[e].inward {
                    r_in = Some(c);
                } else {
                    r_out = Some(c);
                }
            }
            let (ci, co) = match (r_in, r_out) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(boundary_pattern(
                        cusp,
                        format!("upward tip {up} lacks an inward or outward rung"),
                    ))
                }
            };
            let from = tip.corners[fourth([tip.vertex, here, ci]) as usize];
            let to = tip.corners[fourth([tip.vertex, here, co]) as usize];
            if (from, to) == (side.from, side.to) {
                chain[s] = 1;
            } else if (from, to) == (side.to, side.from) {
                chain[s] = -1;
            } else {
                return Err(Error::Internal(format!("side {s} corners mismatch")));
            }
            if next_of.insert(from, (to, s)).is_some() {
                return Err(boundary_pattern(
                    cusp,
                    format!("ladderpole {p} is not consistently oriented"),
                ));
            }
        }
        // Order the sides along the orientation.
        let first = members[0];
        let start = if chain[first] == 1 {
            cusp.sides[first].from
        } else {
            cusp.sides[first].to
        };
        let mut sides = Vec::new();
        let mut v = start;
        loop {
            let &(w, s) = next_of
                .get(&v)
                .ok_or_else(|| boundary_pattern(cusp, format!("ladderpole {p} is not a cycle")))?;
            sides.push(s);
            v = w;
            if v == start || sides.len() > members.len() {
                break;
            }
        }
        if sides.len() != members.len() {
            return Err(boundary_pattern(cusp, format!("ladderpole {p} is not a single cycle")));
        }
        poles.push(Ladderpole {
            sides,
            chain,
            up_ladder,
            down_ladder,
        });
    }
    for (p, pole) in poles.iter().enumerate() {
        for l in [pole.up_ladder, pole.down_ladder] {
            let slots = &mut ladders[l].poles;
            if slots[0] == NONE {
                slots[0] = p;
            } else if slots[1] == NONE {
                slots[1] = p;
            } else {
                return Err(boundary_pattern(cusp, format!("ladder {l} borders three ladderpoles")));
            }
        }
    }
    if ladders.iter().any(|l| l.poles[1] == NONE || l.poles[0] == l.poles[1]) {
        return Err(boundary_pattern(
            cusp,
            "a ladder does not border two ladderpoles".into(),
        ));
    }

    // Transverse order: P_0 -> down ladder -> P_1 -> up ladder -> P_2 ...
    let p0 = pole_of_side[*pole_sides
        .first()
        .ok_or_else(|| boundary_pattern(cusp, "no ladderpoles".into()))?];
    let mut pole_order = vec![p0];
    let mut ladder_order = Vec::new();
    let mut p = p0;
    loop {
        let j = pole_order.len() - 1;
        let l = if j % 2 == 0 {
            poles[p].down_ladder
        } else {
            poles[p].up_ladder
        };
        ladder_order.push(l);
        let q = if ladders[l].poles[0] == p {
            ladders[l].poles[1]
        } else {
            ladders[l].poles[0]
        };
        if q == p0 {
            break;
        }
        if pole_order.len() > npoles {
            return Err(boundary_pattern(cusp, "ladders do not close up".into()));
        }
        pole_order.push(q);
        p = q;
    }
    if pole_order.len() != npoles || ladder_order.len() != nladders || npoles % 2 != 0 {
        return Err(boundary_pattern(
            cusp,
            "ladders do not alternate around a single cycle".into(),
        ));
    }

    // Basis: lambda from P_0 and the upward ladder before it; rho from the
    // fundamental dual cycles.
    let lambda_primal = poles[p0].chain.clone();
    let lambda_dual = ladders[poles[p0].up_ladder].core.clone();
    cusp.ladders = ladders;
    cusp.poles = poles;
    cusp.pole_order = pole_order;
    cusp.ladder_order = ladder_order;
    let basis = cusp.dual_cycle_basis();
    let rho = unit_combination(&lambda_primal, &basis)
        .ok_or_else(|| boundary_pattern(cusp, "ladderpole class is not primitive".into()))?;
    cusp.lambda_primal = lambda_primal;
    cusp.lambda_dual = lambda_dual;
    cusp.rho = rho;
    for (p, pole) in cusp.poles.iter().enumerate() {
        if intersect(&pole.chain, &cusp.rho) != 1 {
            return Err(boundary_pattern(
                cusp,
                format!("ladderpole {p} is not parallel to lambda"),
            ));
        }
    }
    Ok(())
}

/// An integer combination of `cycles` meeting `primal` exactly once,
/// preferring a single basis cycle.
fn unit_combination(primal: &[i64], cycles: &[Vec<i64>]) -> Option<Vec<i64>> {
    let vals: Vec<i64> = cycles.iter().map(|z| intersect(primal, z)).collect();
    if let Some(i) = vals.iter().position(|v| v.abs() == 1) {
        return Some(cycles[i].iter().map(|x| x * vals[i]).collect());
    }
    // Running extended gcd: g = sum coef[i] * vals[i].
    let mut g = 0i64;
    let mut coef = vec![0i64; cycles.len()];
    for (i, &v) in vals.iter().enumerate() {
        if v == 0 {
            continue;
        }
        let (d, x, y) = ext_gcd(g, v);
        for c in coef.iter_mut() {
            *c *= x;
        }
        coef[i] += y;
        g = d;
    }
    if g.abs() != 1 {
        return None;
    }
    let mut out = vec![0i64; primal.len()];
    for (c, z) in coef.iter().zip(cycles) {
        for (o, x) in out.iter_mut().zip(z) {
            *o += c * g * x;
        }
    }
    Some(out)
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (d, x, y) = ext_gcd(b, a % b);
        (d, y, x - (a / b) * y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TubeKind {
    Solid,
    Hollow,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TubeSpec {
    pub id: usize,
    pub kind: TubeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meridian: Option<[i64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TubeFile {
    pub cusps: Vec<TubeSpec>,
}

/// Per cusp: `None` for hollow, `Some((p, q))` for a solid tube with
/// meridian `p lambda + q rho`, normalized so that `i(m, lambda) = -q > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TubeSystem {
    pub meridians: Vec<Option<(i64, i64)>>,
}

impl TubeSystem {
    pub fn all_hollow(ncusps: usize) -> TubeSystem {
        TubeSystem {
            meridians: vec![None; ncusps],
        }
    }

    pub fn from_file(file: &TubeFile, ncusps: usize) -> Result<TubeSystem> {
        let mut meridians = vec![None; ncusps];
        let mut seen = vec![false; ncusps];
        for spec in &file.cusps {
            if spec.id >= ncusps {
                return Err(Error::Tubes(format!("no cusp {}", spec.id)));
            }
            if std::mem::replace(&mut seen[spec.id], true) {
                return Err(Error::Tubes(format!("cusp {} listed twice", spec.id)));
            }
            match (spec.kind, spec.meridian) {
                (TubeKind::Hollow, None) => {}
                (TubeKind::Hollow, Some(_)) => {
                    return Err(Error::Tubes(format!("hollow cusp {} has a meridian", spec.id)))
                }
                (TubeKind::Solid, None) => {
                    return Err(Error::Tubes(format!("solid cusp {} lacks a meridian", spec.id)))
                }
                (TubeKind::Solid, Some([p, q])) => {
                    meridians[spec.id] = Some(normalize_meridian(spec.id, p, q)?);
                }
            }
        }
        Ok(TubeSystem { meridians })
    }

    pub fn parse(text: &str, ncusps: usize) -> Result<TubeSystem> {
        let file: TubeFile = serde_json::from_str(text).map_err(|e| Error::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        TubeSystem::from_file(&file, ncusps)
    }

    pub fn to_file(&self) -> TubeFile {
        TubeFile {
            cusps: self
                .meridians
                .iter()
                .enumerate()
                .map(|(id, m)| TubeSpec {
                    id,
                    kind: if m.is_some() { TubeKind::Solid } else { TubeKind::Hollow },
                    meridian: m.map(|(p, q)| [p, q]),
                })
                .collect(),
        }
    }

    pub fn is_solid(&self, cusp: usize) -> bool {
        self.meridians[cusp].is_some()
    }

    pub fn solid(&self) -> impl Iterator<Item = (usize, (i64, i64))> + '_ {
        self.meridians.iter().enumerate().filter_map(|(c, m)| m.map(|m| (c, m)))
    }
}

fn normalize_meridian(cusp: usize, p: i64, q: i64) -> Result<(i64, i64)> {
    if q == 0 {
        return Err(Error::Tubes(format!(
            "meridian of cusp {cusp} has the ladderpole slope (i(m, lambda) = 0)"
        )));
    }
    if num_integer::gcd(p, q) != 1 {
        return Err(Error::Tubes(format!(
            "meridian ({p}, {q}) of cusp {cusp} is not primitive"
        )));
    }
    Ok(if q > 0 { (-p, -q) } else { (p, q) })
}

/// Algebraic intersection in the `(lambda, rho)` basis, `i(lambda, rho) = 1`.
pub fn det(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TubeEntry {
    pub id: usize,
    pub kind: TubeKind,
    pub up_ladders: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meridian: Option<[i64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prongs: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<i64>,
    /// Geometric intersection of the meridian with the union of ladderpoles.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ladderpole_intersection: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TubeReport {
    pub cusps: Vec<TubeEntry>,
    pub strict: bool,
    pub gamma: Vec<usize>,
}

pub fn tube_report(cusps: &Cusps, tubes: &TubeSystem) -> Result<TubeReport> {
    if tubes.meridians.len() != cusps.len() {
        return Err(Error::Tubes(format!(
            "tube system has {} cusps, triangulation has {}",
            tubes.meridians.len(),
            cusps.len()
        )));
    }
    let mut entries = Vec::new();
    for (c, cusp) in cusps.cusps.iter().enumerate() {
        let k = cusp.up_ladders() as i64;
        entries.push(match tubes.meridians[c] {
            None => TubeEntry {
                id: c,
                kind: TubeKind::Hollow,
                up_ladders: k as usize,
                meridian: None,
                prongs: None,
                index: None,
                ladderpole_intersection: None,
            },
            Some(m) => {
                let i = -det(m, (1, 0));
                let prongs = k * i.abs();
                TubeEntry {
                    id: c,
                    kind: TubeKind::Solid,
                    up_ladders: k as usize,
                    meridian: Some([m.0, m.1]),
                    prongs: Some(prongs),
                    index: Some(2 - prongs),
                    ladderpole_intersection: Some(2 * k * i.abs()),
                }
            }
        });
    }
    let strict = entries.iter().all(|e| e.prongs.map_or(true, |p| p >= 3));
    let gamma = entries
        .iter()
        .filter(|e| e.kind == TubeKind::Solid)
        .map(|e| e.id)
        .collect();
    Ok(TubeReport {
        cusps: entries,
        strict,
        gamma,
    })
}
