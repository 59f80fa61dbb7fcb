//! Triangulation data model, the `.vtri` format and validation.
//!
//! Vertex labels of a tetrahedron are `0..4`; face `i` is the face opposite
//! vertex `i`. The top edge carries dihedral angle pi, so does the bottom edge
//! (the complementary pair); the four remaining pairs are equatorial with
//! angle 0. Top faces are the two faces containing the top edge and are
//! cooriented outward.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Perm = [u8; 4];

/// Unordered vertex pairs in a fixed order; `PAIRS[pair_index(a, b)]`.
pub const PAIRS: [[u8; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

pub fn pair_index(a: u8, b: u8) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("not a vertex pair: {a} {b}"),
    }
}

pub fn perm_parity(p: &Perm) -> u8 {
    let mut s = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                s ^= 1;
            }
        }
    }
    s
}

pub fn perm_inverse(p: &Perm) -> Perm {
    let mut q = [0u8; 4];
    for k in 0..4 {
        q[p[k] as usize] = k as u8;
    }
    q
}

/// The vertex of `0..4` not in `xs` (which must hold three distinct labels).
pub(crate) fn fourth(xs: [u8; 3]) -> u8 {
    6 - xs[0] - xs[1] - xs[2]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gluing {
    pub tet: usize,
    pub face: u8,
    pub perm: Perm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tetrahedron {
    pub id: usize,
    pub top_edge: [u8; 2],
    pub gluings: [Gluing; 4],
}

impl Tetrahedron {
    pub fn bottom_edge(&self) -> [u8; 2] {
        let mut out = [0u8; 2];
        let mut k = 0;
        for v in 0..4u8 {
            if !self.top_edge.contains(&v) {
                out[k] = v;
                k += 1;
            }
        }
        out
    }

    pub fn is_top_vertex(&self, v: u8) -> bool {
        self.top_edge.contains(&v)
    }

    /// Faces opposite bottom vertices contain the top edge.
    pub fn is_top_face(&self, f: u8) -> bool {
        !self.top_edge.contains(&f)
    }

    pub fn angle(&self, a: u8, b: u8) -> Angle {
        let top = self.top_edge.contains(&a) && self.top_edge.contains(&b);
        let bottom = !self.top_edge.contains(&a) && !self.top_edge.contains(&b);
        if top || bottom {
            Angle::Pi
        } else {
            Angle::Zero
        }
    }

    pub fn top_faces(&self) -> [u8; 2] {
        self.bottom_edge()
    }

    pub fn bottom_faces(&self) -> [u8; 2] {
        self.top_edge
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Angle {
    Zero,
    Pi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Veer {
    Red,
    Blue,
}

impl Veer {
    pub fn swap(self) -> Veer {
        match self {
            Veer::Red => Veer::Blue,
            Veer::Blue => Veer::Red,
        }
    }
}

impl fmt::Display for Veer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Veer::Red => write!(f, "red"),
            Veer::Blue => write!(f, "blue"),
        }
    }
}

/// A face of the triangulation: two glued tetrahedron faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Face {
    pub id: usize,
    pub sides: [(usize, u8); 2],
}

/// One corner of an edge: `pair` is ordered so that `pair[0]` is the same
/// end of the edge at every incidence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Incidence {
    pub tet: usize,
    pub pair: [u8; 2],
    pub angle: Angle,
}

/// Passage from incidence `i` to incidence `i + 1` through a face, leaving
/// `tet` through its local face `exit`. `sign` is +1 when that is a top face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Crossing {
    pub face: usize,
    pub tet: usize,
    pub exit: u8,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeClass {
    pub id: usize,
    pub incidences: Vec<Incidence>,
    pub crossings: Vec<Crossing>,
}

impl EdgeClass {
    pub fn degree(&self) -> usize {
        self.incidences.len()
    }
}

/// Parsed, structurally sound, not yet validated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    pub tets: Vec<Tetrahedron>,
    pub faces: Vec<Face>,
    pub edges: Vec<EdgeClass>,
    face_of: Vec<[usize; 4]>,
    edge_of: Vec<[usize; 6]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    tets: usize,
    top_edges: Vec<[u8; 2]>,
    gluings: Vec<Vec<(usize, u8, Perm)>>,
}

#[derive(Serialize)]
struct RawOut<'a> {
    tets: usize,
    top_edges: Vec<[u8; 2]>,
    gluings: Vec<Vec<(usize, u8, &'a Perm)>>,
}

pub fn parse_triangulation(text: &str) -> Result<Triangulation> {
    let raw: RawDoc = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let n = raw.tets;
    if raw.top_edges.len() != n {
        return Err(Error::Format(format!(
            "expected {n} top edges, found {}",
            raw.top_edges.len()
        )));
    }
    if raw.gluings.len() != n {
        return Err(Error::Format(format!(
            "expected gluings for {n} tets, found {}",
            raw.gluings.len()
        )));
    }
    if n == 0 {
        return Err(Error::Format("no tetrahedra".into()));
    }
    let mut tets = Vec::with_capacity(n);
    for (s, (top, row)) in raw.top_edges.iter().zip(&raw.gluings).enumerate() {
        if top[0] > 3 || top[1] > 3 || top[0] == top[1] {
            return Err(Error::Format(format!("tet {s}: bad top edge {top:?}")));
        }
        if row.len() != 4 {
            return Err(Error::Format(format!(
                "tet {s}: expected 4 gluings, found {}",
                row.len()
            )));
        }
        let mut gl = [Gluing {
            tet: 0,
            face: 0,
            perm: [0, 1, 2, 3],
        }; 4];
        for (g, &(t, f, p)) in row.iter().enumerate() {
            if t >= n {
                return Err(Error::TetOutOfRange(t));
            }
            if f > 3 {
                return Err(Error::Format(format!("tet {s} face {g}: face index {f}")));
            }
            let mut seen = [false; 4];
            for &x in &p {
                if x > 3 || seen[x as usize] {
                    return Err(Error::BadBijection {
                        tet: s,
                        face: g as u8,
                        reason: format!("{p:?} is not a bijection of 0..4"),
                    });
                }
                seen[x as usize] = true;
            }
            if p[g] != f {
                return Err(Error::BadBijection {
                    tet: s,
                    face: g as u8,
                    reason: format!("{p:?} does not carry face {g} onto face {f}"),
                });
            }
            if t == s && f as usize == g {
                return Err(Error::BadBijection {
                    tet: s,
                    face: g as u8,
                    reason: "face glued to itself".into(),
                });
            }
            gl[g] = Gluing {
                tet: t,
                face: f,
                perm: p,
            };
        }
        let mut top_edge = *top;
        top_edge.sort_unstable();
        tets.push(Tetrahedron {
            id: s,
            top_edge,
            gluings: gl,
        });
    }
    // Every target must point back at its source with the inverse map.
    for s in 0..n {
        for g in 0..4u8 {
            let gl = tets[s].gluings[g as usize];
            let back = tets[gl.tet].gluings[gl.face as usize];
            if back.tet != s || back.face != g {
                return Err(Error::DuplicateGluing { tet: s, face: g });
            }
            if back.perm != perm_inverse(&gl.perm) {
                return Err(Error::BadBijection {
                    tet: s,
                    face: g,
                    reason: "gluing maps are not mutually inverse".into(),
                });
            }
        }
    }
    Ok(Triangulation::assemble(tets))
}

impl Triangulation {
    fn assemble(tets: Vec<Tetrahedron>) -> Triangulation {
        let n = tets.len();
        let mut face_of = vec![[usize::MAX; 4]; n];
        let mut faces = Vec::with_capacity(2 * n);
        for s in 0..n {
            for g in 0..4u8 {
                if face_of[s][g as usize] != usize::MAX {
                    continue;
                }
                let gl = tets[s].gluings[g as usize];
                let id = faces.len();
                face_of[s][g as usize] = id;
                face_of[gl.tet][gl.face as usize] = id;
                faces.push(Face {
                    id,
                    sides: [(s, g), (gl.tet, gl.face)],
                });
            }
        }
        let mut edge_of = vec![[usize::MAX; 6]; n];
        let mut edges: Vec<EdgeClass> = Vec::new();
        for s in 0..n {
            for (k, pr) in PAIRS.iter().enumerate() {
                if edge_of[s][k] != usize::MAX {
                    continue;
                }
                let id = edges.len();
                let e = walk_edge(&tets, &face_of, s, *pr, id);
                for inc in &e.incidences {
                    edge_of[inc.tet][pair_index(inc.pair[0], inc.pair[1])] = id;
                }
                edges.push(e);
            }
        }
        Triangulation {
            tets,
            faces,
            edges,
            face_of,
            edge_of,
        }
    }

    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn face_of(&self, tet: usize, f: u8) -> usize {
        self.face_of[tet][f as usize]
    }

    pub fn edge_of(&self, tet: usize, a: u8, b: u8) -> usize {
        self.edge_of[tet][pair_index(a, b)]
    }

    pub fn to_vtri(&self) -> String {
        let out = RawOut {
            tets: self.tets.len(),
            top_edges: self.tets.iter().map(|t| t.top_edge).collect(),
            gluings: self
                .tets
                .iter()
                .map(|t| t.gluings.iter().map(|g| (g.tet, g.face, &g.perm)).collect())
                .collect(),
        };
        serde_json::to_string(&out).expect("serializable")
    }

    /// Relabel tetrahedra: old tet `s` becomes `perm[s]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Triangulation> {
        let n = self.tets.len();
        if perm.len() != n {
            return Err(Error::Input("relabeling has the wrong length".into()));
        }
        let mut tets: Vec<Option<Tetrahedron>> = vec![None; n];
        for t in &self.tets {
            let mut gl = t.gluings;
            for g in gl.iter_mut() {
                g.tet = perm[g.tet];
            }
            tets[perm[t.id]] = Some(Tetrahedron {
                id: perm[t.id],
                top_edge: t.top_edge,
                gluings: gl,
            });
        }
        let tets = tets
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Input("relabeling is not a permutation".into()))?;
        Ok(Triangulation::assemble(tets))
    }
}

fn walk_edge(tets: &[Tetrahedron], face_of: &[[usize; 4]], s: usize, pr: [u8; 2], id: usize) -> EdgeClass {
    let [a, b] = pr;
    let others: Vec<u8> = (0..4u8).filter(|v| *v != a && *v != b).collect();
    let start = (s, a, b, others[0]);
    let mut cur = start;
    let mut incidences = Vec::new();
    let mut crossings = Vec::new();
    loop {
        let (t, a, b, c) = cur;
        let d = fourth([a, b, c]);
        let tet = &tets[t];
        incidences.push(Incidence {
            tet: t,
            pair: [a, b],
            angle: tet.angle(a, b),
        });
        crossings.push(Crossing {
            face: face_of[t][d as usize],
            tet: t,
            exit: d,
            sign: if tet.is_top_face(d) { 1 } else { -1 },
        });
        let gl = tet.gluings[d as usize];
        let p = gl.perm;
        cur = (gl.tet, p[a as usize], p[b as usize], p[d as usize]);
        if cur == start {
            break;
        }
    }
    EdgeClass {
        id,
        incidences,
        crossings,
    }
}

/// The two contiguous fans at an edge, as crossing indices into
/// `EdgeClass::crossings`. Fan `a` runs forward from the corner where the
/// edge is a top edge; fan `b` runs forward from the corner where it is a
/// bottom edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fans {
    pub top_corner: usize,
    pub bottom_corner: usize,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub tets: usize,
    pub faces: usize,
    pub edges: usize,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn first_failure(&self) -> Option<String> {
        self.checks
            .iter()
            .find(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.failures.join("; ")))
    }
}

fn check(name: &'static str, failures: Vec<String>) -> Check {
    Check {
        name,
        passed: failures.is_empty(),
        failures,
    }
}

pub fn validate(tri: &Triangulation) -> ValidationReport {
    let mut checks = Vec::new();

    let mut f = Vec::new();
    for t in &tri.tets {
        for (g, gl) in t.gluings.iter().enumerate() {
            if perm_parity(&gl.perm) == 0 {
                f.push(format!("tet {} face {g}: even gluing {:?}", t.id, gl.perm));
            }
        }
    }
    checks.push(check("orientability", f));

    let mut f = Vec::new();
    for e in &tri.edges {
        let pis = e.incidences.iter().filter(|i| i.angle == Angle::Pi).count();
        if pis != 2 {
            f.push(format!("edge {}: {pis} pi-corners", e.id));
        }
    }
    checks.push(check("angle_sums", f));

    let mut f = Vec::new();
    for e in &tri.edges {
        let (tops, bottoms) = top_bottom_counts(tri, e);
        if tops != 1 || bottoms != 1 {
            f.push(format!(
                "edge {}: top edge of {tops} tets, bottom edge of {bottoms}",
                e.id
            ));
        }
    }
    checks.push(check("top_bottom", f));

    let mut f = Vec::new();
    for face in &tri.faces {
        let [(s, g), (t, h)] = face.sides;
        let a = tri.tets[s].is_top_face(g);
        let b = tri.tets[t].is_top_face(h);
        if a == b {
            let kind = if a { "top" } else { "bottom" };
            f.push(format!("face {}: {kind} face on both sides", face.id));
        }
    }
    checks.push(check("coorientation", f));

    let mut f = Vec::new();
    for e in &tri.edges {
        if let Err(msg) = fans_of(tri, e) {
            f.push(format!("edge {}: {msg}", e.id));
        }
    }
    checks.push(check("fan_coherence", f));

    let mut f = Vec::new();
    if tri.edges.len() != tri.tets.len() {
        f.push(format!("{} edges for {} tets", tri.edges.len(), tri.tets.len()));
    }
    let mut seen = vec![[0u8; 6]; tri.tets.len()];
    for e in &tri.edges {
        for i in &e.incidences {
            seen[i.tet][pair_index(i.pair[0], i.pair[1])] += 1;
        }
    }
    if seen.iter().flatten().any(|&k| k != 1) {
        f.push("an edge is identified with itself in reverse".into());
    }
    checks.push(check("edge_count", f));

    let f = match derive_veers(tri) {
        Ok(_) => Vec::new(),
        Err(e) => vec![e.to_string()],
    };
    checks.push(check("veer_colorability", f));

    ValidationReport {
        valid: checks.iter().all(|c| c.passed),
        tets: tri.tets.len(),
        faces: tri.faces.len(),
        edges: tri.edges.len(),
        checks,
    }
}

fn top_bottom_counts(tri: &Triangulation, e: &EdgeClass) -> (usize, usize) {
    let mut tops = 0;
    let mut bottoms = 0;
    for i in &e.incidences {
        let t = &tri.tets[i.tet];
        if t.is_top_vertex(i.pair[0]) && t.is_top_vertex(i.pair[1]) {
            tops += 1;
        } else if !t.is_top_vertex(i.pair[0]) && !t.is_top_vertex(i.pair[1]) {
            bottoms += 1;
        }
    }
    (tops, bottoms)
}

fn fans_of(tri: &Triangulation, e: &EdgeClass) -> std::result::Result<Fans, String> {
    let mut top = None;
    let mut bottom = None;
    for (k, i) in e.incidences.iter().enumerate() {
        let t = &tri.tets[i.tet];
        let up = t.is_top_vertex(i.pair[0]) && t.is_top_vertex(i.pair[1]);
        let down = !t.is_top_vertex(i.pair[0]) && !t.is_top_vertex(i.pair[1]);
        if up {
            if top.replace(k).is_some() {
                return Err("two top corners".into());
            }
        } else if down && bottom.replace(k).is_some() {
            return Err("two bottom corners".into());
        }
    }
    let (top, bottom) = match (top, bottom) {
        (Some(t), Some(b)) => (t, b),
        _ => return Err("missing a top or bottom corner".into()),
    };
    let n = e.crossings.len();
    let mut a = Vec::new();
    let mut k = top;
    while k != bottom {
        a.push(k);
        k = (k + 1) % n;
    }
    let mut b = Vec::new();
    while k != top {
        b.push(k);
        k = (k + 1) % n;
    }
    if a.iter().any(|&k| e.crossings[k].sign != 1) {
        return Err("upper fan not cooriented away from the top corner".into());
    }
    if b.iter().any(|&k| e.crossings[k].sign != -1) {
        return Err("lower fan not cooriented toward the top corner".into());
    }
    Ok(Fans {
        top_corner: top,
        bottom_corner: bottom,
        a,
        b,
    })
}

/// Vertices of a tetrahedron ordered `(b0, b1, t0, t1)` as an even
/// permutation of `(0, 1, 2, 3)`.
pub fn even_order(t: &Tetrahedron) -> [u8; 4] {
    let [b0, b1] = t.bottom_edge();
    let [t0, t1] = t.top_edge;
    let p = [b0, b1, t0, t1];
    if perm_parity(&p) == 0 {
        p
    } else {
        [b0, b1, t1, t0]
    }
}

/// Calibration: the even-ordered equatorial pair `{b0,t0},{b1,t1}` is red.
pub const EVEN_PAIR_COLOR: Veer = Veer::Red;

/// Per-tet colour constraints: `(edge, true)` if the edge lies in the even
/// pair of that tet, `(edge, false)` for the odd pair.
fn veer_constraints(tri: &Triangulation) -> Vec<Vec<(usize, bool)>> {
    tri.tets
        .iter()
        .map(|t| {
            let [b0, b1, t0, t1] = even_order(t);
            vec![
                (tri.edge_of(t.id, b0, t0), true),
                (tri.edge_of(t.id, b1, t1), true),
                (tri.edge_of(t.id, b0, t1), false),
                (tri.edge_of(t.id, b1, t0), false),
            ]
        })
        .collect()
}

/// Does `colors` satisfy the colour system with the even pair coloured
/// `even` in every tet?
pub fn coloring_satisfies(tri: &Triangulation, colors: &[Veer], even: Veer) -> bool {
    veer_constraints(tri).iter().all(|cs| {
        cs.iter()
            .all(|&(e, is_even)| colors[e] == if is_even { even } else { even.swap() })
    })
}

/// Solutions of the colour system without the calibration bit; either none
/// or a pair exchanged by swapping every colour.
pub fn veer_solutions_uncalibrated(tri: &Triangulation) -> Vec<Vec<Veer>> {
    let mut out = Vec::new();
    for even in [Veer::Red, Veer::Blue] {
        if let Ok(c) = solve_veers(tri, even) {
            out.push(c);
        }
    }
    out
}

fn solve_veers(tri: &Triangulation, even: Veer) -> Result<Vec<Veer>> {
    let mut colors: Vec<Option<Veer>> = vec![None; tri.edges.len()];
    for (t, cs) in veer_constraints(tri).iter().enumerate() {
        for &(e, is_even) in cs {
            let want = if is_even { even } else { even.swap() };
            match colors[e] {
                None => colors[e] = Some(want),
                Some(c) if c == want => {}
                Some(_) => {
                    return Err(Error::NotVeering(format!(
                        "edge {e} is forced to be both red and blue (tet {t})"
                    )))
                }
            }
        }
    }
    colors
        .into_iter()
        .enumerate()
        .map(|(e, c)| c.ok_or_else(|| Error::NotVeering(format!("edge {e} has no equatorial corner"))))
        .collect()
}

pub fn derive_veers(tri: &Triangulation) -> Result<Vec<Veer>> {
    solve_veers(tri, EVEN_PAIR_COLOR)
}

/// A triangulation that passed every validation check.
#[derive(Clone, Debug)]
pub struct VeeringTriangulation {
    tri: Triangulation,
    veers: Vec<Veer>,
    fans: Vec<Fans>,
    below: Vec<usize>,
    above: Vec<usize>,
}

impl VeeringTriangulation {
    pub fn new(tri: Triangulation) -> Result<VeeringTriangulation> {
        let report = validate(&tri);
        if !report.valid {
            return Err(Error::Invalid(report.first_failure().unwrap_or_default()));
        }
        let veers = derive_veers(&tri)?;
        let fans = tri
            .edges
            .iter()
            .map(|e| fans_of(&tri, e).map_err(Error::Internal))
            .collect::<Result<Vec<_>>>()?;
        let mut below = vec![0; tri.faces.len()];
        let mut above = vec![0; tri.faces.len()];
        for face in &tri.faces {
            for &(t, g) in &face.sides {
                if tri.tets[t].is_top_face(g) {
                    below[face.id] = t;
                } else {
                    above[face.id] = t;
                }
            }
        }
        Ok(VeeringTriangulation {
            tri,
            veers,
            fans,
            below,
            above,
        })
    }

    pub fn from_vtri(text: &str) -> Result<VeeringTriangulation> {
        VeeringTriangulation::new(parse_triangulation(text)?)
    }

    pub fn tri(&self) -> &Triangulation {
        &self.tri
    }

    pub fn num_tets(&self) -> usize {
        self.tri.tets.len()
    }

    pub fn num_faces(&self) -> usize {
        self.tri.faces.len()
    }

    pub fn num_edges(&self) -> usize {
        self.tri.edges.len()
    }

    pub fn tet(&self, t: usize) -> &Tetrahedron {
        &self.tri.tets[t]
    }

    pub fn edge(&self, e: usize) -> &EdgeClass {
        &self.tri.edges[e]
    }

    pub fn veers(&self) -> &[Veer] {
        &self.veers
    }

    pub fn fans(&self, e: usize) -> &Fans {
        &self.fans[e]
    }

    /// The tet having `face` as a top face.
    pub fn below(&self, face: usize) -> usize {
        self.below[face]
    }

    /// The tet having `face` as a bottom face.
    pub fn above(&self, face: usize) -> usize {
        self.above[face]
    }

    pub fn face_of(&self, tet: usize, f: u8) -> usize {
        self.tri.face_of(tet, f)
    }

    pub fn top_faces(&self, t: usize) -> [usize; 2] {
        let [f, g] = self.tri.tets[t].top_faces();
        [self.face_of(t, f), self.face_of(t, g)]
    }

    pub fn bottom_faces(&self, t: usize) -> [usize; 2] {
        let [f, g] = self.tri.tets[t].bottom_faces();
        [self.face_of(t, f), self.face_of(t, g)]
    }
}

/// Face lists of the two fans at edge `e`, with multiplicity.
pub fn edge_fans(tri: &VeeringTriangulation, e: usize) -> (Vec<usize>, Vec<usize>) {
    let edge = tri.edge(e);
    let fans = tri.fans(e);
    (
        fans.a.iter().map(|&k| edge.crossings[k].face).collect(),
        fans.b.iter().map(|&k| edge.crossings[k].face).collect(),
    )
}
