//! One pass/fail line per acceptance criterion. Run with
//! `cargo test -p veerweave-cli --test acceptance -- --nocapture`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use veerweave::carry::{carried_surface, flip_up, flip_walk, thurston_norm, NormOutcome};
use veerweave::cusp::{intersect, tube_report, Direction};
use veerweave::flowgraph::{cone_membership, dual_graph, simple_cycles, verify_certificate};
use veerweave::homology::{coboundary, homology_summary, same_class};
use veerweave::transverse::{
    arc_system_from_tube, blowup_graph, transversality_report, Arc, EdgeKind, GraphKind, Model, Side, Verdict, INNER,
};
use veerweave::tri::{edge_fans, parse_triangulation, validate};
use veerweave::{build_cusps, ArcSystem, Cocycle, Completion, ConeCertificate, TubeSystem, VeeringTriangulation};

const FIXTURES: &[&str] = &[
    "f8",
    "f8_sister",
    "f8_two_cusps",
    "sister_two_cusps",
    "f8_cyclic2",
    "f8_cyclic3",
    "sister_five_cusps",
];

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn read(name: &str) -> String {
    std::fs::read_to_string(common::fixtures().join(format!("{name}.vtri"))).expect("fixture readable")
}

fn load(name: &str) -> VeeringTriangulation {
    VeeringTriangulation::from_vtri(&read(name)).expect("fixture is veering")
}

fn fan_sums(tri: &VeeringTriangulation, w: &[i64]) -> Option<Vec<i64>> {
    (0..tri.num_edges())
        .map(|e| {
            let (a, b) = edge_fans(tri, e);
            let sa: i64 = a.iter().map(|&f| w[f]).sum();
            let sb: i64 = b.iter().map(|&f| w[f]).sum();
            (sa == sb).then_some(sa)
        })
        .collect()
}

/// Nonnegative witnesses of random member classes.
fn witness_pool(tri: &VeeringTriangulation, rng: &mut ChaCha8Rng, tries: usize) -> Vec<Cocycle> {
    let h = homology_summary(tri).unwrap();
    let mut pool = Vec::new();
    for _ in 0..tries {
        let coords: Vec<i64> = (0..h.betti_1).map(|_| rng.gen_range(-3..=3)).collect();
        let w = h.from_coordinates(tri, &coords).unwrap();
        if let ConeCertificate::Member { weights, .. } = cone_membership(tri, &w.0, 0).unwrap() {
            if weights.total() > 0 && !pool.contains(&weights) {
                pool.push(weights);
            }
        }
    }
    pool
}

fn random_nonnegative(tri: &VeeringTriangulation, pool: &[Cocycle], rng: &mut ChaCha8Rng) -> Cocycle {
    let mut w = Cocycle::zero(tri.num_faces());
    for p in pool {
        w = w.add(&p.scale(rng.gen_range(0..=2)));
    }
    if w.total() == 0 {
        w = pool[rng.gen_range(0..pool.len())].clone();
    }
    for _ in 0..rng.gen_range(0..4) {
        if let Ok(next) = flip_up(tri, &w.0, rng.gen_range(0..tri.num_tets())) {
            w = next;
        }
    }
    w
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let text = read("f8");
    let report = validate(&parse_triangulation(&text).unwrap());
    ensure!(
        report.valid,
        "f8 fails {:?}",
        report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| &c.name)
            .collect::<Vec<_>>()
    );
    let base: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut mutations = 0;
    for t in 0..2 {
        for a in 0..4u8 {
            for b in a + 1..4 {
                if [a, b] == [2, 3] {
                    continue;
                }
                let mut v = base.clone();
                v["top_edges"][t] = serde_json::json!([a, b]);
                let r = validate(&parse_triangulation(&v.to_string()).unwrap());
                ensure!(!r.valid, "mutation tet {t} top edge {a}{b} passes");
                mutations += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(mutations == 10 && secs < 1.0, "{mutations} mutations in {secs:.2}s");
    Ok(format!(
        "{} checks pass, {mutations} mutations fail, {secs:.3}s",
        report.checks.len()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut total, mut members) = (0, 0);
    for name in FIXTURES {
        let tri = load(name);
        ensure!(tri.num_tets() <= 12, "{name} too large");
        let cycles = simple_cycles(&dual_graph(&tri).unwrap(), 1_000_000);
        ensure!(!cycles.truncated, "{name}: cycle enumeration truncated");
        let h = homology_summary(&tri).unwrap();
        for k in 0..40 {
            let coords: Vec<i64> = (0..h.betti_1).map(|_| rng.gen_range(-4..=4)).collect();
            let mut w = h.from_coordinates(&tri, &coords).unwrap();
            if k % 2 == 1 {
                let pot: Vec<i64> = (0..tri.num_tets()).map(|_| rng.gen_range(-3..=3)).collect();
                w = w.add(&coboundary(&tri, &pot));
            }
            let brute = cycles
                .cycles
                .iter()
                .all(|z| z.iter().map(|&f| w.0[f]).sum::<i64>() >= 0);
            for seed in [0u64, 1] {
                let cert = cone_membership(&tri, &w.0, seed).unwrap();
                ensure!(
                    cert.is_member() == brute,
                    "{name} {coords:?}: verdict differs from brute force"
                );
                verify_certificate(&tri, &w.0, &cert).map_err(|e| format!("{name} {coords:?}: {e}"))?;
            }
            members += brute as usize;
            total += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(total >= 200 && secs < 30.0, "{total} classes in {secs:.2}s");
    Ok(format!(
        "{total} classes ({members} members), all certificates verified, {secs:.2}s"
    ))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let tri = load("f8");
    let h = homology_summary(&tri).unwrap();
    let cusps = build_cusps(&tri).unwrap();
    let sign = if cone_membership(&tri, &h.basis[0].0, 0).unwrap().is_member() {
        1
    } else {
        -1
    };
    let u = h.basis[0].scale(sign);
    let NormOutcome::Norm(n) = thurston_norm(&tri, &cusps, &TubeSystem::all_hollow(1), &u.0, 0).unwrap() else {
        return Err("generator off the cone".into());
    };
    ensure!(
        n.value == "1" && n.certificate.total_weight == 2,
        "x(u) = {}, weight {}",
        n.value,
        n.certificate.total_weight
    );
    // Every nonnegative cocycle with total weight at most 6.
    let mut min = i64::MAX;
    let mut stack = vec![Vec::new()];
    while let Some(w) = stack.pop() {
        if w.len() < tri.num_faces() {
            let used: i64 = w.iter().sum();
            for x in 0..=6 - used {
                let mut v = w.clone();
                v.push(x);
                stack.push(v);
            }
            continue;
        }
        let Some(sums) = fan_sums(&tri, &w) else { continue };
        let k = h.coordinates(&tri, &w).unwrap()[0] * sign;
        let total: i64 = w.iter().sum();
        let chi = total - sums.iter().sum::<i64>();
        ensure!(chi == -k, "{w:?}: chi {chi} for class {k}");
        if k == 1 {
            min = min.min(total);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(min == 2 && secs < 5.0, "minimal weight {min}, {secs:.2}s");
    Ok(format!("x(u) = 1, minimal carried weight 2, -chi = 1, {secs:.3}s"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut checked, mut failures) = (0, 0);
    for name in FIXTURES {
        let tri = load(name);
        let cusps = build_cusps(&tri).unwrap();
        let tubes = TubeSystem::all_hollow(cusps.len());
        let pool = witness_pool(&tri, &mut rng, 60);
        ensure!(!pool.is_empty(), "{name}: no carried classes");
        for _ in 0..1450 {
            let w = random_nonnegative(&tri, &pool, &mut rng);
            let sums = fan_sums(&tri, &w.0).ok_or(format!("{name}: switch conditions fail"))?;
            let cells = w.total() - sums.iter().sum::<i64>();
            let s = carried_surface(&tri, &cusps, &tubes, &w.0, &Completion::default()).unwrap();
            if 2 * cells != -w.total() || s.euler_char != cells {
                failures += 1;
            }
            checked += 1;
        }
    }
    ensure!(checked >= 10_000 && failures == 0, "{failures} failures in {checked}");
    Ok(format!("{checked} cocycles, 0 failures"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut meridians = 0;
    for name in FIXTURES {
        let cusps = build_cusps(&load(name)).unwrap();
        for (i, c) in cusps.cusps.iter().enumerate() {
            let k = c.up_ladders();
            ensure!(k > 0 && 2 * k == c.ladders.len(), "{name} cusp {i}: unbalanced ladders");
            for (j, &l) in c.ladder_order.iter().enumerate() {
                let want = if j % 2 == 0 { Direction::Down } else { Direction::Up };
                ensure!(
                    c.ladders[l].direction == want,
                    "{name} cusp {i}: directions do not alternate"
                );
            }
            for p in &c.poles {
                ensure!(
                    c.primal_boundary(&p.chain).iter().all(|&x| x == 0),
                    "{name} cusp {i}: open pole"
                );
                ensure!(
                    c.coordinates(&p.chain) == (1, 0),
                    "{name} cusp {i}: pole not primitive and parallel"
                );
            }
            let k = k as i64;
            for p in -6i64..=6 {
                for q in 1i64..=4 {
                    if num_integer::gcd(p, q) != 1 {
                        continue;
                    }
                    let mut tubes = TubeSystem::all_hollow(cusps.len());
                    tubes.meridians[i] = Some((-p, -q));
                    let r = tube_report(&cusps, &tubes).unwrap();
                    let dual: Vec<i64> = c.rho.iter().zip(&c.lambda_dual).map(|(r, l)| -q * r - p * l).collect();
                    let hits: i64 = c.poles.iter().map(|pole| intersect(&pole.chain, &dual).abs()).sum();
                    ensure!(
                        r.strict == (k * q >= 3) && r.strict == (hits >= 6),
                        "{name} cusp {i} meridian ({p}, {q}): strict {} with {hits} intersections",
                        r.strict
                    );
                    meridians += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 5.0, "{secs:.2}s");
    Ok(format!("{meridians} synthetic meridians agree, {secs:.3}s"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let setups: Vec<_> = FIXTURES
        .iter()
        .map(|&name| {
            let tri = load(name);
            let cusps = build_cusps(&tri).unwrap();
            let tubes = TubeSystem::all_hollow(cusps.len());
            let pool = witness_pool(&tri, &mut rng, 40);
            (name, tri, cusps, tubes, pool)
        })
        .collect();
    let mut pairs = 0;
    for _ in 0..100_000 {
        if pairs == 1000 {
            break;
        }
        let (name, tri, cusps, tubes, pool) = &setups[rng.gen_range(0..setups.len())];
        let w = random_nonnegative(tri, pool, &mut rng);
        let Ok(v) = flip_up(tri, &w.0, rng.gen_range(0..tri.num_tets())) else {
            continue;
        };
        let a = carried_surface(tri, cusps, tubes, &w.0, &Completion::default()).unwrap();
        let b = carried_surface(tri, cusps, tubes, &v.0, &Completion::default()).unwrap();
        ensure!(
            same_class(tri, &w.0, &v.0)
                && v.total() == w.total()
                && a.euler_char == b.euler_char
                && a.cusps
                    .iter()
                    .zip(&b.cusps)
                    .all(|(x, y)| x.restriction == y.restriction),
            "{name}: flip of {:?} changes an invariant",
            w.0
        );
        pairs += 1;
    }
    ensure!(pairs == 1000, "only {pairs} flippable pairs");
    let tri = load("f8");
    let h = homology_summary(&tri).unwrap();
    let fiber = [1i64, -1]
        .iter()
        .find_map(|&s| match cone_membership(&tri, &h.basis[0].scale(s).0, 0).unwrap() {
            ConeCertificate::Member { weights, .. } => Some(weights),
            _ => None,
        })
        .unwrap();
    let walk = flip_walk(&tri, &fiber.0, 100).unwrap();
    ensure!(
        walk.cycle_start.is_some(),
        "the fiber flip walk never revisits a position"
    );
    Ok(format!(
        "{pairs} flips preserve every invariant, fiber walk cycles with length {}",
        walk.cycle_length.unwrap()
    ))
}

fn criterion_7() -> Outcome {
    let arc = |from, to| Arc {
        from,
        to,
        side: Side::Right,
    };
    let disk = |arcs| ArcSystem {
        model: Model::Disk,
        prongs: 6,
        twist: 0,
        arcs,
    };
    let g = blowup_graph(&disk(vec![arc((0, 0), (1, 0))])).map_err(|e| e.to_string())?;
    ensure!(g.is_trivial() && !g.needs_blowup, "adjacent arc needs a blowup");
    let g = blowup_graph(&disk(vec![arc((0, 0), (3, 0))])).map_err(|e| e.to_string())?;
    ensure!(
        g.kind == GraphKind::Tree
            && g.vertices.len() == 2
            && g.edges.len() == 1
            && g.vertices.iter().all(|v| v.prongs.len() == 3),
        "six-prong arc: {g:?}"
    );
    let annulus = ArcSystem {
        model: Model::Annulus,
        prongs: 4,
        twist: 0,
        arcs: vec![arc((0, 0), (INNER, 0))],
    };
    let g = blowup_graph(&annulus).map_err(|e| e.to_string())?;
    ensure!(
        g.kind == GraphKind::CircleGraph
            && g.edges.iter().all(|e| e.kind == EdgeKind::Circle)
            && g.vertices.iter().all(|v| v.circle),
        "annulus arc: {g:?}"
    );
    // Arc systems read off carried surfaces, on every fixture.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut derived = 0;
    for name in FIXTURES {
        let tri = load(name);
        let cusps = build_cusps(&tri).unwrap();
        let tubes = TubeSystem::all_hollow(cusps.len());
        let h = homology_summary(&tri).unwrap();
        let mut samples: Vec<Cocycle> = Vec::new();
        let pool = witness_pool(&tri, &mut rng, 40);
        samples.extend((0..40).map(|_| random_nonnegative(&tri, &pool, &mut rng)));
        for i in 0..h.basis.len() {
            for j in i + 1..h.basis.len() {
                let c = h.basis[i].add(&h.basis[j]);
                let Ok(ConeCertificate::Member { weights, .. }) = cone_membership(&tri, &c.0, 0) else {
                    continue;
                };
                for s in 1..(1u32 << tri.num_tets()) {
                    let p: Vec<i64> = (0..tri.num_tets()).map(|t| (s >> t & 1) as i64).collect();
                    let v = weights.add(&coboundary(&tri, &p));
                    if v.is_nonnegative() {
                        samples.push(v);
                    }
                }
            }
        }
        for w in samples {
            for c in [Completion::InnermostPlus, Completion::InnermostMinus] {
                let s = carried_surface(&tri, &cusps, &tubes, &w.0, &c).unwrap();
                for d in s.cusps.iter().filter(|d| !d.model.pairs.is_empty()) {
                    let sys = arc_system_from_tube(&d.model).map_err(|e| format!("{name} {:?}: {e}", w.0))?;
                    sys.validate().map_err(|e| format!("{name} {:?}: {e}", w.0))?;
                    derived += 1;
                }
            }
        }
    }
    ensure!(derived > 0, "no surface-derived arc system sampled");
    Ok(format!(
        "three scenarios exact, {derived} surface-derived arc systems coherent"
    ))
}

fn criterion_8() -> Outcome {
    let configs = [
        (0u64, Completion::InnermostPlus),
        (7, Completion::InnermostPlus),
        (0, Completion::InnermostMinus),
        (7, Completion::InnermostMinus),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut members = 0;
    for name in FIXTURES {
        let tri = load(name);
        let cusps = build_cusps(&tri).unwrap();
        let tubes = TubeSystem::all_hollow(cusps.len());
        let h = homology_summary(&tri).unwrap();
        for _ in 0..25 {
            let coords: Vec<i64> = (0..h.betti_1).map(|_| rng.gen_range(-3..=3)).collect();
            let w = h.from_coordinates(&tri, &coords).unwrap();
            if !cone_membership(&tri, &w.0, 0).unwrap().is_member() {
                continue;
            }
            members += 1;
            let reports: Vec<_> = configs
                .iter()
                .map(|(seed, c)| transversality_report(&tri, &cusps, &tubes, &w.0, *seed, c).unwrap())
                .collect();
            let first = &reports[0];
            ensure!(
                first.verdict != Verdict::NotTransverse,
                "{name} {coords:?}: member reported not transverse"
            );
            for r in &reports[1..] {
                ensure!(r.verdict == first.verdict, "{name} {coords:?}: verdicts differ");
                for (a, b) in r.tubes.iter().zip(&first.tubes) {
                    let same = match (&a.blowup, &b.blowup) {
                        (Some(x), Some(y)) => x.isomorphic(y),
                        (None, None) => true,
                        _ => false,
                    };
                    ensure!(same, "{name} {coords:?}: blowup graphs differ");
                }
            }
        }
    }
    ensure!(members > 20, "only {members} member classes sampled");
    Ok(format!("{members} member classes, 4 configurations each"))
}

fn criterion_9() -> Outcome {
    let mut runs = 0;
    for args in common::every_subcommand() {
        for json in [false, true] {
            let mut full: Vec<&str> = if json { vec!["--json"] } else { vec![] };
            full.extend(&args);
            let a = common::run(&full);
            let b = common::run(&full);
            ensure!(
                a.stdout == b.stdout && a.status == b.status,
                "{full:?} differs between runs"
            );
            runs += 1;
        }
    }
    Ok(format!("{runs} invocations byte-identical across two runs"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("fixture validity", criterion_1),
        ("cone duality", criterion_2),
        ("figure-eight norm", criterion_3),
        ("Euler characteristic identity", criterion_4),
        ("ladder structure", criterion_5),
        ("flip calculus", criterion_6),
        ("blowup construction", criterion_7),
        ("blowup invariance", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS  {detail}", i + 1),
            Err(why) => {
                println!("criterion {} ({name}): FAIL  {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
