mod common;

use std::time::Instant;

use num_integer::gcd;
use veerweave::cusp::{intersect, tube_report, Direction};
use veerweave::{build_cusps, TubeSystem};

#[test]
fn cusps_are_tori_covering_every_tip() {
    for name in common::FIXTURES {
        let tri = common::load(name);
        let cusps = build_cusps(&tri).unwrap();
        let tips: usize = cusps.cusps.iter().map(|c| c.tips.len()).sum();
        assert_eq!(tips, 4 * tri.num_tets(), "{name}");
        for c in &cusps.cusps {
            assert_eq!(c.euler_characteristic(), 0, "{name} cusp {}", c.id);
            assert_eq!(c.primal_cycle_basis().len(), c.sides.len() + 1 - c.num_vertices);
            assert_eq!(c.dual_cycle_basis().len(), c.sides.len() + 1 - c.tips.len());
        }
    }
}

#[test]
fn ladder_structure() {
    let start = Instant::now();
    for name in common::FIXTURES {
        let cusps = build_cusps(&common::load(name)).unwrap();
        for c in &cusps.cusps {
            let up = c.up_ladders();
            let down = c.ladders.len() - up;
            assert!(up > 0 && up == down, "{name} cusp {}: {up} up, {down} down", c.id);
            assert_eq!(c.poles.len(), c.ladders.len());
            assert_eq!(c.ladder_order.len(), c.ladders.len());
            for (j, &l) in c.ladder_order.iter().enumerate() {
                let want = if j % 2 == 0 { Direction::Down } else { Direction::Up };
                assert_eq!(c.ladders[l].direction, want, "{name} cusp {} slot {j}", c.id);
            }
            // Each pole separates an upward ladder from a downward one.
            for p in &c.poles {
                assert_eq!(c.ladders[p.up_ladder].direction, Direction::Up);
                assert_eq!(c.ladders[p.down_ladder].direction, Direction::Down);
            }
            // Ladderpoles are closed, primitive and all parallel to lambda.
            assert_eq!(c.coordinates(&c.lambda_primal), (1, 0));
            assert_eq!(intersect(&c.lambda_primal, &c.rho), 1);
            for p in &c.poles {
                assert!(c.primal_boundary(&p.chain).iter().all(|&x| x == 0), "{name}");
                let (a, b) = c.coordinates(&p.chain);
                assert_eq!(gcd(a, b), 1, "{name}: pole class ({a}, {b}) not primitive");
                assert_eq!((a, b), (1, 0), "{name}: pole not parallel to lambda");
            }
            // Ladder cores are dual cycles in the class of +-lambda.
            let basis = c.primal_cycle_basis();
            for l in &c.ladders {
                assert!(c.dual_boundary(&l.core).iter().all(|&x| x == 0));
                let mut signs = basis.iter().filter_map(|z| {
                    let b = c.coordinates(z).1;
                    let x = intersect(z, &l.core);
                    assert_eq!(x.abs(), b.abs(), "{name}");
                    (b != 0).then_some((x * b).signum())
                });
                let s = signs.next().expect("some basis cycle crosses lambda");
                assert!(signs.all(|t| t == s), "{name}");
            }
        }
    }
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

/// Strictness from the prong formula and from the count of intersections
/// of a meridian with the union of the ladderpole curves, over a grid of
/// meridians on every cusp of every fixture.
#[test]
fn strictness_grid() {
    let start = Instant::now();
    let mut checked = 0;
    for name in common::FIXTURES {
        let cusps = build_cusps(&common::load(name)).unwrap();
        for (i, c) in cusps.cusps.iter().enumerate() {
            for p in -6i64..=6 {
                for q in 1i64..=4 {
                    if gcd(p, q) != 1 {
                        continue;
                    }
                    for (p, q) in [(p, q), (-p, -q)] {
                        let mut tubes = TubeSystem::all_hollow(cusps.len());
                        tubes.meridians[i] = Some((p, q));
                        let file = serde_json::to_string(&tubes.to_file()).unwrap();
                        let tubes = TubeSystem::parse(&file, cusps.len()).unwrap();
                        let report = tube_report(&cusps, &tubes).unwrap();
                        let (mp, mq) = tubes.meridians[i].unwrap();
                        assert!(mq < 0, "meridian not normalized");
                        // A dual cycle in the meridian class: i(x, m) = x1 mq - x2 mp.
                        let dual: Vec<i64> = c.rho.iter().zip(&c.lambda_dual).map(|(r, l)| mq * r + mp * l).collect();
                        let hits: i64 = c.poles.iter().map(|pole| intersect(&pole.chain, &dual).abs()).sum();
                        let k = c.up_ladders() as i64;
                        let formula = k * q.abs() >= 3;
                        assert_eq!(hits, 2 * k * q.abs(), "{name} cusp {i} ({p}, {q})");
                        assert_eq!(report.strict, formula, "{name} cusp {i} ({p}, {q})");
                        assert_eq!(report.strict, hits >= 6, "{name} cusp {i} ({p}, {q})");
                        let entry = &report.cusps[i];
                        assert_eq!(entry.index, Some(2 - k * q.abs()));
                        assert_eq!(entry.ladderpole_intersection, Some(hits));
                        assert_eq!(report.gamma, vec![i]);
                        checked += 1;
                    }
                }
            }
        }
    }
    println!("{checked} meridians checked");
    assert!(checked >= 500);
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn figure_eight_solid_tube_examples() {
    let cusps = build_cusps(&common::load("f8")).unwrap();
    let one = |m: (i64, i64)| {
        let tubes = TubeSystem {
            meridians: vec![Some(m)],
        };
        tube_report(&cusps, &tubes).unwrap()
    };
    // Two upward ladders and |i(m, lambda)| = 1: two prongs, index 0.
    let r = one((1, -1));
    assert_eq!(
        (r.cusps[0].prongs, r.cusps[0].index, r.strict),
        (Some(2), Some(0), false)
    );
    let r = one((1, -2));
    assert_eq!(
        (r.cusps[0].prongs, r.cusps[0].index, r.strict),
        (Some(4), Some(-2), true)
    );
    let r = tube_report(&cusps, &TubeSystem::all_hollow(1)).unwrap();
    assert!(r.strict && r.gamma.is_empty() && r.cusps[0].prongs.is_none());
}

#[test]
fn tube_files_are_checked() {
    for bad in [
        r#"{"cusps":[{"id":0,"kind":"solid","meridian":[1,0]}]}"#,
        r#"{"cusps":[{"id":0,"kind":"solid","meridian":[2,4]}]}"#,
        r#"{"cusps":[{"id":0,"kind":"solid"}]}"#,
        r#"{"cusps":[{"id":0,"kind":"hollow","meridian":[1,1]}]}"#,
        r#"{"cusps":[{"id":1,"kind":"hollow"}]}"#,
        r#"{"cusps":[{"id":0,"kind":"hollow"},{"id":0,"kind":"hollow"}]}"#,
    ] {
        assert!(TubeSystem::parse(bad, 1).is_err(), "{bad}");
    }
    let t = TubeSystem::parse(r#"{"cusps":[{"id":0,"kind":"solid","meridian":[-2,1]}]}"#, 1).unwrap();
    assert_eq!(t.meridians, vec![Some((2, -1))]);
    assert_eq!(
        TubeSystem::parse(r#"{"cusps":[]}"#, 2).unwrap(),
        TubeSystem::all_hollow(2)
    );
}
