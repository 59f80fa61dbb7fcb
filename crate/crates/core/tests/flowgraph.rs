mod common;

use std::time::Instant;

use num_integer::gcd;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use veerweave::flowgraph::{
    brute_force_member, cone_face, cone_membership, dual_graph, simple_cycles, verify_certificate, Ambient,
};
use veerweave::homology::homology_summary;
use veerweave::{build_cusps, ConeCertificate, TubeSystem};

#[test]
fn dual_graph_shape() {
    for name in common::FIXTURES {
        let tri = common::load(name);
        let g = dual_graph(&tri).unwrap();
        for v in 0..tri.num_tets() {
            assert_eq!((g.in_degree(v), g.out_degree(v)), (2, 2), "{name}");
        }
        assert!(g.is_strongly_connected(), "{name}");
        let lib = simple_cycles(&g, 1_000_000);
        assert!(!lib.truncated);
        let mut a: Vec<Vec<usize>> = lib.cycles.iter().map(|z| canonical(z)).collect();
        let mut b: Vec<Vec<usize>> = common::naive_cycles(&tri).iter().map(|z| canonical(z)).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b, "{name}");
    }
}

fn canonical(z: &[usize]) -> Vec<usize> {
    let k = (0..z.len()).min_by_key(|&i| z[i]).unwrap();
    z[k..].iter().chain(&z[..k]).copied().collect()
}

/// Cone membership against brute force over all simple cycles, with every
/// certificate checked by the verifier.
#[test]
fn membership_agrees_with_brute_force() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut total = 0;
    let (mut members, mut non_members) = (0, 0);
    for name in common::FIXTURES {
        let tri = common::load(name);
        assert!(tri.num_tets() <= 12);
        let cycles = common::naive_cycles(&tri);
        let h = homology_summary(&tri).unwrap();
        for k in 0..40 {
            let coords: Vec<i64> = (0..h.betti_1).map(|_| rng.gen_range(-4..=4)).collect();
            let mut w = h.from_coordinates(&tri, &coords).unwrap();
            // Move off the tree-normal representative now and then.
            if k % 2 == 1 {
                let pot: Vec<i64> = (0..tri.num_tets()).map(|_| rng.gen_range(-3..=3)).collect();
                w = w.add(&veerweave::homology::coboundary(&tri, &pot));
            }
            let brute = cycles.iter().all(|z| z.iter().map(|&f| w.0[f]).sum::<i64>() >= 0);
            let lib_cycles = simple_cycles(&dual_graph(&tri).unwrap(), 1_000_000);
            assert_eq!(brute_force_member(&w.0, &lib_cycles), Some(brute));
            for seed in [0u64, 1, 99] {
                let cert = cone_membership(&tri, &w.0, seed).unwrap();
                assert_eq!(cert.is_member(), brute, "{name} {coords:?} seed {seed}");
                verify_certificate(&tri, &w.0, &cert).unwrap_or_else(|e| panic!("{name} {coords:?}: {e}"));
            }
            if brute {
                members += 1;
            } else {
                non_members += 1;
            }
            total += 1;
        }
    }
    assert!(total >= 200);
    assert!(
        members > 20 && non_members > 20,
        "{members} members, {non_members} non-members"
    );
    assert!(start.elapsed().as_secs_f64() < 30.0);
}

#[test]
fn verifier_rejects_tampered_certificates() {
    let tri = common::load("f8");
    let h = homology_summary(&tri).unwrap();
    let (mut member, mut other) = (None, None);
    for c in [-1i64, 1] {
        let w = h.from_coordinates(&tri, &[c]).unwrap();
        let cert = cone_membership(&tri, &w.0, 0).unwrap();
        if cert.is_member() {
            member = Some((w, cert));
        } else {
            other = Some((w, cert));
        }
    }
    let (w, cert) = member.expect("one sign of the generator is carried");
    let ConeCertificate::Member { weights, potential } = cert else {
        unreachable!()
    };
    let mut bad = weights.clone();
    bad.0[0] += 1;
    let forged = ConeCertificate::Member {
        weights: bad,
        potential: potential.clone(),
    };
    assert!(verify_certificate(&tri, &w.0, &forged).is_err());
    // A witness for the doubled class is not a witness for this one.
    let doubled = ConeCertificate::Member {
        weights: weights.scale(2),
        potential,
    };
    assert!(verify_certificate(&tri, &w.0, &doubled).is_err());

    let (v, cert) = other.expect("the other sign is not");
    let ConeCertificate::NonMember { cycle, tets, pairing } = cert else {
        unreachable!()
    };
    assert!(pairing < 0);
    let wrong = ConeCertificate::NonMember {
        cycle: cycle.clone(),
        tets: tets.clone(),
        pairing: pairing - 1,
    };
    assert!(verify_certificate(&tri, &v.0, &wrong).is_err());
    let mut broken = cycle.clone();
    broken.push(broken[0]);
    let broken = ConeCertificate::NonMember {
        cycle: broken,
        tets,
        pairing,
    };
    assert!(verify_certificate(&tri, &v.0, &broken).is_err());
    // The same cycle does not certify the carried class.
    let ConeCertificate::NonMember { cycle, tets, .. } = cone_membership(&tri, &v.0, 0).unwrap() else {
        unreachable!()
    };
    let p = cycle.iter().map(|&f| w.0[f]).sum();
    assert!(verify_certificate(
        &tri,
        &w.0,
        &ConeCertificate::NonMember {
            cycle,
            tets,
            pairing: p
        }
    )
    .is_err());
}

fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    v.iter().map(|x| x / g).collect()
}

/// Extreme rays of a pointed planar cone spanned by `gens`.
fn planar_extreme_rays(gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let cross = |a: &[i64], b: &[i64]| a[0] * b[1] - a[1] * b[0];
    let mut out: Vec<Vec<i64>> = Vec::new();
    for g in gens {
        let first = gens.iter().all(|h| cross(g, h) >= 0);
        let last = gens.iter().all(|h| cross(h, g) >= 0);
        if first || last {
            let p = primitive(g);
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

#[test]
fn planar_cone_faces_match_a_direct_computation() {
    for name in ["f8_two_cusps", "sister_two_cusps"] {
        let tri = common::load(name);
        let h = homology_summary(&tri).unwrap();
        assert_eq!(h.betti_1, 2);
        let cusps = build_cusps(&tri).unwrap();
        let tubes = TubeSystem::all_hollow(cusps.len());
        let face = cone_face(&tri, &h, &cusps, &tubes, Ambient::Cusped, 100_000).unwrap();
        let gens: Vec<Vec<i64>> = common::naive_cycles(&tri)
            .iter()
            .map(|z| h.basis.iter().map(|b| z.iter().map(|&f| b.0[f]).sum()).collect())
            .filter(|g: &Vec<i64>| g.iter().any(|&x| x != 0))
            .collect();
        let mut rays = face.extreme_rays.clone();
        rays.sort();
        assert_eq!(face.lineality_dim, 0, "{name}");
        assert_eq!(rays, planar_extreme_rays(&gens), "{name}");
    }
    let tri = common::load("f8_two_cusps");
    let h = homology_summary(&tri).unwrap();
    let cusps = build_cusps(&tri).unwrap();
    let face = cone_face(&tri, &h, &cusps, &TubeSystem::all_hollow(2), Ambient::Cusped, 100_000).unwrap();
    let mut rays = face.extreme_rays;
    rays.sort();
    assert_eq!(rays, vec![vec![2, -1], vec![2, 1]]);
}

#[test]
fn cycle_cap_is_reported() {
    let tri = common::load("sister_five_cusps");
    let h = homology_summary(&tri).unwrap();
    let cusps = build_cusps(&tri).unwrap();
    let tubes = TubeSystem::all_hollow(cusps.len());
    assert!(cone_face(&tri, &h, &cusps, &tubes, Ambient::Cusped, 1).is_err());
}
