use criterion::{black_box, criterion_group, criterion_main, Criterion};
use veerweave::carry::carried_surface;
use veerweave::flowgraph::{cone_membership, dual_graph, simple_cycles};
use veerweave::homology::homology_summary;
use veerweave::transverse::{blowup_graph, Arc, Model, Side};
use veerweave::{build_cusps, ArcSystem, Completion, ConeCertificate, TubeSystem};
use veerweave_bench::load;

const NAMES: &[&str] = &["f8", "f8_cyclic3", "sister_five_cusps"];

fn membership(c: &mut Criterion) {
    for name in NAMES {
        let tri = load(name);
        let h = homology_summary(&tri).unwrap();
        let coords: Vec<i64> = (0..h.betti_1).map(|i| if i % 2 == 0 { 2 } else { -1 }).collect();
        let w = h.from_coordinates(&tri, &coords).unwrap();
        c.bench_function(&format!("cone_membership/{name}"), |b| {
            b.iter(|| cone_membership(black_box(&tri), black_box(&w.0), 0).unwrap())
        });
    }
}

fn cycles(c: &mut Criterion) {
    for name in NAMES {
        let g = dual_graph(&load(name)).unwrap();
        c.bench_function(&format!("simple_cycles/{name}"), |b| {
            b.iter(|| simple_cycles(black_box(&g), 1_000_000))
        });
    }
}

fn surfaces(c: &mut Criterion) {
    for name in NAMES {
        let tri = load(name);
        let cusps = build_cusps(&tri).unwrap();
        let tubes = TubeSystem::all_hollow(cusps.len());
        let h = homology_summary(&tri).unwrap();
        let witness = [1i64, -1]
            .iter()
            .find_map(|&s| match cone_membership(&tri, &h.basis[0].scale(s).0, 0) {
                Ok(ConeCertificate::Member { weights, .. }) => Some(weights.scale(3)),
                _ => None,
            });
        let Some(w) = witness else { continue };
        c.bench_function(&format!("carried_surface/{name}"), |b| {
            b.iter(|| carried_surface(&tri, &cusps, &tubes, black_box(&w.0), &Completion::default()).unwrap())
        });
    }
}

fn blowups(c: &mut Criterion) {
    // Nested arcs on a 24-prong disk, cooriented to match the segments.
    let arcs = (0..6)
        .map(|k| Arc {
            from: (k, 0),
            to: (23 - k, 0),
            side: if k % 2 == 0 { Side::Right } else { Side::Left },
        })
        .collect();
    let sys = ArcSystem {
        model: Model::Disk,
        prongs: 24,
        twist: 0,
        arcs,
    };
    c.bench_function("blowup_graph/nested_24", |b| {
        b.iter(|| blowup_graph(black_box(&sys)).unwrap())
    });
}

criterion_group!(benches, membership, cycles, surfaces, blowups);
criterion_main!(benches);
