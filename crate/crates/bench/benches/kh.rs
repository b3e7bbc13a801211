use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kh_bench::{companion, diagrams};
use kh_core::khcomplex::{build_complex, homology, homology_z, induced_homology_map, x_action, Ring};
use kh_core::movie::movie_chain_map;
use kh_core::steenrod::sq1;

fn complexes(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_complex");
    for (name, d) in diagrams() {
        g.bench_with_input(BenchmarkId::from_parameter(&name), &d, |b, d| b.iter(|| build_complex(d, Ring::F2)));
    }
    g.finish();
}

fn homologies(c: &mut Criterion) {
    let mut g = c.benchmark_group("homology");
    g.sample_size(10);
    for (name, d) in diagrams() {
        g.bench_with_input(BenchmarkId::new("f2", &name), &d, |b, d| b.iter(|| homology(&build_complex(d, Ring::F2))));
        if d.crossing_count() <= 8 {
            g.bench_with_input(BenchmarkId::new("z", &name), &d, |b, d| b.iter(|| homology_z(&build_complex(d, Ring::Z))));
        }
    }
    g.finish();
}

fn maps(c: &mut Criterion) {
    let mut g = c.benchmark_group("maps");
    g.sample_size(10);
    for n in 1..=2 {
        let bundle = companion(n);
        g.bench_function(BenchmarkId::new("movie_homology_map", n), |b| {
            b.iter(|| induced_homology_map(&movie_chain_map(&bundle.movie).unwrap().total().unwrap()).unwrap())
        });
        let bp = bundle.basepoint.unwrap();
        g.bench_function(BenchmarkId::new("x_action", n), |b| {
            b.iter(|| {
                let cx = Arc::new(build_complex(&bundle.companion, Ring::F2));
                induced_homology_map(&x_action(&cx, bp).unwrap()).unwrap()
            })
        });
        g.bench_function(BenchmarkId::new("sq1", n), |b| {
            b.iter(|| {
                let cz = build_complex(&bundle.companion, Ring::Z);
                sq1(&cz, &cz.to_f2()).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, complexes, homologies, maps);
criterion_main!(benches);
