use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use rectpack_bench::{floating_containers, random_instances, small_items};
use rectpack_core::containers::solve_container;
use rectpack_core::greedy::nfdh;
use rectpack_core::lab::gen_lowerbound_family;
use rectpack_core::model::{Container, Label};
use rectpack_core::oracle::{solve_exact, OracleLimits};
use rectpack_core::rational::Q;
use rectpack_core::steinberg::steinberg;
use rectpack_core::transforms::compact;

fn greedy(c: &mut Criterion) {
    let mut g = c.benchmark_group("nfdh");
    for n in [100, 1000] {
        let items = small_items(n, 10_000, 1);
        let region = Container::new(0, 0, 10_000, 10_000, Label::Area);
        g.bench_with_input(BenchmarkId::from_parameter(n), &items, |b, items| b.iter(|| nfdh(&region, black_box(items))));
    }
    g.finish();
    let items = small_items(200, 1000, 2);
    let region = Container::new(0, 0, 1000, 1000, Label::Area);
    c.bench_function("steinberg/200", |b| b.iter(|| steinberg(&region, black_box(&items))));
}

fn search(c: &mut Criterion) {
    let insts = random_instances(4, 6, 16);
    c.bench_function("solve_container/c2", |b| {
        b.iter(|| insts.iter().map(|i| solve_container(i, 2, Q::new(1, 10), 500).unwrap().profit).sum::<i64>())
    });
    c.bench_function("oracle/n6", |b| {
        b.iter(|| insts.iter().map(|i| solve_exact(i, &OracleLimits::default()).unwrap().profit).sum::<i64>())
    });
    let lb = gen_lowerbound_family(7).unwrap();
    let mut g = c.benchmark_group("lowerbound");
    g.sample_size(10);
    g.bench_function("n7/c2", |b| b.iter(|| solve_container(&lb, 2, Q::new(1, 10), 2000).unwrap().profit));
    g.finish();
}

fn transforms(c: &mut Criterion) {
    let cs = floating_containers(40, 1000);
    c.bench_function("compact/40", |b| {
        b.iter(|| {
            let mut v = cs.clone();
            compact(&mut v, &mut []);
            v
        })
    });
}

criterion_group!(benches, greedy, search, transforms);
criterion_main!(benches);
