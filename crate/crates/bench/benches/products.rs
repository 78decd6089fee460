use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use recwidth::fixtures::RKind;
use recwidth::multiply::{forward_mult, transpose_mult};
use recwidth::build_dyadic_tree;
use recwidth_bench::{square_instance, SIZES};

fn products(c: &mut Criterion) {
    let mut g = c.benchmark_group("products");
    g.sample_size(20);
    for kind in [RKind::Shift, RKind::Diagonal] {
        for n in SIZES {
            let (spec, tree, v) = square_instance(kind, n, 2, 7);
            g.throughput(Throughput::Elements(n as u64));
            g.bench_with_input(BenchmarkId::new(format!("transpose/{}", kind.name()), n), &n, |b, _| {
                b.iter(|| transpose_mult(&spec, &tree, black_box(&v)).unwrap())
            });
            g.bench_with_input(BenchmarkId::new(format!("forward/{}", kind.name()), n), &n, |b, _| {
                b.iter(|| forward_mult(&spec, &tree, black_box(&v)).unwrap())
            });
        }
    }
    g.finish();
}

fn preprocessing(c: &mut Criterion) {
    let mut g = c.benchmark_group("tree");
    g.sample_size(10);
    for n in SIZES {
        let (spec, _, _) = square_instance(RKind::Shift, n, 2, 7);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| build_dyadic_tree(&spec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, products, preprocessing);
criterion_main!(benches);
