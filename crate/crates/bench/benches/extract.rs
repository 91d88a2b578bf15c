use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use vqhull::reference::hoare_extract;
use vqhull::{extract_subsets, find_extremes, gen_disk, DirectedEdge, ExtractConfig, LaneWidth};

fn extraction(c: &mut Criterion) {
    let n = 1 << 20;
    let points = gen_disk(n, 1);
    let (lo, hi) = find_extremes(points.xs(), points.ys()).unwrap();
    let ea = DirectedEdge::new(points.get(lo), points.get(hi));
    let eb = ea.reversed();

    let mut group = c.benchmark_group("extract");
    group.throughput(Throughput::Elements(n as u64));
    group.bench_function("hoare", |b| {
        b.iter_batched_ref(
            || points.clone(),
            |p| hoare_extract(p.as_mut(), &ea, &eb),
            BatchSize::LargeInput,
        )
    });
    for lanes in LaneWidth::ALL {
        for wc in [false, true] {
            let cfg = ExtractConfig {
                write_combining: wc,
                ..ExtractConfig::with_lanes(lanes)
            };
            let id = BenchmarkId::new(if wc { "staged" } else { "direct" }, lanes);
            group.bench_function(id, |b| {
                b.iter_batched_ref(
                    || points.clone(),
                    |p| extract_subsets(p.as_mut(), &ea, &eb, &cfg),
                    BatchSize::LargeInput,
                )
            });
        }
    }
    group.finish();
}

criterion_group!(benches, extraction);
criterion_main!(benches);
