use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use tdn_diversity::ingest::{ingest_bytes, IngestConfig, OnMalformed};
use tdn_diversity::metrics::suite_with;
use tdn_diversity::simulate::{
    generate, richness_sweep_with, AbundanceModel, Individuals, PopulationSpec,
};
use tdn_diversity::{Execution, SubsampleSpec};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn metric_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("metric_suite");
    for richness in [10_000usize, 150_000] {
        let table = generate(&PopulationSpec {
            model: AbundanceModel::Zipf { exponent: 1.0 },
            richness,
            individuals: 25 * richness as u64,
            seed: 1,
        })
        .unwrap();
        group.throughput(Throughput::Elements(richness as u64));
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, richness), &table, |b, t| {
                b.iter(|| suite_with(black_box(t), SubsampleSpec::FULL, exec))
            });
        }
    }
    group.finish();
}

fn sharded_ingest(c: &mut Criterion) {
    let lines = 200_000;
    let mut data = String::new();
    for i in 0..lines {
        let id = (i * 7919) % 20_000;
        data.push_str(&format!(
            "{{\"id\":{i},\"text\":\"post {i}\",\"user\":{{\"id_str\":\"{id}\"}}}}\n"
        ));
    }
    let cfg = IngestConfig::new("user.id_str", OnMalformed::SkipAndCount).unwrap();
    let mut group = c.benchmark_group("ingest");
    group.throughput(Throughput::Elements(lines));
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "4_shards"), |b| {
            b.iter(|| ingest_bytes(black_box(data.as_bytes()), &cfg, 4, exec).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("richness_sweep");
    group.sample_size(10);
    let richness = [100, 300, 1000, 3000, 10_000];
    let seeds: Vec<u64> = (1..=8).collect();
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                richness_sweep_with(
                    AbundanceModel::Lognormal { sigma: 1.0 },
                    Individuals::PerContributor(20),
                    &richness,
                    &seeds,
                    exec,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, metric_suite, sharded_ingest, sweep);
criterion_main!(benches);
