use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use unipotent_core::class_labels::{CycleType, FormKind};
use unipotent_core::flags::build_flag_pair;
use unipotent_core::harness::{adapted_classes, coset_size, Execution};

fn schedules() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn bench_adapted(c: &mut Criterion) {
    let mut group = c.benchmark_group("adapted_classes");
    group.sample_size(10);
    for (form, cycles) in [(FormKind::Symplectic, "4"), (FormKind::Symplectic, "2,1,1"), (FormKind::Orthogonal, "3,1")]
    {
        let ct = CycleType::parse(cycles).unwrap();
        for (name, exec) in schedules() {
            group.bench_with_input(BenchmarkId::new(name, format!("{form}-{cycles}")), &ct, |b, ct| {
                b.iter(|| adapted_classes(ct, form, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_coset_size(c: &mut Criterion) {
    let mut group = c.benchmark_group("coset_size");
    group.sample_size(10);
    let ct = CycleType::parse("2,2").unwrap();
    let pair = build_flag_pair(&ct, false).unwrap();
    for (name, exec) in schedules() {
        group.bench_function(BenchmarkId::new(name, "sp-2,2"), |b| b.iter(|| coset_size(&pair, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_adapted, bench_coset_size);
criterion_main!(benches);
