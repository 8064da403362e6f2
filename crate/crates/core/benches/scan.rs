use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hbar_lpt::renorm::scan;
use hbar_lpt::{Execution, Param, PotentialSpec, QuantumState};

fn scans(c: &mut Criterion) {
    let p = PotentialSpec::sextic(Param::int(1), Param::int(10), Param::int(10)).unwrap();
    let state = QuantumState::new(1, 1);
    let mut group = c.benchmark_group("omega0_scan");
    group.sample_size(10);
    for order in [10, 20] {
        for (name, execution) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(name, order), &order, |b, &order| {
                b.iter(|| scan(&p, state, order, (1.0, 40.0), 400, execution).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, scans);
criterion_main!(benches);
