use adlv::reduction_oracle::{Oracle, SplitPolicy, DEFAULT_BUDGET};
use adlv::sweep::{run_sweep, SweepConfig};
use adlv_bench::{datum, element};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn bench_length(c: &mut Criterion) {
    let d = datum("B2:adjoint");
    let w = element(&d, "lam=[3,2];u=[s1 s2 s1]");
    c.bench_function("length/B2", |b| {
        b.iter(|| d.length(black_box(&w)).unwrap())
    });
}

fn bench_dim_table(c: &mut Criterion) {
    let d = datum("G2:adjoint");
    let w = element(&d, "lam=[2,1];u=[s1 s2]");
    c.bench_function("dim_table/G2 cold", |b| {
        b.iter(|| {
            let oracle = Oracle::new(&d);
            black_box(oracle.dim_table(&w).unwrap());
        })
    });
    let oracle = Oracle::with_budget(&d, DEFAULT_BUDGET, SplitPolicy::LexFirst);
    oracle.dim_table(&w).unwrap();
    c.bench_function("dim_table/G2 memoized", |b| {
        b.iter(|| black_box(oracle.dim_table(&w).unwrap()))
    });
}

fn bench_sweep(c: &mut Criterion) {
    let d = datum("A2:adjoint");
    let cfg = SweepConfig { max_len: 6, ..Default::default() };
    c.bench_function("sweep/A2 len<=6", |b| {
        b.iter(|| black_box(run_sweep(&d, &cfg).unwrap().summary.pairs))
    });
}

criterion_group!(benches, bench_length, bench_dim_table, bench_sweep);
criterion_main!(benches);
