use apd::verify::{check_almost, check_pattern, survivor_stats};
use apd::Pattern;
use apd_bench::{affine_perm, prime_perm, table_perms};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn single_pattern(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_pattern");
    for p in [251u64, 1019, 2003] {
        let perm = prime_perm(p);
        group.bench_with_input(BenchmarkId::from_parameter(p), &perm, |b, perm| {
            b.iter(|| check_pattern(black_box(perm), Pattern::new(0, 0)))
        });
    }
    group.finish();
}

fn almost(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_almost");
    for n in [255usize, 1023] {
        let perm = affine_perm(n);
        group.bench_with_input(BenchmarkId::new("s2t2", n), &perm, |b, perm| {
            b.iter(|| check_almost(black_box(perm), 2, 2).unwrap())
        });
    }
    group.finish();
}

fn table(c: &mut Criterion) {
    let perms = table_perms();
    c.bench_function("table_zero_pattern", |b| {
        b.iter(|| perms.iter().filter(|p| check_pattern(p, Pattern::new(0, 0)).verdict.passed()).count())
    });
}

fn stats(c: &mut Criterion) {
    c.bench_function("survivor_stats_n64_x100", |b| b.iter(|| survivor_stats(64, 100, 7).unwrap()));
}

criterion_group!(benches, single_pattern, almost, table, stats);
criterion_main!(benches);
