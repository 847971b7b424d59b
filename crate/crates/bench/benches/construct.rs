use apd::almost::{build_almost_structural, product_perm};
use apd::blocks::block_rearrangement;
use apd::catalog::derived_components;
use apd::catalog::Part;
use apd::crt::{compose_perms, CrtBasis};
use apd::intseq::int_ap_destroyer;
use apd::prime::prime_destroyer;
use apd::search::{search_perm, SearchConfig};
use apd::PatternSet;
use apd_bench::{affine_perm, prime_perm};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn primes(c: &mut Criterion) {
    c.bench_function("prime_destroyer_2003", |b| b.iter(|| prime_destroyer(black_box(2003)).unwrap()));
}

fn product(c: &mut Criterion) {
    let chi = prime_perm(43);
    c.bench_function("product_43x43", |b| b.iter(|| product_perm(&chi, &chi).unwrap()));
}

fn crt(c: &mut Criterion) {
    let parts = derived_components(Part::One).unwrap();
    let perms: Vec<_> = parts.iter().map(|c| c.perm.clone()).collect();
    let moduli: Vec<u64> = perms.iter().map(|p| p.modulus() as u64).collect();
    let basis = CrtBasis::new(&moduli).unwrap();
    let mut group = c.benchmark_group("compose");
    group.sample_size(10);
    group.bench_function("part_one_master", |b| b.iter(|| compose_perms(&perms, &basis).unwrap()));
    group.finish();
}

fn blocks(c: &mut Criterion) {
    let master = affine_perm(101);
    // warm the destroyer cache outside the timing loop
    block_rearrangement(101 * 101, &master).unwrap();
    c.bench_function("block_rearrangement_101sq", |b| b.iter(|| block_rearrangement(101 * 101, &master).unwrap()));
    let master = affine_perm(49);
    c.bench_function("build_almost_structural_t5_49sq", |b| {
        b.iter(|| build_almost_structural(49 * 49, 5, &master).unwrap())
    });
}

fn intseq(c: &mut Criterion) {
    c.bench_function("int_ap_destroyer_cached_512", |b| b.iter(|| int_ap_destroyer(black_box(512)).unwrap()));
}

fn search(c: &mut Criterion) {
    let config = SearchConfig::new(PatternSet::almost(0, 0));
    c.bench_function("search_first_found_16", |b| b.iter(|| search_perm(16, &config).unwrap()));
}

criterion_group!(benches, primes, product, crt, blocks, intseq, search);
criterion_main!(benches);
