use betaflow::kneading::{kneading_invariants, system_from_kneading_pair};
use betaflow::language::{Automaton, Semantics};
use betaflow::oracles::{brute_force_language, escape_fraction};
use betaflow::sft::compile;
use betaflow::survivor::eta_kneading;
use betaflow::survivor::SurvivorConfig;
use betaflow::winning::{cell_itinerary, check_cylinder_lengths, check_ratio_condition};
use betaflow::{EPWord, Scalar};
use betaflow_bench::{system, GOLDEN, QUARTIC, QUINTIC};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn kneading(c: &mut Criterion) {
    let quintic = system(QUINTIC);
    c.bench_function("kneading_invariants/quintic", |b| b.iter(|| kneading_invariants(black_box(&quintic)).unwrap()));
    let (lo, up): (EPWord, EPWord) = ("0(10)".parse().unwrap(), "1(0001)".parse().unwrap());
    c.bench_function("system_from_kneading_pair/quartic", |b| {
        b.iter(|| system_from_kneading_pair(black_box(&lo), black_box(&up)).unwrap())
    });
}

fn language(c: &mut Criterion) {
    let quartic = system(QUARTIC);
    let k = kneading_invariants(&quartic).unwrap();
    let a = Automaton::omega_plus(&k.lower, &k.upper).unwrap();
    c.bench_function("automaton_count/quartic/n=18", |b| b.iter(|| a.count(black_box(18), Semantics::Exact)));
    c.bench_function("brute_force_language/quartic/n=14", |b| {
        b.iter(|| brute_force_language(black_box(&quartic), 14).unwrap().count())
    });
}

fn finite_type(c: &mut Criterion) {
    let quartic = system(QUARTIC);
    c.bench_function("compile/quartic", |b| b.iter(|| compile(black_box(&quartic)).unwrap()));
    let s = compile(&quartic).unwrap();
    c.bench_function("cylinder_lengths/quartic/depth=10", |b| b.iter(|| check_cylinder_lengths(&s, 10).unwrap()));
    let omega = cell_itinerary(&s, &Scalar::zero(), 4096).unwrap();
    c.bench_function("ratio_condition/quartic/depth=8", |b| b.iter(|| check_ratio_condition(&s, &omega, 8).unwrap()));
}

fn survivor(c: &mut Criterion) {
    let quartic = system(QUARTIC);
    let cfg = SurvivorConfig::default();
    let t = Scalar::ratio(1, 10);
    c.bench_function("eta_kneading/quartic/t=0.1", |b| b.iter(|| eta_kneading(&quartic, black_box(&t), &cfg).unwrap()));
    let golden = system(GOLDEN);
    let t = Scalar::ratio(1, 100);
    c.bench_function("escape_fraction/golden/1e4x1e3", |b| b.iter(|| escape_fraction(&golden, &t, 10_000, 1000, 7)));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = kneading, language, finite_type, survivor
}
criterion_main!(benches);
