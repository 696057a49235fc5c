//! Benchmarks for the hot paths: the flow-based distribution check, full
//! simulation decisions, composition, and both refinement engines on the
//! walkthrough models plus pinned random batches.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use lpts::gen::{random_dist_leq_instance, random_lpts, LptsGenConfig};
use lpts::{
    agar2, agar_n, cegar, compose, dist_leq, holds, parse_model, Dist, Lpts, PairSet,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FIG1: &str = r#"
lpts L1 {
  alphabet send, ack;
  init u0;
  u0 - send -> { 1: u1 };
  u1 - ack -> { 1: u0 };
}

lpts L2 {
  alphabet send, output, ack, crash;
  init s0;
  s0 - send -> { 1: s1 };
  s1 - output -> { 1/10: s1, 9/10: s2 };
  s1 - crash -> { 1: s3 };
  s2 - ack -> { 1: s0 };
}

lpts P {
  alphabet output, crash;
  init p0;
  p0 - output -> { 1: p0 };
  p0 - crash -> { 1: p1 };
}

system = L1 || L2;
spec = P;
"#;

const CHAIN3: &str = r#"
lpts A {
  alphabet go;
  init a0;
  a0 - go -> { 1: a0 };
}

lpts B {
  alphabet go, b_fail;
  init b0;
  b0 - go -> { 9/10: b0, 1/10: b1 };
  b1 - b_fail -> { 1: b2 };
}

lpts C {
  alphabet go;
  init c0;
  c0 - go -> { 1: c0 };
}

lpts P {
  alphabet b_fail;
  init p0;
  p0 - b_fail -> { 1: p1 };
}

system = A || B || C;
spec = P;
"#;

fn dist_leq_batch() -> Vec<(Dist, Dist, PairSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    (0..64).map(|_| random_dist_leq_instance(8, &mut rng)).collect()
}

fn simulation_batch() -> Vec<(Lpts, Lpts)> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cfg = LptsGenConfig::small();
    (0..32).map(|_| (random_lpts(&cfg, &mut rng), random_lpts(&cfg, &mut rng))).collect()
}

fn bench_parse(c: &mut Criterion) {
    c.bench_function("parse fig1 model", |b| {
        b.iter(|| parse_model(black_box(FIG1)).unwrap())
    });
}

fn bench_dist_leq(c: &mut Criterion) {
    let batch = dist_leq_batch();
    c.bench_function("dist_leq, 64 instances of support 8", |b| {
        b.iter(|| {
            batch
                .iter()
                .filter(|(mu1, mu2, r)| dist_leq(black_box(mu1), mu2, r).holds())
                .count()
        })
    });
}

fn bench_holds(c: &mut Criterion) {
    let batch = simulation_batch();
    c.bench_function("holds, 32 random pairs", |b| {
        b.iter(|| batch.iter().filter(|(l1, l2)| holds(black_box(l1), l2)).count())
    });
}

fn bench_compose(c: &mut Criterion) {
    let m = parse_model(FIG1).unwrap();
    let (l1, l2) = (m.def("L1").unwrap(), m.def("L2").unwrap());
    c.bench_function("compose fig1 client and channel", |b| {
        b.iter(|| compose(black_box(l1), l2))
    });
}

fn bench_cegar(c: &mut Criterion) {
    let m = parse_model(FIG1).unwrap();
    let full = compose(m.def("L1").unwrap(), m.def("L2").unwrap());
    let p = m.def("P").unwrap();
    c.bench_function("cegar fig1", |b| {
        b.iter(|| cegar(black_box(full.lpts()), p).unwrap())
    });
}

fn bench_agar(c: &mut Criterion) {
    let m = parse_model(FIG1).unwrap();
    let (l1, l2, p) = (m.def("L1").unwrap(), m.def("L2").unwrap(), m.def("P").unwrap());
    c.bench_function("agar2 fig1", |b| b.iter(|| agar2(black_box(l1), l2, p).unwrap()));

    let chain = parse_model(CHAIN3).unwrap();
    let comps: Vec<Lpts> = chain.system_components().into_iter().cloned().collect();
    let p3 = chain.spec_lpts();
    c.bench_function("agar_n three-component chain", |b| {
        b.iter(|| agar_n(black_box(&comps), p3).unwrap())
    });
}

criterion_group!(
    benches,
    bench_parse,
    bench_dist_leq,
    bench_holds,
    bench_compose,
    bench_cegar,
    bench_agar
);
criterion_main!(benches);
