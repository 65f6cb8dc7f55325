use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stein_core::mpl::{parse_identity, truncated_symbol_closed, truncated_symbol_recursive, verify_li_identity, LiGen};
use stein_core::qlinalg::{qvec, random_basis, rref};
use stein_core::st2::{double_shuffle_defect, make_l, symbol_l, Family};
use stein_core::steinberg::{ash_rudolph_apartment, make_apartment, normal_form};

fn linalg(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rows = random_basis(&mut rng, 6, 20);
    c.bench_function("rref 6x6", |b| b.iter(|| rref(black_box(&rows), 6)));
}

fn steinberg(c: &mut Criterion) {
    let mut g = c.benchmark_group("ash_rudolph d=2");
    for (p, q) in [(7, 5), (89, 55), (1597, 987)] {
        let v = vec![qvec(&[1, 0]), qvec(&[p, q])];
        g.bench_with_input(BenchmarkId::from_parameter(p), &v, |b, v| b.iter(|| ash_rudolph_apartment(black_box(v)).unwrap()));
    }
    g.finish();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = make_apartment(&random_basis(&mut rng, 3, 3));
    c.bench_function("normal form d=3", |b| b.iter(|| normal_form(black_box(&x))));
}

fn st2(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut g = c.benchmark_group("st2");
    for d in [2, 3, 4] {
        let v = random_basis(&mut rng, d, 4);
        g.bench_with_input(BenchmarkId::new("symbol_l", d), &v, |b, v| b.iter(|| symbol_l(black_box(v))));
        g.bench_with_input(BenchmarkId::new("make_l", d), &v, |b, v| b.iter(|| make_l(black_box(v)).unwrap()));
    }
    let v = random_basis(&mut rng, 3, 4);
    g.bench_function("shuffle defect 1+2", |b| b.iter(|| double_shuffle_defect(Family::L, black_box(&v), 1).unwrap().is_zero()));
    g.finish();
}

fn polylog(c: &mut Criterion) {
    let mut g = c.benchmark_group("truncated symbol");
    for ns in [vec![2, 1], vec![3, 2], vec![2, 2, 1]] {
        let gen = LiGen::standard(&ns).unwrap();
        let label = format!("{ns:?}");
        g.bench_with_input(BenchmarkId::new("closed", &label), &ns, |b, ns| b.iter(|| truncated_symbol_closed(black_box(ns))));
        g.bench_with_input(BenchmarkId::new("recursive", &label), &gen, |b, gen| b.iter(|| truncated_symbol_recursive(black_box(gen)).unwrap()));
    }
    g.finish();
    let (d, terms) = parse_identity(stein_core::mpl::WEIGHT_FOUR_IDENTITY).unwrap();
    c.bench_function("weight four identity (exact)", |b| b.iter(|| verify_li_identity(d, black_box(&terms), None).unwrap()));
}

criterion_group!(benches, linalg, steinberg, st2, polylog);
criterion_main!(benches);
