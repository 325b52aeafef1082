use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use macc_core::{build_air, check_air, gf2_rank, BitBlock, Gf2Matrix};

fn random_matrix(rows: usize, cols: usize, seed: u64) -> Gf2Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Gf2Matrix::from_bit_rows(cols, (0..rows).map(|_| BitBlock::random(cols, &mut rng)).collect())
}

fn rank(c: &mut Criterion) {
    let mut group = c.benchmark_group("gf2_rank");
    for n in [16, 64, 256] {
        let m = random_matrix(n, n, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| gf2_rank(black_box(m))));
    }
    group.finish();
}

fn air(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_air");
    for (k, l) in [(6, 3), (10, 4), (12, 7)] {
        group.bench_function(format!("K{k}_L{l}"), |b| {
            b.iter(|| {
                let m = build_air(black_box(k), black_box(l)).unwrap();
                assert!(check_air(&m));
            })
        });
    }
    group.finish();
}

criterion_group!(benches, rank, air);
criterion_main!(benches);
