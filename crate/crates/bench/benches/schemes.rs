use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use macc_core::{
    verify_privacy_exact, CachingScheme, CyclicUncodedScheme, DemandVector, Example1Scheme, LiftedScheme,
    NetworkConfig, PrivacyEngine, PrivacyOptions, PrivateSetMode, SubfileLibrary,
};

fn lifted_cyclic(c: &mut Criterion) {
    let cfg = NetworkConfig::new(8, 3, 4, 8 * 64, 8).unwrap();
    let scheme = LiftedScheme::with_mode(CyclicUncodedScheme::new(cfg, 2).unwrap(), PrivateSetMode::Algorithm1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let library = SubfileLibrary::random(4, 8, 64, &mut rng);
    let keys = scheme.draw_keys(2);
    let demands = DemandVector::new(vec![1, 2, 3, 4, 1, 2, 3, 4], 8, 4).unwrap();

    c.bench_function("lifted_cyclic_place_K8", |b| b.iter(|| scheme.place(black_box(&library), &keys).unwrap()));
    c.bench_function("lifted_cyclic_transmit_K8", |b| {
        b.iter(|| scheme.transmit(black_box(&library), &keys, &demands).unwrap())
    });
    let placement = scheme.place(&library, &keys).unwrap();
    let tx = scheme.transmit(&library, &keys, &demands).unwrap();
    c.bench_function("lifted_cyclic_decode_K8", |b| {
        b.iter(|| {
            for k in 1..=8 {
                let caches = placement.accessible(&cfg, k).unwrap();
                black_box(scheme.decode(k, &tx, &caches, demands.get(k)).unwrap());
            }
        })
    });
}

fn privacy(c: &mut Criterion) {
    let cfg = NetworkConfig::new(3, 2, 2, 3, 3).unwrap();
    let scheme = LiftedScheme::new(
        Example1Scheme::new(cfg).unwrap(),
        macc_core::PrivateSetFamily::new(&cfg, PrivateSetMode::Oracle).unwrap(),
    )
    .unwrap();
    let mut group = c.benchmark_group("privacy_lifted_example1_N2");
    group.sample_size(10);
    for engine in [PrivacyEngine::Affine, PrivacyEngine::Enumerate] {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let options = PrivacyOptions {
            engine,
            libraries: macc_core::verification::LibrarySet::Explicit(vec![SubfileLibrary::random(2, 3, 1, &mut rng)]),
            ..PrivacyOptions::default()
        };
        group.bench_function(engine.to_string(), |b| {
            b.iter(|| assert!(verify_privacy_exact(&scheme, &options).unwrap().is_private()))
        });
    }
    group.finish();
}

criterion_group!(benches, lifted_cyclic, privacy);
criterion_main!(benches);
