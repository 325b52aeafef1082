use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use macc_core::experiment::{tradeoff_point, SchemeKind};
use macc_core::model::LibraryDocument;
use macc_core::{
    verify_decodability, CyclicUncodedScheme, LiftedScheme, NetworkConfig, PrivateSetMode, Rational, SchemeRequest,
    SubfileLibrary,
};

#[test]
fn lifted_cyclic_decodes_under_every_private_set_mode() {
    let cfg = NetworkConfig::new(5, 2, 2, 20, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let library = SubfileLibrary::random(2, 5, 4, &mut rng);
    for mode in PrivateSetMode::ALL {
        let scheme = LiftedScheme::with_mode(CyclicUncodedScheme::new(cfg, 1).unwrap(), mode).unwrap();
        let report = verify_decodability(&scheme, &library, &[3, 4]).unwrap();
        assert!(report.passed, "{mode}: {:?}", report.failure);
        assert_eq!(report.demand_vectors, 32);
    }
}

#[test]
fn library_document_round_trip_feeds_a_scheme() {
    let cfg = NetworkConfig::new(4, 2, 3, 8, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let library = SubfileLibrary::random(3, 4, 2, &mut rng);
    let text = library.to_document(&cfg).unwrap().to_json();
    let (back_cfg, back) = LibraryDocument::from_json(&text).unwrap().into_library().unwrap();
    assert_eq!(back_cfg, cfg);
    assert_eq!(back, library);
    let scheme = CyclicUncodedScheme::new(cfg, 2).unwrap();
    let lifted = LiftedScheme::with_mode(scheme, PrivateSetMode::Algorithm1).unwrap();
    assert!(verify_decodability(&lifted, &back, &[9]).unwrap().passed);
}

#[test]
fn lifted_rows_shift_memory_by_key_storage() {
    for (k, l) in [(4, 2), (5, 3), (6, 5)] {
        for t in 0..=k / l {
            let memory = Rational::new(2 * t as i64, k as i64);
            let row = |kind: &str| {
                tradeoff_point(
                    &SchemeRequest {
                        kind: kind.parse::<SchemeKind>().unwrap(),
                        users: k,
                        access: l,
                        files: 2,
                        memory,
                        file_bits: None,
                        mode: PrivateSetMode::Algorithm1,
                    },
                    7,
                )
                .unwrap()
            };
            let base = row("cyclic-uncoded");
            let lifted = row("lifted:cyclic-uncoded");
            let shares = lifted.t.unwrap() as i64;
            let unseen = Rational::from_integer(1) - Rational::new(l as i64, 2) * memory;
            assert_eq!(lifted.memory, base.memory + unseen * shares);
            assert_eq!(lifted.rate, base.rate);
            assert_eq!(lifted.q_overhead_bits, k * 2);
        }
    }
}
