//! Exhaustive checks of decodability and demand privacy, and the key-placement attack.

pub mod attack;
pub mod decodability;
pub mod faults;
pub mod mi;
pub mod privacy;

pub use attack::{attack_sweep, attack_sweep_enumerated, default_attacker, key_share_attack, AttackOutcome, AttackSummary};
pub use decodability::{verify_decodability, DecodabilityReport, DecodeFailure};
pub use faults::CorruptCodedBlock;
pub use mi::{mutual_information_exact, MutualInformation};
pub use privacy::{
    check_other_columns_uniform, estimate_evaluations, verify_privacy_exact, LeakWitness, LibrarySet, MaskUniformity,
    PrivacyEngine, PrivacyOptions, PrivacyReport, UserPrivacy, UserView, Verdict,
};
