//! Demand-private coded caching on cyclic multi-access networks.
//!
//! `K` users and `K` caches; user `k` reads caches `k, k+1, ..., k+L-1`
//! (cyclically). The crate provides non-private schemes with uncoded
//! placement, a private baseline built on AIR-coded placement, a lifting
//! transform that turns a non-private scheme into a demand-private one, and
//! exhaustive verifiers for decodability and privacy.

pub mod baseline;
pub mod bits;
pub mod deployment;
pub mod error;
pub mod experiment;
pub mod gf2;
pub mod lifting;
pub mod model;
pub mod private_set;
pub mod schemes;
pub mod verification;

pub use baseline::BaselineScheme;
pub use bits::BitBlock;
pub use deployment::{CachingScheme, NonPrivateDeployment, Transmission};
pub use error::{Error, Result};
pub use experiment::{SchemeKind, SchemeRequest, TradeoffRow};
pub use gf2::{build_air, check_air, gf2_rank, gf2_solve_window, Gf2Matrix, Gf2Vector};
pub use lifting::{KeyMaterial, LiftedScheme, PrivateSetFamily, PrivateSetMode};
pub use model::{
    accessible_caches, cyclic_range, mod_index, split_library, CacheContent, DemandVector, NetworkConfig,
    PlacementState, Rational, SubfileLibrary,
};
pub use private_set::{
    algorithm1_private_set, is_private_set, private_set_bound, shift_private_set, smallest_private_set_oracle,
    PrivateSet,
};
pub use schemes::{check_condition_c1, CyclicUncodedScheme, Example1Scheme, NonPrivateScheme};
pub use verification::{
    verify_decodability, verify_privacy_exact, PrivacyEngine, PrivacyOptions, PrivacyReport, Verdict,
};
