//! Demand recovery by a neighbour that reads enough of a user's key shares.
//!
//! With key shares of user `k` in `Z_k` and `Z_{<k+L-1>}`, user `<k+L-1>`
//! reads both caches once `L > ⌈K/2⌉`. It then rebuilds the one-time pad for
//! each subfile `j` that `k` misses, `⊕_α p_k^(α)·W_{·,j}`, and since
//! `q_k·W_{·,j} ⊕ pad = W_{d_k,j}`, matches the result against the library.

use serde::Serialize;

use crate::bits::BitBlock;
use crate::deployment::{CachingScheme, Transmission};
use crate::error::{Error, Result};
use crate::lifting::LiftedScheme;
use crate::model::{mod_index, CacheContent, DemandVector, NetworkConfig, SubfileLibrary};
use crate::schemes::NonPrivateScheme;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttackOutcome {
    pub guess: usize,
    /// Files consistent with the reconstructed subfiles.
    pub candidates: Vec<usize>,
    /// Key shares of the target the attacker found, out of `t` per missing subfile.
    pub shares_found: usize,
    pub shares_total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackSummary {
    pub target: usize,
    pub attacker: usize,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
}

impl AttackSummary {
    fn new(target: usize, attacker: usize) -> Self {
        AttackSummary {
            target,
            attacker,
            trials: 0,
            successes: 0,
            success_rate: 0.0,
        }
    }

    fn record(&mut self, hit: bool) {
        self.trials += 1;
        self.successes += hit as u64;
        self.success_rate = self.successes as f64 / self.trials as f64;
    }
}

/// `<target+L-1>`: the last user whose window covers `Z_target`.
pub fn default_attacker(cfg: &NetworkConfig, target: usize) -> usize {
    mod_index((target + cfg.access() - 1) as i64, cfg.users())
}

/// Whether the two-cache key placement is read in full by another user.
pub fn two_cache_placement_leaks(cfg: &NetworkConfig) -> bool {
    cfg.access() > cfg.users().div_ceil(2)
}

/// Guesses the target's demand from the attacker's caches, `Q` and the library.
/// Ties and empty candidate sets fall back to the smallest index.
pub fn key_share_attack<S: NonPrivateScheme>(
    scheme: &LiftedScheme<S>,
    target: usize,
    attacker_caches: &[(usize, &CacheContent)],
    tx: &Transmission,
    library: &SubfileLibrary,
) -> Result<AttackOutcome> {
    let cfg = scheme.config();
    cfg.check_user(target)?;
    let q = tx
        .q
        .get(target - 1)
        .ok_or_else(|| Error::InvalidConfig("transmission carries no demand masks".into()))?;
    let bits = library.subfile_bits();
    let missing = scheme.missing_subfiles(target);
    let mut found = 0;
    let mut recovered = Vec::with_capacity(missing.len());
    for &j in missing {
        let mut value = q.combine((1..=library.num_files()).map(|n| library.subfile(n, j)), bits);
        for alpha in 1..=scheme.shares() {
            if let Some(share) = attacker_caches
                .iter()
                .find_map(|(_, c)| c.key_share(target, j, alpha))
            {
                value ^= share;
                found += 1;
            }
        }
        recovered.push((j, value));
    }
    let candidates: Vec<usize> = (1..=library.num_files())
        .filter(|&n| recovered.iter().all(|(j, v)| library.subfile(n, *j) == v))
        .collect();
    Ok(AttackOutcome {
        guess: candidates.first().copied().unwrap_or(1),
        candidates,
        shares_found: found,
        shares_total: missing.len() * scheme.shares(),
    })
}

fn attack_all_demands<S: NonPrivateScheme>(
    scheme: &LiftedScheme<S>,
    library: &SubfileLibrary,
    keys: &BitBlock,
    summary: &mut AttackSummary,
) -> Result<()> {
    let cfg = *scheme.config();
    let placement = scheme.place(library, keys)?;
    let caches = placement.accessible(&cfg, summary.attacker)?;
    for d in DemandVector::all(cfg.users(), cfg.files()) {
        let tx = scheme.transmit(library, keys, &d)?;
        let outcome = key_share_attack(scheme, summary.target, &caches, &tx, library)?;
        summary.record(outcome.guess == d.get(summary.target));
    }
    Ok(())
}

/// Runs the attack for every demand vector under each seed's keys.
pub fn attack_sweep<S: NonPrivateScheme>(
    scheme: &LiftedScheme<S>,
    library: &SubfileLibrary,
    target: usize,
    attacker: usize,
    seeds: &[u64],
) -> Result<AttackSummary> {
    scheme.config().check_user(attacker)?;
    let mut summary = AttackSummary::new(target, attacker);
    for &seed in seeds {
        attack_all_demands(scheme, library, &scheme.draw_keys(seed), &mut summary)?;
    }
    Ok(summary)
}

/// Runs the attack for every demand vector and every value of the target's
/// key vectors; the other users' keys come from `seed`. Against a private set
/// the attacker's observation is independent of the target's demand, so the
/// success rate is exactly `1/N`.
pub fn attack_sweep_enumerated<S: NonPrivateScheme>(
    scheme: &LiftedScheme<S>,
    library: &SubfileLibrary,
    target: usize,
    attacker: usize,
    seed: u64,
) -> Result<AttackSummary> {
    let cfg = scheme.config();
    cfg.check_user(attacker)?;
    cfg.check_user(target)?;
    let per_user = scheme.shares() * cfg.files();
    if per_user > 20 {
        return Err(Error::BudgetExceeded {
            required: 1u128 << per_user,
            budget: 1 << 20,
        });
    }
    let mut keys = scheme.draw_keys(seed);
    let offset = (target - 1) * per_user;
    let mut summary = AttackSummary::new(target, attacker);
    for value in 0..(1u64 << per_user) {
        for i in 0..per_user {
            keys.set(offset + i, (value >> i) & 1 == 1);
        }
        attack_all_demands(scheme, library, &keys, &mut summary)?;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::PrivateSetMode;
    use crate::schemes::CyclicUncodedScheme;
    use rand::SeedableRng;

    fn lifted(k: usize, l: usize, mode: PrivateSetMode) -> LiftedScheme<CyclicUncodedScheme> {
        let cfg = NetworkConfig::new(k, l, 2, 4 * k, k).unwrap();
        LiftedScheme::with_mode(CyclicUncodedScheme::new(cfg, 1).unwrap(), mode).unwrap()
    }

    fn distinct_library(k: usize) -> SubfileLibrary {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        loop {
            let lib = SubfileLibrary::random(2, k, 4, &mut rng);
            if lib.subfiles(1) != lib.subfiles(2) {
                return lib;
            }
        }
    }

    #[test]
    fn default_attacker_and_flaw_region() {
        let cfg = NetworkConfig::new(4, 3, 2, 4, 4).unwrap();
        assert_eq!(default_attacker(&cfg, 1), 3);
        assert!(two_cache_placement_leaks(&cfg));
        assert!(!two_cache_placement_leaks(&NetworkConfig::new(4, 2, 2, 4, 4).unwrap()));
    }

    #[test]
    fn naive_placement_reveals_demand() {
        let s = lifted(4, 3, PrivateSetMode::NaiveLwcc);
        let lib = distinct_library(4);
        let summary = attack_sweep(&s, &lib, 1, 3, &[1, 2, 3]).unwrap();
        assert_eq!(summary.trials, 3 * 16);
        assert_eq!(summary.successes, summary.trials);
    }

    #[test]
    fn private_sets_reduce_attack_to_chance() {
        let s = lifted(4, 3, PrivateSetMode::Algorithm1);
        let lib = distinct_library(4);
        let summary = attack_sweep_enumerated(&s, &lib, 1, 3, 7).unwrap();
        assert_eq!(summary.successes * 2, summary.trials);
    }

    #[test]
    fn naive_placement_is_private_for_small_l() {
        let s = lifted(4, 2, PrivateSetMode::NaiveLwcc);
        assert!(s.family().is_private());
        let lib = distinct_library(4);
        let summary = attack_sweep_enumerated(&s, &lib, 1, 2, 7).unwrap();
        assert_eq!(summary.successes * 2, summary.trials);
    }
}
