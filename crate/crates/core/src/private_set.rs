//! Private sets: subsets of a user's caches that no other user reads in full.
//!
//! Key shares for user `k` are spread over its private set so that only `k`
//! can combine all of them.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{mod_index, NetworkConfig};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PrivateSet {
    pub user: usize,
    /// Cache indices in user-relative order `<ℓ_1+k-1>, ..., <ℓ_t+k-1>`.
    pub caches: Vec<usize>,
}

impl PrivateSet {
    pub fn size(&self) -> usize {
        self.caches.len()
    }

    pub fn sorted(&self) -> Vec<usize> {
        let mut c = self.caches.clone();
        c.sort_unstable();
        c
    }
}

/// Whether `caches` (a subset of `L_k`) is contained in no other user's window.
pub fn is_private_set(caches: &[usize], k: usize, cfg: &NetworkConfig) -> Result<bool> {
    cfg.check_user(k)?;
    if caches.is_empty() {
        return Ok(false);
    }
    if let Some(&c) = caches.iter().find(|&&c| c == 0 || c > cfg.users() || !cfg.accesses(k, c)) {
        return Err(Error::InvalidPrivateSet {
            user: k,
            reason: format!("cache {c} is not accessible to user {k}"),
        });
    }
    Ok((1..=cfg.users())
        .filter(|&other| other != k)
        .all(|other| !caches.iter().all(|&c| cfg.accesses(other, c))))
}

/// `⌈(K-1)/(K-L)⌉`.
pub fn private_set_bound(cfg: &NetworkConfig) -> usize {
    (cfg.users() - 1).div_ceil(cfg.users() - cfg.access())
}

/// User 1's private set built by stepping `K-L` caches at a time below `L`,
/// then adding `Z_L`.
pub fn algorithm1_private_set(cfg: &NetworkConfig) -> PrivateSet {
    let (k, l) = (cfg.users(), cfg.access());
    let mut caches = Vec::new();
    let mut i = 1;
    while i < l {
        caches.push(i);
        i += k - l;
    }
    caches.push(l);
    PrivateSet { user: 1, caches }
}

/// Maps user 1's set to user `k` by cyclic shift `ℓ -> <ℓ+k-1>_K`.
pub fn shift_private_set(base: &PrivateSet, k: usize, cfg: &NetworkConfig) -> Result<PrivateSet> {
    cfg.check_user(k)?;
    if base.user != 1 {
        return Err(Error::InvalidPrivateSet {
            user: base.user,
            reason: "shift expects a private set of user 1".into(),
        });
    }
    Ok(PrivateSet {
        user: k,
        caches: base
            .caches
            .iter()
            .map(|&c| mod_index(c as i64 + k as i64 - 1, cfg.users()))
            .collect(),
    })
}

/// Smallest private set of user 1, by enumerating subsets of `L_1 = {1..L}` in
/// increasing size and lexicographic order. Returns `(t*, witness)`.
pub fn smallest_private_set_oracle(cfg: &NetworkConfig) -> Result<(usize, PrivateSet)> {
    if cfg.users() > 16 {
        return Err(Error::InvalidConfig(format!(
            "exhaustive private-set search supports K <= 16, got {}",
            cfg.users()
        )));
    }
    for size in 1..=cfg.access() {
        for subset in (1..=cfg.access()).combinations(size) {
            if is_private_set(&subset, 1, cfg)? {
                return Ok((
                    size,
                    PrivateSet {
                        user: 1,
                        caches: subset,
                    },
                ));
            }
        }
    }
    unreachable!("L_1 itself is always a private set")
}
