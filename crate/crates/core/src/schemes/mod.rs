//! Non-private multi-access schemes with uncoded, file-symmetric placement.
//!
//! A scheme stores, in cache `k`, the subfiles `W_{n,j}` for every file `n`
//! and every `j` in a fixed index set `J_k`. Delivery and decoding see the
//! full demand vector: in the non-private setting demands are public.

mod cyclic;
mod example1;

use std::collections::{BTreeMap, BTreeSet};

pub use cyclic::CyclicUncodedScheme;
pub use example1::Example1Scheme;

use crate::bits::BitBlock;
use crate::error::{Error, Result};
use crate::model::{CacheContent, DemandVector, NetworkConfig, PlacementState, Rational, SubfileLibrary};

/// Broadcast payload and its declared rate in file units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delivery {
    pub payload: BitBlock,
    pub rate: Rational,
}

/// Uncoded subfiles readable by one user: `(file n, subfile j) -> W_{n,j}`.
pub type CachedSubfiles = BTreeMap<(usize, usize), BitBlock>;

pub trait NonPrivateScheme {
    fn name(&self) -> String;

    /// Network and library sizes; `subfiles_per_file` is the scheme's subpacketization.
    fn config(&self) -> &NetworkConfig;

    /// Per-cache memory `M` in file units.
    fn memory(&self) -> Rational;

    /// Declared rate `R` in file units.
    fn rate(&self) -> Rational;

    /// `J_k` for caches `k = 1..=K` (entry `k-1`).
    fn placement_map(&self) -> Vec<BTreeSet<usize>>;

    /// Broadcast for `demands` over `library`. The library may hold any
    /// number of files with the scheme's subpacketization.
    fn deliver(&self, library: &SubfileLibrary, demands: &DemandVector) -> Result<Delivery>;

    /// All subfiles of file `demands[user]`, from the payload and the uncoded
    /// subfiles the user reads.
    fn decode(
        &self,
        user: usize,
        payload: &BitBlock,
        cached: &CachedSubfiles,
        demands: &DemandVector,
    ) -> Result<Vec<BitBlock>>;

    /// Subfile indices user `k` does not read in any of its caches.
    fn missing_subfiles(&self, k: usize) -> Result<Vec<usize>> {
        let cfg = self.config();
        let map = self.placement_map();
        let have: BTreeSet<usize> = cfg
            .accessible_caches(k)?
            .into_iter()
            .flat_map(|c| map[c - 1].iter().copied())
            .collect();
        Ok((1..=cfg.subfiles_per_file())
            .filter(|j| !have.contains(j))
            .collect())
    }
}

impl<T: NonPrivateScheme + ?Sized> NonPrivateScheme for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn config(&self) -> &NetworkConfig {
        (**self).config()
    }
    fn memory(&self) -> Rational {
        (**self).memory()
    }
    fn rate(&self) -> Rational {
        (**self).rate()
    }
    fn placement_map(&self) -> Vec<BTreeSet<usize>> {
        (**self).placement_map()
    }
    fn deliver(&self, library: &SubfileLibrary, demands: &DemandVector) -> Result<Delivery> {
        (**self).deliver(library, demands)
    }
    fn decode(
        &self,
        user: usize,
        payload: &BitBlock,
        cached: &CachedSubfiles,
        demands: &DemandVector,
    ) -> Result<Vec<BitBlock>> {
        (**self).decode(user, payload, cached, demands)
    }
}

/// First pair of caches read by a common user whose index sets intersect.
fn c1_violation<S: NonPrivateScheme + ?Sized>(scheme: &S) -> Option<(usize, usize, usize)> {
    let cfg = scheme.config();
    let map = scheme.placement_map();
    for user in 1..=cfg.users() {
        let caches = cfg.accessible_caches(user).expect("valid user");
        for (i, &a) in caches.iter().enumerate() {
            for &b in &caches[i + 1..] {
                if !map[a - 1].is_disjoint(&map[b - 1]) {
                    return Some((user, a, b));
                }
            }
        }
    }
    None
}

/// Whether the caches read by every user hold pairwise disjoint subfile sets.
pub fn check_condition_c1<S: NonPrivateScheme + ?Sized>(scheme: &S) -> bool {
    c1_violation(scheme).is_none()
}

pub fn require_condition_c1<S: NonPrivateScheme + ?Sized>(scheme: &S) -> Result<()> {
    match c1_violation(scheme) {
        None => Ok(()),
        Some((user, a, b)) => Err(Error::ConditionC1 { user, a, b }),
    }
}

pub(crate) fn check_library<S: NonPrivateScheme + ?Sized>(scheme: &S, library: &SubfileLibrary) -> Result<()> {
    let cfg = scheme.config();
    if library.subfiles_per_file() != cfg.subfiles_per_file() || library.subfile_bits() != cfg.subfile_bits() {
        return Err(Error::Sizing(format!(
            "{} expects {} subfiles of {} bits, library has {} of {}",
            scheme.name(),
            cfg.subfiles_per_file(),
            cfg.subfile_bits(),
            library.subfiles_per_file(),
            library.subfile_bits()
        )));
    }
    Ok(())
}

/// Round of uncoded placement: cache `k` gets `W_{n,j}` for all `n` and `j ∈ J_k`.
pub fn uncoded_placement<S: NonPrivateScheme + ?Sized>(scheme: &S, library: &SubfileLibrary) -> Result<PlacementState> {
    check_library(scheme, library)?;
    let caches = scheme
        .placement_map()
        .iter()
        .map(|js| {
            let mut content = CacheContent::default();
            for n in 1..=library.num_files() {
                for &j in js {
                    content.uncoded.insert((n, j), library.subfile(n, j).clone());
                }
            }
            content
        })
        .collect();
    Ok(PlacementState::from_caches(caches))
}

/// Union of the uncoded subfiles in the given caches.
pub fn collect_uncoded<'a, I>(caches: I) -> CachedSubfiles
where
    I: IntoIterator<Item = &'a CacheContent>,
{
    let mut out = CachedSubfiles::new();
    for c in caches {
        for (key, b) in &c.uncoded {
            out.insert(*key, b.clone());
        }
    }
    out
}

pub(crate) fn cached_subfile(cached: &CachedSubfiles, n: usize, j: usize) -> Result<&BitBlock> {
    cached
        .get(&(n, j))
        .ok_or_else(|| Error::Decode(format!("subfile W_{{{n},{j}}} is not in the accessible caches")))
}
