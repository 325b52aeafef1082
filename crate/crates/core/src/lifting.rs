//! Lifts a non-private scheme with uncoded placement into a demand-private one.
//!
//! Each user `k` draws `t` random vectors `p_k^(α)` over the files. For every
//! subfile index `j` that `k` cannot read, cache `<ℓ_α+k-1>` (the `α`-th member
//! of `k`'s private set) stores the share `⊕_n p_{k,n}^(α) W_{n,j}`. The server
//! announces `q_k = e_{d_k} ⊕ ⊕_α p_k^(α)` and runs the base delivery over the
//! virtual files `Ŵ_k = ⊕_n q_{k,n} W_n` with demands `(1, ..., K)`. Only `k`
//! reads all of its shares, so only `k` learns which file `q_k` unmasks.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::BitBlock;
use crate::deployment::{CachingScheme, Transmission};
use crate::error::{Error, Result};
use crate::gf2::Gf2Vector;
use crate::model::{
    CacheContent, CodedBlock, CodedLabel, DemandVector, NetworkConfig, PlacementState, Rational, SubfileLibrary,
};
use crate::private_set::{
    algorithm1_private_set, is_private_set, shift_private_set, smallest_private_set_oracle, PrivateSet,
};
use crate::schemes::{collect_uncoded, require_condition_c1, uncoded_placement, CachedSubfiles, NonPrivateScheme};

/// How user 1's key-share caches are chosen; other users use cyclic shifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrivateSetMode {
    Algorithm1,
    /// Smallest private set by exhaustive search.
    #[default]
    Oracle,
    /// All `L` accessible caches.
    Full,
    /// `{Z_1, Z_L}`: not private when `L > 2` (kept to demonstrate a leak).
    NaiveLwcc,
}

impl PrivateSetMode {
    pub const ALL: [PrivateSetMode; 4] = [
        PrivateSetMode::Algorithm1,
        PrivateSetMode::Oracle,
        PrivateSetMode::Full,
        PrivateSetMode::NaiveLwcc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PrivateSetMode::Algorithm1 => "algorithm1",
            PrivateSetMode::Oracle => "oracle",
            PrivateSetMode::Full => "full",
            PrivateSetMode::NaiveLwcc => "naive-lwcc",
        }
    }
}

impl fmt::Display for PrivateSetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PrivateSetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PrivateSetMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown private-set mode {s:?}")))
    }
}

/// Key-share caches for every user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrivateSetFamily {
    mode: PrivateSetMode,
    sets: Vec<PrivateSet>,
    private: bool,
}

impl PrivateSetFamily {
    pub fn new(cfg: &NetworkConfig, mode: PrivateSetMode) -> Result<Self> {
        let base = match mode {
            PrivateSetMode::Algorithm1 => algorithm1_private_set(cfg),
            PrivateSetMode::Oracle => smallest_private_set_oracle(cfg)?.1,
            PrivateSetMode::Full => PrivateSet {
                user: 1,
                caches: (1..=cfg.access()).collect(),
            },
            PrivateSetMode::NaiveLwcc => {
                let mut caches = vec![1, cfg.access()];
                caches.dedup();
                PrivateSet { user: 1, caches }
            }
        };
        let sets = (1..=cfg.users())
            .map(|k| shift_private_set(&base, k, cfg))
            .collect::<Result<Vec<_>>>()?;
        let private = sets
            .iter()
            .map(|s| is_private_set(&s.caches, s.user, cfg))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .all(|p| p);
        Ok(PrivateSetFamily { mode, sets, private })
    }

    pub fn mode(&self) -> PrivateSetMode {
        self.mode
    }

    /// Number of shares per missing subfile, `t`.
    pub fn size(&self) -> usize {
        self.sets[0].size()
    }

    pub fn set(&self, k: usize) -> &PrivateSet {
        &self.sets[k - 1]
    }

    /// Cache holding share `α` of user `k`.
    pub fn share_cache(&self, k: usize, alpha: usize) -> usize {
        self.sets[k - 1].caches[alpha - 1]
    }

    /// Whether every user's set is private.
    pub fn is_private(&self) -> bool {
        self.private
    }
}

/// Key vectors `p_k^(α) ∈ GF(2)^N`, stored as `[k-1][α-1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyMaterial {
    files: usize,
    vectors: Vec<Vec<Gf2Vector>>,
}

impl KeyMaterial {
    /// Bit layout: user-major, then share index, then file index.
    pub fn from_bits(users: usize, shares: usize, files: usize, bits: &BitBlock) -> Result<Self> {
        let expected = users * shares * files;
        if bits.len() != expected {
            return Err(Error::LengthMismatch {
                left: bits.len(),
                right: expected,
            });
        }
        let mut pos = 0;
        let vectors = (0..users)
            .map(|_| {
                (0..shares)
                    .map(|_| {
                        let v = Gf2Vector::from_bits(bits.slice(pos, files).expect("in range"));
                        pos += files;
                        v
                    })
                    .collect()
            })
            .collect();
        Ok(KeyMaterial { files, vectors })
    }

    pub fn generate(users: usize, shares: usize, files: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits = BitBlock::random(users * shares * files, &mut rng);
        Self::from_bits(users, shares, files, &bits).expect("sized")
    }

    pub fn to_bits(&self) -> BitBlock {
        BitBlock::concat(self.vectors.iter().flatten().map(Gf2Vector::bits))
    }

    pub fn vector(&self, k: usize, alpha: usize) -> &Gf2Vector {
        &self.vectors[k - 1][alpha - 1]
    }

    /// `⊕_α p_k^(α)`.
    pub fn mask(&self, k: usize) -> Gf2Vector {
        let mut acc = Gf2Vector::zeros(self.files);
        for v in &self.vectors[k - 1] {
            acc.xor_assign(v);
        }
        acc
    }
}

#[derive(Debug, Clone)]
pub struct LiftedScheme<S> {
    base: S,
    family: PrivateSetFamily,
    missing: Vec<Vec<usize>>,
}

impl<S: NonPrivateScheme> LiftedScheme<S> {
    /// Requires the base to satisfy condition C1 and the family to be private.
    pub fn new(base: S, family: PrivateSetFamily) -> Result<Self> {
        if !family.is_private() {
            let bad = (1..=base.config().users())
                .find(|&k| !is_private_set(&family.set(k).caches, k, base.config()).unwrap_or(false))
                .unwrap_or(1);
            return Err(Error::InvalidPrivateSet {
                user: bad,
                reason: format!("{:?} is read in full by another user", family.set(bad).caches),
            });
        }
        Self::new_unchecked(base, family)
    }

    /// Like [`LiftedScheme::new`] but accepts a non-private family. Decoding
    /// still works; privacy does not hold.
    pub fn new_unchecked(base: S, family: PrivateSetFamily) -> Result<Self> {
        require_condition_c1(&base)?;
        let missing = (1..=base.config().users())
            .map(|k| base.missing_subfiles(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(LiftedScheme { base, family, missing })
    }

    pub fn with_mode(base: S, mode: PrivateSetMode) -> Result<Self> {
        let family = PrivateSetFamily::new(base.config(), mode)?;
        if mode == PrivateSetMode::NaiveLwcc {
            Self::new_unchecked(base, family)
        } else {
            Self::new(base, family)
        }
    }

    pub fn base(&self) -> &S {
        &self.base
    }

    pub fn family(&self) -> &PrivateSetFamily {
        &self.family
    }

    pub fn shares(&self) -> usize {
        self.family.size()
    }

    pub fn missing_subfiles(&self, k: usize) -> &[usize] {
        &self.missing[k - 1]
    }

    pub fn key_material(&self, keys: &BitBlock) -> Result<KeyMaterial> {
        let cfg = self.base.config();
        KeyMaterial::from_bits(cfg.users(), self.shares(), cfg.files(), keys)
    }

    /// `(i, α)` pairs whose share cache is read by `user`: the key vectors
    /// appearing in `user`'s caches.
    pub fn visible_key_vectors(&self, user: usize) -> Vec<(usize, usize)> {
        let cfg = self.base.config();
        (1..=cfg.users())
            .flat_map(|i| (1..=self.shares()).map(move |a| (i, a)))
            .filter(|&(i, a)| cfg.accesses(user, self.family.share_cache(i, a)))
            .collect()
    }

    /// `q_k = e_{d_k} ⊕ ⊕_α p_k^(α)` for every user.
    pub fn q_vectors(&self, keys: &KeyMaterial, demands: &DemandVector) -> Result<Vec<Gf2Vector>> {
        let cfg = self.base.config();
        demands.check_files(cfg.files())?;
        Ok((1..=cfg.users())
            .map(|k| keys.mask(k).xor(&Gf2Vector::unit(cfg.files(), demands.get(k))))
            .collect())
    }

    /// `K` files `Ŵ_k = ⊕_n q_{k,n} W_n`, subfile by subfile.
    pub fn virtual_library(&self, library: &SubfileLibrary, q: &[Gf2Vector]) -> Result<SubfileLibrary> {
        let bits = library.subfile_bits();
        let files = q
            .iter()
            .map(|qk| {
                (1..=library.subfiles_per_file())
                    .map(|j| qk.combine((1..=library.num_files()).map(|n| library.subfile(n, j)), bits))
                    .collect()
            })
            .collect();
        SubfileLibrary::new(files)
    }

    fn virtual_demands(&self) -> DemandVector {
        let k = self.base.config().users();
        DemandVector::new((1..=k).collect(), k, k).expect("identity demands")
    }
}

impl<S: NonPrivateScheme> CachingScheme for LiftedScheme<S> {
    fn name(&self) -> String {
        format!("lifted:{}", self.base.name())
    }

    fn config(&self) -> &NetworkConfig {
        self.base.config()
    }

    /// `M + t(1 - LM/N)`.
    fn memory(&self) -> Rational {
        let cfg = self.base.config();
        let m = self.base.memory();
        let lm_over_n = Rational::from_integer(cfg.access() as i64) * m / Rational::from_integer(cfg.files() as i64);
        m + Rational::from_integer(self.shares() as i64) * (Rational::from_integer(1) - lm_over_n)
    }

    fn rate(&self) -> Rational {
        self.base.rate()
    }

    fn key_bits(&self) -> usize {
        let cfg = self.base.config();
        cfg.users() * self.shares() * cfg.files()
    }

    fn place(&self, library: &SubfileLibrary, keys: &BitBlock) -> Result<PlacementState> {
        let keys = self.key_material(keys)?;
        let mut state = uncoded_placement(&self.base, library)?;
        let bits = library.subfile_bits();
        for k in 1..=self.base.config().users() {
            for &j in self.missing_subfiles(k) {
                for alpha in 1..=self.shares() {
                    let block = keys
                        .vector(k, alpha)
                        .combine((1..=library.num_files()).map(|n| library.subfile(n, j)), bits);
                    state.cache_mut(self.family.share_cache(k, alpha)).coded.push(CodedBlock {
                        label: CodedLabel::KeyShare {
                            user: k,
                            subfile: j,
                            share: alpha,
                        },
                        block,
                    });
                }
            }
        }
        Ok(state)
    }

    fn transmit(&self, library: &SubfileLibrary, keys: &BitBlock, demands: &DemandVector) -> Result<Transmission> {
        let keys = self.key_material(keys)?;
        let q = self.q_vectors(&keys, demands)?;
        let virt = self.virtual_library(library, &q)?;
        let delivery = self.base.deliver(&virt, &self.virtual_demands())?;
        Ok(Transmission {
            public_demands: None,
            q,
            payload: delivery.payload,
        })
    }

    fn decode(
        &self,
        user: usize,
        tx: &Transmission,
        caches: &[(usize, &CacheContent)],
        demand: usize,
    ) -> Result<BitBlock> {
        let cfg = self.base.config();
        cfg.check_user(user)?;
        if tx.q.len() != cfg.users() {
            return Err(Error::Decode(format!("expected {} q vectors, got {}", cfg.users(), tx.q.len())));
        }
        let bits = cfg.subfile_bits();
        let cached = collect_uncoded(caches.iter().map(|(_, c)| *c));
        let cached_indices: std::collections::BTreeSet<usize> = cached.keys().map(|&(_, j)| j).collect();

        let mut virtual_cached = CachedSubfiles::new();
        for &j in &cached_indices {
            let column = (1..=cfg.files())
                .map(|n| {
                    cached
                        .get(&(n, j))
                        .ok_or_else(|| Error::Decode(format!("subfile {j} of file {n} missing from caches")))
                })
                .collect::<Result<Vec<_>>>()?;
            for (k, qk) in tx.q.iter().enumerate() {
                virtual_cached.insert((k + 1, j), qk.combine(column.iter().copied(), bits));
            }
        }
        let own_virtual = self
            .base
            .decode(user, &tx.payload, &virtual_cached, &self.virtual_demands())?;

        let mut subfiles = Vec::with_capacity(cfg.subfiles_per_file());
        for j in 1..=cfg.subfiles_per_file() {
            if let Some(b) = cached.get(&(demand, j)) {
                subfiles.push(b.clone());
                continue;
            }
            let mut block = own_virtual[j - 1].clone();
            for alpha in 1..=self.shares() {
                let cache = self.family.share_cache(user, alpha);
                let share = caches
                    .iter()
                    .find(|(c, _)| *c == cache)
                    .and_then(|(_, content)| content.key_share(user, j, alpha))
                    .ok_or_else(|| {
                        Error::Decode(format!("share {alpha} of user {user} for subfile {j} not in cache {cache}"))
                    })?;
                block.try_xor_assign(share)?;
            }
            subfiles.push(block);
        }
        Ok(BitBlock::concat(&subfiles))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{CyclicUncodedScheme, Example1Scheme};
    use proptest::prelude::*;

    fn example1(n: usize, subfile_bits: usize) -> LiftedScheme<Example1Scheme> {
        let cfg = NetworkConfig::new(3, 2, n, 3 * subfile_bits, 3).unwrap();
        LiftedScheme::with_mode(Example1Scheme::new(cfg).unwrap(), PrivateSetMode::Oracle).unwrap()
    }

    fn round_trip<S: NonPrivateScheme>(s: &LiftedScheme<S>, lib: &SubfileLibrary, seed: u64) {
        let cfg = *s.config();
        let keys = s.draw_keys(seed);
        let placement = s.place(lib, &keys).unwrap();
        for d in DemandVector::all(cfg.users(), cfg.files()) {
            let tx = s.transmit(lib, &keys, &d).unwrap();
            for u in 1..=cfg.users() {
                let caches = placement.accessible(&cfg, u).unwrap();
                assert_eq!(s.decode(u, &tx, &caches, d.get(u)).unwrap(), lib.file(d.get(u)), "d={d:?} u={u}");
            }
        }
    }

    #[test]
    fn mode_names_round_trip() {
        for m in PrivateSetMode::ALL {
            assert_eq!(m.as_str().parse::<PrivateSetMode>().unwrap(), m);
        }
        assert!("lwcc".parse::<PrivateSetMode>().is_err());
    }

    #[test]
    fn families() {
        let cfg = NetworkConfig::new(4, 3, 2, 4, 4).unwrap();
        let naive = PrivateSetFamily::new(&cfg, PrivateSetMode::NaiveLwcc).unwrap();
        assert_eq!(naive.set(2).caches, vec![2, 4]);
        assert!(!naive.is_private());
        let full = PrivateSetFamily::new(&cfg, PrivateSetMode::Full).unwrap();
        assert_eq!(full.set(4).caches, vec![4, 1, 2]);
        assert!(full.is_private());
        let cfg = NetworkConfig::new(7, 5, 2, 7, 7).unwrap();
        let alg = PrivateSetFamily::new(&cfg, PrivateSetMode::Algorithm1).unwrap();
        assert_eq!(alg.size(), 3);
        assert_eq!(alg.share_cache(2, 3), 6);
        let single = NetworkConfig::new(4, 1, 2, 4, 4).unwrap();
        assert_eq!(PrivateSetFamily::new(&single, PrivateSetMode::NaiveLwcc).unwrap().size(), 1);
    }

    #[test]
    fn naive_family_is_rejected_by_checked_constructor() {
        let cfg = NetworkConfig::new(4, 3, 2, 4, 4).unwrap();
        let base = CyclicUncodedScheme::new(cfg, 1).unwrap();
        let family = PrivateSetFamily::new(&cfg, PrivateSetMode::NaiveLwcc).unwrap();
        assert!(matches!(
            LiftedScheme::new(base.clone(), family.clone()),
            Err(Error::InvalidPrivateSet { .. })
        ));
        assert!(LiftedScheme::new_unchecked(base, family).is_ok());
    }

    #[test]
    fn example1_shares_and_memory() {
        let s = example1(3, 1);
        assert_eq!(s.shares(), 2);
        assert_eq!(s.key_bits(), 18);
        // M + t(1 - LM/N) = 1 + 2(1 - 2/3)
        assert_eq!(s.memory(), Rational::new(5, 3));
        assert_eq!(s.rate(), Rational::new(1, 3));
        let lib = SubfileLibrary::from_index(0x1ab, 3, 3, 1);
        let placement = s.place(&lib, &s.draw_keys(5)).unwrap();
        // cache 1: W_{n,1} for 3 files plus shares of users 1 and 3
        assert_eq!(placement.cache(1).uncoded.len(), 3);
        assert_eq!(placement.cache(1).coded.len(), 2);
        assert!(placement.caches().iter().all(|c| c.stored_bits() == 5));
        assert_eq!(s.visible_key_vectors(1), vec![(1, 1), (1, 2), (2, 1), (3, 2)]);
    }

    #[test]
    fn zero_keys_reduce_to_demand_indicators() {
        let s = example1(3, 1);
        let keys = KeyMaterial::from_bits(3, 2, 3, &BitBlock::zeros(18)).unwrap();
        let d = DemandVector::new(vec![2, 3, 1], 3, 3).unwrap();
        let q = s.q_vectors(&keys, &d).unwrap();
        assert_eq!(q[0], Gf2Vector::unit(3, 2));
        assert_eq!(q[2], Gf2Vector::unit(3, 1));
    }

    #[test]
    fn example1_decodes_all_demands() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = example1(3, 4);
        let lib = SubfileLibrary::random(3, 3, 4, &mut rng);
        for seed in 0..3 {
            round_trip(&s, &lib, seed);
        }
    }

    #[test]
    fn cyclic_lift_decodes_for_every_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (k, l) in [(4, 3), (5, 2), (5, 3), (6, 4)] {
            for t in 0..=k / l {
                let cfg = NetworkConfig::new(k, l, 2, 2 * k, k).unwrap();
                let lib = SubfileLibrary::random(2, k, 2, &mut rng);
                for mode in PrivateSetMode::ALL {
                    let s = LiftedScheme::with_mode(CyclicUncodedScheme::new(cfg, t).unwrap(), mode).unwrap();
                    round_trip(&s, &lib, 17);
                }
            }
        }
    }

    #[test]
    fn lifted_memory_matches_stored_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (k, l) in [(4, 3), (5, 2), (7, 5), (6, 2)] {
            for t in 0..=k / l {
                let cfg = NetworkConfig::new(k, l, 3, k, k).unwrap();
                let s = LiftedScheme::with_mode(CyclicUncodedScheme::new(cfg, t).unwrap(), PrivateSetMode::Oracle).unwrap();
                let lib = SubfileLibrary::random(3, k, 1, &mut rng);
                let placement = s.place(&lib, &s.draw_keys(1)).unwrap();
                for c in placement.caches() {
                    assert_eq!(Rational::new(c.stored_bits() as i64, k as i64), s.memory(), "K={k} L={l} t={t}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn key_bits_round_trip(seed in any::<u64>()) {
            let km = KeyMaterial::generate(3, 2, 4, seed);
            prop_assert_eq!(KeyMaterial::from_bits(3, 2, 4, &km.to_bits()).unwrap(), km);
        }

        #[test]
        fn q_hides_demand_behind_mask(seed in any::<u64>(), d in prop::collection::vec(1usize..=3, 3)) {
            let s = example1(3, 1);
            let keys = KeyMaterial::generate(3, 2, 3, seed);
            let dv = DemandVector::new(d.clone(), 3, 3).unwrap();
            let q = s.q_vectors(&keys, &dv).unwrap();
            for k in 1..=3 {
                let unmasked = q[k - 1].xor(&keys.mask(k));
                prop_assert_eq!(unmasked, Gf2Vector::unit(3, d[k - 1]));
            }
        }
    }
}
