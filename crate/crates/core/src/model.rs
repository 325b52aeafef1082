//! Cyclic network topology, index arithmetic and the file/cache bookkeeping
//! shared by every scheme.
//!
//! All user, cache, file and subfile indices are 1-based.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitBlock;
use crate::error::{Error, Result};

/// Exact rational in file units.
pub type Rational = num_rational::Ratio<i64>;

/// `i` reduced into `1..=k`, with multiples of `k` mapping to `k`.
///
/// Panics when `k == 0`.
pub fn mod_index(i: i64, k: usize) -> usize {
    assert!(k > 0, "mod_index requires K >= 1");
    let r = i.rem_euclid(k as i64) as usize;
    if r == 0 {
        k
    } else {
        r
    }
}

/// The wrap-around closed interval `a, a+1, ..., b` over `1..=k`.
pub fn cyclic_range(a: usize, b: usize, k: usize) -> Result<Vec<usize>> {
    for idx in [a, b] {
        if idx == 0 || idx > k {
            return Err(Error::IndexOutOfRange { index: idx, max: k });
        }
    }
    if a <= b {
        Ok((a..=b).collect())
    } else {
        Ok((a..=k).chain(1..=b).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawNetworkConfig", into = "RawNetworkConfig")]
pub struct NetworkConfig {
    k: usize,
    l: usize,
    n: usize,
    f: usize,
    subfiles_per_file: usize,
}

#[derive(Serialize, Deserialize)]
struct RawNetworkConfig {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "F")]
    f: usize,
    subfiles_per_file: usize,
}

impl TryFrom<RawNetworkConfig> for NetworkConfig {
    type Error = Error;

    fn try_from(raw: RawNetworkConfig) -> Result<Self> {
        NetworkConfig::new(raw.k, raw.l, raw.n, raw.f, raw.subfiles_per_file)
    }
}

impl From<NetworkConfig> for RawNetworkConfig {
    fn from(c: NetworkConfig) -> Self {
        RawNetworkConfig {
            k: c.k,
            l: c.l,
            n: c.n,
            f: c.f,
            subfiles_per_file: c.subfiles_per_file,
        }
    }
}

impl NetworkConfig {
    pub fn new(k: usize, l: usize, n: usize, f: usize, subfiles_per_file: usize) -> Result<Self> {
        if l == 0 || l >= k {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= L < K, got K={k}, L={l}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidConfig("need N >= 1".into()));
        }
        if f == 0 || subfiles_per_file == 0 {
            return Err(Error::InvalidConfig(
                "F and subfiles_per_file must be positive".into(),
            ));
        }
        if !f.is_multiple_of(subfiles_per_file) {
            return Err(Error::Sizing(format!(
                "F={f} is not a multiple of subfiles_per_file={subfiles_per_file}"
            )));
        }
        Ok(NetworkConfig {
            k,
            l,
            n,
            f,
            subfiles_per_file,
        })
    }

    /// Users (= caches).
    pub fn users(&self) -> usize {
        self.k
    }

    /// Caches each user reads.
    pub fn access(&self) -> usize {
        self.l
    }

    pub fn files(&self) -> usize {
        self.n
    }

    pub fn file_bits(&self) -> usize {
        self.f
    }

    pub fn subfiles_per_file(&self) -> usize {
        self.subfiles_per_file
    }

    pub fn subfile_bits(&self) -> usize {
        self.f / self.subfiles_per_file
    }

    /// Same network with a different file size and subpacketization.
    pub fn with_sizes(&self, f: usize, subfiles_per_file: usize) -> Result<Self> {
        NetworkConfig::new(self.k, self.l, self.n, f, subfiles_per_file)
    }

    pub fn with_files(&self, n: usize) -> Result<Self> {
        NetworkConfig::new(self.k, self.l, n, self.f, self.subfiles_per_file)
    }

    pub fn check_user(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.k {
            Err(Error::IndexOutOfRange {
                index: k,
                max: self.k,
            })
        } else {
            Ok(())
        }
    }

    /// Caches `k, <k+1>, ..., <k+L-1>` read by user `k`.
    pub fn accessible_caches(&self, k: usize) -> Result<Vec<usize>> {
        self.check_user(k)?;
        Ok((0..self.l)
            .map(|off| mod_index((k + off) as i64, self.k))
            .collect())
    }

    /// Whether user `user` reads cache `cache`.
    pub fn accesses(&self, user: usize, cache: usize) -> bool {
        // cache is in the window iff (cache - user) mod K < L
        let off = (cache as i64 - user as i64).rem_euclid(self.k as i64) as usize;
        off < self.l
    }
}

pub fn accessible_caches(k: usize, cfg: &NetworkConfig) -> Result<Vec<usize>> {
    cfg.accessible_caches(k)
}

/// `N` files, each an ordered list of equal-length subfiles.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubfileLibrary {
    subfile_bits: usize,
    files: Vec<Vec<BitBlock>>,
}

impl SubfileLibrary {
    pub fn new(files: Vec<Vec<BitBlock>>) -> Result<Self> {
        let first = files
            .first()
            .ok_or_else(|| Error::Sizing("library needs at least one file".into()))?;
        let per_file = first.len();
        let subfile_bits = first.first().map(BitBlock::len).unwrap_or(0);
        if per_file == 0 {
            return Err(Error::Sizing("files need at least one subfile".into()));
        }
        for f in &files {
            if f.len() != per_file || f.iter().any(|s| s.len() != subfile_bits) {
                return Err(Error::Sizing(
                    "all files need the same number of equal-length subfiles".into(),
                ));
            }
        }
        Ok(SubfileLibrary {
            subfile_bits,
            files,
        })
    }

    pub fn zeros(num_files: usize, subfiles_per_file: usize, subfile_bits: usize) -> Self {
        SubfileLibrary {
            subfile_bits,
            files: vec![vec![BitBlock::zeros(subfile_bits); subfiles_per_file]; num_files],
        }
    }

    pub fn random<R: Rng + ?Sized>(
        num_files: usize,
        subfiles_per_file: usize,
        subfile_bits: usize,
        rng: &mut R,
    ) -> Self {
        let files = (0..num_files)
            .map(|_| {
                (0..subfiles_per_file)
                    .map(|_| BitBlock::random(subfile_bits, rng))
                    .collect()
            })
            .collect();
        SubfileLibrary {
            subfile_bits,
            files,
        }
    }

    /// Library whose concatenated bits (file-major, subfile, bit) are the low
    /// bits of `index`; enumerating `index` over `0..2^total` yields every library.
    pub fn from_index(
        index: u64,
        num_files: usize,
        subfiles_per_file: usize,
        subfile_bits: usize,
    ) -> Self {
        let total = num_files * subfiles_per_file * subfile_bits;
        assert!(total <= 64, "library index supports at most 64 bits");
        let all = BitBlock::from_u64(index, total);
        let mut pos = 0;
        let files = (0..num_files)
            .map(|_| {
                (0..subfiles_per_file)
                    .map(|_| {
                        let s = all.slice(pos, subfile_bits).expect("in range");
                        pos += subfile_bits;
                        s
                    })
                    .collect()
            })
            .collect();
        SubfileLibrary {
            subfile_bits,
            files,
        }
    }

    pub fn num_files(&self) -> usize {
        self.files.len()
    }

    pub fn subfiles_per_file(&self) -> usize {
        self.files[0].len()
    }

    pub fn subfile_bits(&self) -> usize {
        self.subfile_bits
    }

    pub fn file_bits(&self) -> usize {
        self.subfile_bits * self.subfiles_per_file()
    }

    pub fn subfile(&self, n: usize, j: usize) -> &BitBlock {
        &self.files[n - 1][j - 1]
    }

    pub fn subfiles(&self, n: usize) -> &[BitBlock] {
        &self.files[n - 1]
    }

    /// File `n` reassembled from its subfiles.
    pub fn file(&self, n: usize) -> BitBlock {
        BitBlock::concat(&self.files[n - 1])
    }

    pub fn files(&self) -> &[Vec<BitBlock>] {
        &self.files
    }

    /// Same content re-split into `subfiles_per_file` pieces.
    pub fn resplit(&self, subfiles_per_file: usize) -> Result<SubfileLibrary> {
        let raw: Vec<_> = (1..=self.num_files()).map(|n| self.file(n)).collect();
        split_library(&raw, subfiles_per_file)
    }

    /// Document with config fields and hex-encoded files.
    pub fn to_document(&self, cfg: &NetworkConfig) -> Result<LibraryDocument> {
        if cfg.files() != self.num_files()
            || cfg.file_bits() != self.file_bits()
            || cfg.subfiles_per_file() != self.subfiles_per_file()
        {
            return Err(Error::Sizing("library does not match configuration".into()));
        }
        Ok(LibraryDocument {
            config: *cfg,
            files: (1..=self.num_files()).map(|n| self.file(n).to_hex()).collect(),
        })
    }
}

/// Splits each raw file into `subfiles_per_file` equal consecutive pieces.
pub fn split_library(raw_files: &[BitBlock], subfiles_per_file: usize) -> Result<SubfileLibrary> {
    let files = raw_files
        .iter()
        .map(|f| f.split_equal(subfiles_per_file))
        .collect::<Result<Vec<_>>>()?;
    SubfileLibrary::new(files)
}

/// JSON layout: `{"K":..,"L":..,"N":..,"F":..,"subfiles_per_file":..,"files":["<hex>",..]}`.
///
/// Each file is `F` bits in hex, first bit in the high bit of the first digit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LibraryDocument {
    #[serde(flatten)]
    pub config: NetworkConfig,
    pub files: Vec<String>,
}

impl LibraryDocument {
    pub fn into_library(self) -> Result<(NetworkConfig, SubfileLibrary)> {
        if self.files.len() != self.config.files() {
            return Err(Error::Sizing(format!(
                "document lists {} files, N={}",
                self.files.len(),
                self.config.files()
            )));
        }
        let raw = self
            .files
            .iter()
            .map(|h| BitBlock::from_hex(h, self.config.file_bits()))
            .collect::<Result<Vec<_>>>()?;
        let lib = split_library(&raw, self.config.subfiles_per_file())?;
        Ok((self.config, lib))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// One requested file index per user.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DemandVector(Vec<usize>);

impl DemandVector {
    pub fn new(demands: Vec<usize>, users: usize, files: usize) -> Result<Self> {
        if demands.len() != users {
            return Err(Error::InvalidConfig(format!(
                "demand vector has {} entries, K={users}",
                demands.len()
            )));
        }
        for (i, &d) in demands.iter().enumerate() {
            if d == 0 || d > files {
                return Err(Error::DemandOutOfRange {
                    user: i + 1,
                    demand: d,
                    files,
                });
            }
        }
        Ok(DemandVector(demands))
    }

    /// The `index`-th vector of `[N]^K` in lexicographic order (user 1 most significant).
    pub fn from_index(mut index: u64, users: usize, files: usize) -> Self {
        let mut d = vec![0; users];
        for slot in d.iter_mut().rev() {
            *slot = (index % files as u64) as usize + 1;
            index /= files as u64;
        }
        DemandVector(d)
    }

    /// Every vector of `[N]^K`, lexicographic.
    pub fn all(users: usize, files: usize) -> impl Iterator<Item = DemandVector> {
        let total = (files as u64).pow(users as u32);
        (0..total).map(move |i| DemandVector::from_index(i, users, files))
    }

    pub fn users(&self) -> usize {
        self.0.len()
    }

    /// Demand of user `k`.
    pub fn get(&self, k: usize) -> usize {
        self.0[k - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Demands of every user except `k`, in user order.
    pub fn others(&self, k: usize) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, _)| i + 1 != k)
            .map(|(_, &d)| d)
            .collect()
    }

    pub fn check_files(&self, files: usize) -> Result<()> {
        for (i, &d) in self.0.iter().enumerate() {
            if d == 0 || d > files {
                return Err(Error::DemandOutOfRange {
                    user: i + 1,
                    demand: d,
                    files,
                });
            }
        }
        Ok(())
    }
}

/// What a coded block stored in a cache is a combination of. Labels are
/// public structure, identical across key and library realizations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodedLabel {
    /// `⊕_ℓ W^(1)_{file,ℓ}` over the listed part indices.
    Air { file: usize, parts: Vec<usize> },
    /// Key share `α = share` of `user` for missing subfile index `subfile`.
    KeyShare {
        user: usize,
        subfile: usize,
        share: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodedBlock {
    pub label: CodedLabel,
    pub block: BitBlock,
}

/// Contents of one cache.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CacheContent {
    /// `(file n, subfile j) -> W_{n,j}`.
    pub uncoded: BTreeMap<(usize, usize), BitBlock>,
    pub coded: Vec<CodedBlock>,
}

impl CacheContent {
    pub fn stored_bits(&self) -> usize {
        self.uncoded.values().map(BitBlock::len).sum::<usize>()
            + self.coded.iter().map(|c| c.block.len()).sum::<usize>()
    }

    pub fn key_share(&self, user: usize, subfile: usize, share: usize) -> Option<&BitBlock> {
        self.coded.iter().find_map(|c| match c.label {
            CodedLabel::KeyShare {
                user: u,
                subfile: j,
                share: a,
            } if u == user && j == subfile && a == share => Some(&c.block),
            _ => None,
        })
    }

    /// Canonical bit serialization: uncoded blocks in `(n, j)` order, then
    /// coded blocks in label order.
    pub fn append_bits(&self, out: &mut BitBlock) {
        for b in self.uncoded.values() {
            out.extend(b);
        }
        let mut coded: Vec<_> = self.coded.iter().collect();
        coded.sort_by(|a, b| a.label.cmp(&b.label));
        for c in coded {
            out.extend(&c.block);
        }
    }
}

/// Contents of all `K` caches.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlacementState {
    caches: Vec<CacheContent>,
}

impl PlacementState {
    pub fn empty(k: usize) -> Self {
        PlacementState {
            caches: vec![CacheContent::default(); k],
        }
    }

    pub fn from_caches(caches: Vec<CacheContent>) -> Self {
        PlacementState { caches }
    }

    pub fn cache(&self, k: usize) -> &CacheContent {
        &self.caches[k - 1]
    }

    pub fn cache_mut(&mut self, k: usize) -> &mut CacheContent {
        &mut self.caches[k - 1]
    }

    pub fn caches(&self) -> &[CacheContent] {
        &self.caches
    }

    /// The caches read by user `k`, in access order.
    pub fn accessible(&self, cfg: &NetworkConfig, k: usize) -> Result<Vec<(usize, &CacheContent)>> {
        Ok(cfg
            .accessible_caches(k)?
            .into_iter()
            .map(|c| (c, self.cache(c)))
            .collect())
    }

    pub fn max_cache_bits(&self) -> usize {
        self.caches.iter().map(CacheContent::stored_bits).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(s: &str) -> BitBlock {
        BitBlock::from_bit_str(s).unwrap()
    }

    #[test]
    fn mod_index_examples() {
        assert_eq!(mod_index(5, 3), 2);
        assert_eq!(mod_index(3, 3), 3);
        assert_eq!(mod_index(0, 4), 4);
        assert_eq!(mod_index(-1, 4), 3);
    }

    #[test]
    #[should_panic]
    fn mod_index_zero_modulus() {
        mod_index(1, 0);
    }

    #[test]
    fn cyclic_range_examples() {
        assert_eq!(cyclic_range(2, 4, 5).unwrap(), vec![2, 3, 4]);
        assert_eq!(cyclic_range(4, 2, 5).unwrap(), vec![4, 5, 1, 2]);
        assert_eq!(cyclic_range(3, 3, 5).unwrap(), vec![3]);
        assert!(cyclic_range(0, 2, 5).is_err());
        assert!(cyclic_range(1, 6, 5).is_err());
    }

    #[test]
    fn accessible_cache_examples() {
        let c32 = NetworkConfig::new(3, 2, 3, 3, 3).unwrap();
        assert_eq!(c32.accessible_caches(1).unwrap(), vec![1, 2]);
        assert_eq!(c32.accessible_caches(3).unwrap(), vec![3, 1]);
        let c51 = NetworkConfig::new(5, 1, 2, 5, 5).unwrap();
        assert_eq!(c51.accessible_caches(2).unwrap(), vec![2]);
        assert!(c51.accessible_caches(6).is_err());
    }

    #[test]
    fn config_rejects_bad_parameters() {
        assert!(NetworkConfig::new(3, 3, 2, 3, 3).is_err());
        assert!(NetworkConfig::new(3, 0, 2, 3, 3).is_err());
        assert!(NetworkConfig::new(3, 2, 0, 3, 3).is_err());
        assert!(matches!(
            NetworkConfig::new(3, 2, 2, 4, 3),
            Err(Error::Sizing(_))
        ));
    }

    #[test]
    fn split_library_examples() {
        let lib = split_library(&[bits("101010")], 3).unwrap();
        assert_eq!(lib.subfiles(1), &[bits("10"), bits("10"), bits("10")]);
        let lib = split_library(&[bits("1111")], 1).unwrap();
        assert_eq!(lib.subfiles(1), &[bits("1111")]);
        let lib = split_library(&[bits("10"), bits("11")], 2).unwrap();
        assert_eq!(lib.subfiles(1), &[bits("1"), bits("0")]);
        assert_eq!(lib.subfiles(2), &[bits("1"), bits("1")]);
        assert!(matches!(
            split_library(&[bits("101")], 2),
            Err(Error::Sizing(_))
        ));
    }

    #[test]
    fn demand_vectors() {
        assert!(DemandVector::new(vec![1, 2], 3, 2).is_err());
        assert!(DemandVector::new(vec![1, 3, 1], 3, 2).is_err());
        let all: Vec<_> = DemandVector::all(2, 3).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0].as_slice(), &[1, 1]);
        assert_eq!(all[5].as_slice(), &[2, 3]);
        let d = DemandVector::new(vec![2, 1, 3], 3, 3).unwrap();
        assert_eq!(d.others(2), vec![2, 3]);
    }

    #[test]
    fn library_document_json() {
        let cfg = NetworkConfig::new(3, 2, 2, 6, 3).unwrap();
        let lib = split_library(&[bits("101010"), bits("000111")], 3).unwrap();
        let doc = lib.to_document(&cfg).unwrap();
        let json = doc.to_json();
        assert!(json.contains("\"K\": 3") && json.contains("\"a8\""));
        let (cfg2, lib2) = LibraryDocument::from_json(&json).unwrap().into_library().unwrap();
        assert_eq!(cfg2, cfg);
        assert_eq!(lib2, lib);
        let bad = json.replace("\"L\": 2", "\"L\": 3");
        assert!(LibraryDocument::from_json(&bad).is_err());
    }

    proptest! {
        #[test]
        fn mod_index_is_periodic(i in -1000i64..1000, k in 1usize..40) {
            let m = mod_index(i, k);
            prop_assert!((1..=k).contains(&m));
            prop_assert_eq!(m, mod_index(i + k as i64, k));
        }

        #[test]
        fn cyclic_range_length(k in 1usize..30, a in 1usize..30, b in 1usize..30) {
            prop_assume!(a <= k && b <= k);
            let r = cyclic_range(a, b, k).unwrap();
            prop_assert_eq!(r.len(), mod_index(b as i64 - a as i64 + 1, k));
        }

        #[test]
        fn every_cache_is_read_by_exactly_l_users(k in 2usize..20, l in 1usize..20) {
            prop_assume!(l < k);
            let cfg = NetworkConfig::new(k, l, 1, 1, 1).unwrap();
            let mut hits = vec![0; k + 1];
            for u in 1..=k {
                let acc = cfg.accessible_caches(u).unwrap();
                prop_assert_eq!(acc.len(), l);
                for c in acc {
                    prop_assert!(cfg.accesses(u, c));
                    hits[c] += 1;
                }
            }
            prop_assert!(hits[1..].iter().all(|&h| h == l));
        }

        #[test]
        fn split_then_reassemble(bits in prop::collection::vec(any::<bool>(), 1..12), parts in 1usize..4) {
            let total: Vec<bool> = bits.iter().cycle().take(bits.len() * parts).copied().collect();
            let raw = BitBlock::from_bools(&total);
            let lib = split_library(std::slice::from_ref(&raw), parts).unwrap();
            prop_assert_eq!(lib.file(1), raw);
        }
    }
}
