//! Exact demand-privacy check.
//!
//! For each user `k`, each library `w` and each own demand `d_k`, the
//! distribution of the user's observation (its caches and the broadcast) over
//! uniform keys is computed for every value of the other demands `d_~k`. The
//! user is private iff these distributions coincide in every cell; the mutual
//! information between `d_~k` and the observation is reported alongside,
//! averaged over cells.
//!
//! Two engines produce the per-cell distributions:
//! - `Enumerate` runs the scheme for every key.
//! - `Affine` relies on the scheme being affine in its key bits: the
//!   observation distribution for a fixed `(w, d)` is uniform on the coset
//!   `f(0) + span{f(e_i) - f(0)}`, so comparing cosets replaces the key sweep.
//!   Additivity is spot-checked on all pairs of unit keys.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bits::BitBlock;
use crate::deployment::{CachingScheme, Transmission};
use crate::error::{Error, Result};
use crate::gf2::Gf2Basis;
use crate::lifting::LiftedScheme;
use crate::model::{DemandVector, NetworkConfig, PlacementState, SubfileLibrary};
use crate::schemes::NonPrivateScheme;

use super::mi::mutual_information_exact;

pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Largest span dimension the affine engine expands when cosets of
/// different dimension must be compared element by element.
pub const MAX_EXPANDED_RANK: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrivacyEngine {
    /// Enumerate when within budget, otherwise affine for key-linear schemes.
    #[default]
    Auto,
    Enumerate,
    Affine,
}

impl fmt::Display for PrivacyEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrivacyEngine::Auto => "auto",
            PrivacyEngine::Enumerate => "enumerate",
            PrivacyEngine::Affine => "affine",
        })
    }
}

impl FromStr for PrivacyEngine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(PrivacyEngine::Auto),
            "enumerate" => Ok(PrivacyEngine::Enumerate),
            "affine" => Ok(PrivacyEngine::Affine),
            other => Err(Error::Parse(format!("unknown privacy engine {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum LibrarySet {
    /// Every library of the configured shape.
    All,
    Explicit(Vec<SubfileLibrary>),
}

#[derive(Debug, Clone)]
pub struct PrivacyOptions {
    /// Maximum number of (library, key, demand vector) scheme evaluations.
    pub budget: u128,
    pub engine: PrivacyEngine,
    pub libraries: LibrarySet,
    pub threads: usize,
}

impl Default for PrivacyOptions {
    fn default() -> Self {
        PrivacyOptions {
            budget: DEFAULT_BUDGET,
            engine: PrivacyEngine::Auto,
            libraries: LibrarySet::All,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Private,
    Leak,
}

/// Two values of `d_~k` under which `view` has different probability.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeakWitness {
    /// Library files as hex.
    pub library: Vec<String>,
    pub own_demand: usize,
    pub others_a: Vec<usize>,
    pub others_b: Vec<usize>,
    /// Observation bits (caches then broadcast) as hex.
    pub view: String,
    /// Number of keys producing `view` under `others_a` and `others_b`.
    pub count_a: u64,
    pub count_b: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserPrivacy {
    pub user: usize,
    pub verdict: Verdict,
    /// `I(D_~k; observation | W, D_k)` in bits, averaged over uniform `(w, d_k)`.
    pub mutual_information_bits: f64,
    pub exact_zero: bool,
    pub cells: u64,
    pub witness: Option<LeakWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrivacyReport {
    pub scheme: String,
    pub engine: PrivacyEngine,
    pub libraries: u64,
    pub key_bits: usize,
    pub demand_vectors: u64,
    pub evaluations: u128,
    pub users: Vec<UserPrivacy>,
}

impl PrivacyReport {
    pub fn is_private(&self) -> bool {
        self.users.iter().all(|u| u.verdict == Verdict::Private)
    }
}

/// Everything user `k` holds: its caches, its demand, the broadcast and the library.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UserView {
    pub cache_bits: BitBlock,
    pub own_demand: usize,
    pub transmission_bits: BitBlock,
    pub library_bits: BitBlock,
}

impl UserView {
    pub fn capture(
        cfg: &NetworkConfig,
        placement: &PlacementState,
        tx: &Transmission,
        library: &SubfileLibrary,
        demands: &DemandVector,
        user: usize,
    ) -> Result<Self> {
        let mut transmission_bits = BitBlock::zeros(0);
        tx.append_bits(&mut transmission_bits);
        Ok(UserView {
            cache_bits: cache_bits(cfg, placement, user)?,
            own_demand: demands.get(user),
            transmission_bits,
            library_bits: BitBlock::concat(library.files().iter().flatten()),
        })
    }

    /// The part that varies within a `(w, d_k)` cell.
    pub fn observation(&self) -> BitBlock {
        let mut out = self.cache_bits.clone();
        out.extend(&self.transmission_bits);
        out
    }

    /// Caches, own demand (32 bits), broadcast, library.
    pub fn to_bits(&self) -> BitBlock {
        let mut out = self.cache_bits.clone();
        out.extend(&BitBlock::from_u64(self.own_demand as u64, 32));
        out.extend(&self.transmission_bits);
        out.extend(&self.library_bits);
        out
    }
}

/// Accessible caches in ascending index order, each serialized canonically.
fn cache_bits(cfg: &NetworkConfig, placement: &PlacementState, user: usize) -> Result<BitBlock> {
    let mut caches = cfg.accessible_caches(user)?;
    caches.sort_unstable();
    let mut out = BitBlock::zeros(0);
    for c in caches {
        placement.cache(c).append_bits(&mut out);
    }
    Ok(out)
}

fn observation(cache: &BitBlock, tx: &BitBlock) -> BitBlock {
    let mut out = cache.clone();
    out.extend(tx);
    out
}

fn tx_bits(tx: &Transmission) -> BitBlock {
    let mut out = BitBlock::zeros(0);
    tx.append_bits(&mut out);
    out
}

/// Lexicographic index of `d` with user `k` removed.
fn others_index(d: &DemandVector, k: usize, files: usize) -> usize {
    d.as_slice()
        .iter()
        .enumerate()
        .filter(|(i, _)| i + 1 != k)
        .fold(0, |acc, (_, &x)| acc * files + (x - 1))
}

fn others_from_index(index: usize, users: usize, files: usize) -> Vec<usize> {
    DemandVector::from_index(index as u64, users - 1, files).as_slice().to_vec()
}

fn pow(base: usize, exp: usize) -> u128 {
    (base as u128).saturating_pow(exp as u32)
}

fn pow2(exp: usize) -> u128 {
    if exp >= 127 {
        u128::MAX
    } else {
        1u128 << exp
    }
}

fn library_count(cfg: &NetworkConfig, set: &LibrarySet) -> u128 {
    match set {
        LibrarySet::All => pow2(cfg.files() * cfg.file_bits()),
        LibrarySet::Explicit(v) => v.len() as u128,
    }
}

/// Evaluations needed by each engine: `(enumerate, affine)`.
pub fn estimate_evaluations<S: CachingScheme + ?Sized>(scheme: &S, libraries: &LibrarySet) -> (u128, u128) {
    let cfg = scheme.config();
    let libs = library_count(cfg, libraries);
    let vectors = pow(cfg.files(), cfg.users());
    let m = scheme.key_bits() as u128;
    let affine_keys = 1 + m + m * m.saturating_sub(1) / 2;
    (
        libs.saturating_mul(pow2(scheme.key_bits())).saturating_mul(vectors),
        libs.saturating_mul(affine_keys).saturating_mul(vectors),
    )
}

fn resolve_engine<S: CachingScheme + ?Sized>(scheme: &S, options: &PrivacyOptions) -> Result<(PrivacyEngine, u128)> {
    let (enumerate, affine) = estimate_evaluations(scheme, &options.libraries);
    let refuse = |required| Error::BudgetExceeded {
        required,
        budget: options.budget,
    };
    match options.engine {
        PrivacyEngine::Enumerate if enumerate <= options.budget && scheme.key_bits() < 64 => {
            Ok((PrivacyEngine::Enumerate, enumerate))
        }
        PrivacyEngine::Enumerate => Err(refuse(enumerate)),
        PrivacyEngine::Affine if !scheme.key_linear() => Err(Error::Unsupported(format!(
            "{} is not affine in its key bits",
            scheme.name()
        ))),
        PrivacyEngine::Affine if affine <= options.budget => Ok((PrivacyEngine::Affine, affine)),
        PrivacyEngine::Affine => Err(refuse(affine)),
        PrivacyEngine::Auto => {
            if enumerate <= options.budget && scheme.key_bits() < 64 {
                Ok((PrivacyEngine::Enumerate, enumerate))
            } else if scheme.key_linear() && affine <= options.budget {
                Ok((PrivacyEngine::Affine, affine))
            } else if scheme.key_linear() {
                Err(refuse(affine))
            } else {
                Err(refuse(enumerate))
            }
        }
    }
}

/// Outcome for one `(w, user, d_k)` cell.
#[derive(Debug, Clone)]
struct Cell {
    user: usize,
    mi_bits: f64,
    exact_zero: bool,
    /// `(others_a, others_b, view, count_a, count_b)`.
    witness: Option<(usize, usize, BitBlock, u64, u64)>,
    own_demand: usize,
}

/// Rows are `d_~k` values, columns the sorted distinct observations.
fn analyze_counts(user: usize, own_demand: usize, counts: HashMap<BitBlock, Vec<u64>>) -> Result<Cell> {
    let mut columns: Vec<(BitBlock, Vec<u64>)> = counts.into_iter().collect();
    columns.sort_by(|a, b| a.0.cmp(&b.0));
    let rows = columns[0].1.len();
    let table: Vec<Vec<u64>> = (0..rows).map(|r| columns.iter().map(|(_, c)| c[r]).collect()).collect();
    let mi = mutual_information_exact(&table)?;

    let witness = (1..rows).find_map(|b| {
        columns
            .iter()
            .find(|(_, c)| c[0] != c[b])
            .map(|(view, c)| (0, b, view.clone(), c[0], c[b]))
    });
    assert_eq!(
        witness.is_none(),
        mi.exact_zero,
        "distribution comparison and mutual information disagree"
    );
    Ok(Cell {
        user,
        mi_bits: mi.bits,
        exact_zero: mi.exact_zero,
        witness,
        own_demand,
    })
}

fn enumerate_library<S: CachingScheme + ?Sized>(scheme: &S, library: &SubfileLibrary) -> Result<Vec<Cell>> {
    let cfg = *scheme.config();
    let (k_users, n) = (cfg.users(), cfg.files());
    let m = scheme.key_bits();
    let rows = pow(n, k_users - 1) as usize;
    let mut tables: Vec<Vec<HashMap<BitBlock, Vec<u64>>>> = vec![vec![HashMap::new(); n]; k_users];
    for key in 0..(1u64 << m) {
        let keys = BitBlock::from_u64(key, m);
        let placement = scheme.place(library, &keys)?;
        let caches = (1..=k_users)
            .map(|k| cache_bits(&cfg, &placement, k))
            .collect::<Result<Vec<_>>>()?;
        for d in DemandVector::all(k_users, n) {
            let tx = tx_bits(&scheme.transmit(library, &keys, &d)?);
            for k in 1..=k_users {
                let row = others_index(&d, k, n);
                tables[k - 1][d.get(k) - 1]
                    .entry(observation(&caches[k - 1], &tx))
                    .or_insert_with(|| vec![0; rows])[row] += 1;
            }
        }
    }
    let mut cells = Vec::with_capacity(k_users * n);
    for (k, per_demand) in tables.into_iter().enumerate() {
        for (dk, counts) in per_demand.into_iter().enumerate() {
            cells.push(analyze_counts(k + 1, dk + 1, counts)?);
        }
    }
    Ok(cells)
}

fn unit_key(m: usize, i: usize) -> BitBlock {
    let mut b = BitBlock::zeros(m);
    b.set(i, true);
    b
}

fn span_elements(basis: &Gf2Basis, len: usize) -> Vec<BitBlock> {
    let mut out = vec![BitBlock::zeros(len)];
    for v in basis.vectors() {
        let extra: Vec<BitBlock> = out.iter().map(|e| e ^ v).collect();
        out.extend(extra);
    }
    out
}

/// Rows are `(offset, span)` per `d_~k` value.
fn analyze_cosets(user: usize, own_demand: usize, key_bits: usize, rows: &[(BitBlock, Gf2Basis)]) -> Result<Cell> {
    let reference = &rows[0].1;
    let same_span = rows
        .iter()
        .all(|(_, b)| b.rank() == reference.rank() && b.vectors().all(|v| reference.contains(v)));
    let max_rank = rows.iter().map(|(_, b)| b.rank()).max().unwrap_or(0);
    if !same_span && max_rank > MAX_EXPANDED_RANK {
        return Err(Error::Unsupported(format!(
            "coset dimension {max_rank} too large to expand"
        )));
    }
    let mut counts: HashMap<BitBlock, Vec<u64>> = HashMap::new();
    for (r, (offset, basis)) in rows.iter().enumerate() {
        let weight = 1u64 << (key_bits - basis.rank());
        let elements = if same_span {
            vec![reference.reduce(offset)]
        } else {
            span_elements(basis, offset.len()).into_iter().map(|e| &e ^ offset).collect()
        };
        for e in elements {
            counts.entry(e).or_insert_with(|| vec![0; rows.len()])[r] += weight;
        }
    }
    let mut cell = analyze_counts(user, own_demand, counts)?;
    if same_span {
        // columns are coset representatives; report an actual observation
        if let Some(w) = cell.witness.as_mut() {
            let from = if w.3 > 0 { w.0 } else { w.1 };
            w.2 = rows[from].0.clone();
        }
    }
    Ok(cell)
}

fn affine_library<S: CachingScheme + ?Sized>(scheme: &S, library: &SubfileLibrary) -> Result<Vec<Cell>> {
    let cfg = *scheme.config();
    let (k_users, n) = (cfg.users(), cfg.files());
    let m = scheme.key_bits();
    let rows = pow(n, k_users - 1) as usize;

    let caches_for = |keys: &BitBlock| -> Result<Vec<BitBlock>> {
        let p = scheme.place(library, keys)?;
        (1..=k_users).map(|k| cache_bits(&cfg, &p, k)).collect()
    };
    let zero = BitBlock::zeros(m);
    let units: Vec<BitBlock> = (0..m).map(|i| unit_key(m, i)).collect();
    let cache0 = caches_for(&zero)?;
    let cache_units = units.iter().map(&caches_for).collect::<Result<Vec<_>>>()?;
    let mut pair_keys = Vec::new();
    let mut cache_pairs = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let key = &units[i] ^ &units[j];
            cache_pairs.push(caches_for(&key)?);
            pair_keys.push((i, j, key));
        }
    }

    let mut cosets: Vec<Vec<Vec<Option<(BitBlock, Gf2Basis)>>>> = vec![vec![vec![None; rows]; n]; k_users];
    for d in DemandVector::all(k_users, n) {
        let tx0 = tx_bits(&scheme.transmit(library, &zero, &d)?);
        let tx_units = units
            .iter()
            .map(|u| Ok(tx_bits(&scheme.transmit(library, u, &d)?)))
            .collect::<Result<Vec<_>>>()?;
        for k in 0..k_users {
            let base = observation(&cache0[k], &tx0);
            let diffs: Vec<BitBlock> = (0..m)
                .map(|i| &observation(&cache_units[i][k], &tx_units[i]) ^ &base)
                .collect();
            let mut basis = Gf2Basis::new(base.len());
            for v in &diffs {
                basis.insert(v);
            }
            cosets[k][d.get(k + 1) - 1][others_index(&d, k + 1, n)] = Some((base, basis));
        }
        for ((i, j, key), caches) in pair_keys.iter().zip(&cache_pairs) {
            let tx = tx_bits(&scheme.transmit(library, key, &d)?);
            for k in 0..k_users {
                let lhs = observation(&caches[k], &tx);
                let base = observation(&cache0[k], &tx0);
                let rhs = &(&observation(&cache_units[*i][k], &tx_units[*i]) ^ &observation(&cache_units[*j][k], &tx_units[*j])) ^ &base;
                if lhs != rhs {
                    return Err(Error::Unsupported(format!(
                        "{} is not affine in key bits {i} and {j}",
                        scheme.name()
                    )));
                }
            }
        }
    }

    let mut cells = Vec::with_capacity(k_users * n);
    for (k, per_demand) in cosets.into_iter().enumerate() {
        for (dk, rows) in per_demand.into_iter().enumerate() {
            let rows: Vec<(BitBlock, Gf2Basis)> = rows.into_iter().map(|r| r.expect("every row filled")).collect();
            cells.push(analyze_cosets(k + 1, dk + 1, m, &rows)?);
        }
    }
    Ok(cells)
}

fn library_at(cfg: &NetworkConfig, set: &LibrarySet, index: u64) -> SubfileLibrary {
    match set {
        LibrarySet::All => SubfileLibrary::from_index(index, cfg.files(), cfg.subfiles_per_file(), cfg.subfile_bits()),
        LibrarySet::Explicit(v) => v[index as usize].clone(),
    }
}

/// Runs the privacy check, refusing with the required evaluation count when
/// the chosen engine exceeds the budget.
pub fn verify_privacy_exact<S: CachingScheme + Sync + ?Sized>(scheme: &S, options: &PrivacyOptions) -> Result<PrivacyReport> {
    let cfg = *scheme.config();
    if let LibrarySet::Explicit(v) = &options.libraries {
        if v.is_empty() {
            return Err(Error::InvalidConfig("no libraries to check".into()));
        }
        if v.iter().any(|l| {
            l.num_files() != cfg.files()
                || l.subfiles_per_file() != cfg.subfiles_per_file()
                || l.subfile_bits() != cfg.subfile_bits()
        }) {
            return Err(Error::Sizing("library does not match the scheme configuration".into()));
        }
    }
    let (engine, evaluations) = resolve_engine(scheme, options)?;
    let libraries = library_count(&cfg, &options.libraries) as u64;

    let run = |index: u64| -> Result<Vec<Cell>> {
        let lib = library_at(&cfg, &options.libraries, index);
        match engine {
            PrivacyEngine::Affine => affine_library(scheme, &lib),
            _ => enumerate_library(scheme, &lib),
        }
    };
    let threads = options.threads.max(1).min(libraries.max(1) as usize);
    let mut results: Vec<(u64, Vec<Cell>)> = if threads == 1 {
        (0..libraries).map(|i| Ok((i, run(i)?))).collect::<Result<_>>()?
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads as u64)
                .map(|t| {
                    let run = &run;
                    s.spawn(move || {
                        (t..libraries)
                            .step_by(threads)
                            .map(|i| Ok((i, run(i)?)))
                            .collect::<Result<Vec<_>>>()
                    })
                })
                .collect();
            let mut all = Vec::new();
            for h in handles {
                all.extend(h.join().expect("privacy worker panicked")?);
            }
            Ok::<_, Error>(all)
        })?
    };
    results.sort_by_key(|(i, _)| *i);

    let cells_per_user = libraries * cfg.files() as u64;
    let mut users: Vec<UserPrivacy> = (1..=cfg.users())
        .map(|user| UserPrivacy {
            user,
            verdict: Verdict::Private,
            mutual_information_bits: 0.0,
            exact_zero: true,
            cells: 0,
            witness: None,
        })
        .collect();
    for (index, cells) in results {
        for cell in cells {
            let u = &mut users[cell.user - 1];
            u.cells += 1;
            u.mutual_information_bits += cell.mi_bits / cells_per_user as f64;
            u.exact_zero &= cell.exact_zero;
            if let Some((a, b, view, count_a, count_b)) = cell.witness {
                u.verdict = Verdict::Leak;
                if u.witness.is_none() {
                    let lib = library_at(&cfg, &options.libraries, index);
                    u.witness = Some(LeakWitness {
                        library: (1..=cfg.files()).map(|n| lib.file(n).to_hex()).collect(),
                        own_demand: cell.own_demand,
                        others_a: others_from_index(a, cfg.users(), cfg.files()),
                        others_b: others_from_index(b, cfg.users(), cfg.files()),
                        view: view.to_hex(),
                        count_a,
                        count_b,
                    });
                }
            }
        }
    }
    for u in &mut users {
        if u.exact_zero {
            u.mutual_information_bits = 0.0;
        }
    }

    Ok(PrivacyReport {
        scheme: scheme.name(),
        engine,
        libraries,
        key_bits: scheme.key_bits(),
        demand_vectors: pow(cfg.files(), cfg.users()) as u64,
        evaluations,
        users,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaskUniformity {
    pub user: usize,
    /// Key vectors stored (inside shares) in the user's caches.
    pub visible_vectors: usize,
    pub groups: u64,
    /// Bits of `Q` outside column `user`.
    pub other_columns_bits: usize,
    pub uniform: bool,
}

/// Given the key vectors that appear in user `k`'s caches, the other columns
/// of `Q` are uniform over all `N(K-1)`-bit values.
pub fn check_other_columns_uniform<S: NonPrivateScheme>(
    scheme: &LiftedScheme<S>,
    user: usize,
    demands: &DemandVector,
) -> Result<MaskUniformity> {
    let cfg = *scheme.config();
    cfg.check_user(user)?;
    let m = scheme.key_bits();
    if m > 24 {
        return Err(Error::BudgetExceeded {
            required: pow2(m),
            budget: 1 << 24,
        });
    }
    let visible = scheme.visible_key_vectors(user);
    let other_bits = cfg.files() * (cfg.users() - 1);
    let mut groups: HashMap<BitBlock, HashMap<BitBlock, u64>> = HashMap::new();
    for key in 0..(1u64 << m) {
        let km = scheme.key_material(&BitBlock::from_u64(key, m))?;
        let seen = BitBlock::concat(visible.iter().map(|&(i, a)| km.vector(i, a).bits()));
        let q = scheme.q_vectors(&km, demands)?;
        let others = BitBlock::concat(
            q.iter()
                .enumerate()
                .filter(|(i, _)| i + 1 != user)
                .map(|(_, v)| v.bits()),
        );
        *groups.entry(seen).or_default().entry(others).or_default() += 1;
    }
    let full = 1usize << other_bits;
    let uniform = groups.values().all(|h| {
        let first = h.values().next().copied();
        h.len() == full && h.values().all(|&c| Some(c) == first)
    });
    Ok(MaskUniformity {
        user,
        visible_vectors: visible.len(),
        groups: groups.len() as u64,
        other_columns_bits: other_bits,
        uniform,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deployment::NonPrivateDeployment;
    use crate::lifting::PrivateSetMode;
    use crate::schemes::{CyclicUncodedScheme, Example1Scheme};

    fn example1_cfg() -> NetworkConfig {
        NetworkConfig::new(3, 2, 2, 3, 3).unwrap()
    }

    #[test]
    fn others_index_is_lexicographic() {
        let d = DemandVector::new(vec![2, 1, 3], 3, 3).unwrap();
        assert_eq!(others_index(&d, 2, 3), 3 + 2);
        assert_eq!(others_from_index(5, 3, 3), vec![2, 3]);
    }

    #[test]
    fn non_private_example1_leaks() {
        let s = NonPrivateDeployment(Example1Scheme::new(example1_cfg()).unwrap());
        let r = verify_privacy_exact(&s, &PrivacyOptions::default()).unwrap();
        assert!(!r.is_private());
        for u in &r.users {
            assert_eq!(u.verdict, Verdict::Leak);
            assert!(u.mutual_information_bits > 0.0);
            // demands are public: full knowledge of 2 binary demands
            assert!((u.mutual_information_bits - 2.0).abs() < 1e-12);
            let w = u.witness.as_ref().unwrap();
            assert_ne!(w.others_a, w.others_b);
            assert!(w.count_a != w.count_b);
        }
    }

    #[test]
    fn engines_agree_on_small_lifted_instance() {
        let cfg = NetworkConfig::new(3, 2, 2, 3, 3).unwrap();
        let s = LiftedScheme::with_mode(Example1Scheme::new(cfg).unwrap(), PrivateSetMode::Oracle).unwrap();
        let libs: Vec<_> = [0u64, 0b010111, 0b111000].iter().map(|&i| SubfileLibrary::from_index(i, 2, 3, 1)).collect();
        let mut opts = PrivacyOptions {
            libraries: LibrarySet::Explicit(libs),
            ..PrivacyOptions::default()
        };
        opts.engine = PrivacyEngine::Enumerate;
        let a = verify_privacy_exact(&s, &opts).unwrap();
        opts.engine = PrivacyEngine::Affine;
        let b = verify_privacy_exact(&s, &opts).unwrap();
        assert!(a.is_private() && b.is_private());
        assert_eq!(a.users, b.users);
        assert_eq!(b.engine, PrivacyEngine::Affine);
    }

    #[test]
    fn engines_agree_on_a_leak() {
        let cfg = NetworkConfig::new(4, 3, 2, 4, 4).unwrap();
        let s = LiftedScheme::with_mode(CyclicUncodedScheme::new(cfg, 1).unwrap(), PrivateSetMode::NaiveLwcc).unwrap();
        let lib = SubfileLibrary::from_index(0b1100_1010, 2, 4, 1);
        let mut opts = PrivacyOptions {
            libraries: LibrarySet::Explicit(vec![lib]),
            engine: PrivacyEngine::Enumerate,
            ..PrivacyOptions::default()
        };
        let a = verify_privacy_exact(&s, &opts).unwrap();
        opts.engine = PrivacyEngine::Affine;
        let b = verify_privacy_exact(&s, &opts).unwrap();
        assert!(!a.is_private());
        for (x, y) in a.users.iter().zip(&b.users) {
            assert_eq!(x.verdict, y.verdict);
            assert_eq!(x.exact_zero, y.exact_zero);
            assert!((x.mutual_information_bits - y.mutual_information_bits).abs() < 1e-9);
        }
    }

    #[test]
    fn budget_refusal_reports_requirement() {
        let cfg = NetworkConfig::new(3, 2, 2, 3, 3).unwrap();
        let s = LiftedScheme::with_mode(Example1Scheme::new(cfg).unwrap(), PrivateSetMode::Oracle).unwrap();
        let opts = PrivacyOptions {
            budget: 1000,
            engine: PrivacyEngine::Enumerate,
            ..PrivacyOptions::default()
        };
        match verify_privacy_exact(&s, &opts) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert_eq!(required, 64 * 4096 * 8);
                assert_eq!(budget, 1000);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn other_columns_uniform_for_example1() {
        let cfg = example1_cfg();
        let s = LiftedScheme::with_mode(Example1Scheme::new(cfg).unwrap(), PrivateSetMode::Oracle).unwrap();
        for d in DemandVector::all(3, 2) {
            for k in 1..=3 {
                let r = check_other_columns_uniform(&s, k, &d).unwrap();
                assert!(r.uniform);
                assert_eq!(r.groups, 256);
            }
        }
    }

    #[test]
    fn other_columns_not_uniform_for_naive_keys() {
        let cfg = NetworkConfig::new(4, 3, 2, 4, 4).unwrap();
        let s = LiftedScheme::with_mode(CyclicUncodedScheme::new(cfg, 1).unwrap(), PrivateSetMode::NaiveLwcc).unwrap();
        let d = DemandVector::new(vec![1; 4], 4, 2).unwrap();
        // user 3 reads both key caches of user 1
        assert!(!check_other_columns_uniform(&s, 3, &d).unwrap().uniform);
    }

    #[test]
    fn user_view_layout() {
        let cfg = example1_cfg();
        let s = NonPrivateDeployment(Example1Scheme::new(cfg).unwrap());
        let lib = SubfileLibrary::from_index(0b101100, 2, 3, 1);
        let d = DemandVector::new(vec![1, 2, 2], 3, 2).unwrap();
        let p = s.place(&lib, &BitBlock::zeros(0)).unwrap();
        let tx = s.transmit(&lib, &BitBlock::zeros(0), &d).unwrap();
        let v = UserView::capture(&cfg, &p, &tx, &lib, &d, 3).unwrap();
        // caches 1 and 3 in ascending order: W_{1,1}, W_{2,1}, W_{1,3}, W_{2,3}
        assert_eq!(v.cache_bits.to_bit_string(), "0111");
        assert_eq!(v.transmission_bits.len(), 97);
        assert_eq!(v.to_bits().len(), 4 + 32 + 97 + 6);
    }
}
