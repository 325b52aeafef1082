//! Scheme selection by name and measured rate-memory points.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baseline::BaselineScheme;
use crate::deployment::{CachingScheme, NonPrivateDeployment};
use crate::error::{Error, Result};
use crate::lifting::{LiftedScheme, PrivateSetMode};
use crate::model::{DemandVector, NetworkConfig, Rational, SubfileLibrary};
use crate::schemes::{CyclicUncodedScheme, Example1Scheme, NonPrivateScheme};

pub type DynScheme = Box<dyn CachingScheme + Send + Sync>;
pub type DynBase = Box<dyn NonPrivateScheme + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseKind {
    CyclicUncoded,
    Example1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    NonPrivate(BaseKind),
    Baseline,
    Lifted(BaseKind),
}

impl BaseKind {
    fn as_str(self) -> &'static str {
        match self {
            BaseKind::CyclicUncoded => CyclicUncodedScheme::NAME,
            BaseKind::Example1 => Example1Scheme::NAME,
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            CyclicUncodedScheme::NAME => Some(BaseKind::CyclicUncoded),
            Example1Scheme::NAME => Some(BaseKind::Example1),
            _ => None,
        }
    }

    /// Subfiles per file used by the base scheme.
    fn subfiles(self, k: usize) -> usize {
        match self {
            BaseKind::CyclicUncoded => k,
            BaseKind::Example1 => 3,
        }
    }

    pub fn build(self, cfg: NetworkConfig, memory: Rational) -> Result<DynBase> {
        match self {
            BaseKind::CyclicUncoded => Ok(Box::new(CyclicUncodedScheme::with_memory(cfg, memory)?)),
            BaseKind::Example1 => {
                let s = Example1Scheme::new(cfg)?;
                if s.memory() != memory {
                    return Err(Error::MemoryRegime {
                        memory: memory.to_string(),
                        reason: format!("{} operates only at M = N/3 = {}", Example1Scheme::NAME, s.memory()),
                    });
                }
                Ok(Box::new(s))
            }
        }
    }

    fn memory_grid(self, k: usize, l: usize, n: usize) -> Vec<Rational> {
        match self {
            BaseKind::CyclicUncoded => (0..=k / l).map(|t| Rational::new((t * n) as i64, k as i64)).collect(),
            BaseKind::Example1 => vec![Rational::new(n as i64, 3)],
        }
    }
}

impl SchemeKind {
    pub const NAMES: [&'static str; 5] = [
        "baseline-private",
        "cyclic-uncoded",
        "example1",
        "lifted:cyclic-uncoded",
        "lifted:example1",
    ];

    pub fn is_private(self) -> bool {
        !matches!(self, SchemeKind::NonPrivate(_))
    }

    /// Whether the scheme can run on a `(K, L)` network at all.
    pub fn supports(self, k: usize, l: usize) -> bool {
        match self {
            SchemeKind::NonPrivate(BaseKind::Example1) | SchemeKind::Lifted(BaseKind::Example1) => k == 3 && l == 2,
            _ => true,
        }
    }

    fn subfiles(self, k: usize) -> usize {
        match self {
            SchemeKind::Baseline => 1,
            SchemeKind::NonPrivate(b) | SchemeKind::Lifted(b) => b.subfiles(k),
        }
    }

    /// Smallest file size the scheme accepts at this memory.
    pub fn minimal_file_bits(self, k: usize, n: usize, memory: Rational) -> usize {
        match self {
            SchemeKind::Baseline => BaselineScheme::minimal_file_bits(n, memory),
            other => other.subfiles(k),
        }
    }

    /// Default memory points; for lifted schemes these are base memories.
    pub fn memory_grid(self, k: usize, l: usize, n: usize) -> Vec<Rational> {
        match self {
            SchemeKind::Baseline => (0..=k).map(|j| Rational::new((j * n) as i64, (l * k) as i64)).collect(),
            SchemeKind::NonPrivate(b) | SchemeKind::Lifted(b) => b.memory_grid(k, l, n),
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeKind::NonPrivate(b) => f.write_str(b.as_str()),
            SchemeKind::Baseline => f.write_str(BaselineScheme::NAME),
            SchemeKind::Lifted(b) => write!(f, "lifted:{}", b.as_str()),
        }
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::Parse(format!("unknown scheme {s:?}; expected one of {}", SchemeKind::NAMES.join(", ")));
        if s == BaselineScheme::NAME {
            return Ok(SchemeKind::Baseline);
        }
        if let Some(base) = s.strip_prefix("lifted:") {
            return BaseKind::parse(base).map(SchemeKind::Lifted).ok_or_else(unknown);
        }
        BaseKind::parse(s).map(SchemeKind::NonPrivate).ok_or_else(unknown)
    }
}

/// A fully specified scheme instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeRequest {
    pub kind: SchemeKind,
    pub users: usize,
    pub access: usize,
    pub files: usize,
    /// Per-cache memory of the non-private or baseline scheme; for lifted
    /// schemes, the memory of the base.
    pub memory: Rational,
    /// Bits per file; `None` picks the smallest valid size.
    pub file_bits: Option<usize>,
    pub mode: PrivateSetMode,
}

impl SchemeRequest {
    pub fn config(&self) -> Result<NetworkConfig> {
        if !self.kind.supports(self.users, self.access) {
            return Err(Error::InvalidConfig(format!(
                "{} needs K=3, L=2, got K={} L={}",
                self.kind, self.users, self.access
            )));
        }
        let f = self
            .file_bits
            .unwrap_or_else(|| self.kind.minimal_file_bits(self.users, self.files, self.memory));
        NetworkConfig::new(self.users, self.access, self.files, f, self.kind.subfiles(self.users))
    }

    pub fn build_lifted(&self) -> Result<LiftedScheme<DynBase>> {
        let SchemeKind::Lifted(base) = self.kind else {
            return Err(Error::InvalidConfig(format!("{} is not a lifted scheme", self.kind)));
        };
        LiftedScheme::with_mode(base.build(self.config()?, self.memory)?, self.mode)
    }

    pub fn build(&self) -> Result<DynScheme> {
        let cfg = self.config()?;
        Ok(match self.kind {
            SchemeKind::Baseline => Box::new(BaselineScheme::new(cfg, self.memory)?),
            SchemeKind::NonPrivate(b) => Box::new(NonPrivateDeployment(b.build(cfg, self.memory)?)),
            SchemeKind::Lifted(_) => Box::new(self.build_lifted()?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TradeoffRow {
    pub scheme: String,
    #[serde(serialize_with = "ser_ratio")]
    pub memory: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub rate: Rational,
    pub q_overhead_bits: usize,
    /// Key shares per missing subfile; lifted schemes only.
    pub t: Option<usize>,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(r))
}

/// `p/q` in lowest terms, `p` for integers.
pub fn format_ratio(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_ratio(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => s.parse::<i64>().map(Rational::from_integer).map_err(|_| bad()),
    }
}

pub fn ratio_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Demand vectors used when measuring the payload: all of them when few,
/// otherwise the round-robin vector `d_k = <k>_N`.
fn probe_demands(cfg: &NetworkConfig) -> Vec<DemandVector> {
    if (cfg.files() as u128).pow(cfg.users() as u32) <= 4096 {
        DemandVector::all(cfg.users(), cfg.files()).collect()
    } else {
        let d = (1..=cfg.users()).map(|k| (k - 1) % cfg.files() + 1).collect();
        vec![DemandVector::new(d, cfg.users(), cfg.files()).expect("in range")]
    }
}

/// Measured per-cache memory and rate in file units, checked against the
/// scheme's declared values: every cache must store exactly `M·F` bits and
/// every probed payload must be `R·F` bits.
pub fn measure<S: CachingScheme + ?Sized>(scheme: &S, seed: u64) -> Result<(Rational, Rational, usize)> {
    let cfg = *scheme.config();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let library = SubfileLibrary::random(cfg.files(), cfg.subfiles_per_file(), cfg.subfile_bits(), &mut rng);
    let keys = scheme.draw_keys(seed);
    let f = cfg.file_bits() as i64;
    let placement = scheme.place(&library, &keys)?;
    let memory = Rational::new(placement.max_cache_bits() as i64, f);
    for (i, c) in placement.caches().iter().enumerate() {
        if Rational::new(c.stored_bits() as i64, f) != scheme.memory() {
            return Err(Error::Accounting(format!(
                "{}: cache {} stores {} bits, declared M·F = {}",
                scheme.name(),
                i + 1,
                c.stored_bits(),
                scheme.memory() * Rational::from_integer(f)
            )));
        }
    }
    let mut q_bits = 0;
    let mut rate = Rational::from_integer(0);
    for d in probe_demands(&cfg) {
        let tx = scheme.transmit(&library, &keys, &d)?;
        rate = Rational::new(tx.payload.len() as i64, f);
        if rate != scheme.rate() {
            return Err(Error::Accounting(format!(
                "{}: payload of {} bits for {:?}, declared R·F = {}",
                scheme.name(),
                tx.payload.len(),
                d.as_slice(),
                scheme.rate() * Rational::from_integer(f)
            )));
        }
        q_bits = tx.q_bits();
    }
    Ok((memory, rate, q_bits))
}

/// One measured trade-off point. Lifted points are also checked against their
/// base: `M̃ = M + t(1 - LM/N)` and equal rate.
pub fn tradeoff_point(req: &SchemeRequest, seed: u64) -> Result<TradeoffRow> {
    let scheme = req.build()?;
    let (memory, rate, q_bits) = measure(&scheme, seed)?;
    let t = match req.kind {
        SchemeKind::Lifted(base) => {
            let lifted = req.build_lifted()?;
            let base_req = SchemeRequest {
                kind: SchemeKind::NonPrivate(base),
                ..req.clone()
            };
            let (base_memory, base_rate, _) = measure(&base_req.build()?, seed)?;
            let cfg = scheme.config();
            let t = lifted.shares();
            let expected = base_memory
                + Rational::from_integer(t as i64)
                    * (Rational::from_integer(1)
                        - Rational::from_integer(cfg.access() as i64) * base_memory
                            / Rational::from_integer(cfg.files() as i64));
            if memory != expected || rate != base_rate {
                return Err(Error::Accounting(format!(
                    "{}: measured ({memory}, {rate}), base ({base_memory}, {base_rate}) predicts ({expected}, {base_rate})",
                    req.kind
                )));
            }
            Some(t)
        }
        _ => None,
    };
    Ok(TradeoffRow {
        scheme: req.kind.to_string(),
        memory,
        rate,
        q_overhead_bits: q_bits,
        t,
    })
}
