use std::collections::BTreeSet;

use crate::bits::BitBlock;
use crate::error::{Error, Result};
use crate::model::{mod_index, DemandVector, NetworkConfig, Rational, SubfileLibrary};

use super::{cached_subfile, check_library, CachedSubfiles, Delivery, NonPrivateScheme};

/// Files split into `K` subfiles; cache `k` stores indices `<k>, <k+L>, ...`
/// (the first `t` of them), and the server unicasts every missing subfile.
///
/// Stride-`L` spacing keeps the `L` caches of any user disjoint. Payload
/// layout is user-major, then ascending subfile index.
#[derive(Debug, Clone)]
pub struct CyclicUncodedScheme {
    cfg: NetworkConfig,
    t: usize,
}

impl CyclicUncodedScheme {
    pub const NAME: &'static str = "cyclic-uncoded";

    /// `t` subfiles per file in each cache, `0 <= t <= ⌊K/L⌋`.
    pub fn new(cfg: NetworkConfig, t: usize) -> Result<Self> {
        if cfg.subfiles_per_file() != cfg.users() {
            return Err(Error::InvalidConfig(format!(
                "{} splits files into K={} subfiles, config has {}",
                Self::NAME,
                cfg.users(),
                cfg.subfiles_per_file()
            )));
        }
        let max = cfg.users() / cfg.access();
        if t > max {
            return Err(Error::MemoryRegime {
                memory: Rational::new((t * cfg.files()) as i64, cfg.users() as i64).to_string(),
                reason: format!("placement count {t} exceeds ⌊K/L⌋ = {max}"),
            });
        }
        Ok(CyclicUncodedScheme { cfg, t })
    }

    /// Scheme with `M = t·N/K`; other memory values are outside the regime.
    pub fn with_memory(cfg: NetworkConfig, memory: Rational) -> Result<Self> {
        let t = memory * Rational::new(cfg.users() as i64, cfg.files() as i64);
        if !t.is_integer() || *t.numer() < 0 {
            return Err(Error::MemoryRegime {
                memory: memory.to_string(),
                reason: format!("{} needs M = t·N/K for integer t", Self::NAME),
            });
        }
        Self::new(cfg, *t.numer() as usize)
    }

    pub fn placements_per_cache(&self) -> usize {
        self.t
    }

    fn missing_count(&self) -> usize {
        self.cfg.users() - self.cfg.access() * self.t
    }
}

impl NonPrivateScheme for CyclicUncodedScheme {
    fn name(&self) -> String {
        Self::NAME.into()
    }

    fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    fn memory(&self) -> Rational {
        Rational::new((self.t * self.cfg.files()) as i64, self.cfg.users() as i64)
    }

    /// `K(1 - LM/N)`.
    fn rate(&self) -> Rational {
        let k = self.cfg.users() as i64;
        let lm_over_n = Rational::from_integer(self.cfg.access() as i64) * self.memory()
            / Rational::from_integer(self.cfg.files() as i64);
        Rational::from_integer(k) * (Rational::from_integer(1) - lm_over_n)
    }

    fn placement_map(&self) -> Vec<BTreeSet<usize>> {
        let (k, l) = (self.cfg.users(), self.cfg.access());
        (1..=k)
            .map(|c| (0..self.t).map(|i| mod_index((c + i * l) as i64, k)).collect())
            .collect()
    }

    fn deliver(&self, library: &SubfileLibrary, demands: &DemandVector) -> Result<Delivery> {
        check_library(self, library)?;
        demands.check_files(library.num_files())?;
        let mut payload = BitBlock::zeros(0);
        for user in 1..=self.cfg.users() {
            for j in self.missing_subfiles(user)? {
                payload.extend(library.subfile(demands.get(user), j));
            }
        }
        Ok(Delivery {
            payload,
            rate: self.rate(),
        })
    }

    fn decode(
        &self,
        user: usize,
        payload: &BitBlock,
        cached: &CachedSubfiles,
        demands: &DemandVector,
    ) -> Result<Vec<BitBlock>> {
        self.cfg.check_user(user)?;
        let bits = self.cfg.subfile_bits();
        let want = demands.get(user);
        let missing = self.missing_subfiles(user)?;
        let expected = self.cfg.users() * self.missing_count() * bits;
        if payload.len() != expected {
            return Err(Error::Decode(format!(
                "payload has {} bits, expected {expected}",
                payload.len()
            )));
        }
        let mut offset = (user - 1) * self.missing_count() * bits;
        (1..=self.cfg.subfiles_per_file())
            .map(|j| {
                if missing.contains(&j) {
                    let s = payload.slice(offset, bits)?;
                    offset += bits;
                    Ok(s)
                } else {
                    cached_subfile(cached, want, j).cloned()
                }
            })
            .collect()
    }
}
