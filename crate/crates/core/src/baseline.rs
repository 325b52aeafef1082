//! Private baseline: every user can decode every file, so nothing in the
//! broadcast depends on the demands.
//!
//! Each file is cut into `L` parts of `M·F/N` bits plus a remainder. Cache
//! `k` stores, per file, the combination of parts selected by row `k` of an
//! AIR matrix; any `L` cyclically consecutive rows are invertible, so each
//! user solves for all parts. The remainders of all files are broadcast.

use crate::bits::BitBlock;
use crate::deployment::{CachingScheme, Transmission};
use crate::error::{Error, Result};
use crate::gf2::{air_encode, build_air, gf2_solve_window, Gf2Matrix};
use crate::model::{
    CacheContent, CodedBlock, CodedLabel, DemandVector, NetworkConfig, PlacementState, Rational, SubfileLibrary,
};

#[derive(Debug, Clone)]
pub struct BaselineScheme {
    cfg: NetworkConfig,
    memory: Rational,
    air: Gf2Matrix,
    part_bits: usize,
}

impl BaselineScheme {
    pub const NAME: &'static str = "baseline-private";

    /// Requires `0 <= M <= N/L` and `M·F/N` integral.
    pub fn new(cfg: NetworkConfig, memory: Rational) -> Result<Self> {
        let (n, l) = (cfg.files() as i64, cfg.access() as i64);
        if memory < Rational::from_integer(0) || memory > Rational::new(n, l) {
            return Err(Error::MemoryRegime {
                memory: memory.to_string(),
                reason: format!("{} needs 0 <= M <= N/L = {}", Self::NAME, Rational::new(n, l)),
            });
        }
        let part = memory * Rational::from_integer(cfg.file_bits() as i64) / Rational::from_integer(n);
        if !part.is_integer() {
            return Err(Error::Sizing(format!(
                "M·F/N = {part} is not an integer number of bits (F={})",
                cfg.file_bits()
            )));
        }
        Ok(BaselineScheme {
            cfg,
            memory,
            air: build_air(cfg.users(), cfg.access())?,
            part_bits: *part.numer() as usize,
        })
    }

    /// Smallest `F` for which `M·F/N` is an integer.
    pub fn minimal_file_bits(files: usize, memory: Rational) -> usize {
        let ratio = memory / Rational::from_integer(files as i64);
        *ratio.denom() as usize
    }

    pub fn air_matrix(&self) -> &Gf2Matrix {
        &self.air
    }

    pub fn part_bits(&self) -> usize {
        self.part_bits
    }

    fn check_library(&self, library: &SubfileLibrary) -> Result<()> {
        if library.num_files() != self.cfg.files() || library.file_bits() != self.cfg.file_bits() {
            return Err(Error::Sizing(format!(
                "{} expects {} files of {} bits",
                Self::NAME,
                self.cfg.files(),
                self.cfg.file_bits()
            )));
        }
        Ok(())
    }

    fn remainder_bits(&self) -> usize {
        self.cfg.file_bits() - self.cfg.access() * self.part_bits
    }

    /// File `n` as seen by `user`: solve the window for the cached parts and
    /// append the broadcast remainder.
    pub fn decode_file(&self, user: usize, tx: &Transmission, caches: &[(usize, &CacheContent)], n: usize) -> Result<BitBlock> {
        self.cfg.check_user(user)?;
        if n == 0 || n > self.cfg.files() {
            return Err(Error::DemandOutOfRange {
                user,
                demand: n,
                files: self.cfg.files(),
            });
        }
        let expected = self.cfg.accessible_caches(user)?;
        if caches.iter().map(|(c, _)| *c).ne(expected.iter().copied()) {
            return Err(Error::Decode(format!("user {user} expects caches {expected:?}")));
        }
        let rhs = caches
            .iter()
            .map(|(c, content)| {
                content
                    .coded
                    .iter()
                    .find(|b| matches!(&b.label, CodedLabel::Air { file, .. } if *file == n))
                    .map(|b| b.block.clone())
                    .ok_or_else(|| Error::Decode(format!("cache {c} holds no coded block of file {n}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let parts = gf2_solve_window(&self.air, user, &rhs)?;
        let rem = self.remainder_bits();
        let tail = tx.payload.slice((n - 1) * rem, rem)?;
        let mut file = BitBlock::concat(&parts);
        file.extend(&tail);
        Ok(file)
    }
}

impl CachingScheme for BaselineScheme {
    fn name(&self) -> String {
        Self::NAME.into()
    }

    fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    fn memory(&self) -> Rational {
        self.memory
    }

    /// `N - L·M`.
    fn rate(&self) -> Rational {
        Rational::from_integer(self.cfg.files() as i64) - Rational::from_integer(self.cfg.access() as i64) * self.memory
    }

    fn place(&self, library: &SubfileLibrary, _keys: &BitBlock) -> Result<PlacementState> {
        self.check_library(library)?;
        let mut state = PlacementState::empty(self.cfg.users());
        for n in 1..=self.cfg.files() {
            let file = library.file(n);
            let parts = (0..self.cfg.access())
                .map(|p| file.slice(p * self.part_bits, self.part_bits))
                .collect::<Result<Vec<_>>>()?;
            for (k, block) in air_encode(&self.air, &parts)?.into_iter().enumerate() {
                let row = k + 1;
                let label = CodedLabel::Air {
                    file: n,
                    parts: (1..=self.cfg.access()).filter(|&p| self.air.get(row, p)).collect(),
                };
                state.cache_mut(row).coded.push(CodedBlock { label, block });
            }
        }
        Ok(state)
    }

    fn transmit(&self, library: &SubfileLibrary, _keys: &BitBlock, demands: &DemandVector) -> Result<Transmission> {
        self.check_library(library)?;
        demands.check_files(self.cfg.files())?;
        let start = self.cfg.access() * self.part_bits;
        let mut payload = BitBlock::zeros(0);
        for n in 1..=self.cfg.files() {
            payload.extend(&library.file(n).slice(start, self.remainder_bits())?);
        }
        Ok(Transmission {
            public_demands: None,
            q: Vec::new(),
            payload,
        })
    }

    fn decode(&self, user: usize, tx: &Transmission, caches: &[(usize, &CacheContent)], demand: usize) -> Result<BitBlock> {
        self.decode_file(user, tx, caches, demand)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn memory_range_and_sizing() {
        let cfg = NetworkConfig::new(4, 2, 2, 4, 1).unwrap();
        assert!(BaselineScheme::new(cfg, r(1, 1)).is_ok());
        assert!(BaselineScheme::new(cfg, r(3, 2)).is_err());
        assert!(BaselineScheme::new(cfg, r(-1, 2)).is_err());
        // M·F/N = 3/8·4/2 is fractional
        assert!(matches!(BaselineScheme::new(cfg, r(3, 8)), Err(Error::Sizing(_))));
        assert_eq!(BaselineScheme::minimal_file_bits(2, r(3, 8)), 16);
        assert_eq!(BaselineScheme::minimal_file_bits(3, r(0, 1)), 1);
    }

    #[test]
    fn rate_is_n_minus_lm() {
        let cfg = NetworkConfig::new(5, 2, 3, 6, 1).unwrap();
        let s = BaselineScheme::new(cfg, r(1, 2)).unwrap();
        assert_eq!(s.rate(), r(2, 1));
        let lib = SubfileLibrary::zeros(3, 1, 6);
        let tx = s
            .transmit(&lib, &BitBlock::zeros(0), &DemandVector::new(vec![1; 5], 5, 3).unwrap())
            .unwrap();
        assert_eq!(tx.payload.len(), 12);
        let placement = s.place(&lib, &BitBlock::zeros(0)).unwrap();
        assert!(placement.caches().iter().all(|c| c.stored_bits() == 3));
    }

    #[test]
    fn every_user_recovers_every_file() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (k, l) in [(3, 2), (4, 2), (5, 3), (6, 4), (7, 5)] {
            let cfg = NetworkConfig::new(k, l, 3, 2 * l + 3, 1).unwrap();
            let s = BaselineScheme::new(cfg, r(6, 2 * l as i64 + 3)).unwrap();
            assert_eq!(s.part_bits(), 2);
            let lib = SubfileLibrary::random(3, 1, 2 * l + 3, &mut rng);
            let keys = BitBlock::zeros(0);
            let placement = s.place(&lib, &keys).unwrap();
            let tx = s.transmit(&lib, &keys, &DemandVector::new(vec![1; k], k, 3).unwrap()).unwrap();
            for u in 1..=k {
                let caches = placement.accessible(&cfg, u).unwrap();
                for n in 1..=3 {
                    assert_eq!(s.decode_file(u, &tx, &caches, n).unwrap(), lib.file(n), "K={k} L={l}");
                }
            }
        }
    }

    #[test]
    fn transmission_ignores_demands() {
        let cfg = NetworkConfig::new(3, 2, 2, 4, 1).unwrap();
        let s = BaselineScheme::new(cfg, r(1, 2)).unwrap();
        let lib = SubfileLibrary::from_index(0xa5, 2, 1, 4);
        let keys = BitBlock::zeros(0);
        let txs: Vec<_> = DemandVector::all(3, 2)
            .map(|d| s.transmit(&lib, &keys, &d).unwrap())
            .collect();
        assert!(txs.windows(2).all(|w| w[0] == w[1]));
    }
}
