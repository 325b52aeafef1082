use std::collections::BTreeSet;

use crate::bits::BitBlock;
use crate::error::{Error, Result};
use crate::model::{mod_index, DemandVector, NetworkConfig, Rational, SubfileLibrary};

use super::{cached_subfile, check_library, CachedSubfiles, Delivery, NonPrivateScheme};

/// The `K = 3, L = 2` scheme with `M = N/3`: cache `j` holds `W_{n,j}` and the
/// server sends the single block `W_{d1,3} ⊕ W_{d2,1} ⊕ W_{d3,2}`.
#[derive(Debug, Clone)]
pub struct Example1Scheme {
    cfg: NetworkConfig,
}

impl Example1Scheme {
    pub const NAME: &'static str = "example1";

    pub fn new(cfg: NetworkConfig) -> Result<Self> {
        if cfg.users() != 3 || cfg.access() != 2 || cfg.subfiles_per_file() != 3 {
            return Err(Error::InvalidConfig(format!(
                "{} needs K=3, L=2 and 3 subfiles per file",
                Self::NAME
            )));
        }
        Ok(Example1Scheme { cfg })
    }

    /// The subfile user `k` cannot read: `<k+2>_3`.
    fn missing(k: usize) -> usize {
        mod_index(k as i64 + 2, 3)
    }
}

impl NonPrivateScheme for Example1Scheme {
    fn name(&self) -> String {
        Self::NAME.into()
    }

    fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    fn memory(&self) -> Rational {
        Rational::new(self.cfg.files() as i64, 3)
    }

    fn rate(&self) -> Rational {
        Rational::new(1, 3)
    }

    fn placement_map(&self) -> Vec<BTreeSet<usize>> {
        (1..=3).map(|j| BTreeSet::from([j])).collect()
    }

    fn deliver(&self, library: &SubfileLibrary, demands: &DemandVector) -> Result<Delivery> {
        check_library(self, library)?;
        demands.check_files(library.num_files())?;
        let mut payload = BitBlock::zeros(library.subfile_bits());
        for k in 1..=3 {
            payload ^= library.subfile(demands.get(k), Self::missing(k));
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
        let mut own = payload.clone();
        for other in (1..=3).filter(|&u| u != user) {
            own.try_xor_assign(cached_subfile(cached, demands.get(other), Self::missing(other))?)?;
        }
        let want = demands.get(user);
        (1..=3)
            .map(|j| {
                if j == Self::missing(user) {
                    Ok(own.clone())
                } else {
                    cached_subfile(cached, want, j).cloned()
                }
            })
            .collect()
    }
}
