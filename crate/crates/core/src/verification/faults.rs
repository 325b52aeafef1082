use crate::bits::BitBlock;
use crate::deployment::{CachingScheme, Transmission};
use crate::error::{Error, Result};
use crate::model::{CacheContent, DemandVector, NetworkConfig, PlacementState, Rational, SubfileLibrary};

/// Wraps a scheme and flips bit 0 of the first coded block stored in `cache`.
#[derive(Debug, Clone)]
pub struct CorruptCodedBlock<S> {
    pub inner: S,
    pub cache: usize,
}

impl<S: CachingScheme> CachingScheme for CorruptCodedBlock<S> {
    fn name(&self) -> String {
        format!("{} (corrupted cache {})", self.inner.name(), self.cache)
    }

    fn config(&self) -> &NetworkConfig {
        self.inner.config()
    }

    fn memory(&self) -> Rational {
        self.inner.memory()
    }

    fn rate(&self) -> Rational {
        self.inner.rate()
    }

    fn key_bits(&self) -> usize {
        self.inner.key_bits()
    }

    fn key_linear(&self) -> bool {
        false
    }

    fn place(&self, library: &SubfileLibrary, keys: &BitBlock) -> Result<PlacementState> {
        let mut state = self.inner.place(library, keys)?;
        let block = state
            .cache_mut(self.cache)
            .coded
            .iter_mut()
            .find(|b| !b.block.is_empty())
            .ok_or_else(|| Error::InvalidConfig(format!("cache {} holds no coded block", self.cache)))?;
        block.block.flip(0);
        Ok(state)
    }

    fn transmit(&self, library: &SubfileLibrary, keys: &BitBlock, demands: &DemandVector) -> Result<Transmission> {
        self.inner.transmit(library, keys, demands)
    }

    fn decode(
        &self,
        user: usize,
        tx: &Transmission,
        caches: &[(usize, &CacheContent)],
        demand: usize,
    ) -> Result<BitBlock> {
        self.inner.decode(user, tx, caches, demand)
    }

    fn draw_keys(&self, seed: u64) -> BitBlock {
        self.inner.draw_keys(seed)
    }
}
