//! End-to-end view of a scheme: keys, placement, one transmission and
//! per-user decoding. Verification and experiments work against this trait.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::BitBlock;
use crate::error::{Error, Result};
use crate::gf2::Gf2Vector;
use crate::model::{CacheContent, DemandVector, NetworkConfig, PlacementState, Rational, SubfileLibrary};
use crate::schemes::{collect_uncoded, uncoded_placement, NonPrivateScheme};

/// Everything the server broadcasts for one demand vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    /// Demands in the clear, sent only by non-private schemes.
    pub public_demands: Option<DemandVector>,
    /// Per-user masked demand vectors `q_1..q_K`; empty when unused.
    pub q: Vec<Gf2Vector>,
    pub payload: BitBlock,
}

impl Transmission {
    pub fn q_bits(&self) -> usize {
        self.q.iter().map(Gf2Vector::len).sum()
    }

    /// Canonical serialization: demands (32 bits each), then `q_1..q_K`, then the payload.
    pub fn append_bits(&self, out: &mut BitBlock) {
        if let Some(d) = &self.public_demands {
            for &x in d.as_slice() {
                out.extend(&BitBlock::from_u64(x as u64, 32));
            }
        }
        for q in &self.q {
            out.extend(q.bits());
        }
        out.extend(&self.payload);
    }
}

pub trait CachingScheme {
    fn name(&self) -> String;

    /// Network and library shape; libraries passed in must match it.
    fn config(&self) -> &NetworkConfig;

    /// Declared per-cache memory in file units.
    fn memory(&self) -> Rational;

    /// Declared rate in file units, excluding any demand-vector overhead.
    fn rate(&self) -> Rational;

    /// Length of the secret key drawn at placement time; 0 for deterministic schemes.
    fn key_bits(&self) -> usize {
        0
    }

    /// Whether caches and transmission are affine in the key bits for a fixed
    /// library and demand vector.
    fn key_linear(&self) -> bool {
        true
    }

    fn place(&self, library: &SubfileLibrary, keys: &BitBlock) -> Result<PlacementState>;

    fn transmit(&self, library: &SubfileLibrary, keys: &BitBlock, demands: &DemandVector) -> Result<Transmission>;

    /// File `demand` reconstructed by `user` from the broadcast and its caches
    /// (given in access order).
    fn decode(
        &self,
        user: usize,
        tx: &Transmission,
        caches: &[(usize, &CacheContent)],
        demand: usize,
    ) -> Result<BitBlock>;

    /// Key bits drawn from a ChaCha8 stream seeded with `seed`.
    fn draw_keys(&self, seed: u64) -> BitBlock {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BitBlock::random(self.key_bits(), &mut rng)
    }
}

impl<T: CachingScheme + ?Sized> CachingScheme for Box<T> {
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
    fn key_bits(&self) -> usize {
        (**self).key_bits()
    }
    fn key_linear(&self) -> bool {
        (**self).key_linear()
    }
    fn place(&self, library: &SubfileLibrary, keys: &BitBlock) -> Result<PlacementState> {
        (**self).place(library, keys)
    }
    fn transmit(&self, library: &SubfileLibrary, keys: &BitBlock, demands: &DemandVector) -> Result<Transmission> {
        (**self).transmit(library, keys, demands)
    }
    fn decode(
        &self,
        user: usize,
        tx: &Transmission,
        caches: &[(usize, &CacheContent)],
        demand: usize,
    ) -> Result<BitBlock> {
        (**self).decode(user, tx, caches, demand)
    }
    fn draw_keys(&self, seed: u64) -> BitBlock {
        (**self).draw_keys(seed)
    }
}

/// Runs a non-private scheme as-is, broadcasting the demand vector in the clear.
#[derive(Debug, Clone)]
pub struct NonPrivateDeployment<S>(pub S);

impl<S: NonPrivateScheme> CachingScheme for NonPrivateDeployment<S> {
    fn name(&self) -> String {
        self.0.name()
    }

    fn config(&self) -> &NetworkConfig {
        self.0.config()
    }

    fn memory(&self) -> Rational {
        self.0.memory()
    }

    fn rate(&self) -> Rational {
        self.0.rate()
    }

    fn place(&self, library: &SubfileLibrary, _keys: &BitBlock) -> Result<PlacementState> {
        uncoded_placement(&self.0, library)
    }

    fn transmit(&self, library: &SubfileLibrary, _keys: &BitBlock, demands: &DemandVector) -> Result<Transmission> {
        let delivery = self.0.deliver(library, demands)?;
        Ok(Transmission {
            public_demands: Some(demands.clone()),
            q: Vec::new(),
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
        let demands = tx
            .public_demands
            .as_ref()
            .ok_or_else(|| Error::Decode("transmission carries no demand vector".into()))?;
        if demands.get(user) != demand {
            return Err(Error::Decode(format!(
                "user {user} wants file {demand}, broadcast lists {}",
                demands.get(user)
            )));
        }
        let cached = collect_uncoded(caches.iter().map(|(_, c)| *c));
        let subfiles = self.0.decode(user, &tx.payload, &cached, demands)?;
        Ok(BitBlock::concat(&subfiles))
    }
}
