use serde::Serialize;

use crate::deployment::CachingScheme;
use crate::error::{Error, Result};
use crate::model::{DemandVector, SubfileLibrary};

/// Largest `N^K` swept without an explicit override.
pub const MAX_DEMAND_VECTORS: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeFailure {
    /// Key seed, absent for deterministic schemes.
    pub seed: Option<u64>,
    pub demands: Vec<usize>,
    pub user: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodabilityReport {
    pub scheme: String,
    pub passed: bool,
    pub demand_vectors: u64,
    pub seeds: Vec<u64>,
    /// Number of (seed, demand vector, user) decodes performed.
    pub checks: u64,
    pub failure: Option<DecodeFailure>,
}

/// Every user decodes its demanded file for every demand vector in `[N]^K`,
/// once per seed (once in total when the scheme draws no keys). Stops at the
/// first failure.
pub fn verify_decodability<S: CachingScheme + ?Sized>(
    scheme: &S,
    library: &SubfileLibrary,
    seeds: &[u64],
) -> Result<DecodabilityReport> {
    let cfg = *scheme.config();
    let vectors = (cfg.files() as u128).saturating_pow(cfg.users() as u32);
    if vectors > MAX_DEMAND_VECTORS {
        return Err(Error::BudgetExceeded {
            required: vectors,
            budget: MAX_DEMAND_VECTORS,
        });
    }
    let runs: Vec<Option<u64>> = if scheme.key_bits() == 0 {
        vec![None]
    } else if seeds.is_empty() {
        return Err(Error::InvalidConfig("randomized scheme needs at least one seed".into()));
    } else {
        seeds.iter().copied().map(Some).collect()
    };

    let mut report = DecodabilityReport {
        scheme: scheme.name(),
        passed: true,
        demand_vectors: vectors as u64,
        seeds: runs.iter().flatten().copied().collect(),
        checks: 0,
        failure: None,
    };
    for seed in runs {
        let keys = scheme.draw_keys(seed.unwrap_or(0));
        let placement = scheme.place(library, &keys)?;
        for d in DemandVector::all(cfg.users(), cfg.files()) {
            let tx = scheme.transmit(library, &keys, &d)?;
            for user in 1..=cfg.users() {
                report.checks += 1;
                let caches = placement.accessible(&cfg, user)?;
                let reason = match scheme.decode(user, &tx, &caches, d.get(user)) {
                    Ok(bits) if bits == library.file(d.get(user)) => continue,
                    Ok(_) => "decoded bits differ from the demanded file".to_string(),
                    Err(e) => e.to_string(),
                };
                report.passed = false;
                report.failure = Some(DecodeFailure {
                    seed,
                    demands: d.as_slice().to_vec(),
                    user,
                    reason,
                });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deployment::NonPrivateDeployment;
    use crate::model::NetworkConfig;
    use crate::schemes::Example1Scheme;

    #[test]
    fn refuses_large_sweeps() {
        let cfg = NetworkConfig::new(3, 2, 200, 3, 3).unwrap();
        let s = NonPrivateDeployment(Example1Scheme::new(cfg).unwrap());
        let lib = SubfileLibrary::zeros(200, 3, 1);
        assert!(matches!(
            verify_decodability(&s, &lib, &[1]),
            Err(Error::BudgetExceeded { required: 8_000_000, .. })
        ));
    }

    #[test]
    fn deterministic_scheme_runs_once() {
        let cfg = NetworkConfig::new(3, 2, 3, 3, 3).unwrap();
        let s = NonPrivateDeployment(Example1Scheme::new(cfg).unwrap());
        let lib = SubfileLibrary::from_index(0x1f2e3, 3, 3, 1);
        let r = verify_decodability(&s, &lib, &[1, 2, 3]).unwrap();
        assert!(r.passed);
        assert!(r.seeds.is_empty());
        assert_eq!((r.demand_vectors, r.checks), (27, 81));
    }
}
