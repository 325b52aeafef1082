use serde::Serialize;

use crate::error::{Error, Result};

/// Mutual information of an enumerated joint distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MutualInformation {
    pub bits: f64,
    /// Decided with integer arithmetic: the table factorizes as row × column
    /// marginals. When true, `bits` is exactly `0.0`.
    pub exact_zero: bool,
}

/// `I(A;B)` for a table of joint counts, rows indexed by `A` and columns by `B`.
pub fn mutual_information_exact(table: &[Vec<u64>]) -> Result<MutualInformation> {
    let cols = table.first().map(Vec::len).unwrap_or(0);
    if cols == 0 {
        return Err(Error::InvalidConfig("empty joint count table".into()));
    }
    if table.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidConfig("ragged joint count table".into()));
    }
    let row_sums: Vec<u128> = table.iter().map(|r| r.iter().map(|&c| c as u128).sum()).collect();
    let col_sums: Vec<u128> = (0..cols).map(|j| table.iter().map(|r| r[j] as u128).sum()).collect();
    let total: u128 = row_sums.iter().sum();
    if total == 0 {
        return Err(Error::InvalidConfig("joint count table has zero total".into()));
    }

    let exact_zero = table.iter().enumerate().all(|(i, r)| {
        r.iter()
            .enumerate()
            .all(|(j, &c)| c as u128 * total == row_sums[i] * col_sums[j])
    });
    if exact_zero {
        return Ok(MutualInformation { bits: 0.0, exact_zero });
    }

    let t = total as f64;
    let mut bits = 0.0;
    for (i, r) in table.iter().enumerate() {
        for (j, &c) in r.iter().enumerate() {
            if c > 0 {
                let c = c as f64;
                bits += c / t * (c * t / (row_sums[i] as f64 * col_sums[j] as f64)).log2();
            }
        }
    }
    Ok(MutualInformation {
        bits: bits.max(0.0),
        exact_zero,
    })
}
