//! Catalog of eligible EP partitionings `K = M_1 + ... + M_L`, all parts >= 2.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::jordan::PartitionSpec;

pub const MAX_K: usize = 200;
/// Largest `K` whose catalog is materialized (about 134k entries at 60).
pub const MAX_ENUMERATE_K: usize = 70;

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionCatalog {
    pub k: usize,
    /// Lexicographically decreasing; the single-block entry `(K)` first.
    pub entries: Vec<PartitionSpec>,
    pub n_nontrivial: u64,
}

/// JSON shape emitted by the `partitions` subcommand.
#[derive(Debug, Serialize)]
pub struct CatalogJson {
    #[serde(rename = "K")]
    pub k: usize,
    pub partitions: Vec<Vec<usize>>,
    pub nontrivial: u64,
}

impl From<&PartitionCatalog> for CatalogJson {
    fn from(c: &PartitionCatalog) -> Self {
        Self {
            k: c.k,
            partitions: c.entries.iter().map(|p| p.parts().to_vec()).collect(),
            nontrivial: c.n_nontrivial,
        }
    }
}

fn check_k(k: usize) -> Result<()> {
    if !(2..=MAX_K).contains(&k) {
        return Err(invalid(format!("K must lie in 2..={MAX_K}, got {k}")));
    }
    Ok(())
}

fn descend(
    remaining: usize,
    max_part: usize,
    prefix: &mut Vec<usize>,
    out: &mut Vec<PartitionSpec>,
) {
    if remaining == 0 {
        out.push(
            PartitionSpec::new(prefix.clone()).expect("descending parts form a valid partition"),
        );
        return;
    }
    for part in (2..=max_part.min(remaining)).rev() {
        // A remainder of exactly one can never be completed.
        if remaining - part == 1 {
            continue;
        }
        prefix.push(part);
        descend(remaining - part, part, prefix, out);
        prefix.pop();
    }
}

/// Every partition of `k` into non-increasing parts >= 2, exactly once.
pub fn enumerate_ep_partitions(k: usize) -> Result<PartitionCatalog> {
    check_k(k)?;
    if k > MAX_ENUMERATE_K {
        return Err(invalid(format!(
            "catalog for K={k} is too large to materialize (limit {MAX_ENUMERATE_K}); use count_nontrivial"
        )));
    }
    let mut entries = Vec::new();
    descend(k, k, &mut Vec::new(), &mut entries);
    let n_nontrivial = entries.iter().filter(|p| p.l() >= 2).count() as u64;
    Ok(PartitionCatalog {
        k,
        entries,
        n_nontrivial,
    })
}

/// Number of partitions of `n` into parts drawn from `min..=max`.
fn count_restricted(n: usize, min: usize) -> u64 {
    // ways[s] over parts processed in increasing order (standard coin DP).
    let mut ways = vec![0u64; n + 1];
    ways[0] = 1;
    for part in min..=n {
        for s in part..=n {
            ways[s] += ways[s - part];
        }
    }
    ways[n]
}

/// Count of catalog entries with `L >= 2`.
pub fn count_nontrivial(k: usize) -> Result<u64> {
    check_k(k)?;
    Ok(count_restricted(k, 2) - 1)
}

/// Unrestricted partition numbers `p(0..=n)` by Euler's pentagonal recurrence.
pub fn partition_numbers(n: usize) -> Vec<u64> {
    let mut p = vec![0i128; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let mut acc = 0i128;
        for j in 1.. {
            let g1 = j * (3 * j - 1) / 2;
            if g1 > m {
                break;
            }
            let sign = if j % 2 == 1 { 1 } else { -1 };
            acc += sign * p[m - g1];
            let g2 = j * (3 * j + 1) / 2;
            if g2 <= m {
                acc += sign * p[m - g2];
            }
        }
        p[m] = acc;
    }
    p.into_iter().map(|x| x as u64).collect()
}

/// Independent route: `p(K) - p(K-1) - 1`.
pub fn count_oracle(k: usize) -> Result<u64> {
    check_k(k)?;
    let p = partition_numbers(k);
    Ok(p[k] - p[k - 1] - 1)
}
