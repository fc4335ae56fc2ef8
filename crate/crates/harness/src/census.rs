//! Exhaustive censuses of `P_{d,K}` against the counting bound.

use num_bigint::BigUint;
use polyirr_core::bounds::{hilbert_count_bound, hilbert_count_bound_inflated};
use polyirr_core::factorlab::{census, family_size, CensusMode, CensusResult};
use serde::Serialize;

use crate::Result;

pub const CENSUS_CSV_HEADER: &str = "d,K,total,reducible,mode,runtime_ms";

#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub result: CensusResult,
    /// `(4K)^(d-2) (4K + 4 sum tau(k))`, defined for `d >= 2`.
    pub bound: Option<BigUint>,
    /// The bound times the `d - 1` degree splits, for diagnostics.
    pub inflated_bound: Option<BigUint>,
}

impl CensusReport {
    /// Whether the reducible count respects the bound, when one applies.
    pub fn within_bound(&self) -> Option<bool> {
        self.bound.as_ref().map(|b| self.result.reducible <= *b)
    }

    pub fn to_csv_line(&self) -> String {
        let r = &self.result;
        format!(
            "{},{},{},{},{},{}",
            r.d,
            r.k,
            r.total,
            r.reducible,
            r.mode.label(),
            r.runtime.as_millis()
        )
    }
}

pub fn census_csv(reports: &[CensusReport]) -> String {
    let mut out = String::from(CENSUS_CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

pub fn run_census(d: u64, k: u64, mode: CensusMode) -> Result<CensusReport> {
    let result = census(d as usize, k, mode)?;
    let (bound, inflated_bound) = if d >= 2 {
        (
            Some(hilbert_count_bound(d, k)?),
            Some(hilbert_count_bound_inflated(d, k)?),
        )
    } else {
        (None, None)
    };
    Ok(CensusReport {
        result,
        bound,
        inflated_bound,
    })
}

/// Every `(d, K)` with `d >= 2` and `|P_{d,K}| <= limit`, by degree then height.
pub fn feasible_pairs(limit: u64) -> Vec<(u64, u64)> {
    let limit = BigUint::from(limit);
    let mut out = Vec::new();
    for d in 2u64.. {
        let mut k = 1u64;
        while family_size(d as usize, k) <= limit {
            out.push((d, k));
            k += 1;
        }
        if k == 1 {
            break;
        }
    }
    out
}

pub fn census_sweep(limit: u64, mode: CensusMode) -> Result<Vec<CensusReport>> {
    feasible_pairs(limit)
        .into_iter()
        .map(|(d, k)| run_census(d, k, mode))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use polyirr_core::factorlab::{is_irreducible, member};
    use polyirr_core::IntPolynomial;

    #[test]
    fn examples() {
        let r = run_census(2, 2, CensusMode::Reducibility).unwrap();
        assert_eq!(r.result.reducible, 5u32.into());
        assert_eq!(r.bound, Some(20u32.into()));
        assert_eq!(r.within_bound(), Some(true));
        assert!(r.to_csv_line().starts_with("2,2,20,5,reducibility,"));

        let r = run_census(1, 5, CensusMode::Reducibility).unwrap();
        assert_eq!(r.result.reducible, 0u32.into());
        assert_eq!(r.within_bound(), None);

        let r = run_census(3, 1, CensusMode::Reducibility).unwrap();
        let scan = (0..18)
            .filter(|&i| !is_irreducible(&IntPolynomial::from_i64(&member(3, 1, i))).unwrap().0)
            .count();
        assert_eq!(r.result.reducible, BigUint::from(scan));
    }

    #[test]
    fn feasible_pairs_cover_the_limit() {
        let pairs = feasible_pairs(1000);
        assert!(pairs.contains(&(2, 15)) && !pairs.contains(&(2, 16)));
        assert!(pairs.contains(&(6, 1)) && !pairs.contains(&(7, 1)));
        for (d, k) in pairs {
            assert!(family_size(d as usize, k) <= 1000u32.into());
        }
    }

    #[test]
    fn csv_layout() {
        let reports = census_sweep(100, CensusMode::Reducibility).unwrap();
        let csv = census_csv(&reports);
        assert_eq!(csv.lines().next(), Some(CENSUS_CSV_HEADER));
        assert_eq!(csv.lines().count(), reports.len() + 1);
        assert!(reports.iter().all(|r| r.within_bound() == Some(true)));
    }
}
