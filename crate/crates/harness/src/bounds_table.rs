//! Closed-form bounds tabulated over `(d, K)` grids.

use num_bigint::BigUint;
use polyirr_core::bounds::{envelope, hilbert_count_bound, m0, m1, regime_check, BoundConstants, Envelope};

use crate::Result;

pub const BOUNDS_CSV_HEADER: &str = "d,K,m0,m1,sqrtKd,invK,noncyc,hilbert_bound,regime_flags";

/// Exact below 40 digits, otherwise six significant digits in scientific form.
pub fn format_big(n: &BigUint) -> String {
    let s = n.to_string();
    if s.len() < 40 {
        return s;
    }
    format!("{}.{}e{}", &s[..1], &s[1..6], s.len() - 1)
}

/// Names of the regime hypotheses that hold, joined by `;`, or `none`.
pub fn regime_flags(d: u64, k: u64, constants: &BoundConstants) -> String {
    let r = regime_check(d, k, None, constants);
    let flags: Vec<&str> = [
        ("main_part1", r.main_part1),
        ("main_part2", r.main_part2),
        ("main2_part1", r.main2_part1),
        ("main2_part2", r.main2_part2),
        ("hilbert_statement", r.hilbert_statement),
        ("hilbert_proof", r.hilbert_proof),
        ("noncyc_dominated", r.noncyc_dominated),
    ]
    .into_iter()
    .filter_map(|(name, on)| on.then_some(name))
    .collect();
    if flags.is_empty() {
        "none".into()
    } else {
        flags.join(";")
    }
}

pub fn bounds_row(d: u64, k: u64, constants: &BoundConstants) -> Result<String> {
    let hilbert = if d >= 2 {
        format_big(&hilbert_count_bound(d, k)?)
    } else {
        String::new()
    };
    Ok(format!(
        "{},{},{},{},{},{},{},{},{}",
        d,
        k,
        m0(d),
        m1(d, k),
        envelope(d, k, Envelope::SqrtKd, constants),
        envelope(d, k, Envelope::InvK, constants),
        envelope(d, k, Envelope::Noncyc, constants),
        hilbert,
        regime_flags(d, k, constants)
    ))
}

pub fn bounds_table(ds: &[u64], ks: &[u64], constants: &BoundConstants) -> Result<String> {
    let mut out = String::from(BOUNDS_CSV_HEADER);
    out.push('\n');
    for &d in ds {
        for &k in ks {
            out.push_str(&bounds_row(d, k, constants)?);
            out.push('\n');
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let c = BoundConstants::default();
        let t = bounds_table(&[2, 100], &[1, 2], &c).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("2,1,"));
        // (4K)^0 (4K + 4 tau(1)) = 8
        assert_eq!(lines[1].split(',').nth(7), Some("8"));
        let row = bounds_row(100, 1, &c).unwrap();
        assert_eq!(row.split(',').nth(4), Some("0.1"));
        assert_eq!(row.split(',').count(), 9);
    }

    #[test]
    fn big_numbers_are_abbreviated() {
        assert_eq!(format_big(&BigUint::from(12345u32)), "12345");
        let big = BigUint::from(10u32).pow(50) * 3u32;
        assert_eq!(format_big(&big), "3.00000e50");
    }
}
