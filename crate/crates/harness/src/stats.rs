//! Binomial proportion intervals.

/// Two-sided standard normal quantile at 99%.
pub const Z_99: f64 = 2.5758293035489004;

/// Wilson score interval for `hits` successes in `trials` at quantile `z`,
/// clamped to `[0, 1]` and widened if rounding would exclude the point estimate.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0 && hits <= trials);
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = ((center - half) / denom).max(0.0).min(p);
    let hi = ((center + half) / denom).min(1.0).max(p);
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        // references from an independent statistics package
        let (lo, hi) = wilson_interval(8, 10, 1.959963984540054);
        assert!(close(lo, 0.49016247153664183) && close(hi, 0.9433178485456247));
        let (lo, hi) = wilson_interval(3, 17, Z_99);
        assert!(close(lo, 0.04582970654468144) && close(hi, 0.48875679130677474));
        let (lo, hi) = wilson_interval(0, 1, Z_99);
        assert!(lo == 0.0 && close(hi, 0.8690224567198142));
        let (lo, hi) = wilson_interval(1, 1, Z_99);
        assert!(close(lo, 1.0 - 0.8690224567198142) && hi == 1.0);
    }

    #[test]
    fn symmetric_under_complement() {
        for (h, n) in [(3u64, 17u64), (0, 5), (40, 100)] {
            let (lo, hi) = wilson_interval(h, n, Z_99);
            let (clo, chi) = wilson_interval(n - h, n, Z_99);
            assert!((lo - (1.0 - chi)).abs() < 1e-12 && (hi - (1.0 - clo)).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn contains_point_estimate(n in 1u64..100_000, frac in 0.0f64..=1.0) {
            let h = ((n as f64) * frac).floor() as u64;
            let (lo, hi) = wilson_interval(h, n, Z_99);
            let p = h as f64 / n as f64;
            prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
            prop_assert!(lo < hi);
        }
    }
}
