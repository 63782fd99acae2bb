//! Binomial confidence intervals.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;
/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.5758293035489004;

/// Wilson score interval for `successes` out of `trials`, clamped to `[0, 1]`.
/// Returns `(0, 1)` when `trials == 0`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_values() {
        // 0/10 at 95%: upper = z²/(n+z²)
        let (lo, hi) = wilson_interval(0, 10, Z95);
        assert_eq!(lo, 0.0);
        assert!((hi - Z95 * Z95 / (10.0 + Z95 * Z95)).abs() < 1e-12);
        let (lo, hi) = wilson_interval(50, 100, Z95);
        assert!((lo - 0.4038315303659956).abs() < 1e-9, "{lo}");
        assert!((hi - 0.5961684696340044).abs() < 1e-9, "{hi}");
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
    }

    proptest! {
        #[test]
        fn contains_estimate_and_nests(k in 0u64..500, extra in 0u64..500) {
            let n = k + extra + 1;
            let p = k as f64 / n as f64;
            let (l95, h95) = wilson_interval(k, n, Z95);
            let (l99, h99) = wilson_interval(k, n, Z99);
            prop_assert!(0.0 <= l99 && l99 <= l95 && l95 <= p + 1e-12);
            prop_assert!(p - 1e-12 <= h95 && h95 <= h99 && h99 <= 1.0);
        }
    }
}
