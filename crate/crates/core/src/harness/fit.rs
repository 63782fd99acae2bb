//! Least-squares fit of `log p` against `log n`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Fits `ln p = a + b ln n` over the points with `p > 0`. Needs at least
/// three such points with two distinct `n`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerFit> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, p)| *p > 0.0 && *n > 0.0 && p.is_finite())
        .map(|(n, p)| (n.ln(), p.ln()))
        .collect();
    if xy.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} usable points, need at least 3",
            xy.len()
        )));
    }
    let m = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / m;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData("all sizes equal".into()));
    }
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xy.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let slope_stderr = (rss / (m - 2.0) / sxx).sqrt();
    Ok(PowerFit { slope, slope_stderr, intercept, points: xy.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = [4.0, 8.0, 16.0, 32.0].iter().map(|&n: &f64| (n, 3.0 * n.powf(-0.5))).collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.slope_stderr < 1e-10);
    }

    #[test]
    fn inverse_law_and_noise() {
        let pts: Vec<_> = [2.0, 4.0, 8.0].iter().map(|&n: &f64| (n, 3.0 / n)).collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12 && (f.intercept - 3f64.ln()).abs() < 1e-12);

        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let pts: Vec<_> = [4.0, 8.0, 16.0, 32.0, 64.0]
            .iter()
            .map(|&n: &f64| (n, n.powf(-0.5) * rng.gen_range(0.9..=1.1)))
            .collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.slope + 0.5).abs() <= 0.15, "{}", f.slope);
    }

    #[test]
    fn zero_estimates_are_dropped() {
        let pts = [(4.0, 0.5), (8.0, 0.0), (16.0, 0.2), (32.0, 0.1)];
        assert_eq!(fit_power_law(&pts).unwrap().points, 3);
        assert!(matches!(fit_power_law(&pts[..3]), Err(Error::InsufficientData(_))));
    }
}
