//! Small statistics helpers: least squares, binomial errors.

use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// Two-sided p-value of the t-test for `slope = 0`.
    pub p_value: f64,
    pub residuals: Vec<f64>,
}

impl LinearFit {
    /// One-sided p-value for the alternative `slope < 0`.
    pub fn p_value_negative(&self) -> f64 {
        let n = self.residuals.len();
        if n < 3 || self.slope_stderr == 0.0 {
            return if self.slope < 0.0 { 0.0 } else { 1.0 };
        }
        let t = StudentsT::new(0.0, 1.0, (n - 2) as f64).unwrap();
        t.cdf(self.slope / self.slope_stderr)
    }
}

/// Ordinary least squares `y = a + b x`. Needs at least two distinct `x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y - intercept - slope * x).collect();
    let (slope_stderr, p_value) = if n > 2 {
        let s2 = residuals.iter().map(|r| r * r).sum::<f64>() / (nf - 2.0);
        let se = (s2 / sxx).sqrt();
        let p = if se == 0.0 {
            0.0
        } else {
            let t = StudentsT::new(0.0, 1.0, nf - 2.0).unwrap();
            2.0 * (1.0 - t.cdf((slope / se).abs()))
        };
        (se, p)
    } else {
        (0.0, f64::NAN)
    };
    Some(LinearFit { slope, intercept, slope_stderr, p_value, residuals })
}

/// Standard error of a binomial frequency.
pub fn binomial_stderr(p: f64, trials: usize) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Wilson score interval at `z` standard deviations.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Logarithmically spaced grid from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && points >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect();
    g[0] = lo;
    g[points - 1] = hi;
    g
}

/// `ln y = ln A - ν x^κ`, with `κ` chosen on a grid over `[0.05, 2]` and
/// `(ln A, ν)` by least squares at each `κ`.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StretchedFit {
    pub nu: f64,
    pub kappa: f64,
    pub log_amplitude: f64,
    pub sse: f64,
}

/// Fits `log_ys ≈ ln A - ν xs^κ`. Needs three points with positive `x`.
pub fn fit_stretched_exponential(xs: &[f64], log_ys: &[f64]) -> Option<StretchedFit> {
    if xs.len() < 3 || xs.len() != log_ys.len() || xs.iter().any(|x| *x <= 0.0) {
        return None;
    }
    let mut best: Option<StretchedFit> = None;
    for k in 1..=400 {
        let kappa = 0.05 + 1.95 * (k - 1) as f64 / 399.0;
        let t: Vec<f64> = xs.iter().map(|x| x.powf(kappa)).collect();
        let Some(f) = linear_fit(&t, log_ys) else { continue };
        let sse: f64 = f.residuals.iter().map(|r| r * r).sum();
        if best.as_ref().is_none_or(|b| sse < b.sse) {
            best = Some(StretchedFit { nu: -f.slope, kappa, log_amplitude: f.intercept, sse });
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stretched_recovers_exponent() {
        let xs: Vec<f64> = (1..=8).map(|r| r as f64 * 2.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.3 - 1.5 * x.powf(0.5)).collect();
        let f = fit_stretched_exponential(&xs, &ys).unwrap();
        assert!((f.kappa - 0.5).abs() < 0.01, "{f:?}");
        assert!((f.nu - 1.5).abs() < 0.05);
        assert!(fit_stretched_exponential(&xs[..2], &ys[..2]).is_none());
    }

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 - 2.0 * x).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.intercept - 1.5).abs() < 1e-12);
        assert_eq!(f.p_value, 0.0);
        assert_eq!(f.p_value_negative(), 0.0);
    }

    #[test]
    fn noisy_line_p_value() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = [1.0, 2.2, 2.9, 4.1, 5.0];
        let f = linear_fit(&xs, &ys).unwrap();
        assert!(f.slope > 0.9 && f.slope < 1.1);
        assert!(f.p_value < 1e-3);
        assert!(f.p_value_negative() > 0.99);
    }

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(30, 100, 1.96);
        assert!(lo < 0.3 && 0.3 < hi);
        assert_eq!(wilson_interval(0, 10, 2.0).0, 0.0);
    }
}
