//! Pearson correlation with Fisher-z intervals and Student-t significance.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

/// `|r|` within this distance of 1 is treated as a perfect correlation.
pub const DEGENERATE_TOLERANCE: f64 = 1e-12;

pub const DEFAULT_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub n: usize,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
}

impl CorrelationResult {
    pub fn is_significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().copied().sum::<NeumaierSum>().value() / values.len() as f64
}

/// Product-moment correlation coefficient over mean-centred, compensated sums.
pub fn pearson_r(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientN {
            needed: 3,
            got: xs.len(),
        });
    }
    let (mx, my) = (mean(xs), mean(ys));
    let mut sxy = NeumaierSum::new();
    let mut sxx = NeumaierSum::new();
    let mut syy = NeumaierSum::new();
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let (sxx, syy) = (sxx.value(), syy.value());
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let r = sxy.value() / (sxx * syy).sqrt();
    Ok(r.clamp(-1.0, 1.0))
}

fn check_nondegenerate(r: f64) -> Result<()> {
    if !r.is_finite() || 1.0 - r.abs() <= DEGENERATE_TOLERANCE {
        Err(Error::DegenerateCorrelation)
    } else {
        Ok(())
    }
}

/// Two-sided critical value of the standard normal at `level`.
pub fn normal_critical(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidLevel(level));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(normal.inverse_cdf(0.5 + level / 2.0))
}

/// Confidence interval for r from the Fisher z-transform,
/// `tanh(atanh(r) ∓ z_crit / √(n − 3))`.
pub fn fisher_ci(r: f64, n: usize, level: f64) -> Result<(f64, f64)> {
    check_nondegenerate(r)?;
    if n < 4 {
        return Err(Error::InsufficientN { needed: 4, got: n });
    }
    let z = r.atanh();
    let half_width = normal_critical(level)? / ((n - 3) as f64).sqrt();
    Ok(((z - half_width).tanh(), (z + half_width).tanh()))
}

/// Two-tailed p-value of `t = r·√((n−2)/(1−r²))` under Student's t with
/// n − 2 degrees of freedom.
///
/// Uses `P(|T| > t) = I_x(df/2, 1/2)` with `x = df / (df + t²)`, which
/// simplifies to `x = 1 − r²`.
pub fn r_p_value(r: f64, n: usize) -> Result<f64> {
    check_nondegenerate(r)?;
    if n < 3 {
        return Err(Error::InsufficientN { needed: 3, got: n });
    }
    if r == 0.0 {
        return Ok(1.0);
    }
    let df = (n - 2) as f64;
    let x = (1.0 - r * r).clamp(0.0, 1.0);
    Ok(beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0))
}

/// r, 95% interval and p-value for paired series.
pub fn correlate(xs: &[f64], ys: &[f64]) -> Result<CorrelationResult> {
    correlate_at(xs, ys, DEFAULT_LEVEL)
}

pub fn correlate_at(xs: &[f64], ys: &[f64], level: f64) -> Result<CorrelationResult> {
    if xs.len() == ys.len() && xs.len() < 4 {
        return Err(Error::InsufficientN {
            needed: 4,
            got: xs.len(),
        });
    }
    let r = pearson_r(xs, ys)?;
    let n = xs.len();
    let (ci_low, ci_high) = fisher_ci(r, n, level)?;
    Ok(CorrelationResult {
        r,
        n,
        ci_low,
        ci_high,
        p_value: r_p_value(r, n)?,
    })
}

/// Correlates a metric against richness over `(R, value)` rows.
pub fn correlate_metric_vs_richness(rows: &[(usize, f64)]) -> Result<CorrelationResult> {
    let xs: Vec<f64> = rows.iter().map(|(r, _)| *r as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|(_, v)| *v).collect();
    correlate(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_examples() {
        assert_eq!(pearson_r(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(
            pearson_r(&[1.0, 2.0, 3.0], &[-1.0, -2.0, -3.0]).unwrap(),
            -1.0
        );
        let r = pearson_r(&[1.0, 2.0, 3.0], &[2.0, 4.0, 7.0]).unwrap();
        assert!((r - 5.0 / (2.0f64 * 114.0 / 9.0).sqrt()).abs() < 1e-15);
        assert!((r - 0.99340).abs() < 5e-6);
    }

    #[test]
    fn pearson_errors() {
        assert!(matches!(
            pearson_r(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { left: 3, right: 2 })
        ));
        assert!(matches!(
            pearson_r(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]),
            Err(Error::DegenerateSeries)
        ));
        assert!(matches!(
            pearson_r(&[1.0, 2.0], &[1.0, 3.0]),
            Err(Error::InsufficientN { .. })
        ));
    }

    #[test]
    fn critical_value() {
        assert!((normal_critical(0.95).unwrap() - 1.959964).abs() < 1e-6);
        assert!(normal_critical(1.0).is_err());
        assert!(normal_critical(0.0).is_err());
    }

    #[test]
    fn fisher_ci_examples() {
        let (lo, hi) = fisher_ci(0.692, 36, 0.95).unwrap();
        assert!((lo - 0.471).abs() <= 0.001, "{lo}");
        assert!((hi - 0.832).abs() <= 0.001, "{hi}");

        let (lo, hi) = fisher_ci(0.0, 10, 0.95).unwrap();
        assert_eq!(lo, -hi);

        // tanh(atanh(0.99) - 1.959964) = 0.595850
        let (lo, hi) = fisher_ci(0.99, 4, 0.95).unwrap();
        assert!((lo - 0.595850).abs() < 5e-6, "{lo}");
        assert!((hi - 0.9998).abs() < 5e-5, "{hi}");
    }

    #[test]
    fn fisher_ci_errors() {
        assert!(matches!(
            fisher_ci(1.0, 10, 0.95),
            Err(Error::DegenerateCorrelation)
        ));
        assert!(matches!(
            fisher_ci(-1.0, 10, 0.95),
            Err(Error::DegenerateCorrelation)
        ));
        assert!(matches!(
            fisher_ci(0.5, 3, 0.95),
            Err(Error::InsufficientN { .. })
        ));
    }

    #[test]
    fn p_value_examples() {
        assert_eq!(r_p_value(0.0, 20).unwrap(), 1.0);
        assert!(r_p_value(0.692, 36).unwrap() < 1e-4);
        assert!(r_p_value(-0.253, 36).unwrap() > 0.05);
        assert!(r_p_value(-0.275, 36).unwrap() > 0.05);
        assert!(matches!(
            r_p_value(1.0, 36),
            Err(Error::DegenerateCorrelation)
        ));
        assert!(matches!(
            r_p_value(0.3, 2),
            Err(Error::InsufficientN { .. })
        ));
    }

    #[test]
    fn correlate_needs_four_rows() {
        let rows = [(10, 1.0), (20, 2.5), (30, 2.0)];
        assert!(matches!(
            correlate_metric_vs_richness(&rows),
            Err(Error::InsufficientN { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn correlate_constant_metric() {
        let rows: Vec<(usize, f64)> = (1..10).map(|r| (r * 10, 0.5)).collect();
        assert!(matches!(
            correlate_metric_vs_richness(&rows),
            Err(Error::DegenerateSeries)
        ));
    }

    #[test]
    fn correlate_affine_metric_is_degenerate() {
        let rows: Vec<(usize, f64)> = (1..10).map(|r| (r * 10, 3.0 * r as f64 + 1.0)).collect();
        assert!(matches!(
            correlate_metric_vs_richness(&rows),
            Err(Error::DegenerateCorrelation)
        ));
    }
}
