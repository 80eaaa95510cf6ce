use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub stderr: f64,
    pub trials: usize,
}

impl MomentEstimate {
    /// An exact value: zero standard error.
    pub fn exact(mean: f64) -> Self {
        Self {
            mean,
            stderr: 0.0,
            trials: 1,
        }
    }

    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return invalid("no samples");
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let stderr = if samples.len() < 2 {
            0.0
        } else {
            let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        };
        Ok(Self {
            mean,
            stderr,
            trials: samples.len(),
        })
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }
}

/// Streaming mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub(crate) fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    pub(crate) fn estimate(&self) -> MomentEstimate {
        let stderr = if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n as f64 - 1.0) / self.n as f64).sqrt()
        };
        MomentEstimate {
            mean: self.mean,
            stderr,
            trials: self.n,
        }
    }
}

/// Least-squares line `y = intercept + slope * x`.
pub fn ols(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return invalid("a line fit needs at least two points");
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return invalid("abscissae must not all coincide");
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return invalid("log-log fit needs positive values");
    }
    let logs: Vec<_> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    Ok(ols(&logs)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stderr_definition() {
        let e = MomentEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(e.mean, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((e.stderr - sd / 2.0).abs() < 1e-15);
    }

    #[test]
    fn welford_matches_batch() {
        let xs = [0.3, -1.2, 4.0, 2.2, 0.0, 9.5];
        let mut w = Welford::default();
        xs.iter().for_each(|&x| w.push(x));
        let a = w.estimate();
        let b = MomentEstimate::from_samples(&xs).unwrap();
        assert!((a.mean - b.mean).abs() < 1e-14);
        assert!((a.stderr - b.stderr).abs() < 1e-14);
    }

    #[test]
    fn ols_exact_line() {
        let pts: Vec<_> = (0..5).map(|i| (i as f64, 2.0 - 0.5 * i as f64)).collect();
        let (s, c) = ols(&pts).unwrap();
        assert!((s + 0.5).abs() < 1e-14 && (c - 2.0).abs() < 1e-14);
        assert!(ols(&[(1.0, 1.0), (1.0, 2.0)]).is_err());
    }
}
