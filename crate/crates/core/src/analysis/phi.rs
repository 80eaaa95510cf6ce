//! Moments of `Φ = Σ_{i=1..n} (2s_{τ(i)} − 1)(1−ν)^{n−i}` for a uniformly
//! shuffled balanced sign pattern.

use super::stats::{MomentEstimate, Welford};
use crate::error::{invalid, Result};
use crate::rng::SeedRng;

pub const MAX_ENUMERATED_PHI_N: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiMode {
    /// Every distinct arrangement of the signs, equally weighted.
    Enumerate,
    MonteCarlo { trials: usize, seed: u64 },
}

fn check(n: usize, nu: f64) -> Result<()> {
    if n == 0 || !n.is_multiple_of(2) {
        return invalid(format!("n must be even and positive (got {n})"));
    }
    if !(nu > 0.0 && nu < 1.0) {
        return invalid(format!("nu must lie in (0, 1) (got {nu})"));
    }
    Ok(())
}

fn weights(n: usize, nu: f64) -> Vec<f64> {
    (1..=n).map(|i| (1.0 - nu).powi((n - i) as i32)).collect()
}

/// One draw of `Φ`. Components `0..n/2` carry `s = 1`.
pub fn phi_sample(rng: &mut SeedRng, n: usize, nu: f64) -> Result<f64> {
    check(n, nu)?;
    let w = weights(n, nu);
    Ok(sample_with(rng, &w))
}

fn sample_with(rng: &mut SeedRng, w: &[f64]) -> f64 {
    let n = w.len();
    let tau = rng.permutation(n);
    tau.iter()
        .zip(w)
        .map(|(&c, wi)| if c < n / 2 { *wi } else { -*wi })
        .sum()
}

/// `(E[Φ], E[Φ²])`. Enumeration is exact (zero stderr) and limited to
/// `n ≤ 10`.
pub fn phi_moments(n: usize, nu: f64, mode: PhiMode) -> Result<(MomentEstimate, MomentEstimate)> {
    check(n, nu)?;
    let w = weights(n, nu);
    match mode {
        PhiMode::Enumerate => {
            if n > MAX_ENUMERATED_PHI_N {
                return invalid(format!("enumeration supports n <= {MAX_ENUMERATED_PHI_N}"));
            }
            // Every permutation induces a subset of positions with a plus
            // sign; each subset of size n/2 arises equally often.
            let (mut s1, mut s2, mut count) = (0.0, 0.0, 0usize);
            // Pair each subset with its complement; Φ flips sign exactly.
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != n / 2 || mask & 1 == 0 {
                    continue;
                }
                let phi: f64 = (0..n)
                    .map(|i| if mask >> i & 1 == 1 { w[i] } else { -w[i] })
                    .sum();
                s1 += phi + -phi;
                s2 += 2.0 * phi * phi;
                count += 2;
            }
            let c = count as f64;
            Ok((MomentEstimate::exact(s1 / c), MomentEstimate::exact(s2 / c)))
        }
        PhiMode::MonteCarlo { trials, seed } => {
            if trials < 2 {
                return invalid("need at least 2 trials");
            }
            let mut rng = SeedRng::new(seed);
            let (mut m1, mut m2) = (Welford::default(), Welford::default());
            for _ in 0..trials {
                let phi = sample_with(&mut rng, &w);
                m1.push(phi);
                m2.push(phi * phi);
            }
            Ok((m1.estimate(), m2.estimate()))
        }
    }
}

/// `min{1 + 1/ν, n³ν²}`, the shape of the lower bound on `E[Φ²]`.
pub fn phi_lower_bound_shape(n: usize, nu: f64) -> f64 {
    (1.0 + 1.0 / nu).min((n as f64).powi(3) * nu * nu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_components_exact() {
        let (m, s) = phi_moments(2, 0.25, PhiMode::Enumerate).unwrap();
        assert_eq!(m.mean, 0.0);
        assert!((s.mean - 0.0625).abs() < 1e-15);
        assert_eq!(s.stderr, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(phi_moments(3, 0.5, PhiMode::Enumerate).is_err());
        assert!(phi_moments(4, 1.0, PhiMode::Enumerate).is_err());
        assert!(phi_moments(12, 0.1, PhiMode::Enumerate).is_err());
    }
}
