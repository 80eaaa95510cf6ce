//! Verification suites with fixed default parameters.

use std::str::FromStr;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use seglab_core::analysis::{
    default_burn_in, epoch_error, exact_expected_growth, fit_error_order, log_log_slope, mc_expected_sq_norm_with_stepsizes,
    noise_floor, phi_lower_bound_shape, phi_moments, segrr_lower_bound_recursion, segus_floor_recursion, CheckRecord,
    EpochErrorSample, MomentEstimate, PhiMode,
};
use seglab_core::optimizers::{eg_plus_step, run_epoch_with_stepsizes, AlphaRule, Family, MethodSpec};
use seglab_core::problems::{
    bilinear_xy, divergence_example, gen_monotone, gen_strongly_monotone, rr_lower_bound_example,
    variance_floor_example, LowerBoundKind,
};
use seglab_core::{Point, SeedRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Counterexamples,
    ErrorOrder,
    Floor,
    Phi,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Counterexamples => "counterexamples",
            Suite::ErrorOrder => "error-order",
            Suite::Floor => "floor",
            Suite::Phi => "phi",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "counterexamples" => Suite::Counterexamples,
            "error-order" => Suite::ErrorOrder,
            "floor" => Suite::Floor,
            "phi" => Suite::Phi,
            "all" => Suite::All,
            other => bail!("unknown suite '{other}' (counterexamples, error-order, floor, phi, all)"),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<CheckRecord>,
    /// True iff no hard check failed.
    pub passed: bool,
}

impl Report {
    pub fn new(suite: Suite, checks: Vec<CheckRecord>) -> Self {
        let passed = !checks.iter().any(CheckRecord::hard_failure);
        Self {
            suite: suite.name().to_string(),
            checks,
            passed,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check_name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

pub fn run_suite(suite: Suite) -> Result<Report> {
    let checks = match suite {
        Suite::Counterexamples => counterexamples()?,
        Suite::ErrorOrder => error_order()?,
        Suite::Floor => floor()?,
        Suite::Phi => phi()?,
        Suite::All => {
            let mut all = counterexamples()?;
            all.extend(error_order()?);
            all.extend(floor()?);
            all.extend(phi()?);
            all
        }
    };
    Ok(Report::new(suite, checks))
}

/// Worst case of `observed` against `expected` over `cases`, by absolute gap.
fn worst_close(name: &str, cases: &[(f64, f64, String)], tol: f64) -> CheckRecord {
    let (expected, observed, at) = cases
        .iter()
        .max_by(|a, b| (a.1 - a.0).abs().total_cmp(&(b.1 - b.0).abs()))
        .expect("at least one case");
    CheckRecord::close(name, *expected, *observed, tol).with_details(format!("{} cases, worst at {at}", cases.len()))
}

/// Growth of `E‖z‖²` on the two-component divergence instance, and the EG+
/// failure on `f = xy`.
pub fn counterexamples() -> Result<Vec<CheckRecord>> {
    let mut rng = SeedRng::new(1);
    let pairs: Vec<(f64, f64)> = (0..20)
        .map(|_| {
            let l = rng.uniform_in(0.1, 10.0);
            let bl = rng.uniform_in(0.01, 0.5);
            (bl / l, l)
        })
        .collect();
    type Form = fn(f64) -> f64;
    let forms: [(Family, &str, Form); 3] = [
        (Family::SegUs, "growth-seg-us", |b| 1.0 + b.powi(2) / 2.0),
        (Family::SegRr, "growth-seg-rr", |b| 1.0 + b.powi(4) / 2.0),
        (Family::SegFf, "growth-seg-ff", |b| 1.0 + 2.0 * b.powi(6)),
    ];
    let mut checks = Vec::new();
    for (family, name, form) in forms {
        let mut cases = Vec::new();
        for &(beta, l) in &pairs {
            let p = divergence_example(l)?;
            for alpha in [beta, beta / 2.0] {
                let g = exact_expected_growth(family, &p, alpha, beta)?;
                cases.push((form(beta * l), g, format!("beta={beta:.4e} L={l:.4} alpha/beta={}", alpha / beta)));
            }
        }
        checks.push(worst_close(name, &cases, 1e-12));
    }

    let p = bilinear_xy();
    let mut plus = Vec::new();
    let mut worst_equal: f64 = 0.0;
    let mut zr = SeedRng::new(2);
    for k in 1..=10 {
        let eta = 0.1 * k as f64;
        let z = Point::new(vec![zr.normal(), zr.normal()], 1, 1)?;
        let out = eg_plus_step(&p, &z, eta, 2.0 * eta)?;
        plus.push((1.0 + 4.0 * eta.powi(4), out.norm_sq() / z.norm_sq(), format!("eta={eta:.1}")));
        let same = eg_plus_step(&p, &z, eta, eta)?;
        worst_equal = worst_equal.max(same.norm_sq() / z.norm_sq() - 1.0);
    }
    checks.push(worst_close("eg-plus-growth", &plus, 1e-12));
    checks.push(
        CheckRecord::close("eg-equal-stepsizes-nonincreasing", 0.0, worst_equal.max(0.0), 1e-15)
            .with_details(format!("largest relative growth {worst_equal:e} over eta in (0, 1]")),
    );
    Ok(checks)
}

pub const ERROR_ORDER_SEEDS: u64 = 32;

/// Mean within-epoch error against EG over seeds, one point per `η`.
pub fn mean_epoch_errors(method: &MethodSpec, etas: &[f64], seeds: u64) -> Result<Vec<EpochErrorSample>> {
    let per_seed: Vec<Vec<EpochErrorSample>> = (0..seeds)
        .into_par_iter()
        .map(|s| {
            let p = gen_monotone(s, 20, 20, 40)?;
            let mut rng = SeedRng::new(s + 1000);
            let z0 = Point::new((0..p.dim()).map(|_| rng.normal()).collect(), p.d1(), p.d2())?;
            etas.iter()
                .map(|&eta| epoch_error(method, &p, &z0, eta, s))
                .collect::<seglab_core::Result<Vec<_>>>()
        })
        .collect::<seglab_core::Result<_>>()?;
    Ok(etas
        .iter()
        .enumerate()
        .map(|(j, &eta)| EpochErrorSample {
            eta,
            error_norm: per_seed.iter().map(|v| v[j].error_norm).sum::<f64>() / seeds as f64,
            regime_violated: per_seed.iter().any(|v| v[j].regime_violated),
        })
        .collect())
}

/// Log-log slope of the one-epoch error against the EG step.
pub fn error_order() -> Result<Vec<CheckRecord>> {
    let etas: Vec<f64> = (8..=14).rev().map(|k| 2f64.powi(-k)).collect();
    let cases = [
        (MethodSpec::new(Family::SegFfa), 2.85, 3.15),
        (MethodSpec::new(Family::SegRr).with_alpha_rule(AlphaRule::Half), 1.85, 2.15),
        (MethodSpec::new(Family::SegFf).with_alpha_rule(AlphaRule::Half), 1.85, 2.15),
    ];
    let mut checks = Vec::new();
    for (m, lo, hi) in cases {
        let samples = mean_epoch_errors(&m, &etas, ERROR_ORDER_SEEDS)?;
        let slope = fit_error_order(&samples)?;
        let violated = samples.iter().filter(|s| s.regime_violated).count();
        checks.push(
            CheckRecord::within(format!("error-order-{}", m.label()), lo, hi, slope).with_details(format!(
                "{} seeds, eta = 2^-14..2^-8, {violated} of {} stepsizes outside eta*n*L < 1",
                ERROR_ORDER_SEEDS,
                etas.len()
            )),
        );
    }
    Ok(checks)
}

/// Largest `|mean − value| / stderr` over the recorded points; exact points
/// must match to `1e-12`.
fn max_z_score(pairs: &[(MomentEstimate, f64)]) -> f64 {
    pairs
        .iter()
        .map(|(e, v)| {
            let gap = (e.mean - v).abs();
            if e.stderr > 0.0 {
                gap / e.stderr
            } else if gap <= 1e-12 * v.abs().max(1.0) {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max)
}

pub const FLOOR_SETTINGS: [(f64, f64); 5] = [(0.1, 1.0), (0.3, 0.5), (0.05, 1.0), (0.2, 0.25), (0.4, 0.8)];
pub const FLOOR_ETAS: [f64; 4] = [1e-4, 2e-4, 5e-4, 1e-3];

/// SEG-US variance floor against its recursion, and the stationary
/// distance of SEG-FFA and SEG-RR against `η`.
pub fn floor() -> Result<Vec<CheckRecord>> {
    let (l, sigma) = (1.0, 1.0);
    let p = variance_floor_example(l, sigma)?;
    let z0 = Point::new(vec![1.5, -0.5], 1, 1)?;
    let m = MethodSpec::new(Family::SegUs);
    let epochs = 25;
    let mut checks = Vec::new();
    for (k, &(alpha, gamma)) in FLOOR_SETTINGS.iter().enumerate() {
        let beta = gamma * alpha;
        let mc = mc_expected_sq_norm_with_stepsizes(&m, &p, &z0, alpha, beta, epochs, 1000, 100 + k as u64)?;
        let rec = segus_floor_recursion(alpha, beta, l, sigma, z0.norm_sq(), p.n() * epochs)?;
        let pairs: Vec<_> = (0..=epochs).map(|e| (mc.per_epoch[e], rec.values[p.n() * e])).collect();
        let tag = format!("alpha={alpha} gamma={gamma}");
        checks.push(
            CheckRecord::close(format!("segus-floor-mc-{tag}"), 0.0, max_z_score(&pairs), 3.0)
                .with_details(format!("max standard-error distance over {} epochs, 1000 trials", epochs + 1)),
        );
        let bound = z0.norm_sq().min(gamma * sigma * sigma / (2.0 * l * l));
        let lowest = rec.values.iter().copied().fold(f64::INFINITY, f64::min);
        checks.push(CheckRecord::at_least(format!("segus-floor-bound-{tag}"), bound, lowest));
    }

    let inst = gen_strongly_monotone(0, 20, 20, 4)?;
    let mu = inst.spectral_report()?.strong_monotonicity_mu;
    let mut floors = Vec::new();
    for (family, lo, hi) in [(Family::SegFfa, 3.5, 4.5), (Family::SegRr, 1.5, 2.5)] {
        let m = MethodSpec::new(family);
        let mut pts = Vec::new();
        for &eta in &FLOOR_ETAS {
            let burn = default_burn_in(eta, mu, inst.n());
            pts.push((eta, noise_floor(&m, &inst, eta, burn, 4 * burn, 4, 7)?.mean));
        }
        let slope = log_log_slope(&pts)?;
        let listing: Vec<String> = pts.iter().map(|(e, f)| format!("{e:e}:{f:.4e}")).collect();
        checks.push(
            CheckRecord::within(format!("noise-floor-slope-{}", m.label()), lo, hi, slope)
                .with_details(format!("strongly monotone instance seed 0, d = 20 + 20, n = 4; {}", listing.join(" "))),
        );
        floors.push(pts);
    }
    let worst = floors[0]
        .iter()
        .zip(&floors[1])
        .map(|(a, b)| a.1 / b.1)
        .fold(0.0, f64::max);
    checks.push(
        CheckRecord::below("noise-floor-ffa-below-rr", 1.0, worst)
            .with_details("largest SEG-FFA / SEG-RR floor ratio over the stepsize grid"),
    );
    Ok(checks)
}

/// Moments of Φ, and the SEG-RR lower-bound recursion against simulation.
pub fn phi() -> Result<Vec<CheckRecord>> {
    let mut checks = Vec::new();
    let nus = [0.01, 0.05, 0.2, 0.7];
    let mut worst_mean: f64 = 0.0;
    for n in (2..=10).step_by(2) {
        for &nu in &nus {
            worst_mean = worst_mean.max(phi_moments(n, nu, PhiMode::Enumerate)?.0.mean.abs());
        }
    }
    checks.push(
        CheckRecord::close("phi-mean-zero", 0.0, worst_mean, 0.0)
            .with_details("largest |E[Phi]| by enumeration, n = 2..10"),
    );
    let cases: Vec<_> = nus
        .iter()
        .map(|&nu| Ok((nu * nu, phi_moments(2, nu, PhiMode::Enumerate)?.1.mean, format!("nu={nu}"))))
        .collect::<Result<_>>()?;
    checks.push(worst_close("phi-second-moment-n2", &cases, 1e-15));

    let nu = 0.05;
    for (k, n) in [4usize, 6, 8].into_iter().enumerate() {
        let (_, exact) = phi_moments(n, nu, PhiMode::Enumerate)?;
        let (m1, m2) = phi_moments(n, nu, PhiMode::MonteCarlo { trials: 1_000_000, seed: 40 + k as u64 })?;
        let z = max_z_score(&[(m1, 0.0), (m2, exact.mean)]);
        checks.push(
            CheckRecord::close(format!("phi-mc-vs-enumeration-n{n}"), 0.0, z, 3.0)
                .with_details(format!("10^6 draws, nu={nu}; largest standard-error distance of both moments")),
        );
    }

    let (l, mu, sigma, n) = (4.0, 1.0, 1.0, 6);
    let p = rr_lower_bound_example(l, mu, sigma, n, LowerBoundKind::Seg)?;
    let (alpha, beta, x0, epochs, trials) = (0.05, 0.05, 0.7, 5, 20_000u64);
    let z0 = Point::new(vec![0.2, x0, -0.1], 2, 1)?;
    let rec = segrr_lower_bound_recursion(l, alpha, beta, sigma, n, x0 * x0, epochs)?;
    let m = MethodSpec::new(Family::SegRr);
    let paths: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = SeedRng::derived(77, t);
            let mut z = z0.clone();
            (0..epochs)
                .map(|_| {
                    z = run_epoch_with_stepsizes(&m, &p, &z, alpha, beta, &mut rng)?;
                    Ok(z.as_slice()[1].powi(2))
                })
                .collect::<seglab_core::Result<Vec<_>>>()
        })
        .collect::<seglab_core::Result<_>>()?;
    let pairs: Vec<_> = (0..epochs)
        .map(|k| {
            let xs: Vec<f64> = paths.iter().map(|v| v[k]).collect();
            Ok((MomentEstimate::from_samples(&xs)?, rec[k + 1]))
        })
        .collect::<Result<_>>()?;
    checks.push(
        CheckRecord::close("segrr-lower-bound-recursion", 0.0, max_z_score(&pairs), 3.0)
            .with_details(format!("{trials} trials, epochs 1..={epochs}, n={n}, L={l}, alpha=beta={beta}")),
    );

    let mut worst_ratio = f64::INFINITY;
    for n in (2..=10).step_by(2) {
        for nu in [0.001, 0.01, 0.05, 0.1, 0.3, 0.6, 0.9] {
            let (_, s) = phi_moments(n, nu, PhiMode::Enumerate)?;
            worst_ratio = worst_ratio.min(s.mean / phi_lower_bound_shape(n, nu));
        }
    }
    checks.push(
        CheckRecord::at_least("phi-lower-bound-shape", 0.01, worst_ratio)
            .with_details("smallest E[Phi^2] / min{1 + 1/nu, n^3 nu^2} over n = 2..10")
            .soft(),
    );
    Ok(checks)
}
