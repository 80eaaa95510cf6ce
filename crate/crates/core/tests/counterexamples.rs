//! Closed forms on the hand-built instances, cross-checked by simulation.

use nalgebra::{DMatrix, DVector};
use seglab_core::analysis::*;
use seglab_core::optimizers::*;
use seglab_core::problems::*;
use seglab_core::{Point, SeedRng};

fn random_pairs(count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = SeedRng::new(seed);
    (0..count)
        .map(|_| {
            let l = rng.uniform_in(0.1, 10.0);
            let bl = rng.uniform_in(0.01, 0.5);
            (bl / l, l)
        })
        .collect()
}

#[test]
fn growth_factors_match_closed_forms() {
    for (beta, l) in random_pairs(20, 1) {
        let p = divergence_example(l).unwrap();
        let bl = beta * l;
        for alpha in [beta, beta / 2.0, 0.0] {
            let us = exact_expected_growth(Family::SegUs, &p, alpha, beta).unwrap();
            let rr = exact_expected_growth(Family::SegRr, &p, alpha, beta).unwrap();
            let ff = exact_expected_growth(Family::SegFf, &p, alpha, beta).unwrap();
            assert!((us - (1.0 + bl.powi(2) / 2.0)).abs() < 1e-12, "US {us} at βL={bl}");
            assert!((rr - (1.0 + bl.powi(4) / 2.0)).abs() < 1e-12, "RR {rr} at βL={bl}");
            assert!((ff - (1.0 + 2.0 * bl.powi(6))).abs() < 1e-12, "FF {ff} at βL={bl}");
        }
    }
}

fn m1_m2(beta: f64, l: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let b = beta * l;
    let h = b * b / 2.0;
    (
        DMatrix::from_row_slice(2, 2, &[1.0 - h, -b - h, b - h, 1.0 - h]),
        DMatrix::from_row_slice(2, 2, &[1.0 - h, -b + h, b + h, 1.0 - h]),
    )
}

#[test]
fn rr_epoch_is_one_of_the_two_products() {
    let (beta, l) = (0.07, 3.0);
    let p = divergence_example(l).unwrap();
    let (m1, m2) = m1_m2(beta, l);
    let z = Point::new(vec![0.8, -0.3], 1, 1).unwrap();
    let s = StepsizeSchedule::constant(beta).unwrap();
    let mut seen = [false; 2];
    let mut rng = SeedRng::new(3);
    for k in 0..40 {
        let (out, trace) = run_epoch_traced(&MethodSpec::new(Family::SegRr), &p, &z, k, &s, &mut rng).unwrap();
        // M1 applies component 2 first.
        let m = if trace[0].update == 1 { &m1 } else { &m2 };
        seen[trace[0].update] = true;
        let expect = m * z.coords();
        assert!((out.coords() - expect).amax() < 1e-15);
    }
    assert!(seen[0] && seen[1]);
}

#[test]
fn eg_plus_on_bilinear() {
    let p = bilinear_xy();
    let z = Point::new(vec![0.3, 1.1], 1, 1).unwrap();
    for k in 1..=10 {
        let eta = 0.1 * k as f64;
        let out = eg_plus_step(&p, &z, eta, 2.0 * eta).unwrap();
        let expect = (1.0 + 4.0 * eta.powi(4)) * z.norm_sq();
        assert!((out.norm_sq() - expect).abs() < 1e-12, "eta {eta}");
        assert!(eg_plus_step(&p, &z, eta, eta).unwrap().norm_sq() <= z.norm_sq());
    }
}

#[test]
fn monte_carlo_agrees_with_exact_operators() {
    let (beta, l) = (0.3, 2.0);
    let p = divergence_example(l).unwrap();
    let z0 = Point::new(vec![1.0, 0.4], 1, 1).unwrap();
    let cases = [
        (Family::SegUs, expected_us_epoch_operator(&p, beta, beta).unwrap()),
        (Family::SegRr, expected_second_moment_operator(Family::SegRr, &p, beta, beta).unwrap()),
        (Family::SegFf, expected_second_moment_operator(Family::SegFf, &p, beta, beta).unwrap()),
    ];
    for (fam, op) in cases {
        let exact = (z0.coords().transpose() * &op * z0.coords())[(0, 0)];
        let mc = mc_expected_sq_norm_with_stepsizes(&MethodSpec::new(fam), &p, &z0, beta, beta, 1, 20_000, 9).unwrap();
        let e = mc.per_epoch[1];
        assert!(e.agrees_with(exact, 3.0), "{fam:?}: mc {} ± {} vs {exact}", e.mean, e.stderr);
    }
}

#[test]
fn segus_floor_matches_simulation() {
    let (l, sigma) = (1.0, 1.0);
    let p = variance_floor_example(l, sigma).unwrap();
    let z0 = Point::new(vec![1.5, -0.5], 1, 1).unwrap();
    for (alpha, gamma) in [(0.1, 1.0), (0.3, 0.5)] {
        let beta = gamma * alpha;
        let m = MethodSpec::new(Family::SegUs);
        let epochs = 30;
        let mc = mc_expected_sq_norm_with_stepsizes(&m, &p, &z0, alpha, beta, epochs, 4000, 5).unwrap();
        let rec = segus_floor_recursion(alpha, beta, l, sigma, z0.norm_sq(), 2 * epochs).unwrap();
        for k in 0..=epochs {
            let e = mc.per_epoch[k];
            let r = rec.values[2 * k];
            assert!((e.mean - r).abs() <= 3.0 * e.stderr + 1e-12, "α={alpha} k={k}: {} ± {} vs {r}", e.mean, e.stderr);
        }
        let floor = z0.norm_sq().min(gamma * sigma * sigma / (2.0 * l * l));
        assert!(rec.values.iter().all(|&v| v >= floor));
    }
}

#[test]
#[allow(clippy::needless_range_loop)]
fn rr_lower_bound_second_moment() {
    let (l, mu, sigma, n) = (4.0, 1.0, 1.0, 6);
    let p = rr_lower_bound_example(l, mu, sigma, n, LowerBoundKind::Seg).unwrap();
    let (alpha, beta) = (0.05, 0.05);
    let x0 = 0.7;
    let z0 = Point::new(vec![0.2, x0, -0.1], 2, 1).unwrap();
    let epochs = 5;
    let rec = segrr_lower_bound_recursion(l, alpha, beta, sigma, n, x0 * x0, epochs).unwrap();
    let trials = 20_000;
    let m = MethodSpec::new(Family::SegRr);
    for k in 1..=epochs {
        let mut samples = Vec::with_capacity(trials);
        for t in 0..trials as u64 {
            let mut rng = SeedRng::derived(77, t);
            let mut z = z0.clone();
            for _ in 0..k {
                z = run_epoch_with_stepsizes(&m, &p, &z, alpha, beta, &mut rng).unwrap();
            }
            samples.push(z.as_slice()[1].powi(2));
        }
        let e = MomentEstimate::from_samples(&samples).unwrap();
        assert!((e.mean - rec[k]).abs() <= 3.0 * e.stderr + 1e-15, "epoch {k}: {} ± {} vs {}", e.mean, e.stderr, rec[k]);
    }
}

#[test]
fn phi_enumeration_matches_closed_form() {
    for n in [2, 4, 6, 8, 10] {
        for nu in [0.01, 0.2, 0.7] {
            let (m, s) = phi_moments(n, nu, PhiMode::Enumerate).unwrap();
            assert!(m.mean.abs() < 1e-12);
            let cf = phi_second_moment_closed_form(n, nu).unwrap();
            assert!((s.mean - cf).abs() < 1e-12 * cf.max(1.0), "n={n} ν={nu}");
        }
    }
}

#[test]
fn phi_monte_carlo_agrees_and_is_symmetric() {
    let (n, nu) = (8, 1.0 / 16.0);
    let (_, exact) = phi_moments(n, nu, PhiMode::Enumerate).unwrap();
    let (m, s) = phi_moments(n, nu, PhiMode::MonteCarlo { trials: 200_000, seed: 4 }).unwrap();
    assert!(m.agrees_with(0.0, 3.0));
    assert!(s.agrees_with(exact.mean, 3.0));
    let mut rng = SeedRng::new(8);
    let xs: Vec<f64> = (0..100_000).map(|_| phi_sample(&mut rng, n, nu).unwrap()).collect();
    let sd = (xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64).sqrt();
    let cubes: Vec<f64> = xs.iter().map(|x| (x / sd).powi(3)).collect();
    let skew = MomentEstimate::from_samples(&cubes).unwrap();
    assert!(skew.agrees_with(0.0, 3.0), "skew {} ± {}", skew.mean, skew.stderr);
}

#[test]
fn lower_bound_full_maps_are_diagonal() {
    for kind in [LowerBoundKind::Seg, LowerBoundKind::Sgda] {
        let p = rr_lower_bound_example(4.0, 1.0, 1.0, 4, kind).unwrap();
        let j = p.jacobian();
        let diag = DMatrix::from_diagonal(&DVector::from_iterator(j.nrows(), j.diagonal().iter().copied()));
        assert!((j - diag).amax() < 1e-15);
        assert!(p.full_gradient(&Point::zeros(p.d1(), p.d2())).unwrap().norm_sq() < 1e-30);
    }
}
