//! Saddle gradients against central finite differences of the objective.

use seglab_core::problems::*;
use seglab_core::{FiniteSumProblem, Point, SeedRng};

fn fd_gradient(problem: &FiniteSumProblem, i: usize, z: &Point) -> Vec<f64> {
    let comp = problem.component(i);
    let h = 1e-5;
    (0..z.dim())
        .map(|k| {
            let mut p = z.as_slice().to_vec();
            let mut m = z.as_slice().to_vec();
            p[k] += h;
            m[k] -= h;
            let fp = comp.value(&Point::new(p, z.d1(), z.d2()).unwrap()).unwrap();
            let fm = comp.value(&Point::new(m, z.d1(), z.d2()).unwrap()).unwrap();
            let d = (fp - fm) / (2.0 * h);
            // descent in x, ascent in y
            if k < z.d1() {
                d
            } else {
                -d
            }
        })
        .collect()
}

fn instances() -> Vec<FiniteSumProblem> {
    vec![
        gen_monotone(11, 4, 3, 6).unwrap(),
        gen_strongly_monotone(12, 3, 5, 4).unwrap(),
        divergence_example(1.7).unwrap(),
        variance_floor_example(2.0, 0.8).unwrap(),
        rr_lower_bound_example(4.0, 1.0, 0.5, 6, LowerBoundKind::Seg).unwrap(),
        rr_lower_bound_example(4.0, 1.0, 0.5, 6, LowerBoundKind::Sgda).unwrap(),
        bilinear_xy(),
    ]
}

#[test]
fn finite_differences_match_on_random_pairs() {
    let probs = instances();
    let mut rng = SeedRng::new(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = &probs[rng.below(probs.len())];
        let i = rng.below(p.n());
        let z = Point::new((0..p.dim()).map(|_| rng.normal()).collect(), p.d1(), p.d2()).unwrap();
        let g = p.component_gradient(i, &z).unwrap();
        let fd = fd_gradient(p, i, &z);
        let diff: f64 = g.as_slice().iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale = g.norm_sq().sqrt().max(1.0);
        worst = worst.max(diff / scale);
    }
    assert!(worst <= 1e-6, "worst relative error {worst:e}");
}

#[test]
fn full_gradient_is_component_average() {
    for p in instances() {
        let z = Point::new((0..p.dim()).map(|k| 0.3 * k as f64 - 1.0).collect(), p.d1(), p.d2()).unwrap();
        let full = p.full_gradient(&z).unwrap();
        let mut avg = vec![0.0; p.dim()];
        for i in 0..p.n() {
            for (a, g) in avg.iter_mut().zip(p.component_gradient(i, &z).unwrap().as_slice()) {
                *a += g / p.n() as f64;
            }
        }
        for (a, b) in avg.iter().zip(full.as_slice()) {
            assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
        }
    }
}
