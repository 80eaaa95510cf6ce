//! Exact expected epoch operators on affine problems with zero offsets.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Result};
use crate::optimizers::{seg_inner_step, Family};
use crate::problems::{FiniteSumProblem, Point};

/// Largest `n` for which draws are enumerated.
pub const MAX_ENUMERATED_N: usize = 8;

/// Per-step linear map of one same-sample SEG iteration on component `i`,
/// assembled column by column from [`seg_inner_step`].
pub fn step_matrix(problem: &FiniteSumProblem, i: usize, alpha: f64, beta: f64) -> Result<DMatrix<f64>> {
    let (d1, d2) = (problem.d1(), problem.d2());
    let dim = problem.dim();
    let comp = problem.component(i);
    let mut m = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        let z = Point::new(e, d1, d2)?;
        let (_, next) = seg_inner_step(&z, |q| comp.gradient(q), alpha, beta)?;
        m.set_column(j, next.coords());
    }
    Ok(m)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot has a successor");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

fn check_affine(problem: &FiniteSumProblem, family: Family) -> Result<()> {
    if !matches!(family, Family::SegUs | Family::SegRr | Family::SegFf) {
        return invalid(format!("no exact operator for {}", family.name()));
    }
    if problem.components().iter().any(|c| c.offset().iter().any(|&v| v != 0.0)) {
        return invalid("exact expected growth needs zero offsets");
    }
    if problem.n() > MAX_ENUMERATED_N {
        return invalid(format!(
            "n = {} is too large to enumerate (max {MAX_ENUMERATED_N}); use Monte Carlo",
            problem.n()
        ));
    }
    Ok(())
}

fn epoch_matrix(steps: &[DMatrix<f64>], order: &[usize], flip_flop: bool) -> DMatrix<f64> {
    let dim = steps[0].nrows();
    let mut m = DMatrix::identity(dim, dim);
    for &i in order {
        m = &steps[i] * m;
    }
    if flip_flop {
        for &i in order.iter().rev() {
            m = &steps[i] * m;
        }
    }
    m
}

/// `E[MᵀM]` for one unit of the method: a single iteration for SEG-US, an
/// epoch for SEG-RR and SEG-FF.
pub fn expected_second_moment_operator(
    family: Family,
    problem: &FiniteSumProblem,
    alpha: f64,
    beta: f64,
) -> Result<DMatrix<f64>> {
    check_affine(problem, family)?;
    let n = problem.n();
    let steps = (0..n)
        .map(|i| step_matrix(problem, i, alpha, beta))
        .collect::<Result<Vec<_>>>()?;
    let dim = problem.dim();
    let mut avg = DMatrix::zeros(dim, dim);
    let count = match family {
        Family::SegUs => {
            for s in &steps {
                avg += s.transpose() * s;
            }
            n
        }
        _ => {
            let perms = permutations(n);
            for p in &perms {
                let m = epoch_matrix(&steps, p, family == Family::SegFf);
                avg += m.transpose() * m;
            }
            perms.len()
        }
    };
    Ok(avg / count as f64)
}

/// `E[MᵀM]` over a whole SEG-US epoch of `n` iid iterations:
/// `X ← (1/n) Σ_i S_iᵀ X S_i`, applied `n` times to the identity.
pub fn expected_us_epoch_operator(problem: &FiniteSumProblem, alpha: f64, beta: f64) -> Result<DMatrix<f64>> {
    check_affine(problem, Family::SegUs)?;
    let n = problem.n();
    let steps = (0..n)
        .map(|i| step_matrix(problem, i, alpha, beta))
        .collect::<Result<Vec<_>>>()?;
    let dim = problem.dim();
    let mut x = DMatrix::identity(dim, dim);
    for _ in 0..n {
        let mut next = DMatrix::zeros(dim, dim);
        for s in &steps {
            next += s.transpose() * &x * s;
        }
        x = next / n as f64;
    }
    Ok(x)
}

/// Worst-case growth of `E‖z‖²`: the top eigenvalue of `E[MᵀM]`, or its
/// scalar when the average is a multiple of the identity.
pub fn exact_expected_growth(family: Family, problem: &FiniteSumProblem, alpha: f64, beta: f64) -> Result<f64> {
    let avg = expected_second_moment_operator(family, problem, alpha, beta)?;
    Ok(top_eigenvalue(&avg))
}

pub(crate) fn top_eigenvalue(avg: &DMatrix<f64>) -> f64 {
    let dim = avg.nrows();
    let scalar = avg.trace() / dim as f64;
    let off = (avg - DMatrix::identity(dim, dim) * scalar).amax();
    if off <= 1e-15 * scalar.abs().max(1.0) {
        return scalar;
    }
    let sym = (avg + avg.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.max()
}
