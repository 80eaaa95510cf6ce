//! Random quadratic test problems.
//!
//! Both generators draw, per component and in this order, `B_i` (row-major,
//! entries Uniform[0, 1]) and `t_i` (standard normals); the diagonal blocks
//! are then filled by the generator-specific rule.

use nalgebra::{DMatrix, DVector};

use super::{FiniteSumProblem, QuadraticComponent};
use crate::error::{invalid, Result};
use crate::rng::SeedRng;

fn draw_b_t(rng: &mut SeedRng, d1: usize, d2: usize) -> (DMatrix<f64>, DVector<f64>) {
    let b = DMatrix::from_row_iterator(d1, d2, (0..d1 * d2).map(|_| rng.uniform()).collect::<Vec<_>>());
    let t = DVector::from_iterator(d1 + d2, (0..d1 + d2).map(|_| rng.normal()).collect::<Vec<_>>());
    (b, t)
}

/// Signs for a diagonal block: for every coordinate `j`, a uniformly random
/// half of the components get `+2` and the rest `−2`, so each coordinate
/// sums to zero over the components. Coordinates are drawn independently.
#[allow(clippy::needless_range_loop)]
fn balanced_diagonals(rng: &mut SeedRng, dim: usize, n: usize) -> Vec<DVector<f64>> {
    let mut diags = vec![DVector::from_element(dim, -2.0); n];
    for j in 0..dim {
        let perm = rng.permutation(n);
        for &i in &perm[..n / 2] {
            diags[i][j] = 2.0;
        }
    }
    diags
}

/// Monotone instance: `Σ A_i = Σ C_i = 0`, so the averaged objective is
/// bilinear plus linear terms while each component is indefinite.
pub fn gen_monotone(seed: u64, d1: usize, d2: usize, n: usize) -> Result<FiniteSumProblem> {
    if n == 0 || !n.is_multiple_of(2) {
        return invalid(format!("gen_monotone needs an even, positive n (got {n})"));
    }
    if d1 == 0 || d2 == 0 {
        return invalid("block dimensions must be positive");
    }
    let mut rng = SeedRng::new(seed);
    let bt: Vec<_> = (0..n).map(|_| draw_b_t(&mut rng, d1, d2)).collect();
    let a_diags = balanced_diagonals(&mut rng, d1, n);
    let c_diags = balanced_diagonals(&mut rng, d2, n);
    let components = bt
        .into_iter()
        .zip(a_diags.into_iter().zip(c_diags))
        .map(|((b, t), (a, c))| {
            QuadraticComponent::new(DMatrix::from_diagonal(&a), b, DMatrix::from_diagonal(&c), t)
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteSumProblem::new(components)
}

/// Random orthogonal matrix from the QR factorization of a Gaussian
/// matrix, with columns flipped so that `R` has a nonnegative diagonal.
pub fn random_orthogonal(rng: &mut SeedRng, dim: usize) -> DMatrix<f64> {
    let gauss = DMatrix::from_row_iterator(dim, dim, (0..dim * dim).map(|_| rng.normal()).collect::<Vec<_>>());
    let qr = gauss.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn random_spd_block(rng: &mut SeedRng, dim: usize) -> DMatrix<f64> {
    let q = random_orthogonal(rng, dim);
    let d = DVector::from_iterator(dim, (0..dim).map(|_| rng.uniform_in(0.5, 1.0)).collect::<Vec<_>>());
    let m = &q * DMatrix::from_diagonal(&d) * q.transpose();
    // exact symmetry; rounding in the triple product leaves ~1e-16 skew
    (&m + m.transpose()) * 0.5
}

/// Strongly monotone instance: `A_i = Q_i D_i Q_iᵀ` with the spectrum of
/// `D_i` in `[1/2, 1]`, and `C_i` drawn the same way.
pub fn gen_strongly_monotone(seed: u64, d1: usize, d2: usize, n: usize) -> Result<FiniteSumProblem> {
    if n == 0 || d1 == 0 || d2 == 0 {
        return invalid("d1, d2 and n must all be positive");
    }
    let mut rng = SeedRng::new(seed);
    let components = (0..n)
        .map(|_| {
            let (b, t) = draw_b_t(&mut rng, d1, d2);
            let a = random_spd_block(&mut rng, d1);
            let c = random_spd_block(&mut rng, d2);
            QuadraticComponent::new(a, b, c, t)
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteSumProblem::new(components)
}
