use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{Point, QuadraticComponent};
use crate::error::{invalid, Error, Result};
use crate::rng::SeedRng;

/// `f = (1/n) Σ f_i` with the averaged saddle map `F z = G z + c` cached.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSumProblem {
    components: Vec<QuadraticComponent>,
    d1: usize,
    d2: usize,
    jac: DMatrix<f64>,
    offset: DVector<f64>,
}

/// Component-variance parameters `(ρ, σ)` of
/// `(1/n) Σ ‖F_i z − F z‖² ≤ (ρ‖F z‖ + σ)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceParams {
    pub rho: f64,
    pub sigma: f64,
}

impl VarianceParams {
    pub fn new(rho: f64, sigma: f64) -> Result<Self> {
        if !(rho >= 0.0 && sigma >= 0.0) {
            return invalid("rho and sigma must be nonnegative");
        }
        Ok(Self { rho, sigma })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// `max_i ‖G_i‖₂`.
    pub smoothness_l: f64,
    /// Smallest eigenvalue of the symmetric part of `G`.
    pub strong_monotonicity_mu: f64,
    /// Lipschitz constant of the Jacobians; zero for quadratics.
    pub hessian_lipschitz_m: f64,
}

impl FiniteSumProblem {
    pub fn new(components: Vec<QuadraticComponent>) -> Result<Self> {
        let Some(first) = components.first() else {
            return invalid("a problem needs at least one component");
        };
        let (d1, d2) = (first.d1(), first.d2());
        if let Some(i) = components.iter().position(|c| c.d1() != d1 || c.d2() != d2) {
            return invalid(format!(
                "component {i} has dims ({}, {}), expected ({d1}, {d2})",
                components[i].d1(),
                components[i].d2()
            ));
        }
        let n = components.len() as f64;
        let dim = d1 + d2;
        let mut jac = DMatrix::zeros(dim, dim);
        let mut offset = DVector::zeros(dim);
        for comp in &components {
            jac += comp.jacobian();
            offset += comp.offset();
        }
        jac /= n;
        offset /= n;
        Ok(Self {
            components,
            d1,
            d2,
            jac,
            offset,
        })
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn dim(&self) -> usize {
        self.d1 + self.d2
    }

    pub fn components(&self) -> &[QuadraticComponent] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &QuadraticComponent {
        &self.components[i]
    }

    /// Averaged Jacobian `G`.
    pub fn jacobian(&self) -> &DMatrix<f64> {
        &self.jac
    }

    /// Averaged offset `c`.
    pub fn offset(&self) -> &DVector<f64> {
        &self.offset
    }

    /// True when every component map passes through the origin.
    pub fn is_homogeneous(&self) -> bool {
        self.components.iter().all(|c| c.offset().iter().all(|&v| v == 0.0))
    }

    pub fn component_gradient(&self, i: usize, z: &Point) -> Result<Point> {
        let comp = self
            .components
            .get(i)
            .ok_or_else(|| Error::InvalidArgument(format!("component index {i} out of range")))?;
        comp.gradient(z)
    }

    pub fn full_gradient(&self, z: &Point) -> Result<Point> {
        z.check_dims(self.d1, self.d2)?;
        let mut out = self.offset.clone();
        out.gemv(1.0, &self.jac, z.coords(), 1.0);
        Point::from_vector(out, self.d1, self.d2)
    }

    #[inline]
    pub(crate) fn apply_full_into(&self, z: &DVector<f64>, out: &mut DVector<f64>) {
        out.copy_from(&self.offset);
        out.gemv(1.0, &self.jac, z, 1.0);
    }

    /// `‖F z‖²` on a raw coordinate vector.
    pub(crate) fn grad_norm_sq(&self, z: &DVector<f64>) -> f64 {
        let mut out = DVector::zeros(self.dim());
        self.apply_full_into(z, &mut out);
        out.norm_squared()
    }

    pub fn spectral_report(&self) -> Result<SpectralReport> {
        let mut smoothness_l: f64 = 0.0;
        for (i, comp) in self.components.iter().enumerate() {
            let sv = comp.jacobian().clone().singular_values();
            let top = sv.max();
            if !top.is_finite() {
                return Err(Error::Numerical(format!(
                    "singular values of component {i} are not finite"
                )));
            }
            smoothness_l = smoothness_l.max(top);
        }
        let sym = (&self.jac + self.jac.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let mu = eig.eigenvalues.min();
        if !mu.is_finite() {
            return Err(Error::Numerical(format!(
                "symmetric eigensolve returned {:?}",
                eig.eigenvalues.as_slice()
            )));
        }
        Ok(SpectralReport {
            smoothness_l,
            strong_monotonicity_mu: mu,
            hessian_lipschitz_m: 0.0,
        })
    }

    /// Solves `G z* = −c`.
    ///
    /// A singular `G` is accepted when `−c` lies in its range; the
    /// minimum-norm solution is returned in that case.
    pub fn equilibrium(&self) -> Result<Point> {
        let rhs = -&self.offset;
        if rhs.iter().all(|&v| v == 0.0) {
            return Ok(Point::zeros(self.d1, self.d2));
        }
        let tol = 1e-9 * (1.0 + self.offset.norm());
        if let Some(sol) = self.jac.clone().lu().solve(&rhs) {
            if sol.iter().all(|v| v.is_finite()) && self.residual(&sol) <= tol {
                return Point::from_vector(sol, self.d1, self.d2);
            }
        }
        let svd = self.jac.clone().svd(true, true);
        let eps = 1e-12 * svd.singular_values.max().max(1.0);
        let sol = svd
            .solve(&rhs, eps)
            .map_err(|e| Error::Numerical(e.to_string()))?;
        let res = self.residual(&sol);
        if res > tol {
            return Err(Error::NoEquilibrium(format!(
                "G is singular and c is not in its range (residual {res:e})"
            )));
        }
        Point::from_vector(sol, self.d1, self.d2)
    }

    fn residual(&self, z: &DVector<f64>) -> f64 {
        let mut out = DVector::zeros(self.dim());
        self.apply_full_into(z, &mut out);
        out.norm()
    }

    /// Component variance `(1/n) Σ ‖F_i z − F z‖²` at `z`.
    pub fn variance_at(&self, z: &Point) -> Result<f64> {
        z.check_dims(self.d1, self.d2)?;
        let mut full = DVector::zeros(self.dim());
        self.apply_full_into(z.coords(), &mut full);
        let mut buf = DVector::zeros(self.dim());
        let total: f64 = self
            .components
            .iter()
            .map(|comp| {
                comp.apply_into(z.coords(), &mut buf);
                (&buf - &full).norm_squared()
            })
            .sum();
        Ok(total / self.n() as f64)
    }

    /// Largest violation of the component-variance bound over
    /// `sample_count` points drawn uniformly from the ball of `radius`
    /// about the origin. A nonpositive result certifies the bound on the
    /// sample.
    pub fn verify_variance_bound(
        &self,
        params: VarianceParams,
        sample_count: usize,
        radius: f64,
        seed: u64,
    ) -> Result<f64> {
        if sample_count == 0 {
            return invalid("sample_count must be at least 1");
        }
        if !(radius > 0.0) {
            return invalid("radius must be positive");
        }
        let mut rng = SeedRng::new(seed);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..sample_count {
            let z = sample_ball(&mut rng, self.d1, self.d2, radius);
            let var = self.variance_at(&z)?;
            let grad = self.full_gradient(&z)?.norm_sq().sqrt();
            let bound = (params.rho * grad + params.sigma).powi(2);
            worst = worst.max(var - bound);
        }
        Ok(worst)
    }

    /// Sampled star-monotonicity check: the minimum of
    /// `⟨F z, z − z*⟩ / ‖z − z*‖²` over points in the ball of `radius`
    /// around `z*`. Nonnegative means no violation was found.
    pub fn star_monotone_margin(&self, sample_count: usize, radius: f64, seed: u64) -> Result<f64> {
        if sample_count == 0 || !(radius > 0.0) {
            return invalid("need sample_count >= 1 and radius > 0");
        }
        let star = self.equilibrium()?;
        let mut rng = SeedRng::new(seed);
        let mut worst = f64::INFINITY;
        for _ in 0..sample_count {
            let dz = sample_ball(&mut rng, self.d1, self.d2, radius);
            let z = Point::from_vector(star.coords() + dz.coords(), self.d1, self.d2)?;
            let grad = self.full_gradient(&z)?;
            let nsq = dz.norm_sq();
            if nsq > 0.0 {
                worst = worst.min(grad.coords().dot(dz.coords()) / nsq);
            }
        }
        Ok(worst)
    }
}

/// Uniform draw from the ball of `radius` in `R^{d1+d2}`.
pub(crate) fn sample_ball(rng: &mut SeedRng, d1: usize, d2: usize, radius: f64) -> Point {
    let dim = d1 + d2;
    loop {
        let dir = DVector::from_fn(dim, |_, _| rng.normal());
        let norm = dir.norm();
        if norm == 0.0 {
            continue;
        }
        let r = radius * rng.uniform().powf(1.0 / dim as f64);
        return Point::from_vector(dir * (r / norm), d1, d2).expect("finite sample");
    }
}
