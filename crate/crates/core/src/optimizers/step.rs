use crate::error::{invalid, Error, Result};
use crate::problems::{FiniteSumProblem, Point};

/// One same-sample extragradient iteration.
///
/// Returns the lookahead `w = z - alpha * g(z)` and the update
/// `z - beta * g(w)`, with `g` evaluated through the same `grad_at` both
/// times. `alpha = 0` gives a plain gradient descent-ascent step.
pub fn seg_inner_step<G>(z: &Point, grad_at: G, alpha: f64, beta: f64) -> Result<(Point, Point)>
where
    G: Fn(&Point) -> Result<Point>,
{
    if !(alpha >= 0.0 && beta >= 0.0) {
        return invalid("stepsizes must be nonnegative");
    }
    let (d1, d2) = (z.d1(), z.d2());
    let g = grad_at(z)?;
    let w = Point::from_vector(z.coords() - g.coords() * alpha, d1, d2)?;
    let gw = grad_at(&w)?;
    let next = Point::from_vector(z.coords() - gw.coords() * beta, d1, d2)?;
    Ok((w, next))
}

/// Deterministic EG+ step `z - eta2 * F(z - eta1 * F z)`.
pub fn eg_plus_step(problem: &FiniteSumProblem, z: &Point, eta1: f64, eta2: f64) -> Result<Point> {
    if !(eta1 > 0.0 && eta2 > 0.0) {
        return invalid("EG+ stepsizes must be positive");
    }
    let (d1, d2) = (z.d1(), z.d2());
    let g = problem.full_gradient(z)?;
    let w = Point::from_vector(z.coords() - g.coords() * eta1, d1, d2)?;
    let gw = problem.full_gradient(&w)?;
    Point::from_vector(z.coords() - gw.coords() * eta2, d1, d2)
}

/// Generalized anchoring `(z_end + theta * z_start) / (1 + theta)`.
pub fn anchor(z_start: &Point, z_end: &Point, theta: f64) -> Result<Point> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return invalid("anchoring weight must be nonnegative");
    }
    if z_start.d1() != z_end.d1() || z_start.d2() != z_end.d2() {
        return Err(Error::DimensionMismatch {
            expected: z_start.dim(),
            got: z_end.dim(),
        });
    }
    let v = if theta == 1.0 {
        (z_end.coords() + z_start.coords()) * 0.5
    } else {
        (z_end.coords() + z_start.coords() * theta) / (1.0 + theta)
    };
    Point::from_vector(v, z_start.d1(), z_start.d2())
}
