use nalgebra::{DMatrix, DVector};

use super::Point;
use crate::error::{invalid, Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// One summand `f_i(x, y) = xᵀAx + 2xᵀBy − yᵀCy − tᵀz`.
///
/// There is no ½ in front of the quadratic form, so the saddle map
/// `F_i z = (∇ₓf_i, −∇_y f_i)` is the affine map `G_i z + c_i` with
/// `G_i = [[2A, 2B], [−2Bᵀ, 2C]]` and `c_i = (−t_x, t_y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticComponent {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    t: DVector<f64>,
    jac: DMatrix<f64>,
    offset: DVector<f64>,
}

impl QuadraticComponent {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        t: DVector<f64>,
    ) -> Result<Self> {
        let d1 = a.nrows();
        let d2 = c.nrows();
        if d1 == 0 || d2 == 0 {
            return invalid("block dimensions must be positive");
        }
        if a.ncols() != d1 || c.ncols() != d2 {
            return invalid("A and C must be square");
        }
        if b.nrows() != d1 || b.ncols() != d2 {
            return invalid(format!(
                "B must be {d1}x{d2}, got {}x{}",
                b.nrows(),
                b.ncols()
            ));
        }
        if t.len() != d1 + d2 {
            return Err(Error::DimensionMismatch {
                expected: d1 + d2,
                got: t.len(),
            });
        }
        let finite = a.iter().chain(b.iter()).chain(c.iter()).chain(t.iter());
        if finite.into_iter().any(|v| !v.is_finite()) {
            return invalid("component entries must be finite");
        }
        for (name, m) in [("A", &a), ("C", &c)] {
            let asym = (m - m.transpose()).amax();
            if asym > SYMMETRY_TOL {
                return invalid(format!("{name} is not symmetric (max |M - Mᵀ| = {asym:e})"));
            }
        }

        let dim = d1 + d2;
        let mut jac = DMatrix::zeros(dim, dim);
        jac.view_mut((0, 0), (d1, d1)).copy_from(&(&a * 2.0));
        jac.view_mut((0, d1), (d1, d2)).copy_from(&(&b * 2.0));
        jac.view_mut((d1, 0), (d2, d1)).copy_from(&(b.transpose() * -2.0));
        jac.view_mut((d1, d1), (d2, d2)).copy_from(&(&c * 2.0));
        let mut offset = -t.clone();
        offset.rows_mut(d1, d2).copy_from(&t.rows(d1, d2));

        Ok(Self {
            a,
            b,
            c,
            t,
            jac,
            offset,
        })
    }

    pub fn d1(&self) -> usize {
        self.a.nrows()
    }

    pub fn d2(&self) -> usize {
        self.c.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn t(&self) -> &DVector<f64> {
        &self.t
    }

    /// Constant Jacobian `G_i` of the saddle map.
    pub fn jacobian(&self) -> &DMatrix<f64> {
        &self.jac
    }

    /// Constant term `c_i` of the saddle map.
    pub fn offset(&self) -> &DVector<f64> {
        &self.offset
    }

    /// Objective value `f_i(z)`.
    pub fn value(&self, z: &Point) -> Result<f64> {
        z.check_dims(self.d1(), self.d2())?;
        let x = z.coords().rows(0, self.d1());
        let y = z.coords().rows(self.d1(), self.d2());
        let quad = x.dot(&(&self.a * x)) + 2.0 * x.dot(&(&self.b * y)) - y.dot(&(&self.c * y));
        Ok(quad - self.t.dot(z.coords()))
    }

    /// Saddle gradient `(∇ₓf_i(z), −∇_y f_i(z))`.
    pub fn gradient(&self, z: &Point) -> Result<Point> {
        z.check_dims(self.d1(), self.d2())?;
        let mut out = self.offset.clone();
        out.gemv(1.0, &self.jac, z.coords(), 1.0);
        Point::from_vector(out, self.d1(), self.d2())
    }

    /// `out ← G_i z + c_i` without allocation.
    #[inline]
    pub(crate) fn apply_into(&self, z: &DVector<f64>, out: &mut DVector<f64>) {
        out.copy_from(&self.offset);
        out.gemv(1.0, &self.jac, z, 1.0);
    }
}
