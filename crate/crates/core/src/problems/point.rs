use nalgebra::DVector;

use crate::error::{Error, Result};

/// A state `z = (x, y)` of a minimax problem, min-block first.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: DVector<f64>,
    d1: usize,
    d2: usize,
}

impl Point {
    pub fn new(coords: Vec<f64>, d1: usize, d2: usize) -> Result<Self> {
        Self::from_vector(DVector::from_vec(coords), d1, d2)
    }

    /// Fails with [`Error::Diverged`] if any entry is NaN or infinite.
    pub fn from_vector(coords: DVector<f64>, d1: usize, d2: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::InvalidArgument("block dimensions must be positive".into()));
        }
        if coords.len() != d1 + d2 {
            return Err(Error::DimensionMismatch {
                expected: d1 + d2,
                got: coords.len(),
            });
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { step: 0 });
        }
        Ok(Self { coords, d1, d2 })
    }

    pub fn zeros(d1: usize, d2: usize) -> Self {
        Self {
            coords: DVector::zeros(d1 + d2),
            d1,
            d2,
        }
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

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.coords
    }

    pub fn x(&self) -> &[f64] {
        &self.coords.as_slice()[..self.d1]
    }

    pub fn y(&self) -> &[f64] {
        &self.coords.as_slice()[self.d1..]
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.norm_squared()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        (&self.coords - &other.coords).norm_squared()
    }

    pub(crate) fn check_dims(&self, d1: usize, d2: usize) -> Result<()> {
        if self.d1 != d1 || self.d2 != d2 {
            return Err(Error::DimensionMismatch {
                expected: d1 + d2,
                got: self.dim(),
            });
        }
        Ok(())
    }
}
