use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Stepsize rule, evaluated per epoch for shuffling methods and per
/// iteration for uniform-sampling methods and DSEG.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepsizeSchedule {
    Constant {
        eta: f64,
    },
    /// `η_k = eta0 / (1 + k/shift)^exponent`.
    PolyDecay {
        eta0: f64,
        shift: f64,
        exponent: f64,
    },
    /// Two decoupled sequences `η1_t = gamma0/(t+offset)^r1` (extrapolation)
    /// and `η2_t = eta0/(t+offset)^r2` (update).
    DsegDual {
        gamma0: f64,
        eta0: f64,
        r1: f64,
        r2: f64,
        offset: f64,
    },
}

impl StepsizeSchedule {
    pub fn constant(eta: f64) -> Result<Self> {
        let s = Self::Constant { eta };
        s.validate()?;
        Ok(s)
    }

    pub fn poly_decay(eta0: f64, shift: f64, exponent: f64) -> Result<Self> {
        let s = Self::PolyDecay {
            eta0,
            shift,
            exponent,
        };
        s.validate()?;
        Ok(s)
    }

    /// Preset for affine operators: `(γ₀, η₀) = (1, 0.1)`, `(r₁, r₂) = (0, 1)`.
    pub fn dseg_bilinear() -> Self {
        Self::DsegDual {
            gamma0: 1.0,
            eta0: 0.1,
            r1: 0.0,
            r2: 1.0,
            offset: 19.0,
        }
    }

    /// Preset for general monotone operators: `(0.1, 0.05)`, `(1/3, 2/3)`.
    pub fn dseg_general() -> Self {
        Self::DsegDual {
            gamma0: 0.1,
            eta0: 0.05,
            r1: 1.0 / 3.0,
            r2: 2.0 / 3.0,
            offset: 19.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Constant { eta } => {
                if !(eta > 0.0 && eta.is_finite()) {
                    return invalid(format!("constant stepsize must be positive (got {eta})"));
                }
            }
            Self::PolyDecay {
                eta0,
                shift,
                exponent,
            } => {
                if !(eta0 > 0.0 && shift > 0.0 && exponent >= 0.0) {
                    return invalid("poly-decay needs eta0 > 0, shift > 0, exponent >= 0");
                }
            }
            Self::DsegDual {
                gamma0,
                eta0,
                r1,
                r2,
                offset,
            } => {
                if !(gamma0 > 0.0 && eta0 > 0.0) {
                    return invalid("dual schedule needs positive gamma0 and eta0");
                }
                if !(r1 >= 0.0 && r1 <= r2) {
                    return invalid("dual schedule needs 0 <= r1 <= r2");
                }
                if !(offset >= 1.0) {
                    return invalid("dual schedule needs offset >= 1");
                }
            }
        }
        Ok(())
    }

    pub fn is_dual(&self) -> bool {
        matches!(self, Self::DsegDual { .. })
    }

    /// Single stepsize at `index`. For the dual schedule this is the
    /// update stepsize `η2`.
    pub fn eta(&self, index: usize) -> f64 {
        let k = index as f64;
        match *self {
            Self::Constant { eta } => eta,
            Self::PolyDecay {
                eta0,
                shift,
                exponent,
            } => eta0 / (1.0 + k / shift).powf(exponent),
            Self::DsegDual { .. } => self.dual(index).1,
        }
    }

    /// `(extrapolation, update)` stepsizes at `index`. Single-sequence
    /// schedules return the same value twice.
    pub fn dual(&self, index: usize) -> (f64, f64) {
        match *self {
            Self::DsegDual {
                gamma0,
                eta0,
                r1,
                r2,
                offset,
            } => {
                let base = index as f64 + offset;
                (gamma0 / base.powf(r1), eta0 / base.powf(r2))
            }
            _ => {
                let e = self.eta(index);
                (e, e)
            }
        }
    }
}
