use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "SGDA-US")]
    SgdaUs,
    #[serde(rename = "SGDA-RR")]
    SgdaRr,
    #[serde(rename = "SEG-US")]
    SegUs,
    #[serde(rename = "SEG-RR")]
    SegRr,
    #[serde(rename = "SEG-FF")]
    SegFf,
    #[serde(rename = "SEG-FFA")]
    SegFfa,
    #[serde(rename = "SEG-RRA")]
    SegRra,
    #[serde(rename = "SEG-USA")]
    SegUsa,
    #[serde(rename = "DSEG")]
    Dseg,
    #[serde(rename = "EG")]
    Eg,
    #[serde(rename = "EGPLUS")]
    EgPlus,
}

/// How the extrapolation stepsize `α` relates to the update stepsize `β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaRule {
    /// `α = β`
    Equal,
    /// `α = β/2`
    Half,
}

/// How component indices are drawn within an epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    Uniform,
    Reshuffle,
    FlipFlop,
    /// Two independent uniform indices per iteration.
    IndependentUniform,
    /// Full gradient, no sampling.
    Deterministic,
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::SgdaUs,
        Family::SgdaRr,
        Family::SegUs,
        Family::SegRr,
        Family::SegFf,
        Family::SegFfa,
        Family::SegRra,
        Family::SegUsa,
        Family::Dseg,
        Family::Eg,
        Family::EgPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::SgdaUs => "SGDA-US",
            Family::SgdaRr => "SGDA-RR",
            Family::SegUs => "SEG-US",
            Family::SegRr => "SEG-RR",
            Family::SegFf => "SEG-FF",
            Family::SegFfa => "SEG-FFA",
            Family::SegRra => "SEG-RRA",
            Family::SegUsa => "SEG-USA",
            Family::Dseg => "DSEG",
            Family::Eg => "EG",
            Family::EgPlus => "EGPLUS",
        }
    }

    pub fn sampling(self) -> Sampling {
        match self {
            Family::SgdaUs | Family::SegUs | Family::SegUsa => Sampling::Uniform,
            Family::SgdaRr | Family::SegRr | Family::SegRra => Sampling::Reshuffle,
            Family::SegFf | Family::SegFfa => Sampling::FlipFlop,
            Family::Dseg => Sampling::IndependentUniform,
            Family::Eg | Family::EgPlus => Sampling::Deterministic,
        }
    }

    pub fn is_sgda(self) -> bool {
        matches!(self, Family::SgdaUs | Family::SgdaRr)
    }

    pub fn is_anchored(self) -> bool {
        matches!(self, Family::SegFfa | Family::SegRra | Family::SegUsa)
    }

    /// Number of passes over the data one epoch makes.
    pub fn passes_per_epoch(self) -> usize {
        match self.sampling() {
            Sampling::FlipFlop => 2,
            _ => 1,
        }
    }

    /// Whether the alpha rule is a free choice for this family.
    fn alpha_rule_free(self) -> bool {
        !matches!(
            self,
            Family::SegFfa | Family::SgdaUs | Family::SgdaRr | Family::Dseg | Family::Eg | Family::EgPlus
        )
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('_', "-");
        let key = if key == "EG+" { "EGPLUS".to_string() } else { key };
        Family::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method family '{s}'")))
    }
}

/// A method: family plus its stepsize coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub family: Family,
    pub alpha_rule: AlphaRule,
    /// `η2/η1` for EG+; 1 otherwise.
    #[serde(default = "one")]
    pub eg_plus_ratio: f64,
}

fn one() -> f64 {
    1.0
}

impl MethodSpec {
    /// Default coupling: `α = β/2` for SEG-FFA, `α = β` for everything else.
    pub fn new(family: Family) -> Self {
        let alpha_rule = if family == Family::SegFfa {
            AlphaRule::Half
        } else {
            AlphaRule::Equal
        };
        Self {
            family,
            alpha_rule,
            eg_plus_ratio: 1.0,
        }
    }

    /// SEG-FFA keeps `α = β/2` whatever is requested.
    pub fn with_alpha_rule(mut self, rule: AlphaRule) -> Self {
        if self.family.alpha_rule_free() {
            self.alpha_rule = rule;
        }
        self
    }

    pub fn eg_plus(ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return invalid("EG+ ratio must be positive");
        }
        Ok(Self {
            family: Family::EgPlus,
            alpha_rule: AlphaRule::Equal,
            eg_plus_ratio: ratio,
        })
    }

    /// `(α, β)` for a base stepsize `η`.
    pub fn stepsizes(&self, eta: f64) -> (f64, f64) {
        if self.family.is_sgda() {
            return (0.0, eta);
        }
        match self.alpha_rule {
            AlphaRule::Equal => (eta, eta),
            AlphaRule::Half => (eta / 2.0, eta),
        }
    }

    /// Short label, e.g. `SEG-RRA` or `SEG-RRA-half`.
    pub fn label(&self) -> String {
        match self.family {
            Family::EgPlus => format!("EGPLUS-{}", self.eg_plus_ratio),
            f if f.alpha_rule_free() && self.alpha_rule == AlphaRule::Half => {
                format!("{}-half", f.name())
            }
            f => f.name().to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.family == Family::SegFfa && self.alpha_rule != AlphaRule::Half {
            return invalid("SEG-FFA uses alpha = beta/2");
        }
        if !(self.eg_plus_ratio > 0.0) {
            return invalid("EG+ ratio must be positive");
        }
        Ok(())
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for MethodSpec {
    type Err = Error;

    /// Accepts the labels produced by [`MethodSpec::label`].
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let upper = s.to_ascii_uppercase();
        if let Some(ratio) = upper.strip_prefix("EGPLUS-") {
            let r: f64 = ratio
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad EG+ ratio in '{s}'")))?;
            return MethodSpec::eg_plus(r);
        }
        if let Some(base) = upper.strip_suffix("-HALF") {
            let fam: Family = base.parse()?;
            if !fam.alpha_rule_free() && fam != Family::SegFfa {
                return invalid(format!("{} has no alpha rule choice", fam.name()));
            }
            return Ok(MethodSpec::new(fam).with_alpha_rule(AlphaRule::Half));
        }
        Ok(MethodSpec::new(upper.parse()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ffa_forces_half() {
        let m = MethodSpec::new(Family::SegFfa).with_alpha_rule(AlphaRule::Equal);
        assert_eq!(m.alpha_rule, AlphaRule::Half);
        assert_eq!(m.stepsizes(0.2), (0.1, 0.2));
    }

    #[test]
    fn labels_round_trip() {
        for fam in Family::ALL {
            let m = MethodSpec::new(fam);
            assert_eq!(m.label().parse::<MethodSpec>().unwrap(), m);
        }
        let m = MethodSpec::new(Family::SegRra).with_alpha_rule(AlphaRule::Half);
        assert_eq!(m.label(), "SEG-RRA-half");
        assert_eq!("seg-rra-half".parse::<MethodSpec>().unwrap(), m);
        assert_eq!("EGPLUS-2".parse::<MethodSpec>().unwrap().eg_plus_ratio, 2.0);
        assert!("SEG-XX".parse::<MethodSpec>().is_err());
    }

    #[test]
    fn pass_accounting() {
        assert_eq!(Family::SegFf.passes_per_epoch(), 2);
        assert_eq!(Family::SegFfa.passes_per_epoch(), 2);
        assert_eq!(Family::SegRra.passes_per_epoch(), 1);
        assert_eq!(Family::Dseg.passes_per_epoch(), 1);
    }

    #[test]
    fn sgda_has_no_extrapolation() {
        assert_eq!(MethodSpec::new(Family::SgdaRr).stepsizes(0.3), (0.0, 0.3));
    }
}
