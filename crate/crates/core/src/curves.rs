//! Normalized single-attribute utility curves and product models.

use std::sync::Arc;

use crate::domain::AttributeSpace;
use crate::engine::{JointUtility, UtilityModel};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurveFamily {
    /// Constant absolute risk aversion `gamma` (per attribute unit).
    Exponential {
        gamma: f64,
    },
    Linear,
    Power {
        exponent: f64,
    },
}

/// A strictly increasing curve on `[min, max]` with value 0 at `min` and 1
/// at `max`.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityCurve {
    family: CurveFamily,
    min: f64,
    max: f64,
}

impl UtilityCurve {
    pub fn new(family: CurveFamily, min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidCurve(format!(
                "range [{min}, {max}] is empty or non-finite"
            )));
        }
        match family {
            CurveFamily::Exponential { gamma } if !gamma.is_finite() => {
                return Err(Error::InvalidCurve(format!("gamma {gamma} is not finite")));
            }
            CurveFamily::Power { exponent } if !(exponent.is_finite() && exponent > 0.0) => {
                return Err(Error::InvalidCurve(format!(
                    "power exponent {exponent} must be positive"
                )));
            }
            _ => {}
        }
        Ok(UtilityCurve { family, min, max })
    }

    pub fn exponential(gamma: f64, min: f64, max: f64) -> Result<Self> {
        Self::new(CurveFamily::Exponential { gamma }, min, max)
    }

    pub fn linear(min: f64, max: f64) -> Result<Self> {
        Self::new(CurveFamily::Linear, min, max)
    }

    pub fn power(exponent: f64, min: f64, max: f64) -> Result<Self> {
        Self::new(CurveFamily::Power { exponent }, min, max)
    }

    pub fn family(&self) -> CurveFamily {
        self.family
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= self.min && x <= self.max) {
            return Err(Error::InvalidArgument(format!(
                "curve argument {x} outside [{}, {}]",
                self.min, self.max
            )));
        }
        let span = self.max - self.min;
        let offset = x - self.min;
        let u = match self.family {
            CurveFamily::Linear => offset / span,
            CurveFamily::Exponential { gamma: 0.0 } => offset / span,
            // (1 - e^{-g x'}) / (1 - e^{-g span}); expm1 keeps small g accurate.
            CurveFamily::Exponential { gamma } => {
                (-gamma * offset).exp_m1() / (-gamma * span).exp_m1()
            }
            CurveFamily::Power { exponent } => (offset / span).powf(exponent),
        };
        Ok(u + 0.0)
    }
}

/// Utility-independent model whose joint utility is the product of the
/// per-attribute curves.
pub fn product_model(
    curves: Vec<UtilityCurve>,
    space: Arc<AttributeSpace>,
    context: &str,
) -> Result<UtilityModel> {
    UtilityModel::new(space, JointUtility::Product(curves), context)
}

/// Both sides of the two-period profit example: the disjunction of
/// `1 - e^{-gamma x}` and `1 - e^{-beta y}` composed by inclusion-exclusion
/// with a product conjunction, and the closed form `1 - e^{-(gamma x + beta y)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NpvCheck {
    pub composed: f64,
    pub closed_form: f64,
}

pub fn npv_disjunction_check(gamma: f64, beta: f64, x: f64, y: f64) -> Result<NpvCheck> {
    if !(gamma > 0.0 && gamma.is_finite() && beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "risk aversion coefficients must be positive, got gamma={gamma}, beta={beta}"
        )));
    }
    if !(x >= 0.0 && x.is_finite() && y >= 0.0 && y.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "profits must be nonnegative, got x={x}, y={y}"
        )));
    }
    let ux = 1.0 - (-gamma * x).exp();
    let uy = 1.0 - (-beta * y).exp();
    Ok(NpvCheck {
        composed: ux + uy - ux * uy,
        closed_form: 1.0 - (-(gamma * x + beta * y)).exp(),
    })
}
