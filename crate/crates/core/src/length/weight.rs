use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Exponent;
use crate::error::{parameter, Error, Result};
use crate::groups::Element;

/// A weight function `δ`: zero at the identity, positive elsewhere, at most 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightFunction {
    /// `δ_g = c` for every `g ≠ 1`.
    Constant { c: f64 },
    /// Explicit values; elements not listed fall back to `default`.
    Table {
        values: Vec<(Element, f64)>,
        #[serde(default)]
        default: Option<f64>,
    },
    /// `δ((g, h)) = ((δ^G(g)^p + δ^H(h)^p) / 2)^{1/p}`.
    Direct {
        p: Exponent,
        left: Box<WeightFunction>,
        right: Box<WeightFunction>,
    },
    /// `β_{hb} = 1` when `h ≠ 1`, otherwise `max_k δ_{b(k)}`.
    WreathMax { inner: Box<WeightFunction> },
}

impl WeightFunction {
    pub fn constant(c: f64) -> Result<WeightFunction> {
        check_range(c)?;
        Ok(WeightFunction::Constant { c })
    }

    pub fn table(values: BTreeMap<Element, f64>, default: Option<f64>) -> Result<WeightFunction> {
        for v in values.values().chain(default.iter()) {
            check_range(*v)?;
        }
        Ok(WeightFunction::Table {
            values: values.into_iter().collect(),
            default,
        })
    }

    pub fn direct(left: WeightFunction, right: WeightFunction, p: Exponent) -> WeightFunction {
        WeightFunction::Direct {
            p,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn wreath_max(inner: WeightFunction) -> WeightFunction {
        WeightFunction::WreathMax {
            inner: Box::new(inner),
        }
    }

    /// The constant value when the weight is constant off the identity.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            WeightFunction::Constant { c } => Some(*c),
            _ => None,
        }
    }

    /// Re-validates values after deserialisation.
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightFunction::Constant { c } => check_range(*c),
            WeightFunction::Table { values, default } => {
                for (_, v) in values {
                    check_range(*v)?;
                }
                default.map(check_range).transpose().map(|_| ())
            }
            WeightFunction::Direct { left, right, .. } => {
                left.validate()?;
                right.validate()
            }
            WeightFunction::WreathMax { inner } => inner.validate(),
        }
    }

    pub fn value(&self, g: &Element) -> Result<f64> {
        if g.is_identity() {
            return Ok(0.0);
        }
        match self {
            WeightFunction::Constant { c } => Ok(*c),
            WeightFunction::Table { values, default } => values
                .iter()
                .find(|(e, _)| e == g)
                .map(|(_, v)| *v)
                .or(*default)
                .ok_or_else(|| Error::Coverage {
                    missing: vec![g.clone()],
                }),
            WeightFunction::Direct { p, left, right } => {
                let (x, y) = g.as_pair()?;
                Ok(p.combine(left.value(x)?, right.value(y)?))
            }
            WeightFunction::WreathMax { inner } => {
                let w = g.as_wreath()?;
                if !w.head.is_identity() {
                    return Ok(1.0);
                }
                w.base
                    .values()
                    .try_fold(0.0f64, |acc, v| Ok(acc.max(inner.value(v)?)))
            }
        }
    }
}

fn check_range(c: f64) -> Result<()> {
    if c > 0.0 && c <= 1.0 {
        Ok(())
    } else {
        Err(parameter(format!("weights must lie in (0, 1], got {c}")))
    }
}
