//! Boundary value analysis over inclusive ranges.
//!
//! Each bounded numeric field yields `[min, min+step, max-step, max,
//! nominal]`, deduplicated and clipped to the range. A suite is the cross
//! product of those lists with the first field varying fastest.

use std::collections::BTreeMap;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Frame, Scalar, TestCase, TestSuite, TypeClass, ValueConstraint};
use crate::par::*;

/// How the interior (nominal) value of each boundary list is chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind")]
pub enum NominalStrategy {
    /// `floor((min + max) / 2)` for integers, the exact midpoint for decimals.
    #[default]
    FloorMidpoint,
    /// Fixed per-field nominals; fields not listed fall back to the midpoint.
    Explicit { values: BTreeMap<String, Decimal> },
}

impl NominalStrategy {
    pub fn explicit<I, K>(values: I) -> Self
    where
        I: IntoIterator<Item = (K, i64)>,
        K: Into<String>,
    {
        NominalStrategy::Explicit {
            values: values
                .into_iter()
                .map(|(k, v)| (k.into(), Decimal::from(v)))
                .collect(),
        }
    }
}

pub fn default_epsilon() -> Decimal {
    Decimal::new(1, 2)
}

/// Strategy plus the step used for decimal-typed fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BvaConfig {
    #[serde(flatten)]
    pub strategy: NominalStrategy,
    #[serde(rename = "epsilon", default = "default_epsilon")]
    pub float_epsilon: Decimal,
}

impl Default for BvaConfig {
    fn default() -> Self {
        Self {
            strategy: NominalStrategy::default(),
            float_epsilon: default_epsilon(),
        }
    }
}

impl BvaConfig {
    pub fn new(strategy: NominalStrategy) -> Self {
        Self {
            strategy,
            ..Self::default()
        }
    }

    fn nominal(&self, c: &ValueConstraint, class: TypeClass, min: Decimal, max: Decimal) -> Result<Decimal> {
        if let NominalStrategy::Explicit { values } = &self.strategy {
            if let Some(&v) = values.get(&c.field_name) {
                let integral_ok = class != TypeClass::Integer || v.fract().is_zero();
                if !(min < v && v < max) || !integral_ok {
                    return Err(Error::InvalidNominal {
                        field: c.field_name.clone(),
                        value: v.to_string(),
                        min: min.to_string(),
                        max: max.to_string(),
                    });
                }
                return Ok(v);
            }
        }
        let mid = (min + max) / Decimal::TWO;
        Ok(match class {
            TypeClass::Integer => mid.floor(),
            _ => mid,
        })
    }
}

fn to_scalar(value: Decimal, class: TypeClass) -> Scalar {
    match class {
        TypeClass::Integer => Scalar::Int(i64::try_from(value).expect("integer bounds fit in i64")),
        _ => Scalar::Decimal(value.normalize()),
    }
}

/// Ordered, duplicate-free boundary values for one field.
pub fn boundary_values(c: &ValueConstraint, config: &BvaConfig) -> Result<Vec<Scalar>> {
    let class = c.type_class();
    if !class.is_numeric() {
        return Err(Error::NonNumeric {
            field: c.field_name.clone(),
            base_type: c.base_type.clone(),
        });
    }
    let (min, max) = c.bounds().ok_or_else(|| Error::Unbounded {
        field: c.field_name.clone(),
    })?;
    let step = match class {
        TypeClass::Integer => Decimal::ONE,
        _ => config.float_epsilon,
    };
    let nominal = config.nominal(c, class, min, max)?;

    let mut values: Vec<Decimal> = Vec::with_capacity(5);
    for v in [min, min + step, max - step, max, nominal] {
        if min <= v && v <= max && !values.contains(&v) {
            values.push(v);
        }
    }
    Ok(values.into_iter().map(|v| to_scalar(v, class)).collect())
}

/// Cross product of the boundary lists of every constraint, first field
/// fastest. An empty constraint list yields no frames.
pub fn cross_product_frames(constraints: &[ValueConstraint], config: &BvaConfig) -> Result<Vec<Frame>> {
    if constraints.is_empty() {
        return Ok(Vec::new());
    }
    let lists = constraints
        .iter()
        .map(|c| boundary_values(c, config))
        .collect::<Result<Vec<_>>>()?;
    let total: usize = lists.iter().map(Vec::len).product();

    Ok((0..total)
        .into_par_iter()
        .map(|index| {
            let mut rest = index;
            let mut frame = Frame::new();
            for (c, values) in constraints.iter().zip(&lists) {
                frame.insert(c.field_name.clone(), values[rest % values.len()].clone());
                rest /= values.len();
            }
            frame
        })
        .collect())
}

/// Builds the full boundary-value suite with ids `TC1`, `TC2`, ...
pub fn generate_suite(
    constraints: &[ValueConstraint],
    config: &BvaConfig,
    element_name: &str,
) -> Result<TestSuite> {
    let cases = cross_product_frames(constraints, config)?
        .into_iter()
        .enumerate()
        .map(|(i, values)| TestCase::new(format!("TC{}", i + 1), values))
        .collect();
    TestSuite::new(element_name, Some(config.clone()), cases)
}
