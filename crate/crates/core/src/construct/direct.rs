use serde::Serialize;

use crate::approx::{ApproxParams, ApproximationMap};
use crate::error::{Error, Result};
use crate::groups::{Element, Group};
use crate::length::{Exponent, LengthFunction, WeightFunction};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectScenario {
    pub p: Exponent,
    pub left_epsilon: f64,
    pub right_epsilon: f64,
    pub epsilon: f64,
    pub f_size: usize,
}

/// `φ((g, h)) = (φ_G(g), φ_H(h))` into `J × K` with the `L^p` length and
/// weight. `f` defaults to `F_G × F_H` and must lie inside it.
pub fn build_direct_product(
    left: &ApproximationMap,
    right: &ApproximationMap,
    p: Exponent,
    f: Option<Vec<Element>>,
) -> Result<(DirectScenario, ApproximationMap)> {
    let f = match f {
        Some(f) => {
            let outside: Vec<Element> = f
                .iter()
                .filter(|x| match x.as_pair() {
                    Ok((g, h)) => !left.params.f.contains(g) || !right.params.f.contains(h),
                    Err(_) => true,
                })
                .cloned()
                .collect();
            if !outside.is_empty() {
                return Err(Error::Coverage { missing: outside });
            }
            f
        }
        None => left
            .params
            .f
            .iter()
            .flat_map(|g| right.params.f.iter().map(move |h| Element::pair(g.clone(), h.clone())))
            .collect(),
    };
    let epsilon = left.params.epsilon.max(right.params.epsilon);
    let scenario = DirectScenario {
        p,
        left_epsilon: left.params.epsilon,
        right_epsilon: right.params.epsilon,
        epsilon,
        f_size: f.len(),
    };
    let map = ApproximationMap::from_fn(
        Group::direct(left.source.clone(), right.source.clone()),
        Group::direct(left.target.clone(), right.target.clone()),
        LengthFunction::lp(left.target_length.clone(), right.target_length.clone(), p),
        WeightFunction::direct(left.weight.clone(), right.weight.clone(), p),
        ApproxParams::new(f, epsilon)?,
        |x| {
            let (g, h) = x.as_pair()?;
            Ok(Element::pair(left.image(g)?.clone(), right.image(h)?.clone()))
        },
    )?;
    Ok((scenario, map))
}
