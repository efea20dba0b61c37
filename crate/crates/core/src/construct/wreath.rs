use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{compute_d, compute_e, wreath_parts, QuotientProvider};
use crate::approx::{ApproxParams, ApproximationMap};
use crate::error::{Error, Result};
use crate::groups::{Element, FiniteSupport, Group};
use crate::length::{LengthFunction, WeightFunction};
use crate::witnesses::{QuotientMap, QuotientSummary};

/// The auxiliary data chosen for a wreath construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WreathScenario {
    #[serde(rename = "E")]
    pub e: Vec<Element>,
    #[serde(rename = "D")]
    pub d: Vec<Element>,
    pub quotient: QuotientSummary,
    /// `|H/N|`.
    pub m: usize,
    pub epsilon: f64,
}

/// Shared front half of the wreath constructions: `E`, `D`, a separating
/// quotient, and the map `k' ↦ k'N` restricted to `E`.
pub(crate) struct WreathPlan {
    pub e: Vec<Element>,
    pub d: Vec<Element>,
    pub quotient: QuotientMap,
    pub cosets: Vec<Element>,
    pub m: usize,
    /// `kN ↦ k'` for the unique `k' ∈ E ∩ kN`.
    pub representative: BTreeMap<Element, Element>,
}

impl WreathPlan {
    pub fn new(w: &Group, f: &[Element], provider: &QuotientProvider) -> Result<WreathPlan> {
        let (_, top) = wreath_parts(w)?;
        for x in f {
            w.check(x)?;
        }
        let e = compute_e(top, f)?;
        let d = compute_d(f)?;
        let quotient = provider.resolve(top, &e)?;
        let cosets = quotient.image().elements()?;
        let mut representative = BTreeMap::new();
        for k in &e {
            representative.insert(quotient.apply(k)?, k.clone());
        }
        Ok(WreathPlan {
            m: cosets.len(),
            e,
            d,
            quotient,
            cosets,
            representative,
        })
    }

    /// `{1} ∪ D ∪ D·D`: where the input map must be defined.
    pub fn needed_inputs(&self, bottom: &Group) -> Result<Vec<Element>> {
        let mut out = BTreeSet::new();
        out.insert(bottom.identity());
        for x in &self.d {
            out.insert(x.clone());
            for y in &self.d {
                out.insert(bottom.multiply(x, y)?);
            }
        }
        Ok(out.into_iter().collect())
    }

    /// `b(k')` for the representative `k'` of coset `c`, if any.
    pub fn base_value<'a>(&self, b: &'a FiniteSupport, coset: &Element) -> Option<&'a Element> {
        self.representative.get(coset).and_then(|k| b.get(k))
    }

    pub fn scenario(&self, epsilon: f64) -> WreathScenario {
        WreathScenario {
            e: self.e.clone(),
            d: self.d.clone(),
            quotient: self.quotient.summary(),
            m: self.m,
            epsilon,
        }
    }
}

/// `ψ(hb) = h̄ b̂` into `J ≀ (H/N)`, where `b̂(kN) = φ(b(k'))` for the
/// unique `k' ∈ E ∩ kN`, and 1 when there is none.
pub fn build_wreath(
    phi: &ApproximationMap,
    w: &Group,
    f: Vec<Element>,
    provider: &QuotientProvider,
) -> Result<(WreathScenario, ApproximationMap)> {
    let (bottom, _) = wreath_parts(w)?;
    if bottom != &phi.source {
        return Err(Error::Structural(format!(
            "the input map is defined on {}, but the wreath bottom is {}",
            phi.source.describe(),
            bottom.describe()
        )));
    }
    let plan = WreathPlan::new(w, &f, provider)?;
    let missing: Vec<Element> = plan
        .needed_inputs(bottom)?
        .into_iter()
        .filter(|x| phi.image(x).is_err())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Coverage { missing });
    }
    let epsilon = phi.params.epsilon;
    let target = Group::wreath(phi.target.clone(), plan.quotient.image().clone());
    let map = ApproximationMap::from_fn(
        w.clone(),
        target,
        LengthFunction::wreath_max(phi.target_length.clone()),
        WeightFunction::wreath_max(phi.weight.clone()),
        ApproxParams::new(f, epsilon)?,
        |x| {
            let we = x.as_wreath()?;
            let mut base = FiniteSupport::new();
            for c in &plan.cosets {
                if let Some(v) = plan.base_value(&we.base, c) {
                    base.set(c.clone(), phi.image(v)?.clone());
                }
            }
            Ok(Element::wreath(plan.quotient.apply(&we.head)?, base))
        },
    )?;
    Ok((plan.scenario(epsilon), map))
}
