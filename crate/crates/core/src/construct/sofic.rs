use std::collections::{BTreeMap, BTreeSet};

use super::wreath::{WreathPlan, WreathScenario};
use super::{wreath_parts, QuotientProvider};
use crate::approx::{ApproxParams, CoordPerm, QuasiAction};
use crate::error::{parameter, Error, Result};
use crate::groups::{Element, Group, Perm};

/// The action of `G ≀ H` on `Y = X^{H/N}` given by
/// `δ^{ψ(hb)}(kN) = δ(kh^{-1}N)^{τ(b,k)}`, where `τ(b,k) = φ(b(k'))` for
/// the unique `k' ∈ E ∩ kN`, and 1 when there is none.
pub fn build_sofic_wreath(
    phi: &QuasiAction,
    w: &Group,
    f: Vec<Element>,
    epsilon: f64,
    provider: &QuotientProvider,
) -> Result<(WreathScenario, QuasiAction)> {
    let (bottom, _) = wreath_parts(w)?;
    if bottom != &phi.source {
        return Err(Error::Structural(format!(
            "the input action is of {}, but the wreath bottom is {}",
            phi.source.describe(),
            bottom.describe()
        )));
    }
    if phi.coords() != 1 {
        return Err(Error::Structural("the input action must act on a plain point set".into()));
    }
    let params = ApproxParams::new(f, epsilon)?;
    let plan = WreathPlan::new(w, &params.f, provider)?;
    let x = phi.base();
    let m = plan.m;
    // |X|^{-m/2} < ε
    let fixed_bound = (x as f64).powf(-(m as f64) / 2.0);
    if fixed_bound >= epsilon {
        return Err(parameter(format!(
            "|X|^(-m/2) = {fixed_bound} is not below epsilon = {epsilon}; use a larger point set or quotient"
        )));
    }
    let missing: Vec<Element> = plan
        .needed_inputs(bottom)?
        .into_iter()
        .filter(|g| phi.image(g).is_err())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Coverage { missing });
    }

    let index: BTreeMap<&Element, usize> = plan.cosets.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let image = plan.quotient.image();
    let mut domain = BTreeSet::new();
    for g in &params.f {
        domain.insert(g.clone());
        for h in &params.f {
            domain.insert(w.multiply(g, h)?);
        }
    }
    let mut table = Vec::with_capacity(domain.len());
    for g in domain {
        let we = g.as_wreath()?;
        let head_inv = image.invert(&plan.quotient.apply(&we.head)?)?;
        let mut source = Vec::with_capacity(m);
        let mut taus = Vec::with_capacity(m);
        for c in &plan.cosets {
            source.push(index[&image.multiply(c, &head_inv)?]);
            taus.push(match plan.base_value(&we.base, c) {
                Some(v) => phi.image(v)?.as_plain().expect("plain action").clone(),
                None => Perm::identity(x),
            });
        }
        table.push((g, CoordPerm::new(x, source, taus)?));
    }
    let action = QuasiAction::new(w.clone(), x, m, params, table)?;
    Ok((plan.scenario(epsilon), action))
}
