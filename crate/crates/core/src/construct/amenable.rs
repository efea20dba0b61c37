use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::FolnerProvider;
use crate::approx::{
    is_quasi_homomorphism, ApproxParams, ApproximationMap, CheckBudget, QhomMode,
};
use crate::error::{parameter, structural, Error, Result};
use crate::groups::{Element, FiniteSupport, Group, Perm};
use crate::length::{LengthFunction, WeightFunction};
use crate::witnesses::{FolnerSet, QuotientMap, QuotientRule, QuotientSummary};

/// How `φ(g) ∈ Sym(A)` is completed on points `a` with `āḡ ∉ Ā`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PermutationRule {
    /// Unmatched points go to unused targets in ascending order.
    #[default]
    Ascending,
    /// Unmatched points go to unused targets in descending order.
    Descending,
    /// Addition mod `2m + 1` on a box `[−m, m]` in `ℤ`. Makes `φ` a
    /// homomorphism, so the max-type wreath length can be used.
    CyclicShift,
}

/// Result of checking the input map on `E`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputCheck {
    pub max_defect: f64,
    pub min_slack: Option<f64>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmenableScenario {
    pub quotient: QuotientSummary,
    pub kernel_trivial: bool,
    pub folner: FolnerSet,
    #[serde(rename = "A")]
    pub a: Vec<Element>,
    #[serde(rename = "E")]
    pub e: Vec<Element>,
    pub c: Option<f64>,
    pub beta: f64,
    pub epsilon: f64,
    pub output_epsilon: f64,
    pub rule: PermutationRule,
    pub input_check: InputCheck,
}

fn kernel_is_trivial(q: &QuotientMap) -> bool {
    fn rule(r: &QuotientRule, source: &Group) -> bool {
        match (r, source) {
            (QuotientRule::Identity, _) => true,
            (QuotientRule::Reduce { .. }, _) => false,
            (QuotientRule::Direct(ra, rb), Group::Direct(a, b)) => rule(ra, a) && rule(rb, b),
            (QuotientRule::Cosets(t), _) => t.kernel().len() == 1,
            (QuotientRule::DropLeft, Group::Direct(a, _)) => a.order() == Some(1),
            _ => false,
        }
    }
    rule(q.rule(), q.source())
}

/// `Φ(g) = (φ(g), b)` into `K ≀ Sym(A)` with `A = σ(Ā)`,
/// `a^{φ(g)} = σ(ag)` when `āḡ ∈ Ā`, and `b(a) = ψ(σ(ag^{-1}) g a^{-1})`.
///
/// `psi` is defined on elements of `G` lying in the kernel `N` of
/// `quotient`; its weight must be constant on `N ∖ {1}` unless `N` is
/// trivial.
#[allow(clippy::too_many_arguments)]
pub fn build_amenable_extension(
    psi: &ApproximationMap,
    quotient: &QuotientMap,
    folner: &FolnerProvider,
    f: Vec<Element>,
    epsilon: f64,
    rule: PermutationRule,
    budget: &CheckBudget,
) -> Result<(AmenableScenario, ApproximationMap)> {
    let g = quotient.source();
    if &psi.source != g {
        return Err(structural(format!(
            "the input map must be tabulated on elements of {}",
            g.describe()
        )));
    }
    let params = ApproxParams::new(f, epsilon)?;
    let kernel_trivial = kernel_is_trivial(quotient);
    let c = psi.weight.constant_value();
    let beta = if kernel_trivial {
        0.5
    } else {
        let c = c.ok_or_else(|| parameter("the input weight must be constant on N \\ {1}"))?;
        if !(epsilon < 0.5_f64.min(1.0 - c)) {
            return Err(parameter(format!(
                "epsilon = {epsilon} must be below min(1/2, 1 - c) = {}",
                0.5_f64.min(1.0 - c)
            )));
        }
        c
    };
    if !(epsilon < 0.5) {
        return Err(parameter(format!("epsilon = {epsilon} must be below 1/2")));
    }
    for (x, _) in psi.assignments() {
        if !quotient.in_kernel(x)? {
            return Err(structural(format!("the input map is defined at {x}, outside N")));
        }
    }

    // Følner set for the images of F ∪ F⁻¹ ∪ F·F ∪ F⁻¹·F⁻¹.
    let inverses: Vec<Element> = params.f.iter().map(|x| g.invert(x)).collect::<Result<_>>()?;
    let mut translations = BTreeSet::new();
    for x in params.f.iter().chain(&inverses) {
        translations.insert(quotient.apply(x)?);
    }
    for (set, _) in [(&params.f, ()), (&inverses, ())] {
        for x in set {
            for y in set {
                translations.insert(quotient.apply(&g.multiply(x, y)?)?);
            }
        }
    }
    let translations: Vec<Element> = translations.into_iter().collect();
    let folner_set = folner.resolve(quotient.image(), &translations, epsilon)?;
    let a_bar = &folner_set.elements;
    let position: BTreeMap<&Element, usize> = a_bar.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let a: Vec<Element> = a_bar.iter().map(|x| quotient.section(x)).collect::<Result<_>>()?;
    let a_inv: Vec<Element> = a.iter().map(|x| g.invert(x)).collect::<Result<_>>()?;
    let n = a.len();

    let cyclic_radius = match rule {
        PermutationRule::CyclicShift => match (quotient.image(), folner_set.radius) {
            (Group::Lattice { d: 1 }, Some(m)) => Some(m as i64),
            _ => {
                return Err(parameter(
                    "the cyclic-shift rule needs a box in Z as the Følner set",
                ))
            }
        },
        _ => None,
    };

    // E = N ∩ (A·F·A⁻¹)
    let mut e = BTreeSet::new();
    for x in &a {
        for y in &params.f {
            let xy = g.multiply(x, y)?;
            for z in &a_inv {
                let w = g.multiply(&xy, z)?;
                if quotient.in_kernel(&w)? {
                    e.insert(w);
                }
            }
        }
    }
    let e: Vec<Element> = e.into_iter().collect();

    let mut domain = BTreeSet::new();
    for x in &params.f {
        domain.insert(x.clone());
        for y in &params.f {
            domain.insert(g.multiply(x, y)?);
        }
    }
    domain.insert(g.identity());

    let head = |x: &Element| -> Result<Perm> {
        let x_bar = quotient.apply(x)?;
        let mut images = vec![usize::MAX; n];
        if let Some(radius) = cyclic_radius {
            let shift = x_bar.as_lattice()?[0];
            let side = 2 * radius + 1;
            for (i, p) in a_bar.iter().enumerate() {
                let v = p.as_lattice()?[0];
                let t = Element::lattice1((v + shift + radius).rem_euclid(side) - radius);
                images[i] = position[&t];
            }
            return Perm::new(images);
        }
        let mut used = vec![false; n];
        for (i, p) in a_bar.iter().enumerate() {
            if let Some(&j) = position.get(&quotient.image().multiply(p, &x_bar)?) {
                images[i] = j;
                used[j] = true;
            }
        }
        let mut free: Vec<usize> = (0..n).filter(|&j| !used[j]).collect();
        if rule == PermutationRule::Descending {
            free.reverse();
        }
        let mut free = free.into_iter();
        for img in images.iter_mut().filter(|v| **v == usize::MAX) {
            *img = free.next().expect("as many free targets as unmatched points");
        }
        Perm::new(images)
    };
    // Arguments of ψ in b(a) = ψ(σ(ag⁻¹) g a⁻¹).
    let arguments = |x: &Element| -> Result<Vec<Element>> {
        let x_inv = g.invert(x)?;
        (0..n)
            .map(|i| {
                let lifted = quotient.lift(&g.multiply(&a[i], &x_inv)?)?;
                g.multiply(&g.multiply(&lifted, x)?, &a_inv[i])
            })
            .collect()
    };

    let mut needed = BTreeSet::new();
    needed.extend(e.iter().cloned());
    for x in &domain {
        needed.extend(arguments(x)?);
    }
    let missing: Vec<Element> = needed.into_iter().filter(|x| psi.image(x).is_err()).collect();
    if !missing.is_empty() {
        return Err(Error::Coverage { missing });
    }

    let psi_on_e = ApproximationMap::new(
        psi.source.clone(),
        psi.target.clone(),
        psi.target_length.clone(),
        psi.weight.clone(),
        ApproxParams::new(e.clone(), epsilon)?,
        psi.assignments().map(|(k, v)| (k.clone(), v.clone())),
    )?;
    let verdict = is_quasi_homomorphism(&psi_on_e, QhomMode::Weighted, budget)?;
    let input_check = InputCheck {
        max_defect: verdict.report.max_defect,
        min_slack: verdict.report.min_slack,
        holds: verdict.holds,
    };

    let target_length = match rule {
        PermutationRule::CyclicShift => LengthFunction::wreath_max(psi.target_length.clone()),
        _ => LengthFunction::wreath_avg(psi.target_length.clone()),
    };
    let output_epsilon = 5.0 * epsilon;
    let mut table = Vec::with_capacity(domain.len());
    for x in &domain {
        let alpha = head(x)?;
        let base = FiniteSupport::from_entries(
            arguments(x)?
                .iter()
                .enumerate()
                .map(|(i, arg)| Ok((Element::Table(i), psi.image(arg)?.clone())))
                .collect::<Result<Vec<_>>>()?,
        );
        table.push((x.clone(), Element::wreath(Element::Perm(alpha), base)));
    }
    let map = ApproximationMap::new(
        g.clone(),
        Group::perm_wreath(psi.target.clone(), n),
        target_length,
        WeightFunction::constant(beta)?,
        ApproxParams::new(params.f, output_epsilon)?,
        table,
    )?;
    let scenario = AmenableScenario {
        quotient: quotient.summary(),
        kernel_trivial,
        a,
        e,
        c,
        beta,
        epsilon,
        output_epsilon,
        rule,
        input_check,
        folner: folner_set,
    };
    Ok((scenario, map))
}
