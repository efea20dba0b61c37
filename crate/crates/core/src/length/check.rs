use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{Exponent, LengthFunction};
use crate::error::{structural, Error, Result};
use crate::groups::{Element, Group, Matrix};

/// Absolute slack for every floating-point axiom comparison.
pub const AXIOM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub enum CheckMode {
    /// Every element and every ordered pair of a finite group.
    Exhaustive,
    /// The listed pairs, plus every element that occurs in them.
    Pairs(Vec<(Element, Element)>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    /// `ℓ(1) = 0`.
    IdentityZero,
    /// `ℓ(x) > 0` for `x ≠ 1`.
    PositiveOffIdentity,
    /// `0 ≤ ℓ(x) ≤ 1`.
    Range,
    /// `ℓ(x^{-1}) = ℓ(x)`.
    Symmetry,
    /// `ℓ(xy) ≤ ℓ(x) + ℓ(y)`.
    Subadditivity,
    /// `ℓ(x y x^{-1}) = ℓ(y)`.
    ConjugationInvariance,
    /// `ℓ([x, y]) ≤ 4 ℓ(x) ℓ(y)`.
    CommutatorContractive,
}

/// One failing instance, with the elements and the values that failed.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub elements: Vec<Element>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub mode: &'static str,
    pub axioms: Vec<Axiom>,
    pub elements_checked: usize,
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn covers_axioms(&self) -> bool {
        self.axioms.contains(&Axiom::Subadditivity)
    }

    pub fn violations_of(&self, axiom: Axiom) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.axiom == axiom)
    }
}

struct Prepared {
    elements: Vec<Element>,
    inverses: Vec<Element>,
    lengths: Vec<f64>,
    pairs: Option<Vec<(usize, usize)>>,
}

impl Prepared {
    fn pair_count(&self) -> usize {
        self.pairs
            .as_ref()
            .map_or(self.elements.len() * self.elements.len(), Vec::len)
    }

    fn mode(&self) -> &'static str {
        if self.pairs.is_some() {
            "pairs"
        } else {
            "exhaustive"
        }
    }

    /// Runs `f` on every pair in deterministic order, in parallel.
    fn scan_pairs<F>(&self, f: F) -> Result<Vec<Violation>>
    where
        F: Fn(usize, usize) -> Result<Option<Violation>> + Sync,
    {
        let chunks: Vec<Vec<Violation>> = match &self.pairs {
            None => (0..self.elements.len())
                .into_par_iter()
                .map(|i| {
                    let mut out = Vec::new();
                    for j in 0..self.elements.len() {
                        if let Some(v) = f(i, j)? {
                            out.push(v);
                        }
                    }
                    Ok(out)
                })
                .collect::<Result<_>>()?,
            Some(pairs) => pairs
                .par_iter()
                .map(|&(i, j)| Ok(f(i, j)?.into_iter().collect()))
                .collect::<Result<_>>()?,
        };
        Ok(chunks.into_iter().flatten().collect())
    }
}

fn prepare(group: &Group, l: &LengthFunction, mode: &CheckMode) -> Result<Prepared> {
    let (elements, pairs) = match mode {
        CheckMode::Exhaustive => (group.elements()?, None),
        CheckMode::Pairs(list) => {
            let mut index: BTreeMap<Element, usize> = BTreeMap::new();
            let mut elements = Vec::new();
            let mut intern = |e: &Element| -> Result<usize> {
                group.check(e)?;
                Ok(*index.entry(e.clone()).or_insert_with(|| {
                    elements.push(e.clone());
                    elements.len() - 1
                }))
            };
            intern(&group.identity())?;
            let mut pairs = Vec::with_capacity(list.len());
            for (x, y) in list {
                pairs.push((intern(x)?, intern(y)?));
            }
            (elements, Some(pairs))
        }
    };
    let inverses = elements
        .par_iter()
        .map(|x| group.invert(x))
        .collect::<Result<Vec<_>>>()?;
    let lengths = elements
        .par_iter()
        .map(|x| l.evaluate(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(Prepared {
        elements,
        inverses,
        lengths,
        pairs,
    })
}

/// Checks the invariant-length axioms. Violations are findings in the
/// report; only evaluation failures are errors.
pub fn check_axioms(group: &Group, l: &LengthFunction, mode: &CheckMode) -> Result<AxiomReport> {
    let prep = prepare(group, l, mode)?;
    let tol = AXIOM_TOLERANCE;

    let singles: Vec<Vec<Violation>> = (0..prep.elements.len())
        .into_par_iter()
        .map(|i| {
            let x = &prep.elements[i];
            let lx = prep.lengths[i];
            let mut out = Vec::new();
            let mut flag = |axiom, values| {
                out.push(Violation {
                    axiom,
                    elements: vec![x.clone()],
                    values,
                })
            };
            if !(-tol..=1.0 + tol).contains(&lx) {
                flag(super::check::Axiom::Range, vec![lx]);
            }
            if x.is_identity() {
                if lx.abs() > tol {
                    flag(Axiom::IdentityZero, vec![lx]);
                }
            } else if lx <= 0.0 {
                flag(Axiom::PositiveOffIdentity, vec![lx]);
            }
            let linv = l.evaluate(&prep.inverses[i])?;
            if (linv - lx).abs() > tol {
                flag(Axiom::Symmetry, vec![lx, linv]);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let pair_violations = prep.scan_pairs(|i, j| {
        let (x, y) = (&prep.elements[i], &prep.elements[j]);
        let (lx, ly) = (prep.lengths[i], prep.lengths[j]);
        let lxy = l.evaluate(&group.multiply(x, y)?)?;
        if lxy > lx + ly + tol {
            return Ok(Some(Violation {
                axiom: Axiom::Subadditivity,
                elements: vec![x.clone(), y.clone()],
                values: vec![lxy, lx, ly],
            }));
        }
        let conj = group.multiply(&group.multiply(x, y)?, &prep.inverses[i])?;
        let lc = l.evaluate(&conj)?;
        if (lc - ly).abs() > tol {
            return Ok(Some(Violation {
                axiom: Axiom::ConjugationInvariance,
                elements: vec![x.clone(), y.clone()],
                values: vec![lc, ly],
            }));
        }
        Ok(None)
    })?;

    let mut violations: Vec<Violation> = singles.into_iter().flatten().collect();
    violations.extend(pair_violations);
    Ok(AxiomReport {
        mode: prep.mode(),
        axioms: vec![
            Axiom::IdentityZero,
            Axiom::PositiveOffIdentity,
            Axiom::Range,
            Axiom::Symmetry,
            Axiom::Subadditivity,
            Axiom::ConjugationInvariance,
        ],
        elements_checked: prep.elements.len(),
        pairs_checked: prep.pair_count(),
        violations,
    })
}

/// Checks `ℓ([x, y]) ≤ 4 ℓ(x) ℓ(y)` with `[x, y] = x^{-1} y^{-1} x y`.
pub fn check_commutator_contractive(
    group: &Group,
    l: &LengthFunction,
    mode: &CheckMode,
) -> Result<AxiomReport> {
    let prep = prepare(group, l, mode)?;
    let violations = prep.scan_pairs(|i, j| {
        let (x, y) = (&prep.elements[i], &prep.elements[j]);
        let (lx, ly) = (prep.lengths[i], prep.lengths[j]);
        let comm = group.multiply(
            &group.multiply(&prep.inverses[i], &prep.inverses[j])?,
            &group.multiply(x, y)?,
        )?;
        let lc = l.evaluate(&comm)?;
        if lc > 4.0 * lx * ly + AXIOM_TOLERANCE {
            return Ok(Some(Violation {
                axiom: Axiom::CommutatorContractive,
                elements: vec![x.clone(), y.clone()],
                values: vec![lc, lx, ly],
            }));
        }
        Ok(None)
    })?;
    Ok(AxiomReport {
        mode: prep.mode(),
        axioms: vec![Axiom::CommutatorContractive],
        elements_checked: prep.elements.len(),
        pairs_checked: prep.pair_count(),
        violations,
    })
}

/// `sup ℓ` over a finite group, computed as an exact maximum.
pub fn diameter(group: &Group, l: &LengthFunction) -> Result<f64> {
    group
        .elements()?
        .par_iter()
        .map(|g| l.evaluate(g))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// `|‖g − h‖²_HS + ‖g + h‖²_HS − 4|` for unitary `g`, `h`.
pub fn unitary_parallelogram_check(g: &Matrix, h: &Matrix) -> Result<f64> {
    if g.dim() != h.dim() {
        return Err(structural(format!(
            "dimension mismatch: {} vs {}",
            g.dim(),
            h.dim()
        )));
    }
    for m in [g, h] {
        if !m.is_unitary() {
            return Err(Error::Domain(format!("{m:?} is not unitary")));
        }
    }
    let total = g.sub(h)?.hs_norm_sq() + g.add(h)?.hs_norm_sq();
    Ok((total - 4.0).abs())
}

/// A concrete failure of commutator-contractivity for an `L^p` combination
/// of two commutator-contractive lengths.
#[derive(Clone, Debug, Serialize)]
pub struct LpCounterexample {
    pub p: Exponent,
    pub left_scale: f64,
    pub right_scale: f64,
    pub first: Element,
    pub second: Element,
    /// `L^p([first, second])`.
    pub commutator_length: f64,
    /// `4 L^p(first) L^p(second)`.
    pub bound: f64,
}

/// Exhaustive search over `L^p` combinations of scaled trivial lengths on
/// `left × right`. Each candidate pair of component lengths is itself
/// verified commutator-contractive before the combination is tested.
pub fn search_lp_counterexample(
    left: &Group,
    right: &Group,
    exponents: &[u32],
    scales: &[f64],
) -> Result<Option<LpCounterexample>> {
    let product = Group::direct(left.clone(), right.clone());
    let scaled = |s: f64| -> Result<LengthFunction> {
        if s == 1.0 {
            Ok(LengthFunction::trivial())
        } else {
            LengthFunction::scaled(LengthFunction::trivial(), s)
        }
    };
    for &p in exponents {
        let exponent = Exponent::new(p)?;
        for &sl in scales {
            let ll = scaled(sl)?;
            if !check_commutator_contractive(left, &ll, &CheckMode::Exhaustive)?.is_clean() {
                continue;
            }
            for &sr in scales {
                let lr = scaled(sr)?;
                if !check_commutator_contractive(right, &lr, &CheckMode::Exhaustive)?.is_clean() {
                    continue;
                }
                let lp = LengthFunction::lp(ll.clone(), lr, exponent);
                let report = check_commutator_contractive(&product, &lp, &CheckMode::Exhaustive)?;
                if let Some(v) = report.violations.into_iter().next() {
                    return Ok(Some(LpCounterexample {
                        p: exponent,
                        left_scale: sl,
                        right_scale: sr,
                        first: v.elements[0].clone(),
                        second: v.elements[1].clone(),
                        commutator_length: v.values[0],
                        bound: 4.0 * v.values[1] * v.values[2],
                    }));
                }
            }
        }
    }
    Ok(None)
}
