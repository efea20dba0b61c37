//! Finite, tabulated quasi-homomorphisms and quasi-actions, and the checks
//! that measure their defects against `(F, ε)`.

mod action;

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use action::{
    quasi_action_defect, ActionReport, CoordPerm, FixedProportion, PairAgreement, QuasiAction,
};

use crate::error::{parameter, structural, Error, Result};
use crate::groups::{Element, Group, MATRIX_IDENTITY_TOLERANCE};
use crate::length::{diameter, LengthFunction, WeightFunction};

/// Slack on every `≤ ε` and `≥ bound` comparison.
pub const COMPARISON_SLACK: f64 = 1e-12;

/// Default number of evaluations allowed before switching to sampling.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Default number of samples for sampled checks.
pub const DEFAULT_SAMPLES: usize = 100_000;

pub const DEFAULT_SEED: u64 = 0x5eed_0001;

/// The finite set and tolerance a map is checked against.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxParams {
    #[serde(rename = "F")]
    pub f: Vec<Element>,
    pub epsilon: f64,
}

impl ApproxParams {
    pub fn new(f: Vec<Element>, epsilon: f64) -> Result<ApproxParams> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(parameter(format!("epsilon must be a positive number, got {epsilon}")));
        }
        Ok(ApproxParams { f, epsilon })
    }
}

/// How much exhaustive work a check may do, and how to sample beyond it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CheckBudget {
    pub budget: u64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for CheckBudget {
    fn default() -> Self {
        CheckBudget {
            budget: DEFAULT_BUDGET,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Method {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

/// A map `φ: G → K` stored as a finite table, with `φ(1) = 1`.
#[derive(Clone, Debug)]
pub struct ApproximationMap {
    pub source: Group,
    pub target: Group,
    pub target_length: LengthFunction,
    pub weight: WeightFunction,
    pub params: ApproxParams,
    assignments: BTreeMap<Element, Element>,
}

impl ApproximationMap {
    /// Validates membership of every entry; inserts `1 ↦ 1` and rejects any
    /// other value at the identity.
    pub fn new(
        source: Group,
        target: Group,
        target_length: LengthFunction,
        weight: WeightFunction,
        params: ApproxParams,
        assignments: impl IntoIterator<Item = (Element, Element)>,
    ) -> Result<ApproximationMap> {
        weight.validate()?;
        for g in &params.f {
            source.check(g)?;
        }
        let mut table = BTreeMap::new();
        for (g, k) in assignments {
            source.check(&g)?;
            target.check(&k)?;
            if g.is_identity() && !k.is_identity() {
                return Err(structural(format!("the identity must map to the identity, not {k}")));
            }
            if let Some(prev) = table.insert(g.clone(), k.clone()) {
                if prev != k {
                    return Err(structural(format!("conflicting assignments for {g}: {prev} and {k}")));
                }
            }
        }
        table.insert(source.identity(), target.identity());
        Ok(ApproximationMap {
            source,
            target,
            target_length,
            weight,
            params,
            assignments: table,
        })
    }

    /// Tabulates `f` on `{1} ∪ F ∪ F·F`.
    pub fn from_fn(
        source: Group,
        target: Group,
        target_length: LengthFunction,
        weight: WeightFunction,
        params: ApproxParams,
        f: impl Fn(&Element) -> Result<Element>,
    ) -> Result<ApproximationMap> {
        let mut domain = BTreeSet::new();
        for g in &params.f {
            domain.insert(g.clone());
            for h in &params.f {
                domain.insert(source.multiply(g, h)?);
            }
        }
        domain.remove(&source.identity());
        let table = domain
            .into_iter()
            .map(|g| {
                let k = f(&g)?;
                Ok((g, k))
            })
            .collect::<Result<Vec<_>>>()?;
        ApproximationMap::new(source, target, target_length, weight, params, table)
    }

    pub fn assignments(&self) -> impl Iterator<Item = (&Element, &Element)> {
        self.assignments.iter()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// `φ(g)`. Matrix keys fall back to a tolerance match.
    pub fn image(&self, g: &Element) -> Result<&Element> {
        if let Some(k) = self.assignments.get(g) {
            return Ok(k);
        }
        if let Element::Matrix(m) = g {
            for (key, k) in &self.assignments {
                if let Element::Matrix(km) = key {
                    if km.approx_eq(m, MATRIX_IDENTITY_TOLERANCE) {
                        return Ok(k);
                    }
                }
            }
        }
        Err(Error::Coverage {
            missing: vec![g.clone()],
        })
    }

    /// Elements of `{1} ∪ F ∪ F·F` with no assignment, in canonical order.
    pub fn missing_assignments(&self) -> Result<Vec<Element>> {
        let mut missing = BTreeSet::new();
        for g in &self.params.f {
            if self.image(g).is_err() {
                missing.insert(g.clone());
            }
            for h in &self.params.f {
                let gh = self.source.multiply(g, h)?;
                if self.image(&gh).is_err() {
                    missing.insert(gh);
                }
            }
        }
        Ok(missing.into_iter().collect())
    }

    fn require_coverage(&self) -> Result<()> {
        let missing = self.missing_assignments()?;
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Coverage { missing })
        }
    }

    /// `ℓ_K(φ(gh) φ(h)^{-1} φ(g)^{-1})`.
    pub fn pair_defect(&self, g: &Element, h: &Element) -> Result<f64> {
        let t = &self.target;
        let gh = self.source.multiply(g, h)?;
        let x = t.multiply(
            &t.multiply(self.image(&gh)?, &t.invert(self.image(h)?)?)?,
            &t.invert(self.image(g)?)?,
        )?;
        self.target_length.evaluate(&x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairDefect {
    pub g: Element,
    pub h: Element,
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightSlack {
    pub g: Element,
    pub length: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectReport {
    pub pair_defects: Vec<PairDefect>,
    pub weight_slacks: Vec<WeightSlack>,
    pub max_defect: f64,
    pub min_slack: Option<f64>,
    pub method: Method,
    pub notes: Vec<String>,
}

impl DefectReport {
    /// Pairs whose defect exceeds `epsilon`.
    pub fn offending_pairs(&self, epsilon: f64) -> impl Iterator<Item = &PairDefect> {
        self.pair_defects
            .iter()
            .filter(move |p| p.defect > epsilon + COMPARISON_SLACK)
    }

    /// Elements whose slack is negative.
    pub fn offending_weights(&self) -> impl Iterator<Item = &WeightSlack> {
        self.weight_slacks
            .iter()
            .filter(|s| s.slack < -COMPARISON_SLACK)
    }

    fn merge(mut self, other: DefectReport) -> DefectReport {
        self.weight_slacks = other.weight_slacks;
        self.min_slack = other.min_slack;
        self.notes.extend(other.notes);
        self
    }
}

/// Index pairs of `F × F` to evaluate: all of them, or a seeded sample.
pub(crate) fn choose_pairs(n: usize, budget: &CheckBudget) -> (Vec<(usize, usize)>, Method) {
    let total = (n as u64).saturating_mul(n as u64);
    if total <= budget.budget {
        let pairs = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        (pairs, Method::Exhaustive)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let pairs = (0..budget.samples)
            .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
            .collect();
        (
            pairs,
            Method::Sampled {
                samples: budget.samples,
                seed: budget.seed,
            },
        )
    }
}

/// Defect of every pair in `F × F`, or of a seeded sample when `|F|²`
/// exceeds the budget.
pub fn multiplicative_defect(phi: &ApproximationMap, budget: &CheckBudget) -> Result<DefectReport> {
    phi.require_coverage()?;
    let f = &phi.params.f;
    let (pairs, method) = choose_pairs(f.len(), budget);
    let pair_defects = pairs
        .par_iter()
        .map(|&(i, j)| {
            Ok(PairDefect {
                g: f[i].clone(),
                h: f[j].clone(),
                defect: phi.pair_defect(&f[i], &f[j])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_defect = pair_defects.iter().map(|p| p.defect).fold(0.0, f64::max);
    Ok(DefectReport {
        pair_defects,
        weight_slacks: Vec::new(),
        max_defect,
        min_slack: None,
        method,
        notes: Vec::new(),
    })
}

/// Slack `ℓ_K(φ(g)) − δ_g` for each `g ∈ F ∖ {1}`.
pub fn weight_bound_check(phi: &ApproximationMap) -> Result<DefectReport> {
    slacks_against(phi, |g| phi.weight.value(g), Vec::new())
}

fn slacks_against(
    phi: &ApproximationMap,
    bound: impl Fn(&Element) -> Result<f64> + Sync,
    notes: Vec<String>,
) -> Result<DefectReport> {
    let elements: Vec<&Element> = phi
        .params
        .f
        .iter()
        .filter(|g| !g.is_identity())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let missing: Vec<Element> = elements
        .iter()
        .filter(|g| phi.image(g).is_err())
        .map(|g| (*g).clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Coverage { missing });
    }
    let weight_slacks = elements
        .par_iter()
        .map(|g| {
            let length = phi.target_length.evaluate(phi.image(g)?)?;
            let bound = bound(g)?;
            Ok(WeightSlack {
                g: (*g).clone(),
                length,
                bound,
                slack: length - bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let min_slack = weight_slacks.iter().map(|s| s.slack).reduce(f64::min);
    Ok(DefectReport {
        pair_defects: Vec::new(),
        weight_slacks,
        max_defect: 0.0,
        min_slack,
        method: Method::Exhaustive,
        notes,
    })
}

/// Which lower bound `ℓ_K(φ(g))` must meet on `F ∖ {1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QhomMode {
    /// `δ_g` from the map's weight function.
    #[default]
    Weighted,
    /// The weight must be constant; the bound is that constant.
    Discrete,
    /// `diam(K) − ε`.
    Strong,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QhomVerdict {
    pub mode: QhomMode,
    pub holds: bool,
    pub defect_ok: bool,
    pub weight_ok: bool,
    pub report: DefectReport,
}

/// Decides whether `φ` is an `(F, ε)`-quasi-homomorphism in the given mode.
pub fn is_quasi_homomorphism(
    phi: &ApproximationMap,
    mode: QhomMode,
    budget: &CheckBudget,
) -> Result<QhomVerdict> {
    let defects = multiplicative_defect(phi, budget)?;
    let eps = phi.params.epsilon;
    let slacks = match mode {
        QhomMode::Weighted => weight_bound_check(phi)?,
        QhomMode::Discrete => {
            let c = phi.weight.constant_value().ok_or_else(|| {
                parameter("discrete mode needs a constant weight function")
            })?;
            slacks_against(phi, |_| Ok(c), Vec::new())?
        }
        QhomMode::Strong => {
            let diam = diameter(&phi.target, &phi.target_length)?;
            slacks_against(
                phi,
                |_| Ok(diam - eps),
                vec![format!(
                    "strong bound diam(K) - epsilon = {}; the identity is excluded from the weight check",
                    diam - eps
                )],
            )?
        }
    };
    let report = defects.merge(slacks);
    let defect_ok = report.max_defect <= eps + COMPARISON_SLACK;
    let weight_ok = report.min_slack.is_none_or(|s| s >= -COMPARISON_SLACK);
    Ok(QhomVerdict {
        mode,
        holds: defect_ok && weight_ok,
        defect_ok,
        weight_ok,
        report,
    })
}
