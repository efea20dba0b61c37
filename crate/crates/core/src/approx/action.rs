use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{ApproxParams, ApproximationMap, CheckBudget, Method, COMPARISON_SLACK};
use crate::error::{capability, structural, Error, Result};
use crate::groups::{Element, Group, Perm, ENUMERATION_LIMIT};
use crate::length::{LengthFunction, WeightFunction};

/// A permutation of `Y = X^m` of the form
/// `δ ↦ (c ↦ δ(source[c])^{taus[c]})`.
///
/// With `m = 1` this is an ordinary permutation of `X`. Points of `Y` are
/// indexed little-endian: `δ ↦ Σ δ(c)·|X|^c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CoordPerm {
    base: usize,
    source: Vec<usize>,
    taus: Vec<Perm>,
}

impl CoordPerm {
    pub fn new(base: usize, source: Vec<usize>, taus: Vec<Perm>) -> Result<CoordPerm> {
        Perm::new(source.clone())?;
        if taus.len() != source.len() {
            return Err(structural(format!(
                "{} coordinates but {} coordinate permutations",
                source.len(),
                taus.len()
            )));
        }
        if let Some(t) = taus.iter().find(|t| t.degree() != base) {
            return Err(structural(format!(
                "coordinate permutation of degree {} on a base of size {base}",
                t.degree()
            )));
        }
        Ok(CoordPerm { base, source, taus })
    }

    pub fn plain(p: Perm) -> CoordPerm {
        CoordPerm {
            base: p.degree(),
            source: vec![0],
            taus: vec![p],
        }
    }

    pub fn identity(base: usize, coords: usize) -> CoordPerm {
        CoordPerm {
            base,
            source: (0..coords).collect(),
            taus: vec![Perm::identity(base); coords],
        }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn coords(&self) -> usize {
        self.source.len()
    }

    pub fn source(&self) -> &[usize] {
        &self.source
    }

    pub fn taus(&self) -> &[Perm] {
        &self.taus
    }

    /// `|X|^m`, or `None` on overflow.
    pub fn point_count(&self) -> Option<u128> {
        (self.base as u128).checked_pow(self.coords() as u32)
    }

    pub fn as_plain(&self) -> Option<&Perm> {
        (self.coords() == 1).then(|| &self.taus[0])
    }

    pub fn is_identity(&self) -> bool {
        self.source.iter().enumerate().all(|(i, &s)| i == s) && self.taus.iter().all(Perm::is_identity)
    }

    fn check_shape(&self, other: &CoordPerm) -> Result<()> {
        if self.base != other.base || self.coords() != other.coords() {
            return Err(structural(format!(
                "cannot compose permutations of {}^{} and {}^{}",
                self.base,
                self.coords(),
                other.base,
                other.coords()
            )));
        }
        Ok(())
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &CoordPerm) -> Result<CoordPerm> {
        self.check_shape(other)?;
        let mut source = Vec::with_capacity(self.coords());
        let mut taus = Vec::with_capacity(self.coords());
        for c in 0..self.coords() {
            let via = other.source[c];
            source.push(self.source[via]);
            taus.push(self.taus[via].then(&other.taus[c])?);
        }
        Ok(CoordPerm {
            base: self.base,
            source,
            taus,
        })
    }

    pub fn inverse(&self) -> CoordPerm {
        let m = self.coords();
        let mut source = vec![0; m];
        for (c, &s) in self.source.iter().enumerate() {
            source[s] = c;
        }
        let taus = (0..m).map(|c| self.taus[source[c]].inverse()).collect();
        CoordPerm {
            base: self.base,
            source,
            taus,
        }
    }

    pub fn apply_into(&self, point: &[usize], out: &mut [usize]) {
        for c in 0..self.coords() {
            out[c] = self.taus[c].apply(point[self.source[c]]);
        }
    }

    pub fn apply(&self, point: &[usize]) -> Vec<usize> {
        let mut out = vec![0; self.coords()];
        self.apply_into(point, &mut out);
        out
    }

    /// Exact proportion of fixed points, from the cycle structure of
    /// `source`: along a cycle the value at one coordinate determines the
    /// rest, so each cycle contributes the fixed points of its composite.
    pub fn fixed_proportion(&self) -> f64 {
        let m = self.coords();
        let mut seen = vec![false; m];
        let mut proportion = 1.0;
        for start in 0..m {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut c = start;
            while !seen[c] {
                seen[c] = true;
                cycle.push(c);
                c = self.source[c];
            }
            let fixed = (0..self.base)
                .filter(|&x| {
                    let y = cycle.iter().rev().fold(x, |y, &c| self.taus[c].apply(y));
                    y == x
                })
                .count();
            proportion *= fixed as f64 / (self.base as f64).powi(cycle.len() as i32);
        }
        proportion
    }

    /// Exact proportion of points on which `self` and `other` agree.
    pub fn agreement(&self, other: &CoordPerm) -> Result<f64> {
        Ok(self.then(&other.inverse())?.fixed_proportion())
    }

    /// The permutation of `0..|X|^m` this describes.
    pub fn to_perm(&self) -> Result<Perm> {
        let n = self
            .point_count()
            .filter(|&n| n <= ENUMERATION_LIMIT)
            .ok_or_else(|| capability("point set too large to materialise"))? as usize;
        let mut point = vec![0; self.coords()];
        let mut image = vec![0; self.coords()];
        let mut images = Vec::with_capacity(n);
        for _ in 0..n {
            self.apply_into(&point, &mut image);
            images.push(encode(&image, self.base));
            advance(&mut point, self.base);
        }
        Perm::new(images)
    }
}

fn encode(point: &[usize], base: usize) -> usize {
    point.iter().rev().fold(0, |acc, &d| acc * base + d)
}

/// Steps a little-endian odometer.
fn advance(point: &mut [usize], base: usize) {
    for d in point.iter_mut() {
        *d += 1;
        if *d < base {
            return;
        }
        *d = 0;
    }
}

/// A map `φ: G → Sym(Y)` with `Y = X^m`, stored as a finite table.
#[derive(Clone, Debug)]
pub struct QuasiAction {
    pub source: Group,
    pub params: ApproxParams,
    base: usize,
    coords: usize,
    assignments: BTreeMap<Element, CoordPerm>,
}

impl QuasiAction {
    pub fn new(
        source: Group,
        base: usize,
        coords: usize,
        params: ApproxParams,
        assignments: impl IntoIterator<Item = (Element, CoordPerm)>,
    ) -> Result<QuasiAction> {
        if base == 0 {
            return Err(structural("a quasi-action needs a nonempty point set"));
        }
        for g in &params.f {
            source.check(g)?;
        }
        let mut table = BTreeMap::new();
        for (g, p) in assignments {
            source.check(&g)?;
            if p.base != base || p.coords() != coords {
                return Err(structural(format!(
                    "assignment for {g} acts on {}^{}, expected {base}^{coords}",
                    p.base,
                    p.coords()
                )));
            }
            if g.is_identity() && !p.is_identity() {
                return Err(structural("the identity must act trivially"));
            }
            table.insert(g, p);
        }
        table.insert(source.identity(), CoordPerm::identity(base, coords));
        Ok(QuasiAction {
            source,
            params,
            base,
            coords,
            assignments: table,
        })
    }

    /// An action on `0..points` by ordinary permutations.
    pub fn on_points(
        source: Group,
        points: usize,
        params: ApproxParams,
        assignments: impl IntoIterator<Item = (Element, Perm)>,
    ) -> Result<QuasiAction> {
        let table = assignments
            .into_iter()
            .map(|(g, p)| (g, CoordPerm::plain(p)))
            .collect::<Vec<_>>();
        QuasiAction::new(source, points, 1, params, table)
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn coords(&self) -> usize {
        self.coords
    }

    pub fn point_count(&self) -> Option<u128> {
        (self.base as u128).checked_pow(self.coords as u32)
    }

    pub fn assignments(&self) -> impl Iterator<Item = (&Element, &CoordPerm)> {
        self.assignments.iter()
    }

    pub fn image(&self, g: &Element) -> Result<&CoordPerm> {
        self.assignments.get(g).ok_or_else(|| Error::Coverage {
            missing: vec![g.clone()],
        })
    }

    fn require_coverage(&self) -> Result<()> {
        let mut missing = BTreeSet::new();
        for g in &self.params.f {
            if !self.assignments.contains_key(g) {
                missing.insert(g.clone());
            }
            for h in &self.params.f {
                let gh = self.source.multiply(g, h)?;
                if !self.assignments.contains_key(&gh) {
                    missing.insert(gh);
                }
            }
        }
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Coverage {
                missing: missing.into_iter().collect(),
            })
        }
    }

    /// The same table as a map into `Sym(Y)` with the Hamming length.
    pub fn to_approximation_map(&self, weight: WeightFunction) -> Result<ApproximationMap> {
        let n = self
            .point_count()
            .filter(|&n| n <= ENUMERATION_LIMIT)
            .ok_or_else(|| capability("point set too large to materialise"))? as usize;
        let table = self
            .assignments
            .iter()
            .map(|(g, p)| Ok((g.clone(), Element::Perm(p.to_perm()?))))
            .collect::<Result<Vec<_>>>()?;
        ApproximationMap::new(
            self.source.clone(),
            Group::Symmetric { n },
            LengthFunction::hamming(),
            weight,
            self.params.clone(),
            table,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairAgreement {
    pub g: Element,
    pub h: Element,
    /// Measured proportion of points where `φ(g)φ(h)` and `φ(gh)` agree.
    pub agreement: f64,
    /// The same proportion from the cycle formula.
    pub exact: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedProportion {
    pub g: Element,
    pub fixed: f64,
    pub exact: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionReport {
    pub points: u128,
    pub pair_agreements: Vec<PairAgreement>,
    pub fixed_proportions: Vec<FixedProportion>,
    pub min_agreement: f64,
    pub max_fixed: Option<f64>,
    pub method: Method,
    /// Allowance added to `ε` for sampling error: `3 · 0.5/√samples`, or 0.
    pub margin: f64,
    pub agreement_ok: bool,
    pub fixed_ok: bool,
    pub holds: bool,
}

impl ActionReport {
    pub fn offending_pairs(&self, epsilon: f64) -> impl Iterator<Item = &PairAgreement> + '_ {
        let limit = epsilon + self.margin + COMPARISON_SLACK;
        self.pair_agreements
            .iter()
            .filter(move |p| 1.0 - p.agreement > limit)
    }

    pub fn offending_elements(&self, epsilon: f64) -> impl Iterator<Item = &FixedProportion> + '_ {
        let limit = epsilon + self.margin + COMPARISON_SLACK;
        self.fixed_proportions.iter().filter(move |p| p.fixed > limit)
    }
}

enum Points {
    All { count: usize },
    Sample(Vec<Vec<usize>>),
}

impl Points {
    fn proportion(&self, base: usize, coords: usize, hit: impl Fn(&[usize]) -> bool) -> f64 {
        match self {
            Points::All { count } => {
                let mut point = vec![0; coords];
                let mut hits = 0usize;
                for _ in 0..*count {
                    if hit(&point) {
                        hits += 1;
                    }
                    advance(&mut point, base);
                }
                hits as f64 / *count as f64
            }
            Points::Sample(points) => {
                let hits = points.iter().filter(|p| hit(p)).count();
                hits as f64 / points.len() as f64
            }
        }
    }
}

/// Agreement proportions on `F × F` and fixed-point proportions on
/// `F ∖ {1}`. Enumerates `Y` when `|F|²·|Y|` fits the budget, otherwise
/// samples points with the recorded seed. Exact values from the cycle
/// formula are reported alongside.
pub fn quasi_action_defect(q: &QuasiAction, budget: &CheckBudget) -> Result<ActionReport> {
    q.require_coverage()?;
    let f = &q.params.f;
    let points_total = q.point_count();
    let pair_work = points_total
        .and_then(|n| n.checked_mul((f.len() * f.len()).max(1) as u128))
        .unwrap_or(u128::MAX);
    let (points, method, margin) = if pair_work <= budget.budget as u128 {
        let count = points_total.expect("bounded by the budget") as usize;
        (Points::All { count }, Method::Exhaustive, 0.0)
    } else {
        if budget.samples == 0 {
            return Err(crate::error::parameter("sample count must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let sample = (0..budget.samples)
            .map(|_| (0..q.coords).map(|_| rng.random_range(0..q.base)).collect())
            .collect();
        let margin = 3.0 * 0.5 / (budget.samples as f64).sqrt();
        (
            Points::Sample(sample),
            Method::Sampled {
                samples: budget.samples,
                seed: budget.seed,
            },
            margin,
        )
    };

    let pairs: Vec<(usize, usize)> = (0..f.len())
        .flat_map(|i| (0..f.len()).map(move |j| (i, j)))
        .collect();
    let pair_agreements = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (g, h) = (&f[i], &f[j]);
            let composed = q.image(g)?.then(q.image(h)?)?;
            let direct = q.image(&q.source.multiply(g, h)?)?;
            let agreement = points.proportion(q.base, q.coords, |p| {
                let mut a = vec![0; q.coords];
                let mut b = vec![0; q.coords];
                composed.apply_into(p, &mut a);
                direct.apply_into(p, &mut b);
                a == b
            });
            Ok(PairAgreement {
                g: g.clone(),
                h: h.clone(),
                agreement,
                exact: composed.agreement(direct)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let nontrivial: Vec<&Element> = f
        .iter()
        .filter(|g| !g.is_identity())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let fixed_proportions = nontrivial
        .par_iter()
        .map(|g| {
            let p = q.image(g)?;
            let fixed = points.proportion(q.base, q.coords, |x| {
                let mut y = vec![0; q.coords];
                p.apply_into(x, &mut y);
                y == x
            });
            Ok(FixedProportion {
                g: (*g).clone(),
                fixed,
                exact: p.fixed_proportion(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let min_agreement = pair_agreements
        .iter()
        .map(|p| p.agreement)
        .fold(1.0, f64::min);
    let max_fixed = fixed_proportions.iter().map(|p| p.fixed).reduce(f64::max);
    let limit = q.params.epsilon + margin + COMPARISON_SLACK;
    let agreement_ok = 1.0 - min_agreement <= limit;
    let fixed_ok = max_fixed.is_none_or(|x| x <= limit);
    Ok(ActionReport {
        points: points_total.unwrap_or(u128::MAX),
        pair_agreements,
        fixed_proportions,
        min_agreement,
        max_fixed,
        method,
        margin,
        agreement_ok,
        fixed_ok,
        holds: agreement_ok && fixed_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(m: usize, k: usize) -> Perm {
        Perm::new((0..m).map(|a| (a + k) % m).collect()).unwrap()
    }

    fn cyclic_action(m: usize) -> QuasiAction {
        let f: Vec<Element> = (0..m).map(Element::Table).collect();
        QuasiAction::on_points(
            Group::Cyclic { m },
            m,
            ApproxParams::new(f, 0.1).unwrap(),
            (1..m).map(|k| (Element::Table(k), cycle(m, k))),
        )
        .unwrap()
    }

    #[test]
    fn genuine_cyclic_action() {
        let r = quasi_action_defect(&cyclic_action(5), &CheckBudget::default()).unwrap();
        assert_eq!(r.min_agreement, 1.0);
        assert_eq!(r.max_fixed, Some(0.0));
        assert!(r.holds);
        assert_eq!(r.method, Method::Exhaustive);
    }

    #[test]
    fn trivial_image_is_flagged() {
        let q = QuasiAction::on_points(
            Group::Cyclic { m: 2 },
            3,
            ApproxParams::new(vec![Element::Table(1)], 0.1).unwrap(),
            [(Element::Table(1), Perm::identity(3))],
        )
        .unwrap();
        let r = quasi_action_defect(&q, &CheckBudget::default()).unwrap();
        assert_eq!(r.max_fixed, Some(1.0));
        assert!(!r.fixed_ok);
        assert_eq!(r.offending_elements(0.1).count(), 1);
    }

    #[test]
    fn composition_matches_pointwise_application() {
        let p = CoordPerm::new(3, vec![1, 2, 0], vec![cycle(3, 1), cycle(3, 0), cycle(3, 2)]).unwrap();
        let q = CoordPerm::new(3, vec![0, 2, 1], vec![cycle(3, 2), cycle(3, 1), cycle(3, 1)]).unwrap();
        let pq = p.then(&q).unwrap();
        let x = vec![2, 0, 1];
        assert_eq!(pq.apply(&x), q.apply(&p.apply(&x)));
        assert!(p.then(&p.inverse()).unwrap().is_identity());
        let materialised = p.to_perm().unwrap().then(&q.to_perm().unwrap()).unwrap();
        assert_eq!(materialised, pq.to_perm().unwrap());
    }

    #[test]
    fn cycle_formula_matches_enumeration() {
        let p = CoordPerm::new(2, vec![1, 0, 2], vec![cycle(2, 1), cycle(2, 0), cycle(2, 0)]).unwrap();
        let perm = p.to_perm().unwrap();
        let enumerated = perm.fixed_points() as f64 / perm.degree() as f64;
        assert_eq!(p.fixed_proportion(), enumerated);
        assert_eq!(p.fixed_proportion(), 0.0);
        let shift = CoordPerm::new(2, vec![1, 2, 0], vec![Perm::identity(2); 3]).unwrap();
        assert_eq!(shift.fixed_proportion(), 2.0 / 8.0);
    }

    #[test]
    fn sampled_route_is_seeded() {
        let budget = CheckBudget {
            budget: 1,
            samples: 2000,
            seed: 3,
        };
        let a = quasi_action_defect(&cyclic_action(4), &budget).unwrap();
        let b = quasi_action_defect(&cyclic_action(4), &budget).unwrap();
        assert_eq!(a, b);
        assert!(matches!(a.method, Method::Sampled { samples: 2000, seed: 3 }));
        assert!(a.margin > 0.0);
    }
}
