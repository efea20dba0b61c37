use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{capability, structural, Error, Result};
use crate::groups::{Element, Group};

/// How a quotient map acts on elements.
#[derive(Clone, Debug, PartialEq)]
pub enum QuotientRule {
    Identity,
    /// `ℤ^d → (ℤ/m)^d` componentwise.
    Reduce { modulus: i64 },
    Direct(Box<QuotientRule>, Box<QuotientRule>),
    /// `G → G/N` for finite `G`.
    Cosets(Arc<CosetTable>),
    /// `N × Q → Q`.
    DropLeft,
}

/// Cosets of a normal subgroup of a finite group. Coset 0 is `N`; the rest
/// are ordered by their least element, which is also their representative.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetTable {
    coset_of: BTreeMap<Element, usize>,
    representatives: Vec<Element>,
    kernel: Vec<Element>,
}

impl CosetTable {
    pub fn kernel(&self) -> &[Element] {
        &self.kernel
    }

    pub fn representatives(&self) -> &[Element] {
        &self.representatives
    }
}

/// A homomorphism onto a finite (or, for `Identity`, arbitrary) image,
/// together with a section sending each image element to a canonical
/// preimage and the identity to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientMap {
    source: Group,
    image: Group,
    rule: QuotientRule,
}

impl QuotientMap {
    pub fn identity(source: Group) -> QuotientMap {
        QuotientMap {
            image: source.clone(),
            source,
            rule: QuotientRule::Identity,
        }
    }

    /// Componentwise reduction mod `modulus` on every `ℤ^d` factor; finite
    /// factors map identically.
    pub fn reduce(source: Group, modulus: i64) -> Result<QuotientMap> {
        if modulus < 1 {
            return Err(crate::error::parameter(format!("modulus must be positive, got {modulus}")));
        }
        let (image, rule) = reduce_parts(&source, modulus)?;
        Ok(QuotientMap {
            source,
            image,
            rule,
        })
    }

    /// `G → G/N` for a finite group `G` and the listed normal subgroup `N`.
    pub fn by_normal_subgroup(source: Group, normal: &[Element]) -> Result<QuotientMap> {
        let elements = source.elements()?;
        let mut kernel: Vec<Element> = normal.to_vec();
        kernel.push(source.identity());
        kernel.sort();
        kernel.dedup();
        for n in &kernel {
            source.check(n)?;
        }
        for a in &kernel {
            for b in &kernel {
                let ab = source.multiply(a, b)?;
                if kernel.binary_search(&ab).is_err() {
                    return Err(structural(format!(
                        "the listed elements are not closed under multiplication: {a}·{b} = {ab}"
                    )));
                }
            }
        }
        for g in &elements {
            for n in &kernel {
                let c = source.conjugate(g, n)?;
                if kernel.binary_search(&c).is_err() {
                    return Err(structural(format!(
                        "the listed subgroup is not normal: conjugating {n} by {g} gives {c}"
                    )));
                }
            }
        }
        let mut coset_of = BTreeMap::new();
        let mut representatives = vec![source.identity()];
        for n in &kernel {
            coset_of.insert(n.clone(), 0);
        }
        // `elements` is sorted, so the first unseen element is the least of its coset.
        for g in &elements {
            if coset_of.contains_key(g) {
                continue;
            }
            let idx = representatives.len();
            representatives.push(g.clone());
            for n in &kernel {
                coset_of.insert(source.multiply(n, g)?, idx);
            }
        }
        let k = representatives.len();
        let mut mul = vec![vec![0; k]; k];
        for i in 0..k {
            for j in 0..k {
                let prod = source.multiply(&representatives[i], &representatives[j])?;
                mul[i][j] = coset_of[&prod];
            }
        }
        Ok(QuotientMap {
            source,
            image: Group::table(mul)?,
            rule: QuotientRule::Cosets(Arc::new(CosetTable {
                coset_of,
                representatives,
                kernel,
            })),
        })
    }

    /// Projection of `N × Q` onto `Q`.
    pub fn drop_left(source: Group) -> Result<QuotientMap> {
        match &source {
            Group::Direct(_, right) => Ok(QuotientMap {
                image: (**right).clone(),
                source,
                rule: QuotientRule::DropLeft,
            }),
            other => Err(structural(format!(
                "projection needs a direct product, got {}",
                other.describe()
            ))),
        }
    }

    pub fn source(&self) -> &Group {
        &self.source
    }

    pub fn image(&self) -> &Group {
        &self.image
    }

    pub fn rule(&self) -> &QuotientRule {
        &self.rule
    }

    /// The reduction modulus, when every lattice factor is reduced.
    pub fn modulus(&self) -> Option<i64> {
        fn find(rule: &QuotientRule) -> Option<i64> {
            match rule {
                QuotientRule::Reduce { modulus } => Some(*modulus),
                QuotientRule::Direct(a, b) => find(a).or_else(|| find(b)),
                _ => None,
            }
        }
        find(&self.rule)
    }

    /// `|image|`, when finite.
    pub fn index(&self) -> Option<u128> {
        self.image.order()
    }

    pub fn apply(&self, g: &Element) -> Result<Element> {
        self.source.check(g)?;
        apply_rule(&self.rule, &self.source, g)
    }

    pub fn section(&self, q: &Element) -> Result<Element> {
        self.image.check(q)?;
        section_rule(&self.rule, &self.source, q)
    }

    /// `σ(ḡ)`, the canonical representative of the coset of `g`.
    pub fn lift(&self, g: &Element) -> Result<Element> {
        self.section(&self.apply(g)?)
    }

    pub fn in_kernel(&self, g: &Element) -> Result<bool> {
        Ok(self.apply(g)?.is_identity())
    }

    /// Errors with a witness unless the images of `e` are pairwise distinct
    /// and the images of `e ∖ {1}` are nontrivial.
    pub fn check_separation(&self, e: &[Element]) -> Result<()> {
        let mut seen: BTreeMap<Element, &Element> = BTreeMap::new();
        for g in e {
            let img = self.apply(g)?;
            if !g.is_identity() && img.is_identity() {
                return Err(Error::Separation {
                    left: g.clone(),
                    right: self.source.identity(),
                });
            }
            if let Some(prev) = seen.insert(img, g) {
                if prev != g {
                    return Err(Error::Separation {
                        left: prev.clone(),
                        right: g.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn summary(&self) -> QuotientSummary {
        QuotientSummary {
            rule: self.to_string(),
            modulus: self.modulus(),
            index: self.index().map(|n| n.to_string()),
            image: {
                let d = self.image.describe();
                serde_json::from_str(&d).unwrap_or(serde_json::Value::String(d))
            },
            kernel: match &self.rule {
                QuotientRule::Cosets(t) => Some(t.kernel.clone()),
                _ => None,
            },
        }
    }
}

impl fmt::Display for QuotientMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn rule(r: &QuotientRule, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match r {
                QuotientRule::Identity => f.write_str("identity"),
                QuotientRule::Reduce { modulus } => write!(f, "mod {modulus}"),
                QuotientRule::Direct(a, b) => {
                    f.write_str("(")?;
                    rule(a, f)?;
                    f.write_str(") x (")?;
                    rule(b, f)?;
                    f.write_str(")")
                }
                QuotientRule::Cosets(t) => write!(
                    f,
                    "cosets of a normal subgroup of order {} ({} cosets)",
                    t.kernel.len(),
                    t.representatives.len()
                ),
                QuotientRule::DropLeft => f.write_str("projection onto the right factor"),
            }
        }
        rule(&self.rule, f)
    }
}

/// Report form of a quotient map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientSummary {
    pub rule: String,
    pub modulus: Option<i64>,
    pub index: Option<String>,
    pub image: serde_json::Value,
    pub kernel: Option<Vec<Element>>,
}

fn reduce_parts(source: &Group, modulus: i64) -> Result<(Group, QuotientRule)> {
    match source {
        Group::Lattice { d } => Ok((
            Group::LatticeMod { d: *d, m: modulus },
            QuotientRule::Reduce { modulus },
        )),
        Group::Direct(a, b) => {
            let (ia, ra) = reduce_parts(a, modulus)?;
            let (ib, rb) = reduce_parts(b, modulus)?;
            Ok((Group::direct(ia, ib), QuotientRule::Direct(Box::new(ra), Box::new(rb))))
        }
        g if g.is_finite() => Ok((g.clone(), QuotientRule::Identity)),
        other => Err(capability(format!(
            "no reduction quotient for {}; supported: finite groups, Z^d, and direct products of these",
            other.describe()
        ))),
    }
}

fn apply_rule(rule: &QuotientRule, source: &Group, g: &Element) -> Result<Element> {
    match (rule, source) {
        (QuotientRule::Identity, _) => Ok(g.clone()),
        (QuotientRule::Reduce { modulus }, _) => Ok(Element::Lattice(
            g.as_lattice()?.iter().map(|x| x.rem_euclid(*modulus)).collect(),
        )),
        (QuotientRule::Direct(ra, rb), Group::Direct(a, b)) => {
            let (x, y) = g.as_pair()?;
            Ok(Element::pair(apply_rule(ra, a, x)?, apply_rule(rb, b, y)?))
        }
        (QuotientRule::Cosets(t), _) => Ok(Element::Table(t.coset_of[g])),
        (QuotientRule::DropLeft, _) => Ok(g.as_pair()?.1.clone()),
        _ => Err(structural("quotient rule does not match its source group")),
    }
}

fn section_rule(rule: &QuotientRule, source: &Group, q: &Element) -> Result<Element> {
    match (rule, source) {
        (QuotientRule::Identity, _) | (QuotientRule::Reduce { .. }, _) => Ok(q.clone()),
        (QuotientRule::Direct(ra, rb), Group::Direct(a, b)) => {
            let (x, y) = q.as_pair()?;
            Ok(Element::pair(section_rule(ra, a, x)?, section_rule(rb, b, y)?))
        }
        (QuotientRule::Cosets(t), _) => Ok(t.representatives[q.as_index()?].clone()),
        (QuotientRule::DropLeft, Group::Direct(a, _)) => Ok(Element::pair(a.identity(), q.clone())),
        _ => Err(structural("quotient rule does not match its source group")),
    }
}

fn has_lattice_factor(g: &Group) -> bool {
    match g {
        Group::Lattice { d } => *d > 0,
        Group::Direct(a, b) => has_lattice_factor(a) || has_lattice_factor(b),
        _ => false,
    }
}

fn max_abs_coordinate(g: &Element) -> i64 {
    match g {
        Element::Lattice(v) => v.iter().map(|x| x.abs()).max().unwrap_or(0),
        Element::Pair(a, b) => max_abs_coordinate(a).max(max_abs_coordinate(b)),
        _ => 0,
    }
}

/// The smallest supported quotient separating `e`: the identity for finite
/// groups, otherwise reduction mod the least `m` that works.
pub fn separating_quotient(h: &Group, e: &[Element]) -> Result<QuotientMap> {
    for g in e {
        h.check(g)?;
    }
    if h.is_finite() {
        let q = QuotientMap::identity(h.clone());
        q.check_separation(e)?;
        return Ok(q);
    }
    if !has_lattice_factor(h) {
        return Err(capability(format!("no separating quotient provider for {}", h.describe())));
    }
    // Any modulus above twice the largest coordinate separates.
    let bound = 2 * e.iter().map(max_abs_coordinate).max().unwrap_or(0) + 1;
    for m in 1..=bound {
        let q = QuotientMap::reduce(h.clone(), m)?;
        match q.check_separation(e) {
            Ok(()) => return Ok(q),
            Err(Error::Separation { .. }) => continue,
            Err(other) => return Err(other),
        }
    }
    // Only reachable when finite factors already collide.
    let q = QuotientMap::reduce(h.clone(), bound)?;
    q.check_separation(e)?;
    Ok(q)
}
