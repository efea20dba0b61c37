//! Invariant length functions `ℓ: K → [0, 1]`, weight functions, and the
//! checkers that verify the length axioms on concrete groups.

mod check;
mod weight;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use check::{
    check_axioms, check_commutator_contractive, diameter, search_lp_counterexample,
    unitary_parallelogram_check, Axiom, AxiomReport, CheckMode, LpCounterexample, Violation,
    AXIOM_TOLERANCE,
};
pub use weight::WeightFunction;

use crate::error::{parameter, Error, Result};
use crate::groups::Element;

/// The exponent of an `L^p` combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Exponent {
    Finite(u32),
    Infinity,
}

impl Exponent {
    pub fn new(p: u32) -> Result<Exponent> {
        if p == 0 {
            return Err(parameter("L^p exponent must be a positive integer or infinity"));
        }
        Ok(Exponent::Finite(p))
    }

    /// `((a^p + b^p) / 2)^{1/p}`, or `max(a, b)` for `p = ∞`.
    pub fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            Exponent::Infinity => a.max(b),
            Exponent::Finite(1) => (a + b) / 2.0,
            Exponent::Finite(p) => {
                let p = p as f64;
                ((a.powf(p) + b.powf(p)) / 2.0).powf(1.0 / p)
            }
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_u32(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(p) => Exponent::new(p).map_err(serde::de::Error::custom),
            Raw::Str(s) if s == "inf" || s == "infinity" => Ok(Exponent::Infinity),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "invalid exponent {s:?}: expected a positive integer or \"inf\""
            ))),
        }
    }
}

/// Labels attached to a length function: what it is, and what it is claimed
/// or verified to satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    VerifiedAxioms,
    CommutatorContractive,
    Trivial,
    Hamming,
    HilbertSchmidt,
    Rank,
    Lp(Exponent),
    WreathMax,
    WreathAvg,
    Rescaled,
    Scaled,
    Custom,
}

/// Evaluator for ad-hoc length functions, used for counterexamples.
#[derive(Clone)]
pub struct CustomLength {
    pub name: String,
    pub eval: Arc<dyn Fn(&Element) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomLength({})", self.name)
    }
}

impl PartialEq for CustomLength {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && Arc::ptr_eq(&self.eval, &other.eval)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LengthKind {
    /// `ℓ(1) = 0`, `ℓ(g) = 1` otherwise.
    Trivial,
    /// Proportion of points moved by a permutation.
    Hamming,
    /// `½ ‖g − I‖_HS` on unitary matrices.
    HilbertSchmidt,
    /// `rk(I − g) / n` on invertible matrices.
    Rank,
    Lp {
        p: Exponent,
        left: Box<LengthFunction>,
        right: Box<LengthFunction>,
    },
    /// 1 off the base group, max of the inner length over coordinates on it.
    WreathMax { inner: Box<LengthFunction> },
    /// Average over points: inner length at fixed points, 1 at moved points.
    WreathAvg { inner: Box<LengthFunction> },
    /// `min(ℓ/c, 1)`.
    Rescale { c: f64, inner: Box<LengthFunction> },
    /// `factor · ℓ` with `0 < factor ≤ 1`.
    Scaled { factor: f64, inner: Box<LengthFunction> },
    Custom(CustomLength),
}

/// A length function together with its tags.
#[derive(Clone, Debug, PartialEq)]
pub struct LengthFunction {
    kind: LengthKind,
    verified: bool,
}

impl LengthFunction {
    fn from_kind(kind: LengthKind) -> LengthFunction {
        LengthFunction {
            kind,
            verified: false,
        }
    }

    pub fn trivial() -> LengthFunction {
        LengthFunction::from_kind(LengthKind::Trivial)
    }

    pub fn hamming() -> LengthFunction {
        LengthFunction::from_kind(LengthKind::Hamming)
    }

    pub fn hilbert_schmidt() -> LengthFunction {
        LengthFunction::from_kind(LengthKind::HilbertSchmidt)
    }

    pub fn rank() -> LengthFunction {
        LengthFunction::from_kind(LengthKind::Rank)
    }

    pub fn lp(left: LengthFunction, right: LengthFunction, p: Exponent) -> LengthFunction {
        LengthFunction::from_kind(LengthKind::Lp {
            p,
            left: Box::new(left),
            right: Box::new(right),
        })
    }

    /// `ℓ_J^X` on `J ≀ X` for finite `X`.
    pub fn wreath_max(inner: LengthFunction) -> LengthFunction {
        LengthFunction::from_kind(LengthKind::WreathMax {
            inner: Box::new(inner),
        })
    }

    /// `ℓ̂_K^A` on `K ≀ Sym(A)`.
    pub fn wreath_avg(inner: LengthFunction) -> LengthFunction {
        LengthFunction::from_kind(LengthKind::WreathAvg {
            inner: Box::new(inner),
        })
    }

    pub fn rescale(inner: LengthFunction, c: f64) -> Result<LengthFunction> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(parameter(format!("rescale constant must lie in (0, 1], got {c}")));
        }
        Ok(LengthFunction::from_kind(LengthKind::Rescale {
            c,
            inner: Box::new(inner),
        }))
    }

    pub fn scaled(inner: LengthFunction, factor: f64) -> Result<LengthFunction> {
        if !(factor > 0.0 && factor <= 1.0) {
            return Err(parameter(format!("scale factor must lie in (0, 1], got {factor}")));
        }
        Ok(LengthFunction::from_kind(LengthKind::Scaled {
            factor,
            inner: Box::new(inner),
        }))
    }

    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(&Element) -> f64 + Send + Sync + 'static,
    ) -> LengthFunction {
        LengthFunction::from_kind(LengthKind::Custom(CustomLength {
            name: name.into(),
            eval: Arc::new(eval),
        }))
    }

    pub fn kind(&self) -> &LengthKind {
        &self.kind
    }

    /// Copy of `self` tagged as having passed an axiom check. Returns `self`
    /// unchanged when the report has violations.
    pub fn with_verification(mut self, report: &AxiomReport) -> LengthFunction {
        if report.is_clean() && report.covers_axioms() {
            self.verified = true;
        }
        self
    }

    /// Whether commutator-contractivity follows from how the function was built.
    pub fn claims_commutator_contractive(&self) -> bool {
        match &self.kind {
            LengthKind::Trivial => true,
            LengthKind::Lp {
                p: Exponent::Infinity,
                left,
                right,
            } => left.claims_commutator_contractive() && right.claims_commutator_contractive(),
            LengthKind::WreathMax { inner } | LengthKind::Rescale { inner, .. } => {
                inner.claims_commutator_contractive()
            }
            LengthKind::Scaled { factor, inner } => {
                matches!(inner.kind, LengthKind::Trivial) && *factor >= 0.25
            }
            _ => false,
        }
    }

    pub fn tags(&self) -> BTreeSet<Tag> {
        let mut tags = BTreeSet::new();
        tags.insert(match &self.kind {
            LengthKind::Trivial => Tag::Trivial,
            LengthKind::Hamming => Tag::Hamming,
            LengthKind::HilbertSchmidt => Tag::HilbertSchmidt,
            LengthKind::Rank => Tag::Rank,
            LengthKind::Lp { p, .. } => Tag::Lp(*p),
            LengthKind::WreathMax { .. } => Tag::WreathMax,
            LengthKind::WreathAvg { .. } => Tag::WreathAvg,
            LengthKind::Rescale { .. } => Tag::Rescaled,
            LengthKind::Scaled { .. } => Tag::Scaled,
            LengthKind::Custom(_) => Tag::Custom,
        });
        if self.claims_commutator_contractive() {
            tags.insert(Tag::CommutatorContractive);
        }
        if self.verified {
            tags.insert(Tag::VerifiedAxioms);
        }
        tags
    }

    pub fn evaluate(&self, g: &Element) -> Result<f64> {
        match &self.kind {
            LengthKind::Trivial => Ok(if g.is_identity() { 0.0 } else { 1.0 }),
            LengthKind::Hamming => {
                let p = g.as_perm().map_err(domain)?;
                if p.degree() == 0 {
                    return Err(Error::Domain("Hamming length needs at least one point".into()));
                }
                Ok(p.moved_points() as f64 / p.degree() as f64)
            }
            LengthKind::HilbertSchmidt => {
                let m = g.as_matrix().map_err(domain)?;
                if !m.is_unitary() {
                    return Err(Error::Domain(format!(
                        "Hilbert–Schmidt length needs a unitary matrix, got {g}"
                    )));
                }
                let id = crate::groups::Matrix::identity(m.dim());
                Ok(0.5 * m.sub(&id)?.hs_norm())
            }
            LengthKind::Rank => {
                let m = g.as_matrix().map_err(domain)?;
                let n = m.dim();
                if m.rank() < n {
                    return Err(Error::Domain(format!("rank length needs an invertible matrix, got {g}")));
                }
                let id = crate::groups::Matrix::identity(n);
                Ok(id.sub(m)?.rank() as f64 / n as f64)
            }
            LengthKind::Lp { p, left, right } => {
                let (x, y) = g.as_pair().map_err(domain)?;
                Ok(p.combine(left.evaluate(x)?, right.evaluate(y)?))
            }
            LengthKind::WreathMax { inner } => {
                let w = g.as_wreath().map_err(domain)?;
                if !w.head.is_identity() {
                    return Ok(1.0);
                }
                w.base
                    .values()
                    .try_fold(0.0f64, |acc, v| Ok(acc.max(inner.evaluate(v)?)))
            }
            LengthKind::WreathAvg { inner } => {
                let w = g.as_wreath().map_err(domain)?;
                let alpha = w.head.as_perm().map_err(domain)?;
                let n = alpha.degree();
                if n == 0 {
                    return Err(Error::Domain("permutation wreath needs a nonempty point set".into()));
                }
                let mut total = 0.0;
                for a in 0..n {
                    if alpha.apply(a) != a {
                        total += 1.0;
                    } else if let Some(v) = w.base.get(&Element::Table(a)) {
                        total += inner.evaluate(v)?;
                    }
                }
                Ok(total / n as f64)
            }
            LengthKind::Rescale { c, inner } => Ok((inner.evaluate(g)? / c).min(1.0)),
            LengthKind::Scaled { factor, inner } => Ok(factor * inner.evaluate(g)?),
            LengthKind::Custom(c) => Ok((c.eval)(g)),
        }
    }
}

fn domain(e: Error) -> Error {
    match e {
        Error::Structural(msg) => Error::Domain(msg),
        other => other,
    }
}

/// Serialized length descriptor, tagged by `"kind"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LengthSpec {
    Trivial,
    Hamming,
    Hs,
    Rank,
    Lp {
        p: Exponent,
        left: Box<LengthSpec>,
        right: Box<LengthSpec>,
    },
    WreathMax { inner: Box<LengthSpec> },
    WreathAvg { inner: Box<LengthSpec> },
    Rescale { c: f64, inner: Box<LengthSpec> },
    Scaled { factor: f64, inner: Box<LengthSpec> },
}

impl TryFrom<LengthSpec> for LengthFunction {
    type Error = Error;

    fn try_from(spec: LengthSpec) -> Result<LengthFunction> {
        Ok(match spec {
            LengthSpec::Trivial => LengthFunction::trivial(),
            LengthSpec::Hamming => LengthFunction::hamming(),
            LengthSpec::Hs => LengthFunction::hilbert_schmidt(),
            LengthSpec::Rank => LengthFunction::rank(),
            LengthSpec::Lp { p, left, right } => {
                LengthFunction::lp((*left).try_into()?, (*right).try_into()?, p)
            }
            LengthSpec::WreathMax { inner } => LengthFunction::wreath_max((*inner).try_into()?),
            LengthSpec::WreathAvg { inner } => LengthFunction::wreath_avg((*inner).try_into()?),
            LengthSpec::Rescale { c, inner } => LengthFunction::rescale((*inner).try_into()?, c)?,
            LengthSpec::Scaled { factor, inner } => {
                LengthFunction::scaled((*inner).try_into()?, factor)?
            }
        })
    }
}

impl LengthFunction {
    /// Descriptor for reports. Custom evaluators have no descriptor.
    pub fn spec(&self) -> Option<LengthSpec> {
        Some(match &self.kind {
            LengthKind::Trivial => LengthSpec::Trivial,
            LengthKind::Hamming => LengthSpec::Hamming,
            LengthKind::HilbertSchmidt => LengthSpec::Hs,
            LengthKind::Rank => LengthSpec::Rank,
            LengthKind::Lp { p, left, right } => LengthSpec::Lp {
                p: *p,
                left: Box::new(left.spec()?),
                right: Box::new(right.spec()?),
            },
            LengthKind::WreathMax { inner } => LengthSpec::WreathMax {
                inner: Box::new(inner.spec()?),
            },
            LengthKind::WreathAvg { inner } => LengthSpec::WreathAvg {
                inner: Box::new(inner.spec()?),
            },
            LengthKind::Rescale { c, inner } => LengthSpec::Rescale {
                c: *c,
                inner: Box::new(inner.spec()?),
            },
            LengthKind::Scaled { factor, inner } => LengthSpec::Scaled {
                factor: *factor,
                inner: Box::new(inner.spec()?),
            },
            LengthKind::Custom(_) => return None,
        })
    }
}
