//! Exact (or, for matrices, tolerance-checked) arithmetic for the groups the
//! closure constructions need.
//!
//! Infinite groups (`ℤ^d`, `U(n)`, `GL_n(ℂ)`, wreath products over them) are
//! element containers only: they multiply and compare, but never enumerate.

mod element;
mod matrix;
mod perm;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use element::{Element, FiniteSupport, WreathElement, MATRIX_IDENTITY_TOLERANCE};
pub use matrix::{Matrix, RANK_PIVOT_TOLERANCE, UNITARY_TOLERANCE};
pub use perm::Perm;

use crate::error::{capability, structural, Error, Result};

/// Largest group `elements()` will materialise.
pub const ENUMERATION_LIMIT: u128 = 5_000_000;

/// A concrete group: the descriptor determines the multiplication rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GroupSpec", into = "GroupSpec")]
pub enum Group {
    Trivial,
    /// `Sym(n)` acting on the right of `0..n`.
    Symmetric { n: usize },
    /// `ℤ/m` as `Table(0..m)`.
    Cyclic { m: usize },
    Table(Arc<MulTable>),
    /// `ℤ^d` under addition.
    Lattice { d: usize },
    /// `(ℤ/m)^d`, entries kept in `0..m`.
    LatticeMod { d: usize, m: i64 },
    /// Unitary-tagged `n×n` matrices.
    Unitary { n: usize },
    /// Invertible `n×n` complex matrices.
    GeneralLinear { n: usize },
    /// A finite matrix group given by an explicit element list.
    FiniteMatrix(Arc<FiniteMatrixGroup>),
    Direct(Box<Group>, Box<Group>),
    /// Restricted standard wreath product `bottom ≀ top`.
    Wreath { bottom: Box<Group>, top: Box<Group> },
    /// Permutation wreath product `bottom ≀ Sym(points)`.
    PermWreath { bottom: Box<Group>, points: usize },
}

/// Validated multiplication table with identity at index 0.
#[derive(Clone, Debug, PartialEq)]
pub struct MulTable {
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
}

impl MulTable {
    pub fn new(mul: Vec<Vec<usize>>) -> Result<MulTable> {
        let n = mul.len();
        if n == 0 {
            return Err(structural("multiplication table is empty"));
        }
        for (i, row) in mul.iter().enumerate() {
            if row.len() != n {
                return Err(structural(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if x >= n || seen[x] {
                    return Err(structural(format!("row {i} is not a permutation of 0..{n}")));
                }
                seen[x] = true;
            }
        }
        for i in 0..n {
            if mul[0][i] != i || mul[i][0] != i {
                return Err(structural("index 0 must be the identity of a table group"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(structural(format!(
                            "table is not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let inv = (0..n)
            .map(|a| (0..n).find(|&b| mul[a][b] == 0).expect("latin square"))
            .collect();
        Ok(MulTable { mul, inv })
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.mul
    }
}

/// Explicit finite subgroup of `GL_n(ℂ)`. Products are snapped to the stored
/// representative, so the group is closed bit-for-bit.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMatrixGroup {
    n: usize,
    generators: Vec<Matrix>,
    elements: Vec<Matrix>,
}

const FINITE_MATRIX_LIMIT: usize = 20_000;
const SNAP_TOLERANCE: f64 = 1e-9;

impl FiniteMatrixGroup {
    /// Closure of `generators` under multiplication.
    pub fn generated_by(generators: Vec<Matrix>) -> Result<FiniteMatrixGroup> {
        let n = generators
            .first()
            .map(Matrix::dim)
            .ok_or_else(|| structural("matrix closure needs at least one generator"))?;
        if generators.iter().any(|g| g.dim() != n) {
            return Err(structural("generators have different dimensions"));
        }
        let mut elements = vec![Matrix::identity(n)];
        let mut frontier = vec![Matrix::identity(n)];
        while let Some(x) = frontier.pop() {
            for g in &generators {
                let y = x.mul(g)?;
                if !elements.iter().any(|e| e.approx_eq(&y, SNAP_TOLERANCE)) {
                    if elements.len() >= FINITE_MATRIX_LIMIT {
                        return Err(capability(
                            "matrix closure exceeded the element limit; is the group finite?",
                        ));
                    }
                    elements.push(y.clone());
                    frontier.push(y);
                }
            }
        }
        elements.sort();
        Ok(FiniteMatrixGroup {
            n,
            generators,
            elements,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    fn snap(&self, m: &Matrix) -> Result<Matrix> {
        self.elements
            .iter()
            .find(|e| e.approx_eq(m, SNAP_TOLERANCE))
            .cloned()
            .ok_or_else(|| structural(format!("{m:?} is not an element of the finite matrix group")))
    }
}

impl Group {
    pub fn direct(left: Group, right: Group) -> Group {
        Group::Direct(Box::new(left), Box::new(right))
    }

    pub fn wreath(bottom: Group, top: Group) -> Group {
        Group::Wreath {
            bottom: Box::new(bottom),
            top: Box::new(top),
        }
    }

    pub fn perm_wreath(bottom: Group, points: usize) -> Group {
        Group::PermWreath {
            bottom: Box::new(bottom),
            points,
        }
    }

    pub fn table(mul: Vec<Vec<usize>>) -> Result<Group> {
        Ok(Group::Table(Arc::new(MulTable::new(mul)?)))
    }

    pub fn matrix_closure(generators: Vec<Matrix>) -> Result<Group> {
        Ok(Group::FiniteMatrix(Arc::new(FiniteMatrixGroup::generated_by(generators)?)))
    }

    pub fn identity(&self) -> Element {
        match self {
            Group::Trivial | Group::Cyclic { .. } | Group::Table(_) => Element::Table(0),
            Group::Symmetric { n } => Element::Perm(Perm::identity(*n)),
            Group::Lattice { d } | Group::LatticeMod { d, .. } => Element::Lattice(vec![0; *d]),
            Group::Unitary { n } | Group::GeneralLinear { n } => {
                Element::Matrix(Matrix::identity(*n))
            }
            Group::FiniteMatrix(g) => Element::Matrix(Matrix::identity(g.n)),
            Group::Direct(a, b) => Element::pair(a.identity(), b.identity()),
            Group::Wreath { top, .. } => Element::wreath(top.identity(), FiniteSupport::new()),
            Group::PermWreath { points, .. } => {
                Element::wreath(Element::Perm(Perm::identity(*points)), FiniteSupport::new())
            }
        }
    }

    /// Structural membership check.
    pub fn check(&self, g: &Element) -> Result<()> {
        let bad = || structural(format!("{g} is not an element of {}", self.describe()));
        match (self, g) {
            (Group::Trivial, Element::Table(0)) => Ok(()),
            (Group::Symmetric { n }, Element::Perm(p)) if p.degree() == *n => Ok(()),
            (Group::Cyclic { m }, Element::Table(i)) if i < m => Ok(()),
            (Group::Table(t), Element::Table(i)) if *i < t.order() => Ok(()),
            (Group::Lattice { d }, Element::Lattice(v)) if v.len() == *d => Ok(()),
            (Group::LatticeMod { d, m }, Element::Lattice(v))
                if v.len() == *d && v.iter().all(|x| (0..*m).contains(x)) =>
            {
                Ok(())
            }
            (Group::Unitary { n }, Element::Matrix(x)) if x.dim() == *n => {
                if x.is_unitary() {
                    Ok(())
                } else {
                    Err(structural(format!("{g} is not unitary")))
                }
            }
            (Group::GeneralLinear { n }, Element::Matrix(x)) if x.dim() == *n => {
                if x.rank() == *n {
                    Ok(())
                } else {
                    Err(structural(format!("{g} is singular")))
                }
            }
            (Group::FiniteMatrix(fm), Element::Matrix(x)) if fm.elements.contains(x) => Ok(()),
            (Group::Direct(a, b), Element::Pair(x, y)) => {
                a.check(x)?;
                b.check(y)
            }
            (Group::Wreath { bottom, top }, Element::Wreath(w)) => {
                top.check(&w.head)?;
                for (k, v) in w.base.iter() {
                    top.check(k)?;
                    bottom.check(v)?;
                }
                Ok(())
            }
            (Group::PermWreath { bottom, points }, Element::Wreath(w)) => {
                match &w.head {
                    Element::Perm(p) if p.degree() == *points => {}
                    _ => return Err(bad()),
                }
                for (k, v) in w.base.iter() {
                    match k {
                        Element::Table(a) if a < points => {}
                        _ => return Err(bad()),
                    }
                    bottom.check(v)?;
                }
                Ok(())
            }
            _ => Err(bad()),
        }
    }

    pub fn multiply(&self, g: &Element, h: &Element) -> Result<Element> {
        let mismatch = || {
            structural(format!(
                "cannot multiply {g} and {h} in {}",
                self.describe()
            ))
        };
        match (self, g, h) {
            (Group::Trivial, Element::Table(0), Element::Table(0)) => Ok(Element::Table(0)),
            (Group::Symmetric { n }, Element::Perm(a), Element::Perm(b))
                if a.degree() == *n && b.degree() == *n =>
            {
                Ok(Element::Perm(a.then(b)?))
            }
            (Group::Cyclic { m }, Element::Table(a), Element::Table(b)) if a < m && b < m => {
                Ok(Element::Table((a + b) % m))
            }
            (Group::Table(t), Element::Table(a), Element::Table(b))
                if *a < t.order() && *b < t.order() =>
            {
                Ok(Element::Table(t.mul[*a][*b]))
            }
            (Group::Lattice { d }, Element::Lattice(a), Element::Lattice(b))
                if a.len() == *d && b.len() == *d =>
            {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.checked_add(*y).ok_or_else(|| structural("lattice overflow")))
                    .collect::<Result<Vec<_>>>()
                    .map(Element::Lattice)
            }
            (Group::LatticeMod { d, m }, Element::Lattice(a), Element::Lattice(b))
                if a.len() == *d && b.len() == *d =>
            {
                Ok(Element::Lattice(
                    a.iter().zip(b).map(|(x, y)| (x + y).rem_euclid(*m)).collect(),
                ))
            }
            (
                Group::Unitary { n } | Group::GeneralLinear { n },
                Element::Matrix(a),
                Element::Matrix(b),
            ) if a.dim() == *n && b.dim() == *n => Ok(Element::Matrix(a.mul(b)?)),
            (Group::FiniteMatrix(fm), Element::Matrix(a), Element::Matrix(b))
                if a.dim() == fm.n && b.dim() == fm.n =>
            {
                Ok(Element::Matrix(fm.snap(&a.mul(b)?)?))
            }
            (Group::Direct(left, right), Element::Pair(a1, b1), Element::Pair(a2, b2)) => Ok(
                Element::pair(left.multiply(a1, a2)?, right.multiply(b1, b2)?),
            ),
            (
                Group::Wreath { bottom, top },
                Element::Wreath(w1),
                Element::Wreath(w2),
            ) => {
                // (h1 b1)(h2 b2) = h1 h2 · b1^{h2} b2
                let head = top.multiply(&w1.head, &w2.head)?;
                let shifted = self.conjugate_base(&w1.base, &w2.head)?;
                let base = pointwise(bottom, &shifted, &w2.base)?;
                Ok(Element::wreath(head, base))
            }
            (Group::PermWreath { bottom, points }, Element::Wreath(w1), Element::Wreath(w2)) => {
                let (a1, a2) = (w1.head.as_perm()?, w2.head.as_perm()?);
                if a1.degree() != *points || a2.degree() != *points {
                    return Err(mismatch());
                }
                let head = Element::Perm(a1.then(a2)?);
                let shifted = self.conjugate_base(&w1.base, &w2.head)?;
                let base = pointwise(bottom, &shifted, &w2.base)?;
                Ok(Element::wreath(head, base))
            }
            _ => Err(mismatch()),
        }
    }

    pub fn invert(&self, g: &Element) -> Result<Element> {
        match (self, g) {
            (Group::Trivial, Element::Table(0)) => Ok(Element::Table(0)),
            (Group::Symmetric { n }, Element::Perm(p)) if p.degree() == *n => {
                Ok(Element::Perm(p.inverse()))
            }
            (Group::Cyclic { m }, Element::Table(a)) if a < m => Ok(Element::Table((m - a) % m)),
            (Group::Table(t), Element::Table(a)) if *a < t.order() => Ok(Element::Table(t.inv[*a])),
            (Group::Lattice { d }, Element::Lattice(v)) if v.len() == *d => v
                .iter()
                .map(|x| x.checked_neg().ok_or_else(|| structural("lattice overflow")))
                .collect::<Result<Vec<_>>>()
                .map(Element::Lattice),
            (Group::LatticeMod { d, m }, Element::Lattice(v)) if v.len() == *d => Ok(
                Element::Lattice(v.iter().map(|x| (-x).rem_euclid(*m)).collect()),
            ),
            (Group::Unitary { n }, Element::Matrix(a)) if a.dim() == *n => {
                Ok(Element::Matrix(a.adjoint()))
            }
            (Group::GeneralLinear { n }, Element::Matrix(a)) if a.dim() == *n => {
                Ok(Element::Matrix(a.inverse()?))
            }
            (Group::FiniteMatrix(fm), Element::Matrix(a)) if a.dim() == fm.n => {
                Ok(Element::Matrix(fm.snap(&a.inverse()?)?))
            }
            (Group::Direct(left, right), Element::Pair(a, b)) => {
                Ok(Element::pair(left.invert(a)?, right.invert(b)?))
            }
            (Group::Wreath { bottom, top }, Element::Wreath(w)) => {
                // (h, b)^{-1} = (h^{-1}, (b^{-1})^{h^{-1}})
                let head_inv = top.invert(&w.head)?;
                let base_inv = invert_pointwise(bottom, &w.base)?;
                let base = self.conjugate_base(&base_inv, &head_inv)?;
                Ok(Element::wreath(head_inv, base))
            }
            (Group::PermWreath { bottom, .. }, Element::Wreath(w)) => {
                let head_inv = Element::Perm(w.head.as_perm()?.inverse());
                let base_inv = invert_pointwise(bottom, &w.base)?;
                let base = self.conjugate_base(&base_inv, &head_inv)?;
                Ok(Element::wreath(head_inv, base))
            }
            _ => Err(structural(format!(
                "cannot invert {g} in {}",
                self.describe()
            ))),
        }
    }

    /// Right action of the head group on base functions.
    ///
    /// For `G ≀ H`: `b^h(k) = b(k h^{-1})`, so the entry at `k` moves to `k h`.
    /// For `K ≀ Sym(A)`: `b^α(a) = b(a^{α^{-1}})`, so the entry at `a` moves to `a^α`.
    pub fn conjugate_base(&self, b: &FiniteSupport, h: &Element) -> Result<FiniteSupport> {
        match self {
            Group::Wreath { top, .. } => {
                let mut out = FiniteSupport::new();
                for (k, v) in b.iter() {
                    out.set(top.multiply(k, h)?, v.clone());
                }
                Ok(out)
            }
            Group::PermWreath { points, .. } => {
                let alpha = h.as_perm()?;
                if alpha.degree() != *points {
                    return Err(structural("permutation degree does not match the point set"));
                }
                let mut out = FiniteSupport::new();
                for (k, v) in b.iter() {
                    let a = k.as_index()?;
                    if a >= *points {
                        return Err(structural(format!("point {a} outside 0..{points}")));
                    }
                    out.set(Element::Table(alpha.apply(a)), v.clone());
                }
                Ok(out)
            }
            _ => Err(structural(format!(
                "{} is not a wreath product",
                self.describe()
            ))),
        }
    }

    /// `x^{-1} y^{-1} x y`.
    pub fn commutator(&self, x: &Element, y: &Element) -> Result<Element> {
        let xi = self.invert(x)?;
        let yi = self.invert(y)?;
        self.multiply(&self.multiply(&xi, &yi)?, &self.multiply(x, y)?)
    }

    /// `x y x^{-1}`.
    pub fn conjugate(&self, x: &Element, y: &Element) -> Result<Element> {
        self.multiply(&self.multiply(x, y)?, &self.invert(x)?)
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    /// `None` for infinite groups. Saturates at `u128::MAX`.
    pub fn order(&self) -> Option<u128> {
        match self {
            Group::Trivial => Some(1),
            Group::Symmetric { n } => Some((1..=*n as u128).fold(1u128, |a, b| a.saturating_mul(b))),
            Group::Cyclic { m } => Some(*m as u128),
            Group::Table(t) => Some(t.order() as u128),
            Group::Lattice { d } => (*d == 0).then_some(1),
            Group::LatticeMod { d, m } => Some((*m as u128).saturating_pow(*d as u32)),
            Group::Unitary { .. } | Group::GeneralLinear { .. } => None,
            Group::FiniteMatrix(fm) => Some(fm.elements.len() as u128),
            Group::Direct(a, b) => Some(a.order()?.saturating_mul(b.order()?)),
            Group::Wreath { bottom, top } => {
                let (g, h) = (bottom.order()?, top.order()?);
                let exp = u32::try_from(h).unwrap_or(u32::MAX);
                Some(h.saturating_mul(g.saturating_pow(exp)))
            }
            Group::PermWreath { bottom, points } => {
                let k = bottom.order()?;
                let fact = (1..=*points as u128).fold(1u128, |a, b| a.saturating_mul(b));
                Some(fact.saturating_mul(k.saturating_pow(*points as u32)))
            }
        }
    }

    /// Every element, sorted in canonical order.
    pub fn elements(&self) -> Result<Vec<Element>> {
        let order = self.order().ok_or_else(|| {
            capability(format!("{} is infinite and cannot be enumerated", self.describe()))
        })?;
        if order > ENUMERATION_LIMIT {
            return Err(capability(format!(
                "{} has order {order}, above the enumeration limit {ENUMERATION_LIMIT}",
                self.describe()
            )));
        }
        let mut out = match self {
            Group::Trivial => vec![Element::Table(0)],
            Group::Symmetric { n } => Perm::all(*n).into_iter().map(Element::Perm).collect(),
            Group::Cyclic { m } => (0..*m).map(Element::Table).collect(),
            Group::Table(t) => (0..t.order()).map(Element::Table).collect(),
            Group::Lattice { .. } => vec![self.identity()],
            Group::LatticeMod { d, m } => cartesian_power(&(0..*m).collect::<Vec<_>>(), *d)
                .into_iter()
                .map(Element::Lattice)
                .collect(),
            Group::FiniteMatrix(fm) => fm.elements.iter().cloned().map(Element::Matrix).collect(),
            Group::Direct(a, b) => {
                let (xs, ys) = (a.elements()?, b.elements()?);
                xs.iter()
                    .flat_map(|x| ys.iter().map(move |y| Element::pair(x.clone(), y.clone())))
                    .collect()
            }
            Group::Wreath { bottom, top } => {
                let heads = top.elements()?;
                let values = bottom.elements()?;
                wreath_elements(&heads, &heads, &values)
            }
            Group::PermWreath { bottom, points } => {
                let heads: Vec<Element> = Perm::all(*points).into_iter().map(Element::Perm).collect();
                let keys: Vec<Element> = (0..*points).map(Element::Table).collect();
                wreath_elements(&heads, &keys, &bottom.elements()?)
            }
            Group::Unitary { .. } | Group::GeneralLinear { .. } => unreachable!("infinite"),
        };
        out.sort();
        Ok(out)
    }

    /// Compact JSON descriptor, used in messages and reports.
    pub fn describe(&self) -> String {
        match self {
            Group::Table(t) => format!("{{\"kind\":\"table\",\"order\":{}}}", t.order()),
            Group::FiniteMatrix(fm) => format!(
                "{{\"kind\":\"matrix-closure\",\"n\":{},\"order\":{}}}",
                fm.n,
                fm.elements.len()
            ),
            Group::Direct(a, b) => format!(
                "{{\"kind\":\"direct\",\"left\":{},\"right\":{}}}",
                a.describe(),
                b.describe()
            ),
            Group::Wreath { bottom, top } => format!(
                "{{\"kind\":\"wreath\",\"bottom\":{},\"top\":{}}}",
                bottom.describe(),
                top.describe()
            ),
            Group::PermWreath { bottom, points } => format!(
                "{{\"kind\":\"perm-wreath\",\"bottom\":{},\"points\":{points}}}",
                bottom.describe()
            ),
            other => serde_json::to_string(other).expect("descriptor serializes"),
        }
    }
}

fn pointwise(bottom: &Group, b1: &FiniteSupport, b2: &FiniteSupport) -> Result<FiniteSupport> {
    let mut out = b1.clone();
    for (k, v2) in b2.iter() {
        let v = match b1.get(k) {
            Some(v1) => bottom.multiply(v1, v2)?,
            None => v2.clone(),
        };
        out.set(k.clone(), v);
    }
    Ok(out)
}

fn invert_pointwise(bottom: &Group, b: &FiniteSupport) -> Result<FiniteSupport> {
    let mut out = FiniteSupport::new();
    for (k, v) in b.iter() {
        out.set(k.clone(), bottom.invert(v)?);
    }
    Ok(out)
}

fn cartesian_power<T: Clone>(values: &[T], d: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect();
    }
    out
}

fn wreath_elements(heads: &[Element], keys: &[Element], values: &[Element]) -> Vec<Element> {
    let functions = cartesian_power(values, keys.len());
    heads
        .iter()
        .flat_map(|h| {
            functions.iter().map(move |vals| {
                Element::wreath(
                    h.clone(),
                    FiniteSupport::from_entries(keys.iter().cloned().zip(vals.iter().cloned())),
                )
            })
        })
        .collect()
}

/// Serialized group descriptor, tagged by `"kind"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupSpec {
    Trivial,
    Sym { n: usize },
    Cyclic { m: usize },
    Table { mul: Vec<Vec<usize>> },
    Lattice { d: usize },
    LatticeMod { d: usize, m: i64 },
    Unitary { n: usize },
    Gl { n: usize },
    MatrixClosure { generators: Vec<Element> },
    Direct { left: Box<GroupSpec>, right: Box<GroupSpec> },
    Wreath { bottom: Box<GroupSpec>, top: Box<GroupSpec> },
    PermWreath { bottom: Box<GroupSpec>, points: usize },
}

impl TryFrom<GroupSpec> for Group {
    type Error = Error;

    fn try_from(spec: GroupSpec) -> Result<Group> {
        Ok(match spec {
            GroupSpec::Trivial => Group::Trivial,
            GroupSpec::Sym { n } => Group::Symmetric { n },
            GroupSpec::Cyclic { m } => {
                if m == 0 {
                    return Err(structural("cyclic group needs m >= 1"));
                }
                Group::Cyclic { m }
            }
            GroupSpec::Table { mul } => Group::table(mul)?,
            GroupSpec::Lattice { d } => Group::Lattice { d },
            GroupSpec::LatticeMod { d, m } => {
                if m < 1 {
                    return Err(structural("lattice-mod needs m >= 1"));
                }
                Group::LatticeMod { d, m }
            }
            GroupSpec::Unitary { n } | GroupSpec::Gl { n } if n == 0 => {
                return Err(structural("matrix groups need n >= 1"))
            }
            GroupSpec::Unitary { n } => Group::Unitary { n },
            GroupSpec::Gl { n } => Group::GeneralLinear { n },
            GroupSpec::MatrixClosure { generators } => Group::matrix_closure(
                generators
                    .into_iter()
                    .map(|g| g.as_matrix().cloned())
                    .collect::<Result<Vec<_>>>()?,
            )?,
            GroupSpec::Direct { left, right } => {
                Group::direct(Group::try_from(*left)?, Group::try_from(*right)?)
            }
            GroupSpec::Wreath { bottom, top } => {
                Group::wreath(Group::try_from(*bottom)?, Group::try_from(*top)?)
            }
            GroupSpec::PermWreath { bottom, points } => {
                if points == 0 {
                    return Err(structural("perm-wreath needs at least one point"));
                }
                Group::perm_wreath(Group::try_from(*bottom)?, points)
            }
        })
    }
}

impl From<Group> for GroupSpec {
    fn from(g: Group) -> GroupSpec {
        match g {
            Group::Trivial => GroupSpec::Trivial,
            Group::Symmetric { n } => GroupSpec::Sym { n },
            Group::Cyclic { m } => GroupSpec::Cyclic { m },
            Group::Table(t) => GroupSpec::Table { mul: t.mul.clone() },
            Group::Lattice { d } => GroupSpec::Lattice { d },
            Group::LatticeMod { d, m } => GroupSpec::LatticeMod { d, m },
            Group::Unitary { n } => GroupSpec::Unitary { n },
            Group::GeneralLinear { n } => GroupSpec::Gl { n },
            Group::FiniteMatrix(fm) => GroupSpec::MatrixClosure {
                generators: fm.generators.iter().cloned().map(Element::Matrix).collect(),
            },
            Group::Direct(a, b) => GroupSpec::Direct {
                left: Box::new((*a).into()),
                right: Box::new((*b).into()),
            },
            Group::Wreath { bottom, top } => GroupSpec::Wreath {
                bottom: Box::new((*bottom).into()),
                top: Box::new((*top).into()),
            },
            Group::PermWreath { bottom, points } => GroupSpec::PermWreath {
                bottom: Box::new((*bottom).into()),
                points,
            },
        }
    }
}

/// `diag(±1, …)` generators for the diagonal sign group in dimension `n`.
pub fn diagonal_sign_generators(n: usize) -> Vec<Matrix> {
    (0..n)
        .map(|i| {
            let vals: Vec<Complex64> = (0..n)
                .map(|j| Complex64::new(if i == j { -1.0 } else { 1.0 }, 0.0))
                .collect();
            Matrix::diagonal(&vals)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(x: i64) -> Element {
        Element::lattice1(x)
    }

    fn lamplighter() -> Group {
        Group::wreath(Group::Cyclic { m: 2 }, Group::Lattice { d: 1 })
    }

    #[test]
    fn transposition_squared_is_identity() {
        let s3 = Group::Symmetric { n: 3 };
        let t = Element::Perm(Perm::from_cycles(3, &[&[1, 2]]).unwrap());
        assert_eq!(s3.multiply(&t, &t).unwrap(), s3.identity());
    }

    #[test]
    fn head_only_wreath_product() {
        let w = lamplighter();
        let a = Element::wreath(z(2), FiniteSupport::new());
        let b = Element::wreath(z(-5), FiniteSupport::new());
        assert_eq!(
            w.multiply(&a, &b).unwrap(),
            Element::wreath(z(-3), FiniteSupport::new())
        );
    }

    #[test]
    fn lamplighter_square_of_t_delta0() {
        // (t, δ0)(t, δ0) = (t², δ0^t δ0) and δ0^t(h') = δ0(h' - 1) lights lamp 1.
        let w = lamplighter();
        let td0 = Element::wreath(z(1), FiniteSupport::singleton(z(0), Element::Table(1)));
        let sq = w.multiply(&td0, &td0).unwrap();
        let expected = Element::wreath(
            z(2),
            FiniteSupport::from_entries([(z(0), Element::Table(1)), (z(1), Element::Table(1))]),
        );
        assert_eq!(sq, expected);
    }

    #[test]
    fn conjugate_base_shifts_support() {
        let w = lamplighter();
        let b = FiniteSupport::singleton(z(0), Element::Table(1));
        let shifted = w.conjugate_base(&b, &z(1)).unwrap();
        assert_eq!(shifted, FiniteSupport::singleton(z(1), Element::Table(1)));
        assert_eq!(w.conjugate_base(&b, &z(0)).unwrap(), b);
        let back = w.conjugate_base(&shifted, &z(-1)).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn singleton_wreath_inverse() {
        let w = Group::wreath(Group::Cyclic { m: 3 }, Group::Lattice { d: 1 });
        let g = Element::wreath(z(2), FiniteSupport::singleton(z(1), Element::Table(1)));
        let gi = w.invert(&g).unwrap();
        // (h^{-1}, b^{-h^{-1}}): value 2 = -1 mod 3 moved from 1 to 1 - 2 = -1
        assert_eq!(
            gi,
            Element::wreath(z(-2), FiniteSupport::singleton(z(-1), Element::Table(2)))
        );
        assert!(w.multiply(&g, &gi).unwrap().is_identity());
        assert!(w.multiply(&gi, &g).unwrap().is_identity());
    }

    #[test]
    fn wreath_orders() {
        let perm_wreath = Group::perm_wreath(Group::Cyclic { m: 2 }, 2);
        assert_eq!(perm_wreath.order(), Some(8));
        assert_eq!(perm_wreath.elements().unwrap().len(), 8);
        let finite = Group::wreath(Group::Cyclic { m: 2 }, Group::Cyclic { m: 3 });
        assert_eq!(finite.order(), Some(24));
        assert_eq!(finite.elements().unwrap().len(), 24);
        assert_eq!(Group::perm_wreath(Group::Cyclic { m: 2 }, 3).order(), Some(48));
    }

    #[test]
    fn trivial_bottom_reduces_to_head() {
        let w = Group::wreath(Group::Trivial, Group::Cyclic { m: 5 });
        let els = w.elements().unwrap();
        assert_eq!(els.len(), 5);
        for e in &els {
            assert!(e.as_wreath().unwrap().base.is_empty());
        }
    }

    #[test]
    fn infinite_enumeration_is_a_capability_error() {
        assert!(matches!(
            lamplighter().elements(),
            Err(Error::Capability(_))
        ));
        assert!(matches!(
            Group::Unitary { n: 2 }.elements(),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn mismatched_elements_are_structural_errors() {
        let s3 = Group::Symmetric { n: 3 };
        let p4 = Element::Perm(Perm::identity(4));
        assert!(matches!(
            s3.multiply(&p4, &p4),
            Err(Error::Structural(_))
        ));
        let gl = Group::GeneralLinear { n: 2 };
        let singular = Element::Matrix(Matrix::from_real(2, &[1.0, 1.0, 1.0, 1.0]).unwrap());
        assert!(matches!(gl.invert(&singular), Err(Error::Structural(_))));
    }

    #[test]
    fn table_group_validation() {
        assert!(Group::table(vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert!(Group::table(vec![vec![1, 0], vec![0, 1]]).is_err());
        assert!(Group::table(vec![vec![0, 1], vec![1, 1]]).is_err());
    }

    #[test]
    fn sign_group_closure() {
        let g = Group::matrix_closure(diagonal_sign_generators(2)).unwrap();
        assert_eq!(g.order(), Some(4));
        let pm = Group::matrix_closure(vec![Matrix::scalar(2, Complex64::new(-1.0, 0.0))]).unwrap();
        assert_eq!(pm.order(), Some(2));
    }

    #[test]
    fn descriptor_round_trip() {
        let json = r#"{"kind":"wreath","bottom":{"kind":"cyclic","m":2},"top":{"kind":"lattice","d":1}}"#;
        let g: Group = serde_json::from_str(json).unwrap();
        assert_eq!(g, lamplighter());
        assert_eq!(serde_json::to_string(&g).unwrap(), json);
    }
}
