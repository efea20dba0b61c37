use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::perm::Perm;
use crate::error::{structural, Error, Result};

/// Tolerance used to decide whether a matrix is the identity.
pub const MATRIX_IDENTITY_TOLERANCE: f64 = 1e-9;

/// An element of one of the concrete groups in [`super::Group`].
///
/// Elements carry no reference to their group; the group supplies the
/// multiplication rule. Cyclic and table groups use `Table(i)` with the
/// identity at index 0. Points of the permutation domain of `K ≀ Sym(A)`
/// are also written as `Table(a)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub enum Element {
    Perm(Perm),
    Matrix(Matrix),
    Table(usize),
    Lattice(Vec<i64>),
    Pair(Box<Element>, Box<Element>),
    Wreath(Box<WreathElement>),
}

/// `head · base` in a wreath product, following the `hb` normal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WreathElement {
    pub head: Element,
    pub base: FiniteSupport,
}

/// Finitely supported function into a bottom group.
///
/// Entries whose value is the identity are never stored, so two functions
/// are equal exactly when their entry maps are equal.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteSupport {
    entries: BTreeMap<Element, Element>,
}

impl Element {
    pub fn pair(left: Element, right: Element) -> Element {
        Element::Pair(Box::new(left), Box::new(right))
    }

    pub fn wreath(head: Element, base: FiniteSupport) -> Element {
        Element::Wreath(Box::new(WreathElement { head, base }))
    }

    pub fn lattice1(x: i64) -> Element {
        Element::Lattice(vec![x])
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Element::Perm(p) => p.is_identity(),
            Element::Matrix(m) => m.is_identity_within(MATRIX_IDENTITY_TOLERANCE),
            Element::Table(i) => *i == 0,
            Element::Lattice(v) => v.iter().all(|&x| x == 0),
            Element::Pair(a, b) => a.is_identity() && b.is_identity(),
            Element::Wreath(w) => w.head.is_identity() && w.base.is_empty(),
        }
    }

    pub fn as_perm(&self) -> Result<&Perm> {
        match self {
            Element::Perm(p) => Ok(p),
            other => Err(structural(format!("expected a permutation, got {other}"))),
        }
    }

    pub fn as_matrix(&self) -> Result<&Matrix> {
        match self {
            Element::Matrix(m) => Ok(m),
            other => Err(structural(format!("expected a matrix, got {other}"))),
        }
    }

    pub fn as_pair(&self) -> Result<(&Element, &Element)> {
        match self {
            Element::Pair(a, b) => Ok((a, b)),
            other => Err(structural(format!("expected a pair, got {other}"))),
        }
    }

    pub fn as_wreath(&self) -> Result<&WreathElement> {
        match self {
            Element::Wreath(w) => Ok(w),
            other => Err(structural(format!("expected a wreath element, got {other}"))),
        }
    }

    pub fn as_lattice(&self) -> Result<&[i64]> {
        match self {
            Element::Lattice(v) => Ok(v),
            other => Err(structural(format!("expected a lattice vector, got {other}"))),
        }
    }

    pub fn as_index(&self) -> Result<usize> {
        match self {
            Element::Table(i) => Ok(*i),
            other => Err(structural(format!("expected a table index, got {other}"))),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("elements always serialize")
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

impl FiniteSupport {
    pub fn new() -> FiniteSupport {
        FiniteSupport::default()
    }

    /// Canonicalising constructor: identity values are dropped, later keys win.
    pub fn from_entries<I: IntoIterator<Item = (Element, Element)>>(entries: I) -> FiniteSupport {
        let mut out = FiniteSupport::new();
        for (k, v) in entries {
            out.set(k, v);
        }
        out
    }

    /// A single non-identity value at `key`.
    pub fn singleton(key: Element, value: Element) -> FiniteSupport {
        FiniteSupport::from_entries([(key, value)])
    }

    pub fn set(&mut self, key: Element, value: Element) {
        if value.is_identity() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
    }

    /// Value at `key`; `None` stands for the bottom-group identity.
    pub fn get(&self, key: &Element) -> Option<&Element> {
        self.entries.get(key)
    }

    pub fn support(&self) -> impl Iterator<Item = &Element> {
        self.entries.keys()
    }

    pub fn values(&self) -> impl Iterator<Item = &Element> {
        self.entries.values()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Element, &Element)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Debug for FiniteSupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

/// On-disk element syntax: `{"perm":[1,0,2]}`, `{"lattice":[3]}`,
/// `{"table":2}`, `{"pair":[a,b]}`, `{"matrix":[[re,im],…]}` (row-major),
/// `{"wreath":{"head":…,"base":[[key,value],…]}}`.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum ElementRepr {
    Perm(Vec<usize>),
    Matrix(Vec<[f64; 2]>),
    Table(usize),
    Lattice(Vec<i64>),
    Pair(Element, Element),
    Wreath {
        head: Element,
        #[serde(default)]
        base: Vec<(Element, Element)>,
    },
}

impl TryFrom<ElementRepr> for Element {
    type Error = Error;

    fn try_from(repr: ElementRepr) -> Result<Element> {
        Ok(match repr {
            ElementRepr::Perm(images) => Element::Perm(Perm::new(images)?),
            ElementRepr::Matrix(entries) => {
                let n = (entries.len() as f64).sqrt().round() as usize;
                let data = entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
                Element::Matrix(Matrix::new(n, data)?)
            }
            ElementRepr::Table(i) => Element::Table(i),
            ElementRepr::Lattice(v) => Element::Lattice(v),
            ElementRepr::Pair(a, b) => Element::pair(a, b),
            ElementRepr::Wreath { head, base } => {
                Element::wreath(head, FiniteSupport::from_entries(base))
            }
        })
    }
}

impl From<Element> for ElementRepr {
    fn from(e: Element) -> ElementRepr {
        match e {
            Element::Perm(p) => ElementRepr::Perm(p.images().to_vec()),
            Element::Matrix(m) => {
                ElementRepr::Matrix(m.entries().iter().map(|z| [z.re, z.im]).collect())
            }
            Element::Table(i) => ElementRepr::Table(i),
            Element::Lattice(v) => ElementRepr::Lattice(v),
            Element::Pair(a, b) => ElementRepr::Pair(*a, *b),
            Element::Wreath(w) => {
                let WreathElement { head, base } = *w;
                ElementRepr::Wreath {
                    head,
                    base: base.entries.into_iter().collect(),
                }
            }
        }
    }
}
