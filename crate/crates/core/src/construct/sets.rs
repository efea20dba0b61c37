use std::collections::BTreeSet;

use crate::error::Result;
use crate::groups::{Element, Group};

/// The least subset of `H` containing the identity, every head `h_i`, the
/// support of every base `b_j`, and every `k·h_i` with `k` in a support.
pub fn compute_e(top: &Group, f: &[Element]) -> Result<Vec<Element>> {
    let mut e = BTreeSet::new();
    e.insert(top.identity());
    let mut heads = Vec::with_capacity(f.len());
    for x in f {
        let w = x.as_wreath()?;
        top.check(&w.head)?;
        heads.push(&w.head);
        e.insert(w.head.clone());
    }
    for x in f {
        for k in x.as_wreath()?.base.support() {
            e.insert(k.clone());
            for h in &heads {
                e.insert(top.multiply(k, h)?);
            }
        }
    }
    Ok(e.into_iter().collect())
}

/// The non-identity values taken by the bases of `F`.
pub fn compute_d(f: &[Element]) -> Result<Vec<Element>> {
    let mut d = BTreeSet::new();
    for x in f {
        d.extend(x.as_wreath()?.base.values().cloned());
    }
    Ok(d.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteSupport;

    fn z(x: i64) -> Element {
        Element::lattice1(x)
    }

    #[test]
    fn lamp_at_origin() {
        let h = Group::Lattice { d: 1 };
        let f = vec![Element::wreath(z(0), FiniteSupport::singleton(z(0), Element::Table(1)))];
        assert_eq!(compute_e(&h, &f).unwrap(), vec![z(0)]);
        assert_eq!(compute_d(&f).unwrap(), vec![Element::Table(1)]);
    }

    #[test]
    fn head_only() {
        let h = Group::Lattice { d: 1 };
        let f = vec![Element::wreath(z(3), FiniteSupport::new())];
        assert_eq!(compute_e(&h, &f).unwrap(), vec![z(0), z(3)]);
        assert!(compute_d(&f).unwrap().is_empty());
    }

    #[test]
    fn shifted_supports() {
        let h = Group::Lattice { d: 1 };
        let f = vec![
            Element::wreath(z(1), FiniteSupport::singleton(z(0), Element::Table(1))),
            Element::wreath(z(0), FiniteSupport::singleton(z(2), Element::Table(1))),
        ];
        // heads {0, 1}; supports {0, 2}; shifts {0, 1, 2, 3}
        assert_eq!(compute_e(&h, &f).unwrap(), vec![z(0), z(1), z(2), z(3)]);
    }
}
