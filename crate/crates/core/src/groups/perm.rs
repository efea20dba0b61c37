use std::fmt;

use serde::Serialize;

use crate::error::{structural, Result};

/// A permutation of `{0, …, n-1}` acting on the right.
///
/// `images[a]` is `a^p`. Products compose left to right, so
/// `a^(p*q) = (a^p)^q`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(structural(format!(
                    "{images:?} is not a bijection on 0..{n}"
                )));
            }
            seen[i] = true;
        }
        Ok(Perm { images })
    }

    pub fn identity(n: usize) -> Perm {
        Perm {
            images: (0..n).collect(),
        }
    }

    /// Build from disjoint cycles, e.g. `[[0, 1, 2]]` sends 0 to 1, 1 to 2, 2 to 0.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Perm> {
        let mut images: Vec<usize> = (0..n).collect();
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                if a >= n {
                    return Err(structural(format!("point {a} out of range for degree {n}")));
                }
                images[a] = cycle[(i + 1) % cycle.len()];
            }
        }
        Perm::new(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Perm) -> Result<Perm> {
        if self.degree() != other.degree() {
            return Err(structural(format!(
                "cannot compose permutations of degree {} and {}",
                self.degree(),
                other.degree()
            )));
        }
        Ok(Perm {
            images: self.images.iter().map(|&a| other.images[a]).collect(),
        })
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Perm { images: inv }
    }

    pub fn moved_points(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, j)| i != *j)
            .count()
    }

    pub fn fixed_points(&self) -> usize {
        self.degree() - self.moved_points()
    }

    /// Number of points on which `self` and `other` agree.
    pub fn agreements(&self, other: &Perm) -> usize {
        self.images
            .iter()
            .zip(&other.images)
            .filter(|(a, b)| a == b)
            .count()
    }

    /// All permutations of `0..n` in lexicographic order of their image lists.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(Perm {
                images: current.clone(),
            });
            if !next_permutation(&mut current) {
                break;
            }
        }
        out
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transposition_is_an_involution() {
        let t = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        assert!(t.then(&t).unwrap().is_identity());
    }

    #[test]
    fn three_cycle_inverse() {
        let c = Perm::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        assert_eq!(c.inverse(), Perm::from_cycles(3, &[&[0, 2, 1]]).unwrap());
        assert!(c.then(&c.inverse()).unwrap().is_identity());
    }

    #[test]
    fn right_action_composition_order() {
        // a^(pq) = (a^p)^q
        let p = Perm::new(vec![1, 2, 0]).unwrap();
        let q = Perm::new(vec![0, 2, 1]).unwrap();
        let pq = p.then(&q).unwrap();
        for a in 0..3 {
            assert_eq!(pq.apply(a), q.apply(p.apply(a)));
        }
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Perm::new(vec![0, 0, 1]).is_err());
        assert!(Perm::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn enumerates_factorial_many() {
        assert_eq!(Perm::all(0).len(), 1);
        assert_eq!(Perm::all(4).len(), 24);
        let all = Perm::all(4);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, all);
    }
}
