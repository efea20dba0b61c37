use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{capability, parameter, Error, Result};
use crate::groups::{Element, Group, ENUMERATION_LIMIT};

/// A finite subset `Ā` of a group with its worst translation loss
/// `max_ḡ |Āḡ ∖ Ā| / |Ā|` over the required translations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FolnerSet {
    #[serde(skip)]
    pub group: Group,
    pub elements: Vec<Element>,
    /// Radius `m` of the box `[−m, m]^d`, for lattice quotients.
    pub radius: Option<u64>,
    #[serde(serialize_with = "ratio_string")]
    pub achieved: BigRational,
}

impl FolnerSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn achieved_f64(&self) -> f64 {
        self.achieved.to_f64().unwrap_or(f64::INFINITY)
    }
}

fn ratio_string<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// `ε` as an exact rational.
pub fn exact_epsilon(epsilon: f64) -> Result<BigRational> {
    if !(epsilon > 0.0) {
        return Err(parameter(format!("epsilon must be positive, got {epsilon}")));
    }
    BigRational::from_float(epsilon).ok_or_else(|| parameter(format!("epsilon {epsilon} is not finite")))
}

/// Loss ratio of the box `[−m, m]^d` under translation by `v`:
/// `(L^d − ∏ (L − |v_i|)₊) / L^d` with `L = 2m + 1`.
pub fn box_translation_ratio(m: u64, v: &[i64]) -> BigRational {
    let l = BigInt::from(2 * m + 1);
    let total = num_traits::pow(l.clone(), v.len());
    let kept = v.iter().fold(BigInt::from(1), |acc, &x| {
        let side = &l - BigInt::from(x.unsigned_abs());
        if side > BigInt::zero() {
            acc * side
        } else {
            BigInt::zero()
        }
    });
    BigRational::new(&total - kept, total)
}

fn box_ratio(m: u64, required: &[Vec<i64>]) -> BigRational {
    required
        .iter()
        .map(|v| box_translation_ratio(m, v))
        .max()
        .unwrap_or_else(BigRational::zero)
}

/// `max_ḡ |Āḡ ∖ Ā| / |Ā|`, computed by multiplying out every element.
pub fn folner_ratio(group: &Group, set: &[Element], required: &[Element]) -> Result<BigRational> {
    if set.is_empty() {
        return Err(parameter("a Følner set must be nonempty"));
    }
    let members: BTreeSet<&Element> = set.iter().collect();
    let mut worst = BigRational::zero();
    for g in required {
        let mut lost = 0u64;
        for a in set {
            if !members.contains(&group.multiply(a, g)?) {
                lost += 1;
            }
        }
        let r = BigRational::new(BigInt::from(lost), BigInt::from(members.len()));
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

/// The whole of a finite group; its ratio is 0.
pub fn whole_group(group: &Group) -> Result<FolnerSet> {
    Ok(FolnerSet {
        elements: group.elements()?,
        group: group.clone(),
        radius: None,
        achieved: BigRational::zero(),
    })
}

fn lattice_dim(group: &Group) -> Result<usize> {
    match group {
        Group::Lattice { d } => Ok(*d),
        other => Err(capability(format!(
            "no Følner provider for {}; supported: finite groups and Z^d",
            other.describe()
        ))),
    }
}

fn lattice_vectors(required: &[Element]) -> Result<Vec<Vec<i64>>> {
    required.iter().map(|g| Ok(g.as_lattice()?.to_vec())).collect()
}

fn box_elements(d: usize, m: u64) -> Result<Vec<Element>> {
    let side = 2 * m + 1;
    let count = (side as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if count > ENUMERATION_LIMIT {
        return Err(capability(format!("box of radius {m} in dimension {d} is too large")));
    }
    let m = m as i64;
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (-m..=m).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    Ok(out.into_iter().map(Element::Lattice).collect())
}

/// The box `[−m, m]^d` in `ℤ^d`; errors with the achieved ratio if it
/// misses `ε`.
pub fn box_set(group: &Group, m: u64, required: &[Element], epsilon: f64) -> Result<FolnerSet> {
    let d = lattice_dim(group)?;
    for g in required {
        group.check(g)?;
    }
    let eps = exact_epsilon(epsilon)?;
    let achieved = box_ratio(m, &lattice_vectors(required)?);
    if achieved > eps {
        return Err(Error::Folner {
            achieved: achieved.to_f64().unwrap_or(f64::INFINITY),
            requested: epsilon,
        });
    }
    Ok(FolnerSet {
        elements: box_elements(d, m)?,
        group: group.clone(),
        radius: Some(m),
        achieved,
    })
}

/// All of a finite group, or the smallest centred box meeting `ε` in `ℤ^d`.
pub fn folner_set(group: &Group, required: &[Element], epsilon: f64) -> Result<FolnerSet> {
    let eps = exact_epsilon(epsilon)?;
    if group.is_finite() {
        return whole_group(group);
    }
    lattice_dim(group)?;
    for g in required {
        group.check(g)?;
    }
    let vectors = lattice_vectors(required)?;
    // The ratio is at most Σ|v_i| / L, so this radius always suffices.
    let reach: u64 = vectors
        .iter()
        .map(|v| v.iter().map(|x| x.unsigned_abs()).sum::<u64>())
        .max()
        .unwrap_or(0);
    let cap = ((reach as f64 / epsilon) / 2.0).ceil() as u64 + 1;
    let mut m = 0;
    while m <= cap {
        if box_ratio(m, &vectors) <= eps {
            return box_set(group, m, required, epsilon);
        }
        m += 1;
    }
    Err(Error::Folner {
        achieved: box_ratio(cap, &vectors).to_f64().unwrap_or(f64::INFINITY),
        requested: epsilon,
    })
}
