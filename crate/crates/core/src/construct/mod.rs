//! The four closure constructions: direct products, wreath products over a
//! finite quotient, wreath products of permutation actions, and extensions
//! by amenable quotients. Each returns the constructed map together with a
//! record of every auxiliary choice, so a run can be replayed.

mod amenable;
mod direct;
mod sets;
mod sofic;
mod wreath;

use serde::{Deserialize, Serialize};

pub use amenable::{build_amenable_extension, AmenableScenario, InputCheck, PermutationRule};
pub use direct::{build_direct_product, DirectScenario};
pub use sets::{compute_d, compute_e};
pub use sofic::build_sofic_wreath;
pub use wreath::{build_wreath, WreathScenario};

use crate::error::{Error, Result};
use crate::groups::{Element, Group};
use crate::witnesses::{box_set, folner_set, separating_quotient, whole_group, FolnerSet, QuotientMap};

/// Where the finite quotient of the head group comes from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum QuotientProvider {
    /// The smallest separating modulus.
    #[default]
    AutoMinMod,
    /// Reduction mod a given `m`, validated against separation.
    Mod { m: i64 },
}

impl QuotientProvider {
    pub fn resolve(&self, h: &Group, e: &[Element]) -> Result<QuotientMap> {
        match self {
            QuotientProvider::AutoMinMod => separating_quotient(h, e),
            QuotientProvider::Mod { m } => {
                let q = if h.is_finite() {
                    QuotientMap::identity(h.clone())
                } else {
                    QuotientMap::reduce(h.clone(), *m)?
                };
                q.check_separation(e)?;
                Ok(q)
            }
        }
    }
}

/// Where the Følner set of the amenable quotient comes from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FolnerProvider {
    /// The whole group when finite, else the smallest box.
    #[default]
    AutoBox,
    /// The box `[−m, m]^d`, validated against `ε`.
    Box { m: u64 },
    /// The whole of a finite group.
    Whole,
}

impl FolnerProvider {
    pub fn resolve(&self, q: &Group, required: &[Element], epsilon: f64) -> Result<FolnerSet> {
        match self {
            FolnerProvider::AutoBox => folner_set(q, required, epsilon),
            FolnerProvider::Box { m } => box_set(q, *m, required, epsilon),
            FolnerProvider::Whole => whole_group(q),
        }
    }
}

pub(crate) fn wreath_parts(w: &Group) -> Result<(&Group, &Group)> {
    match w {
        Group::Wreath { bottom, top } => Ok((bottom, top)),
        other => Err(Error::Structural(format!(
            "expected a restricted wreath product, got {}",
            other.describe()
        ))),
    }
}
