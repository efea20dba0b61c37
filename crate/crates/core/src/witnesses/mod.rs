//! Providers for the existential hypotheses of the constructions:
//! separating finite quotients, sections, and Følner sets.

mod folner;
mod quotient;

pub use folner::{
    box_set, box_translation_ratio, exact_epsilon, folner_ratio, folner_set, whole_group, FolnerSet,
};
pub use quotient::{
    separating_quotient, CosetTable, QuotientMap, QuotientRule, QuotientSummary,
};
