//! Term and prefix unification and the admissibility check for combined
//! substitutions.

mod admissible;
mod prefix;
mod terms;

pub use admissible::{check_admissible, domain_pairs, AdmissibilityError};
pub use prefix::{
    for_each_unifier, solve_prefixes, unify_prefixes, Equation, PrefixLimits, PrefixSubstitution, AUX_BASE,
};
pub use terms::{resolve, unify, unify_atoms, unify_lists, Bindings, TermSubstitution, Trail, UnifyError};
