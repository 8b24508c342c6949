//! Two-phase intuitionistic first-order prover.
//!
//! Phase one ([`search`]) looks for a matrix proof: a multiplicity, a
//! combined term/prefix substitution and a spanning set of connections.
//! The result is a [`certificate::Certificate`] that [`certificate::check_certificate`]
//! verifies by path enumeration. Phase two ([`sequent`]) turns an accepted
//! certificate into a sequent-calculus derivation with its own checker.

pub mod syntax;
pub mod certificate;
pub mod cli;
pub mod matrix;
pub mod oracle;
pub mod search;
pub mod sequent;
pub mod unification;
