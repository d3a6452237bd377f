//! Possibility domains for Boolean judgment aggregation.
//!
//! The crate recognizes syntactic constraint classes (separable, renamable
//! partially Horn, affine, local possibility integrity constraints),
//! synthesizes such constraints from explicit domains, and classifies which
//! non-dictatorial aggregators a domain admits. A brute-force [`oracle`]
//! cross-checks every verdict at small arity.

pub mod aggregate;
pub mod domain;
mod error;
pub mod formula;
pub mod oracle;
pub mod recognize;
pub mod synthesize;

pub use aggregate::{Aggregator, BoolFn, DomainClassification};
pub use domain::{DegeneracyReport, Domain, Policy};
pub use error::{Error, Result};
pub use formula::{Assignment, Clause, ClauseKind, Formula, Literal, Var};
pub use recognize::{FormulaClassReport, LpicWitness, RphWitness, SeparabilityWitness};
pub use synthesize::{PrimeFormula, SynthesisClass, SynthesisResult};

/// Largest arity for which assignments and domains are materialized.
pub const MAX_ARITY: usize = 64;

/// Default variable cap for model enumeration.
pub const DEFAULT_MODEL_CAP: usize = 24;

/// Default cap on the number of k-tuples a closure check may visit.
pub const DEFAULT_TUPLE_CAP: u128 = 10_000_000;
