//! Boolean functions, aggregators, their properties, and domain
//! classification with verified witnesses.

mod aggregator;
mod boolfn;
mod classify;
mod file;

pub(crate) use aggregator::RowMasks;
pub use aggregator::{Aggregator, Counterexample};
pub use boolfn::{BoolFn, MAX_FN_ARITY};
pub use classify::{
    binary_witness_from_rph, binary_witness_from_separable, classify_domain,
    ternary_witness_from_lpic, ClassVerdict, DomainClass, DomainClassification,
};
pub use file::{parse_aggregator, render_aggregator};
