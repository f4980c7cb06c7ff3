//! Trivialization algorithms: the formal calculus behind the type II
//! extraction, trivializing below a point, and propagation of a type I
//! trivialization from a subset to the whole index set.

mod extract;
mod formal;
mod pipeline;
mod propagate;

pub use extract::{evaluate_e, extract_type2, Extraction, OmegaFamily};
pub use formal::{
    build_recursion, formal_d, formal_star, recursion_identity_holds, star_relation_check, telescoping_check,
    FormalExpr, Recursion,
};
pub use propagate::{escaping_by_columns, escaping_check, propagate, trivialize_below, verify_below, BelowWitness};
pub use pipeline::{run_pipeline, PipelineReport};
