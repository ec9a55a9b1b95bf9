//! A typed parallel lambda calculus whose channels are typed by disjunctive axioms.

pub mod cli;
pub mod engine;
pub mod ndredux;
pub mod error;
pub mod formula;
pub mod fuzz;
pub mod gen;
pub mod prims;
pub mod programs;
pub mod syntax;
pub mod term;
pub mod topology;
pub mod typecheck;

pub use error::{Error, Result};
pub use formula::{AxiomInstance, AxiomSchema, Formula};
pub use term::Term;
