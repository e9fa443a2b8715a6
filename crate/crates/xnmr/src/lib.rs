//! Interactive exploration of normal logic programs.
//!
//! `xnmr` answers queries against knowledge bases written as normal
//! logic programs (rules with negation as failure). A query runs
//! through a fixed pipeline:
//!
//! 1. [`ground::relevant_ground`] compiles the query into an internal
//!    answer rule and instantiates just the part of the program that can
//!    influence it;
//! 2. [`wfs::well_founded`] labels every relevant ground atom true,
//!    false, or undefined under the well-founded semantics;
//! 3. [`wfs::extract_residual`] projects the program onto the undefined
//!    atoms;
//! 4. [`solver::enumerate_stable`] lists the stable models of that
//!    residual, each one a stable completion of the well-founded model
//!    on the relevant program.
//!
//! The [`repl`] module ties the pipeline to an interactive session and
//! the `xnmr` binary; the [`xgf`] module serializes ground and residual
//! programs to a canonical text format.
//!
//! ```
//! use xnmr::repl::{query_answer, Mode, Verdict};
//! use xnmr::syntax::{parse_program, parse_query};
//! use xnmr::ground::ResourceLimits;
//!
//! let program = parse_program("p :- not q. q :- not p.")?;
//! let query = parse_query("p")?;
//! let result = query_answer(&program, &query, Mode::Models,
//!                           ResourceLimits::default(), 10)?;
//! assert_eq!(result.answers[0].verdict, Verdict::Undefined);
//! assert_eq!(result.models.len(), 2);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod cli;
pub mod ground;
pub mod repl;
pub mod solver;
pub mod syntax;
pub mod wfs;
pub mod xgf;

pub use ground::{relevant_ground, AtomId, GroundError, GroundProgram, ResourceLimits};
pub use repl::{query_answer, Mode, QueryResult, Session, Verdict};
pub use solver::{enumerate_stable, is_stable_model, stable_models, StableModel};
pub use syntax::{parse_program, parse_query, ParseError, Program, Query};
pub use wfs::{extract_residual, well_founded, ResidualProgram, WfsResult};
pub use xgf::{emit_xgf, parse_xgf, FormatError};
