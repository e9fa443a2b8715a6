//! The user guide, compiled.
//!
//! Each module's documentation is one chapter of the mdbook under
//! `book/`; the chapters' Rust code blocks run here as doc-tests, so
//! the guide cannot drift from the library it describes.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/programs-and-queries.md")]
pub mod programs_and_queries {}

#[doc = include_str!("../../../book/src/grounding.md")]
pub mod grounding {}

#[doc = include_str!("../../../book/src/well-founded-semantics.md")]
pub mod well_founded_semantics {}

#[doc = include_str!("../../../book/src/stable-models.md")]
pub mod stable_models {}

#[doc = include_str!("../../../book/src/xgf-format.md")]
pub mod xgf_format {}

#[doc = include_str!("../../../book/src/repl-and-cli.md")]
pub mod repl_and_cli {}
