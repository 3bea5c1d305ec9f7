//! Formal first integrals of analytic vector fields near a nonisolated
//! singularity with one zero eigenvalue, computed in exact arithmetic.

pub mod algebra;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod homological;
pub mod integral;
pub mod reduction;
pub mod report;
pub mod system;

pub use error::{Error, Result};
