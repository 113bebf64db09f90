//! Discrete Littlewood-Paley analysis on periodic grids: filter banks, the
//! phi-transform and its inverse, weighted Triebel-Lizorkin type norms,
//! weight-class diagnostics, dyadic maximal operators, almost-diagonal
//! operators, atoms and molecules, and embedding checks.

pub mod corpus;
pub mod dyadic;
pub mod embeddings;
pub mod error;
pub mod filters;
pub mod grid;
pub mod harness;
pub mod io;
pub mod maximal;
pub mod operators;
pub mod transform;
pub mod weights;

pub use error::{Error, Result};
