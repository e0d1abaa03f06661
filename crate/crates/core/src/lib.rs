//! Catalytic functional equations: exact coefficients and the analysis of
//! their dominant singularity, including limit laws for marked parameters.

pub mod analysis;
pub mod clt;
pub mod corpus;
pub mod engine;
pub mod equation;
pub mod error;
pub mod extrapolate;
pub mod fixedpoint;
pub mod linalg;
pub mod linear;
pub mod nonlinear;
pub mod numeric;
pub mod poly;
pub mod puiseux;
pub mod report;
pub mod series;

pub use error::{Error, Result};
