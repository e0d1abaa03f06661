//! Catalytic equations: parsing, normal forms and classification.

mod classify;
mod model;
pub mod parser;

pub use classify::*;
pub use model::*;
