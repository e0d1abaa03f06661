//! Nonlinear equations through the system in `(f, u, w)`.

mod analysis;
mod system;

pub use analysis::*;
pub use system::{derive_system, NonlinearSystem, Unknown};
