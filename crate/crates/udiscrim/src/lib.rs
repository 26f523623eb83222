//! Perfect discrimination of multipartite unitary gates under LOCC.
//!
//! The library decides whether and how two (or more) multipartite unitary
//! gates can be perfectly told apart, computes minimal black-box use counts
//! under global and local strategies, classifies gates as primitive or
//! imprimitive, and simulates the full LOCC discrimination protocol against a
//! hidden-gate oracle.

pub mod cli;
pub mod error;
pub mod gateclass;
pub mod io;
pub mod linalg;
pub mod protocol;
pub mod report;
pub mod spectra;
pub mod tol;

pub use error::{Error, Result};
pub use tol::Tolerances;
