//! Reeb-flow diagnostics for unit vector fields on charted Riemannian 3-manifolds.

pub mod catalog;
pub mod cli;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod field;
pub mod flow;
pub mod geometry;
pub mod verify;

pub use error::{Error, Result};
