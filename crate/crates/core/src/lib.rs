//! Container calculus over finite groupoids.
//!
//! Types are modelled as finite 1-groupoids, type families as strict
//! functors into groupoids, and containers as a groupoid of shapes with a
//! family of positions per index. On top of that the crate implements the
//! derivative of containers with its universal property and laws, isolated
//! points and grafting, the chain rule with its strength criterion, W-types
//! with the fixed-point rule, and zippers derived from the derivative.

pub mod catalog;
pub mod chain;
pub mod container;
pub mod dsl;
pub mod fixpoint;
pub mod error;
pub mod groupoid;
pub mod limits;
pub mod points;
pub mod validation;

pub use error::{Error, Result};
pub use limits::Limits;
