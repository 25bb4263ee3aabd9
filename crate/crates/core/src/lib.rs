//! Higher Stickelberger ideals for totally real multi-quadratic fields.

pub mod arith;
pub mod error;
pub mod fields;
pub mod group_ring;
pub mod ideals;
pub mod lattice;
pub mod lvalues;
pub mod props;
pub mod report;
pub mod serial;

pub use error::{Error, Result};
