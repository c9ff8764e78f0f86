//! Exact operator ordering for canonical commutation relations.

pub mod algebra;
pub mod applications;
pub mod error;
pub mod fock;
pub mod gwt;
pub mod orderings;
pub mod scalar;
pub mod sorder;

pub use error::{Error, Result};
