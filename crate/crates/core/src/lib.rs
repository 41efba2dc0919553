//! Multistep solving of Boolean polynomial systems, with an algebraic model
//! of the ARADI block cipher as the main workload.

pub mod aradi;
pub mod aradimodel;
pub mod boolring;
pub mod error;
pub mod gbengine;
pub mod gf2linalg;
pub mod harness;
pub mod multistep;

pub use error::{Error, Result};
