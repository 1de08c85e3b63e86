//! Simultaneous saturation: exact permutation-tuple averaging matrices,
//! energy matrices of operator systems, and a numerical extension-operator
//! engine for restriction-type scaling experiments.

pub mod averaging;
pub mod error;
pub mod extension;
pub mod harness;
pub mod linalg;
pub mod perm;
pub mod saturation;

pub use error::{Error, Result};
