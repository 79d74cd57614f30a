//! Exact-arithmetic workbench for spinor-norm obstructions and norm-principle
//! experiments on orthogonal similitude groups in the split case.

pub mod error;
pub mod field;
pub mod linalg;
pub mod quadext;
pub mod quadform;
pub mod similitude;
pub mod clifford;
pub mod brauer;
pub mod obstruction;
pub mod npharness;
pub mod config;

pub use error::{Error, Result};
pub use field::{Field, FieldElement, SquareClass};
