//! Densities of local and global Tate-algorithm outcomes for Weierstrass
//! equations with integer coefficients.

pub mod arith;
pub mod error;
pub mod fp;
pub mod global;
pub mod local;
pub mod padic;
pub mod script;
pub mod suite;
pub mod tate;
pub mod weierstrass;

pub use error::{Result, WdlError};
pub use script::TypeLabel;
pub use tate::{is_minimal, reduction_class, tate_local, KodairaType, LocalData, ReductionClass};
pub use weierstrass::{InvariantSet, Translation, WeierstrassEq};
