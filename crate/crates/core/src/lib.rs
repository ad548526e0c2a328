//! Lamé curves of order n over p-adic fields: enumeration, bad-reduction
//! records, fields of moduli and numerical roots of the cusp series.

pub mod arith;
pub mod cyclotomic;
pub mod enumeration;
pub mod error;
pub mod finite_field;
pub mod local_fields;
pub mod padic;
pub mod solver;
pub mod tate_series;

pub use error::{LameError, Result};
