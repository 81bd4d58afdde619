#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod galilei;
pub mod gaussian;
pub mod hilbert;
pub mod partialwave;
pub mod scattering;
pub mod scenario;
pub mod spin;
pub mod tensor;
pub mod tps;

pub use error::{Error, Result};
