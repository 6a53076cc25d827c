pub mod cone;
pub mod error;
pub mod gamma;
pub mod gflow;
pub mod newton;
pub mod par;
pub mod pline;
pub mod topo;
pub mod trop;
pub mod valfield;

pub use error::{Error, Result};
pub use gamma::{GammaValue, MinAffine, Rational};
