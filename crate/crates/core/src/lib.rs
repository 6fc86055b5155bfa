//! Canonical quantization of the electromagnetic field in anisotropic,
//! dispersive magnetodielectric media.

pub mod conductor;
pub mod config;
pub mod coupling;
pub mod error;
pub mod export;
pub mod laplace;
pub mod modes;
pub mod noise;
pub mod observables;
pub mod quadrature;
pub mod response;
pub mod run;
pub mod tensor;

pub use error::{Error, Result};
