//! Lamé functions in Weierstrass form: Frobenius series, nested integral
//! representations and generating functions.

pub mod cli;
pub mod elliptic;
pub mod error;
pub mod genfn;
pub mod integral;
pub mod lame;
pub mod quadrature;
pub mod special;

pub use error::{LameError, Result};
pub use num_complex::Complex64;
