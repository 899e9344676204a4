//! Quasi-interpolation of tangent vector fields on the unit sphere with
//! matrix-valued zonal kernels that split a field into its divergence-free
//! and curl-free parts.

pub mod error;
pub mod experiments;
pub mod fields;
pub mod kernels;
pub mod matrix_kernels;
pub mod par;
pub mod points;
pub mod qi;
pub mod quadrature;
pub mod sbf;
pub mod sphere;
pub mod sum;

pub use error::{Error, Result};
