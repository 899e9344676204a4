//! Geometry of the unit sphere, Legendre polynomials and spherical harmonics.

pub mod geometry;
pub mod harmonics;
pub mod legendre;
pub mod tensors;

pub use geometry::{tangent_frame, Matrix3, TangentFrame, TangentVector, UnitVector3, Vec3};
pub use harmonics::{real_sph_harm, vec_sph_harms, ScalarHarmonics, VectorHarmonics};
pub use legendre::{legendre_all, LegendreTable};
pub use tensors::{zonal_tensors, ZonalTensors};
