//! Numerical laboratory for the Cauchy continuation problem of Helmholtz-type
//! equations `(A + c k + k^2) u = f`.
//!
//! The crate splits tangential spectra into a low band, where continuation is
//! stable uniformly in the wave number `k`, and a high band, where it is not.
//! Continuation engines are provided for a periodic strip (closed-form
//! transfer matrices) and an annulus (per-mode radial integration), together
//! with the Neumann-to-trace operator used to study singular value plateaus.

pub mod coefficients;
pub mod config;
pub mod continuation;
pub mod error;
pub mod experiments;
pub mod field;
pub mod geometry;
pub mod operator_b;
pub mod spectral;

pub use coefficients::{CoefficientModel, Profile, RadialCoefficients, StripCoefficients};
pub use error::{Error, Result};
pub use field::{CauchyData, Field};
pub use geometry::{AnnulusGeometry, CutoffProfile, Geometry, StripGeometry};

pub use num_complex::Complex64;
