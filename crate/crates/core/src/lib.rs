//! Exact scattering for step potentials under the SU(1,1) nonlinear Fourier
//! transform, with the linear, Gaussian and Hausdorff–Young machinery used to
//! compare it against the classical transform.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod functionals;
pub mod gaussians;
pub mod hy;
pub mod io;
pub mod linear;
pub mod numeric;
pub mod optimize;
pub mod potential;
pub mod scattering;
pub mod suite;

pub use error::{Error, Result};
pub use exec::Exec;
pub use num_complex::Complex64 as C64;
pub use potential::{IntervalSet, PiecewisePotential, Symmetry};
pub use scattering::{nlft, nlft_at, ScatterOptions, ScatteringData, SpectralGrid};
