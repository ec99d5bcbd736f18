//! Spectral simulation and analysis toolkit for the three-dimensional
//! Stokes-transport system linearised around Couette flow.
//!
//! The density perturbation is evolved in sheared coordinates
//! `(x, y, z) = (X - tY, Y, Z)`, where the Fourier support of the field is
//! frozen and the shear only enters through the time-dependent wavenumber
//! `eta - k t`. Alongside the solver the crate carries the time-dependent
//! Fourier multiplier (`w_NR`, `w_R`, `J`, `A^sigma`) used to measure
//! Gevrey regularity, the toy models for the Orr, zero-mode and lift-up
//! mechanisms, and log-log rate fitting.
//!
//! Data-parallel loops go through [`exec::Exec`]; with the default
//! `parallel` feature they run on rayon, otherwise sequentially.

pub mod error;
pub mod exec;
pub mod fft;
pub mod fit;
pub mod freq;
pub mod ode;
pub mod quad;
pub mod report;
pub mod sim;
pub mod symbols;
pub mod toy;
pub mod weights;

pub use error::{Error, Result};
pub use exec::Exec;
pub use freq::{Frequency, Lattice, SpectralField};
pub use weights::WeightParams;
