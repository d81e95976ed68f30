//! Stability analysis of the in-phase mode of two van der Pol oscillators
//! coupled through delayed velocities.
//!
//! The crate provides four layers:
//!
//! - [`model`]: closed-form results — the in-phase periodic mode, the
//!   delay-free slow-flow matrix on the amplitude pair `(A, B)`, and its
//!   analytic bifurcation curves (zero trace, zero determinant, mode birth).
//! - [`spectral`]: the transcendental characteristic equation of the
//!   *delayed* slow flow, the perturbation series for the critical delay and
//!   frequency in powers of `eps`, and a Newton refinement for exact
//!   pure-imaginary roots.
//! - [`dde`]: fixed-step RK4 integration of constant-lag delay systems by
//!   the method of steps with cubic Hermite dense output, plus right-hand
//!   sides for the slow flow and the full coupled pair.
//! - [`scan`]: growth-rate classification of trajectories, bisection for
//!   the simulated critical delay, coupling sweeps and the error table
//!   comparing series truncations against simulation.
//!
//! All numerics are generic over the scalar type through [`Real`]
//! (`f32` or `f64`); the `*64` aliases below fix the common choice.

pub mod dde;
pub mod model;
pub mod real;
pub mod scan;
pub mod spectral;

pub use real::Real;

pub use num_complex::Complex;

/// Complex scalar over `f64`.
pub type Complex64 = Complex<f64>;

pub type Params64 = model::Params<f64>;
pub type InPhaseMode64 = model::InPhaseMode<f64>;
pub type SlowFlowMatrix64 = model::SlowFlowMatrix<f64>;

pub type SeriesCoeffs64 = spectral::SeriesCoeffs<f64>;
pub type HopfPoint64 = spectral::HopfPoint<f64>;

pub type DdeProblem64 = dde::DdeProblem<f64>;
pub type Trajectory64 = dde::Trajectory<f64>;

pub type ScanConfig64 = scan::ScanConfig<f64>;
pub type ScanResult64 = scan::ScanResult<f64>;
pub type GrowthEstimate64 = scan::GrowthEstimate<f64>;
pub type ErrorTable64 = scan::ErrorTable<f64>;
