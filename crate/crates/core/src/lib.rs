//! One-dimensional time-dependent Schrödinger equation on a uniform lattice.
//!
//! Reduced units throughout: `i ∂ψ/∂t = −∂²ψ/∂x² + V ψ` (ħ = 1, 2m = 1).
//! The stepper is Crank-Nicolson with a complex tridiagonal solve per step and
//! supports three boundary treatments:
//!
//! * closed walls (`ψ₀ = ψ_N = 0`),
//! * a hard source that pins `ψ_s` to an incident plane wave on the half lattice `j ≥ s`,
//! * a transparent source that injects the incident wave at `s` while letting the
//!   reflected wave pass leftwards, with complex absorbing potentials at both ends.
//!
//! The numerical core is generic over the real scalar (`f32`/`f64`); the
//! configuration, runner and CLI layers work in `f64` through the aliases below.

pub mod analytic;
pub mod config;
pub mod error;
pub mod grid;
pub mod observables;
pub mod potential;
pub mod runner;
pub mod scalar;
pub mod scenarios;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

/// Double-precision complex amplitude.
pub type C64 = Complex<f64>;

pub type Grid = grid::SpatialGrid<f64>;
pub type Times = grid::TimeGrid<f64>;
pub type Field = grid::WaveField<f64>;
pub type Source = grid::SourceSpec<f64>;
pub type Wave = grid::IncidentWave<f64>;
pub type Potential = potential::PotentialSpec<f64>;
pub type Mode = solver::RunMode<f64>;
pub type State = solver::SimulationState<f64>;
pub type Stepper = solver::Propagator<f64>;
pub type Coefficients = solver::StepCoefficients<f64>;
pub type Currents = observables::CurrentSeries<f64>;
