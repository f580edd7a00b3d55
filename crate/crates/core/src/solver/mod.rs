//! Crank-Nicolson time stepping.
//!
//! Each step solves `α ψ_{j+1}^{k+1} + β_j ψ_j^{k+1} + α ψ_{j−1}^{k+1} = r_j` on the
//! interior points, with
//!
//! ```text
//! α  = −i dt / (2 dx²)
//! β_j = 1 + i dt/dx² + (i dt/4)(V_j^{k+1} + V_j^k)
//! β̄_j = 1 − i dt/dx² − (i dt/4)(V_j^{k+1} + V_j^k)
//! r_j = α* ψ_{j+1}^k + β̄_j ψ_j^k + α* ψ_{j−1}^k
//! ```

mod coefficients;
mod propagator;
mod tridiagonal;

pub use coefficients::{apply_source_corrections, assemble, build_rhs, build_rhs_into, StepCoefficients};
pub use propagator::{Propagator, RunMode, SimulationState};
pub use tridiagonal::{thomas_solve, thomas_solve_in_place, PIVOT_FLOOR};
