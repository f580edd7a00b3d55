use num_complex::Complex;

use super::coefficients::{apply_source_corrections, build_rhs_into, StepCoefficients};
use super::tridiagonal::thomas_solve_in_place;
use crate::grid::{first_non_finite, SourceSpec, SpatialGrid, WaveField};
use crate::potential::{PotentialSpec, Side};
use crate::{Error, Real, Result};

/// Boundary treatment of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum RunMode<T> {
    /// `ψ₀ = ψ_N = 0`.
    Closed,
    /// Half lattice `j ≥ s` with `ψ_s` pinned to the incident wave.
    HardSource(SourceSpec<T>),
    /// Full lattice; the incident wave is added across the link `(s, s+1)`.
    TransparentSource(SourceSpec<T>),
}

impl<T: Real> RunMode<T> {
    pub fn source(&self) -> Option<&SourceSpec<T>> {
        match self {
            RunMode::Closed => None,
            RunMode::HardSource(s) | RunMode::TransparentSource(s) => Some(s),
        }
    }

    /// Checks the source geometry and that the absorbers the mode relies on exist.
    pub fn validate(&self, grid: &SpatialGrid<T>, potential: &PotentialSpec<T>) -> Result<()> {
        match self {
            RunMode::Closed => Ok(()),
            RunMode::HardSource(src) => {
                src.validate(grid)?;
                if !potential.has_absorber(Side::Right) {
                    return Err(Error::config("absorber_right.c", "hard source needs a right absorber"));
                }
                Ok(())
            }
            RunMode::TransparentSource(src) => {
                src.validate(grid)?;
                if !potential.has_absorber(Side::Right) {
                    return Err(Error::config(
                        "absorber_right.c",
                        "transparent source needs a right absorber",
                    ));
                }
                if !potential.has_absorber(Side::Left) {
                    return Err(Error::config(
                        "absorber_left.c",
                        "transparent source needs a left absorber",
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Field at `t = step_index·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationState<T> {
    pub field: WaveField<T>,
    pub step_index: usize,
    pub time: T,
}

impl<T: Real> SimulationState<T> {
    pub fn initial(field: WaveField<T>) -> Self {
        Self {
            field,
            step_index: 0,
            time: T::zero(),
        }
    }
}

/// Crank-Nicolson stepper bound to one grid, time step, potential and run mode.
///
/// Static potentials are sampled and assembled once; time-dependent ones are sampled
/// at `t_k` and `t_{k+1}` on every step.
#[derive(Debug, Clone)]
pub struct Propagator<T> {
    grid: SpatialGrid<T>,
    dt: T,
    potential: PotentialSpec<T>,
    mode: RunMode<T>,
    is_static: bool,
    coeffs: StepCoefficients<T>,
    v_now: Vec<Complex<T>>,
    v_next: Vec<Complex<T>>,
    rhs: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
}

impl<T: Real> Propagator<T> {
    pub fn new(grid: SpatialGrid<T>, dt: T, potential: PotentialSpec<T>, mode: RunMode<T>) -> Result<Self> {
        potential.validate()?;
        mode.validate(&grid, &potential)?;
        let v_now = potential.sample(&grid, T::zero())?;
        let v_next = if potential.is_static() {
            v_now.clone()
        } else {
            potential.sample(&grid, dt)?
        };
        let coeffs = super::assemble(&grid, dt, &v_now, &v_next)?;
        let n = grid.interior_len();
        let zero = Complex::new(T::zero(), T::zero());
        Ok(Self {
            grid,
            dt,
            is_static: potential.is_static(),
            potential,
            mode,
            coeffs,
            v_now,
            v_next,
            rhs: vec![zero; n],
            scratch: vec![zero; n],
        })
    }

    pub fn grid(&self) -> &SpatialGrid<T> {
        &self.grid
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn mode(&self) -> &RunMode<T> {
        &self.mode
    }

    pub fn potential(&self) -> &PotentialSpec<T> {
        &self.potential
    }

    /// Potential samples at `t` (reuses the cached table for static potentials).
    pub fn potential_at(&self, t: T) -> Result<Vec<Complex<T>>> {
        if self.is_static {
            Ok(self.v_now.clone())
        } else {
            self.potential.sample(&self.grid, t)
        }
    }

    fn prepare(&mut self, t_k: T, t_k1: T) -> Result<()> {
        if self.is_static {
            return Ok(());
        }
        self.potential.sample_into(&self.grid, t_k, &mut self.v_now)?;
        self.potential.sample_into(&self.grid, t_k1, &mut self.v_next)?;
        self.coeffs.refill(self.dt, self.grid.dx(), &self.v_now, &self.v_next);
        Ok(())
    }

    /// Advances `state` by one time step in place.
    pub fn step(&mut self, state: &mut SimulationState<T>) -> Result<()> {
        if !state.field.grid().same_lattice(&self.grid) {
            return Err(Error::Contract("state lives on a different grid".into()));
        }
        let k = state.step_index;
        let t_k = T::from_usize_lossy(k) * self.dt;
        let t_k1 = T::from_usize_lossy(k + 1) * self.dt;
        self.prepare(t_k, t_k1).map_err(|e| e.at_step(k + 1))?;

        let psi = state.field.values_mut();
        let n_int = self.grid.interior_len();
        let zero = Complex::new(T::zero(), T::zero());

        match &self.mode {
            RunMode::Closed => {
                build_rhs_into(&self.coeffs, psi, &mut self.rhs);
                thomas_solve_in_place(self.coeffs.alpha, &self.coeffs.beta, &mut self.rhs, &mut self.scratch)
                    .map_err(|e| e.at_step(k + 1))?;
                psi[1..=n_int].copy_from_slice(&self.rhs);
            }
            RunMode::TransparentSource(src) => {
                build_rhs_into(&self.coeffs, psi, &mut self.rhs);
                apply_source_corrections(&mut self.rhs, &self.coeffs, &self.grid, src, t_k, t_k1);
                thomas_solve_in_place(self.coeffs.alpha, &self.coeffs.beta, &mut self.rhs, &mut self.scratch)
                    .map_err(|e| e.at_step(k + 1))?;
                psi[1..=n_int].copy_from_slice(&self.rhs);
            }
            RunMode::HardSource(src) => {
                let s = src.s_index;
                let x_s = self.grid.position(s);
                psi[s] = src.wave.value(x_s, t_k);
                build_rhs_into(&self.coeffs, psi, &mut self.rhs);
                // Unknowns are j = s+1..N−1, i.e. interior slots s..; ψ_s^{k+1} is known.
                let pinned_next = src.wave.value(x_s, t_k1);
                let rhs = &mut self.rhs[s..];
                rhs[0] = rhs[0] - self.coeffs.alpha * pinned_next;
                thomas_solve_in_place(self.coeffs.alpha, &self.coeffs.beta[s..], rhs, &mut self.scratch[s..])
                    .map_err(|e| e.at_step(k + 1))?;
                psi[s + 1..=n_int].copy_from_slice(rhs);
                psi[s] = pinned_next;
            }
        }
        psi[0] = zero;
        psi[n_int + 1] = zero;

        if let Some(index) = first_non_finite(psi) {
            return Err(Error::NonFinite { step: k + 1, index });
        }
        state.step_index = k + 1;
        state.time = t_k1;
        Ok(())
    }

    /// Runs `n_steps` steps, calling `observe` on the initial state and after every step.
    pub fn run<F>(&mut self, mut state: SimulationState<T>, n_steps: usize, mut observe: F) -> Result<SimulationState<T>>
    where
        F: FnMut(&SimulationState<T>) -> Result<()>,
    {
        observe(&state)?;
        for _ in 0..n_steps {
            self.step(&mut state)?;
            observe(&state)?;
        }
        Ok(state)
    }
}
