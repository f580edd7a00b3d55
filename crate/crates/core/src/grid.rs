//! Lattice, wave field and initial conditions.

use num_complex::Complex;

use crate::{Error, Real, Result};

/// Uniform lattice `x_j = x0 + j·dx`, `j = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid<T> {
    x0: T,
    dx: T,
    n_points: usize,
}

impl<T: Real> SpatialGrid<T> {
    pub const MIN_POINTS: usize = 3;

    pub fn new(x0: T, dx: T, n_points: usize) -> Result<Self> {
        if !(dx > T::zero()) || !dx.is_finite() {
            return Err(Error::config("grid.dx", format!("must be positive, got {dx}")));
        }
        if !x0.is_finite() {
            return Err(Error::config("grid.x_min", "must be finite"));
        }
        if n_points < Self::MIN_POINTS {
            return Err(Error::config(
                "grid",
                format!("need at least {} points, got {n_points}", Self::MIN_POINTS),
            ));
        }
        Ok(Self { x0, dx, n_points })
    }

    /// Closed grid from `x_min` with step `dx`; `x_max` is rounded down to the last
    /// lattice point so that `dx` stays exactly as given.
    pub fn build(x_min: T, x_max: T, dx: T) -> Result<Self> {
        if !(dx > T::zero()) {
            return Err(Error::config("grid.dx", format!("must be positive, got {dx}")));
        }
        if !(x_max > x_min) {
            return Err(Error::config(
                "grid.x_max",
                format!("interval is empty or inverted: [{x_min}, {x_max}]"),
            ));
        }
        // Relative slack absorbs the rounding in e.g. 60/0.05.
        let ratio = (x_max - x_min) / dx;
        let cells = (ratio * (T::one() + T::lit(1e-12))).floor();
        let cells = cells
            .to_usize()
            .ok_or_else(|| Error::config("grid", "too many points"))?;
        Self::new(x_min, dx, cells + 1)
    }

    #[inline]
    pub fn x0(&self) -> T {
        self.x0
    }

    #[inline]
    pub fn dx(&self) -> T {
        self.dx
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Index of the last point, `N`.
    #[inline]
    pub fn last_index(&self) -> usize {
        self.n_points - 1
    }

    /// Number of interior points `N − 1`.
    #[inline]
    pub fn interior_len(&self) -> usize {
        self.n_points - 2
    }

    #[inline]
    pub fn position(&self, j: usize) -> T {
        self.x0 + T::from_usize_lossy(j) * self.dx
    }

    pub fn x_max(&self) -> T {
        self.position(self.last_index())
    }

    pub fn positions(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n_points).map(move |j| self.position(j))
    }

    /// Nearest lattice index to `x`, or `None` if `x` lies outside the grid by more
    /// than half a step.
    pub fn nearest_index(&self, x: T) -> Option<usize> {
        let u = ((x - self.x0) / self.dx).round();
        if u < T::zero() {
            return None;
        }
        let j = u.to_usize()?;
        (j < self.n_points).then_some(j)
    }

    /// Lattice index whose position equals `x` up to a small fraction of `dx`.
    pub fn exact_index(&self, x: T) -> Option<usize> {
        let j = self.nearest_index(x)?;
        ((self.position(j) - x).abs() <= T::lit(1e-6) * self.dx).then_some(j)
    }

    pub fn same_lattice(&self, other: &Self) -> bool {
        self.n_points == other.n_points
            && (self.dx - other.dx).abs() <= T::lit(1e-12) * self.dx
            && (self.x0 - other.x0).abs() <= T::lit(1e-9) * self.dx
    }
}

/// Time stepping parameters, `t_k = k·dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    dt: T,
    n_steps: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(dt: T, n_steps: usize) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::config("time.dt", format!("must be positive, got {dt}")));
        }
        Ok(Self { dt, n_steps })
    }

    #[inline]
    pub fn dt(&self) -> T {
        self.dt
    }

    #[inline]
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    #[inline]
    pub fn time(&self, k: usize) -> T {
        T::from_usize_lossy(k) * self.dt
    }
}

/// Complex amplitudes `ψ_j` on a lattice, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField<T> {
    grid: SpatialGrid<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> WaveField<T> {
    pub fn new(grid: SpatialGrid<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::Contract(format!(
                "field has {} values for a grid of {} points",
                values.len(),
                grid.n_points()
            )));
        }
        if let Some(index) = first_non_finite(&values) {
            return Err(Error::NonFinite { step: 0, index });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: SpatialGrid<T>) -> Self {
        Self {
            grid,
            values: vec![Complex::new(T::zero(), T::zero()); grid.n_points()],
        }
    }

    pub fn from_fn(grid: SpatialGrid<T>, mut f: impl FnMut(usize, T) -> Complex<T>) -> Result<Self> {
        let values = (0..grid.n_points()).map(|j| f(j, grid.position(j))).collect();
        Self::new(grid, values)
    }

    #[inline]
    pub fn grid(&self) -> &SpatialGrid<T> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    #[inline]
    pub(crate) fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    #[inline]
    pub fn density(&self, j: usize) -> T {
        self.values[j].norm_sqr()
    }

    pub fn densities(&self) -> Vec<T> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}

pub(crate) fn first_non_finite<T: Real>(values: &[Complex<T>]) -> Option<usize> {
    values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite()))
}

/// `A·exp(i(kx − k²t))`, the free plane wave in reduced units.
pub fn plane_wave_value<T: Real>(amplitude: Complex<T>, k: T, x: T, t: T) -> Complex<T> {
    amplitude * Complex::from_polar(T::one(), k * x - k * k * t)
}

/// Incident plane wave `A·exp(i(kx − ωt))`.
///
/// The continuum wave has `ω = k²`. The lattice-matched wave uses the frequency at
/// which the Crank-Nicolson lattice propagates wavevector `k`, so it solves the
/// discrete equations exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentWave<T> {
    pub amplitude: Complex<T>,
    pub wavevector: T,
    pub angular_frequency: T,
}

impl<T: Real> IncidentWave<T> {
    pub fn continuum(amplitude: Complex<T>, wavevector: T) -> Self {
        Self {
            amplitude,
            wavevector,
            angular_frequency: wavevector * wavevector,
        }
    }

    pub fn lattice_matched(amplitude: Complex<T>, wavevector: T, dx: T, dt: T) -> Self {
        Self {
            amplitude,
            wavevector,
            angular_frequency: lattice_frequency(wavevector, dx, dt),
        }
    }

    #[inline]
    pub fn value(&self, x: T, t: T) -> Complex<T> {
        self.amplitude * Complex::from_polar(T::one(), self.wavevector * x - self.angular_frequency * t)
    }

    /// Continuum incident current `2k|A|²`.
    pub fn current(&self) -> T {
        T::lit(2.0) * self.wavevector * self.amplitude.norm_sqr()
    }
}

/// Frequency of wavevector `k` under the three-point Laplacian and the Cayley step:
/// `ω = (2/dt)·atan(dt·λ/2)` with `λ = 4 sin²(k·dx/2)/dx²`.
pub fn lattice_frequency<T: Real>(k: T, dx: T, dt: T) -> T {
    let two = T::lit(2.0);
    let s = (k * dx / two).sin();
    let lambda = T::lit(4.0) * s * s / (dx * dx);
    two / dt * (dt * lambda / two).atan()
}

/// Shape `g(x)` of the initial wave right of the source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Front<T> {
    Uniform,
    /// 1 up to `x_g`, then `exp(−(x − x_g)²/l_g²)`.
    GaussianFront { x_g: T, l_g: T },
    Empty,
}

/// Profile value at `x` (only meaningful for `x > x_s`).
pub fn front_profile<T: Real>(front: &Front<T>, x: T, _x_s: T) -> T {
    match *front {
        Front::Uniform => T::one(),
        Front::Empty => T::zero(),
        Front::GaussianFront { x_g, l_g } => {
            if x <= x_g {
                T::one()
            } else {
                let u = (x - x_g) / l_g;
                (-u * u).exp()
            }
        }
    }
}

/// Injection point and incident wave for the source run modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec<T> {
    pub wave: IncidentWave<T>,
    pub s_index: usize,
    pub front: Front<T>,
}

impl<T: Real> SourceSpec<T> {
    pub fn new(wave: IncidentWave<T>, s_index: usize, front: Front<T>) -> Self {
        Self { wave, s_index, front }
    }

    pub fn amplitude(&self) -> Complex<T> {
        self.wave.amplitude
    }

    pub fn wavevector(&self) -> T {
        self.wave.wavevector
    }

    pub fn validate(&self, grid: &SpatialGrid<T>) -> Result<()> {
        let n = grid.last_index();
        if self.s_index < 1 || self.s_index + 3 > n {
            return Err(Error::config(
                "mode.x_source",
                format!("source index {} must lie in 1..={}", self.s_index, n.saturating_sub(3)),
            ));
        }
        if !self.wave.wavevector.is_finite() || !self.wave.angular_frequency.is_finite() {
            return Err(Error::config("mode.k", "must be finite"));
        }
        if let Front::GaussianFront { x_g, l_g } = self.front {
            if !(l_g > T::zero()) {
                return Err(Error::config("mode.l_g", "must be positive"));
            }
            if !(x_g > grid.position(self.s_index)) {
                return Err(Error::config("mode.x_g", "must lie right of the source"));
            }
        }
        Ok(())
    }
}

/// `ψ(x_j, 0) = 0` for `j ≤ s`, `Φ₀(x_j, 0)·g(x_j)` for `j > s`.
pub fn initial_injected_state<T: Real>(grid: &SpatialGrid<T>, source: &SourceSpec<T>) -> Result<WaveField<T>> {
    source.validate(grid)?;
    let x_s = grid.position(source.s_index);
    WaveField::from_fn(*grid, |j, x| {
        if j <= source.s_index {
            Complex::new(T::zero(), T::zero())
        } else {
            source.wave.value(x, T::zero()) * front_profile(&source.front, x, x_s)
        }
    })
}

/// Normalized Gaussian `(2πσ²)^(−1/4) exp(−(x−c)²/(4σ²) + i k0 x)`.
pub fn gaussian_packet<T: Real>(grid: &SpatialGrid<T>, center: T, sigma: T, k0: T) -> Result<WaveField<T>> {
    if !(sigma > T::zero()) {
        return Err(Error::config("packet.sigma", "must be positive"));
    }
    let reach = T::lit(5.0) * sigma;
    if center - reach < grid.x0() || center + reach > grid.x_max() {
        return Err(Error::config(
            "packet.center",
            format!("packet support {center} ± {reach} is clipped by the grid"),
        ));
    }
    let prefactor = (T::lit(2.0) * T::PI() * sigma * sigma).powf(T::lit(-0.25));
    WaveField::from_fn(*grid, |_, x| {
        let u = x - center;
        let envelope = prefactor * (-(u * u) / (T::lit(4.0) * sigma * sigma)).exp();
        Complex::from_polar(envelope, k0 * x)
    })
}
