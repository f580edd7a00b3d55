use num_complex::Complex;

use crate::grid::{SourceSpec, SpatialGrid};
use crate::{Error, Real, Result};

/// Coefficients of one Crank-Nicolson step. `beta[j-1]` and `beta_bar[j-1]` belong to
/// interior point `j = 1..=N−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCoefficients<T> {
    pub alpha: Complex<T>,
    pub beta: Vec<Complex<T>>,
    pub beta_bar: Vec<Complex<T>>,
}

impl<T: Real> StepCoefficients<T> {
    fn with_len(alpha: Complex<T>, n: usize) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        Self {
            alpha,
            beta: vec![zero; n],
            beta_bar: vec![zero; n],
        }
    }

    pub fn interior_len(&self) -> usize {
        self.beta.len()
    }

    pub(crate) fn refill(&mut self, dt: T, dx: T, v_now: &[Complex<T>], v_next: &[Complex<T>]) {
        let i = Complex::new(T::zero(), T::one());
        let kinetic = i * (dt / (dx * dx));
        let quarter = i * (dt / T::lit(4.0));
        for (j, (b, bb)) in self.beta.iter_mut().zip(self.beta_bar.iter_mut()).enumerate() {
            let v = quarter * (v_next[j + 1] + v_now[j + 1]);
            *b = Complex::new(T::one(), T::zero()) + kinetic + v;
            *bb = Complex::new(T::one(), T::zero()) - kinetic - v;
        }
    }
}

/// Assembles α, β_j, β̄_j from potential samples at `t_k` and `t_{k+1}`.
pub fn assemble<T: Real>(
    grid: &SpatialGrid<T>,
    dt: T,
    v_now: &[Complex<T>],
    v_next: &[Complex<T>],
) -> Result<StepCoefficients<T>> {
    if !(dt > T::zero()) {
        return Err(Error::config("time.dt", "must be positive"));
    }
    if v_now.len() != grid.n_points() || v_next.len() != grid.n_points() {
        return Err(Error::Contract("potential samples do not match the grid".into()));
    }
    let dx = grid.dx();
    let mut c = StepCoefficients::with_len(Complex::new(T::zero(), -dt / (T::lit(2.0) * dx * dx)), grid.interior_len());
    c.refill(dt, dx, v_now, v_next);
    Ok(c)
}

/// `r_j = α* ψ_{j+1} + β̄_j ψ_j + α* ψ_{j−1}` for all interior `j`, treating the
/// boundary values as zero.
pub fn build_rhs<T: Real>(coeffs: &StepCoefficients<T>, psi: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    if psi.len() != coeffs.interior_len() + 2 {
        return Err(Error::Contract("field does not match the coefficient grid".into()));
    }
    let mut out = vec![Complex::new(T::zero(), T::zero()); coeffs.interior_len()];
    build_rhs_into(coeffs, psi, &mut out);
    Ok(out)
}

pub fn build_rhs_into<T: Real>(coeffs: &StepCoefficients<T>, psi: &[Complex<T>], out: &mut [Complex<T>]) {
    let n = coeffs.interior_len();
    let a = coeffs.alpha.conj();
    let zero = Complex::new(T::zero(), T::zero());
    for idx in 0..n {
        let j = idx + 1;
        let left = if j > 1 { psi[j - 1] } else { zero };
        let right = if j < n { psi[j + 1] } else { zero };
        out[idx] = a * (left + right) + coeffs.beta_bar[idx] * psi[j];
    }
}

/// Moves the incident wave across the source point:
/// `r_s += α(Φ_{s+1}^{k+1} + Φ_{s+1}^k)` and `r_{s+1} += α*(Φ_s^{k+1} + Φ_s^k)`.
pub fn apply_source_corrections<T: Real>(
    r: &mut [Complex<T>],
    coeffs: &StepCoefficients<T>,
    grid: &SpatialGrid<T>,
    source: &SourceSpec<T>,
    t_k: T,
    t_k1: T,
) {
    let s = source.s_index;
    let x_s = grid.position(s);
    let x_s1 = grid.position(s + 1);
    let w = &source.wave;
    r[s - 1] = r[s - 1] + coeffs.alpha * (w.value(x_s1, t_k1) + w.value(x_s1, t_k));
    r[s] = r[s] + coeffs.alpha.conj() * (w.value(x_s, t_k1) + w.value(x_s, t_k));
}
