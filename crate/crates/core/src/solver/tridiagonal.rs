use num_complex::Complex;

use crate::{Error, Real, Result};

/// Smallest pivot magnitude accepted during elimination.
pub const PIVOT_FLOOR: f64 = 1e-14;

/// Solves `α x_{j+1} + β_j x_j + α x_{j−1} = r_j` with zero values beyond both ends.
pub fn thomas_solve<T: Real>(alpha: Complex<T>, beta: &[Complex<T>], r: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    if beta.len() != r.len() || beta.is_empty() {
        return Err(Error::Contract(format!(
            "tridiagonal system needs matching non-empty diagonal and rhs ({} vs {})",
            beta.len(),
            r.len()
        )));
    }
    let mut x = r.to_vec();
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); r.len()];
    thomas_solve_in_place(alpha, beta, &mut x, &mut scratch)?;
    Ok(x)
}

/// In-place variant: `rhs` is overwritten with the solution; `scratch` must be at
/// least as long as `rhs`. Reported pivot rows are 0-based within the slice.
pub fn thomas_solve_in_place<T: Real>(
    alpha: Complex<T>,
    beta: &[Complex<T>],
    rhs: &mut [Complex<T>],
    scratch: &mut [Complex<T>],
) -> Result<()> {
    let n = rhs.len();
    debug_assert!(beta.len() == n && scratch.len() >= n);
    let floor = T::lit(PIVOT_FLOOR);

    let mut pivot = beta[0];
    if pivot.norm() <= floor {
        return Err(Error::SingularPivot { step: 0, row: 0 });
    }
    scratch[0] = alpha / pivot;
    rhs[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = beta[i] - alpha * scratch[i - 1];
        if pivot.norm() <= floor {
            return Err(Error::SingularPivot { step: 0, row: i });
        }
        scratch[i] = alpha / pivot;
        rhs[i] = (rhs[i] - alpha * rhs[i - 1]) / pivot;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        let next = rhs[i + 1];
        rhs[i] = rhs[i] - scratch[i] * next;
    }
    Ok(())
}
