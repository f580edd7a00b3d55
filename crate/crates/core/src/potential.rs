//! Potential models `V(x,t) = V_re(x,t) + i·V_im(x)`.
//!
//! Barriers are supported on the closed interval `[a, b]` and sampled pointwise at
//! lattice sites. Absorbers are quadratic ramps with a non-positive imaginary part.

use num_complex::Complex;

use crate::grid::SpatialGrid;
use crate::{Error, Real, Result};

pub const MAX_COMPOSITE_DEPTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

/// Potential samples tied to the lattice they were tabulated on.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPotential<T> {
    grid: SpatialGrid<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> TabulatedPotential<T> {
    pub fn new(grid: SpatialGrid<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::config(
                "potential.file",
                format!("{} samples for a grid of {} points", values.len(), grid.n_points()),
            ));
        }
        if let Some(j) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::config("potential.file", format!("non-finite sample at index {j}")));
        }
        if let Some(j) = values.iter().position(|v| v.im > T::zero()) {
            return Err(Error::config(
                "potential.file",
                format!("positive imaginary part at index {j} would emit probability"),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &SpatialGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    fn at(&self, x: T) -> Result<Complex<T>> {
        self.grid
            .exact_index(x)
            .map(|j| self.values[j])
            .ok_or_else(|| Error::config("potential", format!("tabulated potential has no sample at x = {x}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec<T> {
    Zero,
    SquareBarrier {
        height: T,
        left: T,
        right: T,
    },
    /// `V0·(1 + depth·cos(ω t))` on `[left, right]`.
    OscillatingBarrier {
        height: T,
        depth: T,
        omega: T,
        left: T,
        right: T,
    },
    /// `−i·c·(x − x_i)²` beyond the onset on the given side.
    Absorber {
        strength: T,
        onset: T,
        side: Side,
    },
    Tabulated(TabulatedPotential<T>),
    Composite(Vec<PotentialSpec<T>>),
}

impl<T: Real> PotentialSpec<T> {
    pub fn square_barrier(height: T, left: T, right: T) -> Result<Self> {
        let p = PotentialSpec::SquareBarrier { height, left, right };
        p.validate()?;
        Ok(p)
    }

    pub fn oscillating_barrier(height: T, depth: T, omega: T, left: T, right: T) -> Result<Self> {
        let p = PotentialSpec::OscillatingBarrier {
            height,
            depth,
            omega,
            left,
            right,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn absorber(strength: T, onset: T, side: Side) -> Result<Self> {
        let p = PotentialSpec::Absorber { strength, onset, side };
        p.validate()?;
        Ok(p)
    }

    /// Composite of the given parts; a single part is returned unwrapped.
    pub fn sum(mut parts: Vec<PotentialSpec<T>>) -> Result<Self> {
        parts.retain(|p| !matches!(p, PotentialSpec::Zero));
        let p = match parts.len() {
            0 => PotentialSpec::Zero,
            1 => parts.pop().unwrap(),
            _ => PotentialSpec::Composite(parts),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_at(1)
    }

    fn validate_at(&self, depth: usize) -> Result<()> {
        let finite = |v: T, key: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, "must be finite"))
            }
        };
        match self {
            PotentialSpec::Zero | PotentialSpec::Tabulated(_) => Ok(()),
            PotentialSpec::SquareBarrier { height, left, right } => {
                finite(*height, "potential.v0")?;
                check_edges(*left, *right)
            }
            PotentialSpec::OscillatingBarrier {
                height,
                depth: alpha,
                omega,
                left,
                right,
            } => {
                finite(*height, "potential.v0")?;
                finite(*alpha, "potential.alpha")?;
                finite(*omega, "potential.nu")?;
                check_edges(*left, *right)
            }
            PotentialSpec::Absorber { strength, onset, .. } => {
                finite(*onset, "absorber.x_i")?;
                if !(*strength >= T::zero()) || !strength.is_finite() {
                    return Err(Error::config("absorber.c", "must be finite and non-negative"));
                }
                Ok(())
            }
            PotentialSpec::Composite(parts) => {
                if depth > MAX_COMPOSITE_DEPTH {
                    return Err(Error::config(
                        "potential",
                        format!("composite nesting deeper than {MAX_COMPOSITE_DEPTH}"),
                    ));
                }
                parts.iter().try_for_each(|p| p.validate_at(depth + 1))
            }
        }
    }

    pub fn value(&self, x: T, t: T) -> Result<Complex<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        let real = |v: T| Complex::new(v, T::zero());
        Ok(match self {
            PotentialSpec::Zero => zero,
            PotentialSpec::SquareBarrier { height, left, right } => {
                if *left <= x && x <= *right {
                    real(*height)
                } else {
                    zero
                }
            }
            PotentialSpec::OscillatingBarrier {
                height,
                depth,
                omega,
                left,
                right,
            } => {
                if *left <= x && x <= *right {
                    real(*height * (T::one() + *depth * (*omega * t).cos()))
                } else {
                    zero
                }
            }
            PotentialSpec::Absorber { strength, onset, side } => {
                let past = match side {
                    Side::Right => x - *onset,
                    Side::Left => *onset - x,
                };
                if past > T::zero() {
                    Complex::new(T::zero(), -*strength * past * past)
                } else {
                    zero
                }
            }
            PotentialSpec::Tabulated(tab) => tab.at(x)?,
            PotentialSpec::Composite(parts) => {
                let mut sum = zero;
                for p in parts {
                    sum = sum + p.value(x, t)?;
                }
                sum
            }
        })
    }

    /// Writes `V(x_j, t)` for every lattice point into `out`.
    pub fn sample_into(&self, grid: &SpatialGrid<T>, t: T, out: &mut [Complex<T>]) -> Result<()> {
        if out.len() != grid.n_points() {
            return Err(Error::Contract("sample buffer does not match grid".into()));
        }
        match self {
            // Fast path for matching tables; off-lattice tables fall through to `value`.
            PotentialSpec::Tabulated(tab) if tab.grid.same_lattice(grid) => {
                out.copy_from_slice(&tab.values);
                Ok(())
            }
            _ => {
                for (j, slot) in out.iter_mut().enumerate() {
                    *slot = self.value(grid.position(j), t)?;
                }
                Ok(())
            }
        }
    }

    pub fn sample(&self, grid: &SpatialGrid<T>, t: T) -> Result<Vec<Complex<T>>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); grid.n_points()];
        self.sample_into(grid, t, &mut out)?;
        Ok(out)
    }

    pub fn is_static(&self) -> bool {
        match self {
            PotentialSpec::OscillatingBarrier { depth, omega, .. } => {
                *depth == T::zero() || *omega == T::zero()
            }
            PotentialSpec::Composite(parts) => parts.iter().all(|p| p.is_static()),
            _ => true,
        }
    }

    /// Whether an absorber with positive strength acts on `side`.
    pub fn has_absorber(&self, side: Side) -> bool {
        match self {
            PotentialSpec::Absorber { strength, side: s, .. } => *s == side && *strength > T::zero(),
            PotentialSpec::Composite(parts) => parts.iter().any(|p| p.has_absorber(side)),
            PotentialSpec::Tabulated(tab) => {
                let n = tab.values.len();
                let probe = match side {
                    Side::Left => tab.values[..n / 2].iter(),
                    Side::Right => tab.values[n / 2..].iter(),
                };
                probe.clone().any(|v| v.im < T::zero())
            }
            _ => false,
        }
    }
}

fn check_edges<T: Real>(left: T, right: T) -> Result<()> {
    if !left.is_finite() || !right.is_finite() {
        return Err(Error::config("potential.a", "barrier edges must be finite"));
    }
    if !(left < right) {
        return Err(Error::config(
            "potential.b",
            format!("barrier needs a < b, got a = {left}, b = {right}"),
        ));
    }
    Ok(())
}
