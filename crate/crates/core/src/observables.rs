//! Norm, probability current, steady-state detection and scattering coefficients.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::grid::WaveField;
use crate::{Error, Real, Result};

/// `Δx·Σ_{j=1}^{N−1} |ψ_j|²`.
pub fn total_norm<T: Real>(field: &WaveField<T>) -> T {
    let v = field.values();
    let sum = v[1..v.len() - 1].iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    sum * field.grid().dx()
}

/// Central-difference current `J_j = 2·Im(ψ_j* (ψ_{j+1} − ψ_{j−1}) / (2Δx))`.
pub fn current_at<T: Real>(field: &WaveField<T>, j: usize) -> Result<T> {
    let v = field.values();
    if j == 0 || j + 1 >= v.len() {
        return Err(Error::Contract(format!(
            "current probe index {j} is not interior (valid 1..={})",
            v.len().saturating_sub(2)
        )));
    }
    let diff = (v[j + 1] - v[j - 1]) / (T::lit(2.0) * field.grid().dx());
    Ok(T::lit(2.0) * (v[j].conj() * diff).im)
}

/// Current samples at one probe, one per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentSeries<T> {
    pub probe_index: usize,
    samples: Vec<(T, T)>,
}

impl<T: Real> CurrentSeries<T> {
    pub fn new(probe_index: usize) -> Self {
        Self {
            probe_index,
            samples: Vec::new(),
        }
    }

    pub fn from_samples(probe_index: usize, samples: Vec<(T, T)>) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Contract("current samples must have increasing times".into()));
        }
        Ok(Self { probe_index, samples })
    }

    pub fn push(&mut self, time: T, current: T) -> Result<()> {
        if let Some(&(last, _)) = self.samples.last() {
            if !(time > last) {
                return Err(Error::Contract(format!("sample time {time} does not follow {last}")));
            }
        }
        self.samples.push((time, current));
        Ok(())
    }

    /// Samples the probe on `field` and appends it.
    pub fn record(&mut self, time: T, field: &WaveField<T>) -> Result<()> {
        let j = current_at(field, self.probe_index)?;
        self.push(time, j)
    }

    pub fn samples(&self) -> &[(T, T)] {
        &self.samples
    }

    pub fn currents(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.1).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn window_means(&self, window: usize) -> Vec<T> {
        let w = T::from_usize_lossy(window);
        self.samples
            .chunks_exact(window)
            .map(|c| c.iter().fold(T::zero(), |acc, s| acc + s.1) / w)
            .collect()
    }
}

/// `T = J_T / (2k|A|²)`, `R = −J_R / (2k|A|²)`.
pub fn extract_rt<T: Real>(j_t: T, j_r: T, k: T, amplitude: Complex<T>) -> Result<(T, T)> {
    let flux = T::lit(2.0) * k * amplitude.norm_sqr();
    if !(k > T::zero()) || amplitude.norm_sqr() == T::zero() {
        return Err(Error::Contract("extract_rt needs k > 0 and A ≠ 0".into()));
    }
    Ok((j_t / flux, -j_r / flux))
}

/// Index of the first sample of the window that follows the earliest window boundary
/// after which every pair of consecutive window means differs by less than `tol`
/// relatively.
pub fn steady_state_index<T: Real>(series: &CurrentSeries<T>, window: usize, tol: T) -> Option<usize> {
    if window < 2 || !(tol > T::zero()) {
        return None;
    }
    let means = series.window_means(window);
    if means.len() < 2 {
        return None;
    }
    let settled = |a: T, b: T| (b - a).abs() < tol * a.abs();
    // Walk back from the end while consecutive means agree.
    let mut first = means.len() - 1;
    while first > 0 && settled(means[first - 1], means[first]) {
        first -= 1;
    }
    if first == means.len() - 1 {
        return None;
    }
    Some((first + 1) * window)
}

/// Time of the steady-state boundary found by [`steady_state_index`].
pub fn steady_state_time<T: Real>(series: &CurrentSeries<T>, window: usize, tol: T) -> Option<T> {
    steady_state_index(series, window, tol).map(|i| series.samples[i].0)
}

/// Mean current over the final window, plus the detected steady boundary (if any).
/// Every window after the boundary is settled, so the last one carries the least
/// residual transient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyCurrent<T> {
    pub mean: T,
    pub steady_time: Option<T>,
}

pub fn steady_current<T: Real>(series: &CurrentSeries<T>, window: usize, tol: T) -> Option<SteadyCurrent<T>> {
    let n = series.len();
    if window == 0 || n < window {
        return None;
    }
    let found = steady_state_index(series, window, tol);
    let mean = series.samples[n - window..]
        .iter()
        .fold(T::zero(), |acc, s| acc + s.1)
        / T::from_usize_lossy(window);
    Some(SteadyCurrent {
        mean,
        steady_time: found.map(|i| series.samples[i].0),
    })
}

/// Frequency (cycles per unit time) of the largest non-DC DFT bin of uniformly
/// sampled data, together with the bin width.
pub fn dominant_frequency<T: Real>(values: &[T], dt: T) -> Option<(T, T)> {
    let n = values.len();
    if n < 4 {
        return None;
    }
    let mean = values.iter().fold(T::zero(), |a, &v| a + v) / T::from_usize_lossy(n);
    let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v - mean, T::zero())).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let (bin, _) = buf[1..=n / 2]
        .iter()
        .enumerate()
        .map(|(i, z)| (i + 1, z.norm_sqr()))
        .fold((0, T::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
    let width = T::one() / (T::from_usize_lossy(n) * dt);
    Some((T::from_usize_lossy(bin) * width, width))
}

/// Positions of strict local maxima of `|ψ|²` for indices in `range`.
pub fn density_peaks<T: Real>(field: &WaveField<T>, range: std::ops::Range<usize>) -> Vec<T> {
    let d = field.densities();
    let lo = range.start.max(1);
    let hi = range.end.min(d.len() - 1);
    let g = field.grid();
    (lo..hi)
        .filter(|&j| d[j] > d[j - 1] && d[j] >= d[j + 1])
        .map(|j| {
            // parabolic refinement of the peak position
            let (a, b, c) = (d[j - 1], d[j], d[j + 1]);
            let denom = a - T::lit(2.0) * b + c;
            let shift = if denom != T::zero() { T::lit(0.5) * (a - c) / denom } else { T::zero() };
            g.position(j) + shift * g.dx()
        })
        .collect()
}

/// Mean spacing of consecutive peaks.
pub fn mean_spacing<T: Real>(peaks: &[T]) -> Option<T> {
    if peaks.len() < 2 {
        return None;
    }
    Some((peaks[peaks.len() - 1] - peaks[0]) / T::from_usize_lossy(peaks.len() - 1))
}

/// Rightmost position where `|ψ|²` falls through `level`, linearly interpolated.
pub fn front_position<T: Real>(field: &WaveField<T>, level: T) -> Option<T> {
    let d = field.densities();
    let j = (0..d.len() - 1).rev().find(|&j| d[j] >= level && d[j + 1] < level)?;
    let frac = (d[j] - level) / (d[j] - d[j + 1]);
    let g = field.grid();
    Some(g.position(j) + frac * g.dx())
}

/// Measured and analytic scattering coefficients at one wavevector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringRecord<T> {
    pub k: T,
    pub t_num: T,
    pub r_num: T,
    pub t_ana: T,
    pub r_ana: T,
    pub steady_time: Option<T>,
}
