//! Closed-form reference solutions.

use num_complex::Complex;

use crate::{Error, Real, Result};

/// Stationary transmission through a square barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierCoefficients<T> {
    pub k: T,
    pub v0: T,
    pub length: T,
    pub transmission: T,
    pub reflection: T,
}

/// Below this `|k² − V0|` the threshold limit `1/(1 + (kL)²/4)` is used.
pub const THRESHOLD_BAND: f64 = 1e-9;

/// Transmission and reflection of a square barrier of height `v0` and length `length`:
///
/// ```text
/// k² > V0:  T = 1 / (1 + ¼ (k'/k − k/k')² sin²(k'L))
/// k² < V0:  T = 1 / (1 + ¼ (k'/k + k/k')² sinh²(k'L))
/// ```
///
/// with `k' = √|V0 − k²|` and `R = 1 − T`.
pub fn barrier_transmission<T: Real>(k: T, v0: T, length: T) -> Result<BarrierCoefficients<T>> {
    if !(k > T::zero()) || !(length > T::zero()) {
        return Err(Error::Contract(format!("barrier_transmission needs k > 0 and L > 0 (k = {k}, L = {length})")));
    }
    if !(v0 >= T::zero()) {
        return Err(Error::Contract(format!("barrier height must be non-negative, got {v0}")));
    }
    let quarter = T::lit(0.25);
    let gap = k * k - v0;
    let transmission = if gap.abs() < T::lit(THRESHOLD_BAND) {
        let kl = k * length;
        T::one() / (T::one() + quarter * kl * kl)
    } else {
        let kp = gap.abs().sqrt();
        if gap > T::zero() {
            let bracket = kp / k - k / kp;
            let s = (kp * length).sin();
            T::one() / (T::one() + quarter * bracket * bracket * s * s)
        } else {
            let bracket = kp / k + k / kp;
            let s = (kp * length).sinh();
            T::one() / (T::one() + quarter * bracket * bracket * s * s)
        }
    };
    Ok(BarrierCoefficients {
        k,
        v0,
        length,
        transmission,
        reflection: T::one() - transmission,
    })
}

/// Initial Gaussian `(2πσ²)^(−1/4) exp(−(x−c)²/(4σ²) + i k0 x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket<T> {
    pub center: T,
    pub sigma: T,
    pub k0: T,
}

impl<T: Real> GaussianPacket<T> {
    pub fn new(center: T, sigma: T, k0: T) -> Result<Self> {
        if !(sigma > T::zero()) {
            return Err(Error::config("packet.sigma", "must be positive"));
        }
        Ok(Self { center, sigma, k0 })
    }

    /// Density width `σ(t) = σ·√(1 + t²/σ⁴)` after free spreading.
    pub fn width_at(&self, t: T) -> T {
        let s2 = self.sigma * self.sigma;
        self.sigma * (T::one() + t * t / (s2 * s2)).sqrt()
    }

    /// Freely evolved packet: complex width `σ² + i t`, group velocity `2k0`.
    pub fn free_value(&self, x: T, t: T) -> Complex<T> {
        free_gaussian_field(self.center, self.sigma, self.k0, x, t)
    }
}

/// Free evolution of the normalized Gaussian under `i ψ_t = −ψ_xx`:
///
/// ```text
/// ψ(x,t) = (2πσ²)^(−1/4) (1 + i t/σ²)^(−1/2)
///          · exp(−(x − c − 2k0 t)² / (4(σ² + i t)) + i(k0 x − k0² t))
/// ```
pub fn free_gaussian_field<T: Real>(center: T, sigma0: T, k0: T, x: T, t: T) -> Complex<T> {
    let s2 = sigma0 * sigma0;
    let prefactor = (T::lit(2.0) * T::PI() * s2).powf(T::lit(-0.25));
    let spread = Complex::new(T::one(), t / s2);
    let u = x - center - T::lit(2.0) * k0 * t;
    let width = Complex::new(s2, t) * T::lit(4.0);
    let exponent = Complex::new(-u * u, T::zero()) / width + Complex::new(T::zero(), k0 * x - k0 * k0 * t);
    exponent.exp() * prefactor / spread.sqrt()
}

/// Number of image pairs on each side so that the first neglected image sits at least
/// eight (in practice twelve) dispersed widths beyond the box.
pub fn required_images<T: Real>(walls: (T, T), packet: &GaussianPacket<T>, t: T) -> usize {
    let span = walls.1 - walls.0;
    let reach = (T::lit(2.0) * packet.k0 * t).abs() + T::lit(12.0) * packet.width_at(t) + T::lit(2.0) * span;
    let m = (reach / (T::lit(2.0) * span)).ceil();
    m.to_usize().unwrap_or(usize::MAX).max(1)
}

/// Gaussian between perfectly reflecting walls `a < b`, by the method of images:
/// `ψ = Σ_{n=−M..M} [Φ(x − 2nL', t) − Φ(2a − x − 2nL', t)]` with `L' = b − a`.
///
/// `n_images` is a lower bound on `M`; [`required_images`] raises it as needed.
pub fn box_gaussian_field<T: Real>(
    walls: (T, T),
    packet: &GaussianPacket<T>,
    x: T,
    t: T,
    n_images: usize,
) -> Result<Complex<T>> {
    let (a, b) = walls;
    if !(a < b) {
        return Err(Error::config("box", "walls need a < b"));
    }
    if n_images < 1 {
        return Err(Error::config("box", "need at least one image pair"));
    }
    let reach = T::lit(5.0) * packet.sigma;
    if packet.center - reach < a || packet.center + reach > b {
        return Err(Error::config(
            "packet.center",
            "packet overlaps a wall within five widths",
        ));
    }
    let m = n_images.max(required_images(walls, packet, t)) as i64;
    let period = T::lit(2.0) * (b - a);
    let mut sum = Complex::new(T::zero(), T::zero());
    for n in -m..=m {
        let shift = T::from_i64(n).unwrap() * period;
        sum = sum + packet.free_value(x - shift, t) - packet.free_value(T::lit(2.0) * a - x - shift, t);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn over_barrier_value() {
        let c = barrier_transmission(2.4, 5.0, 2.0).unwrap();
        // independent arithmetic
        let kp = (2.4f64 * 2.4 - 5.0).sqrt();
        let br = (kp / 2.4 - 2.4 / kp).powi(2);
        let s2 = (kp * 2.0).sin().powi(2);
        assert_abs_diff_eq!(br, 5.7109, epsilon = 1e-4);
        assert_abs_diff_eq!(s2, 0.97045, epsilon = 1e-4);
        assert_abs_diff_eq!(c.transmission, 1.0 / (1.0 + 0.25 * br * s2), epsilon = 1e-15);
        assert_abs_diff_eq!(c.transmission, 0.4191, epsilon = 1e-4);
        assert_eq!(c.reflection, 1.0 - c.transmission);
    }

    #[test]
    fn tunneling_value() {
        let c = barrier_transmission(1.0, 5.0, 2.0).unwrap();
        assert_abs_diff_eq!(c.transmission, 8.59e-4, epsilon = 1e-6);
        let s = barrier_transmission(0.6, 5.0, 2.0).unwrap();
        assert!(s.transmission < 1e-3);
    }

    #[test]
    fn threshold_limit() {
        let c = barrier_transmission(5f64.sqrt(), 5.0, 2.0).unwrap();
        assert_abs_diff_eq!(c.transmission, 1.0 / 6.0, epsilon = 1e-12);
        for eps in [1e-8, -1e-8] {
            let k = (5.0f64 + eps).sqrt();
            let near = barrier_transmission(k, 5.0, 2.0).unwrap();
            assert!((near.transmission - 1.0 / 6.0).abs() < 1e-6, "eps {eps}");
        }
    }

    #[test]
    fn free_barrier_transmits_everything() {
        let c = barrier_transmission(1.3, 0.0, 2.0).unwrap();
        assert_abs_diff_eq!(c.transmission, 1.0);
        assert_abs_diff_eq!(c.reflection, 0.0);
    }

    #[test]
    fn resonance_is_perfect_transmission() {
        for m in 1..4 {
            let kp = m as f64 * PI / 2.0;
            let k = (5.0 + kp * kp).sqrt();
            let c = barrier_transmission(k, 5.0, 2.0).unwrap();
            assert_abs_diff_eq!(c.transmission, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn contract_violations() {
        assert!(barrier_transmission(0.0, 5.0, 2.0).is_err());
        assert!(barrier_transmission(1.0, 5.0, 0.0).is_err());
        assert!(barrier_transmission(1.0, -5.0, 2.0).is_err());
    }

    #[test]
    fn transmission_rises_between_resonances() {
        // resonances at k'L = mπ; T increases from the preceding minimum to each
        let l = 2.0;
        for m in 1..4 {
            let kp_hi = m as f64 * PI / l;
            let kp_lo = (m as f64 - 0.5) * PI / l;
            let k_hi = (5.0 + kp_hi * kp_hi).sqrt();
            let k_lo = (5.0 + kp_lo * kp_lo).sqrt();
            let mut prev = 0.0;
            for i in 0..=200 {
                let k = k_lo + (k_hi - k_lo) * i as f64 / 200.0;
                let t = barrier_transmission(k, 5.0, l).unwrap().transmission;
                assert!(t >= prev - 1e-12, "m={m} k={k}");
                prev = t;
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn coefficients_sum_to_one(k in 0.01f64..6.0, v0 in 0.0f64..20.0, l in 0.01f64..5.0) {
            let c = barrier_transmission(k, v0, l).unwrap();
            proptest::prop_assert_eq!(c.transmission + c.reflection, 1.0);
            proptest::prop_assert!(c.transmission > 0.0 && c.transmission <= 1.0);
        }
    }

    /// Spectral quadrature oracle: `ψ(x,t) = (1/2π) ∫ dk φ̂(k) e^{ikx − ik²t}` with
    /// `φ̂(k) = ∫ dy ψ(y,0) e^{−iky}` evaluated numerically as well.
    fn quadrature_free(center: f64, sigma: f64, k0: f64, xs: &[f64], t: f64) -> Vec<Complex<f64>> {
        let dy = sigma / 40.0;
        let ys: Vec<f64> = (-(12.0 * sigma / dy) as i64..=(12.0 * sigma / dy) as i64)
            .map(|i| center + i as f64 * dy)
            .collect();
        let pref = (2.0 * PI * sigma * sigma).powf(-0.25);
        let psi0: Vec<Complex<f64>> = ys
            .iter()
            .map(|&y| Complex::from_polar(pref * (-(y - center).powi(2) / (4.0 * sigma * sigma)).exp(), k0 * y))
            .collect();
        let kspan = 10.0 / sigma;
        let dk = kspan / 600.0;
        let ks: Vec<f64> = (-600..=600).map(|i| k0 + i as f64 * dk).collect();
        let spectrum: Vec<Complex<f64>> = ks
            .iter()
            .map(|&k| {
                psi0.iter()
                    .zip(&ys)
                    .map(|(p, &y)| p * Complex::from_polar(dy, -k * y))
                    .sum::<Complex<f64>>()
            })
            .collect();
        xs.iter()
            .map(|&x| {
                ks.iter()
                    .zip(&spectrum)
                    .map(|(&k, s)| s * Complex::from_polar(dk / (2.0 * PI), k * x - k * k * t))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn free_gaussian_matches_spectral_quadrature() {
        let (c, s, k0) = (-1.0, 0.8, 1.2);
        for t in [0.0, 0.5, 2.0] {
            let xs: Vec<f64> = (0..25).map(|i| -6.0 + i as f64 * 0.7 + 2.0 * k0 * t).collect();
            let q = quadrature_free(c, s, k0, &xs, t);
            for (x, qv) in xs.iter().zip(&q) {
                let v = free_gaussian_field(c, s, k0, *x, t);
                assert!((v - qv).norm() < 1e-9, "t={t} x={x}: {v} vs {qv}");
            }
        }
    }

    #[test]
    fn free_gaussian_at_zero_time_is_initial_packet() {
        let (c, s, k0) = (0.3, 1.1, -0.7);
        let pref = (2.0 * PI * s * s).powf(-0.25);
        for i in 0..50 {
            let x = -5.0 + 0.2 * i as f64;
            let expect = Complex::from_polar(pref * (-(x - c).powi(2) / (4.0 * s * s)).exp(), k0 * x);
            assert!((free_gaussian_field(c, s, k0, x, 0.0) - expect).norm() < 1e-15);
        }
    }

    fn density_norm(f: impl Fn(f64) -> Complex<f64>, lo: f64, hi: f64) -> f64 {
        let n = 40000;
        let h = (hi - lo) / n as f64;
        (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * f(lo + i as f64 * h).norm_sqr()
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn free_gaussian_peak_moves_at_group_velocity_and_keeps_norm() {
        let (c, s, k0, t) = (0.0, 1.0, 1.2, 2.0);
        let mut best = (0.0, 0.0);
        for i in 0..4001 {
            let x = 0.0 + i as f64 * 0.0025;
            let d = free_gaussian_field(c, s, k0, x, t).norm_sqr();
            if d > best.1 {
                best = (x, d);
            }
        }
        assert_abs_diff_eq!(best.0, c + 4.8, epsilon = 0.003);
        for t in [0.0, 1.0, 3.0] {
            let norm = density_norm(|x| free_gaussian_field(c, s, k0, x, t), -40.0, 50.0);
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn box_solution_vanishes_at_walls() {
        let p = GaussianPacket::new(1.0, 1.0, 2.0).unwrap();
        for t in [0.0, 0.7, 3.0, 10.0] {
            for m in [1, 3] {
                let a = box_gaussian_field((-8.0, 9.0), &p, -8.0, t, m).unwrap();
                let b = box_gaussian_field((-8.0, 9.0), &p, 9.0, t, m).unwrap();
                assert!(a.norm() < 1e-14 && b.norm() < 1e-14, "t={t}: {a} {b}");
            }
        }
    }

    #[test]
    fn box_matches_free_packet_far_from_walls() {
        let p = GaussianPacket::new(0.0, 1.0, 1.0).unwrap();
        for i in 0..40 {
            let x = -4.0 + 0.2 * i as f64;
            let b = box_gaussian_field((-20.0, 20.0), &p, x, 0.0, 1).unwrap();
            assert!((b - p.free_value(x, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn box_norm_is_conserved() {
        let p = GaussianPacket::new(0.0, 1.0, 1.0).unwrap();
        let walls = (-6.0, 7.0);
        let norm = density_norm(|x| box_gaussian_field(walls, &p, x, 1.0, 1).unwrap(), walls.0, walls.1);
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn distant_walls_reproduce_free_evolution() {
        let p = GaussianPacket::new(0.5, 0.7, 1.5).unwrap();
        for t in [0.0, 1.0, 4.0] {
            for i in 0..30 {
                let x = -5.0 + 0.5 * i as f64;
                let b = box_gaussian_field((-1e6, 1e6), &p, x, t, 1).unwrap();
                assert!((b - p.free_value(x, t)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn box_rejects_packet_on_wall() {
        let p = GaussianPacket::new(0.0, 1.0, 1.0).unwrap();
        assert!(box_gaussian_field((-3.0, 20.0), &p, 0.0, 0.0, 1).is_err());
        assert!(box_gaussian_field((3.0, -3.0), &p, 0.0, 0.0, 1).is_err());
    }
}
