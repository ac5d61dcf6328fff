//! Uniform periodic grid on `[-L, L)` and its continuum-normalised Fourier pair.
//!
//! Nodes are `x_j = -L + j dx`, `j = 0..n`, so `x = 0` sits at `j = n/2`.
//! Frequencies are `xi_k = k / (2L)` in FFT order, with the transform
//! `f_hat(xi) = ∫ exp(-2 pi i x xi) f(x) dx` approximated by the Riemann sum.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{FracError, Result};
use crate::scalar::{lit, wide, Scalar};

#[derive(Clone)]
pub struct Grid<T: Scalar> {
    half_length: T,
    n: usize,
    dx: T,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Scalar> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("half_length", &self.half_length)
            .field("n", &self.n)
            .field("dx", &self.dx)
            .finish()
    }
}

impl<T: Scalar> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.half_length == other.half_length
    }
}

impl<T: Scalar> Grid<T> {
    pub fn new(half_length: T, n: usize) -> Result<Self> {
        if n < 4 || n % 2 != 0 || !(half_length > T::zero()) || !half_length.is_finite() {
            return Err(FracError::InvalidGrid {
                n,
                half_length: wide(half_length),
            });
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            half_length,
            n,
            dx: lit::<T>(2.0) * half_length / lit(n as f64),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn half_length(&self) -> T {
        self.half_length
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    /// Frequency spacing `1 / (2L)`.
    pub fn dxi(&self) -> T {
        T::one() / (lit::<T>(2.0) * self.half_length)
    }

    /// Index of the node at `x = 0`.
    pub fn origin(&self) -> usize {
        self.n / 2
    }

    pub fn x(&self, j: usize) -> T {
        -self.half_length + lit::<T>(j as f64) * self.dx
    }

    /// Position of a (possibly out of range) signed node index.
    pub fn x_signed(&self, j: isize) -> T {
        -self.half_length + lit::<T>(j as f64) * self.dx
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Frequency of FFT bin `k`.
    pub fn frequency(&self, k: usize) -> T {
        let signed = if k < self.n / 2 {
            k as f64
        } else {
            k as f64 - self.n as f64
        };
        lit::<T>(signed) * self.dxi()
    }

    pub fn frequencies(&self) -> Vec<T> {
        (0..self.n).map(|k| self.frequency(k)).collect()
    }

    /// Largest resolved frequency `1 / (2 dx)`.
    pub fn nyquist(&self) -> T {
        T::one() / (lit::<T>(2.0) * self.dx)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(FracError::LengthMismatch {
                expected: self.n,
                got: len,
            })
        }
    }

    /// Continuum-normalised forward transform of real samples (FFT order).
    pub fn forward(&self, samples: &[T]) -> Result<Vec<Complex<T>>> {
        self.check_len(samples.len())?;
        let mut buf: Vec<Complex<T>> = samples
            .iter()
            .map(|&v| Complex::new(v, T::zero()))
            .collect();
        self.forward.process(&mut buf);
        // The phase exp(2 pi i xi_k L) of the shifted origin equals (-1)^k.
        for (k, c) in buf.iter_mut().enumerate() {
            let s = if k % 2 == 0 { self.dx } else { -self.dx };
            *c = *c * s;
        }
        Ok(buf)
    }

    /// Inverse of [`Grid::forward`].
    pub fn inverse(&self, spectrum: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.check_len(spectrum.len())?;
        let scale = T::one() / (lit::<T>(self.n as f64) * self.dx);
        let mut buf: Vec<Complex<T>> = spectrum
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c } else { -c })
            .collect();
        self.inverse.process(&mut buf);
        for c in buf.iter_mut() {
            *c = *c * scale;
        }
        Ok(buf)
    }

    /// Real part of the inverse transform.
    pub fn inverse_real(&self, spectrum: &[Complex<T>]) -> Result<Vec<T>> {
        Ok(self.inverse(spectrum)?.into_iter().map(|c| c.re).collect())
    }

    /// Applies a Fourier multiplier `m(xi)` to real samples and returns the real part.
    pub fn apply_multiplier<F>(&self, samples: &[T], m: F) -> Result<Vec<T>>
    where
        F: Fn(T) -> Complex<T>,
    {
        let mut spec = self.forward(samples)?;
        for (k, c) in spec.iter_mut().enumerate() {
            *c = *c * m(self.frequency(k));
        }
        self.inverse_real(&spec)
    }

    /// Samples the inverse transform of a multiplier `m(xi)`, i.e. the kernel
    /// whose transform is `m`, periodised with period `2L`.
    pub fn synthesize<F>(&self, m: F) -> Result<Vec<Complex<T>>>
    where
        F: Fn(T) -> Complex<T>,
    {
        let spec: Vec<Complex<T>> = (0..self.n).map(|k| m(self.frequency(k))).collect();
        self.inverse(&spec)
    }

    /// Trapezoid-free Riemann integral `sum f_j dx` (exact for periodic band-limited data).
    pub fn integrate(&self, samples: &[T]) -> T {
        samples.iter().copied().sum::<T>() * self.dx
    }

    /// Discrete inner product `sum a_j b_j dx`.
    pub fn inner(&self, a: &[T], b: &[T]) -> T {
        a.iter().zip(b).map(|(&x, &y)| x * y).sum::<T>() * self.dx
    }

    /// Clamped cubic (Catmull-Rom) interpolation of nodal samples at `x`.
    /// Outside `[x_0, x_{n-1}]` the boundary sample is returned.
    pub fn interpolate(&self, samples: &[T], x: T) -> T {
        let s = (x + self.half_length) / self.dx;
        let last = self.n - 1;
        if !(s > T::zero()) {
            return samples[0];
        }
        if s >= lit(last as f64) {
            return samples[last];
        }
        let j = s.floor().to_usize().unwrap_or(0).min(last - 1);
        let f = s - lit(j as f64);
        let at = |i: isize| samples[i.clamp(0, last as isize) as usize];
        let ji = j as isize;
        catmull_rom(at(ji - 1), at(ji), at(ji + 1), at(ji + 2), f)
    }
}

/// Cubic Catmull-Rom interpolation between `p1` and `p2` at fraction `f`.
pub fn catmull_rom<T: Scalar>(p0: T, p1: T, p2: T, p3: T, f: T) -> T {
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let a = -half * p0 + lit::<T>(1.5) * p1 - lit::<T>(1.5) * p2 + half * p3;
    let b = p0 - lit::<T>(2.5) * p1 + two * p2 - half * p3;
    let c = -half * p0 + half * p2;
    ((a * f + b) * f + c) * f + p1
}

/// Discrete `L^p` norm `(sum |f_j|^p dx)^(1/p)`; `p = inf` gives the sample maximum.
pub fn lp_norm<T: Scalar>(samples: &[T], dx: T, p: T) -> Result<T> {
    if p.is_nan() || p < T::one() {
        return Err(FracError::InvalidExponent(wide(p)));
    }
    if p.is_infinite() {
        return Ok(samples.iter().fold(T::zero(), |m, &v| m.max(v.abs())));
    }
    if p == T::one() {
        return Ok(samples.iter().map(|v| v.abs()).sum::<T>() * dx);
    }
    if p == lit(2.0) {
        return Ok((samples.iter().map(|&v| v * v).sum::<T>() * dx).sqrt());
    }
    // Scale by the maximum to avoid overflow for large exponents.
    let m = samples.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    if m == T::zero() {
        return Ok(T::zero());
    }
    let s: T = samples.iter().map(|&v| (v.abs() / m).powf(p)).sum();
    Ok(m * (s * dx).powf(T::one() / p))
}

/// Linear convolution `y_i = sum_j K(i - j) x_j` for vectors of a fixed
/// length, evaluated by zero-padded FFT.
#[derive(Clone)]
pub struct Convolver<T: Scalar> {
    len: usize,
    size: usize,
    kernel_hat: Vec<Complex<T>>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Scalar> fmt::Debug for Convolver<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Convolver")
            .field("len", &self.len)
            .field("size", &self.size)
            .finish()
    }
}

impl<T: Scalar> Convolver<T> {
    /// `kernel(d)` is evaluated for offsets `d` in `-(len-1)..=(len-1)`.
    pub fn new<F: Fn(isize) -> T>(len: usize, kernel: F) -> Self {
        let size = (2 * len).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        let mut buf = vec![Complex::new(T::zero(), T::zero()); size];
        buf[0].re = kernel(0);
        for d in 1..len {
            buf[d].re = kernel(d as isize);
            buf[size - d].re = kernel(-(d as isize));
        }
        forward.process(&mut buf);
        let scale = T::one() / lit(size as f64);
        for c in buf.iter_mut() {
            *c = *c * scale;
        }
        Self {
            len,
            size,
            kernel_hat: buf,
            forward,
            inverse,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.len, "convolver input length");
        let mut buf = vec![Complex::new(T::zero(), T::zero()); self.size];
        for (b, &v) in buf.iter_mut().zip(x) {
            b.re = v;
        }
        self.forward.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b = *b * *k;
        }
        self.inverse.process(&mut buf);
        buf.truncate(self.len);
        buf.into_iter().map(|c| c.re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let g = Grid::<f64>::new(16.0, 1024).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|x| (-std::f64::consts::PI * x * x).exp()).collect();
        let spec = g.forward(&f).unwrap();
        for (k, c) in spec.iter().enumerate() {
            let xi = g.frequency(k);
            assert_abs_diff_eq!(c.re, (-std::f64::consts::PI * xi * xi).exp(), epsilon = 1e-12);
            assert_abs_diff_eq!(c.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn shifted_gaussian_has_expected_phase() {
        let g = Grid::<f64>::new(16.0, 512).unwrap();
        let a = 1.25;
        let f: Vec<f64> = g
            .nodes()
            .iter()
            .map(|x| (-std::f64::consts::PI * (x - a) * (x - a)).exp())
            .collect();
        let spec = g.forward(&f).unwrap();
        for (k, c) in spec.iter().enumerate().take(20) {
            let xi = g.frequency(k);
            let mag = (-std::f64::consts::PI * xi * xi).exp();
            let ph = -2.0 * std::f64::consts::PI * a * xi;
            assert_abs_diff_eq!(c.re, mag * ph.cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(c.im, mag * ph.sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn origin_node_is_zero() {
        let g = Grid::<f64>::new(64.0, 8192).unwrap();
        assert_eq!(g.x(g.origin()), 0.0);
        assert_eq!(g.dx(), 1.0 / 64.0);
        assert_eq!(g.frequency(0), 0.0);
        assert_eq!(g.frequency(g.n() / 2), -g.nyquist());
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::<f64>::new(1.0, 7).is_err());
        assert!(Grid::<f64>::new(-1.0, 8).is_err());
        assert!(Grid::<f64>::new(1.0, 2).is_err());
    }

    #[test]
    fn lp_norm_of_constant_and_errors() {
        let v = vec![2.0f64; 10];
        assert_abs_diff_eq!(lp_norm(&v, 0.1, 1.0).unwrap(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(lp_norm(&v, 0.1, 3.0).unwrap(), 2.0, epsilon = 1e-14);
        assert_eq!(lp_norm(&v, 0.1, f64::INFINITY).unwrap(), 2.0);
        assert!(matches!(lp_norm(&v, 0.1, 0.5), Err(FracError::InvalidExponent(_))));
    }

    #[test]
    fn convolver_matches_direct_sum() {
        let len = 37;
        let k = |d: isize| 1.0 / (1.0 + (d as f64).powi(2)) + 0.1 * d as f64;
        let conv = Convolver::new(len, k);
        let x: Vec<f64> = (0..len).map(|i| ((i * 7 % 11) as f64).sin()).collect();
        let y = conv.apply(&x);
        for i in 0..len {
            let direct: f64 = (0..len).map(|j| k(i as isize - j as isize) * x[j]).sum();
            assert_abs_diff_eq!(y[i], direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn interpolation_reproduces_cubics() {
        let g = Grid::<f64>::new(4.0, 64).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|x| 0.3 * x * x - x + 2.0).collect();
        for &x in &[-1.37, 0.01, 2.5] {
            assert_abs_diff_eq!(g.interpolate(&f, x), 0.3 * x * x - x + 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_precision_round_trip() {
        let g = Grid::<f32>::new(8.0, 256).unwrap();
        let f: Vec<f32> = g.nodes().iter().map(|x| (-x * x).exp()).collect();
        let back = g.inverse_real(&g.forward(&f).unwrap()).unwrap();
        for (a, b) in f.iter().zip(&back) {
            assert!((a - b).abs() < 1e-5);
        }
    }
}
