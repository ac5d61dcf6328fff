//! High-accuracy evaluator for the symmetric stable law at unit time.
//!
//! The density `P(y)` with transform `exp(-|xi|^alpha - h (2 pi xi)^2)` is
//! synthesised once on a fine table by FFT, corrected for its periodic
//! images with the tail series, and then evaluated by Hermite interpolation
//! inside the table and by the tail series outside it.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;
use statrs::function::gamma::gamma;

use crate::error::{check_alpha, FracError, Result};
use crate::grid::{catmull_rom, Grid};
use crate::special::{image_sum, odd_image_sum};

const TABLE_HALF_WIDTH: f64 = 32.0;
const MAX_TERMS: usize = 24;

/// Large-|y| expansion `P(y) ~ sum b_k |y|^{-1-alpha k}` of the unit-time density.
/// Convergent for `alpha < 1`, asymptotic for `alpha > 1`.
#[derive(Clone, Debug)]
pub struct TailSeries {
    alpha: f64,
    b: Vec<f64>,
}

impl TailSeries {
    pub fn new(alpha: f64) -> Self {
        let mut b = Vec::with_capacity(MAX_TERMS);
        let mut fact = 1.0;
        for k in 1..=MAX_TERMS {
            fact *= k as f64;
            let kf = k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let s = (kf * PI * alpha / 2.0).sin();
            // sin(k pi) is not exactly zero in floating point.
            let s = if s.abs() < 1e-14 { 0.0 } else { s };
            let g = gamma(alpha * kf + 1.0);
            let v = 2.0 * sign * g * s * (2.0 * PI).powf(-alpha * kf - 1.0) / fact;
            if !v.is_finite() {
                break;
            }
            b.push(v);
        }
        Self { alpha, b }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.b
    }

    /// Number of terms to keep at distance `r`: stop at the smallest term.
    fn terms_at(&self, r: f64) -> usize {
        let mut best = f64::INFINITY;
        let mut count = 0;
        for (k, bk) in self.b.iter().enumerate() {
            let term = (bk * r.powf(-self.alpha * (k + 1) as f64)).abs();
            if bk.abs() == 0.0 {
                continue;
            }
            if term > best {
                break;
            }
            best = term;
            count = k + 1;
            if term < 1e-19 {
                break;
            }
        }
        count
    }

    /// Generic sum `sum_k c(k) b_k t^k |x|^{-e(k)}`.
    fn sum<C, E>(&self, x: f64, t: f64, c: C, e: E) -> f64
    where
        C: Fn(f64) -> f64,
        E: Fn(f64) -> f64,
    {
        let r = x.abs() * t.powf(-1.0 / self.alpha);
        let m = self.terms_at(r);
        let mut s = 0.0;
        let mut tk = 1.0;
        for (k, bk) in self.b.iter().take(m).enumerate() {
            let kf = (k + 1) as f64;
            tk *= t;
            s += c(kf) * bk * tk * x.abs().powf(-e(kf));
        }
        s
    }

    /// Density tail `p(x, t)`.
    pub fn density(&self, x: f64, t: f64) -> f64 {
        let a = self.alpha;
        self.sum(x, t, |_| 1.0, |k| 1.0 + a * k)
    }

    /// Tail of `d/dx p(x, t)`.
    pub fn density_derivative(&self, x: f64, t: f64) -> f64 {
        let a = self.alpha;
        -x.signum() * self.sum(x, t, |k| 1.0 + a * k, |k| 2.0 + a * k)
    }

    /// Tail of `Λ p(·, t) = -d/dt p(x, t)`.
    pub fn laplacian(&self, x: f64, t: f64) -> f64 {
        let a = self.alpha;
        -self.sum(x, t, |k| k / t, |k| 1.0 + a * k)
    }

    /// Upper tail probability `P(X_t > x)` for `x > 0`.
    pub fn upper_tail(&self, x: f64, t: f64) -> f64 {
        let a = self.alpha;
        self.sum(x, t, |k| 1.0 / (a * k), |k| a * k)
    }

    /// Images of the density under period `period`, `sum_{m != 0} p(x + m P, t)`.
    pub fn density_images(&self, x: f64, t: f64, period: f64) -> f64 {
        self.images(x, t, period, |_| 1.0, 0.0, false)
    }

    pub fn density_derivative_images(&self, x: f64, t: f64, period: f64) -> f64 {
        let a = self.alpha;
        -self.images(x, t, period, |k| 1.0 + a * k, 1.0, true)
    }

    pub fn laplacian_images(&self, x: f64, t: f64, period: f64) -> f64 {
        -self.images(x, t, period, |k| k / t, 0.0, false)
    }

    fn images<C: Fn(f64) -> f64>(&self, x: f64, t: f64, period: f64, c: C, extra: f64, odd: bool) -> f64 {
        let half = period / 2.0;
        let m = self.terms_at(half * t.powf(-1.0 / self.alpha));
        let mut s = 0.0;
        let mut tk = 1.0;
        for (k, bk) in self.b.iter().take(m).enumerate() {
            let kf = (k + 1) as f64;
            tk *= t;
            if *bk == 0.0 {
                continue;
            }
            let e = 1.0 + self.alpha * kf + extra;
            let im = if odd {
                odd_image_sum(e, x, period)
            } else {
                image_sum(e, x, period)
            };
            let term = c(kf) * bk * tk * im;
            s += term;
            if term.abs() < 1e-20 {
                break;
            }
        }
        s
    }
}

/// Unit-time density with transform `exp(-|xi|^alpha - heat (2 pi xi)^2)`.
#[derive(Clone, Debug)]
pub struct StableLaw {
    alpha: f64,
    heat: f64,
    y_max: f64,
    h: f64,
    p: Vec<f64>,
    dp: Vec<f64>,
    cdf: Vec<f64>,
    tails: TailSeries,
}

type LawKey = (u64, u64);

fn cache() -> &'static Mutex<HashMap<LawKey, Arc<StableLaw>>> {
    static CACHE: OnceLock<Mutex<HashMap<LawKey, Arc<StableLaw>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl StableLaw {
    /// Cached law for `alpha` without heat smoothing.
    pub fn shared(alpha: f64) -> Result<Arc<StableLaw>> {
        Self::shared_with_heat(alpha, 0.0)
    }

    /// Cached law with an additional Gaussian factor `exp(-heat (2 pi xi)^2)`.
    pub fn shared_with_heat(alpha: f64, heat: f64) -> Result<Arc<StableLaw>> {
        let key = (alpha.to_bits(), heat.to_bits());
        if let Some(l) = cache().lock().expect("law cache").get(&key) {
            return Ok(l.clone());
        }
        let law = Arc::new(Self::build(alpha, heat)?);
        cache().lock().expect("law cache").insert(key, law.clone());
        Ok(law)
    }

    pub fn build(alpha: f64, heat: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(heat >= 0.0) || !heat.is_finite() {
            return Err(FracError::InvalidParameter {
                name: "heat",
                reason: format!("must be finite and non-negative, got {heat}"),
            });
        }
        let y_max = TABLE_HALF_WIDTH;
        let mut xi_c: f64 = 40f64.powf(1.0 / alpha);
        if heat > 0.0 {
            xi_c = xi_c.min((40.0 / heat).sqrt() / (2.0 * PI));
        }
        let cap = (1usize << 21) as f64 / (4.0 * y_max);
        xi_c = xi_c.min(cap);
        let symbol = |xi: f64| xi.abs().powf(alpha) + heat * (2.0 * PI * xi).powi(2);
        let residual = (-symbol(xi_c)).exp();
        if residual > 1e-7 {
            return Err(FracError::Unsupported(format!(
                "stable law with alpha = {alpha} cannot be resolved (residual {residual:.2e})"
            )));
        }
        let n = ((4.0 * y_max * xi_c).ceil() as usize)
            .next_power_of_two()
            .clamp(1 << 18, 1 << 21);
        let grid = Grid::<f64>::new(y_max, n)?;
        let h = grid.dx();
        let m = |xi: f64| (-symbol(xi)).exp();
        let p_per = grid.synthesize(|xi| Complex::new(m(xi), 0.0))?;
        let dp_per = grid.synthesize(|xi| Complex::new(0.0, 2.0 * PI * xi * m(xi)))?;

        // Only stable tails are tabulated; heat smoothing is negligible there
        // for the small heat coefficients in use.
        let tails = TailSeries::new(alpha);
        let period = 2.0 * y_max;
        let coarse = 256usize;
        let ch = period / coarse as f64;
        // Two extra coarse nodes on each side keep the cubic stencil unclamped.
        let img: Vec<(f64, f64)> = (0..=coarse + 4)
            .map(|i| {
                let y = -y_max + (i as f64 - 2.0) * ch;
                (
                    tails.density_images(y, 1.0, period),
                    tails.density_derivative_images(y, 1.0, period),
                )
            })
            .collect();
        let interp = |y: f64, sel: fn(&(f64, f64)) -> f64| {
            let s = ((y + y_max) / ch).clamp(0.0, coarse as f64);
            let j = (s.floor() as usize).min(coarse - 1);
            let f = s - j as f64;
            let at = |i: usize| sel(&img[i]);
            catmull_rom(at(j + 1), at(j + 2), at(j + 3), at(j + 4), f)
        };

        let mut p = Vec::with_capacity(n + 1);
        let mut dp = Vec::with_capacity(n + 1);
        for j in 0..n {
            let y = grid.x(j);
            p.push(p_per[j].re - interp(y, |v| v.0));
            dp.push(dp_per[j].re - interp(y, |v| v.1));
        }
        // Close the table at y = +y_max by symmetry.
        p.push(p[0]);
        dp.push(-dp[0]);

        let mut cdf = Vec::with_capacity(n + 1);
        let c0 = tails.upper_tail(y_max, 1.0);
        let mut acc = 0.0;
        cdf.push(c0);
        for j in 1..=n {
            acc += 0.5 * h * (p[j - 1] + p[j]);
            cdf.push(c0 + acc - h * h / 12.0 * (dp[j] - dp[0]));
        }
        let sym: Vec<f64> = (0..=n).map(|j| 0.5 * (cdf[j] + 1.0 - cdf[n - j])).collect();

        Ok(Self {
            alpha,
            heat,
            y_max,
            h,
            p,
            dp,
            cdf: sym,
            tails,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn heat(&self) -> f64 {
        self.heat
    }

    pub fn tails(&self) -> &TailSeries {
        &self.tails
    }

    fn locate(&self, y: f64) -> (usize, f64) {
        let s = (y + self.y_max) / self.h;
        let n = self.p.len() - 1;
        let j = (s.floor().max(0.0) as usize).min(n - 1);
        (j, s - j as f64)
    }

    fn hermite(&self, v: &[f64], d: &[f64], y: f64) -> f64 {
        let (j, f) = self.locate(y);
        let h = self.h;
        let f2 = f * f;
        let f3 = f2 * f;
        let h00 = 2.0 * f3 - 3.0 * f2 + 1.0;
        let h10 = f3 - 2.0 * f2 + f;
        let h01 = -2.0 * f3 + 3.0 * f2;
        let h11 = f3 - f2;
        h00 * v[j] + h10 * h * d[j] + h01 * v[j + 1] + h11 * h * d[j + 1]
    }

    fn inside(&self, y: f64) -> bool {
        y.abs() < self.y_max
    }

    /// Unit-time density `P(y)`.
    pub fn density(&self, y: f64) -> f64 {
        if self.inside(y) {
            self.hermite(&self.p, &self.dp, y)
        } else {
            self.tails.density(y, 1.0)
        }
    }

    /// `P'(y)`.
    pub fn density_derivative(&self, y: f64) -> f64 {
        if self.inside(y) {
            let (j, f) = self.locate(y);
            let last = self.dp.len() as isize - 1;
            let at = |i: isize| self.dp[i.clamp(0, last) as usize];
            let ji = j as isize;
            catmull_rom(at(ji - 1), at(ji), at(ji + 1), at(ji + 2), f)
        } else {
            self.tails.density_derivative(y, 1.0)
        }
    }

    /// Cumulative distribution `P(Y <= y)`.
    pub fn cdf(&self, y: f64) -> f64 {
        if self.inside(y) {
            self.hermite(&self.cdf, &self.p, y)
        } else if y > 0.0 {
            1.0 - self.tails.upper_tail(y, 1.0)
        } else {
            self.tails.upper_tail(-y, 1.0)
        }
    }

    /// `P(Y > y)`, accurate in the upper tail.
    pub fn survival(&self, y: f64) -> f64 {
        if y >= self.y_max {
            self.tails.upper_tail(y, 1.0)
        } else {
            1.0 - self.cdf(y)
        }
    }

    /// `Λ^alpha P = (P + y P') / alpha`, the unit-time kernel laplacian.
    pub fn laplacian(&self, y: f64) -> f64 {
        (self.density(y) + y * self.density_derivative(y)) / self.alpha
    }

    /// Density of `X_t` at `x`.
    pub fn density_at(&self, x: f64, t: f64) -> f64 {
        let s = t.powf(-1.0 / self.alpha);
        s * self.density(x * s)
    }

    /// Distribution function of `X_t` at `x`; `t = 0` gives the unit step.
    pub fn cdf_at(&self, x: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return if x > 0.0 {
                1.0
            } else if x < 0.0 {
                0.0
            } else {
                0.5
            };
        }
        self.cdf(x * t.powf(-1.0 / self.alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::levy_constant;
    use approx::assert_abs_diff_eq;

    fn cauchy(y: f64) -> f64 {
        2.0 / (1.0 + 4.0 * PI * PI * y * y)
    }

    #[test]
    fn first_tail_coefficient_is_the_levy_constant() {
        for &a in &[0.3, 0.5, 1.0, 1.5, 1.9] {
            let s = TailSeries::new(a);
            assert!((s.coefficients()[0] - levy_constant(a)).abs() < 1e-14 * levy_constant(a).abs().max(1.0));
        }
    }

    #[test]
    fn cauchy_law_matches_closed_form() {
        let law = StableLaw::shared(1.0).unwrap();
        for i in 0..400 {
            let y = -50.0 + i as f64 * 0.2537;
            assert_abs_diff_eq!(law.density(y), cauchy(y), epsilon = 1e-10);
            let c = 0.5 + (2.0 * PI * y).atan() / PI;
            assert_abs_diff_eq!(law.cdf(y), c, epsilon = 1e-10);
            let d = -16.0 * PI * PI * y / (1.0 + 4.0 * PI * PI * y * y).powi(2);
            assert_abs_diff_eq!(law.density_derivative(y), d, epsilon = 1e-8);
        }
    }

    #[test]
    fn gaussian_law_matches_closed_form() {
        let law = StableLaw::shared(2.0).unwrap();
        for i in 0..100 {
            let y = -3.0 + i as f64 * 0.061;
            assert_abs_diff_eq!(law.density(y), PI.sqrt() * (-PI * PI * y * y).exp(), epsilon = 1e-11);
        }
    }

    #[test]
    fn half_law_is_normalised_and_symmetric() {
        let law = StableLaw::shared(0.5).unwrap();
        assert_abs_diff_eq!(law.cdf(0.0), 0.5, epsilon = 1e-12);
        for &y in &[0.01, 0.3, 2.0, 20.0, 31.9, 32.1, 500.0] {
            assert_abs_diff_eq!(law.cdf(y) + law.cdf(-y), 1.0, epsilon = 1e-12);
        }
        // The table agrees with the tail series just inside its edge.
        let t = law.tails();
        assert_abs_diff_eq!(law.density(31.999), t.density(31.999, 1.0), epsilon = 1e-11);
        assert_abs_diff_eq!(law.cdf(-31.999), t.upper_tail(31.999, 1.0), epsilon = 1e-11);
    }

    #[test]
    fn heat_smoothed_cauchy_matches_convolution_value_at_origin() {
        // P(0) = 2 ∫_0^∞ exp(-xi - 4 pi^2 h xi^2) dxi, evaluated by composite Simpson.
        let h = 1e-3;
        let law = StableLaw::shared_with_heat(1.0, h).unwrap();
        let n = 200_000;
        let top = 60.0;
        let dx = top / n as f64;
        let f = |x: f64| (-x - 4.0 * PI * PI * h * x * x).exp();
        let mut s = f(0.0) + f(top);
        for i in 1..n {
            s += f(i as f64 * dx) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let exact = 2.0 * s * dx / 3.0;
        assert_abs_diff_eq!(law.density(0.0), exact, epsilon = 1e-9);
    }
}
