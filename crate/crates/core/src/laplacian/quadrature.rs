//! Positive-weight Lévy-Khintchine quadrature for `Λ^alpha`.
//!
//! `Λu(x_i) = G sum_k W_k (2u_i - u_{i+k} - u_{i-k})` plus exterior cells.
//! Up to a large radius `g(z)/z^2`, with `g(z) = u(x+z) + u(x-z) - 2u(x)`,
//! is interpolated linearly and integrated exactly against `z^{1-alpha}`;
//! further out each node carries the exact mass of `|z|^{-1-alpha}` over
//! its cell. Beyond a band of ghost nodes the line is covered by
//! geometrically growing cells up to infinity, so the operator acts on the
//! whole real line given an exterior description of `u`.

use crate::error::{check_alpha, FracError, Result};
use crate::grid::{Convolver, Grid};
use crate::scalar::{lit, wide, Scalar};
use crate::special::levy_constant;

/// Width of the ghost band beyond each grid edge, in cells.
const NEAR_CELLS: usize = 16;
/// Offsets handled by product integration; midpoint cells beyond.
const HAT_CELLS: usize = 2048;
const GROWTH: f64 = 1.25;
const FAR_REACH: f64 = 1e7;

/// Values of `u` outside the grid.
#[derive(Clone, Copy)]
pub enum Exterior<'a, T> {
    /// Constant far fields on the left and right.
    Constant { left: T, right: T },
    /// An arbitrary function with the given limits at `-inf` and `+inf`.
    Function {
        f: &'a (dyn Fn(T) -> T + Sync),
        left: T,
        right: T,
    },
}

impl<'a, T: Scalar> Exterior<'a, T> {
    fn value(&self, x: T, right_side: bool) -> T {
        match *self {
            Exterior::Constant { left, right } => {
                if right_side {
                    right
                } else {
                    left
                }
            }
            Exterior::Function { f, .. } => f(x),
        }
    }

}

/// Quadrature weights split at radius `r = m dx` into the singular inner
/// part and the integrable outer part.
#[derive(Clone, Debug)]
pub struct LevyKhintchineSplit<T: Scalar> {
    pub alpha: T,
    pub r: T,
    pub g_alpha: T,
    pub grid: Grid<T>,
    /// Number of cells inside the split radius.
    pub m: usize,
    /// Full weights `W_k`, `k = 0..`, with `W_0 = 0`.
    pub weights: Vec<T>,
    /// Inner weights `W^in_k` for `k = 0..=m`.
    pub inner: Vec<T>,
}

/// `∫ hat(s) (k + s)^p ds` over `s in [-1, 1]`, with `hat(s) = 1 - |s|`.
/// This is a second difference of `k^{p+2} / ((p+1)(p+2))`; for large `k`
/// its Taylor expansion avoids the cancellation.
fn hat_moment(p: f64, k: usize) -> f64 {
    let kf = k as f64;
    if k >= 24 {
        let c2 = p * (p - 1.0) / 12.0;
        let c4 = p * (p - 1.0) * (p - 2.0) * (p - 3.0) / 360.0;
        let c6 = p * (p - 1.0) * (p - 2.0) * (p - 3.0) * (p - 4.0) * (p - 5.0) / 20160.0;
        let k2 = 1.0 / (kf * kf);
        return kf.powf(p) * (1.0 + k2 * (c2 + k2 * (c4 + k2 * c6)));
    }
    let f = |x: f64| if x <= 0.0 { 0.0 } else { x.powf(p + 2.0) };
    let den = (p + 1.0) * (p + 2.0);
    if k == 0 {
        // Half hat on [0, 1].
        return f(1.0) / den;
    }
    (f(kf + 1.0) - 2.0 * f(kf) + f(kf - 1.0)) / den
}

/// Half hat `∫_{-1}^{0} (1 + s)(k + s)^p ds` (left half only).
fn left_half_moment(p: f64, k: usize) -> f64 {
    let kf = k as f64;
    let i = |a: f64, b: f64, q: f64| (b.powf(q + 1.0) - a.powf(q + 1.0)) / (q + 1.0);
    // (1 + s) = (z - (k - 1)) in z = k + s.
    i(kf - 1.0, kf, p + 1.0) - (kf - 1.0) * i(kf - 1.0, kf, p)
}

/// Dimensionless weights on `g_k` from product integration of
/// `h = g / z^2` against `z^{1-alpha}` with hats up to node `kmax`.
/// With `half_tail`, the last node also carries `h` constant on
/// `[kmax, kmax + 1/2]`; otherwise its hat is cut at `kmax`.
fn product_weights(alpha: f64, kmax: usize, half_tail: bool) -> Vec<f64> {
    let p = 1.0 - alpha;
    let mut c: Vec<f64> = (0..=kmax).map(|k| hat_moment(p, k)).collect();
    c[kmax] = left_half_moment(p, kmax);
    if half_tail {
        let a = kmax as f64;
        c[kmax] += ((a + 0.5).powf(2.0 - alpha) - a.powf(2.0 - alpha)) / (2.0 - alpha);
    }
    let mut w = vec![0.0; kmax + 1];
    w[1] = c[0] + c[1];
    for k in 2..=kmax {
        w[k] = c[k] / (k as f64 * k as f64);
    }
    w
}

impl<T: Scalar> LevyKhintchineSplit<T> {
    /// Split at `r = m dx`.
    pub fn new(alpha: T, r: T, grid: &Grid<T>) -> Result<Self> {
        let a = wide(alpha);
        check_alpha(a)?;
        if !(a < 2.0) {
            return Err(FracError::Unsupported("the Lévy-Khintchine split needs alpha < 2".into()));
        }
        let dx = wide(grid.dx());
        let rf = wide(r);
        if rf < dx * (1.0 - 1e-12) {
            return Err(FracError::RadiusBelowSpacing { r: rf, dx });
        }
        let m = (rf / dx).round() as usize;
        let near = NEAR_CELLS.max(m);
        let len = grid.n() + 2 * near;
        let hats = HAT_CELLS.max(m).min(len - 1);
        let scale = dx.powf(-a);
        let product = product_weights(a, hats, true);
        let mut weights = vec![T::zero(); len];
        for k in 1..len {
            let w = if k <= hats {
                product[k] * scale
            } else {
                let lo = (k as f64 - 0.5) * dx;
                let hi = (k as f64 + 0.5) * dx;
                (lo.powf(-a) - hi.powf(-a)) / a
            };
            weights[k] = lit(w);
        }
        let inner = product_weights(a, m, false).into_iter().map(|w| lit(w * scale)).collect();
        Ok(Self {
            alpha,
            r: lit(m as f64 * dx),
            g_alpha: lit(levy_constant(a)),
            grid: grid.clone(),
            m,
            weights,
            inner,
        })
    }

    /// Default split `r = 4 dx`.
    pub fn default_for(alpha: T, grid: &Grid<T>) -> Result<Self> {
        Self::new(alpha, grid.dx() * lit(4.0), grid)
    }

    /// Outer weight `W_k - W^in_k`.
    pub fn outer_weight(&self, k: usize) -> T {
        let w = self.weights[k];
        if k <= self.m {
            w - self.inner[k]
        } else {
            w
        }
    }

    fn near(&self) -> usize {
        (self.weights.len() - self.grid.n()) / 2
    }
}

/// Ready-to-apply operator built from a split.
#[derive(Clone, Debug)]
pub struct QuadratureOperator<T: Scalar> {
    split: Option<LevyKhintchineSplit<T>>,
    grid: Grid<T>,
    alpha: T,
    ng: usize,
    conv: Option<Convolver<T>>,
    row: Vec<T>,
    cells_right: Vec<(T, T)>,
    omega_right: Vec<T>,
    omega_left: Vec<T>,
    omega_inf_right: Vec<T>,
    omega_inf_left: Vec<T>,
    omega_total_right: Vec<T>,
    omega_total_left: Vec<T>,
    local_weight: T,
}

impl<T: Scalar> QuadratureOperator<T> {
    pub fn new(split: LevyKhintchineSplit<T>) -> Self {
        let grid = split.grid.clone();
        let n = grid.n();
        let ng = split.near();
        let len = n + 2 * ng;
        let a = wide(split.alpha);
        let w = split.weights.clone();
        let wk = w.clone();
        let conv = Convolver::new(len, move |d| if d == 0 { T::zero() } else { wk[d.unsigned_abs()] });
        // Right exterior cells, as distances from the last ghost face.
        let dx = wide(grid.dx());
        let l = wide(grid.half_length());
        let face = wide(grid.x(n - 1)) + (ng as f64 + 0.5) * dx;
        let mut cells = Vec::new();
        let mut lo = face;
        let mut width = dx;
        while lo - face < FAR_REACH * l {
            cells.push((lo, lo + width));
            lo += width;
            width *= GROWTH;
        }
        let q = cells.len();
        let mut omega_right = vec![T::zero(); n * q];
        let mut omega_left = vec![T::zero(); n * q];
        let mut omega_inf_right = vec![T::zero(); n];
        let mut omega_inf_left = vec![T::zero(); n];
        let x0 = wide(grid.x(0));
        let face_left = x0 - (ng as f64 + 0.5) * dx;
        for i in 0..n {
            let xi = wide(grid.x(i));
            for (c, &(lo, hi)) in cells.iter().enumerate() {
                let dr = (lo - xi, hi - xi);
                omega_right[i * q + c] = lit((dr.0.powf(-a) - dr.1.powf(-a)) / a);
                // Mirror cell on the left: [face_left - (hi - face), face_left - (lo - face)].
                let dl = (xi - (face_left - (lo - face)), xi - (face_left - (hi - face)));
                omega_left[i * q + c] = lit((dl.0.powf(-a) - dl.1.powf(-a)) / a);
            }
            let end = cells.last().map(|c| c.1).unwrap_or(face);
            omega_inf_right[i] = lit((end - xi).powf(-a) / a);
            omega_inf_left[i] = lit((xi - (face_left - (end - face))).powf(-a) / a);
        }
        let omega_total_right: Vec<T> = (0..n)
            .map(|i| (0..q).map(|c| omega_right[i * q + c]).sum::<T>() + omega_inf_right[i])
            .collect();
        let omega_total_left: Vec<T> = (0..n)
            .map(|i| (0..q).map(|c| omega_left[i * q + c]).sum::<T>() + omega_inf_left[i])
            .collect();
        let ones = vec![T::one(); len];
        let sums = conv.apply(&ones);
        let row = (0..n)
            .map(|i| sums[i + ng] + omega_total_right[i] + omega_total_left[i])
            .collect();
        let cells_right = cells.into_iter().map(|(a, b)| (lit(a), lit(b))).collect();
        Self {
            alpha: split.alpha,
            grid,
            ng,
            conv: Some(conv),
            row,
            cells_right,
            omega_right,
            omega_left,
            omega_inf_right,
            omega_inf_left,
            omega_total_right,
            omega_total_left,
            local_weight: T::zero(),
            split: Some(split),
        }
    }

    /// Builds the operator for any `alpha` in (0, 2]; `alpha = 2` gives the
    /// three-point stencil of `-∂_xx / (4 pi^2)`.
    pub fn for_alpha(alpha: T, grid: &Grid<T>) -> Result<Self> {
        check_alpha(wide(alpha))?;
        if wide(alpha) == 2.0 {
            let dx = grid.dx();
            let four_pi2 = lit::<T>(4.0) * T::PI() * T::PI();
            return Ok(Self {
                split: None,
                grid: grid.clone(),
                alpha,
                ng: 1,
                conv: None,
                row: vec![lit::<T>(2.0) / (four_pi2 * dx * dx); grid.n()],
                cells_right: Vec::new(),
                omega_right: Vec::new(),
                omega_left: Vec::new(),
                omega_inf_right: Vec::new(),
                omega_inf_left: Vec::new(),
                omega_total_right: Vec::new(),
                omega_total_left: Vec::new(),
                local_weight: T::one() / (four_pi2 * dx * dx),
            });
        }
        Ok(Self::new(LevyKhintchineSplit::default_for(alpha, grid)?))
    }

    pub fn split(&self) -> Option<&LevyKhintchineSplit<T>> {
        self.split.as_ref()
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Diagonal coefficient of `Λ_h`, i.e. `G` times the total weight at node `i`.
    pub fn diagonal(&self) -> Vec<T> {
        let g = self.split.as_ref().map(|s| s.g_alpha).unwrap_or(T::one());
        self.row.iter().map(|&r| g * r).collect()
    }

    /// Largest diagonal coefficient; the operator's contribution to the CFL bound.
    pub fn lipschitz(&self) -> T {
        self.diagonal().into_iter().fold(T::zero(), |m, v| m.max(v))
    }

    /// Applies the operator to nodal samples with the given exterior.
    pub fn apply(&self, u: &[T], ext: &Exterior<'_, T>) -> Vec<T> {
        let n = self.grid.n();
        assert_eq!(u.len(), n, "quadrature operator input length");
        let Some(split) = &self.split else {
            let w = self.local_weight;
            let l = ext.value(self.grid.x_signed(-1), false);
            let r = ext.value(self.grid.x_signed(n as isize), true);
            return (0..n)
                .map(|i| {
                    let um = if i == 0 { l } else { u[i - 1] };
                    let up = if i == n - 1 { r } else { u[i + 1] };
                    w * (lit::<T>(2.0) * u[i] - um - up)
                })
                .collect();
        };
        let ng = self.ng;
        let mut ue = Vec::with_capacity(n + 2 * ng);
        for j in 0..ng {
            ue.push(ext.value(self.grid.x_signed(j as isize - ng as isize), false));
        }
        ue.extend_from_slice(u);
        for j in 0..ng {
            ue.push(ext.value(self.grid.x_signed((n + j) as isize), true));
        }
        let conv = self.conv.as_ref().expect("convolver present for alpha < 2");
        let c = conv.apply(&ue);
        let q = self.cells_right.len();
        let face = self.grid.x(n - 1) + lit::<T>(ng as f64 + 0.5) * self.grid.dx();
        let face_left = self.grid.x(0) - lit::<T>(ng as f64 + 0.5) * self.grid.dx();
        let g = split.g_alpha;
        let exterior: Vec<T> = match ext {
            Exterior::Constant { left, right } => (0..n)
                .map(|i| self.omega_total_right[i] * *right + self.omega_total_left[i] * *left)
                .collect(),
            Exterior::Function { f, left, right } => {
                let half = lit::<T>(0.5);
                let rv: Vec<T> = self.cells_right.iter().map(|&(a, b)| f(half * (a + b))).collect();
                let lv: Vec<T> = self
                    .cells_right
                    .iter()
                    .map(|&(a, b)| f(face_left - (half * (a + b) - face)))
                    .collect();
                (0..n)
                    .map(|i| {
                        let base = i * q;
                        let mut s = self.omega_inf_right[i] * *right + self.omega_inf_left[i] * *left;
                        for c in 0..q {
                            s = s + self.omega_right[base + c] * rv[c] + self.omega_left[base + c] * lv[c];
                        }
                        s
                    })
                    .collect()
            }
        };
        (0..n)
            .map(|i| g * (self.row[i] * u[i] - c[i + ng] - exterior[i]))
            .collect()
    }

    /// Inner part `Λ_r^{(alpha)} u` (local `2m+1` stencil).
    pub fn apply_inner(&self, u: &[T], ext: &Exterior<'_, T>) -> Vec<T> {
        let Some(split) = &self.split else {
            return self.apply(u, ext);
        };
        let n = self.grid.n();
        let m = split.m as isize;
        let at = |j: isize| -> T {
            if j < 0 {
                ext.value(self.grid.x_signed(j), false)
            } else if j >= n as isize {
                ext.value(self.grid.x_signed(j), true)
            } else {
                u[j as usize]
            }
        };
        (0..n as isize)
            .map(|i| {
                let mut s = T::zero();
                for k in 1..=m {
                    s = s + split.inner[k as usize] * (lit::<T>(2.0) * at(i) - at(i + k) - at(i - k));
                }
                split.g_alpha * s
            })
            .collect()
    }

    /// Outer part `Λ_r^{(0)} u`, the full operator minus the inner stencil.
    pub fn apply_outer(&self, u: &[T], ext: &Exterior<'_, T>) -> Vec<T> {
        let full = self.apply(u, ext);
        let inner = self.apply_inner(u, ext);
        full.into_iter().zip(inner).map(|(a, b)| a - b).collect()
    }
}
