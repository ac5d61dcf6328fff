//! Special functions used by the stable law and the nonlocal operators.

use statrs::function::gamma::gamma;
use std::f64::consts::PI;

/// Lévy-Khintchine constant `G_alpha` of the operator whose Fourier symbol is
/// `|xi|^alpha` (xi in cycles): `Λ u(x) = G ∫ (u(x) - u(x+z) + ...) |z|^{-1-alpha} dz`.
/// Vanishes at `alpha = 2`, where the operator is local.
pub fn levy_constant(alpha: f64) -> f64 {
    if alpha >= 2.0 {
        return 0.0;
    }
    alpha * gamma((1.0 + alpha) / 2.0) / (2.0 * PI.powf(0.5 + alpha) * gamma(1.0 - alpha / 2.0))
}

/// Hurwitz zeta `sum_{j>=0} (a + j)^{-s}` for `s > 1`, `a > 0`, by Euler-Maclaurin.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    const N: usize = 9;
    // B_{2k} / (2k)!
    const B: [f64; 5] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
    ];
    let mut sum = 0.0;
    for j in 0..N {
        sum += (a + j as f64).powf(-s);
    }
    let b = a + N as f64;
    sum += b.powf(1.0 - s) / (s - 1.0) + 0.5 * b.powf(-s);
    // Rising factorial s (s+1) ... (s+2k-2) times b^{-s-2k+1}.
    let mut fac = s;
    let mut pw = b.powf(-s - 1.0);
    for (k, bk) in B.iter().enumerate() {
        let term = bk * fac * pw;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let m = 2.0 * k as f64;
        fac *= (s + m + 1.0) * (s + m + 2.0);
        pw /= b * b;
    }
    sum
}

/// Sum over the nonzero periodic images, `sum_{m != 0} |y + P m|^{-s}`, for `|y| <= P/2`.
pub fn image_sum(s: f64, y: f64, period: f64) -> f64 {
    let a = y / period;
    period.powf(-s) * (hurwitz_zeta(s, 1.0 + a) + hurwitz_zeta(s, 1.0 - a))
}

/// Odd image sum `sum_{m != 0} sign(y + P m) |y + P m|^{-s}`, for `|y| <= P/2`.
pub fn odd_image_sum(s: f64, y: f64, period: f64) -> f64 {
    let a = y / period;
    period.powf(-s) * (hurwitz_zeta(s, 1.0 + a) - hurwitz_zeta(s, 1.0 - a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn levy_constant_closed_forms() {
        assert_relative_eq!(levy_constant(1.0), 1.0 / (2.0 * PI * PI), max_relative = 1e-13);
        assert_relative_eq!(levy_constant(0.5), 1.0 / (4.0 * PI), max_relative = 1e-13);
        assert_eq!(levy_constant(2.0), 0.0);
    }

    #[test]
    fn hurwitz_matches_riemann_zeta() {
        assert_relative_eq!(hurwitz_zeta(2.0, 1.0), PI * PI / 6.0, max_relative = 1e-13);
        assert_relative_eq!(hurwitz_zeta(4.0, 1.0), PI.powi(4) / 90.0, max_relative = 1e-13);
        // zeta(s, 1/2) = (2^s - 1) zeta(s)
        assert_relative_eq!(hurwitz_zeta(2.0, 0.5), 3.0 * PI * PI / 6.0, max_relative = 1e-13);
    }

    #[test]
    fn image_sum_matches_brute_force() {
        let (s, y, p) = (1.7, 3.3, 20.0);
        let mut brute = 0.0;
        let mut odd = 0.0;
        for m in 1..2_000_000i64 {
            for sg in [-1.0, 1.0] {
                let z = y + sg * p * m as f64;
                brute += z.abs().powf(-s);
                odd += z.signum() * z.abs().powf(-s - 1.0);
            }
        }
        // Remainder of the truncated brute-force sum.
        brute += 2.0 * (p * 2.0e6).powf(1.0 - s) / (p * (s - 1.0));
        assert_relative_eq!(image_sum(s, y, p), brute, max_relative = 1e-9);
        assert_relative_eq!(odd_image_sum(s + 1.0, y, p), odd, max_relative = 1e-6);
    }
}
