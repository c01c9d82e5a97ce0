//! Numerical inversion of Laplace transforms.
//!
//! Primary route: the fixed-Talbot contour (Abate–Valkó). When two Talbot
//! evaluations with different node counts disagree, the caller falls back
//! to an Euler-accelerated Fourier-series summation (Abate–Whitt) on a
//! vertical line.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Residual threshold above which Talbot output is considered unstable.
pub(crate) const TALBOT_RESIDUAL_TOL: f64 = 1e-9;

/// One fixed-Talbot evaluation of `f(t)` from `F`, using `m` nodes.
///
/// Valid when every singularity of `F` lies on or near the negative real
/// axis, which the tilted scale-function transforms guarantee.
pub(crate) fn talbot<F>(transform: F, t: f64, m: usize) -> f64
where
    F: Fn(Complex64) -> Complex64,
{
    debug_assert!(t > 0.0 && m >= 8);
    let r = 2.0 * m as f64 / (5.0 * t);
    let mut sum = 0.5 * (r * t).exp() * transform(Complex64::new(r, 0.0)).re;
    for k in 1..m {
        let theta = k as f64 * std::f64::consts::PI / m as f64;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let weight = Complex64::new(1.0, sigma);
        sum += ((s * t).exp() * transform(s) * weight).re;
    }
    sum * r / m as f64
}

/// Euler-accelerated Bromwich series (Abate–Whitt) for a transform whose
/// abscissa of convergence is at most 0.
pub(crate) fn euler<F>(transform: F, t: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    debug_assert!(t > 0.0);
    const A: f64 = 23.0;
    const N: usize = 44;
    const M: usize = 14;
    let scale = (0.5 * A).exp() / t;
    let mut partial = [0.0f64; M + 1];
    let mut acc = 0.5 * scale * transform(Complex64::new(A / (2.0 * t), 0.0)).re;
    let mut sign = -1.0;
    for k in 1..=N + M {
        let s = Complex64::new(A / (2.0 * t), k as f64 * std::f64::consts::PI / t);
        acc += sign * scale * transform(s).re;
        sign = -sign;
        if k >= N {
            partial[k - N] = acc;
        }
    }
    // Binomial (Euler) average of the last partial sums; shifting the
    // window by one must not move the result if the acceleration has
    // settled.
    let value = binomial_average(&partial);
    let shifted = binomial_average(&partial[1..]);
    if (value - shifted).abs() > 1e-6 * value.abs().max(1.0) {
        return Err(Error::Inversion(format!(
            "euler acceleration oscillating at t = {t} ({N}+{M} terms)"
        )));
    }
    Ok(value)
}

fn binomial_average(tail: &[f64]) -> f64 {
    let m = tail.len() - 1;
    let mut binom = 1.0f64;
    let mut value = 0.0;
    for (j, &p) in tail.iter().enumerate() {
        value += binom * p;
        binom = binom * (m - j) as f64 / (j + 1) as f64;
    }
    value / 2.0f64.powi(m as i32)
}
