//! Spectrally negative stable increments by the Chambers–Mallows–Stuck
//! method.
//!
//! `standard_increment` samples the totally skewed (`β = −1`) stable law
//! scaled so its Laplace transform is `E e^{θξ} = e^{θ^α}`; the process
//! increment over a step `dt` is then `dt^{1/α} · ξ`.

use rand::Rng;
use rand_distr::{Exp1, OpenClosed01};
use std::f64::consts::{FRAC_PI_2, PI};

/// Precomputed constants of the CMS sampler for fixed `α ∈ (1, 2)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StableSampler {
    alpha: f64,
    /// Weron's `B_{α,β}` angle for `β = −1`.
    shift: f64,
    /// Weron's `S_{α,β}` scale times the Laplace normalisation
    /// `|cos(πα/2)|^{1/α}`.
    scale: f64,
}

impl StableSampler {
    pub fn new(alpha: f64) -> Self {
        debug_assert!(alpha > 1.0 && alpha < 2.0);
        let beta = -1.0;
        let tan_half = (FRAC_PI_2 * alpha).tan();
        let shift = (beta * tan_half).atan() / alpha;
        let cms_scale = (1.0 + beta * beta * tan_half * tan_half).powf(0.5 / alpha);
        let laplace_norm = (FRAC_PI_2 * alpha).cos().abs().powf(1.0 / alpha);
        StableSampler {
            alpha,
            shift,
            scale: cms_scale * laplace_norm,
        }
    }

    /// One draw of `ξ` with `E e^{θξ} = e^{θ^α}` for `θ ≥ 0`.
    pub fn standard_increment<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(OpenClosed01);
        let angle = PI * (u - 0.5);
        let w: f64 = rng.sample(Exp1);
        let a = self.alpha * (angle + self.shift);
        self.scale * a.sin() / angle.cos().powf(1.0 / self.alpha)
            * ((angle - a).cos() / w).powf((1.0 - self.alpha) / self.alpha)
    }
}
