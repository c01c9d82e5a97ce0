//! Parametric families of spectrally negative Lévy processes.
//!
//! A [`LevyModel`] is the single source of truth for the Laplace exponent
//! `ψ` (defined by `E e^{λ X_t} = e^{t ψ(λ)}`), its derivative, and the
//! right inverse `Φ` (the largest nonnegative root of `ψ(λ) = u`).
//! All four families below have no positive jumps, so `ψ` is finite and
//! convex on `[0, ∞)` with `ψ(0) = 0`:
//!
//! | family                   | `ψ(λ)`                          |
//! |--------------------------|---------------------------------|
//! | `BrownianDrift`          | `−μλ + σ²λ²/2`                  |
//! | `CramerLundberg`         | `μλ − aλ/(ρ+λ)`                 |
//! | `PerturbedCramerLundberg`| `μλ + σ²λ²/2 − aλ/(ρ+λ)`        |
//! | `StableDrift`            | `−μλ + λ^α`, `α ∈ (1,2)`        |
//!
//! Here `μ = drift`, `σ = sigma`, `a = jump_rate` (Poisson arrival rate of
//! exponential claims), `ρ = jump_mean_inv` (rate of the claim size).

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};

/// Largest argument accepted by the stable exponent; `λ^α` above this is
/// outside the range any in-scope formula needs.
const STABLE_LAMBDA_MAX: f64 = 1e8;

/// Threshold on `|Φ(u) − v|` below which ratios of the form
/// `(u − ψ(v)) / (Φ(u) − v)` are replaced by their analytic limit
/// `ψ'(Φ(u))`.
pub(crate) const SINGULARITY_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Family {
    BrownianDrift,
    CramerLundberg,
    PerturbedCramerLundberg,
    StableDrift,
}

/// A spectrally negative Lévy model, validated at construction.
///
/// Deserializes from the scenario file format with the exact field names
/// `family`, `drift`, `sigma`, `jump_rate`, `jump_mean_inv`, `alpha`;
/// unused fields default to zero.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct LevyModel {
    family: Family,
    drift: f64,
    sigma: f64,
    jump_rate: f64,
    jump_mean_inv: f64,
    alpha: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    family: Family,
    #[serde(default)]
    drift: f64,
    #[serde(default)]
    sigma: f64,
    #[serde(default)]
    jump_rate: f64,
    #[serde(default)]
    jump_mean_inv: f64,
    #[serde(default)]
    alpha: f64,
}

impl TryFrom<RawModel> for LevyModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<LevyModel> {
        LevyModel::new(
            raw.family,
            raw.drift,
            raw.sigma,
            raw.jump_rate,
            raw.jump_mean_inv,
            raw.alpha,
        )
    }
}

impl LevyModel {
    /// Validating constructor; prefer the per-family shorthands below.
    pub fn new(
        family: Family,
        drift: f64,
        sigma: f64,
        jump_rate: f64,
        jump_mean_inv: f64,
        alpha: f64,
    ) -> Result<Self> {
        let m = LevyModel {
            family,
            drift,
            sigma,
            jump_rate,
            jump_mean_inv,
            alpha,
        };
        m.validate()?;
        Ok(m)
    }

    /// `X_t = −μ t + σ B_t` with `μ > 0`.
    pub fn brownian_drift(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(Family::BrownianDrift, mu, sigma, 0.0, 0.0, 0.0)
    }

    /// Compound Poisson claims of rate `a`, `Exp(ρ)` sizes, premium drift `μ`.
    pub fn cramer_lundberg(mu: f64, a: f64, rho: f64) -> Result<Self> {
        Self::new(Family::CramerLundberg, mu, 0.0, a, rho, 0.0)
    }

    /// Cramér–Lundberg claims plus an independent Brownian perturbation.
    pub fn perturbed_cramer_lundberg(mu: f64, sigma: f64, a: f64, rho: f64) -> Result<Self> {
        Self::new(Family::PerturbedCramerLundberg, mu, sigma, a, rho, 0.0)
    }

    /// Spectrally negative `α`-stable process minus drift `μ t`, `α ∈ (1,2)`.
    pub fn stable_drift(mu: f64, alpha: f64) -> Result<Self> {
        Self::new(Family::StableDrift, mu, 0.0, 0.0, 0.0, alpha)
    }

    fn validate(&self) -> Result<()> {
        let err = |msg: &str| Err(Error::InvalidModel(msg.to_string()));
        for (name, v) in [
            ("drift", self.drift),
            ("sigma", self.sigma),
            ("jump_rate", self.jump_rate),
            ("jump_mean_inv", self.jump_mean_inv),
            ("alpha", self.alpha),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidModel(format!("{name} must be finite")));
            }
        }
        match self.family {
            Family::BrownianDrift => {
                if self.drift <= 0.0 {
                    return err("BrownianDrift requires drift > 0");
                }
                if self.sigma <= 0.0 {
                    return err("BrownianDrift requires sigma > 0");
                }
                if self.jump_rate != 0.0 {
                    return err("BrownianDrift requires jump_rate = 0");
                }
            }
            Family::CramerLundberg => {
                if self.drift <= 0.0 {
                    return err("CramerLundberg requires drift > 0");
                }
                if self.sigma != 0.0 {
                    return err("CramerLundberg requires sigma = 0");
                }
                if self.jump_rate <= 0.0 {
                    return err("CramerLundberg requires jump_rate > 0");
                }
                if self.jump_mean_inv <= 0.0 {
                    return err("CramerLundberg requires jump_mean_inv > 0");
                }
            }
            Family::PerturbedCramerLundberg => {
                if self.sigma <= 0.0 {
                    return err("PerturbedCramerLundberg requires sigma > 0");
                }
                if self.jump_rate <= 0.0 {
                    return err("PerturbedCramerLundberg requires jump_rate > 0");
                }
                if self.jump_mean_inv <= 0.0 {
                    return err("PerturbedCramerLundberg requires jump_mean_inv > 0");
                }
            }
            Family::StableDrift => {
                if self.drift <= 0.0 {
                    return err("StableDrift requires drift > 0");
                }
                if self.sigma != 0.0 {
                    return err("StableDrift requires sigma = 0");
                }
                if self.jump_rate != 0.0 {
                    return err("StableDrift requires jump_rate = 0");
                }
                if !(self.alpha > 1.0 && self.alpha < 2.0) {
                    return err("StableDrift requires alpha in (1, 2)");
                }
            }
        }
        // ψ'(0+) = 0 makes Φ'(0) degenerate; every limit formula in scope
        // assumes a strict sign.
        if self.psi_prime_at_zero() == 0.0 {
            return err("ψ'(0+) must be nonzero (drift exactly balances jumps)");
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn jump_rate(&self) -> f64 {
        self.jump_rate
    }

    pub fn jump_mean_inv(&self) -> f64 {
        self.jump_mean_inv
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `ψ'(0+)`, the mean displacement per unit time.
    pub fn psi_prime_at_zero(&self) -> f64 {
        match self.family {
            Family::BrownianDrift | Family::StableDrift => -self.drift,
            Family::CramerLundberg | Family::PerturbedCramerLundberg => {
                self.drift - self.jump_rate / self.jump_mean_inv
            }
        }
    }

    /// Bounded-variation paths (no Gaussian part, finite jump activity).
    pub fn is_bounded_variation(&self) -> bool {
        self.family == Family::CramerLundberg
    }

    pub fn has_gaussian_component(&self) -> bool {
        self.sigma > 0.0
    }

    /// The Laplace exponent `ψ(λ)` for real `λ ≥ 0`.
    pub fn psi(&self, lambda: f64) -> Result<f64> {
        if lambda.is_nan() || lambda < 0.0 {
            return Err(Error::Domain(format!(
                "psi requires lambda >= 0, got {lambda}"
            )));
        }
        if self.family == Family::StableDrift && lambda > STABLE_LAMBDA_MAX {
            return Err(Error::Domain(format!(
                "psi for StableDrift requires lambda <= {STABLE_LAMBDA_MAX:e}, got {lambda}"
            )));
        }
        Ok(self.psi_unchecked(lambda))
    }

    fn psi_unchecked(&self, lambda: f64) -> f64 {
        let mu = self.drift;
        match self.family {
            Family::BrownianDrift => -mu * lambda + 0.5 * self.sigma * self.sigma * lambda * lambda,
            Family::CramerLundberg => {
                mu * lambda - self.jump_rate * lambda / (self.jump_mean_inv + lambda)
            }
            Family::PerturbedCramerLundberg => {
                mu * lambda + 0.5 * self.sigma * self.sigma * lambda * lambda
                    - self.jump_rate * lambda / (self.jump_mean_inv + lambda)
            }
            Family::StableDrift => -mu * lambda + lambda.powf(self.alpha),
        }
    }

    /// Analytic derivative `ψ'(λ)`; strictly increasing in `λ`.
    pub fn psi_prime(&self, lambda: f64) -> Result<f64> {
        if lambda.is_nan() || lambda < 0.0 {
            return Err(Error::Domain(format!(
                "psi_prime requires lambda >= 0, got {lambda}"
            )));
        }
        if self.family == Family::StableDrift && lambda > STABLE_LAMBDA_MAX {
            return Err(Error::Domain(format!(
                "psi_prime for StableDrift requires lambda <= {STABLE_LAMBDA_MAX:e}, got {lambda}"
            )));
        }
        Ok(self.psi_prime_unchecked(lambda))
    }

    fn psi_prime_unchecked(&self, lambda: f64) -> f64 {
        let mu = self.drift;
        match self.family {
            Family::BrownianDrift => -mu + self.sigma * self.sigma * lambda,
            Family::CramerLundberg => {
                let d = self.jump_mean_inv + lambda;
                mu - self.jump_rate * self.jump_mean_inv / (d * d)
            }
            Family::PerturbedCramerLundberg => {
                let d = self.jump_mean_inv + lambda;
                mu + self.sigma * self.sigma * lambda
                    - self.jump_rate * self.jump_mean_inv / (d * d)
            }
            Family::StableDrift => {
                // ψ'(0+) = −μ for α > 1.
                if lambda == 0.0 {
                    -mu
                } else {
                    -mu + self.alpha * lambda.powf(self.alpha - 1.0)
                }
            }
        }
    }

    /// `ψ` continued to the cut complex plane, used by the Bromwich
    /// inversion of scale functions.
    pub(crate) fn psi_complex(&self, s: Complex64) -> Complex64 {
        let mu = self.drift;
        match self.family {
            Family::BrownianDrift => -mu * s + 0.5 * self.sigma * self.sigma * s * s,
            Family::CramerLundberg => mu * s - self.jump_rate * s / (self.jump_mean_inv + s),
            Family::PerturbedCramerLundberg => {
                mu * s + 0.5 * self.sigma * self.sigma * s * s
                    - self.jump_rate * s / (self.jump_mean_inv + s)
            }
            Family::StableDrift => -mu * s + (self.alpha * s.ln()).exp(),
        }
    }

    /// The right inverse `Φ(u)`: the largest root of `ψ(λ) = u`.
    ///
    /// Bracketed bisection followed by a Newton polish; `ψ(Φ(u)) = u`
    /// holds to `1e−12` relative on success.
    pub fn phi(&self, u: f64) -> Result<f64> {
        if u.is_nan() || u < 0.0 {
            return Err(Error::Domain(format!("phi requires u >= 0, got {u}")));
        }
        let psi0 = self.psi_prime_at_zero();
        if u == 0.0 && psi0 > 0.0 {
            return Ok(0.0);
        }
        // Start the bracket past the convexity dip so the target root is
        // the strictly positive one.
        let mut lo = if psi0 < 0.0 { self.psi_argmin()? } else { 0.0 };
        let mut hi = if lo > 0.0 { 2.0 * lo } else { 1.0 };
        let mut grow = 0;
        while self.psi_unchecked(hi) <= u {
            hi *= 2.0;
            grow += 1;
            if grow > 200 || (self.family == Family::StableDrift && hi > STABLE_LAMBDA_MAX) {
                return Err(Error::Convergence(format!(
                    "phi bracket expansion failed for u = {u}"
                )));
            }
        }
        // Bisect to 1e−8, then polish with Newton (safe: ψ is convex and
        // increasing on the bracket).
        for _ in 0..200 {
            if hi - lo <= 1e-8 * hi.max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.psi_unchecked(mid) <= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..60 {
            let f = self.psi_unchecked(x) - u;
            if f.abs() <= 1e-14 * u.abs().max(1.0) {
                return Ok(x);
            }
            let d = self.psi_prime_unchecked(x);
            if d <= 0.0 {
                break;
            }
            let mut next = x - f / d;
            if next <= lo || next >= hi * (1.0 + 1e-9) {
                next = if f > 0.0 { 0.5 * (lo + x) } else { 0.5 * (x + hi) };
            }
            if (next - x).abs() <= f64::EPSILON * x.abs() {
                x = next;
                break;
            }
            x = next;
        }
        let resid = (self.psi_unchecked(x) - u).abs();
        if resid <= 1e-12 * u.abs().max(1.0) {
            Ok(x)
        } else {
            Err(Error::Convergence(format!(
                "phi({u}) residual {resid:e} exceeds tolerance"
            )))
        }
    }

    /// `Φ'(u) = 1 / ψ'(Φ(u))`.
    pub fn phi_prime(&self, u: f64) -> Result<f64> {
        let p = self.phi(u)?;
        let d = self.psi_prime_unchecked(p);
        if d <= 0.0 {
            return Err(Error::Domain(format!(
                "phi_prime singular: ψ'(Φ({u})) = {d}"
            )));
        }
        Ok(1.0 / d)
    }

    /// Argmin of `ψ` on `[0, ∞)`, i.e. the root of `ψ'(λ) = 0`.
    /// Only meaningful when `ψ'(0+) < 0`.
    fn psi_argmin(&self) -> Result<f64> {
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut grow = 0;
        while self.psi_prime_unchecked(hi) <= 0.0 {
            hi *= 2.0;
            grow += 1;
            if grow > 200 {
                return Err(Error::Convergence(
                    "ψ' has no positive root within range".to_string(),
                ));
            }
        }
        for _ in 0..200 {
            if hi - lo <= 1e-12 * hi.max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.psi_prime_unchecked(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
