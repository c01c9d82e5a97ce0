//! Direct Monte Carlo measurement of last-exit functionals.
//!
//! This is the ground-truth oracle for the closed-form transforms: paths
//! are simulated forward, the last exit times `T⁺(r)`, `T⁻(r)`, positions,
//! occupation times, and creeping events are read off each path, and the
//! requested functionals are averaged with standard errors.
//!
//! Path generation is exact (event-driven, closed-form segment algebra)
//! for the compound Poisson family. Families with a Gaussian or stable
//! component use an Euler scheme between exactly-placed jump epochs, which
//! carries an `O(√step)` discretisation bias in crossing detection.
//!
//! Reproducibility contract: estimates depend only on
//! `(master_seed, n, config)` — per-path seeds are derived by
//! counter-based splitting and aggregation runs over fixed chunks in a
//! fixed order, so results are bit-identical for any worker count.

mod rng;
pub(crate) mod stable;
mod tracker;

use rand::Rng;
use rand_distr::{Exp, StandardNormal};
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{Family, LevyModel};
use crate::scale::ScaleEvaluator;
use crate::transforms::TransformQuery;
use rng::{path_seed, path_stream};
use stable::StableSampler;
use tracker::ExitTracker;

/// How a path run terminates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    /// Run up to an independent `Exp(rate)` time.
    ExponentialRate(f64),
    /// Run until first passage above `level`; used for infinite-horizon
    /// `T⁺` functionals when the process drifts to `+∞`.
    TruncationAbove(f64),
    /// Run until first passage below `−level`; used for infinite-horizon
    /// `T⁻` functionals when the process drifts to `−∞`.
    TruncationBelow(f64),
}

/// Full specification of one simulated path.
#[derive(Debug, Clone, Copy)]
pub struct PathConfig {
    pub model: LevyModel,
    pub horizon: Horizon,
    /// Euler time step; consulted only when the family has a Gaussian or
    /// stable component.
    pub step: f64,
    /// Start position: the path is offset to `X_0 = x0`.
    pub x0: f64,
    /// Per-path deterministic stream seed.
    pub seed: u64,
}

/// Everything measured on one path.
///
/// `sup ∅ = 0`: when the path never visits the relevant half-line the
/// last exit time is 0 and the position there is the start position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathFunctionals {
    /// Sampled `e_r`, or the passage time in truncation mode.
    pub horizon: f64,
    /// `T⁺(r)`: last time in `[0, horizon]` strictly below 0.
    pub t_plus: f64,
    /// `T⁻(r)`: last time strictly above 0.
    pub t_minus: f64,
    pub x_at_t_plus: f64,
    pub x_at_t_minus: f64,
    /// `∫_0^{T⁺(r)} 1{X_s < 0} ds`.
    pub occ_neg_before_t_plus: f64,
    /// `∫_0^{T⁻(r)} 1{X_s > 0} ds`.
    pub occ_pos_before_t_minus: f64,
    pub event_plus_is_horizon: bool,
    pub event_minus_is_horizon: bool,
    /// The final down-crossing before the horizon was continuous,
    /// i.e. `X_{T⁻(r)} = 0`.
    pub crept_at_t_minus: bool,
    /// Occupation of the negative half-line over the whole run.
    pub occ_neg_total: f64,
    /// Occupation of the positive half-line over the whole run.
    pub occ_pos_total: f64,
}

/// Monte Carlo driver parameters; mirrors the scenario `mc` block.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub n: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub step: f64,
}

/// A Monte Carlo mean with its standard error and seed provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub master_seed: u64,
}

impl Estimate {
    /// Standardised distance of `reference` from the estimate.
    pub fn z_score(&self, reference: f64) -> f64 {
        if self.stderr == 0.0 {
            if (self.mean - reference).abs() == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - reference) / self.stderr
        }
    }
}

fn validate_config(config: &PathConfig) -> Result<()> {
    let m = &config.model;
    let needs_step = m.has_gaussian_component() || m.family() == Family::StableDrift;
    if needs_step && !(config.step > 0.0 && config.step.is_finite()) {
        return Err(Error::Precondition(format!(
            "family {:?} requires a positive Euler step",
            m.family()
        )));
    }
    if !config.x0.is_finite() {
        return Err(Error::Precondition("x0 must be finite".to_string()));
    }
    match config.horizon {
        Horizon::ExponentialRate(r) => {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Precondition(
                    "exponential horizon requires rate > 0".to_string(),
                ));
            }
        }
        Horizon::TruncationAbove(level) => {
            if !(level > 0.0 && level.is_finite()) {
                return Err(Error::Precondition(
                    "truncation level must be > 0".to_string(),
                ));
            }
            if m.psi_prime_at_zero() <= 0.0 {
                return Err(Error::ModelCondition("requires ψ'(0+)>0".to_string()));
            }
        }
        Horizon::TruncationBelow(level) => {
            if !(level > 0.0 && level.is_finite()) {
                return Err(Error::Precondition(
                    "truncation level must be > 0".to_string(),
                ));
            }
            if m.psi_prime_at_zero() >= 0.0 {
                return Err(Error::ModelCondition("requires ψ'(0+)<0".to_string()));
            }
        }
    }
    Ok(())
}

/// Simulate one path and read off its functionals.
pub fn sample_path(config: &PathConfig) -> Result<PathFunctionals> {
    validate_config(config)?;
    Ok(match config.model.family() {
        Family::CramerLundberg => sample_compound_poisson(config),
        Family::BrownianDrift | Family::PerturbedCramerLundberg => sample_diffusion(config),
        Family::StableDrift => sample_stable(config),
    })
}

/// Exact event-driven simulation: linear premium segments between
/// `Exp(a)`-spaced jumps of `Exp(ρ)` size.
fn sample_compound_poisson(config: &PathConfig) -> PathFunctionals {
    let m = &config.model;
    let mu = m.drift();
    let gap_dist = Exp::new(m.jump_rate()).expect("validated rate");
    let size_dist = Exp::new(m.jump_mean_inv()).expect("validated rate");
    let mut rng = path_stream(config.seed);
    let mut tr = ExitTracker::new(config.x0);
    match config.horizon {
        Horizon::ExponentialRate(r) => {
            let horizon: f64 = rng.sample(Exp::new(r).expect("validated rate"));
            loop {
                let gap: f64 = rng.sample(gap_dist);
                if tr.time() + gap >= horizon {
                    let dt = horizon - tr.time();
                    let x_end = tr.position() + mu * dt;
                    tr.advance_linear(dt, x_end);
                    break;
                }
                tr.advance_linear(gap, tr.position() + mu * gap);
                let jump: f64 = rng.sample(size_dist);
                tr.apply_jump(tr.position() - jump);
            }
        }
        Horizon::TruncationAbove(level) => {
            while tr.position() < level {
                let gap: f64 = rng.sample(gap_dist);
                let reach = tr.position() + mu * gap;
                if reach >= level {
                    let dt = (level - tr.position()) / mu;
                    tr.advance_linear(dt, level);
                    break;
                }
                tr.advance_linear(gap, reach);
                let jump: f64 = rng.sample(size_dist);
                tr.apply_jump(tr.position() - jump);
            }
        }
        Horizon::TruncationBelow(level) => {
            while tr.position() > -level {
                let gap: f64 = rng.sample(gap_dist);
                tr.advance_linear(gap, tr.position() + mu * gap);
                let jump: f64 = rng.sample(size_dist);
                tr.apply_jump(tr.position() - jump);
            }
        }
    }
    tr.finish()
}

/// Euler scheme for the Gaussian families; jump epochs (perturbed
/// Cramér–Lundberg) are placed exactly and only the diffusion between
/// them is discretised.
fn sample_diffusion(config: &PathConfig) -> PathFunctionals {
    let m = &config.model;
    // Sign convention of the linear term in ψ: downward for the pure
    // Brownian family, premium income for the perturbed risk model.
    let slope = match m.family() {
        Family::BrownianDrift => -m.drift(),
        _ => m.drift(),
    };
    let sigma = m.sigma();
    let has_jumps = m.jump_rate() > 0.0;
    let mut rng = path_stream(config.seed);
    let mut tr = ExitTracker::new(config.x0);
    let horizon_time = match config.horizon {
        Horizon::ExponentialRate(r) => rng.sample(Exp::new(r).expect("validated rate")),
        _ => f64::INFINITY,
    };
    let (stop_above, stop_below) = truncation_bounds(config.horizon);
    let gap_dist = has_jumps.then(|| Exp::new(m.jump_rate()).expect("validated rate"));
    let size_dist = has_jumps.then(|| Exp::new(m.jump_mean_inv()).expect("validated rate"));
    let mut next_jump = gap_dist.map_or(f64::INFINITY, |d| rng.sample(d));

    loop {
        let jump_next = next_jump < horizon_time;
        let seg_end = if jump_next { next_jump } else { horizon_time };
        loop {
            let remaining = seg_end - tr.time();
            if remaining <= 0.0 {
                break;
            }
            let dt = remaining.min(config.step);
            let z: f64 = rng.sample(StandardNormal);
            let x_end = tr.position() + slope * dt + sigma * dt.sqrt() * z;
            tr.advance_linear(dt, x_end);
            if tr.position() >= stop_above || tr.position() <= stop_below {
                return tr.finish();
            }
            if dt == remaining {
                break;
            }
        }
        if !jump_next {
            break;
        }
        let jump: f64 = rng.sample(size_dist.expect("jump family"));
        tr.apply_jump(tr.position() - jump);
        if tr.position() <= stop_below {
            break;
        }
        next_jump = tr.time() + rng.sample(gap_dist.expect("jump family"));
    }
    tr.finish()
}

/// Euler scheme with Chambers–Mallows–Stuck stable increments; the grid
/// marginals are exact, only path functionals between grid points are
/// approximate.
fn sample_stable(config: &PathConfig) -> PathFunctionals {
    let m = &config.model;
    let slope = -m.drift();
    let inv_alpha = 1.0 / m.alpha();
    let sampler = StableSampler::new(m.alpha());
    let mut rng = path_stream(config.seed);
    let mut tr = ExitTracker::new(config.x0);
    let horizon_time = match config.horizon {
        Horizon::ExponentialRate(r) => rng.sample(Exp::new(r).expect("validated rate")),
        _ => f64::INFINITY,
    };
    let (stop_above, stop_below) = truncation_bounds(config.horizon);
    loop {
        let remaining = horizon_time - tr.time();
        if remaining <= 0.0 {
            break;
        }
        let dt = remaining.min(config.step);
        let xi = sampler.standard_increment(&mut rng);
        let x_end = tr.position() + slope * dt + dt.powf(inv_alpha) * xi;
        tr.advance_linear(dt, x_end);
        if tr.position() >= stop_above || tr.position() <= stop_below {
            break;
        }
        if dt == remaining {
            break;
        }
    }
    tr.finish()
}

fn truncation_bounds(horizon: Horizon) -> (f64, f64) {
    match horizon {
        Horizon::ExponentialRate(_) => (f64::INFINITY, f64::NEG_INFINITY),
        Horizon::TruncationAbove(level) => (level, f64::NEG_INFINITY),
        Horizon::TruncationBelow(level) => (f64::INFINITY, -level),
    }
}

/// Chunk size of the deterministic parallel aggregation.
const CHUNK: u64 = 8192;

/// Run `n` paths and average `K` functionals of each; sums are
/// accumulated per fixed chunk and reduced in chunk order.
fn run_paths<const K: usize, F>(
    base: &PathConfig,
    mc: &McConfig,
    functionals: F,
) -> Result<[Estimate; K]>
where
    F: Fn(&PathFunctionals) -> [f64; K] + Sync,
{
    validate_config(base)?;
    if mc.n < 10_000 {
        return Err(Error::Precondition(
            "Monte Carlo estimates require n >= 10000".to_string(),
        ));
    }
    let n = mc.n;
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<[(f64, f64); K]> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(n);
            let mut acc = [(0.0f64, 0.0f64); K];
            for index in start..end {
                let config = PathConfig {
                    seed: path_seed(mc.master_seed, index),
                    ..*base
                };
                let pf = match config.model.family() {
                    Family::CramerLundberg => sample_compound_poisson(&config),
                    Family::BrownianDrift | Family::PerturbedCramerLundberg => {
                        sample_diffusion(&config)
                    }
                    Family::StableDrift => sample_stable(&config),
                };
                let values = functionals(&pf);
                for k in 0..K {
                    acc[k].0 += values[k];
                    acc[k].1 += values[k] * values[k];
                }
            }
            acc
        })
        .collect();
    let mut totals = [(0.0f64, 0.0f64); K];
    for partial in &partials {
        for k in 0..K {
            totals[k].0 += partial[k].0;
            totals[k].1 += partial[k].1;
        }
    }
    Ok(totals.map(|(sum, sumsq)| {
        let nf = n as f64;
        let mean = sum / nf;
        let var = ((sumsq - sum * sum / nf) / (nf - 1.0)).max(0.0);
        Estimate {
            mean,
            stderr: (var / nf).sqrt(),
            n,
            master_seed: mc.master_seed,
        }
    }))
}

fn exponential_base(model: &LevyModel, r: f64, x: f64, step: f64) -> PathConfig {
    PathConfig {
        model: *model,
        horizon: Horizon::ExponentialRate(r),
        step,
        x0: x,
        seed: 0,
    }
}

/// Estimates of the pair `(ω⁺₁, ω⁺₂)`: the discounted indicator of
/// `T⁺(r) < e_r` and the `θ`-tilted indicator of `T⁺(r) = e_r`.
pub fn estimate_omega_plus(
    model: &LevyModel,
    query: &TransformQuery,
    mc: &McConfig,
) -> Result<(Estimate, Estimate)> {
    let TransformQuery { p, q, r, theta, x } = *query;
    let base = exponential_base(model, r, x, mc.step);
    let [first, second] = run_paths(&base, mc, |pf| {
        let weight = (-p * pf.t_plus - q * pf.occ_neg_before_t_plus).exp();
        if pf.event_plus_is_horizon {
            [0.0, weight * (theta * pf.x_at_t_plus).exp()]
        } else {
            [weight, 0.0]
        }
    })?;
    Ok((first, second))
}

/// Estimates of the pair `(ω⁻₁, ω⁻₂)`; the horizon event carries the
/// exponent `−θ X`.
pub fn estimate_omega_minus(
    model: &LevyModel,
    query: &TransformQuery,
    mc: &McConfig,
) -> Result<(Estimate, Estimate)> {
    let TransformQuery { p, q, r, theta, x } = *query;
    let base = exponential_base(model, r, x, mc.step);
    let [first, second] = run_paths(&base, mc, |pf| {
        let weight = (-p * pf.t_minus - q * pf.occ_pos_before_t_minus).exp();
        if pf.event_minus_is_horizon {
            [0.0, weight * (-theta * pf.x_at_t_minus).exp()]
        } else {
            [weight * (theta * pf.x_at_t_minus).exp(), 0.0]
        }
    })?;
    Ok((first, second))
}

/// Estimate of the creeping transform: the discounted mass of the event
/// `{T⁻(r) < e_r, X_{T⁻(r)} = 0}`.
///
/// The position is exactly 0 either at a continuous down-crossing or when
/// `sup ∅ = 0` applies with start position 0, so the indicator tests the
/// recorded position rather than the crossing mechanism.
///
/// Without a Gaussian component the true value is 0 and the estimator
/// returns it without sampling.
pub fn estimate_creeping(
    model: &LevyModel,
    p: f64,
    q: f64,
    r: f64,
    mc: &McConfig,
    x: f64,
) -> Result<Estimate> {
    if !model.has_gaussian_component() {
        return Ok(Estimate {
            mean: 0.0,
            stderr: 0.0,
            n: mc.n,
            master_seed: mc.master_seed,
        });
    }
    let base = exponential_base(model, r, x, mc.step);
    let [estimate] = run_paths(&base, mc, |pf| {
        if !pf.event_minus_is_horizon && pf.x_at_t_minus == 0.0 {
            [(-p * pf.t_minus - q * pf.occ_pos_before_t_minus).exp()]
        } else {
            [0.0]
        }
    })?;
    Ok(estimate)
}

/// Estimate of `E_x e^{−p T⁺(r)}` over both horizon events.
pub fn estimate_laplace_t_plus(
    model: &LevyModel,
    p: f64,
    r: f64,
    mc: &McConfig,
    x: f64,
) -> Result<Estimate> {
    let base = exponential_base(model, r, x, mc.step);
    let [estimate] = run_paths(&base, mc, |pf| [(-p * pf.t_plus).exp()])?;
    Ok(estimate)
}

/// Level `B` with return probability `1 − ψ'(0+) W(B)` below `tol`;
/// paths stopped at `B` truncate the infinite-horizon functionals with a
/// bias of at most `tol`.
pub fn truncation_level(model: &LevyModel, tol: f64) -> Result<f64> {
    let psi0 = model.psi_prime_at_zero();
    if psi0 <= 0.0 {
        return Err(Error::ModelCondition("requires ψ'(0+)>0".to_string()));
    }
    let w0 = ScaleEvaluator::new(model, 0.0)?;
    let mut level = 1.0;
    for _ in 0..60 {
        if 1.0 - psi0 * w0.w(level)? < tol {
            return Ok(level);
        }
        level *= 2.0;
    }
    Err(Error::Convergence(
        "no truncation level with the requested return probability".to_string(),
    ))
}

/// Truncation bias accepted by the infinite-horizon estimators.
pub const TRUNCATION_TOL: f64 = 1e-4;

/// Estimate of `E_x e^{−p T⁺}` for `ψ'(0+) > 0`: simulate to first
/// passage above the truncation level and discount the last exit from
/// the negative half-line seen before it.
pub fn estimate_t_plus_infinite(
    model: &LevyModel,
    p: f64,
    mc: &McConfig,
    x: f64,
) -> Result<Estimate> {
    let level = truncation_level(model, TRUNCATION_TOL)?;
    let base = PathConfig {
        model: *model,
        horizon: Horizon::TruncationAbove(level),
        step: mc.step,
        x0: x,
        seed: 0,
    };
    let [estimate] = run_paths(&base, mc, |pf| [(-p * pf.t_plus).exp()])?;
    Ok(estimate)
}

/// Estimate of `E_x e^{−q ∫_0^∞ 1{X_s < 0} ds}` for `ψ'(0+) > 0`.
pub fn estimate_occupation_negative_infinite(
    model: &LevyModel,
    q: f64,
    mc: &McConfig,
    x: f64,
) -> Result<Estimate> {
    let level = truncation_level(model, TRUNCATION_TOL)?;
    let base = PathConfig {
        model: *model,
        horizon: Horizon::TruncationAbove(level),
        step: mc.step,
        x0: x,
        seed: 0,
    };
    let [estimate] = run_paths(&base, mc, |pf| [(-q * pf.occ_neg_total).exp()])?;
    Ok(estimate)
}

/// Estimate of `E_x e^{−q ∫_0^∞ 1{X_s > 0} ds}` for `ψ'(0+) < 0`; paths
/// stop once the return probability to 0, `e^{−Φ(0)·depth}`, is
/// negligible against Monte Carlo noise.
pub fn estimate_occupation_positive_infinite(
    model: &LevyModel,
    q: f64,
    mc: &McConfig,
    x: f64,
) -> Result<Estimate> {
    if model.psi_prime_at_zero() >= 0.0 {
        return Err(Error::ModelCondition("requires ψ'(0+)<0".to_string()));
    }
    let depth = (1e5f64).ln() / model.phi(0.0)?;
    let base = PathConfig {
        model: *model,
        horizon: Horizon::TruncationBelow(depth),
        step: mc.step,
        x0: x,
        seed: 0,
    };
    let [estimate] = run_paths(&base, mc, |pf| [(-q * pf.occ_pos_total).exp()])?;
    Ok(estimate)
}

/// Collect `X_{T⁻(r)}` over paths where the last exit precedes the
/// horizon, in path-index order. Exact-path families only.
pub fn collect_last_exit_positions(
    model: &LevyModel,
    r: f64,
    mc: &McConfig,
    x: f64,
) -> Result<Vec<f64>> {
    if model.family() != Family::CramerLundberg {
        return Err(Error::Precondition(
            "last-exit position collection requires the event-driven CramerLundberg sampler"
                .to_string(),
        ));
    }
    let base = exponential_base(model, r, x, mc.step);
    validate_config(&base)?;
    let n = mc.n;
    let chunks = n.div_ceil(CHUNK);
    let per_chunk: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(n);
            let mut values = Vec::with_capacity((end - start) as usize);
            for index in start..end {
                let config = PathConfig {
                    seed: path_seed(mc.master_seed, index),
                    ..base
                };
                let pf = sample_compound_poisson(&config);
                if !pf.event_minus_is_horizon {
                    values.push(pf.x_at_t_minus);
                }
            }
            values
        })
        .collect();
    Ok(per_chunk.concat())
}
