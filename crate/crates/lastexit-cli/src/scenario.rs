//! Scenario files: a JSON description of a model, a list of transform
//! queries, the operations to apply, and optional Monte Carlo / sweep
//! blocks. Unknown keys are rejected so a typo cannot silently change a
//! run.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use lastexit::simulate::McConfig;
use lastexit::{Family, LevyModel, TransformQuery};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: LevyModel,
    pub queries: Vec<TransformQuery>,
    #[serde(default)]
    pub mc: Option<McConfig>,
    pub outputs: Vec<String>,
    #[serde(default)]
    pub sweep: Option<SweepBlock>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    P,
    Q,
    R,
    Theta,
    X,
}

impl SweepBlock {
    pub fn grid(&self) -> Vec<f64> {
        if self.points <= 1 {
            return vec![self.from];
        }
        (0..self.points)
            .map(|i| self.from + (self.to - self.from) * i as f64 / (self.points - 1) as f64)
            .collect()
    }

    pub fn apply(&self, base: &TransformQuery, value: f64) -> TransformQuery {
        let mut q = *base;
        match self.param {
            SweepParam::P => q.p = value,
            SweepParam::Q => q.q = value,
            SweepParam::R => q.r = value,
            SweepParam::Theta => q.theta = value,
            SweepParam::X => q.x = value,
        }
        q
    }
}

/// The operations a scenario can request, by their scenario-file names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operation {
    OmegaPlus1,
    OmegaPlus2,
    OmegaMinus1,
    OmegaMinus2,
    CreepingTransform,
    LaplaceTPlus,
    LaplaceTPlusInfiniteHorizon,
    OccupationTransformNegative,
    JointTMinusInfiniteHorizon,
    ValueAtLastExitTransform,
    OccupationTransformPositive,
    LastExitDensityCompoundPoisson,
}

pub const ALL_OPERATIONS: [(&str, Operation); 12] = [
    ("omega_plus_1", Operation::OmegaPlus1),
    ("omega_plus_2", Operation::OmegaPlus2),
    ("omega_minus_1", Operation::OmegaMinus1),
    ("omega_minus_2", Operation::OmegaMinus2),
    ("creeping_transform", Operation::CreepingTransform),
    ("laplace_t_plus", Operation::LaplaceTPlus),
    (
        "laplace_t_plus_infinite_horizon",
        Operation::LaplaceTPlusInfiniteHorizon,
    ),
    (
        "occupation_transform_negative",
        Operation::OccupationTransformNegative,
    ),
    (
        "joint_t_minus_infinite_horizon",
        Operation::JointTMinusInfiniteHorizon,
    ),
    (
        "value_at_last_exit_transform",
        Operation::ValueAtLastExitTransform,
    ),
    (
        "occupation_transform_positive",
        Operation::OccupationTransformPositive,
    ),
    (
        "last_exit_density_compound_poisson",
        Operation::LastExitDensityCompoundPoisson,
    ),
];

impl Operation {
    pub fn name(&self) -> &'static str {
        ALL_OPERATIONS
            .iter()
            .find(|(_, op)| op == self)
            .map(|(name, _)| *name)
            .expect("every operation is registered")
    }
}

impl FromStr for Operation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_OPERATIONS
            .iter()
            .find(|(name, _)| *name == s)
            .map(|(_, op)| *op)
            .ok_or_else(|| format!("unknown operation '{s}'"))
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Check the preconditions of `op` for `query` without evaluating
/// anything; the message names the violated condition.
pub fn check_preconditions(
    op: Operation,
    model: &LevyModel,
    query: &TransformQuery,
) -> Result<(), String> {
    for (name, v) in [
        ("p", query.p),
        ("q", query.q),
        ("r", query.r),
        ("theta", query.theta),
    ] {
        if !v.is_finite() || v < 0.0 {
            return Err(format!("{op} requires {name} >= 0"));
        }
    }
    if !query.x.is_finite() {
        return Err(format!("{op} requires finite x"));
    }
    let positive_mean = model.psi_prime_at_zero() > 0.0;
    match op {
        Operation::OmegaPlus1
        | Operation::OmegaPlus2
        | Operation::OmegaMinus1
        | Operation::OmegaMinus2
        | Operation::LaplaceTPlus => {
            if query.r <= 0.0 {
                return Err(format!("{op} requires r > 0"));
            }
        }
        Operation::CreepingTransform => {}
        Operation::LaplaceTPlusInfiniteHorizon => {
            if !positive_mean {
                return Err(format!("{op} requires ψ'(0+)>0"));
            }
        }
        Operation::OccupationTransformNegative => {
            if query.q <= 0.0 {
                return Err(format!("{op} requires q > 0"));
            }
            if !positive_mean {
                return Err(format!("{op} requires ψ'(0+)>0"));
            }
        }
        Operation::JointTMinusInfiniteHorizon | Operation::ValueAtLastExitTransform => {
            if positive_mean {
                return Err(format!("{op} requires ψ'(0+)<0"));
            }
        }
        Operation::OccupationTransformPositive => {
            if query.q <= 0.0 {
                return Err(format!("{op} requires q > 0"));
            }
            if positive_mean {
                return Err(format!("{op} requires ψ'(0+)<0"));
            }
        }
        Operation::LastExitDensityCompoundPoisson => {
            if model.family() != Family::CramerLundberg {
                return Err(format!("{op} requires the CramerLundberg family"));
            }
            if positive_mean {
                return Err(format!("{op} requires ψ'(0+)<0 (μ − a/ρ < 0)"));
            }
            if query.x >= 0.0 {
                return Err(format!("{op} requires x < 0"));
            }
        }
    }
    Ok(())
}

/// Parse and semantically check a scenario: named operations must exist
/// and every (operation, query) pair must satisfy its preconditions.
pub fn resolve_operations(scenario: &Scenario) -> Result<Vec<Operation>, String> {
    if scenario.outputs.is_empty() {
        return Err("scenario lists no outputs".to_string());
    }
    if scenario.queries.is_empty() {
        return Err("scenario lists no queries".to_string());
    }
    let mut ops = Vec::with_capacity(scenario.outputs.len());
    for name in &scenario.outputs {
        ops.push(name.parse::<Operation>()?);
    }
    for op in &ops {
        for query in &scenario.queries {
            check_preconditions(*op, &scenario.model, query)?;
        }
    }
    Ok(ops)
}
