//! Scenario-driven front end: evaluate transforms to CSV, validate them
//! against the Monte Carlo simulator, or sweep a parameter grid.
//!
//! Exit codes: 0 success, 2 scenario parse error, 3 precondition
//! violation, 4 validation failure.

mod scenario;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lastexit::scale::{ScaleEvaluator, ScaleMethod};
use lastexit::simulate::{
    estimate_creeping, estimate_laplace_t_plus, estimate_occupation_negative_infinite,
    estimate_occupation_positive_infinite, estimate_omega_minus, estimate_omega_plus,
    estimate_t_plus_infinite, Estimate, McConfig,
};
use lastexit::transforms::{
    creeping_transform, joint_t_minus_infinite_horizon, laplace_t_plus,
    laplace_t_plus_infinite_horizon, last_exit_density_compound_poisson,
    occupation_transform_negative, occupation_transform_positive, omega_minus_1, omega_minus_2,
    omega_plus_1, omega_plus_2, value_at_last_exit_transform,
};
use lastexit::{Family, LevyModel, TransformQuery};
use scenario::{resolve_operations, Operation, Scenario};

#[derive(Parser)]
#[command(
    name = "lastexit",
    version,
    about = "Last-exit transforms of spectrally negative Lévy processes",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario file (JSON).
    scenario: PathBuf,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for Monte Carlo runs.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every requested operation on every query, one CSV row each.
    Eval(CommonArgs),
    /// Compare analytic values against Monte Carlo estimates and run the
    /// analytic identity suite.
    Validate(CommonArgs),
    /// Evaluate the requested operations over a dense parameter grid.
    Sweep(CommonArgs),
}

enum CliError {
    /// Exit 2: the scenario could not be read or parsed.
    Parse(String),
    /// Exit 3: a stated precondition is violated.
    Precondition(String),
    /// Exit 4: a validation comparison failed.
    Validation(String),
}

impl From<lastexit::Error> for CliError {
    fn from(err: lastexit::Error) -> Self {
        CliError::Precondition(err.to_string())
    }
}

type CommandFn = fn(&Scenario) -> Result<String, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&CommonArgs, CommandFn) = match &cli.command {
        Command::Eval(args) => (args, cmd_eval),
        Command::Validate(args) => (args, cmd_validate),
        Command::Sweep(args) => (args, cmd_sweep),
    };
    match execute(args, run) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Precondition(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}

fn execute(args: &CommonArgs, run: CommandFn) -> Result<(), CliError> {
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Precondition(format!("thread pool: {e}")))?;
    }
    let text = std::fs::read_to_string(&args.scenario)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.scenario.display())))?;
    let scenario: Scenario =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("scenario: {e}")))?;
    let output = run(&scenario)?;
    match &args.out {
        Some(path) => std::fs::write(path, output)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display()))),
        None => {
            print!("{output}");
            Ok(())
        }
    }
}

/// Full-precision float formatting (17 significant digits) so CSV output
/// can serve as a regression fixture.
fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn evaluate(op: Operation, model: &LevyModel, query: &TransformQuery) -> lastexit::Result<f64> {
    match op {
        Operation::OmegaPlus1 => omega_plus_1(model, query),
        Operation::OmegaPlus2 => omega_plus_2(model, query),
        Operation::OmegaMinus1 => omega_minus_1(model, query),
        Operation::OmegaMinus2 => omega_minus_2(model, query),
        Operation::CreepingTransform => {
            creeping_transform(model, query.p, query.q, query.r, query.x)
        }
        Operation::LaplaceTPlus => laplace_t_plus(model, query.p, query.r, query.x),
        Operation::LaplaceTPlusInfiniteHorizon => {
            laplace_t_plus_infinite_horizon(model, query.p, query.x)
        }
        Operation::OccupationTransformNegative => {
            occupation_transform_negative(model, query.q, query.x)
        }
        Operation::JointTMinusInfiniteHorizon => {
            joint_t_minus_infinite_horizon(model, query.p, query.q, query.theta, query.x)
        }
        Operation::ValueAtLastExitTransform => {
            value_at_last_exit_transform(model, query.theta, query.x)
        }
        Operation::OccupationTransformPositive => {
            occupation_transform_positive(model, query.q, query.x)
        }
        Operation::LastExitDensityCompoundPoisson => last_exit_density_compound_poisson(
            model.jump_rate(),
            model.jump_mean_inv(),
            model.drift(),
            query.x,
        ),
    }
}

const CSV_HEADER: &str = "operation,p,q,r,theta,x,value\n";

fn csv_row(out: &mut String, op: Operation, query: &TransformQuery, value: f64) {
    let _ = writeln!(
        out,
        "{op},{},{},{},{},{},{}",
        fmt_value(query.p),
        fmt_value(query.q),
        fmt_value(query.r),
        fmt_value(query.theta),
        fmt_value(query.x),
        fmt_value(value)
    );
}

fn cmd_eval(scenario: &Scenario) -> Result<String, CliError> {
    let ops = resolve_operations(scenario).map_err(CliError::Precondition)?;
    let mut out = String::from(CSV_HEADER);
    for op in &ops {
        for query in &scenario.queries {
            let value = evaluate(*op, &scenario.model, query)?;
            csv_row(&mut out, *op, query, value);
        }
    }
    Ok(out)
}

fn cmd_sweep(scenario: &Scenario) -> Result<String, CliError> {
    let ops = resolve_operations(scenario).map_err(CliError::Precondition)?;
    let sweep = scenario
        .sweep
        .ok_or_else(|| CliError::Precondition("sweep requires a sweep block".to_string()))?;
    if sweep.points == 0 {
        return Err(CliError::Precondition(
            "sweep requires points >= 1".to_string(),
        ));
    }
    // Validate the whole grid before evaluating anything.
    let grid = sweep.grid();
    for op in &ops {
        for base in &scenario.queries {
            for &value in &grid {
                let query = sweep.apply(base, value);
                scenario::check_preconditions(*op, &scenario.model, &query)
                    .map_err(CliError::Precondition)?;
            }
        }
    }
    let mut out = String::from(CSV_HEADER);
    for op in &ops {
        for base in &scenario.queries {
            for &value in &grid {
                let query = sweep.apply(base, value);
                let result = evaluate(*op, &scenario.model, &query)?;
                csv_row(&mut out, *op, &query, result);
            }
        }
    }
    Ok(out)
}

/// Monte Carlo counterpart of an operation, when one exists.
fn mc_estimate(
    op: Operation,
    model: &LevyModel,
    query: &TransformQuery,
    mc: &McConfig,
) -> Result<Estimate, CliError> {
    Ok(match op {
        Operation::OmegaPlus1 => estimate_omega_plus(model, query, mc)?.0,
        Operation::OmegaPlus2 => estimate_omega_plus(model, query, mc)?.1,
        Operation::OmegaMinus1 => estimate_omega_minus(model, query, mc)?.0,
        Operation::OmegaMinus2 => estimate_omega_minus(model, query, mc)?.1,
        Operation::CreepingTransform => {
            estimate_creeping(model, query.p, query.q, query.r, mc, query.x)?
        }
        Operation::LaplaceTPlus => estimate_laplace_t_plus(model, query.p, query.r, mc, query.x)?,
        Operation::LaplaceTPlusInfiniteHorizon => {
            estimate_t_plus_infinite(model, query.p, mc, query.x)?
        }
        Operation::OccupationTransformNegative => {
            estimate_occupation_negative_infinite(model, query.q, mc, query.x)?
        }
        Operation::OccupationTransformPositive => {
            estimate_occupation_positive_infinite(model, query.q, mc, query.x)?
        }
        other => {
            return Err(CliError::Precondition(format!(
                "operation {other} has no Monte Carlo validator"
            )))
        }
    })
}

struct IdentityCheck {
    name: &'static str,
    worst: f64,
    tolerance: f64,
}

impl IdentityCheck {
    fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

/// Pure analytic identities for the scenario's model: ψ/Φ round trip,
/// the tilted-Z reduction at Φ(q), closed form versus inversion (where a
/// closed form exists), the defining Laplace transform of W, and the
/// exact downward pair sum at the origin.
fn identity_suite(scenario: &Scenario) -> lastexit::Result<Vec<IdentityCheck>> {
    let model = &scenario.model;
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for k in 0..=30 {
        let u = 10f64.powf(-6.0 + 9.0 * k as f64 / 30.0);
        let back = model.psi(model.phi(u)?)?;
        worst = worst.max((back - u).abs() / u.max(1.0));
    }
    checks.push(IdentityCheck {
        name: "psi_phi_round_trip",
        worst,
        tolerance: 1e-10,
    });

    let mut worst = 0.0f64;
    for q in [0.3, 1.0] {
        let ev = ScaleEvaluator::new(model, q)?;
        for x in [0.5, 2.0] {
            let expect = (ev.phi_q() * x).exp();
            worst = worst.max((ev.z2(x, ev.phi_q())? - expect).abs() / expect);
        }
    }
    checks.push(IdentityCheck {
        name: "tilted_z_at_phi",
        worst,
        tolerance: 1e-10,
    });

    if matches!(
        model.family(),
        Family::BrownianDrift | Family::CramerLundberg
    ) {
        let mut worst = 0.0f64;
        for q in [0.0, 0.5, 2.0] {
            let exact = ScaleEvaluator::new(model, q)?;
            let inverted =
                ScaleEvaluator::with_method(model, q, ScaleMethod::BromwichInversion, 32)?;
            for k in 0..=5 {
                let x = 0.1 + k as f64;
                worst =
                    worst.max((exact.w(x)? - inverted.w(x)?).abs() / exact.w(x)?.abs().max(1.0));
            }
        }
        checks.push(IdentityCheck {
            name: "closed_form_vs_inversion",
            worst,
            tolerance: 1e-7,
        });

        let mut worst = 0.0f64;
        for q in [0.0, 1.0] {
            let ev = ScaleEvaluator::new(model, q)?;
            let lambda = ev.phi_q() + 1.0;
            let expect = 1.0 / (model.psi(lambda)? - q);
            worst = worst.max((ev.laplace_transform_check(lambda)? - expect).abs() / expect);
        }
        checks.push(IdentityCheck {
            name: "w_laplace_transform",
            worst,
            tolerance: 1e-6,
        });
    }

    let mut worst = 0.0f64;
    let mut any = false;
    for query in &scenario.queries {
        if query.q > 0.0 && query.r > 0.0 {
            any = true;
            let q_ = TransformQuery::new(0.0, query.q, query.r, 0.0, 0.0);
            let sum = omega_minus_1(model, &q_)? + omega_minus_2(model, &q_)?;
            let expect = model.phi(query.r)? / model.phi(query.q + query.r)?;
            worst = worst.max((sum - expect).abs());
        }
    }
    if any {
        checks.push(IdentityCheck {
            name: "minus_pair_sum_at_origin",
            worst,
            tolerance: 1e-9,
        });
    }
    Ok(checks)
}

fn cmd_validate(scenario: &Scenario) -> Result<String, CliError> {
    let ops = resolve_operations(scenario).map_err(CliError::Precondition)?;
    let mc = scenario
        .mc
        .ok_or_else(|| CliError::Precondition("validate requires an mc block".to_string()))?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "validation run: n={} master_seed={} step={}",
        mc.n,
        mc.master_seed,
        fmt_value(mc.step)
    );
    let mut all_ok = true;

    for check in identity_suite(scenario).map_err(CliError::from)? {
        let ok = check.passed();
        all_ok &= ok;
        let _ = writeln!(
            out,
            "identity {}: worst={:.3e} tol={:.0e} {}",
            check.name,
            check.worst,
            check.tolerance,
            if ok { "PASS" } else { "FAIL" }
        );
    }

    for op in &ops {
        for query in &scenario.queries {
            let analytic = evaluate(*op, &scenario.model, query)?;
            let estimate = mc_estimate(*op, &scenario.model, query, &mc)?;
            let z = estimate.z_score(analytic);
            let ok = z.abs() <= 3.0;
            all_ok &= ok;
            let _ = writeln!(
                out,
                "mc {op} p={} q={} r={} theta={} x={}: analytic={} estimate={} stderr={} z={z:+.3} {}",
                fmt_value(query.p),
                fmt_value(query.q),
                fmt_value(query.r),
                fmt_value(query.theta),
                fmt_value(query.x),
                fmt_value(analytic),
                fmt_value(estimate.mean),
                fmt_value(estimate.stderr),
                if ok { "PASS" } else { "FAIL" }
            );
        }
    }
    let _ = writeln!(out, "result: {}", if all_ok { "PASS" } else { "FAIL" });
    if all_ok {
        Ok(out)
    } else {
        // Still surface the report on stdout before the failure exit.
        print!("{out}");
        Err(CliError::Validation(
            "validation comparisons failed".to_string(),
        ))
    }
}
