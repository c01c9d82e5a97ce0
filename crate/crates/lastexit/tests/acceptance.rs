//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured worst case. The Monte Carlo criteria run at
//! `n = 10^6` and take minutes; run `cargo test --test acceptance --
//! --nocapture` to watch the comparisons.

use lastexit::scale::{ScaleEvaluator, ScaleMethod};
use lastexit::simulate::{
    collect_last_exit_positions, estimate_creeping, estimate_occupation_negative_infinite,
    estimate_occupation_positive_infinite, estimate_omega_minus, estimate_omega_plus,
    estimate_t_plus_infinite, McConfig, TRUNCATION_TOL,
};
use lastexit::transforms::{
    creeping_transform, joint_t_minus_infinite_horizon, laplace_t_plus,
    laplace_t_plus_infinite_horizon, last_exit_density_compound_poisson,
    occupation_transform_negative, occupation_transform_positive, omega_minus_1, omega_minus_2,
    omega_plus_1, omega_plus_2, omega_plus_2_alt, value_at_last_exit_transform,
};
use lastexit::{LevyModel, TransformQuery};

fn bd(mu: f64) -> LevyModel {
    LevyModel::brownian_drift(mu, 1.0).unwrap()
}

fn cl(mu: f64, a: f64, rho: f64) -> LevyModel {
    LevyModel::cramer_lundberg(mu, a, rho).unwrap()
}

fn pcl() -> LevyModel {
    LevyModel::perturbed_cramer_lundberg(1.0, 0.8, 2.0, 1.0).unwrap()
}

fn sd() -> LevyModel {
    LevyModel::stable_drift(1.0, 1.5).unwrap()
}

fn all_families() -> Vec<LevyModel> {
    vec![bd(1.0), cl(1.0, 2.0, 1.0), cl(2.0, 1.0, 1.0), pcl(), sd()]
}

fn query(p: f64, q: f64, r: f64, theta: f64, x: f64) -> TransformQuery {
    TransformQuery::new(p, q, r, theta, x)
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn criterion_1_analytic_identity_suite() {
    // ψ/Φ round trip on a log grid, relative 1e−10.
    let mut worst_round_trip: f64 = 0.0;
    for model in all_families() {
        for k in 0..=45 {
            let u = 10f64.powf(-6.0 + 9.0 * k as f64 / 45.0);
            let back = model.psi(model.phi(u).unwrap()).unwrap();
            worst_round_trip = worst_round_trip.max((back - u).abs() / u.max(1.0));
        }
    }
    assert!(worst_round_trip <= 1e-10, "round trip {worst_round_trip:e}");

    // Defining Laplace transform of W^{(q)} reproduced to 1e−6 relative
    // for the closed-form families.
    let mut worst_lt: f64 = 0.0;
    for model in [bd(1.0), cl(1.0, 2.0, 1.0), cl(2.0, 1.0, 1.0)] {
        for q in [0.0, 0.5, 2.0] {
            let ev = ScaleEvaluator::new(&model, q).unwrap();
            for offset in [0.5, 2.0] {
                let lambda = ev.phi_q() + offset;
                let got = ev.laplace_transform_check(lambda).unwrap();
                let expect = 1.0 / (model.psi(lambda).unwrap() - q);
                worst_lt = worst_lt.max((got - expect).abs() / expect.abs());
            }
        }
    }
    assert!(worst_lt <= 1e-6, "laplace transform check {worst_lt:e}");

    // Z^{(q)}(x, Φ(q)) = e^{Φ(q) x} to 1e−10, every family and method.
    let mut worst_tilt: f64 = 0.0;
    for model in all_families() {
        for q in [0.3, 1.0] {
            let ev = ScaleEvaluator::new(&model, q).unwrap();
            for x in [0.5, 2.0] {
                let expect = (ev.phi_q() * x).exp();
                let got = ev.z2(x, ev.phi_q()).unwrap();
                worst_tilt = worst_tilt.max((got - expect).abs() / expect);
            }
        }
    }
    assert!(worst_tilt <= 1e-10, "Z(x, Phi(q)) identity {worst_tilt:e}");

    // Closed form versus Bromwich inversion to 1e−7 relative.
    let mut worst_inv: f64 = 0.0;
    for model in [bd(1.0), cl(1.0, 2.0, 1.0)] {
        for q in [0.0, 0.5, 2.0] {
            let exact = ScaleEvaluator::new(&model, q).unwrap();
            let inverted =
                ScaleEvaluator::with_method(&model, q, ScaleMethod::BromwichInversion, 32)
                    .unwrap();
            for k in 0..=9 {
                let x = 0.1 + (5.0 - 0.1) * k as f64 / 9.0;
                let (a, b) = (exact.w(x).unwrap(), inverted.w(x).unwrap());
                worst_inv = worst_inv.max((a - b).abs() / a.abs().max(1.0));
            }
        }
    }
    assert!(worst_inv <= 1e-7, "inversion vs closed form {worst_inv:e}");

    println!(
        "criterion 1 (analytic identities): PASS \
         [round trip {worst_round_trip:.1e}, laplace {worst_lt:.1e}, \
         tilt {worst_tilt:.1e}, inversion {worst_inv:.1e}]"
    );
}

#[test]
fn criterion_2_explicit_example_reproduction() {
    // Brownian drift: Φ(0) = 2μ and the creeping probability e^{2μx}.
    let model = bd(1.0);
    assert!((model.phi(0.0).unwrap() - 2.0).abs() <= 1e-9);
    let creep = creeping_transform(&model, 0.0, 0.0, 0.0, -0.5).unwrap();
    assert!(
        (creep - (-1.0f64).exp()).abs() <= 1e-9,
        "creeping mass {creep}"
    );

    // Compound Poisson with (μ, a, ρ) = (1, 2, 1).
    let model = cl(1.0, 2.0, 1.0);
    assert!((model.phi(0.0).unwrap() - 1.0).abs() <= 1e-9);
    let v = value_at_last_exit_transform(&model, 1.0, 0.0).unwrap();
    assert!((v - 1.0 / 3.0).abs() <= 1e-9, "E e^{{X_T-}} = {v}");

    let mass = simpson(
        |x| last_exit_density_compound_poisson(2.0, 1.0, 1.0, x).unwrap(),
        -80.0,
        -1e-12,
        20_000,
    );
    assert!((mass - 1.0).abs() <= 1e-9, "density mass {mass}");

    let mut worst_lt: f64 = 0.0;
    for theta in [0.5, 1.0, 2.0] {
        let quadrature = simpson(
            |x| {
                (theta * x).exp() * last_exit_density_compound_poisson(2.0, 1.0, 1.0, x).unwrap()
            },
            -80.0,
            -1e-12,
            20_000,
        );
        let closed = value_at_last_exit_transform(&model, theta, 0.0).unwrap();
        worst_lt = worst_lt.max((quadrature - closed).abs());
    }
    assert!(worst_lt <= 1e-7, "density transform {worst_lt:e}");

    // Stable with drift: no creeping, the value transform dies off.
    let tail = value_at_last_exit_transform(&sd(), 1e4, 0.0).unwrap();
    assert!(tail.abs() < 1e-2, "stable large-θ value {tail}");

    println!(
        "criterion 2 (explicit examples): PASS \
         [creeping mass {creep:.9}, value transform {v:.9}, density mass {mass:.9}, \
         density LT gap {worst_lt:.1e}, stable tail {tail:.2e}]"
    );
}

#[test]
fn criterion_3_theorem_consistency_suite() {
    // Completeness of the upward pair at p = θ = 0, q → 0.
    let mut worst_plus: f64 = 0.0;
    for model in all_families() {
        for x in [-0.8, 0.0, 1.2] {
            let q_ = query(0.0, 1e-6, 0.5, 0.0, x);
            let sum = omega_plus_1(&model, &q_).unwrap() + omega_plus_2(&model, &q_).unwrap();
            worst_plus = worst_plus.max((sum - 1.0).abs());
        }
    }
    assert!(worst_plus <= 1e-4, "plus pair completeness {worst_plus:e}");

    // Exact downward pair identity at x = 0: ω⁻₁ + ω⁻₂ = Φ(r)/Φ(q+r).
    let mut worst_minus: f64 = 0.0;
    for model in all_families() {
        for (qq, r) in [(0.7, 0.5), (2.0, 0.25), (1e-6, 0.5)] {
            let q_ = query(0.0, qq, r, 0.0, 0.0);
            let sum = omega_minus_1(&model, &q_).unwrap() + omega_minus_2(&model, &q_).unwrap();
            let expect = model.phi(r).unwrap() / model.phi(qq + r).unwrap();
            worst_minus = worst_minus.max((sum - expect).abs());
        }
    }
    assert!(worst_minus <= 1e-9, "minus pair identity {worst_minus:e}");

    // The marginal T⁺ transform is the (q, θ → 0) limit of the pair.
    let mut worst_marginal: f64 = 0.0;
    for model in [bd(1.0), cl(1.0, 2.0, 1.0), cl(2.0, 1.0, 1.0)] {
        for x in [-0.6, 0.9] {
            let direct = laplace_t_plus(&model, 0.4, 0.5, x).unwrap();
            let q_ = query(0.4, 1e-6, 0.5, 1e-6, x);
            let sum = omega_plus_1(&model, &q_).unwrap() + omega_plus_2(&model, &q_).unwrap();
            worst_marginal = worst_marginal.max((direct - sum).abs() / direct.abs());
        }
    }
    assert!(worst_marginal <= 1e-4, "marginal limit {worst_marginal:e}");

    // The infinite-horizon joint T⁻ transform is the r → 0 limit of ω⁻₁.
    let mut worst_joint: f64 = 0.0;
    for model in [bd(1.0), cl(1.0, 2.0, 1.0)] {
        for x in [-0.5, 0.8] {
            let direct = joint_t_minus_infinite_horizon(&model, 0.3, 0.6, 0.4, x).unwrap();
            let limit = omega_minus_1(&model, &query(0.3, 0.6, 1e-6, 0.4, x)).unwrap();
            worst_joint = worst_joint.max((direct - limit).abs() / direct.abs());
        }
    }
    assert!(worst_joint <= 1e-3, "joint T- limit {worst_joint:e}");

    // Continuity across the removable tilt singularities.
    let h = 1e-5;
    let mut worst_sing: f64 = 0.0;
    for model in [bd(1.0), cl(1.0, 2.0, 1.0)] {
        let (p, qq, r, x) = (0.4, 0.7, 0.5, 0.6);
        let phi_pr = model.phi(p + r).unwrap();
        let phi_pqr = model.phi(p + qq + r).unwrap();
        let phi_r = model.phi(r).unwrap();
        for theta_star in [phi_pr, phi_pqr] {
            let at = omega_plus_2(&model, &query(p, qq, r, theta_star, x)).unwrap();
            let avg = 0.5
                * (omega_plus_2(&model, &query(p, qq, r, theta_star - h, x)).unwrap()
                    + omega_plus_2(&model, &query(p, qq, r, theta_star + h, x)).unwrap());
            worst_sing = worst_sing.max((at - avg).abs());
        }
        for theta_star in [phi_pqr, phi_pqr - phi_r] {
            let at = omega_minus_1(&model, &query(p, qq, r, theta_star, x)).unwrap();
            let avg = 0.5
                * (omega_minus_1(&model, &query(p, qq, r, theta_star - h, x)).unwrap()
                    + omega_minus_1(&model, &query(p, qq, r, theta_star + h, x)).unwrap());
            worst_sing = worst_sing.max((at - avg).abs());
        }
        let phi_0 = model.phi(0.0).unwrap();
        let at = value_at_last_exit_transform(&model, phi_0, 0.4).unwrap();
        let avg = 0.5
            * (value_at_last_exit_transform(&model, phi_0 - h, 0.4).unwrap()
                + value_at_last_exit_transform(&model, phi_0 + h, 0.4).unwrap());
        worst_sing = worst_sing.max((at - avg).abs());
    }
    assert!(worst_sing <= 1e-6, "singularity continuity {worst_sing:e}");

    // Branch continuity at x = 0 for the unbounded-variation families.
    type StartMap<'a> = Box<dyn Fn(f64) -> f64 + 'a>;
    let mut worst_branch: f64 = 0.0;
    for model in [bd(1.0), pcl(), sd()] {
        let eps = 1e-8;
        let ops: Vec<(&str, StartMap)> = vec![
            (
                "omega_plus_1",
                Box::new(|x| omega_plus_1(&model, &query(0.4, 0.7, 0.5, 0.9, x)).unwrap()),
            ),
            (
                "omega_plus_2",
                Box::new(|x| omega_plus_2(&model, &query(0.4, 0.7, 0.5, 0.9, x)).unwrap()),
            ),
            (
                "omega_minus_1",
                Box::new(|x| omega_minus_1(&model, &query(0.4, 0.7, 0.5, 0.9, x)).unwrap()),
            ),
            (
                "omega_minus_2",
                Box::new(|x| omega_minus_2(&model, &query(0.4, 0.7, 0.5, 0.9, x)).unwrap()),
            ),
            (
                "creeping",
                Box::new(|x| creeping_transform(&model, 0.4, 0.7, 0.5, x).unwrap()),
            ),
        ];
        for (name, op) in ops {
            let gap = (op(eps) - op(-eps)).abs() / op(-eps).abs().max(1.0);
            assert!(
                gap <= 1e-6,
                "{name} discontinuous at 0 for {:?}: {gap:e}",
                model.family()
            );
            worst_branch = worst_branch.max(gap);
        }
    }

    println!(
        "criterion 3 (theorem consistency): PASS \
         [plus pair {worst_plus:.1e}, minus pair {worst_minus:.1e}, \
         marginal {worst_marginal:.1e}, joint limit {worst_joint:.1e}, \
         singularities {worst_sing:.1e}, branch {worst_branch:.1e}]"
    );
}

#[test]
fn criterion_4_monte_carlo_bounded_variation() {
    let mc = McConfig {
        n: 1_000_000,
        master_seed: 20_260_808,
        step: 0.0,
    };
    let mut worst_z: f64 = 0.0;

    // Downward pair on the model drifting to −∞.
    let model = cl(1.0, 2.0, 1.0);
    for x in [-0.5, 0.0, 1.0] {
        let q_ = query(0.5, 0.5, 0.5, 0.5, x);
        let (a1, a2) = (
            omega_minus_1(&model, &q_).unwrap(),
            omega_minus_2(&model, &q_).unwrap(),
        );
        let (e1, e2) = estimate_omega_minus(&model, &q_, &mc).unwrap();
        for (name, analytic, est) in [("omega_minus_1", a1, e1), ("omega_minus_2", a2, e2)] {
            let z = est.z_score(analytic);
            println!(
                "  cl(1,2,1) x={x} {name}: analytic {analytic:.6} mc {:.6} se {:.1e} z {z:+.2}",
                est.mean, est.stderr
            );
            assert!(est.stderr <= 5e-4, "stderr too large: {:e}", est.stderr);
            assert!(z.abs() <= 3.0, "{name} at x={x}: z = {z}");
            worst_z = worst_z.max(z.abs());
        }
    }

    // Upward pair on the model drifting to +∞, plus the adjudication of
    // the two candidate tilt-ratio denominators.
    let model = cl(2.0, 1.0, 1.0);
    let mut alt_max_z: f64 = 0.0;
    for theta in [0.5, 1.5] {
        for x in [-0.5, 0.0, 1.0] {
            let q_ = query(0.5, 0.5, 0.5, theta, x);
            let (a1, a2) = (
                omega_plus_1(&model, &q_).unwrap(),
                omega_plus_2(&model, &q_).unwrap(),
            );
            let alt = omega_plus_2_alt(&model, &q_).unwrap();
            let (e1, e2) = estimate_omega_plus(&model, &q_, &mc).unwrap();
            let (z1, z2, z_alt) = (e1.z_score(a1), e2.z_score(a2), e2.z_score(alt));
            println!(
                "  cl(2,1,1) θ={theta} x={x}: w+1 z {z1:+.2}; w+2 z {z2:+.2}; alt-form z {z_alt:+.2}"
            );
            assert!(e1.stderr <= 5e-4 && e2.stderr <= 5e-4);
            assert!(z1.abs() <= 3.0, "omega_plus_1 θ={theta} x={x}: z = {z1}");
            assert!(z2.abs() <= 3.0, "omega_plus_2 θ={theta} x={x}: z = {z2}");
            worst_z = worst_z.max(z1.abs()).max(z2.abs());
            alt_max_z = alt_max_z.max(z_alt.abs());
        }
    }
    assert!(
        alt_max_z > 5.0,
        "the Φ(p+r)-denominator variant should fail validation, max |z| = {alt_max_z}"
    );

    println!(
        "criterion 4 (Monte Carlo, bounded variation): PASS \
         [max |z| {worst_z:.2}, alt-form max |z| {alt_max_z:.1}]"
    );
}

#[test]
fn criterion_5_monte_carlo_diffusion() {
    let mc = McConfig {
        n: 1_000_000,
        master_seed: 20_260_808,
        step: 1e-4,
    };
    let allowance = 5e-3;
    let model = bd(1.0);
    let q_ = query(0.5, 0.5, 0.5, 0.5, 0.0);
    let (a1, a2) = (
        omega_minus_1(&model, &q_).unwrap(),
        omega_minus_2(&model, &q_).unwrap(),
    );
    let (e1, e2) = estimate_omega_minus(&model, &q_, &mc).unwrap();
    let mut worst_gap: f64 = 0.0;
    for (name, analytic, est) in [("omega_minus_1", a1, e1), ("omega_minus_2", a2, e2)] {
        let gap = (est.mean - analytic).abs();
        let tol = (3.0 * est.stderr).max(allowance);
        println!(
            "  bd(1) {name}: analytic {analytic:.6} mc {:.6} se {:.1e} gap {gap:.1e}",
            est.mean, est.stderr
        );
        assert!(gap <= tol, "{name}: gap {gap:e} exceeds {tol:e}");
        worst_gap = worst_gap.max(gap);
    }

    let analytic = creeping_transform(&model, 0.5, 0.5, 0.5, 0.0).unwrap();
    let est = estimate_creeping(&model, 0.5, 0.5, 0.5, &mc, 0.0).unwrap();
    let gap = (est.mean - analytic).abs();
    let tol = (3.0 * est.stderr).max(allowance);
    println!(
        "  bd(1) creeping: analytic {analytic:.6} mc {:.6} se {:.1e} gap {gap:.1e}",
        est.mean, est.stderr
    );
    assert!(gap <= tol, "creeping: gap {gap:e} exceeds {tol:e}");
    worst_gap = worst_gap.max(gap);

    println!("criterion 5 (Monte Carlo, diffusion): PASS [max gap {worst_gap:.1e}]");
}

#[test]
fn criterion_6_infinite_horizon_remarks() {
    let mc = McConfig {
        n: 1_000_000,
        master_seed: 20_260_808,
        step: 0.0,
    };
    let mut worst_gap: f64 = 0.0;

    let model = cl(2.0, 1.0, 1.0);
    let analytic = laplace_t_plus_infinite_horizon(&model, 0.5, 0.0).unwrap();
    let est = estimate_t_plus_infinite(&model, 0.5, &mc, 0.0).unwrap();
    let gap = (est.mean - analytic).abs();
    println!(
        "  cl(2,1,1) E e^(-pT+): analytic {analytic:.6} mc {:.6} se {:.1e}",
        est.mean, est.stderr
    );
    assert!(gap <= 3.0 * est.stderr + TRUNCATION_TOL, "gap {gap:e}");
    worst_gap = worst_gap.max(gap);

    let analytic = occupation_transform_negative(&model, 0.5, 0.0).unwrap();
    let est = estimate_occupation_negative_infinite(&model, 0.5, &mc, 0.0).unwrap();
    let gap = (est.mean - analytic).abs();
    println!(
        "  cl(2,1,1) occupation below 0: analytic {analytic:.6} mc {:.6} se {:.1e}",
        est.mean, est.stderr
    );
    assert!(gap <= 3.0 * est.stderr + TRUNCATION_TOL, "gap {gap:e}");
    worst_gap = worst_gap.max(gap);

    let model = cl(1.0, 2.0, 1.0);
    let analytic = occupation_transform_positive(&model, 0.5, 0.0).unwrap();
    let est = estimate_occupation_positive_infinite(&model, 0.5, &mc, 0.0).unwrap();
    let gap = (est.mean - analytic).abs();
    println!(
        "  cl(1,2,1) occupation above 0: analytic {analytic:.6} mc {:.6} se {:.1e}",
        est.mean, est.stderr
    );
    assert!(gap <= 3.0 * est.stderr, "gap {gap:e}");
    worst_gap = worst_gap.max(gap);

    println!("criterion 6 (infinite-horizon limits): PASS [max gap {worst_gap:.1e}]");
}

#[test]
fn criterion_7_last_exit_position_distribution() {
    // Empirical law of X_{T⁻} under an r → 0 proxy, against the explicit
    // density — and against the claim that it is NOT exponential.
    let (mu, a, rho) = (1.0, 2.0, 1.0);
    let model = cl(mu, a, rho);
    let mc = McConfig {
        n: 1_000_000,
        master_seed: 20_260_808,
        step: 0.0,
    };
    let mut samples = collect_last_exit_positions(&model, 1e-3, &mc, 0.0).unwrap();
    assert!(samples.len() > 990_000, "horizon event too frequent");
    samples.sort_by(|u, v| u.partial_cmp(v).unwrap());

    let coef = a * rho / (a - mu * rho);
    let cdf_density =
        |x: f64| (coef * ((rho * x).exp() / rho - mu / a * (a * x / mu).exp())).clamp(0.0, 1.0);
    let cdf_exponential = |x: f64| (rho * x).exp().min(1.0);

    let ks = |cdf: &dyn Fn(f64) -> f64| {
        let n = samples.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &x) in samples.iter().enumerate() {
            let f = cdf(x);
            d = d.max((f - i as f64 / n).abs());
            d = d.max((f - (i + 1) as f64 / n).abs());
        }
        d
    };

    let d_density = ks(&cdf_density);
    let d_exp = ks(&cdf_exponential);
    println!(
        "  KS(empirical, last-exit density) = {d_density:.4}; \
         KS(empirical, Exp(ρ)) = {d_exp:.4} over {} paths",
        samples.len()
    );
    assert!(d_density < 0.01, "KS distance {d_density}");
    assert!(d_exp > 0.05, "X at the last exit looks exponential: {d_exp}");

    println!(
        "criterion 7 (last-exit position law): PASS \
         [KS density {d_density:.4}, KS exponential {d_exp:.4}]"
    );
}
