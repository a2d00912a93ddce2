//! Acceptance suite for the library layers. Each test is one acceptance
//! criterion with every tolerance, sample size, and time budget pinned as
//! a constant; the test's pass/fail line is the verdict. The companion
//! binary crate carries the acceptance criteria that go through problem
//! files and the command line.

use std::time::{Duration, Instant};

use hojman_core::expr::{equal_numeric, fd_check, mul, sub, Bindings, Expr, SampleBox};
use hojman_core::generate::{point_field, quadratic_lagrangian, total_expr, vector_field, Rng};
use hojman_core::geometry::{bracket_divergence_residual, multiplier_residual, Chart, Multiplier, VectorField};
use hojman_core::invariants::invariant_normalizer;
use hojman_core::mechanics::{
    hojman_invariant_lagrangian, lagrangian_analyze, lagrangian_multiplier, prolong,
    standard_coords, PointField, SecondOrderSystem,
};
use hojman_core::numeric::integrate;

/// Identity-suite tolerance: generated pairs, 32-point boxes.
const IDENTITY_RTOL: f64 = 1e-8;
const IDENTITY_PAIRS: usize = 50;
const IDENTITY_BUDGET: Duration = Duration::from_secs(10);

/// Lagrangian keystone: generated positive-definite kinetic matrices.
const KEYSTONE_RTOL: f64 = 1e-8;
const KEYSTONE_LAGRANGIANS: usize = 20;
const KEYSTONE_DRIFT_TOLERANCE: f64 = 1e-6;
const KEYSTONE_STEP: f64 = 1e-3;
const KEYSTONE_SPAN: (f64, f64) = (0.0, 0.5);
const KEYSTONE_BUDGET: Duration = Duration::from_secs(60);

/// Route agreement and the divergence expansion for prolonged fields.
const ROUTE_RTOL: f64 = 1e-8;
const ROUTE_POINT_FIELDS: usize = 20;
const ROUTE_BUDGET: Duration = Duration::from_secs(10);

/// Finite-difference oracle.
const FD_TRIPLES: usize = 200;
const FD_STENCIL: f64 = 1e-5;
const FD_TOLERANCE: f64 = 1e-6;
const FD_BUDGET: Duration = Duration::from_secs(5);

/// Integrator order and periodic return.
const ORDER_COARSEST_STEP: f64 = 1e-2;
const ORDER_HALVINGS: usize = 3;
const ORDER_RATIO_BAND: (f64, f64) = (8.0, 32.0);
const RETURN_STEP: f64 = 1e-3;
const RETURN_TOLERANCE: f64 = 1e-9;

const SAMPLE_COUNT: usize = 32;

fn space_box(coords: &[&str], seed: u64) -> SampleBox {
    SampleBox::new(coords.iter().map(|v| (*v, (-2.0, 2.0))), seed, SAMPLE_COUNT)
        .expect("static intervals are valid")
}

fn phase_box(n: usize, seed: u64) -> SampleBox {
    let mut vars: Vec<String> = vec!["t".to_string()];
    for c in standard_coords(n) {
        vars.push(format!("v_{c}"));
        vars.push(c);
    }
    SampleBox::new(vars.into_iter().map(|v| (v, (-1.0, 1.0))), seed, SAMPLE_COUNT)
        .expect("static intervals are valid")
}

#[test]
fn bracket_divergence_identity_on_generated_pairs() {
    let started = Instant::now();
    let coord_sets: [&[&str]; 3] = [&["x"], &["x", "y"], &["x", "y", "z"]];
    for i in 0..IDENTITY_PAIRS {
        let coords = coord_sets[i % coord_sets.len()];
        let mut rng = Rng::new(0xacce_1000 + i as u64);
        let x = vector_field(&mut rng, coords, 2);
        let y = vector_field(&mut rng, coords, 2);
        let sb = space_box(coords, i as u64);
        let report = bracket_divergence_residual(&x, &y, &sb, IDENTITY_RTOL)
            .expect("generated fields evaluate");
        assert!(
            report.equal,
            "pair {i} (dim {}): residual {} at {}",
            coords.len(),
            report.worst_residual,
            report.worst_point
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < IDENTITY_BUDGET,
        "identity suite took {elapsed:?}, budget {IDENTITY_BUDGET:?}"
    );
    println!(
        "acceptance: bracket-divergence identity on {IDENTITY_PAIRS} generated pairs \
         (dims 1-3, rtol {IDENTITY_RTOL:e}) -> pass in {elapsed:.2?}"
    );
}

#[test]
fn hessian_multiplier_and_energy_drift_on_generated_lagrangians() {
    let started = Instant::now();
    let mut autonomous_checked = 0usize;
    for i in 0..KEYSTONE_LAGRANGIANS {
        let n = 1 + i % 3;
        let time_dependent = i % 2 == 1;
        let mut rng = Rng::new(0xacce_3000 + i as u64);
        let lagrangian = quadratic_lagrangian(&mut rng, n, time_dependent);
        let sb = phase_box(n, i as u64);
        let ld = lagrangian_analyze(&lagrangian, n, time_dependent, &sb, KEYSTONE_RTOL)
            .expect("generated Lagrangians are regular");

        let hm = lagrangian_multiplier(&ld, &sb, KEYSTONE_RTOL).expect("det W certifies");
        let residual = multiplier_residual(&ld.system().sode_lift(), &hm.multiplier);
        let report = equal_numeric(&residual, &Expr::Constant(0.0), &sb, KEYSTONE_RTOL)
            .expect("generated data evaluates");
        assert!(
            report.equal,
            "Lagrangian {i} (n = {n}): multiplier residual {} at {}",
            report.worst_residual, report.worst_point
        );

        if !time_dependent {
            let lift = ld.system().sode_lift();
            let mut x0 = Bindings::new();
            for (k, c) in ld.system().base_coords().iter().enumerate() {
                x0.insert(c.clone(), 0.1 + 0.05 * k as f64);
            }
            for (k, c) in ld.system().velocity_coords().iter().enumerate() {
                x0.insert(c.clone(), 0.05 - 0.02 * k as f64);
            }
            let traj = integrate(&lift, &x0, KEYSTONE_SPAN, KEYSTONE_STEP).expect("integrates");
            assert!(
                traj.truncated_at().is_none(),
                "Lagrangian {i}: trajectory truncated"
            );
            let energy = ld.energy();
            let initial = energy.eval(&traj.bindings_at(0)).expect("energy evaluates");
            let mut max_drift = 0.0f64;
            for idx in 1..traj.len() {
                let value = energy.eval(&traj.bindings_at(idx)).expect("energy evaluates");
                max_drift = max_drift.max((value - initial).abs());
            }
            let relative = max_drift / (1.0 + initial.abs());
            assert!(
                relative <= KEYSTONE_DRIFT_TOLERANCE,
                "Lagrangian {i} (n = {n}): energy drift {relative} over {KEYSTONE_SPAN:?} \
                 at step {KEYSTONE_STEP}"
            );
            autonomous_checked += 1;
        }
    }
    assert!(autonomous_checked >= 8, "schedule must cover autonomous members");
    let elapsed = started.elapsed();
    assert!(
        elapsed < KEYSTONE_BUDGET,
        "keystone suite took {elapsed:?}, budget {KEYSTONE_BUDGET:?}"
    );
    println!(
        "acceptance: Hessian multiplier on {KEYSTONE_LAGRANGIANS} generated Lagrangians \
         (rtol {KEYSTONE_RTOL:e}) with energy drift <= {KEYSTONE_DRIFT_TOLERANCE:e} on \
         {autonomous_checked} autonomous members -> pass in {elapsed:.2?}"
    );
}

#[test]
fn lagrangian_route_agrees_with_the_generic_constructor() {
    let started = Instant::now();

    // Exponentially damped oscillator: time translation.
    let damped = Expr::parse("exp(2*t)*(v_x^2/2 - x^2/2)").unwrap();
    let sb = phase_box(1, 4);
    let ld = lagrangian_analyze(&damped, 1, true, &sb, ROUTE_RTOL).expect("regular");
    let pf = PointField::new(Expr::Constant(1.0), vec![Expr::Constant(0.0)]);
    let closed = hojman_invariant_lagrangian(&pf, &ld, &sb, ROUTE_RTOL).expect("symmetry");
    let gamma = ld.system().time_extended();
    let y = prolong(&pf, ld.system()).expect("prolongs");
    let r = Multiplier::new(gamma.chart().clone(), ld.det_hessian().clone(), sb.clone())
        .expect("exp(2t) is positive");
    let generic =
        invariant_normalizer(&gamma, &y, Some(&r), None, &sb, ROUTE_RTOL).expect("normalizer");
    let report =
        equal_numeric(&closed.invariant, &generic.invariant, &sb, ROUTE_RTOL).expect("evaluates");
    assert!(
        report.equal,
        "damped oscillator: {} vs {}",
        closed.invariant.render(),
        generic.invariant.render()
    );
    assert_eq!(closed.constant_value, Some(2.0));

    // Free particle: spatial scaling.
    let free = Expr::parse("v_x^2/2").unwrap();
    let sb = phase_box(1, 5);
    let ld = lagrangian_analyze(&free, 1, false, &sb, ROUTE_RTOL).expect("regular");
    let pf = PointField::new(Expr::Constant(0.0), vec![Expr::var("x")]);
    let closed = hojman_invariant_lagrangian(&pf, &ld, &sb, ROUTE_RTOL).expect("symmetry");
    let gamma = ld.system().time_extended();
    let y = prolong(&pf, ld.system()).expect("prolongs");
    let r = Multiplier::new(gamma.chart().clone(), ld.det_hessian().clone(), sb.clone())
        .expect("det W = 1 is positive");
    let generic =
        invariant_normalizer(&gamma, &y, Some(&r), None, &sb, ROUTE_RTOL).expect("normalizer");
    let report =
        equal_numeric(&closed.invariant, &generic.invariant, &sb, ROUTE_RTOL).expect("evaluates");
    assert!(
        report.equal,
        "free particle: {} vs {}",
        closed.invariant.render(),
        generic.invariant.render()
    );
    assert_eq!(closed.constant_value, Some(2.0));

    // Divergence expansion for prolonged point fields.
    for i in 0..ROUTE_POINT_FIELDS {
        let n = 1 + i % 3;
        let mut rng = Rng::new(0xacce_4000 + i as u64);
        let pf = point_field(&mut rng, n);
        let base = standard_coords(n);
        let mut force_vars: Vec<&str> = vec!["t"];
        force_vars.extend(base.iter().map(|s| s.as_str()));
        let forces: Vec<Expr> = (0..n)
            .map(|_| total_expr(&mut rng, &force_vars, 2).simplify())
            .collect();
        let sys = SecondOrderSystem::new(base.clone(), forces, true).expect("valid system");
        let gamma = sys.time_extended();
        let lifted = prolong(&pf, &sys).expect("prolongs");

        let mut spatial_sum = Expr::Constant(0.0);
        for (k, coord) in base.iter().enumerate() {
            let term = sub(
                pf.spatial()[k].diff(coord),
                mul(Expr::var(format!("v_{coord}")), pf.temporal().diff(coord)),
            );
            spatial_sum = hojman_core::expr::add(spatial_sum, term);
        }
        let expansion = sub(
            mul(Expr::num(2.0), spatial_sum),
            mul(Expr::num(n as f64 - 1.0), gamma.lie_derivative(pf.temporal())),
        );
        let sb = phase_box(n, 100 + i as u64);
        let report = equal_numeric(&lifted.divergence(), &expansion, &sb, ROUTE_RTOL)
            .expect("generated data evaluates");
        assert!(
            report.equal,
            "point field {i} (n = {n}): expansion residual {} at {}",
            report.worst_residual, report.worst_point
        );
    }

    let elapsed = started.elapsed();
    assert!(
        elapsed < ROUTE_BUDGET,
        "route suite took {elapsed:?}, budget {ROUTE_BUDGET:?}"
    );
    println!(
        "acceptance: closed-form route agreement (2 worked systems) and divergence \
         expansion on {ROUTE_POINT_FIELDS} point fields (rtol {ROUTE_RTOL:e}) -> pass \
         in {elapsed:.2?}"
    );
}

#[test]
fn finite_difference_oracle_on_generated_triples() {
    let started = Instant::now();
    let vars = ["x", "y"];
    let sb = space_box(&vars, 0xfd);
    let mut worst = 0.0f64;
    for i in 0..FD_TRIPLES {
        let mut rng = Rng::new(0xacce_5000 + i as u64);
        let e = total_expr(&mut rng, &vars, 2);
        let var = vars[i % vars.len()];
        let at = sb.point(i as u64);
        let residual = fd_check(&e, var, &at, FD_STENCIL).expect("total family evaluates");
        worst = worst.max(residual);
        assert!(
            residual <= FD_TOLERANCE,
            "triple {i}: d/d{var} residual {residual} at {at} for {}",
            e.render()
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < FD_BUDGET,
        "finite-difference suite took {elapsed:?}, budget {FD_BUDGET:?}"
    );
    println!(
        "acceptance: finite-difference oracle on {FD_TRIPLES} triples \
         (worst residual {worst:.3e} <= {FD_TOLERANCE:e}) -> pass in {elapsed:.2?}"
    );
}

#[test]
fn integrator_order_and_periodic_return() {
    let started = Instant::now();
    let chart = Chart::space(["x", "v"]).expect("valid chart");
    let field = VectorField::new(
        chart,
        vec![Expr::var("v"), Expr::parse("-x").unwrap()],
    )
    .expect("components in chart");
    let x0 = Bindings::new().with("x", 1.0).with("v", 0.0);

    // Global error against the exact solution at a generic horizon.
    let horizon = 3.0f64;
    let mut errors = Vec::new();
    let mut step = ORDER_COARSEST_STEP;
    for _ in 0..=ORDER_HALVINGS {
        let traj = integrate(&field, &x0, (0.0, horizon), step).expect("integrates");
        let state = traj.final_state();
        let error =
            ((state[0] - horizon.cos()).powi(2) + (state[1] + horizon.sin()).powi(2)).sqrt();
        errors.push(error);
        step /= 2.0;
    }
    for (k, pair) in errors.windows(2).enumerate() {
        let ratio = pair[0] / pair[1];
        assert!(
            (ORDER_RATIO_BAND.0..=ORDER_RATIO_BAND.1).contains(&ratio),
            "halving {k}: error ratio {ratio} outside {ORDER_RATIO_BAND:?} \
             (errors {errors:?})"
        );
    }

    // Return to the initial state after one full period.
    let period = 2.0 * std::f64::consts::PI;
    let traj = integrate(&field, &x0, (0.0, period), RETURN_STEP).expect("integrates");
    let state = traj.final_state();
    let return_error = ((state[0] - 1.0).powi(2) + state[1].powi(2)).sqrt();
    assert!(
        return_error <= RETURN_TOLERANCE,
        "period return error {return_error} exceeds {RETURN_TOLERANCE:e}"
    );

    let elapsed = started.elapsed();
    println!(
        "acceptance: integrator order (ratios within {ORDER_RATIO_BAND:?} across \
         {ORDER_HALVINGS} halvings from {ORDER_COARSEST_STEP:e}) and periodic return \
         {return_error:.3e} <= {RETURN_TOLERANCE:e} -> pass in {elapsed:.2?}"
    );
}
