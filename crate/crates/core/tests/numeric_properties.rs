//! Property tests for the integrator: fourth-order convergence against an
//! exact solution, time-reversal consistency, drift bounds for certified
//! first integrals, and determinism under concurrent execution.

use hojman_core::expr::{Bindings, Expr, SampleBox};
use hojman_core::geometry::{Chart, VectorField};
use hojman_core::numeric::{certify_invariant, drift, integrate, CertifySuite, DRIFT_TOLERANCE};

fn oscillator() -> VectorField {
    let chart = Chart::space(["x", "v"]).expect("valid chart");
    VectorField::new(
        chart,
        vec![Expr::var("v"), Expr::parse("-x").unwrap()],
    )
    .expect("components in chart")
}

fn start() -> Bindings {
    Bindings::new().with("x", 1.0).with("v", 0.0)
}

/// Exact oscillator solution from (1, 0): x = cos t, v = -sin t.
fn global_error(step: f64, t_end: f64) -> f64 {
    let traj = integrate(&oscillator(), &start(), (0.0, t_end), step).expect("integrates");
    assert!(traj.truncated_at().is_none());
    let state = traj.final_state();
    let (x, v) = (state[0], state[1]);
    ((x - t_end.cos()).powi(2) + (v + t_end.sin()).powi(2)).sqrt()
}

#[test]
fn global_error_decays_at_fourth_order() {
    let mut errors = Vec::new();
    let mut step = 1e-2;
    for _ in 0..4 {
        errors.push(global_error(step, 2.0));
        step /= 2.0;
    }
    for pair in errors.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!(
            (8.0..32.0).contains(&ratio),
            "halving the step must divide the error by about 16, got {ratio} \
             (errors {errors:?})"
        );
    }
}

#[test]
fn forward_then_backward_returns_to_the_start() {
    let field = oscillator();
    let step = 1e-3;
    let forward = integrate(&field, &start(), (0.0, 3.0), step).expect("integrates");
    let turn = forward.bindings_at(forward.len() - 1);
    let back = integrate(&field, &turn, (3.0, 0.0), step).expect("integrates backward");
    assert!(back.times().windows(2).all(|w| w[1] < w[0]));

    let one_way = global_error(step, 3.0);
    let state = back.final_state();
    let round_trip = ((state[0] - 1.0).powi(2) + state[1].powi(2)).sqrt();
    assert!(
        round_trip <= 10.0 * one_way.max(1e-15),
        "round trip error {round_trip} vs one-way bound {one_way}"
    );
}

/// Energy is a certified first integral of the oscillator; its drift at
/// the default step must sit under the library-wide tolerance.
#[test]
fn certified_invariant_drift_stays_under_tolerance() {
    let field = oscillator();
    let energy = Expr::parse("x^2 + v^2").unwrap();
    let traj = integrate(&field, &start(), (0.0, 10.0), 1e-3).expect("integrates");
    let report = drift(&field, &traj, &energy).expect("evaluates along trajectory");
    assert!(
        report.relative_drift <= DRIFT_TOLERANCE,
        "relative drift {} exceeds {}",
        report.relative_drift,
        DRIFT_TOLERANCE
    );
    assert!(!report.truncated);
}

/// The full certification pipeline under the pinned defaults.
#[test]
fn certify_invariant_passes_for_the_oscillator_energy() {
    let field = oscillator();
    let energy = Expr::parse("x^2 + v^2").unwrap();
    let sb = SampleBox::new([("x", (-2.0, 2.0)), ("v", (-2.0, 2.0))], 42, 32)
        .expect("static intervals are valid");
    let suite = CertifySuite::single(sb, start(), (0.0, 10.0), 1e-3);
    let cert = certify_invariant(&field, &energy, &suite).expect("evaluates");
    assert!(cert.pass, "failures: {:?}", cert.failures);
    assert_eq!(cert.pointwise.len(), 1);
    assert_eq!(cert.drifts.len(), 1);
}

/// A non-invariant must fail certification with a reason, not an error.
#[test]
fn non_invariants_fail_certification_with_reasons() {
    let field = oscillator();
    let not_conserved = Expr::parse("x + v").unwrap();
    let sb = SampleBox::new([("x", (-2.0, 2.0)), ("v", (-2.0, 2.0))], 42, 32)
        .expect("static intervals are valid");
    let suite = CertifySuite::single(sb, start(), (0.0, 10.0), 1e-2);
    let cert = certify_invariant(&field, &not_conserved, &suite).expect("evaluates");
    assert!(!cert.pass);
    assert!(!cert.failures.is_empty());
}

/// Integration is a pure function of its inputs: running the same problem
/// from several threads at once must give bitwise identical trajectories.
#[test]
fn concurrent_integrations_agree_bitwise() {
    let baseline = integrate(&oscillator(), &start(), (0.0, 5.0), 1e-3).expect("integrates");
    let handles: Vec<_> = (0..4)
        .map(|_| {
            std::thread::spawn(|| {
                integrate(&oscillator(), &start(), (0.0, 5.0), 1e-3).expect("integrates")
            })
        })
        .collect();
    for handle in handles {
        let traj = handle.join().expect("thread completes");
        assert_eq!(traj.times(), baseline.times());
        assert_eq!(traj.states(), baseline.states());
    }
}

/// The final time lands exactly on the requested endpoint even when the
/// span is not a whole number of steps.
#[test]
fn integration_lands_exactly_on_the_endpoint() {
    for (span, step) in [((0.0, 1.0), 3e-3_f64), ((0.0, 0.95), 1e-2), ((2.0, -1.5), 1e-2)] {
        let traj = integrate(&oscillator(), &start(), span, step).expect("integrates");
        let last = *traj.times().last().expect("nonempty");
        assert_eq!(
            last, span.1,
            "span {span:?} at step {step} must end exactly at the endpoint"
        );
    }
}
