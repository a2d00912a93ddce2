//! Subcommand implementations. Each command turns a compiled [`Problem`]
//! into an ordered list of report records ending in a verdict. Failed
//! checks become `fail` verdicts with witness points; inputs that cannot
//! be processed (missing ingredients, unevaluable expressions) become
//! `error` verdicts.

use std::path::Path;

use hojman_core::expr::{neg, Expr, SampleBox};
use hojman_core::geometry::{multiplier_check, normalizer_factor, Multiplier, Normalizer};
use hojman_core::invariants::{
    certify_conservation, invariant_divfree, invariant_multiplier, invariant_nonautonomous,
    invariant_normalizer, InvariantError, InvariantResult,
};
use hojman_core::mechanics::{
    hamiltonian_invariant, hojman_invariant_lagrangian, lagrangian_multiplier, MechanicsError,
};
use hojman_core::numeric::{
    certify_invariant, integrate, write_csv, CertifySuite, NumericError, NumericRun,
    DRIFT_TOLERANCE, RATIO_BAND,
};

use crate::problem::{Dynamics, Problem};
use crate::report::{Record, Verdict};

/// Which construction to run; `Auto` picks the most specific one the
/// supplied ingredients allow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TheoremChoice {
    Auto,
    T21,
    T22,
    T23,
    T41,
    Lagrangian,
    Hamiltonian,
}

/// Derived object to print from a Lagrangian problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ShowWhat {
    Hessian,
    Forces,
    Multiplier,
    Energy,
}

/// A construction that did not produce an invariant: either the
/// hypotheses failed (a verdict) or the input lacked an ingredient.
#[derive(Debug)]
pub enum CmdFailure {
    Fail {
        message: String,
        witness: Option<String>,
    },
    Input(String),
}

fn provenance(problem: &Problem) -> Record {
    Record::Provenance {
        file: problem.path.clone(),
        sha256: problem.sha256.clone(),
        seed: problem.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn finish(mut records: Vec<Record>, verdict: Verdict) -> (Vec<Record>, Verdict) {
    records.push(Record::Verdict { verdict });
    (records, verdict)
}

fn input_error(mut records: Vec<Record>, message: String) -> (Vec<Record>, Verdict) {
    records.push(Record::ProblemError { message });
    finish(records, Verdict::Error)
}

fn push_failure(records: &mut Vec<Record>, message: String, witness: Option<String>) {
    records.push(Record::Failure { message, witness });
}

/// A representative sample point, used as the witness for failures whose
/// evidence is a range rather than a single point.
fn representative_point(sample_box: &SampleBox) -> String {
    sample_box.point(0).to_string()
}

fn map_invariant_error(e: InvariantError, sample_box: &SampleBox) -> CmdFailure {
    match e {
        InvariantError::Precondition {
            condition,
            residual,
            witness,
        } => CmdFailure::Fail {
            message: format!("precondition violated: {condition} (residual {residual:e})"),
            witness: Some(witness.to_string()),
        },
        InvariantError::NoClosedFormFactor { min, max } => CmdFailure::Fail {
            message: format!(
                "no closed-form normalizer factor: pointwise values span [{min}, {max}]; \
                 supply `h` to proceed"
            ),
            witness: Some(representative_point(sample_box)),
        },
        InvariantError::Certification { residual, witness } => CmdFailure::Fail {
            message: format!("constructed integral is not conserved (residual {residual:e})"),
            witness: Some(witness.to_string()),
        },
        InvariantError::NotEvolutionField => CmdFailure::Input(
            "this route needs an evolution field on a time chart (first component 1)"
                .to_string(),
        ),
        InvariantError::Geometry(e) => CmdFailure::Input(e.to_string()),
        InvariantError::Sample(e) => CmdFailure::Input(e.to_string()),
    }
}

fn map_mechanics_error(e: MechanicsError, sample_box: &SampleBox) -> CmdFailure {
    match e {
        MechanicsError::NotSymmetry {
            condition,
            residual,
            witness,
        } => CmdFailure::Fail {
            message: format!("not a symmetry: {condition} fails (residual {residual:e})"),
            witness: Some(witness.to_string()),
        },
        MechanicsError::CertificationFailure {
            what,
            residual,
            witness,
        } => CmdFailure::Fail {
            message: format!("{what} is not numerically zero (residual {residual:e})"),
            witness: Some(witness.to_string()),
        },
        MechanicsError::RouteDisagreement { residual, witness } => CmdFailure::Fail {
            message: format!(
                "closed-form and generic constructions disagree (residual {residual:e})"
            ),
            witness: Some(witness.to_string()),
        },
        MechanicsError::Invariant(inner) => map_invariant_error(inner, sample_box),
        other => CmdFailure::Input(other.to_string()),
    }
}

/// The Hessian determinant as a multiplier on the *working* chart (which
/// for autonomous Lagrangians is the time-extended one, wider than the
/// chart `lagrangian_multiplier` builds on).
fn hessian_multiplier_on_working(
    problem: &Problem,
) -> Result<Option<Multiplier>, CmdFailure> {
    let Dynamics::Lagrangian(ld) = &problem.dynamics else {
        return Ok(None);
    };
    let density = ld.det_hessian().clone();
    let (_, value) = problem
        .sample_box
        .first_valid(|point| density.eval(point))
        .map_err(|e| CmdFailure::Input(e.to_string()))?;
    let signed = if value < 0.0 { neg(density) } else { density };
    let multiplier = Multiplier::new(
        problem.working.chart().clone(),
        signed,
        problem.sample_box.clone(),
    )
    .map_err(|e| CmdFailure::Input(e.to_string()))?;
    Ok(Some(multiplier))
}

fn pick_route(problem: &Problem, choice: TheoremChoice) -> TheoremChoice {
    if choice != TheoremChoice::Auto {
        return choice;
    }
    if matches!(problem.dynamics, Dynamics::Lagrangian(_)) && problem.point_field.is_some() {
        TheoremChoice::Lagrangian
    } else if problem.working.chart().time_coord().is_some() {
        TheoremChoice::T41
    } else if problem.h.is_some() {
        TheoremChoice::T23
    } else if problem.multiplier.is_some() {
        TheoremChoice::T22
    } else {
        TheoremChoice::T21
    }
}

/// Run the selected (or auto-picked) construction on a compiled problem.
pub fn construct(problem: &Problem, choice: TheoremChoice) -> Result<InvariantResult, CmdFailure> {
    let rtol = problem.rtol;
    let sb = &problem.sample_box;
    let symmetry = || {
        problem
            .symmetry
            .as_ref()
            .ok_or_else(|| CmdFailure::Input("missing `symmetry` (or `point_field`)".to_string()))
    };
    // For Lagrangian dynamics the Hessian determinant steps in when no
    // multiplier was supplied.
    let multiplier = match &problem.multiplier {
        Some(r) => Some(r.clone()),
        None => hessian_multiplier_on_working(problem)?,
    };

    match pick_route(problem, choice) {
        TheoremChoice::Auto => unreachable!("pick_route resolves Auto"),
        TheoremChoice::Lagrangian => {
            let Dynamics::Lagrangian(ld) = &problem.dynamics else {
                return Err(CmdFailure::Input(
                    "`--theorem lagrangian` needs a `lagrangian` problem".to_string(),
                ));
            };
            let pf = problem.point_field.as_ref().ok_or_else(|| {
                CmdFailure::Input("the Lagrangian route needs a `point_field`".to_string())
            })?;
            hojman_invariant_lagrangian(pf, ld, sb, rtol)
                .map_err(|e| map_mechanics_error(e, sb))
        }
        TheoremChoice::T41 => {
            let y = symmetry()?;
            invariant_nonautonomous(&problem.working, y, multiplier.as_ref(), sb, rtol)
                .map_err(|e| map_invariant_error(e, sb))
        }
        TheoremChoice::T23 => {
            let y = symmetry()?;
            invariant_normalizer(
                &problem.working,
                y,
                multiplier.as_ref(),
                problem.h.as_ref(),
                sb,
                rtol,
            )
            .map_err(|e| map_invariant_error(e, sb))
        }
        TheoremChoice::T22 => {
            let y = symmetry()?;
            let r = multiplier.as_ref().ok_or_else(|| {
                CmdFailure::Input("missing `multiplier` for this route".to_string())
            })?;
            invariant_multiplier(&problem.working, y, r, sb, rtol)
                .map_err(|e| map_invariant_error(e, sb))
        }
        TheoremChoice::T21 => {
            let y = symmetry()?;
            invariant_divfree(&problem.working, y, sb, rtol)
                .map_err(|e| map_invariant_error(e, sb))
        }
        TheoremChoice::Hamiltonian => {
            let y = symmetry()?;
            hamiltonian_invariant(
                &problem.working,
                y,
                multiplier.as_ref(),
                problem.h.as_ref(),
                sb,
                rtol,
            )
            .map_err(|e| map_mechanics_error(e, sb))
        }
    }
}

fn invariant_record(result: &InvariantResult) -> Record {
    Record::Invariant {
        expression: result.invariant.render(),
        theorem: result.theorem.label().to_string(),
        trivial: result.is_trivial(),
        constant: result.constant_value,
        factor: result.factor.as_ref().map(|h| h.render()),
    }
}

/// `hojman check`: run every structural check the supplied ingredients
/// allow, without constructing an invariant.
pub fn cmd_check(problem: &Problem) -> (Vec<Record>, Verdict) {
    let mut records = vec![provenance(problem)];
    let mut verdict = Verdict::Pass;
    let rtol = problem.rtol;
    let sb = &problem.sample_box;

    if let Some(r) = &problem.multiplier {
        match multiplier_check(&problem.working, r, sb, rtol) {
            Ok(report) => {
                let status = if report.equal { Verdict::Pass } else { Verdict::Fail };
                records.push(Record::Check {
                    name: "multiplier".to_string(),
                    status,
                    detail: format!(
                        "div(X) + X(log R) residual {:e} over {} points",
                        report.worst_residual, report.retained
                    ),
                    witness: (!report.equal).then(|| report.worst_point.to_string()),
                });
                verdict = verdict.and(status);
            }
            Err(e) => return input_error(records, e.to_string()),
        }
    } else if matches!(problem.dynamics, Dynamics::Field) {
        let div = problem.working.divergence();
        match hojman_core::expr::equal_numeric(&div, &Expr::Constant(0.0), sb, rtol) {
            Ok(report) => {
                let status = if report.equal { Verdict::Pass } else { Verdict::Fail };
                records.push(Record::Check {
                    name: "divergence".to_string(),
                    status,
                    detail: format!(
                        "div(X) residual {:e} (no multiplier supplied)",
                        report.worst_residual
                    ),
                    witness: (!report.equal).then(|| report.worst_point.to_string()),
                });
                verdict = verdict.and(status);
            }
            Err(e) => return input_error(records, e.to_string()),
        }
    }

    if let Dynamics::Lagrangian(ld) = &problem.dynamics {
        match lagrangian_multiplier(ld, sb, rtol) {
            Ok(hm) => {
                records.push(Record::Check {
                    name: "hessian multiplier".to_string(),
                    status: Verdict::Pass,
                    detail: format!(
                        "det W = {} certifies as a multiplier{}",
                        ld.det_hessian().render(),
                        if hm.sign_flipped { " (negative orientation)" } else { "" }
                    ),
                    witness: None,
                });
            }
            Err(MechanicsError::CertificationFailure {
                what,
                residual,
                witness,
            }) => {
                records.push(Record::Check {
                    name: "hessian multiplier".to_string(),
                    status: Verdict::Fail,
                    detail: format!("{what} residual {residual:e}"),
                    witness: Some(witness.to_string()),
                });
                verdict = verdict.and(Verdict::Fail);
            }
            Err(e) => return input_error(records, e.to_string()),
        }
    }

    if let Some(y) = &problem.symmetry {
        match normalizer_factor(&problem.working, y, sb, rtol, problem.h.as_ref()) {
            Ok(Normalizer::Commuting) => records.push(Record::Check {
                name: "symmetry".to_string(),
                status: Verdict::Pass,
                detail: "commuting: [Y, X] = 0".to_string(),
                witness: None,
            }),
            Ok(Normalizer::ClosedForm { factor }) => records.push(Record::Check {
                name: "symmetry".to_string(),
                status: Verdict::Pass,
                detail: format!("normalizer with factor h = {}", factor.render()),
                witness: None,
            }),
            Ok(Normalizer::Pointwise { factors }) => {
                let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
                for (_, h) in &factors {
                    min = min.min(*h);
                    max = max.max(*h);
                }
                records.push(Record::Check {
                    name: "symmetry".to_string(),
                    status: Verdict::Pass,
                    detail: format!(
                        "pointwise normalizer: factor spans [{min}, {max}] on {} points",
                        factors.len()
                    ),
                    witness: None,
                });
            }
            Ok(Normalizer::NotNormalizer { witness }) => {
                records.push(Record::Check {
                    name: "symmetry".to_string(),
                    status: Verdict::Fail,
                    detail: "[Y, X] is not proportional to X".to_string(),
                    witness: Some(witness.to_string()),
                });
                verdict = verdict.and(Verdict::Fail);
            }
            Err(e) => return input_error(records, e.to_string()),
        }
    }

    if let Some(candidate) = &problem.candidate {
        match certify_conservation(&problem.working, candidate, sb, rtol) {
            Ok(report) => {
                let status = if report.equal { Verdict::Pass } else { Verdict::Fail };
                records.push(Record::Check {
                    name: "candidate".to_string(),
                    status,
                    detail: format!(
                        "X({}) residual {:e}",
                        candidate.render(),
                        report.worst_residual
                    ),
                    witness: (!report.equal).then(|| report.worst_point.to_string()),
                });
                verdict = verdict.and(status);
            }
            Err(e) => return input_error(records, e.to_string()),
        }
    }

    finish(records, verdict)
}

/// `hojman invariant`: construct a first integral with the selected (or
/// auto-picked) route and report it with its certification.
pub fn cmd_invariant(problem: &Problem, choice: TheoremChoice) -> (Vec<Record>, Verdict) {
    let mut records = vec![provenance(problem)];
    match construct(problem, choice) {
        Ok(result) => {
            records.push(invariant_record(&result));
            records.push(Record::Check {
                name: "conservation".to_string(),
                status: Verdict::Pass,
                detail: format!(
                    "X(I) residual {:e} over {} points",
                    result.certification.worst_residual, result.certification.retained
                ),
                witness: None,
            });
            finish(records, Verdict::Pass)
        }
        Err(CmdFailure::Fail { message, witness }) => {
            push_failure(&mut records, message, witness);
            finish(records, Verdict::Fail)
        }
        Err(CmdFailure::Input(message)) => input_error(records, message),
    }
}

/// `hojman verify`: numeric certification (pointwise plus trajectory
/// drift) of the constructed invariant, or of a supplied `candidate`.
pub fn cmd_verify(
    problem: &Problem,
    choice: TheoremChoice,
    step_override: Option<f64>,
    span_override: Option<(f64, f64)>,
    csv: Option<&Path>,
) -> (Vec<Record>, Verdict) {
    let mut records = vec![provenance(problem)];

    let invariant = if let Some(candidate) = &problem.candidate {
        records.push(Record::Invariant {
            expression: candidate.render(),
            theorem: "candidate".to_string(),
            trivial: false,
            constant: None,
            factor: None,
        });
        candidate.clone()
    } else {
        match construct(problem, choice) {
            Ok(result) => {
                records.push(invariant_record(&result));
                result.invariant
            }
            Err(CmdFailure::Fail { message, witness }) => {
                push_failure(&mut records, message, witness);
                return finish(records, Verdict::Fail);
            }
            Err(CmdFailure::Input(message)) => return input_error(records, message),
        }
    };

    let Some(numeric) = &problem.numeric else {
        return input_error(
            records,
            "`verify` needs a `numeric` section (step, span, x0)".to_string(),
        );
    };
    let step = step_override.unwrap_or(numeric.step);
    if !(step > 0.0 && step.is_finite()) {
        return input_error(records, format!("step must be positive and finite, got {step}"));
    }
    let span = span_override.unwrap_or(numeric.span);
    if !(span.0.is_finite() && span.1.is_finite()) || span.0 == span.1 {
        return input_error(
            records,
            format!("span must be two distinct finite endpoints, got [{}, {}]", span.0, span.1),
        );
    }

    let suite = CertifySuite {
        boxes: vec![problem.sample_box.clone()],
        runs: vec![NumericRun {
            x0: numeric.x0.clone(),
            span,
            step,
        }],
        rtol: problem.rtol,
        drift_tolerance: DRIFT_TOLERANCE,
        ratio_band: RATIO_BAND,
    };
    let cert = match certify_invariant(&problem.working, &invariant, &suite) {
        Ok(cert) => cert,
        Err(e) => return input_error(records, e.to_string()),
    };

    for report in &cert.pointwise {
        let status = if report.equal { Verdict::Pass } else { Verdict::Fail };
        records.push(Record::Check {
            name: "pointwise".to_string(),
            status,
            detail: format!(
                "X(I) residual {:e} over {} points (rtol {:e})",
                report.worst_residual, report.retained, suite.rtol
            ),
            witness: (!report.equal).then(|| report.worst_point.to_string()),
        });
    }
    for dr in &cert.drifts {
        records.push(Record::Drift {
            invariant: dr.invariant.clone(),
            initial: dr.initial_value,
            relative_drift: dr.relative_drift,
            half_step_relative_drift: dr.half_step_relative_drift.is_finite().then_some(
                dr.half_step_relative_drift,
            ),
            per_halving_ratio: dr.per_halving_ratio,
            truncated: dr.truncated,
        });
    }
    for message in &cert.failures {
        push_failure(&mut records, message.clone(), None);
    }

    if let Some(path) = csv {
        let run = &suite.runs[0];
        match integrate(&problem.working, &run.x0, run.span, run.step) {
            Ok(traj) => {
                let mut out = Vec::new();
                if let Err(e) = write_csv(&traj, &mut out) {
                    return input_error(records, format!("cannot format CSV: {e}"));
                }
                if let Err(e) = std::fs::write(path, out) {
                    return input_error(
                        records,
                        format!("cannot write {}: {e}", path.display()),
                    );
                }
                records.push(Record::Trajectory {
                    csv: path.display().to_string(),
                    rows: traj.len(),
                });
            }
            Err(NumericError::Domain { time, source })
            | Err(NumericError::DomainAtState { time, source, .. }) => {
                return input_error(
                    records,
                    format!("trajectory evaluation failed at t = {time}: {source}"),
                );
            }
            Err(e) => return input_error(records, e.to_string()),
        }
    }

    finish(records, if cert.pass { Verdict::Pass } else { Verdict::Fail })
}

/// `hojman lagrangian`: print derived objects and re-certify the Hessian
/// determinant as a multiplier.
pub fn cmd_lagrangian(problem: &Problem, show: Option<ShowWhat>) -> (Vec<Record>, Verdict) {
    let mut records = vec![provenance(problem)];
    let Dynamics::Lagrangian(ld) = &problem.dynamics else {
        return input_error(
            records,
            "`lagrangian` needs a problem with a `lagrangian` section".to_string(),
        );
    };

    let wants = |what: ShowWhat| show.is_none() || show == Some(what);
    let n = ld.system().dim();
    if wants(ShowWhat::Hessian) {
        for i in 0..n {
            for j in 0..n {
                records.push(Record::Object {
                    name: format!("W[{i}][{j}]"),
                    expression: ld.hessian()[i][j].render(),
                });
            }
        }
        records.push(Record::Object {
            name: "det W".to_string(),
            expression: ld.det_hessian().render(),
        });
    }
    if wants(ShowWhat::Forces) {
        for (i, force) in ld.system().forces().iter().enumerate() {
            records.push(Record::Object {
                name: format!("F[{i}]"),
                expression: force.render(),
            });
        }
    }
    if wants(ShowWhat::Energy) {
        records.push(Record::Object {
            name: "energy".to_string(),
            expression: ld.energy().render(),
        });
    }

    match lagrangian_multiplier(ld, &problem.sample_box, problem.rtol) {
        Ok(hm) => {
            if wants(ShowWhat::Multiplier) {
                records.push(Record::Object {
                    name: "multiplier".to_string(),
                    expression: hm.multiplier.density().render(),
                });
            }
            records.push(Record::Check {
                name: "hessian multiplier".to_string(),
                status: Verdict::Pass,
                detail: format!(
                    "div(Gamma) + Gamma(log det W) is numerically zero{}",
                    if hm.sign_flipped { " (negative orientation)" } else { "" }
                ),
                witness: None,
            });
            finish(records, Verdict::Pass)
        }
        Err(MechanicsError::CertificationFailure {
            what,
            residual,
            witness,
        }) => {
            records.push(Record::Check {
                name: "hessian multiplier".to_string(),
                status: Verdict::Fail,
                detail: format!("{what} residual {residual:e}"),
                witness: Some(witness.to_string()),
            });
            finish(records, Verdict::Fail)
        }
        Err(e) => input_error(records, e.to_string()),
    }
}
