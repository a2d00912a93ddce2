//! Trajectory integration and dynamical certification.
//!
//! The pointwise checks elsewhere in this crate sample algebraic
//! identities; this module supplies the complementary dynamical evidence.
//! [`integrate`] runs classic fixed-step fourth-order Runge-Kutta on any
//! vector field (fixed-step on purpose: drift-versus-step analysis is an
//! acceptance instrument, so the step must be exactly known), [`drift`]
//! measures how well a candidate invariant is conserved along a
//! trajectory, and [`certify_invariant`] combines both kinds of evidence
//! into a verdict.
//!
//! Drift of a true invariant of a smooth field shrinks like `step^4`, so
//! halving the step should divide it by roughly 16. The measured ratio is
//! only meaningful while truncation error dominates rounding error:
//! really well-conserved quantities (constants, or quantities the
//! integrator happens to preserve exactly) sit at the rounding floor where
//! the ratio is noise. [`drift`] therefore reports the ratio as `None`
//! whenever either measurement falls below [`RATIO_NOISE_FLOOR`], and
//! [`certify_invariant`] treats a missing ratio as "not assessable" rather
//! than a failure.

use crate::expr::{equal_numeric, Bindings, EqualityReport, EvalError, Expr, SampleBox, SampleError};
use crate::geometry::{Chart, VectorField};
use thiserror::Error;

/// Integration halts once any coordinate magnitude exceeds this.
pub const BLOWUP_LIMIT: f64 = 1e12;

/// Default bound on relative drift for a certified invariant.
pub const DRIFT_TOLERANCE: f64 = 1e-6;

/// Acceptable per-halving drift ratio band for a fourth-order method.
pub const RATIO_BAND: (f64, f64) = (12.0, 20.0);

/// Relative drifts below this are rounding noise; no ratio is reported.
pub const RATIO_NOISE_FLOOR: f64 = 1e-9;

/// Errors from integration and drift measurement.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("step must be a positive finite number, got {0}")]
    BadStep(f64),
    #[error("time span must have distinct finite endpoints")]
    BadSpan,
    #[error("initial state does not bind coordinate `{0}`")]
    UnboundCoordinate(String),
    #[error("expression uses `{0}`, which is not a trajectory coordinate")]
    ForeignVariable(String),
    #[error("component evaluation failed at t = {time}: {source}")]
    Domain { time: f64, source: EvalError },
    #[error("invariant evaluation failed at state {index} (t = {time}): {source}")]
    DomainAtState {
        index: usize,
        time: f64,
        source: EvalError,
    },
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// The integration scheme; only classic Runge-Kutta is provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Rk4 => "rk4",
        }
    }
}

/// A computed integral curve: one state row per time.
#[derive(Debug, Clone)]
pub struct Trajectory {
    chart: Chart,
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    step: f64,
    method: Method,
    truncated_at: Option<f64>,
}

impl Trajectory {
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Monotone in the direction of integration (decreasing for a
    /// backward span).
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Time at which integration hit the blow-up guard, if it did.
    pub fn truncated_at(&self) -> Option<f64> {
        self.truncated_at
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("at least the initial state")
    }

    /// Bind a state row to the chart's coordinate names.
    pub fn bindings_at(&self, index: usize) -> Bindings {
        self.chart
            .coords()
            .iter()
            .zip(&self.states[index])
            .map(|(name, value)| (name.clone(), *value))
            .collect()
    }
}

fn eval_components(
    field: &VectorField,
    coords: &[String],
    state: &[f64],
) -> Result<Vec<f64>, EvalError> {
    field
        .components()
        .iter()
        .map(|c| {
            c.eval_with(&mut |name: &str| {
                coords.iter().position(|c| c == name).map(|i| state[i])
            })
        })
        .collect()
}

fn within_limits(state: &[f64]) -> bool {
    state.iter().all(|v| v.is_finite() && v.abs() <= BLOWUP_LIMIT)
}

/// One classic Runge-Kutta update. `Ok(None)` marks an overflow inside a
/// stage, which the caller treats as a blow-up rather than an error.
fn rk4_step(
    field: &VectorField,
    coords: &[String],
    state: &[f64],
    h: f64,
) -> Result<Option<Vec<f64>>, EvalError> {
    let combine = |k: &[f64], c: f64| -> Vec<f64> {
        state.iter().zip(k).map(|(y, ki)| y + c * ki).collect()
    };
    let result = (|| -> Result<Vec<f64>, EvalError> {
        let k1 = eval_components(field, coords, state)?;
        let k2 = eval_components(field, coords, &combine(&k1, h / 2.0))?;
        let k3 = eval_components(field, coords, &combine(&k2, h / 2.0))?;
        let k4 = eval_components(field, coords, &combine(&k3, h))?;
        Ok(state
            .iter()
            .enumerate()
            .map(|(i, y)| y + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    })();
    match result {
        Ok(next) => Ok(Some(next)),
        Err(EvalError::Domain {
            kind: crate::expr::DomainKind::NonFinite,
            ..
        }) => Ok(None),
        Err(other) => Err(other),
    }
}

fn wrap_step_error(source: EvalError, time: f64) -> NumericError {
    NumericError::Domain { time, source }
}

/// Integrate the flow of `field` from `x0` over `span` with the given
/// (positive) step; a backward span integrates with a negative step of the
/// same magnitude. The final step is shortened to land exactly on the
/// endpoint. Hitting the blow-up guard truncates the trajectory instead of
/// failing; see [`Trajectory::truncated_at`].
pub fn integrate(
    field: &VectorField,
    x0: &Bindings,
    span: (f64, f64),
    step: f64,
) -> Result<Trajectory, NumericError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(NumericError::BadStep(step));
    }
    let (t0, t1) = span;
    if !(t0.is_finite() && t1.is_finite()) || t0 == t1 {
        return Err(NumericError::BadSpan);
    }
    let coords = field.chart().coords().to_vec();
    let mut state: Vec<f64> = Vec::with_capacity(coords.len());
    for name in &coords {
        match x0.get(name) {
            Some(v) => state.push(v),
            None => return Err(NumericError::UnboundCoordinate(name.clone())),
        }
    }

    let total = t1 - t0;
    let h = step.copysign(total);
    let full_steps = (total / h).floor() as u64;
    let remainder = total - full_steps as f64 * h;

    let mut times = vec![t0];
    let mut states = vec![state.clone()];
    let mut truncated_at = None;

    for i in 1..=full_steps {
        let t_prev = t0 + (i - 1) as f64 * h;
        let t_next = t0 + i as f64 * h;
        match rk4_step(field, &coords, &state, h).map_err(|e| wrap_step_error(e, t_prev))? {
            Some(next) if within_limits(&next) => {
                times.push(t_next);
                states.push(next.clone());
                state = next;
            }
            _ => {
                truncated_at = Some(t_next);
                break;
            }
        }
    }
    if truncated_at.is_none() {
        if remainder.abs() > step * 1e-9 {
            let t_prev = t0 + full_steps as f64 * h;
            match rk4_step(field, &coords, &state, remainder)
                .map_err(|e| wrap_step_error(e, t_prev))?
            {
                Some(next) if within_limits(&next) => {
                    times.push(t1);
                    states.push(next);
                }
                _ => truncated_at = Some(t1),
            }
        } else if states.len() > 1 {
            // The grid landed on the endpoint up to rounding; label it so.
            *times.last_mut().expect("nonempty") = t1;
        }
    }

    Ok(Trajectory {
        chart: field.chart().clone(),
        times,
        states,
        step,
        method: Method::Rk4,
        truncated_at,
    })
}

/// How well an expression is conserved along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    /// The measured expression, rendered.
    pub invariant: String,
    /// Its value at the initial state.
    pub initial_value: f64,
    /// Largest `|I(t) - I(t0)|` along the trajectory.
    pub max_abs_drift: f64,
    /// `max_abs_drift / (1 + |initial_value|)`.
    pub relative_drift: f64,
    /// The same measurement on a re-integration at half the step.
    pub half_step_relative_drift: f64,
    /// `relative_drift / half_step_relative_drift`, reported only when
    /// both measurements exceed [`RATIO_NOISE_FLOOR`]; `None` means the
    /// drift sits at the rounding floor and carries no order information.
    pub per_halving_ratio: Option<f64>,
    /// True when either trajectory hit the blow-up guard.
    pub truncated: bool,
}

fn values_along(
    traj: &Trajectory,
    invariant: &Expr,
) -> Result<Vec<f64>, NumericError> {
    let coords = traj.chart().coords();
    traj.states()
        .iter()
        .enumerate()
        .map(|(index, state)| {
            invariant
                .eval_with(&mut |name: &str| {
                    coords.iter().position(|c| c == name).map(|i| state[i])
                })
                .map_err(|source| NumericError::DomainAtState {
                    index,
                    time: traj.times()[index],
                    source,
                })
        })
        .collect()
}

fn relative_drift_of(values: &[f64]) -> (f64, f64, f64) {
    let initial = values[0];
    let max_abs = values
        .iter()
        .map(|v| (v - initial).abs())
        .fold(0.0_f64, f64::max);
    (initial, max_abs, max_abs / (1.0 + initial.abs()))
}

/// Measure the drift of `invariant` along `traj`, re-integrating `field`
/// at half the step to estimate how the drift scales.
pub fn drift(
    field: &VectorField,
    traj: &Trajectory,
    invariant: &Expr,
) -> Result<DriftReport, NumericError> {
    for variable in invariant.variables() {
        if !traj.chart().coords().contains(&variable) {
            return Err(NumericError::ForeignVariable(variable));
        }
    }
    let values = values_along(traj, invariant)?;
    let (initial_value, max_abs_drift, relative_drift) = relative_drift_of(&values);

    let mut truncated = traj.truncated_at().is_some();
    let half_step_relative_drift;
    if truncated {
        // No comparable half-step run exists for a truncated trajectory.
        half_step_relative_drift = f64::NAN;
    } else {
        let span = (traj.times()[0], *traj.times().last().expect("nonempty"));
        let half = integrate(field, &traj.bindings_at(0), span, traj.step() / 2.0)?;
        truncated |= half.truncated_at().is_some();
        let half_values = values_along(&half, invariant)?;
        half_step_relative_drift = relative_drift_of(&half_values).2;
    }

    let per_halving_ratio = (!truncated
        && relative_drift > RATIO_NOISE_FLOOR
        && half_step_relative_drift > RATIO_NOISE_FLOOR)
        .then(|| relative_drift / half_step_relative_drift);

    Ok(DriftReport {
        invariant: invariant.render(),
        initial_value,
        max_abs_drift,
        relative_drift,
        half_step_relative_drift,
        per_halving_ratio,
        truncated,
    })
}

/// One numeric run of a certification suite.
#[derive(Debug, Clone)]
pub struct NumericRun {
    pub x0: Bindings,
    pub span: (f64, f64),
    pub step: f64,
}

/// Pointwise boxes plus numeric runs, with all tolerances pinned.
#[derive(Debug, Clone)]
pub struct CertifySuite {
    pub boxes: Vec<SampleBox>,
    pub runs: Vec<NumericRun>,
    pub rtol: f64,
    pub drift_tolerance: f64,
    pub ratio_band: (f64, f64),
}

impl CertifySuite {
    /// One box and one run under the default tolerances.
    pub fn single(sample_box: SampleBox, x0: Bindings, span: (f64, f64), step: f64) -> CertifySuite {
        CertifySuite {
            boxes: vec![sample_box],
            runs: vec![NumericRun { x0, span, step }],
            rtol: crate::DEFAULT_RTOL,
            drift_tolerance: DRIFT_TOLERANCE,
            ratio_band: RATIO_BAND,
        }
    }
}

/// Combined pointwise and dynamical evidence for one invariant.
#[derive(Debug, Clone)]
pub struct Certification {
    /// True when every check passed.
    pub pass: bool,
    /// One directional-derivative report per box.
    pub pointwise: Vec<EqualityReport>,
    /// One drift report per run.
    pub drifts: Vec<DriftReport>,
    /// Human-readable reasons for failure; empty when `pass`.
    pub failures: Vec<String>,
}

/// Check `field(invariant) = 0` on every box and bounded drift on every
/// run. A failure is a verdict, not an error; errors are reserved for
/// unevaluable inputs.
pub fn certify_invariant(
    field: &VectorField,
    invariant: &Expr,
    suite: &CertifySuite,
) -> Result<Certification, NumericError> {
    let mut failures = Vec::new();

    let derivative = field.lie_derivative(invariant);
    let mut pointwise = Vec::with_capacity(suite.boxes.len());
    for (i, sample_box) in suite.boxes.iter().enumerate() {
        let report = equal_numeric(&derivative, &Expr::Constant(0.0), sample_box, suite.rtol)?;
        if !report.equal {
            failures.push(format!(
                "box {i}: directional derivative residual {} at {} exceeds rtol {}",
                report.worst_residual, report.worst_point, suite.rtol
            ));
        }
        pointwise.push(report);
    }

    let mut drifts = Vec::with_capacity(suite.runs.len());
    for (i, run) in suite.runs.iter().enumerate() {
        let traj = integrate(field, &run.x0, run.span, run.step)?;
        let report = drift(field, &traj, invariant)?;
        if let Some(t) = traj.truncated_at() {
            failures.push(format!("run {i}: trajectory truncated at t = {t}"));
        }
        if !(report.relative_drift <= suite.drift_tolerance) {
            failures.push(format!(
                "run {i}: relative drift {} exceeds {}",
                report.relative_drift, suite.drift_tolerance
            ));
        }
        if let Some(ratio) = report.per_halving_ratio {
            let (lo, hi) = suite.ratio_band;
            if !(lo <= ratio && ratio <= hi) {
                failures.push(format!(
                    "run {i}: halving ratio {ratio} outside [{lo}, {hi}]"
                ));
            }
        }
        drifts.push(report);
    }

    Ok(Certification {
        pass: failures.is_empty(),
        pointwise,
        drifts,
        failures,
    })
}

/// Write a trajectory as CSV: a `t_param` column followed by one column
/// per coordinate, 17 significant digits throughout.
pub fn write_csv<W: std::io::Write>(traj: &Trajectory, out: &mut W) -> std::io::Result<()> {
    write!(out, "t_param")?;
    for name in traj.chart().coords() {
        write!(out, ",{name}")?;
    }
    writeln!(out)?;
    for (t, state) in traj.times().iter().zip(traj.states()) {
        write!(out, "{t:.16e}")?;
        for v in state {
            write!(out, ",{v:.16e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}
