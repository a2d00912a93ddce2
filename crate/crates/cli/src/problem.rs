//! Problem-file schema and loading. A problem file is a JSON document that
//! declares exactly one source of dynamics — a vector field, a regular
//! Lagrangian, or second-order forces — together with optional symmetry
//! data (a full symmetry field or a velocity-free point field), an optional
//! multiplier density and normalizer factor, a seeded sampling box, and an
//! optional numeric run.
//!
//! Loading compiles the document into library objects eagerly, so every
//! structural defect (unknown fields, foreign variables, non-positive
//! multiplier, degenerate Lagrangian, uncovered coordinates) surfaces as an
//! input error before any command logic runs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use hojman_core::expr::{Bindings, Expr, ParseError, SampleBox, SampleError};
use hojman_core::geometry::{Chart, GeometryError, Multiplier, VectorField};
use hojman_core::mechanics::{
    lagrangian_analyze, prolong, LagrangianData, MechanicsError, PointField, SecondOrderSystem,
};

/// Problem-file schema version this binary understands.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid problem file {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("unsupported schema_version {found} (this tool reads version {SCHEMA_VERSION})")]
    SchemaVersion { found: u32 },
    #[error("field `{field}`: syntax error in \"{text}\": {source}")]
    BadExpression {
        field: String,
        text: String,
        #[source]
        source: ParseError,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mechanics(#[from] MechanicsError),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    schema_version: u32,
    chart: RawChart,
    vector_field: Option<Vec<String>>,
    symmetry: Option<Vec<String>>,
    multiplier: Option<String>,
    h: Option<String>,
    lagrangian: Option<RawLagrangian>,
    point_field: Option<RawPointField>,
    forces: Option<Vec<String>>,
    candidate: Option<String>,
    #[serde(rename = "box")]
    sample_box: RawBox,
    numeric: Option<RawNumeric>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChart {
    coords: Vec<String>,
    #[serde(default)]
    time: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLagrangian {
    #[serde(rename = "L")]
    l: String,
    n: usize,
    #[serde(default)]
    time_dependent: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPointField {
    #[serde(rename = "X0")]
    x0: String,
    #[serde(rename = "Xi")]
    xi: Vec<String>,
}

/// `seed` and `count` plus one `[lo, hi]` interval per remaining key.
#[derive(Debug, Deserialize)]
struct RawBox {
    seed: u64,
    count: usize,
    #[serde(flatten)]
    intervals: BTreeMap<String, (f64, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNumeric {
    step: f64,
    span: (f64, f64),
    x0: BTreeMap<String, f64>,
}

/// What defines the dynamics.
#[derive(Debug)]
pub enum Dynamics {
    /// The working field was given directly as `vector_field`.
    Field,
    /// Dynamics derive from a regular Lagrangian.
    Lagrangian(LagrangianData),
    /// Dynamics derive from explicit second-order forces.
    Forces(SecondOrderSystem),
}

/// One numeric run from the `numeric` section.
#[derive(Debug, Clone)]
pub struct NumericRunSpec {
    pub step: f64,
    pub span: (f64, f64),
    pub x0: Bindings,
}

/// A fully compiled problem: every expression parsed and validated, the
/// working field constructed, and the effective seed resolved.
#[derive(Debug)]
pub struct Problem {
    pub path: String,
    pub sha256: String,
    pub seed: u64,
    /// The field trajectories integrate and invariants certify against:
    /// the declared vector field, or the (time-extended) second-order
    /// lift for Lagrangian and force dynamics.
    pub working: VectorField,
    pub dynamics: Dynamics,
    /// The symmetry as a full vector field on the working chart; for a
    /// `point_field` this is its prolongation.
    pub symmetry: Option<VectorField>,
    pub point_field: Option<PointField>,
    pub multiplier: Option<Multiplier>,
    pub h: Option<Expr>,
    pub candidate: Option<Expr>,
    pub sample_box: SampleBox,
    pub numeric: Option<NumericRunSpec>,
    /// Relative tolerance every check in this problem runs at.
    pub rtol: f64,
}

fn parse_field(field: &str, text: &str) -> Result<Expr, ProblemError> {
    Expr::parse(text).map_err(|source| ProblemError::BadExpression {
        field: field.to_string(),
        text: text.to_string(),
        source,
    })
}

fn parse_components(field: &str, texts: &[String]) -> Result<Vec<Expr>, ProblemError> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| parse_field(&format!("{field}[{i}]"), t))
        .collect()
}

fn check_vars_in_chart(field: &str, e: &Expr, chart: &Chart) -> Result<(), ProblemError> {
    for v in e.variables() {
        if !chart.coords().iter().any(|c| *c == v) {
            return Err(ProblemError::Invalid(format!(
                "field `{field}` uses variable `{v}` outside the working chart ({})",
                chart.coords().join(", ")
            )));
        }
    }
    Ok(())
}

/// Load and compile a problem file. `seed_override` (flag or environment)
/// takes precedence over the seed stored in the file's box; `rtol` feeds
/// the regularity check of Lagrangian dynamics and is stored for the
/// commands to reuse.
pub fn load_problem(
    path: &Path,
    seed_override: Option<u64>,
    rtol: f64,
) -> Result<Problem, ProblemError> {
    let display = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|source| ProblemError::Io {
        path: display.clone(),
        source,
    })?;
    let sha256 = {
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        format!("{:x}", hasher.finalize())
    };
    let raw: RawProblem =
        serde_json::from_slice(&bytes).map_err(|source| ProblemError::Json {
            path: display.clone(),
            source,
        })?;

    if raw.schema_version != SCHEMA_VERSION {
        return Err(ProblemError::SchemaVersion {
            found: raw.schema_version,
        });
    }

    let sources = [
        raw.vector_field.is_some(),
        raw.lagrangian.is_some(),
        raw.forces.is_some(),
    ]
    .iter()
    .filter(|present| **present)
    .count();
    if sources != 1 {
        return Err(ProblemError::Invalid(
            "exactly one of `vector_field`, `lagrangian`, `forces` must define the dynamics"
                .to_string(),
        ));
    }
    if raw.lagrangian.is_some() && raw.symmetry.is_none() && raw.point_field.is_none() {
        return Err(ProblemError::Invalid(
            "`lagrangian` dynamics need a `point_field` or a `symmetry`".to_string(),
        ));
    }
    if raw.point_field.is_some() && raw.vector_field.is_some() {
        return Err(ProblemError::Invalid(
            "`point_field` needs second-order dynamics (`lagrangian` or `forces`)".to_string(),
        ));
    }
    if raw.point_field.is_some() && raw.symmetry.is_some() {
        return Err(ProblemError::Invalid(
            "give either `point_field` or `symmetry`, not both".to_string(),
        ));
    }

    let seed = seed_override.unwrap_or(raw.sample_box.seed);
    let sample_box = SampleBox::new(
        raw.sample_box
            .intervals
            .iter()
            .map(|(name, interval)| (name.clone(), *interval)),
        seed,
        raw.sample_box.count,
    )?;

    // Dynamics and the working field.
    let (working, dynamics): (VectorField, Dynamics) =
        if let Some(components) = &raw.vector_field {
            let chart = if raw.chart.time {
                Chart::with_time(raw.chart.coords.clone())?
            } else {
                Chart::space(raw.chart.coords.clone())?
            };
            let field = VectorField::new(chart, parse_components("vector_field", components)?)?;
            (field, Dynamics::Field)
        } else if let Some(lag) = &raw.lagrangian {
            if raw.chart.time != lag.time_dependent {
                return Err(ProblemError::Invalid(
                    "`chart.time` must match `lagrangian.time_dependent`".to_string(),
                ));
            }
            let standard = hojman_core::mechanics::standard_coords(lag.n);
            if raw.chart.coords != standard {
                return Err(ProblemError::Invalid(format!(
                    "a Lagrangian with n = {} uses the configuration coordinates ({}); \
                     `chart.coords` lists ({})",
                    lag.n,
                    standard.join(", "),
                    raw.chart.coords.join(", ")
                )));
            }
            let l = parse_field("lagrangian.L", &lag.l)?;
            let ld = lagrangian_analyze(&l, lag.n, lag.time_dependent, &sample_box, rtol)?;
            let working = ld.system().time_extended();
            (working, Dynamics::Lagrangian(ld))
        } else {
            let texts = raw.forces.as_ref().expect("one source is present");
            if raw.chart.coords.len() != texts.len() {
                return Err(ProblemError::Invalid(format!(
                    "{} forces for {} configuration coordinates",
                    texts.len(),
                    raw.chart.coords.len()
                )));
            }
            let forces = parse_components("forces", texts)?;
            let sys =
                SecondOrderSystem::new(raw.chart.coords.clone(), forces, raw.chart.time)?;
            let working = sys.time_extended();
            (working, Dynamics::Forces(sys))
        };

    // The box must cover the working chart so constructors can certify.
    let covered: Vec<&str> = sample_box.variables().collect();
    for coord in working.chart().coords() {
        if !covered.contains(&coord.as_str()) {
            return Err(ProblemError::Invalid(format!(
                "`box` must bound working coordinate `{coord}`"
            )));
        }
    }

    // Symmetry: a full field on the working chart, or a prolonged point field.
    let point_field = match &raw.point_field {
        Some(pf) => {
            let temporal = parse_field("point_field.X0", &pf.x0)?;
            let spatial = parse_components("point_field.Xi", &pf.xi)?;
            Some(PointField::new(temporal, spatial))
        }
        None => None,
    };
    let symmetry = if let Some(components) = &raw.symmetry {
        Some(VectorField::new(
            working.chart().clone(),
            parse_components("symmetry", components)?,
        )?)
    } else if let Some(pf) = &point_field {
        let sys_ref = match &dynamics {
            Dynamics::Lagrangian(ld) => ld.system(),
            Dynamics::Forces(sys) => sys,
            Dynamics::Field => unreachable!("point_field with field dynamics is rejected"),
        };
        Some(prolong(pf, sys_ref)?)
    } else {
        None
    };

    let multiplier = match &raw.multiplier {
        Some(text) => {
            let density = parse_field("multiplier", text)?;
            check_vars_in_chart("multiplier", &density, working.chart())?;
            Some(Multiplier::new(
                working.chart().clone(),
                density,
                sample_box.clone(),
            )?)
        }
        None => None,
    };

    let h = match &raw.h {
        Some(text) => {
            let e = parse_field("h", text)?;
            check_vars_in_chart("h", &e, working.chart())?;
            Some(e)
        }
        None => None,
    };

    let candidate = match &raw.candidate {
        Some(text) => {
            let e = parse_field("candidate", text)?;
            check_vars_in_chart("candidate", &e, working.chart())?;
            Some(e)
        }
        None => None,
    };

    let numeric = match &raw.numeric {
        Some(spec) => {
            if !(spec.step > 0.0 && spec.step.is_finite()) {
                return Err(ProblemError::Invalid(format!(
                    "`numeric.step` must be positive and finite, got {}",
                    spec.step
                )));
            }
            let (a, b) = spec.span;
            if !(a.is_finite() && b.is_finite()) || a == b {
                return Err(ProblemError::Invalid(format!(
                    "`numeric.span` must be two distinct finite endpoints, got [{a}, {b}]"
                )));
            }
            let mut x0 = Bindings::new();
            for (name, value) in &spec.x0 {
                x0.insert(name.clone(), *value);
            }
            for coord in working.chart().coords() {
                if x0.get(coord).is_none() {
                    return Err(ProblemError::Invalid(format!(
                        "`numeric.x0` must bind working coordinate `{coord}`"
                    )));
                }
            }
            Some(NumericRunSpec {
                step: spec.step,
                span: spec.span,
                x0,
            })
        }
        None => None,
    };

    Ok(Problem {
        path: display,
        sha256,
        seed,
        working,
        dynamics,
        symmetry,
        point_field,
        multiplier,
        h,
        candidate,
        sample_box,
        numeric,
        rtol,
    })
}

/// Resolve the effective seed: command-line flag beats the `HOJMAN_SEED`
/// environment variable, which beats the seed stored in the file.
pub fn resolve_seed_override(flag: Option<u64>, env: Option<u64>) -> Option<u64> {
    flag.or(env)
}
