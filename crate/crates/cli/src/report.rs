//! Report records and emission. A command produces an ordered list of
//! [`Record`]s ending in a verdict; `--json` prints one JSON object per
//! line (newline-delimited JSON), otherwise a human-readable line each.
//! Records carry no timestamps and all floats print in their shortest
//! round-trip form, so identical inputs produce byte-identical reports.

use serde::Serialize;

/// Overall outcome of a command, also used as the status of individual
/// checks. Maps onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Error => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Error => "error",
        }
    }

    /// Combine check outcomes: any error dominates, then any failure.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Error, _) | (_, Verdict::Error) => Verdict::Error,
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            _ => Verdict::Pass,
        }
    }
}

/// One line of a report.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    /// Input identity: file path, content hash, effective seed, tool version.
    Provenance {
        file: String,
        sha256: String,
        seed: u64,
        version: String,
    },
    /// One structural check with its outcome.
    Check {
        name: String,
        status: Verdict,
        detail: String,
        witness: Option<String>,
    },
    /// A constructed (or supplied) first-integral candidate.
    Invariant {
        expression: String,
        theorem: String,
        trivial: bool,
        constant: Option<f64>,
        factor: Option<String>,
    },
    /// A derived symbolic object requested from a Lagrangian.
    Object { name: String, expression: String },
    /// Drift measurement along one numeric run.
    Drift {
        invariant: String,
        initial: f64,
        relative_drift: f64,
        half_step_relative_drift: Option<f64>,
        per_halving_ratio: Option<f64>,
        truncated: bool,
    },
    /// Trajectory exported to CSV.
    Trajectory { csv: String, rows: usize },
    /// A check-level failure with its reason.
    Failure {
        message: String,
        witness: Option<String>,
    },
    /// The input could not be processed.
    ProblemError { message: String },
    /// Final verdict; always the last record.
    Verdict { verdict: Verdict },
}

fn human(record: &Record) -> String {
    match record {
        Record::Provenance {
            file,
            sha256,
            seed,
            version,
        } => format!("input: {file} sha256={sha256} seed={seed} (hojman {version})"),
        Record::Check {
            name,
            status,
            detail,
            witness,
        } => {
            let mut line = format!("check {name}: {} — {detail}", status.label());
            if let Some(w) = witness {
                line.push_str(&format!(" at {w}"));
            }
            line
        }
        Record::Invariant {
            expression,
            theorem,
            trivial,
            constant,
            factor,
        } => {
            let mut line = format!("invariant [{theorem}]: {expression}");
            if let Some(c) = constant {
                line.push_str(&format!(" (constant {c})"));
            }
            if *trivial {
                line.push_str(" [trivial]");
            }
            if let Some(h) = factor {
                line.push_str(&format!(" with factor h = {h}"));
            }
            line
        }
        Record::Object { name, expression } => format!("{name}: {expression}"),
        Record::Drift {
            invariant,
            initial,
            relative_drift,
            half_step_relative_drift,
            per_halving_ratio,
            truncated,
        } => {
            let half = match half_step_relative_drift {
                Some(v) => format!("{v:e}"),
                None => "n/a".to_string(),
            };
            let ratio = match per_halving_ratio {
                Some(r) => format!("{r}"),
                None => "below noise floor".to_string(),
            };
            let mut line = format!(
                "drift of {invariant}: initial {initial}, relative {relative_drift:e}, \
                 half-step {half}, per-halving ratio {ratio}"
            );
            if *truncated {
                line.push_str(" [truncated]");
            }
            line
        }
        Record::Trajectory { csv, rows } => format!("trajectory: {rows} rows -> {csv}"),
        Record::Failure { message, witness } => {
            let mut line = format!("failure: {message}");
            if let Some(w) = witness {
                line.push_str(&format!(" at {w}"));
            }
            line
        }
        Record::ProblemError { message } => format!("error: {message}"),
        Record::Verdict { verdict } => format!("verdict: {}", verdict.label()),
    }
}

/// Print the report to stdout, one record per line. Stops quietly when
/// the consumer closes the pipe; the process exit code still carries the
/// verdict.
pub fn emit(records: &[Record], json: bool) {
    use std::io::Write;

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for record in records {
        let line = if json {
            serde_json::to_string(record).expect("report records serialize")
        } else {
            human(record)
        };
        if writeln!(out, "{line}").is_err() {
            return;
        }
    }
}

/// Extract the final verdict from an assembled report.
pub fn final_verdict(records: &[Record]) -> Verdict {
    for record in records.iter().rev() {
        if let Record::Verdict { verdict } = record {
            return *verdict;
        }
    }
    Verdict::Error
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_worst_outcome_wins_when_combining() {
        assert_eq!(Verdict::Pass.and(Verdict::Pass), Verdict::Pass);
        assert_eq!(Verdict::Pass.and(Verdict::Fail), Verdict::Fail);
        assert_eq!(Verdict::Fail.and(Verdict::Pass), Verdict::Fail);
        assert_eq!(Verdict::Fail.and(Verdict::Error), Verdict::Error);
        assert_eq!(Verdict::Error.and(Verdict::Fail), Verdict::Error);
    }

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(Verdict::Pass.exit_code(), 0);
        assert_eq!(Verdict::Fail.exit_code(), 1);
        assert_eq!(Verdict::Error.exit_code(), 2);
    }

    #[test]
    fn the_final_verdict_is_the_last_one_reported() {
        let records = [
            Record::Verdict {
                verdict: Verdict::Pass,
            },
            Record::Verdict {
                verdict: Verdict::Fail,
            },
        ];
        assert_eq!(final_verdict(&records), Verdict::Fail);
        assert_eq!(final_verdict(&[]), Verdict::Error);
    }

    #[test]
    fn records_serialize_as_tagged_single_lines() {
        let record = Record::Check {
            name: "divergence".to_string(),
            status: Verdict::Pass,
            detail: "residual 0".to_string(),
            witness: None,
        };
        let line = serde_json::to_string(&record).expect("records serialize");
        assert!(line.contains(r#""record":"check""#));
        assert!(line.contains(r#""status":"pass""#));
        assert!(!line.contains('\n'));
    }

    #[test]
    fn non_finite_floats_degrade_to_null_not_panic() {
        let record = Record::Drift {
            invariant: "x".to_string(),
            initial: f64::NAN,
            relative_drift: f64::INFINITY,
            half_step_relative_drift: None,
            per_halving_ratio: None,
            truncated: false,
        };
        let line = serde_json::to_string(&record).expect("records serialize");
        assert!(line.contains(r#""initial":null"#));
        assert!(line.contains(r#""relative_drift":null"#));
    }
}
