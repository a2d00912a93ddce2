//! Loader tests: every structural defect in a problem file must surface
//! as a typed input error before any command logic runs, and the effective
//! seed must resolve with the documented precedence.

use std::path::PathBuf;

use hojman::problem::{load_problem, Problem, ProblemError};

const RTOL: f64 = 1e-9;

/// Write `json` to a unique temp file, load it, and clean up.
fn load_str(name: &str, json: &str) -> Result<Problem, ProblemError> {
    let path: PathBuf =
        std::env::temp_dir().join(format!("hojman-{name}-{}.json", std::process::id()));
    std::fs::write(&path, json).expect("temp file writes");
    let result = load_problem(&path, None, RTOL);
    let _ = std::fs::remove_file(&path);
    result
}

fn invalid_message(result: Result<Problem, ProblemError>) -> String {
    match result {
        Err(ProblemError::Invalid(message)) => message,
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn exactly_one_dynamics_source_is_required() {
    let none = load_str(
        "no-dynamics",
        r#"{
            "schema_version": 1,
            "chart": { "coords": ["x"], "time": false },
            "box": { "seed": 1, "count": 8, "x": [0, 1] }
        }"#,
    );
    assert!(invalid_message(none).contains("exactly one"));

    let two = load_str(
        "two-dynamics",
        r#"{
            "schema_version": 1,
            "chart": { "coords": ["x"], "time": false },
            "vector_field": ["x"],
            "forces": ["0"],
            "box": { "seed": 1, "count": 8, "x": [0, 1] }
        }"#,
    );
    assert!(invalid_message(two).contains("exactly one"));
}

#[test]
fn unsupported_schema_versions_are_rejected() {
    let result = load_str(
        "schema-version",
        r#"{
            "schema_version": 2,
            "chart": { "coords": ["x"], "time": false },
            "vector_field": ["x"],
            "box": { "seed": 1, "count": 8, "x": [0, 1] }
        }"#,
    );
    assert!(matches!(
        result,
        Err(ProblemError::SchemaVersion { found: 2 })
    ));
}

#[test]
fn unknown_fields_are_rejected() {
    let result = load_str(
        "unknown-field",
        r#"{
            "schema_version": 1,
            "chart": { "coords": ["x"], "time": false },
            "vector_field": ["x"],
            "extra_section": true,
            "box": { "seed": 1, "count": 8, "x": [0, 1] }
        }"#,
    );
    assert!(matches!(result, Err(ProblemError::Json { .. })));
}

#[test]
fn point_fields_pair_only_with_second_order_dynamics() {
    let with_field = load_str(
        "pf-with-field",
        r#"{
            "schema_version": 1,
            "chart": { "coords": ["x", "v"], "time": false },
            "vector_field": ["v", "-x"],
            "point_field": { "X0": "0", "Xi": ["x"] },
            "box": { "seed": 1, "count": 8, "x": [0, 1], "v": [0, 1] }
        }"#,
    );
    assert!(invalid_message(with_field).contains("second-order"));

    let both = load_str(
        "pf-and-symmetry",
        r#"{
            "schema_version": 1,
            "chart": { "coords": ["x"], "time": false },
            "lagrangian": { "L": "v_x^2/2", "n": 1, "time_dependent": false },
            "point_field": { "X0": "0", "Xi": ["x"] },
            "symmetry": ["0", "x", "v_x"],
            "box": { "seed": 1, "count": 8, "t": [0, 1], "x": [0, 1], "v_x": [0.5, 1] }
        }"#,
    );
    assert!(invalid_message(both).contains("not both"));

    let neither = load_str(
        "lagrangian-bare",
        r#"{
            "schema_version": 1,
            "chart": { "coords": ["x"], "time": false },
            "lagrangian": { "L": "v_x^2/2", "n": 1, "time_dependent": false },
            "box": { "seed": 1, "count": 8, "t": [0, 1], "x": [0, 1], "v_x": [0.5, 1] }
        }"#,
    );
    assert!(invalid_message(neither).contains("point_field"));
}

#[test]
fn the_box_must_cover_the_working_chart() {
    // A Lagrangian problem works on the time-extended phase chart, so the
    // box needs `t` even when the Lagrangian is autonomous.
    let result = load_str(
        "box-missing-time",
        r#"{
            "schema_version": 1,
            "chart": { "coords": ["x"], "time": false },
            "lagrangian": { "L": "v_x^2/2", "n": 1, "time_dependent": false },
            "point_field": { "X0": "0", "Xi": ["x"] },
            "box": { "seed": 1, "count": 8, "x": [0, 1], "v_x": [0.5, 1] }
        }"#,
    );
    assert!(invalid_message(result).contains("`t`"));
}

#[test]
fn the_initial_state_must_bind_every_coordinate() {
    let result = load_str(
        "x0-missing",
        r#"{
            "schema_version": 1,
            "chart": { "coords": ["x", "v"], "time": false },
            "vector_field": ["v", "-x"],
            "box": { "seed": 1, "count": 8, "x": [0, 1], "v": [0, 1] },
            "numeric": { "step": 0.001, "span": [0, 1], "x0": { "x": 1 } }
        }"#,
    );
    assert!(invalid_message(result).contains("`v`"));
}

#[test]
fn lagrangian_coordinate_names_are_pinned() {
    let result = load_str(
        "lagrangian-names",
        r#"{
            "schema_version": 1,
            "chart": { "coords": ["q"], "time": false },
            "lagrangian": { "L": "v_q^2/2", "n": 1, "time_dependent": false },
            "point_field": { "X0": "0", "Xi": ["q"] },
            "box": { "seed": 1, "count": 8, "t": [0, 1], "q": [0, 1], "v_q": [0.5, 1] }
        }"#,
    );
    let message = invalid_message(result);
    assert!(message.contains("(x)"), "names the expected coordinates: {message}");
}

#[test]
fn expression_errors_carry_the_field_and_offset() {
    let result = load_str(
        "bad-expression",
        r#"{
            "schema_version": 1,
            "chart": { "coords": ["x", "y"], "time": false },
            "vector_field": ["x", "y"],
            "symmetry": ["y", "0 +"],
            "box": { "seed": 1, "count": 8, "x": [0.5, 1], "y": [0.5, 1] }
        }"#,
    );
    match result {
        Err(ProblemError::BadExpression { field, text, .. }) => {
            assert_eq!(field, "symmetry[1]");
            assert_eq!(text, "0 +");
        }
        other => panic!("expected an expression error, got {other:?}"),
    }
}

#[test]
fn expressions_must_stay_inside_the_working_chart() {
    let result = load_str(
        "foreign-candidate",
        r#"{
            "schema_version": 1,
            "chart": { "coords": ["x", "v"], "time": false },
            "vector_field": ["v", "-x"],
            "candidate": "x + z",
            "box": { "seed": 1, "count": 8, "x": [0, 1], "v": [0, 1] }
        }"#,
    );
    let message = invalid_message(result);
    assert!(message.contains("`z`"), "{message}");
    assert!(message.contains("candidate"), "{message}");
}

#[test]
fn numeric_sections_are_validated_at_load() {
    let zero_step = load_str(
        "zero-step",
        r#"{
            "schema_version": 1,
            "chart": { "coords": ["x"], "time": false },
            "vector_field": ["x"],
            "box": { "seed": 1, "count": 8, "x": [0.5, 1] },
            "numeric": { "step": 0, "span": [0, 1], "x0": { "x": 1 } }
        }"#,
    );
    assert!(invalid_message(zero_step).contains("step"));

    let empty_span = load_str(
        "empty-span",
        r#"{
            "schema_version": 1,
            "chart": { "coords": ["x"], "time": false },
            "vector_field": ["x"],
            "box": { "seed": 1, "count": 8, "x": [0.5, 1] },
            "numeric": { "step": 0.001, "span": [2, 2], "x0": { "x": 1 } }
        }"#,
    );
    assert!(invalid_message(empty_span).contains("span"));
}

#[test]
fn the_seed_override_reaches_the_sample_box() {
    let json = r#"{
        "schema_version": 1,
        "chart": { "coords": ["x"], "time": false },
        "vector_field": ["x"],
        "box": { "seed": 1, "count": 8, "x": [0.5, 1] }
    }"#;
    let path = std::env::temp_dir().join(format!("hojman-seed-{}.json", std::process::id()));
    std::fs::write(&path, json).unwrap();
    let default = load_problem(&path, None, RTOL).unwrap();
    let overridden = load_problem(&path, Some(99), RTOL).unwrap();
    let _ = std::fs::remove_file(&path);

    assert_eq!(default.seed, 1);
    assert_eq!(default.sample_box.seed(), 1);
    assert_eq!(overridden.seed, 99);
    assert_eq!(overridden.sample_box.seed(), 99);
    assert_ne!(
        default.sample_box.point(0),
        overridden.sample_box.point(0),
        "different seeds draw different samples"
    );
}
