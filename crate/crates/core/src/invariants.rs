//! Constructing certified first integrals from symmetries.
//!
//! Every constructor in this module follows the same shape: check the
//! preconditions of one construction route numerically, build the candidate
//! invariant `I` symbolically, then *certify* it by sampling
//! `X(I)` against zero. A result is only returned when the certificate
//! passes, so an [`InvariantResult`] always carries evidence.
//!
//! The four routes, in increasing generality (`R` a Jacobi multiplier of
//! `X`, see [`crate::geometry`]):
//!
//! | route | preconditions                         | invariant                          |
//! |-------|---------------------------------------|------------------------------------|
//! | t21   | `div X = 0`, `[Y, X] = 0`             | `I = div Y`                        |
//! | t22   | `R` multiplier, `[Y, X] = 0`          | `I = div Y + Y(log R)`             |
//! | t23   | `R` multiplier, `[Y, X] = h X`        | `I = div Y + Y(log R) + h`         |
//! | t41   | evolution field, `R` multiplier       | `I = div Y + Y(log R) - X(Y^0)`    |
//!
//! The t41 route is the time-dependent specialisation of t23: for an
//! evolution field the time component of `[Y, X]` is `-X(Y^0)`, which
//! forces the factor `h`, so only the remaining components need checking.
//! With `Y^0 = 0` it collapses to t22 (label `t41i`); otherwise the factor
//! is genuinely present (label `t41ii`).

use crate::expr::{
    add, equal_numeric, neg, sub, Bindings, EqualityReport, Expr, SampleBox, SampleError,
};
use crate::geometry::{
    normalizer_factor, GeometryError, Multiplier, Normalizer, VectorField,
};
use thiserror::Error;

/// Which construction route produced an invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremTag {
    /// Divergence-free field, commuting symmetry.
    DivergenceFree,
    /// Multiplier-weighted divergence, commuting symmetry.
    WithMultiplier,
    /// Normalizing symmetry `[Y, X] = h X` with a closed-form factor.
    WithNormalizer,
    /// Evolution field, symmetry with `X(Y^0) = 0`.
    TimeCommuting,
    /// Evolution field, symmetry with a forced factor `-X(Y^0)`.
    TimeNormalizer,
    /// Second-order system via its Lagrangian's Hessian multiplier.
    LagrangianRoute,
}

impl TheoremTag {
    /// Short stable label used in reports and on the command line.
    pub fn label(self) -> &'static str {
        match self {
            TheoremTag::DivergenceFree => "t21",
            TheoremTag::WithMultiplier => "t22",
            TheoremTag::WithNormalizer => "t23",
            TheoremTag::TimeCommuting => "t41i",
            TheoremTag::TimeNormalizer => "t41ii",
            TheoremTag::LagrangianRoute => "lagrangian",
        }
    }
}

/// A constructed first integral with its certification evidence.
#[derive(Debug, Clone)]
pub struct InvariantResult {
    /// The invariant `I`, simplified.
    pub invariant: Expr,
    /// Route that produced it.
    pub theorem: TheoremTag,
    /// The dynamics field `X`.
    pub field: VectorField,
    /// The symmetry field `Y`.
    pub symmetry: VectorField,
    /// Multiplier used, if the route involved one.
    pub multiplier: Option<Multiplier>,
    /// Normalizer factor `h`, if the route involved one.
    pub factor: Option<Expr>,
    /// When `I` is numerically constant over the sample box, its value.
    /// A constant invariant is genuine but carries no information.
    pub constant_value: Option<f64>,
    /// Evidence that `X(I) = 0` over the sample box.
    pub certification: EqualityReport,
}

impl InvariantResult {
    /// True when the invariant is a numerical constant over the box.
    pub fn is_trivial(&self) -> bool {
        self.constant_value.is_some()
    }
}

/// Errors from invariant construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvariantError {
    #[error("precondition failed: {condition} (worst residual {residual} at {witness})")]
    Precondition {
        condition: String,
        residual: f64,
        witness: Bindings,
    },
    #[error(
        "the pair normalizes only pointwise; no closed-form factor is available \
         (sampled factors range over [{min}, {max}])"
    )]
    NoClosedFormFactor { min: f64, max: f64 },
    #[error("this route needs an evolution field (time component identically 1)")]
    NotEvolutionField,
    #[error(
        "constructed invariant failed certification: X(I) has residual {residual} at {witness}"
    )]
    Certification { residual: f64, witness: Bindings },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// Sample `X(I)` against zero; the caller's evidence that `I` is conserved.
pub fn certify_conservation(
    field: &VectorField,
    invariant: &Expr,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<EqualityReport, SampleError> {
    let derivative = field.lie_derivative(invariant);
    equal_numeric(&derivative, &Expr::Constant(0.0), sample_box, rtol)
}

/// When `e` is numerically constant over the box, return that constant.
pub fn constant_value(
    e: &Expr,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<Option<f64>, SampleError> {
    let (_, value) = sample_box.first_valid(|point| e.eval(point))?;
    let report = equal_numeric(e, &Expr::Constant(value), sample_box, rtol)?;
    Ok(report.equal.then_some(value))
}

fn precondition(condition: &str, report: &EqualityReport) -> InvariantError {
    InvariantError::Precondition {
        condition: condition.to_string(),
        residual: report.worst_residual,
        witness: report.worst_point.clone(),
    }
}

/// Check `[Y, X] = 0` componentwise; on failure name the condition.
fn require_commuting(
    x: &VectorField,
    y: &VectorField,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<(), InvariantError> {
    let bracket = y.lie_bracket(x)?;
    for comp in bracket.components() {
        let report = equal_numeric(comp, &Expr::Constant(0.0), sample_box, rtol)?;
        if !report.equal {
            return Err(precondition("[Y, X] = 0", &report));
        }
    }
    Ok(())
}

fn require_multiplier(
    x: &VectorField,
    r: &Multiplier,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<(), InvariantError> {
    let residual = crate::geometry::multiplier_residual(x, r);
    let report = equal_numeric(&residual, &Expr::Constant(0.0), sample_box, rtol)?;
    if !report.equal {
        return Err(precondition("div(X) + X(log R) = 0", &report));
    }
    Ok(())
}

/// Assemble, certify, and package an invariant whose preconditions have
/// already been established.
fn finish(
    invariant: Expr,
    theorem: TheoremTag,
    field: &VectorField,
    symmetry: &VectorField,
    multiplier: Option<&Multiplier>,
    factor: Option<Expr>,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<InvariantResult, InvariantError> {
    let invariant = invariant.simplify();
    let certification = certify_conservation(field, &invariant, sample_box, rtol)?;
    if !certification.equal {
        return Err(InvariantError::Certification {
            residual: certification.worst_residual,
            witness: certification.worst_point,
        });
    }
    let constant = constant_value(&invariant, sample_box, rtol)?;
    Ok(InvariantResult {
        invariant,
        theorem,
        field: field.clone(),
        symmetry: symmetry.clone(),
        multiplier: multiplier.cloned(),
        factor,
        constant_value: constant,
        certification,
    })
}

/// Divergence-free route: `div X = 0` and `[Y, X] = 0` give `I = div Y`.
pub fn invariant_divfree(
    x: &VectorField,
    y: &VectorField,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<InvariantResult, InvariantError> {
    let div_x = x.divergence();
    let report = equal_numeric(&div_x, &Expr::Constant(0.0), sample_box, rtol)?;
    if !report.equal {
        return Err(precondition("div(X) = 0", &report));
    }
    require_commuting(x, y, sample_box, rtol)?;
    finish(
        y.divergence(),
        TheoremTag::DivergenceFree,
        x,
        y,
        None,
        None,
        sample_box,
        rtol,
    )
}

/// Multiplier route: `R` a Jacobi multiplier of `X` and `[Y, X] = 0` give
/// `I = div Y + Y(log R)`.
pub fn invariant_multiplier(
    x: &VectorField,
    y: &VectorField,
    r: &Multiplier,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<InvariantResult, InvariantError> {
    require_multiplier(x, r, sample_box, rtol)?;
    require_commuting(x, y, sample_box, rtol)?;
    let invariant = add(y.divergence(), y.lie_derivative(&r.log_density()));
    finish(
        invariant,
        TheoremTag::WithMultiplier,
        x,
        y,
        Some(r),
        None,
        sample_box,
        rtol,
    )
}

/// Normalizer route: `[Y, X] = h X` with a closed-form `h` gives
/// `I = div Y + Y(log R) + h`. Pass `r = None` for the trivial multiplier
/// `R = 1` (which requires `div X = 0`); pass `supplied` to provide the
/// factor rather than have it derived.
pub fn invariant_normalizer(
    x: &VectorField,
    y: &VectorField,
    r: Option<&Multiplier>,
    supplied: Option<&Expr>,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<InvariantResult, InvariantError> {
    match r {
        Some(r) => require_multiplier(x, r, sample_box, rtol)?,
        None => {
            let report =
                equal_numeric(&x.divergence(), &Expr::Constant(0.0), sample_box, rtol)?;
            if !report.equal {
                return Err(precondition("div(X) = 0 (no multiplier supplied)", &report));
            }
        }
    }
    let factor = match normalizer_factor(x, y, sample_box, rtol, supplied)? {
        Normalizer::Commuting => Expr::Constant(0.0),
        Normalizer::ClosedForm { factor } => factor,
        Normalizer::Pointwise { factors } => {
            let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
            for (_, h) in &factors {
                min = min.min(*h);
                max = max.max(*h);
            }
            return Err(InvariantError::NoClosedFormFactor { min, max });
        }
        Normalizer::NotNormalizer { witness } => {
            return Err(InvariantError::Precondition {
                condition: "[Y, X] = h X".to_string(),
                residual: f64::NAN,
                witness,
            });
        }
    };
    let mut invariant = y.divergence();
    if let Some(r) = r {
        invariant = add(invariant, y.lie_derivative(&r.log_density()));
    }
    invariant = add(invariant, factor.clone());
    finish(
        invariant,
        TheoremTag::WithNormalizer,
        x,
        y,
        r,
        Some(factor),
        sample_box,
        rtol,
    )
}

/// Time-dependent route for an evolution field `X = d/dt + ...`: the time
/// component of `[Y, X]` forces `h = -X(Y^0)`, so a symmetry satisfying
/// `[Y, X] = h X` yields `I = div Y + Y(log R) - X(Y^0)`. Pass `r = None`
/// for `R = 1` (requires `div X = 0`).
pub fn invariant_nonautonomous(
    x: &VectorField,
    y: &VectorField,
    r: Option<&Multiplier>,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<InvariantResult, InvariantError> {
    if !x.is_evolution() {
        return Err(InvariantError::NotEvolutionField);
    }
    match r {
        Some(r) => require_multiplier(x, r, sample_box, rtol)?,
        None => {
            let report =
                equal_numeric(&x.divergence(), &Expr::Constant(0.0), sample_box, rtol)?;
            if !report.equal {
                return Err(precondition("div(X) = 0 (no multiplier supplied)", &report));
            }
        }
    }
    let factor = neg(x.lie_derivative(&y.components()[0])).simplify();
    // Verify the defining relation componentwise with the forced factor.
    let bracket = y.lie_bracket(x)?;
    for (bi, xi) in bracket.components().iter().zip(x.components()) {
        let expected = crate::expr::mul(factor.clone(), xi.clone()).simplify();
        let report = equal_numeric(bi, &expected, sample_box, rtol)?;
        if !report.equal {
            return Err(precondition("[Y, X] = -X(Y^0) X", &report));
        }
    }
    let zero_factor = constant_value(&factor, sample_box, rtol)?.map(|v| v == 0.0);
    let theorem = if zero_factor == Some(true) {
        TheoremTag::TimeCommuting
    } else {
        TheoremTag::TimeNormalizer
    };
    let mut invariant = y.divergence();
    if let Some(r) = r {
        invariant = add(invariant, y.lie_derivative(&r.log_density()));
    }
    invariant = sub(invariant, x.lie_derivative(&y.components()[0]));
    finish(
        invariant,
        theorem,
        x,
        y,
        r,
        Some(factor),
        sample_box,
        rtol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Chart;
    use crate::DEFAULT_RTOL;

    fn p(src: &str) -> Expr {
        Expr::parse(src).unwrap()
    }

    fn field(coords: &[&str], comps: &[&str]) -> VectorField {
        VectorField::new(
            Chart::space(coords.iter().copied()).unwrap(),
            comps.iter().map(|c| p(c)).collect(),
        )
        .unwrap()
    }

    fn tfield(coords: &[&str], comps: &[&str]) -> VectorField {
        VectorField::new(
            Chart::with_time(coords.iter().copied()).unwrap(),
            comps.iter().map(|c| p(c)).collect(),
        )
        .unwrap()
    }

    fn bx(vars: &[(&str, (f64, f64))], seed: u64) -> SampleBox {
        SampleBox::new(vars.iter().map(|(n, i)| (*n, *i)), seed, 32).unwrap()
    }

    #[test]
    fn divfree_route_dilation_of_the_oscillator() {
        let x = field(&["x", "v"], &["v", "-x"]);
        let y = field(&["x", "v"], &["x", "v"]);
        let b = bx(&[("x", (-2.0, 2.0)), ("v", (-2.0, 2.0))], 21);
        let result = invariant_divfree(&x, &y, &b, DEFAULT_RTOL).unwrap();
        assert_eq!(result.theorem, TheoremTag::DivergenceFree);
        assert_eq!(result.constant_value, Some(2.0));
        assert!(result.is_trivial());
        assert!(result.certification.equal);
    }

    #[test]
    fn divfree_route_can_recover_the_oscillator_energy() {
        // The radius-weighted dilation commutes with the rotation and its
        // divergence is 4(x^2 + v^2): a genuine, nonconstant invariant.
        let x = field(&["x", "v"], &["v", "-x"]);
        let y = field(
            &["x", "v"],
            &["(x^2 + v^2)*x", "(x^2 + v^2)*v"],
        );
        let b = bx(&[("x", (-2.0, 2.0)), ("v", (-2.0, 2.0))], 22);
        let result = invariant_divfree(&x, &y, &b, DEFAULT_RTOL).unwrap();
        assert!(!result.is_trivial());
        let expected = p("4*(x^2 + v^2)");
        assert!(
            equal_numeric(&result.invariant, &expected, &b, DEFAULT_RTOL)
                .unwrap()
                .equal
        );
    }

    #[test]
    fn divfree_route_rejects_a_field_with_divergence() {
        let x = field(&["x", "y"], &["x", "y"]);
        let y = field(&["x", "y"], &["y", "0"]);
        let b = bx(&[("x", (0.5, 2.0)), ("y", (0.5, 2.0))], 23);
        match invariant_divfree(&x, &y, &b, DEFAULT_RTOL).unwrap_err() {
            InvariantError::Precondition { condition, .. } => {
                assert_eq!(condition, "div(X) = 0");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn multiplier_route_dilation_yields_a_ratio_invariant() {
        let x = field(&["x", "y"], &["x", "y"]);
        let y = field(&["x", "y"], &["y", "0"]);
        let b = bx(&[("x", (0.5, 2.0)), ("y", (0.5, 2.0))], 24);
        let r = Multiplier::new(x.chart().clone(), p("1/(x*y)"), b.clone()).unwrap();
        let result = invariant_multiplier(&x, &y, &r, &b, DEFAULT_RTOL).unwrap();
        assert_eq!(result.theorem, TheoremTag::WithMultiplier);
        assert!(!result.is_trivial());
        let expected = p("-(y/x)");
        assert!(
            equal_numeric(&result.invariant, &expected, &b, DEFAULT_RTOL)
                .unwrap()
                .equal
        );
    }

    #[test]
    fn multiplier_route_is_gauge_invariant_under_constant_rescaling() {
        let x = field(&["x", "y"], &["x", "y"]);
        let y = field(&["x", "y"], &["y", "0"]);
        let b = bx(&[("x", (0.5, 2.0)), ("y", (0.5, 2.0))], 25);
        let r1 = Multiplier::new(x.chart().clone(), p("1/(x*y)"), b.clone()).unwrap();
        let r3 = Multiplier::new(x.chart().clone(), p("3/(x*y)"), b.clone()).unwrap();
        let i1 = invariant_multiplier(&x, &y, &r1, &b, DEFAULT_RTOL).unwrap();
        let i3 = invariant_multiplier(&x, &y, &r3, &b, DEFAULT_RTOL).unwrap();
        assert!(
            equal_numeric(&i1.invariant, &i3.invariant, &b, DEFAULT_RTOL)
                .unwrap()
                .equal
        );
    }

    #[test]
    fn multiplier_route_rejects_noncommuting_symmetry() {
        let x = field(&["x", "y"], &["x", "y"]);
        let y = field(&["x", "y"], &["y^2", "x"]);
        let b = bx(&[("x", (0.5, 2.0)), ("y", (0.5, 2.0))], 26);
        let r = Multiplier::new(x.chart().clone(), p("1/(x*y)"), b.clone()).unwrap();
        match invariant_multiplier(&x, &y, &r, &b, DEFAULT_RTOL).unwrap_err() {
            InvariantError::Precondition { condition, .. } => {
                assert_eq!(condition, "[Y, X] = 0");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn normalizer_route_with_supplied_factor() {
        // [Y, X] = X for X = x^2 d/dx, Y = x d/dx; div X != 0 so a
        // multiplier is required: R = 1/x^2 works on x > 0.
        let x = field(&["x"], &["x^2"]);
        let y = field(&["x"], &["x"]);
        let b = bx(&[("x", (0.5, 2.0))], 27);
        let r = Multiplier::new(x.chart().clone(), p("1/x^2"), b.clone()).unwrap();
        let result =
            invariant_normalizer(&x, &y, Some(&r), Some(&p("1")), &b, DEFAULT_RTOL).unwrap();
        assert_eq!(result.theorem, TheoremTag::WithNormalizer);
        assert_eq!(result.factor, Some(p("1")));
        // div Y = 1, Y(log 1/x^2) = -2, h = 1: I = 0.
        assert_eq!(result.constant_value, Some(0.0));
    }

    #[test]
    fn normalizer_route_without_closed_form_is_refused() {
        // Same pair but div X = 2x != 0, so only the pointwise path is
        // available once no factor is supplied and no multiplier given...
        // here supply the multiplier but no factor: the field is not an
        // evolution field, so factors come out pointwise only.
        let x = field(&["x"], &["x^2"]);
        let y = field(&["x"], &["x"]);
        let b = bx(&[("x", (0.5, 2.0))], 28);
        let r = Multiplier::new(x.chart().clone(), p("1/x^2"), b.clone()).unwrap();
        match invariant_normalizer(&x, &y, Some(&r), None, &b, DEFAULT_RTOL).unwrap_err() {
            InvariantError::NoClosedFormFactor { min, max } => {
                assert!((min - 1.0).abs() <= 1e-9 && (max - 1.0).abs() <= 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn normalizer_route_reduces_to_the_commuting_case() {
        let x = field(&["x", "v"], &["v", "-x"]);
        let y = field(&["x", "v"], &["x", "v"]);
        let b = bx(&[("x", (-2.0, 2.0)), ("v", (-2.0, 2.0))], 29);
        let via_normalizer =
            invariant_normalizer(&x, &y, None, None, &b, DEFAULT_RTOL).unwrap();
        let via_divfree = invariant_divfree(&x, &y, &b, DEFAULT_RTOL).unwrap();
        assert_eq!(via_normalizer.factor, Some(Expr::Constant(0.0)));
        assert!(equal_numeric(
            &via_normalizer.invariant,
            &via_divfree.invariant,
            &b,
            DEFAULT_RTOL
        )
        .unwrap()
        .equal);
    }

    #[test]
    fn nonautonomous_route_with_forced_factor() {
        // X = d/dt + t d/dx, Y = t d/dt + 2x d/dx: h = -X(t) = -1 and
        // I = (1 + 2) + 0 - 1 = 2.
        let x = tfield(&["t", "x"], &["1", "t"]);
        let y = tfield(&["t", "x"], &["t", "2*x"]);
        let b = bx(&[("t", (0.5, 2.0)), ("x", (0.5, 2.0))], 30);
        let result = invariant_nonautonomous(&x, &y, None, &b, DEFAULT_RTOL).unwrap();
        assert_eq!(result.theorem, TheoremTag::TimeNormalizer);
        assert_eq!(result.constant_value, Some(2.0));
        let h = result.factor.unwrap();
        assert!(equal_numeric(&h, &p("-1"), &b, DEFAULT_RTOL).unwrap().equal);
    }

    #[test]
    fn nonautonomous_route_commuting_case_with_multiplier() {
        // X = d/dt - t x d/dx has div X = -t, with multiplier
        // R = exp(t^2/2); Y = x d/dx commutes and Y^0 = 0.
        let x = tfield(&["t", "x"], &["1", "-(t*x)"]);
        let y = tfield(&["t", "x"], &["0", "x"]);
        let b = bx(&[("t", (0.0, 1.0)), ("x", (0.5, 2.0))], 31);
        let r = Multiplier::new(x.chart().clone(), p("exp(t^2/2)"), b.clone()).unwrap();
        let result = invariant_nonautonomous(&x, &y, Some(&r), &b, DEFAULT_RTOL).unwrap();
        assert_eq!(result.theorem, TheoremTag::TimeCommuting);
        assert_eq!(result.constant_value, Some(1.0));
    }

    #[test]
    fn nonautonomous_route_requires_an_evolution_field() {
        let x = field(&["x", "v"], &["v", "-x"]);
        let y = field(&["x", "v"], &["x", "v"]);
        let b = bx(&[("x", (-2.0, 2.0)), ("v", (-2.0, 2.0))], 32);
        assert_eq!(
            invariant_nonautonomous(&x, &y, None, &b, DEFAULT_RTOL).unwrap_err(),
            InvariantError::NotEvolutionField
        );
    }

    #[test]
    fn nonautonomous_route_rejects_a_non_symmetry() {
        let x = tfield(&["t", "x"], &["1", "t"]);
        let y = tfield(&["t", "x"], &["0", "x^2"]);
        let b = bx(&[("t", (0.5, 2.0)), ("x", (0.5, 2.0))], 33);
        match invariant_nonautonomous(&x, &y, None, &b, DEFAULT_RTOL).unwrap_err() {
            InvariantError::Precondition { condition, .. } => {
                assert_eq!(condition, "[Y, X] = -X(Y^0) X");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn certification_evidence_is_attached() {
        let x = field(&["x", "v"], &["v", "-x"]);
        let y = field(&["x", "v"], &["x", "v"]);
        let b = bx(&[("x", (-2.0, 2.0)), ("v", (-2.0, 2.0))], 34);
        let result = invariant_divfree(&x, &y, &b, DEFAULT_RTOL).unwrap();
        assert_eq!(result.certification.retained, 32);
        assert!(result.certification.worst_residual <= DEFAULT_RTOL);
    }

    #[test]
    fn labels_are_stable() {
        assert_eq!(TheoremTag::DivergenceFree.label(), "t21");
        assert_eq!(TheoremTag::WithMultiplier.label(), "t22");
        assert_eq!(TheoremTag::WithNormalizer.label(), "t23");
        assert_eq!(TheoremTag::TimeCommuting.label(), "t41i");
        assert_eq!(TheoremTag::TimeNormalizer.label(), "t41ii");
        assert_eq!(TheoremTag::LagrangianRoute.label(), "lagrangian");
    }
}
