//! Charts, vector fields, and Jacobi multipliers.
//!
//! A [`VectorField`] is a tuple of expressions over a [`Chart`]'s
//! coordinates; for nonautonomous systems the time coordinate is an
//! ordinary chart coordinate (always the first one) and a field whose time
//! component is the constant `1` is flagged as an evolution field (its
//! integral curves advance time at unit rate, `dt/ds = 1`).
//!
//! A [`Multiplier`] is a positive density `R` satisfying
//! `div(X) + X(log R) = 0`, equivalently `div(R*X) = 0`: the weighted
//! volume `R dx^1 ... dx^n` is preserved by the flow of `X`. Positivity is
//! checked at construction by sampling; the defining identity is checked by
//! [`is_multiplier`].
//!
//! The workhorse identity relating brackets and divergences,
//!
//! ```plain
//! X(div Y) - Y(div X) = div([X, Y])
//! ```
//!
//! is exposed as a residual check ([`bracket_divergence_residual`]) and
//! property-tested against random fields; everything the invariant
//! constructors do rests on it.

use crate::expr::{
    add, equal_numeric, mul, sub, Bindings, EqualityReport, EvalError, Expr, Func, SampleBox,
    SampleError,
};
use thiserror::Error;

/// Direction-degeneracy threshold: a component of `X` counts as usable for
/// extracting a pointwise normalizer factor only when its magnitude
/// exceeds this.
pub const DIRECTION_EPSILON: f64 = 1e-8;

/// Errors from chart, field, and multiplier construction and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("coordinate `{0}` is not a valid identifier")]
    BadCoordinate(String),
    #[error("duplicate coordinate `{0}`")]
    DuplicateCoordinate(String),
    #[error("chart has no coordinates")]
    EmptyChart,
    #[error("expected {expected} components for the chart, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("component `{component}` uses `{variable}`, which is not a chart coordinate")]
    ForeignVariable { component: String, variable: String },
    #[error("fields live on different charts")]
    ChartMismatch,
    #[error("multiplier is not positive: R = {value} at {witness}")]
    NotPositive { value: f64, witness: Bindings },
    #[error(
        "cannot extract a pointwise factor: every component of the field is below \
         {DIRECTION_EPSILON} at {degenerate} of the sampled points"
    )]
    DegenerateDirection { degenerate: usize },
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// An ordered coordinate system, optionally with a distinguished time
/// coordinate (which is always the first coordinate).
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    coords: Vec<String>,
    has_time: bool,
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    fn build(coords: Vec<String>, has_time: bool) -> Result<Chart, GeometryError> {
        if coords.is_empty() {
            return Err(GeometryError::EmptyChart);
        }
        for (i, name) in coords.iter().enumerate() {
            if !valid_identifier(name) {
                return Err(GeometryError::BadCoordinate(name.clone()));
            }
            if coords[..i].contains(name) {
                return Err(GeometryError::DuplicateCoordinate(name.clone()));
            }
        }
        Ok(Chart { coords, has_time })
    }

    /// Chart with no time coordinate.
    pub fn space<S: Into<String>>(coords: impl IntoIterator<Item = S>) -> Result<Chart, GeometryError> {
        Chart::build(coords.into_iter().map(Into::into).collect(), false)
    }

    /// Chart whose first coordinate is time.
    pub fn with_time<S: Into<String>>(
        coords: impl IntoIterator<Item = S>,
    ) -> Result<Chart, GeometryError> {
        Chart::build(coords.into_iter().map(Into::into).collect(), true)
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The time coordinate's name, when the chart has one.
    pub fn time_coord(&self) -> Option<&str> {
        self.has_time.then(|| self.coords[0].as_str())
    }

    fn contains(&self, name: &str) -> bool {
        self.coords.iter().any(|c| c == name)
    }
}

/// A vector field: one component expression per chart coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    chart: Chart,
    components: Vec<Expr>,
    evolution: bool,
}

impl VectorField {
    /// Build a field over `chart`, validating the component count and that
    /// every variable used is a chart coordinate.
    pub fn new(chart: Chart, components: Vec<Expr>) -> Result<VectorField, GeometryError> {
        if components.len() != chart.dim() {
            return Err(GeometryError::ComponentCount {
                expected: chart.dim(),
                got: components.len(),
            });
        }
        for comp in &components {
            for variable in comp.variables() {
                if !chart.contains(&variable) {
                    return Err(GeometryError::ForeignVariable {
                        component: comp.render(),
                        variable,
                    });
                }
            }
        }
        let evolution = chart.has_time && components[0].is_const(1.0);
        Ok(VectorField {
            chart,
            components,
            evolution,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    /// True when the chart has time and the time component is the literal
    /// constant `1`, i.e. the field generates an evolution `dt/ds = 1`.
    pub fn is_evolution(&self) -> bool {
        self.evolution
    }

    /// Directional (Lie) derivative of a function: `X(f) = sum X^i df/dx^i`.
    pub fn lie_derivative(&self, f: &Expr) -> Expr {
        let mut out = Expr::Constant(0.0);
        for (coord, comp) in self.chart.coords.iter().zip(&self.components) {
            out = add(out, mul(comp.clone(), f.diff(coord)));
        }
        out.simplify()
    }

    /// Divergence `sum_i dX^i/dx^i` over all chart coordinates (the time
    /// coordinate included, when present).
    pub fn divergence(&self) -> Expr {
        let mut out = Expr::Constant(0.0);
        for (coord, comp) in self.chart.coords.iter().zip(&self.components) {
            out = add(out, comp.diff(coord));
        }
        out.simplify()
    }

    /// Lie bracket `[X, Y]^i = X(Y^i) - Y(X^i)`, on a shared chart.
    pub fn lie_bracket(&self, other: &VectorField) -> Result<VectorField, GeometryError> {
        if self.chart != other.chart {
            return Err(GeometryError::ChartMismatch);
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(xi, yi)| sub(self.lie_derivative(yi), other.lie_derivative(xi)).simplify())
            .collect();
        VectorField::new(self.chart.clone(), components)
    }

    /// Componentwise `f * X` on the same chart.
    pub fn scaled(&self, f: &Expr) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            components: self
                .components
                .iter()
                .map(|c| mul(f.clone(), c.clone()).simplify())
                .collect(),
            evolution: false,
        }
    }

    /// Componentwise sum on the same chart.
    pub fn plus(&self, other: &VectorField) -> Result<VectorField, GeometryError> {
        if self.chart != other.chart {
            return Err(GeometryError::ChartMismatch);
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| add(a.clone(), b.clone()).simplify())
            .collect();
        VectorField::new(self.chart.clone(), components)
    }

    /// Evaluate all components at a point.
    pub fn eval(&self, at: &Bindings) -> Result<Vec<f64>, EvalError> {
        self.components.iter().map(|c| c.eval(at)).collect()
    }
}

/// Residual report for the identity `X(div Y) - Y(div X) = div([X, Y])`.
pub fn bracket_divergence_residual(
    x: &VectorField,
    y: &VectorField,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<EqualityReport, GeometryError> {
    let lhs = sub(
        x.lie_derivative(&y.divergence()),
        y.lie_derivative(&x.divergence()),
    )
    .simplify();
    let rhs = x.lie_bracket(y)?.divergence();
    Ok(equal_numeric(&lhs, &rhs, sample_box, rtol)?)
}

/// Residual report for the Leibniz rule `div(f*X) = X(f) + f*div(X)`.
pub fn scale_divergence_check(
    x: &VectorField,
    f: &Expr,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<EqualityReport, GeometryError> {
    let lhs = x.scaled(f).divergence();
    let rhs = add(x.lie_derivative(f), mul(f.clone(), x.divergence())).simplify();
    Ok(equal_numeric(&lhs, &rhs, sample_box, rtol)?)
}

/// A positive density on a chart, usable as a Jacobi multiplier candidate.
/// Positivity over `positivity_box` is verified at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplier {
    chart: Chart,
    density: Expr,
    positivity_box: SampleBox,
}

impl Multiplier {
    pub fn new(
        chart: Chart,
        density: Expr,
        positivity_box: SampleBox,
    ) -> Result<Multiplier, GeometryError> {
        for variable in density.variables() {
            if !chart.contains(&variable) {
                return Err(GeometryError::ForeignVariable {
                    component: density.render(),
                    variable,
                });
            }
        }
        let kept = positivity_box.retained(|point| density.eval(point))?;
        for (point, value) in &kept {
            if *value <= 0.0 {
                return Err(GeometryError::NotPositive {
                    value: *value,
                    witness: point.clone(),
                });
            }
        }
        Ok(Multiplier {
            chart,
            density,
            positivity_box,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn density(&self) -> &Expr {
        &self.density
    }

    pub fn positivity_box(&self) -> &SampleBox {
        &self.positivity_box
    }

    /// `log(R)` as an expression.
    pub fn log_density(&self) -> Expr {
        Expr::Func(Func::Log, Box::new(self.density.clone()))
    }
}

/// The multiplier defect `div(X) + X(log R)` as an expression; `R` is a
/// Jacobi multiplier for `X` exactly when this vanishes.
pub fn multiplier_residual(x: &VectorField, r: &Multiplier) -> Expr {
    add(x.divergence(), x.lie_derivative(&r.log_density())).simplify()
}

/// Full report for the multiplier identity `div(X) + X(log R) = 0`.
pub fn multiplier_check(
    x: &VectorField,
    r: &Multiplier,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<EqualityReport, GeometryError> {
    let residual = multiplier_residual(x, r);
    Ok(equal_numeric(
        &residual,
        &Expr::Constant(0.0),
        sample_box,
        rtol,
    )?)
}

/// Convenience wrapper around [`multiplier_check`] returning the verdict.
pub fn is_multiplier(
    x: &VectorField,
    r: &Multiplier,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<bool, GeometryError> {
    Ok(multiplier_check(x, r, sample_box, rtol)?.equal)
}

/// Outcome of the normalizer analysis of a pair `(X, Y)`: does
/// `[Y, X] = h*X` hold for some factor `h`, and what is `h`?
#[derive(Debug, Clone, PartialEq)]
pub enum Normalizer {
    /// `[Y, X]` vanishes numerically: the fields commute and `h = 0`.
    Commuting,
    /// The relation holds with the given closed-form factor (either
    /// supplied by the caller and verified, or read off the time component
    /// of an evolution field).
    ClosedForm { factor: Expr },
    /// The relation holds pointwise; no closed form was derived. Each entry
    /// is a sample point with the factor value extracted there.
    Pointwise { factors: Vec<(Bindings, f64)> },
    /// The relation fails at the recorded point.
    NotNormalizer { witness: Bindings },
}

impl Normalizer {
    /// The factor as an expression, when one is available in closed form.
    pub fn factor(&self) -> Option<Expr> {
        match self {
            Normalizer::Commuting => Some(Expr::Constant(0.0)),
            Normalizer::ClosedForm { factor } => Some(factor.clone()),
            _ => None,
        }
    }

    /// True unless the relation failed.
    pub fn holds(&self) -> bool {
        !matches!(self, Normalizer::NotNormalizer { .. })
    }
}

/// Decide whether `Y` normalizes `X`, i.e. `[Y, X] = h*X`.
///
/// The bracket `B = [Y, X]` is computed symbolically. If every component
/// of `B` vanishes numerically the fields commute (`h = 0`). Otherwise,
/// with a caller-supplied `h` the relation `B^i = h*X^i` is verified
/// componentwise; without one, an evolution field (`X^0 = 1`) forces
/// `h = B^0` and the remaining components are verified against it. In the
/// fully general case the factor is extracted per sample point from the
/// largest component of `X` (skipping points where all components are
/// below [`DIRECTION_EPSILON`]) and cross-checked against every other
/// component at that point.
pub fn normalizer_factor(
    x: &VectorField,
    y: &VectorField,
    sample_box: &SampleBox,
    rtol: f64,
    supplied: Option<&Expr>,
) -> Result<Normalizer, GeometryError> {
    let bracket = y.lie_bracket(x)?;

    // Commuting pair: every bracket component numerically zero.
    let zero = Expr::Constant(0.0);
    let mut commutes = true;
    for comp in bracket.components() {
        let report = equal_numeric(comp, &zero, sample_box, rtol)?;
        if !report.equal {
            commutes = false;
            break;
        }
    }
    if commutes {
        return Ok(Normalizer::Commuting);
    }

    // A closed-form candidate: supplied, or forced by a unit time component.
    let candidate = match supplied {
        Some(h) => Some(h.clone()),
        None if x.is_evolution() => Some(bracket.components()[0].clone().simplify()),
        None => None,
    };
    if let Some(factor) = candidate {
        for (xi, bi) in x.components().iter().zip(bracket.components()) {
            let expected = mul(factor.clone(), xi.clone()).simplify();
            let report = equal_numeric(bi, &expected, sample_box, rtol)?;
            if !report.equal {
                return Ok(Normalizer::NotNormalizer {
                    witness: report.worst_point,
                });
            }
        }
        return Ok(Normalizer::ClosedForm { factor });
    }

    // General case: extract the factor pointwise.
    let mut degenerate = 0usize;
    let kept = sample_box.retained(|point| {
        let xs = x.eval(point)?;
        let bs = bracket.eval(point)?;
        Ok((xs, bs))
    })?;
    let mut factors = Vec::with_capacity(kept.len());
    for (point, (xs, bs)) in kept {
        let (best, magnitude) = xs
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("fields have at least one component");
        if magnitude <= DIRECTION_EPSILON {
            degenerate += 1;
            continue;
        }
        let h = bs[best] / xs[best];
        for (bi, xi) in bs.iter().zip(&xs) {
            let expected = h * xi;
            let residual = (bi - expected).abs() / (1.0 + bi.abs().max(expected.abs()));
            if residual > rtol {
                return Ok(Normalizer::NotNormalizer { witness: point });
            }
        }
        factors.push((point, h));
    }
    if factors.is_empty() {
        return Err(GeometryError::DegenerateDirection { degenerate });
    }
    Ok(Normalizer::Pointwise { factors })
}
