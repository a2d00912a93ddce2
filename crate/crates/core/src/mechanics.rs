//! Second-order systems, Lagrangians, and prolonged point symmetries.
//!
//! A [`SecondOrderSystem`] holds forces `F^i(t, x, v)` for equations
//! `d2x^i/dt2 = F^i`; its [`sode_lift`](SecondOrderSystem::sode_lift) is
//! the first-order field `Gamma = v^i d/dx^i + F^i d/dv^i`, with a leading
//! `d/dt` component when the system is time-dependent.
//!
//! For a regular Lagrangian the central objects are the velocity Hessian
//! `W_ij = d2L/dv^i dv^j` and the mixed matrix `A_ij = d2L/dx^i dv^j`:
//! the forces come from solving the Euler-Lagrange equations
//!
//! ```plain
//! sum_j W_ij F^j = dL/dx^i - sum_j A_ji v^j - d2L/dt dv^i
//! ```
//!
//! and `det W` is a ready-made Jacobi multiplier for the lifted field --
//! the fact this module certifies on every construction.
//!
//! A velocity-independent [`PointField`] `X = X^0 d/dt + X^i d/dx^i`
//! prolongs to the evolution space as `X^(1)` with velocity components
//! `Gamma(X^i) - v^i Gamma(X^0)` (the unique lift preserving the contact
//! structure; it does not depend on which forces `Gamma` carries). When
//! the prolongation normalizes `Gamma`, the closed-form invariant
//!
//! ```plain
//! I = 2 sum_i (dX^i/dx^i - v^i dX^0/dx^i) - n Gamma(X^0) + X^(1)(log det W)
//! ```
//!
//! is returned, cross-checked against the generic multiplier route.

use crate::expr::{
    add, equal_numeric, mul, neg, sub, Bindings, EqualityReport, Expr, Func, SampleBox,
    SampleError,
};
use crate::geometry::{normalizer_factor, Chart, GeometryError, Multiplier, VectorField};
use crate::invariants::{
    certify_conservation, constant_value, invariant_divfree, invariant_multiplier,
    invariant_nonautonomous, invariant_normalizer, InvariantError, InvariantResult, TheoremTag,
};
use thiserror::Error;

/// Name of the time coordinate on lifted charts.
pub const TIME: &str = "t";

/// Largest supported configuration dimension for symbolic force
/// extraction (Cramer solves grow factorially).
pub const MAX_DIMENSION: usize = 4;

/// Errors from the second-order and Lagrangian layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MechanicsError {
    #[error("a second-order system needs at least one coordinate")]
    EmptySystem,
    #[error("coordinate name `{0}` is not usable (invalid, reserved, or duplicated)")]
    BadName(String),
    #[error("expected {expected} expressions, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("`{subject}` uses `{variable}`, which is not available on this system")]
    ForeignVariable { subject: String, variable: String },
    #[error("dimension {n} exceeds the symbolic solver limit {MAX_DIMENSION}")]
    DimensionTooLarge { n: usize },
    #[error(
        "the Lagrangian is degenerate: det W is numerically zero on the box \
         (largest |det W| seen: {largest})"
    )]
    DegenerateLagrangian { largest: f64 },
    #[error("fields live on different charts")]
    ChartMismatch,
    #[error(
        "the prolonged field is not a symmetry of the lifted dynamics: \
         {condition} fails with residual {residual} at {witness}"
    )]
    NotSymmetry {
        condition: String,
        residual: f64,
        witness: Bindings,
    },
    #[error(
        "internal certification failure: {what} has residual {residual} at {witness}; \
         this indicates an inconsistency in the derived objects"
    )]
    CertificationFailure {
        what: String,
        residual: f64,
        witness: Bindings,
    },
    #[error(
        "closed-form and generic invariants disagree: residual {residual} at {witness}"
    )]
    RouteDisagreement { residual: f64, witness: Bindings },
    #[error("a Darboux chart has an even number of phase coordinates; got {dim}")]
    OddPhaseDimension { dim: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// A system `d2x^i/dt2 = F^i(t, x, v)` with named coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderSystem {
    base: Vec<String>,
    velocities: Vec<String>,
    time_dependent: bool,
    forces: Vec<Expr>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl SecondOrderSystem {
    /// Build a system with derived velocity names `v_<base>`.
    pub fn new(
        base: Vec<String>,
        forces: Vec<Expr>,
        time_dependent: bool,
    ) -> Result<SecondOrderSystem, MechanicsError> {
        let velocities = base.iter().map(|b| format!("v_{b}")).collect();
        SecondOrderSystem::with_velocities(base, velocities, forces, time_dependent)
    }

    /// Build a system with explicit velocity names.
    pub fn with_velocities(
        base: Vec<String>,
        velocities: Vec<String>,
        forces: Vec<Expr>,
        time_dependent: bool,
    ) -> Result<SecondOrderSystem, MechanicsError> {
        if base.is_empty() {
            return Err(MechanicsError::EmptySystem);
        }
        if velocities.len() != base.len() {
            return Err(MechanicsError::ComponentCount {
                expected: base.len(),
                got: velocities.len(),
            });
        }
        if forces.len() != base.len() {
            return Err(MechanicsError::ComponentCount {
                expected: base.len(),
                got: forces.len(),
            });
        }
        let mut seen = vec![TIME.to_string()];
        for name in base.iter().chain(&velocities) {
            if !valid_name(name) || seen.contains(name) {
                return Err(MechanicsError::BadName(name.clone()));
            }
            seen.push(name.clone());
        }
        let sys = SecondOrderSystem {
            base,
            velocities,
            time_dependent,
            forces,
        };
        for force in &sys.forces {
            sys.check_vars(force, "force")?;
        }
        Ok(sys)
    }

    fn check_vars(&self, e: &Expr, subject: &str) -> Result<(), MechanicsError> {
        for variable in e.variables() {
            let ok = self.base.contains(&variable)
                || self.velocities.contains(&variable)
                || (self.time_dependent && variable == TIME);
            if !ok {
                return Err(MechanicsError::ForeignVariable {
                    subject: format!("{subject} `{}`", e.render()),
                    variable,
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base_coords(&self) -> &[String] {
        &self.base
    }

    pub fn velocity_coords(&self) -> &[String] {
        &self.velocities
    }

    pub fn forces(&self) -> &[Expr] {
        &self.forces
    }

    pub fn time_dependent(&self) -> bool {
        self.time_dependent
    }

    /// First-order lift: `(v, F)` on `(x, v)` for autonomous systems,
    /// `(1, v, F)` on `(t, x, v)` for time-dependent ones.
    pub fn sode_lift(&self) -> VectorField {
        if self.time_dependent {
            self.time_extended()
        } else {
            let coords = self.base.iter().chain(&self.velocities).cloned();
            let chart = Chart::space(coords).expect("validated names");
            let components = self
                .velocities
                .iter()
                .map(|v| Expr::var(v))
                .chain(self.forces.iter().cloned())
                .collect();
            VectorField::new(chart, components).expect("validated components")
        }
    }

    /// The lift on the chart `(t, x, v)` regardless of time dependence;
    /// autonomous forces simply do not mention `t`. This is the chart all
    /// point-symmetry work happens on.
    pub fn time_extended(&self) -> VectorField {
        let coords = std::iter::once(&TIME.to_string())
            .chain(&self.base)
            .chain(&self.velocities)
            .cloned()
            .collect::<Vec<_>>();
        let chart = Chart::with_time(coords).expect("validated names");
        let components = std::iter::once(Expr::Constant(1.0))
            .chain(self.velocities.iter().map(|v| Expr::var(v)))
            .chain(self.forces.iter().cloned())
            .collect();
        VectorField::new(chart, components).expect("validated components")
    }
}

/// Everything derived from one regular Lagrangian.
#[derive(Debug, Clone)]
pub struct LagrangianData {
    lagrangian: Expr,
    system: SecondOrderSystem,
    w: Vec<Vec<Expr>>,
    a: Vec<Vec<Expr>>,
    det_w: Expr,
    energy: Expr,
}

impl LagrangianData {
    pub fn lagrangian(&self) -> &Expr {
        &self.lagrangian
    }

    pub fn system(&self) -> &SecondOrderSystem {
        &self.system
    }

    /// Velocity Hessian `W_ij = d2L/dv^i dv^j`.
    pub fn hessian(&self) -> &[Vec<Expr>] {
        &self.w
    }

    /// Mixed matrix `A_ij = d2L/dx^i dv^j`.
    pub fn mixed(&self) -> &[Vec<Expr>] {
        &self.a
    }

    pub fn det_hessian(&self) -> &Expr {
        &self.det_w
    }

    /// Energy `E = sum_i v^i dL/dv^i - L`.
    pub fn energy(&self) -> &Expr {
        &self.energy
    }
}

/// Cofactor expansion along the first row; fine for the supported sizes.
fn determinant(m: &[Vec<Expr>]) -> Expr {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut out = Expr::Constant(0.0);
    for (j, entry) in m[0].iter().enumerate() {
        let minor: Vec<Vec<Expr>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = mul(entry.clone(), determinant(&minor));
        out = if j % 2 == 0 {
            add(out, term)
        } else {
            sub(out, term)
        };
    }
    out
}

/// Coordinate names used by [`lagrangian_analyze`]: `x` for one degree of
/// freedom, `x1..xn` otherwise.
pub fn standard_coords(n: usize) -> Vec<String> {
    if n == 1 {
        vec!["x".to_string()]
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

/// Differentiate a Lagrangian into its Hessian, mixed matrix, forces, and
/// energy. The box must bind every variable of `det W` so regularity can
/// be sampled; a numerically vanishing determinant is rejected.
pub fn lagrangian_analyze(
    lagrangian: &Expr,
    n: usize,
    time_dependent: bool,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<LagrangianData, MechanicsError> {
    if n == 0 {
        return Err(MechanicsError::EmptySystem);
    }
    if n > MAX_DIMENSION {
        return Err(MechanicsError::DimensionTooLarge { n });
    }
    let base = standard_coords(n);
    let velocities: Vec<String> = base.iter().map(|b| format!("v_{b}")).collect();
    for variable in lagrangian.variables() {
        let ok = base.contains(&variable)
            || velocities.contains(&variable)
            || (time_dependent && variable == TIME);
        if !ok {
            return Err(MechanicsError::ForeignVariable {
                subject: format!("Lagrangian `{}`", lagrangian.render()),
                variable,
            });
        }
    }

    let dl_dv: Vec<Expr> = velocities
        .iter()
        .map(|v| lagrangian.diff(v).simplify())
        .collect();
    let w: Vec<Vec<Expr>> = (0..n)
        .map(|i| (0..n).map(|j| dl_dv[j].diff(&velocities[i]).simplify()).collect())
        .collect();
    let a: Vec<Vec<Expr>> = (0..n)
        .map(|i| (0..n).map(|j| dl_dv[j].diff(&base[i]).simplify()).collect())
        .collect();
    let det_w = determinant(&w).simplify();

    let regularity = equal_numeric(&det_w, &Expr::Constant(0.0), sample_box, rtol)?;
    if regularity.equal {
        return Err(MechanicsError::DegenerateLagrangian {
            largest: regularity.worst_residual,
        });
    }

    // Right-hand side of the linear system for the accelerations.
    let rhs: Vec<Expr> = (0..n)
        .map(|i| {
            let mut r = lagrangian.diff(&base[i]);
            for (j, vj) in velocities.iter().enumerate() {
                r = sub(r, mul(a[j][i].clone(), Expr::var(vj)));
            }
            r = sub(r, dl_dv[i].diff(TIME));
            r.simplify()
        })
        .collect();
    // Cramer's rule: F^j = det(W with column j replaced by rhs) / det W.
    let forces: Vec<Expr> = (0..n)
        .map(|j| {
            let replaced: Vec<Vec<Expr>> = (0..n)
                .map(|r| {
                    (0..n)
                        .map(|c| if c == j { rhs[r].clone() } else { w[r][c].clone() })
                        .collect()
                })
                .collect();
            crate::expr::div(determinant(&replaced), det_w.clone()).simplify()
        })
        .collect();

    let mut energy = neg(lagrangian.clone());
    for (v, d) in velocities.iter().zip(&dl_dv) {
        energy = add(energy, mul(Expr::var(v), d.clone()));
    }
    let energy = energy.simplify();

    let system = SecondOrderSystem::with_velocities(base, velocities, forces, time_dependent)?;
    Ok(LagrangianData {
        lagrangian: lagrangian.clone(),
        system,
        w,
        a,
        det_w,
        energy,
    })
}

/// `det W` packaged as a positive multiplier for the lifted dynamics.
#[derive(Debug, Clone)]
pub struct HessianMultiplier {
    /// The multiplier; its density is `det W` or `-det W`.
    pub multiplier: Multiplier,
    /// True when `det W` was negative on the box and the sign was flipped.
    pub sign_flipped: bool,
}

fn signed_hessian_density(
    ld: &LagrangianData,
    sample_box: &SampleBox,
) -> Result<(Expr, bool), MechanicsError> {
    let (_, value) = sample_box.first_valid(|point| ld.det_w.eval(point))?;
    if value < 0.0 {
        Ok((neg(ld.det_w.clone()).simplify(), true))
    } else {
        Ok((ld.det_w.clone(), false))
    }
}

/// Certify `det W` (sign-corrected if necessary) as a Jacobi multiplier of
/// the system's lift. This is the keystone consistency check of the
/// Lagrangian layer; a failure means the derived objects contradict each
/// other.
pub fn lagrangian_multiplier(
    ld: &LagrangianData,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<HessianMultiplier, MechanicsError> {
    let (density, sign_flipped) = signed_hessian_density(ld, sample_box)?;
    let lift = ld.system.sode_lift();
    let multiplier = Multiplier::new(lift.chart().clone(), density, sample_box.clone())?;
    let residual = crate::geometry::multiplier_residual(&lift, &multiplier);
    let report = equal_numeric(&residual, &Expr::Constant(0.0), sample_box, rtol)?;
    if !report.equal {
        return Err(MechanicsError::CertificationFailure {
            what: "div(Gamma) + Gamma(log det W)".to_string(),
            residual: report.worst_residual,
            witness: report.worst_point,
        });
    }
    Ok(HessianMultiplier {
        multiplier,
        sign_flipped,
    })
}

/// A velocity-independent vector field `X^0 d/dt + X^i d/dx^i` on the
/// base manifold extended by time.
#[derive(Debug, Clone, PartialEq)]
pub struct PointField {
    temporal: Expr,
    spatial: Vec<Expr>,
}

impl PointField {
    pub fn new(temporal: Expr, spatial: Vec<Expr>) -> PointField {
        PointField { temporal, spatial }
    }

    pub fn temporal(&self) -> &Expr {
        &self.temporal
    }

    pub fn spatial(&self) -> &[Expr] {
        &self.spatial
    }
}

/// Prolong a point field to the evolution space `(t, x, v)`: velocity
/// components are `Gamma(X^i) - v^i Gamma(X^0)`. Because `X^0` and `X^i`
/// are velocity-free, the result is the same for every choice of forces.
pub fn prolong(
    pf: &PointField,
    sys: &SecondOrderSystem,
) -> Result<VectorField, MechanicsError> {
    if pf.spatial.len() != sys.dim() {
        return Err(MechanicsError::ComponentCount {
            expected: sys.dim(),
            got: pf.spatial.len(),
        });
    }
    for e in std::iter::once(&pf.temporal).chain(&pf.spatial) {
        for variable in e.variables() {
            if !(variable == TIME || sys.base.contains(&variable)) {
                return Err(MechanicsError::ForeignVariable {
                    subject: format!("point field component `{}`", e.render()),
                    variable,
                });
            }
        }
    }
    let gamma = sys.time_extended();
    let g_temporal = gamma.lie_derivative(&pf.temporal);
    let lifted: Vec<Expr> = pf
        .spatial
        .iter()
        .zip(&sys.velocities)
        .map(|(xi, v)| {
            sub(
                gamma.lie_derivative(xi),
                mul(Expr::var(v), g_temporal.clone()),
            )
            .simplify()
        })
        .collect();
    let components = std::iter::once(pf.temporal.clone())
        .chain(pf.spatial.iter().cloned())
        .chain(lifted)
        .collect();
    Ok(VectorField::new(gamma.chart().clone(), components)?)
}

/// Per-condition evidence that a field on `(t, x, v)` is a symmetry of the
/// lifted dynamics.
#[derive(Debug, Clone)]
pub struct SymmetryReport {
    /// `Ybar^i = Gamma(Y^i) - Gamma(Y^0) v^i`, one report per coordinate.
    pub contact: Vec<EqualityReport>,
    /// `Y(F^i) = Gamma(Gamma(Y^i)) - 2 Gamma(Y^0) F^i - Gamma(Gamma(Y^0))
    /// v^i`, one report per coordinate.
    pub force: Vec<EqualityReport>,
    /// The factor `-Gamma(Y^0)` the bracket relation must exhibit.
    pub factor: Expr,
    /// All contact and force conditions hold.
    pub symmetric: bool,
    /// The direct bracket analysis `[Y, Gamma] = -Gamma(Y^0) Gamma`
    /// reached the same verdict.
    pub bracket_agrees: bool,
}

/// Evaluate the componentwise symmetry conditions for `y` against the
/// system's lift, then cross-check the verdict with the bracket route.
pub fn sode_symmetry_conditions(
    y: &VectorField,
    sys: &SecondOrderSystem,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<SymmetryReport, MechanicsError> {
    let gamma = sys.time_extended();
    if y.chart() != gamma.chart() {
        return Err(MechanicsError::ChartMismatch);
    }
    let n = sys.dim();
    let y0 = &y.components()[0];
    let g_y0 = gamma.lie_derivative(y0);
    let gg_y0 = gamma.lie_derivative(&g_y0);

    let mut contact = Vec::with_capacity(n);
    let mut force = Vec::with_capacity(n);
    let mut symmetric = true;
    for i in 0..n {
        let yi = &y.components()[1 + i];
        let ybar = &y.components()[1 + n + i];
        let vi = Expr::var(&sys.velocities[i]);
        let fi = &sys.forces[i];

        let contact_rhs = sub(gamma.lie_derivative(yi), mul(g_y0.clone(), vi.clone())).simplify();
        let c = equal_numeric(ybar, &contact_rhs, sample_box, rtol)?;
        symmetric &= c.equal;
        contact.push(c);

        let force_lhs = y.lie_derivative(fi);
        let force_rhs = sub(
            sub(
                gamma.lie_derivative(&gamma.lie_derivative(yi)),
                mul(Expr::num(2.0), mul(g_y0.clone(), fi.clone())),
            ),
            mul(gg_y0.clone(), vi),
        )
        .simplify();
        let f = equal_numeric(&force_lhs, &force_rhs, sample_box, rtol)?;
        symmetric &= f.equal;
        force.push(f);
    }

    let factor = neg(g_y0).simplify();
    let bracket_verdict = normalizer_factor(&gamma, y, sample_box, rtol, None)?.holds();
    Ok(SymmetryReport {
        contact,
        force,
        factor,
        symmetric,
        bracket_agrees: bracket_verdict == symmetric,
    })
}

/// The closed-form invariant of a prolonged point symmetry of a regular
/// Lagrangian system, certified and cross-checked against the generic
/// multiplier/normalizer route.
pub fn hojman_invariant_lagrangian(
    pf: &PointField,
    ld: &LagrangianData,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<InvariantResult, MechanicsError> {
    let sys = &ld.system;
    let gamma = sys.time_extended();
    let y = prolong(pf, sys)?;

    let report = sode_symmetry_conditions(&y, sys, sample_box, rtol)?;
    if !report.symmetric {
        let (condition, bad) = report
            .contact
            .iter()
            .enumerate()
            .map(|(i, r)| (format!("contact condition {i}"), r))
            .chain(
                report
                    .force
                    .iter()
                    .enumerate()
                    .map(|(i, r)| (format!("force condition {i}"), r)),
            )
            .find(|(_, r)| !r.equal)
            .expect("some condition failed");
        return Err(MechanicsError::NotSymmetry {
            condition,
            residual: bad.worst_residual,
            witness: bad.worst_point.clone(),
        });
    }

    // Generic route: det W as multiplier on the extended chart, forced
    // factor -Gamma(X^0).
    let (density, _) = signed_hessian_density(ld, sample_box)?;
    let extended_multiplier =
        Multiplier::new(gamma.chart().clone(), density, sample_box.clone())?;
    let generic = invariant_nonautonomous(&gamma, &y, Some(&extended_multiplier), sample_box, rtol)
        .map_err(|e| match e {
            InvariantError::Precondition {
                condition,
                residual,
                witness,
            } => MechanicsError::NotSymmetry {
                condition,
                residual,
                witness,
            },
            other => MechanicsError::Invariant(other),
        })?;

    // Closed formula.
    let g_x0 = gamma.lie_derivative(&pf.temporal);
    let mut spatial_div = Expr::Constant(0.0);
    for (i, xi) in pf.spatial.iter().enumerate() {
        let base = &sys.base[i];
        spatial_div = add(
            spatial_div,
            sub(
                xi.diff(base),
                mul(Expr::var(&sys.velocities[i]), pf.temporal.diff(base)),
            ),
        );
    }
    let log_det = Expr::Func(Func::Log, Box::new(ld.det_w.clone()));
    let invariant = add(
        sub(
            mul(Expr::num(2.0), spatial_div),
            mul(Expr::num(sys.dim() as f64), g_x0.clone()),
        ),
        y.lie_derivative(&log_det),
    )
    .simplify();

    let agreement = equal_numeric(&invariant, &generic.invariant, sample_box, rtol)?;
    if !agreement.equal {
        return Err(MechanicsError::RouteDisagreement {
            residual: agreement.worst_residual,
            witness: agreement.worst_point,
        });
    }
    let certification = certify_conservation(&gamma, &invariant, sample_box, rtol)?;
    if !certification.equal {
        return Err(MechanicsError::CertificationFailure {
            what: "Gamma(I)".to_string(),
            residual: certification.worst_residual,
            witness: certification.worst_point,
        });
    }
    let constant = constant_value(&invariant, sample_box, rtol)?;
    Ok(InvariantResult {
        invariant,
        theorem: TheoremTag::LagrangianRoute,
        field: gamma,
        symmetry: y,
        multiplier: Some(extended_multiplier),
        factor: Some(neg(g_x0).simplify()),
        constant_value: constant,
        certification,
    })
}

/// Phase-space convenience wrapper: on a Darboux chart `(q, p)` or
/// `(t, q, p)` a Hamiltonian field is divergence-free, so the constant
/// multiplier suffices; the general arguments are forwarded to whichever
/// constructor matches the supplied ingredients.
pub fn hamiltonian_invariant(
    x: &VectorField,
    y: &VectorField,
    r: Option<&Multiplier>,
    h: Option<&Expr>,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<InvariantResult, MechanicsError> {
    let phase_dim = if x.chart().time_coord().is_some() {
        x.chart().dim() - 1
    } else {
        x.chart().dim()
    };
    if phase_dim % 2 != 0 {
        return Err(MechanicsError::OddPhaseDimension { dim: phase_dim });
    }
    let result = if x.chart().time_coord().is_some() {
        invariant_nonautonomous(x, y, r, sample_box, rtol)?
    } else if h.is_some() {
        invariant_normalizer(x, y, r, h, sample_box, rtol)?
    } else if let Some(r) = r {
        invariant_multiplier(x, y, r, sample_box, rtol)?
    } else {
        invariant_divfree(x, y, sample_box, rtol)?
    };
    Ok(result)
}
