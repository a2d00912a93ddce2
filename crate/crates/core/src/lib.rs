//! Construction and certification of first integrals of dynamical systems
//! from infinitesimal symmetries and Jacobi multipliers.
//!
//! The crate is organized in layers, each usable on its own:
//!
//! - [`expr`] — symbolic expression trees: parsing, differentiation,
//!   simplification, strict evaluation, and the seeded numeric equality
//!   oracle every identity check in the crate runs through.
//! - [`geometry`] — charts, vector fields, divergences, Lie brackets, and
//!   Jacobi multipliers (positive densities `R` with
//!   `div(X) + X(log R) = 0`).
//! - [`invariants`] — the symmetry-based first-integral constructors: for a
//!   divergence-free field with a commuting symmetry `Y`, `div(Y)` is
//!   conserved; multipliers and normalizer factors extend this to general
//!   fields and to nonautonomous systems. Every constructor certifies its
//!   output numerically before returning it.
//! - [`mechanics`] — second-order systems, Lagrangians (with the Hessian
//!   determinant as a ready-made multiplier), prolongation of point
//!   symmetries, and the closed-form invariant for Lagrangian dynamics.
//! - [`numeric`] — a fixed-step RK4 integrator plus drift measurement, the
//!   trajectory-level half of invariant certification.
//!
//! All numeric decisions flow through [`expr::equal_numeric`], so results
//! are reproducible bit for bit from the sample-box seeds.

pub mod expr;
pub mod generate;
pub mod geometry;
pub mod invariants;
pub mod mechanics;
pub mod numeric;

/// Default relative tolerance for identity checks.
pub const DEFAULT_RTOL: f64 = 1e-9;

/// Default number of retained sample points per box.
pub const DEFAULT_SAMPLE_COUNT: usize = 32;
