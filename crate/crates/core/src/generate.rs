//! Deterministic generators for property suites.
//!
//! Everything here is a pure function of a seeded [`Rng`], so generated
//! corpora are reproducible across runs and platforms. The expression
//! family is deliberately *total*: no division, no roots, no logarithms,
//! and exponentials only of bounded arguments, so generated identities can
//! be sampled anywhere without domain filtering.

use crate::expr::{add, mul, neg, sub, Expr, Func};
use crate::geometry::{Chart, VectorField};
use crate::mechanics::{standard_coords, PointField};

/// Sequential splitmix generator; cheap, seedable, and stable.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        crate::expr::sample::mix(self.state)
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// A small signed coefficient with two decimals, never zero.
    pub fn coeff(&mut self) -> f64 {
        let c = (self.range(-2.0, 2.0) * 100.0).round() / 100.0;
        if c == 0.0 {
            1.0
        } else {
            c
        }
    }
}

/// A random everywhere-defined expression over the given variables.
pub fn total_expr(rng: &mut Rng, vars: &[&str], depth: usize) -> Expr {
    if depth == 0 || vars.is_empty() {
        return if !vars.is_empty() && rng.below(3) > 0 {
            Expr::var(vars[rng.below(vars.len())])
        } else {
            Expr::num(rng.coeff())
        };
    }
    match rng.below(8) {
        0 | 1 => add(
            total_expr(rng, vars, depth - 1),
            total_expr(rng, vars, depth - 1),
        ),
        2 => sub(
            total_expr(rng, vars, depth - 1),
            total_expr(rng, vars, depth - 1),
        ),
        3 | 4 => mul(
            total_expr(rng, vars, depth - 1),
            total_expr(rng, vars, depth - 1),
        ),
        5 => Expr::Func(Func::Sin, Box::new(total_expr(rng, vars, depth - 1))),
        6 => Expr::Func(Func::Cos, Box::new(total_expr(rng, vars, depth - 1))),
        _ => neg(total_expr(rng, vars, depth - 1)),
    }
}

/// A positive, everywhere-defined expression: `exp` of a bounded
/// combination of sines, keeping values within a couple of decades of 1.
pub fn positive_density(rng: &mut Rng, vars: &[&str]) -> Expr {
    let mut arg = Expr::num(rng.coeff() / 2.0);
    for v in vars {
        if rng.below(2) == 0 {
            arg = add(
                arg,
                mul(
                    Expr::num(rng.coeff() / 2.0),
                    Expr::Func(Func::Sin, Box::new(Expr::var(*v))),
                ),
            );
        } else {
            arg = add(arg, mul(Expr::num(rng.coeff() / 4.0), Expr::var(*v)));
        }
    }
    Expr::Func(Func::Exp, Box::new(arg.simplify()))
}

/// A random vector field with total components over a space chart.
pub fn vector_field(rng: &mut Rng, coords: &[&str], depth: usize) -> VectorField {
    let chart = Chart::space(coords.iter().copied()).expect("valid generator coordinates");
    let components = coords
        .iter()
        .map(|_| total_expr(rng, coords, depth).simplify())
        .collect();
    VectorField::new(chart, components).expect("components use chart variables only")
}

/// A random velocity-free point field for an `n`-degree system: one
/// temporal and `n` spatial components over `(t, x)`.
pub fn point_field(rng: &mut Rng, n: usize) -> PointField {
    let base = standard_coords(n);
    let mut vars: Vec<&str> = vec!["t"];
    vars.extend(base.iter().map(|s| s.as_str()));
    let temporal = total_expr(rng, &vars, 2).simplify();
    let spatial = (0..n)
        .map(|_| total_expr(rng, &vars, 2).simplify())
        .collect();
    PointField::new(temporal, spatial)
}

/// A random regular Lagrangian `sum a_ij(x,t) v^i v^j / 2 - V(x,t)` over
/// the standard coordinates. The coefficient matrix is a constant
/// positive-definite core `M^T M + I` plus entrywise sine perturbations
/// bounded by 0.1, which keeps every eigenvalue above `1 - 0.1 n`; with
/// `time_dependent` the kinetic part also carries a `(1 + 0.1 sin t)`
/// factor. Either way `det W` stays bounded away from zero everywhere.
pub fn quadratic_lagrangian(rng: &mut Rng, n: usize, time_dependent: bool) -> Expr {
    assert!((1..=3).contains(&n), "generator supports n in 1..=3");
    let base = standard_coords(n);
    let base_refs: Vec<&str> = base.iter().map(|s| s.as_str()).collect();

    // Constant SPD core C = M^T M + I.
    let mut m = vec![vec![0.0_f64; n]; n];
    for row in &mut m {
        for entry in row.iter_mut() {
            *entry = rng.range(-1.0, 1.0);
        }
    }
    let mut core = vec![vec![0.0_f64; n]; n];
    for (i, row) in core.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let mut dot = 0.0;
            for (k, m_row) in m.iter().enumerate() {
                dot += m_row[i] * m[k][j];
            }
            *entry = dot + if i == j { 1.0 } else { 0.0 };
        }
    }

    let mut kinetic = Expr::Constant(0.0);
    for i in 0..n {
        for j in 0..n {
            let mut a_ij = Expr::num(core[i][j]);
            if i <= j {
                // One smooth perturbation per unordered pair; the
                // quadratic form symmetrizes it, and |amplitude| <= 0.1
                // keeps the effective matrix positive definite by Weyl's
                // eigenvalue bound.
                let amp = rng.range(-0.1, 0.1);
                let along = base_refs[rng.below(n)];
                let wiggle = mul(
                    Expr::num(amp),
                    Expr::Func(Func::Sin, Box::new(Expr::var(along))),
                );
                a_ij = add(a_ij, wiggle);
            }
            let vi = Expr::var(&format!("v_{}", base[i]));
            let vj = Expr::var(&format!("v_{}", base[j]));
            kinetic = add(kinetic, mul(a_ij, mul(vi, vj)));
        }
    }
    let mut kinetic = crate::expr::div(kinetic, Expr::num(2.0));
    if time_dependent {
        let factor = add(
            Expr::num(1.0),
            mul(
                Expr::num(0.1),
                Expr::Func(Func::Sin, Box::new(Expr::var("t"))),
            ),
        );
        kinetic = mul(factor, kinetic);
    }

    let mut potential_vars = base_refs.clone();
    if time_dependent {
        potential_vars.push("t");
    }
    let potential = total_expr(rng, &potential_vars, 2);
    sub(kinetic, potential).simplify()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{equal_numeric, SampleBox};
    use crate::mechanics::lagrangian_analyze;
    use crate::DEFAULT_RTOL;

    #[test]
    fn generation_is_reproducible() {
        let a = total_expr(&mut Rng::new(7), &["x", "y"], 3);
        let b = total_expr(&mut Rng::new(7), &["x", "y"], 3);
        assert_eq!(a, b);
        let c = total_expr(&mut Rng::new(8), &["x", "y"], 3);
        assert_ne!(a, c);
    }

    #[test]
    fn total_expressions_evaluate_everywhere() {
        let b = SampleBox::new([("x", (-3.0, 3.0)), ("y", (-3.0, 3.0))], 1, 16).unwrap();
        let mut rng = Rng::new(99);
        for _ in 0..50 {
            let e = total_expr(&mut rng, &["x", "y"], 3);
            // Every draw must evaluate: totality means no skipped points.
            let kept = b.retained(|point| e.eval(point)).unwrap();
            assert_eq!(kept.len(), 16);
        }
    }

    #[test]
    fn densities_are_positive() {
        let b = SampleBox::new([("x", (-3.0, 3.0))], 2, 32).unwrap();
        let mut rng = Rng::new(5);
        for _ in 0..20 {
            let r = positive_density(&mut rng, &["x"]);
            for (_, value) in b.retained(|point| r.eval(point)).unwrap() {
                assert!(value > 0.0);
            }
        }
    }

    #[test]
    fn generated_lagrangians_are_regular() {
        let mut rng = Rng::new(11);
        for n in 1..=3 {
            let vars: Vec<(String, (f64, f64))> = standard_coords(n)
                .iter()
                .flat_map(|b| {
                    [
                        (b.clone(), (-1.0, 1.0)),
                        (format!("v_{b}"), (-1.0, 1.0)),
                    ]
                })
                .chain([("t".to_string(), (0.0, 1.0))])
                .collect();
            let b = SampleBox::new(
                vars.iter().map(|(n, i)| (n.as_str(), *i)),
                3,
                16,
            )
            .unwrap();
            for _ in 0..3 {
                let l = quadratic_lagrangian(&mut rng, n, n == 2);
                let ld = lagrangian_analyze(&l, n, n == 2, &b, DEFAULT_RTOL).unwrap();
                // Regularity: det W bounded away from zero on the box.
                let report = equal_numeric(
                    ld.det_hessian(),
                    &Expr::Constant(0.0),
                    &b,
                    DEFAULT_RTOL,
                )
                .unwrap();
                assert!(!report.equal);
            }
        }
    }

    #[test]
    fn hessian_of_generated_lagrangian_matches_the_coefficients() {
        // For a quadratic kinetic term the Hessian must be v-independent
        // up to the sine wiggles in x (and t factor), i.e. symmetric.
        let mut rng = Rng::new(21);
        let l = quadratic_lagrangian(&mut rng, 2, false);
        let b = SampleBox::new(
            [
                ("x1", (-1.0, 1.0)),
                ("x2", (-1.0, 1.0)),
                ("v_x1", (-1.0, 1.0)),
                ("v_x2", (-1.0, 1.0)),
            ],
            4,
            16,
        )
        .unwrap();
        let ld = lagrangian_analyze(&l, 2, false, &b, DEFAULT_RTOL).unwrap();
        let w = ld.hessian();
        let report = equal_numeric(&w[0][1], &w[1][0], &b, DEFAULT_RTOL).unwrap();
        assert!(report.equal);
    }
}
