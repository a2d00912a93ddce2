//! Exact symbolic differentiation.
//!
//! Results are assembled through the smart constructors, so zero and one
//! branches fold away as they appear and `diff("x^2", "x")` comes back as
//! `2*x` rather than a tower of trivial nodes. No other simplification is
//! applied; call [`Expr::simplify`] for a full pass.

use super::simplify::{add, div, func, mul, neg, pow, sub};
use super::{Expr, Func};

/// Partial derivative of `e` with respect to `var`.
///
/// The absolute value differentiates to `u/abs(u) * u'` — the sign of `u`
/// wherever `u != 0`, and a division-by-zero evaluation error exactly at
/// the kink, so the undefined point is flagged rather than silently
/// smoothed over.
pub fn diff(e: &Expr, var: &str) -> Expr {
    match e {
        Expr::Constant(_) => Expr::Constant(0.0),
        Expr::Variable(name) => {
            if name == var {
                Expr::Constant(1.0)
            } else {
                Expr::Constant(0.0)
            }
        }
        Expr::Neg(a) => neg(diff(a, var)),
        Expr::Add(a, b) => add(diff(a, var), diff(b, var)),
        Expr::Sub(a, b) => sub(diff(a, var), diff(b, var)),
        Expr::Mul(a, b) => add(
            mul(diff(a, var), (**b).clone()),
            mul((**a).clone(), diff(b, var)),
        ),
        Expr::Div(a, b) => div(
            sub(
                mul(diff(a, var), (**b).clone()),
                mul((**a).clone(), diff(b, var)),
            ),
            pow((**b).clone(), Expr::Constant(2.0)),
        ),
        Expr::Pow(base, exponent) => diff_pow(base, exponent, var),
        Expr::Func(f, a) => {
            let da = diff(a, var);
            let a = (**a).clone();
            let outer = match f {
                Func::Sin => func(Func::Cos, a),
                Func::Cos => neg(func(Func::Sin, a)),
                // tan' = 1/cos^2
                Func::Tan => div(
                    Expr::Constant(1.0),
                    pow(func(Func::Cos, a), Expr::Constant(2.0)),
                ),
                Func::Exp => func(Func::Exp, a),
                // log' = 1/u
                Func::Log => div(Expr::Constant(1.0), a),
                // sqrt' = 1/(2*sqrt(u))
                Func::Sqrt => div(
                    Expr::Constant(1.0),
                    mul(Expr::Constant(2.0), func(Func::Sqrt, a)),
                ),
                // abs' = u/abs(u), i.e. sign(u) away from zero.
                Func::Abs => div(a.clone(), func(Func::Abs, a)),
            };
            mul(outer, da)
        }
    }
}

fn diff_pow(base: &Expr, exponent: &Expr, var: &str) -> Expr {
    let db = diff(base, var);
    let de = diff(exponent, var);
    match (de.is_const(0.0), db.is_const(0.0)) {
        // Constant exponent: the power rule n * base^(n-1) * base',
        // valid for negative bases too (unlike the logarithmic form).
        (true, _) => mul(
            mul(
                exponent.clone(),
                pow(base.clone(), sub(exponent.clone(), Expr::Constant(1.0))),
            ),
            db,
        ),
        // Constant base: a^u * log(a) * u'.
        (false, true) => mul(
            mul(
                pow(base.clone(), exponent.clone()),
                func(Func::Log, base.clone()),
            ),
            de,
        ),
        // General case: a^b * (b' * log(a) + b * a'/a).
        (false, false) => mul(
            pow(base.clone(), exponent.clone()),
            add(
                mul(de, func(Func::Log, base.clone())),
                mul(exponent.clone(), div(db, base.clone())),
            ),
        ),
    }
}
