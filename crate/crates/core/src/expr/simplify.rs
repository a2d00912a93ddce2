//! Sound structural simplification.
//!
//! The smart constructors below apply only value-preserving local rewrites:
//! constant folding (refused whenever the folded value would be non-finite,
//! so `1/0` stays symbolic and fails at evaluation instead), the 0/1
//! identities of the five binary operators, double negation, and
//! `x - x -> 0` on structurally equal subtrees. No reordering, no
//! distribution, no cancellation beyond these rules — anything cleverer
//! must be justified through the numeric equality oracle by the caller.
//!
//! [`simplify`] rebuilds a tree bottom-up through the smart constructors
//! and iterates until nothing changes.

use super::{Expr, Func};

fn constant(value: f64) -> Option<Expr> {
    value.is_finite().then(|| Expr::Constant(value))
}

/// `a + b` with folding and identity rules.
pub fn add(a: Expr, b: Expr) -> Expr {
    if let (Expr::Constant(x), Expr::Constant(y)) = (&a, &b) {
        if let Some(e) = constant(x + y) {
            return e;
        }
    }
    if a.is_const(0.0) {
        return b;
    }
    if b.is_const(0.0) {
        return a;
    }
    // `a + (-b)` reads better (and re-folds further) as subtraction.
    if let Expr::Neg(inner) = b {
        return sub(a, *inner);
    }
    Expr::Add(Box::new(a), Box::new(b))
}

/// `a - b` with folding, identity rules, and `x - x -> 0`.
pub fn sub(a: Expr, b: Expr) -> Expr {
    if let (Expr::Constant(x), Expr::Constant(y)) = (&a, &b) {
        if let Some(e) = constant(x - y) {
            return e;
        }
    }
    if b.is_const(0.0) {
        return a;
    }
    if a.is_const(0.0) {
        return neg(b);
    }
    if a == b {
        return Expr::Constant(0.0);
    }
    if let Expr::Neg(inner) = b {
        return add(a, *inner);
    }
    Expr::Sub(Box::new(a), Box::new(b))
}

/// `a * b` with folding and 0/1 identities.
pub fn mul(a: Expr, b: Expr) -> Expr {
    if let (Expr::Constant(x), Expr::Constant(y)) = (&a, &b) {
        if let Some(e) = constant(x * y) {
            return e;
        }
    }
    if a.is_const(0.0) || b.is_const(0.0) {
        return Expr::Constant(0.0);
    }
    if a.is_const(1.0) {
        return b;
    }
    if b.is_const(1.0) {
        return a;
    }
    Expr::Mul(Box::new(a), Box::new(b))
}

/// `a / b` with folding and 0/1 identities. Division by the literal zero
/// is left in place so evaluation reports it.
pub fn div(a: Expr, b: Expr) -> Expr {
    if let (Expr::Constant(x), Expr::Constant(y)) = (&a, &b) {
        if *y != 0.0 {
            if let Some(e) = constant(x / y) {
                return e;
            }
        }
    }
    if b.is_const(1.0) {
        return a;
    }
    if a.is_const(0.0) && !b.is_const(0.0) {
        return Expr::Constant(0.0);
    }
    Expr::Div(Box::new(a), Box::new(b))
}

/// `a ^ b` with folding and 0/1 identities. Folding uses the same `powf`
/// semantics as evaluation, so it cannot change observable values.
pub fn pow(a: Expr, b: Expr) -> Expr {
    if let (Expr::Constant(x), Expr::Constant(y)) = (&a, &b) {
        if let Some(e) = constant(x.powf(*y)) {
            return e;
        }
    }
    if b.is_const(1.0) {
        return a;
    }
    // powf(x, 0) == 1 and powf(1, x) == 1 for every x, including the
    // edge cases, so these folds agree with evaluation everywhere.
    if b.is_const(0.0) || a.is_const(1.0) {
        return Expr::Constant(1.0);
    }
    Expr::Pow(Box::new(a), Box::new(b))
}

/// `-a` with folding and double-negation elimination. `-0` folds to `0`
/// so derived factors of zero render without a stray sign.
pub fn neg(a: Expr) -> Expr {
    match a {
        Expr::Constant(x) if x == 0.0 => Expr::Constant(0.0),
        Expr::Constant(x) => Expr::Constant(-x),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

/// Function application, folding constant arguments when the result is
/// defined and finite.
pub fn func(f: Func, a: Expr) -> Expr {
    if let Expr::Constant(x) = a {
        let value = match f {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Log => {
                if x > 0.0 {
                    x.ln()
                } else {
                    f64::NAN // refused below; the node stays symbolic
                }
            }
            Func::Sqrt => {
                if x >= 0.0 {
                    x.sqrt()
                } else {
                    f64::NAN
                }
            }
            Func::Abs => x.abs(),
        };
        if let Some(e) = constant(value) {
            return e;
        }
        return Expr::Func(f, Box::new(Expr::Constant(x)));
    }
    Expr::Func(f, Box::new(a))
}

fn rebuild(e: &Expr) -> Expr {
    match e {
        Expr::Constant(_) | Expr::Variable(_) => e.clone(),
        Expr::Neg(a) => neg(rebuild(a)),
        Expr::Add(a, b) => add(rebuild(a), rebuild(b)),
        Expr::Sub(a, b) => sub(rebuild(a), rebuild(b)),
        Expr::Mul(a, b) => mul(rebuild(a), rebuild(b)),
        Expr::Div(a, b) => div(rebuild(a), rebuild(b)),
        Expr::Pow(a, b) => pow(rebuild(a), rebuild(b)),
        Expr::Func(f, a) => func(*f, rebuild(a)),
    }
}

/// Bottom-up structural simplification, iterated to a fixed point (the
/// rule set shrinks trees, so this terminates quickly; the bound is a
/// safety net).
pub fn simplify(e: &Expr) -> Expr {
    let mut cur = rebuild(e);
    for _ in 0..8 {
        let next = rebuild(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}
