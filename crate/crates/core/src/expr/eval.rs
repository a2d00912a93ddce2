//! Strict numeric evaluation.
//!
//! Every domain problem — unbound variable, log of a non-positive value,
//! square root of a negative, division by zero, a fractional power of a
//! negative base, or any non-finite intermediate — is reported as an error
//! carrying the offending subexpression. Evaluation never returns `NaN`
//! or an infinity.

use super::{Expr, Func};
use std::fmt;
use thiserror::Error;

/// Classification of a domain failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    DivisionByZero,
    LogNonPositive,
    SqrtNegative,
    /// `powf` returned NaN: a negative base raised to a fractional power.
    PowUndefined,
    /// The operation itself is fine but the value overflowed to infinity
    /// (or an operand produced by `tan` near a pole did).
    NonFinite,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::LogNonPositive => "log of a non-positive value",
            DomainKind::SqrtNegative => "square root of a negative value",
            DomainKind::PowUndefined => "fractional power of a negative base",
            DomainKind::NonFinite => "non-finite result",
        };
        f.write_str(s)
    }
}

/// Evaluation failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("{kind} in `{subexpr}`")]
    Domain { kind: DomainKind, subexpr: String },
}

impl EvalError {
    /// True for domain failures (as opposed to unbound variables). The
    /// sampling oracle skips domain failures but treats an unbound
    /// variable as a hard configuration error.
    pub fn is_domain(&self) -> bool {
        matches!(self, EvalError::Domain { .. })
    }
}

fn domain(kind: DomainKind, at: &Expr) -> EvalError {
    EvalError::Domain {
        kind,
        subexpr: at.render(),
    }
}

/// Guard against overflow to infinity; NaN cases are classified earlier.
fn finite(value: f64, at: &Expr) -> Result<f64, EvalError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(domain(DomainKind::NonFinite, at))
    }
}

pub fn eval(e: &Expr, lookup: &mut dyn FnMut(&str) -> Option<f64>) -> Result<f64, EvalError> {
    match e {
        Expr::Constant(c) => Ok(*c),
        Expr::Variable(name) => lookup(name).ok_or_else(|| EvalError::Unbound(name.clone())),
        Expr::Neg(a) => Ok(-eval(a, lookup)?),
        Expr::Add(a, b) => finite(eval(a, lookup)? + eval(b, lookup)?, e),
        Expr::Sub(a, b) => finite(eval(a, lookup)? - eval(b, lookup)?, e),
        Expr::Mul(a, b) => finite(eval(a, lookup)? * eval(b, lookup)?, e),
        Expr::Div(a, b) => {
            let num = eval(a, lookup)?;
            let den = eval(b, lookup)?;
            if den == 0.0 {
                return Err(domain(DomainKind::DivisionByZero, e));
            }
            finite(num / den, e)
        }
        Expr::Pow(base, exponent) => {
            let b = eval(base, lookup)?;
            let x = eval(exponent, lookup)?;
            let value = b.powf(x);
            if value.is_nan() {
                return Err(domain(DomainKind::PowUndefined, e));
            }
            finite(value, e)
        }
        Expr::Func(f, a) => {
            let x = eval(a, lookup)?;
            let value = match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Exp => x.exp(),
                Func::Log => {
                    if x <= 0.0 {
                        return Err(domain(DomainKind::LogNonPositive, e));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(domain(DomainKind::SqrtNegative, e));
                    }
                    x.sqrt()
                }
                Func::Abs => x.abs(),
            };
            finite(value, e)
        }
    }
}
