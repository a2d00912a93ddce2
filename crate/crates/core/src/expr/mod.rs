//! Symbolic expression engine: a small immutable expression tree with a
//! text grammar, exact differentiation, structural simplification, strict
//! numeric evaluation, and a seeded randomized equality oracle.
//!
//! Everything downstream (vector fields, multipliers, invariant
//! constructors, trajectory certification) manipulates [`Expr`] values and
//! decides identities with [`equal_numeric`], so this module is the single
//! source of truth for both symbolic structure and numeric semantics.
//!
//! ## Grammar
//!
//! ```plain
//! expr    := term (("+" | "-") term)*
//! term    := factor (("*" | "/") factor)*
//! factor  := unary ("^" factor)?          // "^" is right-associative
//! unary   := "-" unary | primary
//! primary := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
//! ```
//!
//! `NUMBER` is a non-negative decimal literal with optional fractional part
//! and optional exponent (`12`, `0.5`, `.5`, `1e-3`, `2.5E+10`); leading `-`
//! is always unary negation. `IDENT` is `[A-Za-z_][A-Za-z0-9_]*`. There is
//! no implicit multiplication: `2x` is a syntax error. The recognized
//! function names are `sin`, `cos`, `tan`, `exp`, `log` (natural), `sqrt`,
//! and `abs`, each taking exactly one argument.

mod eval;
mod deriv;
mod parse;
pub(crate) mod sample;
mod simplify;

pub use eval::{DomainKind, EvalError};
pub use parse::{parse_expr, ParseError};
pub use sample::{
    equal_numeric, fd_check, EqualityReport, SampleBox, SampleError, RESAMPLE_BUDGET,
};
pub use simplify::{add, div, mul, neg, pow, sub};

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

/// Unary function heads available in the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    /// Natural logarithm.
    Log,
    Sqrt,
    Abs,
}

impl Func {
    /// The grammar-level spelling of this function.
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    /// Look a function up by its grammar spelling.
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

/// Immutable symbolic expression tree.
///
/// Constants are always finite; the parser rejects overflowing literals and
/// constant folding refuses to materialize non-finite values, so a `NaN` or
/// infinity can never appear inside a tree. Structural equality (`==`) is
/// node-by-node equality, not mathematical equivalence; use
/// [`equal_numeric`] for the latter.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Constant(f64),
    Variable(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// `Pow(base, exponent)`.
    Pow(Box<Expr>, Box<Expr>),
    Func(Func, Box<Expr>),
}

impl Expr {
    /// Finite numeric constant. Panics on non-finite input, which would
    /// violate the tree invariant.
    pub fn num(value: f64) -> Expr {
        assert!(value.is_finite(), "expression constants must be finite");
        Expr::Constant(value)
    }

    /// Variable reference.
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Variable(name.into())
    }

    /// Function application with the smart-constructor constant folding
    /// used throughout differentiation and simplification.
    pub fn apply(func: Func, arg: Expr) -> Expr {
        simplify::func(func, arg)
    }

    /// Parse source text against the expression grammar.
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        parse::parse_expr(src)
    }

    /// Exact partial derivative with respect to `var`. See
    /// [`deriv`](module) notes: the result is built through the sound
    /// smart constructors, so trivial zero/one branches are already folded.
    pub fn diff(&self, var: &str) -> Expr {
        deriv::diff(self, var)
    }

    /// Structural simplification. Applies only value-preserving rewrites
    /// (constant folding, 0/1 identities, double negation, `x - x -> 0`),
    /// iterated to a fixed point.
    pub fn simplify(&self) -> Expr {
        simplify::simplify(self)
    }

    /// Strict numeric evaluation: every variable must be bound and every
    /// intermediate value must be finite, otherwise an error is returned.
    /// No silent `NaN` can escape.
    pub fn eval(&self, bindings: &Bindings) -> Result<f64, EvalError> {
        eval::eval(self, &mut |name| bindings.get(name))
    }

    /// Evaluation against an arbitrary variable resolver. Used by the
    /// integrator to avoid rebuilding maps in inner loops.
    pub fn eval_with(&self, lookup: &mut dyn FnMut(&str) -> Option<f64>) -> Result<f64, EvalError> {
        eval::eval(self, lookup)
    }

    /// The set of variable names appearing in the tree.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Constant(_) => {}
            Expr::Variable(name) => {
                out.insert(name.clone());
            }
            Expr::Neg(a) | Expr::Func(_, a) => a.collect_variables(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b)
            | Expr::Pow(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }

    /// Render to grammar text. The output re-parses to a structurally equal
    /// tree, up to the normalization of negative constants (a rendered
    /// `Constant(-c)` reads back as `Neg(Constant(c))`; see
    /// [`Expr::normalized`]).
    pub fn render(&self) -> String {
        self.to_string()
    }

    /// Rewrite negative constants as `Neg` of positive ones. This is the
    /// canonical form the parser produces (its `NUMBER` token is always
    /// non-negative), so `parse(render(e)) == e.normalized()` holds
    /// structurally for every tree.
    pub fn normalized(&self) -> Expr {
        match self {
            Expr::Constant(c) if c.is_sign_negative() => {
                Expr::Neg(Box::new(Expr::Constant(-c)))
            }
            Expr::Constant(_) | Expr::Variable(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.normalized())),
            Expr::Add(a, b) => Expr::Add(Box::new(a.normalized()), Box::new(b.normalized())),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.normalized()), Box::new(b.normalized())),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.normalized()), Box::new(b.normalized())),
            Expr::Div(a, b) => Expr::Div(Box::new(a.normalized()), Box::new(b.normalized())),
            Expr::Pow(a, b) => Expr::Pow(Box::new(a.normalized()), Box::new(b.normalized())),
            Expr::Func(f, a) => Expr::Func(*f, Box::new(a.normalized())),
        }
    }

    /// True when the tree is the literal constant `value`.
    pub fn is_const(&self, value: f64) -> bool {
        matches!(self, Expr::Constant(c) if *c == value)
    }
}

/// Operator precedence levels used by the renderer, mirroring the grammar:
/// additive 1, multiplicative 2, unary minus 3, power 4, atoms 5.
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        Expr::Constant(_) | Expr::Variable(_) | Expr::Func(..) => 5,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // `min` is the lowest precedence a child may have before it needs
        // parentheses; right operands of left-associative operators and the
        // base of `^` are held one level tighter to keep re-parsing
        // structure-faithful.
        fn write_at(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if prec(e) < min {
                write!(f, "(")?;
                write_at(e, 0, f)?;
                return write!(f, ")");
            }
            match e {
                Expr::Constant(c) => {
                    if c.is_sign_negative() {
                        // Negative constants render through unary minus so
                        // the output stays inside the grammar (NUMBER is
                        // non-negative).
                        write!(f, "-{}", -c)
                    } else {
                        write!(f, "{c}")
                    }
                }
                Expr::Variable(name) => write!(f, "{name}"),
                Expr::Neg(a) => {
                    write!(f, "-")?;
                    // The operand of unary minus is itself a `unary`
                    // production; a bare power would re-parse as
                    // `(-a)^b`, so powers get parentheses here.
                    match prec(a) {
                        4 => {
                            write!(f, "(")?;
                            write_at(a, 0, f)?;
                            write!(f, ")")
                        }
                        _ => write_at(a, 3, f),
                    }
                }
                Expr::Add(a, b) => {
                    write_at(a, 1, f)?;
                    write!(f, " + ")?;
                    write_at(b, 2, f)
                }
                Expr::Sub(a, b) => {
                    write_at(a, 1, f)?;
                    write!(f, " - ")?;
                    write_at(b, 2, f)
                }
                Expr::Mul(a, b) => {
                    write_at(a, 2, f)?;
                    write!(f, "*")?;
                    write_at(b, 3, f)
                }
                Expr::Div(a, b) => {
                    write_at(a, 2, f)?;
                    write!(f, "/")?;
                    write_at(b, 3, f)
                }
                Expr::Pow(a, b) => {
                    // Base must be a `unary`: negations are fine, powers
                    // and anything looser need parentheses.
                    match prec(a) {
                        0..=2 | 4 => {
                            write!(f, "(")?;
                            write_at(a, 0, f)?;
                            write!(f, ")")?;
                        }
                        _ => write_at(a, 3, f)?,
                    }
                    write!(f, "^")?;
                    // Exponent is a `factor`: powers chain right-
                    // associatively and unary minus is allowed bare.
                    write_at(b, 3, f)
                }
                Expr::Func(func, a) => {
                    write!(f, "{}(", func.name())?;
                    write_at(a, 0, f)?;
                    write!(f, ")")
                }
            }
        }
        write_at(self, 0, f)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        simplify::add(self, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        simplify::sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        simplify::mul(self, rhs)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        simplify::div(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        simplify::neg(self)
    }
}

/// Variable assignment used for evaluation: an ordered name-to-value map.
/// Ordering is deterministic (sorted by name) so printed witness points and
/// serialized reports are reproducible.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bindings(BTreeMap<String, f64>);

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    /// Insert or overwrite one binding, returning `self` for chaining.
    pub fn with(mut self, name: impl Into<String>, value: f64) -> Bindings {
        self.0.insert(name.into(), value);
        self
    }

    pub fn insert(&mut self, name: impl Into<String>, value: f64) {
        self.0.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for Bindings {
    fn from_iter<T: IntoIterator<Item = (S, f64)>>(iter: T) -> Bindings {
        Bindings(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

impl fmt::Display for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (name, value)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name} = {value}")?;
        }
        write!(f, "}}")
    }
}
