//! Symbolic expressions in one real variable `x` on `[0, 1]`.
//!
//! An [`Expr`] is an immutable tree; subtrees are shared through [`Arc`], so
//! cloning is cheap and expressions can be moved across threads.
//!
//! Evaluation is strict: any non-finite intermediate value (division by
//! zero, `ln` of a non-positive number, overflow) is reported as an
//! [`EvalError`] instead of leaking `inf`/`NaN` into a sum.

mod diff;
mod parse;
mod print;

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops;

use crate::math;

pub use parse::ParseError;

/// Named mathematical constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    E,
    Pi,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::E => math::E,
            Constant::Pi => math::PI,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constant::E => "e",
            Constant::Pi => "pi",
        }
    }
}

/// Elementary functions of one argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }
}

/// One piece of a piecewise definition, covering `[start, end)`.
///
/// The last piece of a [`Expr::Piecewise`] is closed on the right.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Named(Constant),
    Var,
    Neg(Arc<Expr>),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Pow(Arc<Expr>, Arc<Expr>),
    Apply(Func, Arc<Expr>),
    /// Pieces partition `[0, 1]` with strictly increasing breakpoints.
    Piecewise(Arc<[Piece]>),
}

/// Failure to evaluate an expression at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalError {
    pub x: f64,
    pub op: &'static str,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} is not finite at x = {}", self.op, self.x)
    }
}

/// Why a list of pieces does not form a valid piecewise definition.
#[derive(Debug, Clone, PartialEq)]
pub enum PiecewiseError {
    Empty,
    StartNotZero(f64),
    EndNotOne(f64),
    NotIncreasing { start: f64, end: f64 },
    Gap { end: f64, next_start: f64 },
    Nested,
}

impl fmt::Display for PiecewiseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PiecewiseError::Empty => write!(f, "piecewise definition needs at least one piece"),
            PiecewiseError::StartNotZero(s) => write!(f, "first piece starts at {s}, expected 0"),
            PiecewiseError::EndNotOne(e) => write!(f, "last piece ends at {e}, expected 1"),
            PiecewiseError::NotIncreasing { start, end } => {
                write!(f, "piece {start}:{end} is empty or reversed")
            }
            PiecewiseError::Gap { end, next_start } => {
                write!(f, "pieces do not meet: one ends at {end}, the next starts at {next_start}")
            }
            PiecewiseError::Nested => write!(f, "pieces may not themselves be piecewise"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    /// Half-open `[a, b)` pieces: a breakpoint belongs to the piece on its right.
    Right,
    /// `(a, b]` pieces: left-hand limits at breakpoints.
    Left,
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn x() -> Expr {
        Expr::Var
    }

    pub fn e() -> Expr {
        Expr::Named(Constant::E)
    }

    pub fn pi() -> Expr {
        Expr::Named(Constant::Pi)
    }

    pub fn exp(self) -> Expr {
        Expr::Apply(Func::Exp, Arc::new(self))
    }

    pub fn ln(self) -> Expr {
        Expr::Apply(Func::Ln, Arc::new(self))
    }

    pub fn sqrt(self) -> Expr {
        Expr::Apply(Func::Sqrt, Arc::new(self))
    }

    pub fn sin(self) -> Expr {
        Expr::Apply(Func::Sin, Arc::new(self))
    }

    pub fn cos(self) -> Expr {
        Expr::Apply(Func::Cos, Arc::new(self))
    }

    pub fn pow(self, exponent: impl Into<Expr>) -> Expr {
        Expr::Pow(Arc::new(self), Arc::new(exponent.into()))
    }

    /// `c·x^n`, the building block of polynomial test families.
    pub fn monomial(c: f64, n: u32) -> Expr {
        let power = match n {
            0 => return Expr::Const(c),
            1 => Expr::Var,
            _ => Expr::Var.pow(n as f64),
        };
        if c == 1.0 {
            power
        } else {
            Expr::Const(c) * power
        }
    }

    /// `e^{rate·x}`.
    pub fn exp_rate(rate: f64) -> Expr {
        if rate == 1.0 {
            Expr::Var.exp()
        } else {
            (Expr::Const(rate) * Expr::Var).exp()
        }
    }

    /// `a + b·x`, omitting a zero constant and a unit slope.
    pub fn affine(a: f64, b: f64) -> Expr {
        let slope = match b {
            0.0 => return Expr::Const(a),
            1.0 => Expr::Var,
            _ => Expr::Mul(Arc::new(Expr::Const(b)), Arc::new(Expr::Var)),
        };
        if a == 0.0 {
            slope
        } else {
            Expr::Add(Arc::new(Expr::Const(a)), Arc::new(slope))
        }
    }

    /// Validates and builds a piecewise expression.
    pub fn piecewise(pieces: Vec<Piece>) -> Result<Expr, PiecewiseError> {
        let first = pieces.first().ok_or(PiecewiseError::Empty)?;
        if first.start != 0.0 {
            return Err(PiecewiseError::StartNotZero(first.start));
        }
        let last = pieces.last().ok_or(PiecewiseError::Empty)?;
        if last.end != 1.0 {
            return Err(PiecewiseError::EndNotOne(last.end));
        }
        for p in &pieces {
            if p.start.is_nan() || p.end.is_nan() || p.start >= p.end {
                return Err(PiecewiseError::NotIncreasing { start: p.start, end: p.end });
            }
            if p.body.has_piecewise() {
                return Err(PiecewiseError::Nested);
            }
        }
        for w in pieces.windows(2) {
            if w[0].end != w[1].start {
                return Err(PiecewiseError::Gap { end: w[0].end, next_start: w[1].start });
            }
        }
        Ok(Expr::Piecewise(pieces.into()))
    }

    pub fn has_piecewise(&self) -> bool {
        self.any_node(&|e| matches!(e, Expr::Piecewise(_)))
    }

    /// True when the expression does not depend on `x`.
    pub fn is_constant(&self) -> bool {
        !self.any_node(&|e| matches!(e, Expr::Var))
    }

    /// Interior breakpoints of every piecewise node, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Expr::Const(_) | Expr::Named(_) | Expr::Var => {}
            Expr::Neg(a) | Expr::Apply(_, a) => a.collect_breakpoints(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.collect_breakpoints(out);
                b.collect_breakpoints(out);
            }
            Expr::Piecewise(pieces) => {
                out.extend(pieces.iter().skip(1).map(|p| p.start));
            }
        }
    }

    fn any_node(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Expr::Const(_) | Expr::Named(_) | Expr::Var => false,
            Expr::Neg(a) | Expr::Apply(_, a) => a.any_node(pred),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.any_node(pred) || b.any_node(pred)
            }
            Expr::Piecewise(pieces) => pieces.iter().any(|p| p.body.any_node(pred)),
        }
    }

    /// Number of nodes in the tree (shared subtrees counted each time).
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Named(_) | Expr::Var => 1,
            Expr::Neg(a) | Expr::Apply(_, a) => 1 + a.size(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                1 + a.size() + b.size()
            }
            Expr::Piecewise(pieces) => 1 + pieces.iter().map(|p| p.body.size()).sum::<usize>(),
        }
    }

    /// Evaluates at `x`; at a breakpoint the piece on the right applies.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        self.eval_side(x, Side::Right)
    }

    /// Evaluates using left-hand limits at breakpoints.
    pub fn eval_left(&self, x: f64) -> Result<f64, EvalError> {
        self.eval_side(x, Side::Left)
    }

    pub(crate) fn eval_side(&self, x: f64, side: Side) -> Result<f64, EvalError> {
        let check = |v: f64, op: &'static str| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(EvalError { x, op })
            }
        };
        match self {
            Expr::Const(c) => check(*c, "constant"),
            Expr::Named(c) => Ok(c.value()),
            Expr::Var => check(x, "x"),
            Expr::Neg(a) => Ok(-a.eval_side(x, side)?),
            Expr::Add(a, b) => check(a.eval_side(x, side)? + b.eval_side(x, side)?, "sum"),
            Expr::Sub(a, b) => check(a.eval_side(x, side)? - b.eval_side(x, side)?, "difference"),
            Expr::Mul(a, b) => check(a.eval_side(x, side)? * b.eval_side(x, side)?, "product"),
            Expr::Div(a, b) => {
                let den = b.eval_side(x, side)?;
                if den == 0.0 {
                    return Err(EvalError { x, op: "division by zero" });
                }
                check(a.eval_side(x, side)? / den, "quotient")
            }
            Expr::Pow(a, b) => check(power(a.eval_side(x, side)?, b.eval_side(x, side)?), "power"),
            Expr::Apply(func, a) => {
                let v = a.eval_side(x, side)?;
                match func {
                    Func::Exp => check(math::exp(v), "exp"),
                    Func::Ln if v <= 0.0 => Err(EvalError { x, op: "ln of a non-positive value" }),
                    Func::Ln => check(math::ln(v), "ln"),
                    Func::Sqrt if v < 0.0 => Err(EvalError { x, op: "sqrt of a negative value" }),
                    Func::Sqrt => Ok(math::sqrt(v)),
                    Func::Sin => check(math::sin(v), "sin"),
                    Func::Cos => check(math::cos(v), "cos"),
                }
            }
            Expr::Piecewise(pieces) => select_piece(pieces, x, side).body.eval_side(x, side),
        }
    }

    /// Largest jump `|f(b⁺) − f(b⁻)|` over all breakpoints, or `None` when
    /// one of the one-sided values cannot be evaluated.
    pub fn max_jump(&self) -> Option<f64> {
        let mut worst: f64 = 0.0;
        for b in self.breakpoints() {
            let right = self.eval(b).ok()?;
            let left = self.eval_left(b).ok()?;
            worst = worst.max(math::abs(right - left));
        }
        Some(worst)
    }
}

fn select_piece(pieces: &[Piece], x: f64, side: Side) -> &Piece {
    let idx = match side {
        Side::Right => pieces.iter().position(|p| x < p.end),
        Side::Left => pieces.iter().position(|p| x <= p.end),
    };
    // x past the last breakpoint (or exactly 1) falls in the closed final piece
    &pieces[idx.unwrap_or(pieces.len() - 1)]
}

/// Real power with an exact integer fast path.
///
/// Non-integer exponents need a positive base; `0^p` is `0` for `p > 0`.
fn power(base: f64, exponent: f64) -> f64 {
    if exponent == libm::trunc(exponent) && math::abs(exponent) <= 1024.0 {
        return math::powi(base, exponent as i64);
    }
    if base > 0.0 {
        math::pow(base, exponent)
    } else if base == 0.0 && exponent > 0.0 {
        0.0
    } else {
        f64::NAN
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Expr::Const(c)
    }
}

impl core::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse(s)
    }
}

/// Parses an expression in the closed grammar (`sin`, `cos`, `exp`, `ln`,
/// `sqrt`, `e`, `pi`, `x`, `^`, arithmetic and `piecewise(a:b -> expr; ...)`).
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    parse::parse(src)
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Arc::new(self), Arc::new(rhs))
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Arc::new(self), Arc::new(rhs))
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Arc::new(self), Arc::new(rhs))
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Arc::new(self), Arc::new(rhs))
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Arc::new(self))
    }
}

impl ops::Mul<Expr> for f64 {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Const(self) * rhs
    }
}
