//! Printing back into the parser's grammar.
//!
//! Parentheses are inserted wherever the parser would otherwise rebuild a
//! different tree, so `parse(print(e))` evaluates bit-for-bit like `e`.

use core::fmt;

use super::Expr;

const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Const(c) if c.is_sign_negative() => PREC_UNARY,
        Expr::Const(_) | Expr::Named(_) | Expr::Var | Expr::Apply(..) | Expr::Piecewise(_) => PREC_ATOM,
        Expr::Neg(_) => PREC_UNARY,
        Expr::Add(..) | Expr::Sub(..) => PREC_SUM,
        Expr::Mul(..) | Expr::Div(..) => PREC_PRODUCT,
        Expr::Pow(..) => PREC_POWER,
    }
}

fn child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{}` on f64 is the shortest string that reads back to the same value
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Named(c) => f.write_str(c.name()),
            Expr::Var => f.write_str("x"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                // `--x` is legal but `-(-x)` reads better
                let min = if precedence(a) == PREC_UNARY { PREC_ATOM } else { PREC_UNARY };
                child(f, a, min)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let op = if matches!(self, Expr::Add(..)) { " + " } else { " - " };
                child(f, a, PREC_SUM)?;
                f.write_str(op)?;
                child(f, b, PREC_SUM + 1)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = if matches!(self, Expr::Mul(..)) { "*" } else { "/" };
                child(f, a, PREC_PRODUCT)?;
                f.write_str(op)?;
                child(f, b, PREC_PRODUCT + 1)
            }
            Expr::Pow(a, b) => {
                child(f, a, PREC_ATOM)?;
                f.write_str("^")?;
                child(f, b, PREC_UNARY)
            }
            Expr::Apply(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Piecewise(pieces) => {
                f.write_str("piecewise(")?;
                for (i, p) in pieces.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{}:{} -> {}", p.start, p.end, p.body)?;
                }
                f.write_str(")")
            }
        }
    }
}
