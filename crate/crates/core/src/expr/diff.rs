//! Symbolic differentiation.
//!
//! The derivative rules build their results through small folding
//! constructors (`0·a = 0`, `1·a = a`, constant arithmetic) so that repeated
//! differentiation stays compact. Nothing beyond that is simplified.

use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{Constant, Expr, Func, Piece};

fn as_const(e: &Expr) -> Option<f64> {
    match e {
        Expr::Const(c) => Some(*c),
        _ => None,
    }
}

fn folded(v: f64) -> Option<Expr> {
    v.is_finite().then_some(Expr::Const(v))
}

fn add(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => folded(x + y).unwrap_or_else(|| Expr::Add(Arc::new(a), Arc::new(b))),
        (Some(0.0), _) => b,
        (_, Some(0.0)) => a,
        _ => Expr::Add(Arc::new(a), Arc::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => folded(x - y).unwrap_or_else(|| Expr::Sub(Arc::new(a), Arc::new(b))),
        (_, Some(0.0)) => a,
        (Some(0.0), _) => neg(b),
        _ => Expr::Sub(Arc::new(a), Arc::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => (*inner).clone(),
        other => Expr::Neg(Arc::new(other)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => folded(x * y).unwrap_or_else(|| Expr::Mul(Arc::new(a), Arc::new(b))),
        (Some(0.0), _) | (_, Some(0.0)) => Expr::Const(0.0),
        (Some(1.0), _) => b,
        (_, Some(1.0)) => a,
        (Some(-1.0), _) => neg(b),
        (_, Some(-1.0)) => neg(a),
        (None, Some(_)) => mul(b, a),
        (Some(c), None) => match &b {
            // c·(d·u) → (c·d)·u
            Expr::Mul(l, r) if matches!(**l, Expr::Const(_)) => {
                let d = as_const(l).unwrap_or(1.0);
                match folded(c * d) {
                    Some(cd) => mul(cd, (**r).clone()),
                    None => Expr::Mul(Arc::new(a), Arc::new(b)),
                }
            }
            _ => Expr::Mul(Arc::new(a), Arc::new(b)),
        },
        (None, None) => Expr::Mul(Arc::new(a), Arc::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) if y != 0.0 => folded(x / y).unwrap_or_else(|| Expr::Div(Arc::new(a), Arc::new(b))),
        (Some(0.0), _) => Expr::Const(0.0),
        (_, Some(1.0)) => a,
        _ => Expr::Div(Arc::new(a), Arc::new(b)),
    }
}

fn pow(base: Expr, exponent: Expr) -> Expr {
    match as_const(&exponent) {
        Some(1.0) => base,
        Some(0.0) => Expr::Const(1.0),
        _ => Expr::Pow(Arc::new(base), Arc::new(exponent)),
    }
}

fn apply(func: Func, a: Expr) -> Expr {
    match (func, &a) {
        (Func::Ln, Expr::Named(Constant::E)) => Expr::Const(1.0),
        _ => Expr::Apply(func, Arc::new(a)),
    }
}

impl Expr {
    /// The `order`-th derivative with respect to `x`.
    ///
    /// Piecewise nodes are differentiated piece by piece with unchanged
    /// breakpoints, which is the classical derivative away from them.
    pub fn diff(&self, order: u32) -> Expr {
        let mut e = self.clone();
        for _ in 0..order {
            e = e.derivative();
        }
        e
    }

    fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Named(_) => Expr::Const(0.0),
            Expr::Var => Expr::Const(1.0),
            Expr::Neg(a) => neg(a.derivative()),
            Expr::Add(a, b) => add(a.derivative(), b.derivative()),
            Expr::Sub(a, b) => sub(a.derivative(), b.derivative()),
            Expr::Mul(a, b) => {
                let (a, b) = (&**a, &**b);
                add(mul(a.derivative(), b.clone()), mul(a.clone(), b.derivative()))
            }
            Expr::Div(a, b) => {
                let (a, b) = (&**a, &**b);
                if b.is_constant() {
                    return div(a.derivative(), b.clone());
                }
                let num = sub(mul(a.derivative(), b.clone()), mul(a.clone(), b.derivative()));
                div(num, pow(b.clone(), Expr::Const(2.0)))
            }
            Expr::Pow(base, exponent) => {
                let (b, u) = (&**base, &**exponent);
                match (b.is_constant(), u.is_constant()) {
                    (true, true) => Expr::Const(0.0),
                    // u·b^(u−1)·b'
                    (false, true) => {
                        let lowered = pow(b.clone(), sub(u.clone(), Expr::Const(1.0)));
                        mul(mul(u.clone(), lowered), b.derivative())
                    }
                    // b^u·ln(b)·u'
                    (true, false) => {
                        mul(mul(self.clone(), apply(Func::Ln, b.clone())), u.derivative())
                    }
                    // b^u·(u'·ln b + u·b'/b)
                    (false, false) => {
                        let log_term = mul(u.derivative(), apply(Func::Ln, b.clone()));
                        let base_term = div(mul(u.clone(), b.derivative()), b.clone());
                        mul(self.clone(), add(log_term, base_term))
                    }
                }
            }
            Expr::Apply(func, a) => {
                let inner = a.derivative();
                let a = (**a).clone();
                match func {
                    Func::Exp => mul(self.clone(), inner),
                    Func::Ln => div(inner, a),
                    Func::Sqrt => div(inner, mul(Expr::Const(2.0), self.clone())),
                    Func::Sin => mul(apply(Func::Cos, a), inner),
                    Func::Cos => neg(mul(apply(Func::Sin, a), inner)),
                }
            }
            Expr::Piecewise(pieces) => {
                let pieces: Vec<Piece> = pieces
                    .iter()
                    .map(|p| Piece { start: p.start, end: p.end, body: p.body.derivative() })
                    .collect();
                Expr::Piecewise(pieces.into())
            }
        }
    }
}
