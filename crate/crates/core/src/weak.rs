//! Weak-derivative verification.
//!
//! `h` is the order-`α` weak derivative of `f` when
//! `∫ h φ = (−1)^α ∫ f φ⁽ᵅ⁾` for every smooth `φ` vanishing at the
//! boundary together with its derivatives. The check runs a fixed battery
//! of 17 such functions: the polynomials `x^p (1−x)^q` for
//! `p, q ∈ {α+1, …, α+4}` and the bump `exp(−1/(x(1−x)))`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::expr::Expr;
use crate::math;
use crate::quad::integrate;
use crate::Sobolev;

pub const MAX_ORDER: u32 = 3;
/// Relative pass threshold on the largest residual.
pub const PASS_TOL: f64 = 1e-8;

/// Distance from an endpoint at which a removable singularity is sampled.
const LIMIT_OFFSET: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub id: String,
    pub expr: Expr,
}

impl TestFunction {
    /// `x^p (1−x)^q`.
    pub fn polynomial(p: u32, q: u32) -> TestFunction {
        let expr = Expr::Var.pow(p as f64) * (Expr::Const(1.0) - Expr::Var).pow(q as f64);
        TestFunction { id: format!("x^{p}(1-x)^{q}"), expr }
    }

    /// `exp(−1/(x(1−x)))`, extended by zero at the endpoints.
    pub fn bump() -> TestFunction {
        let expr = (-(Expr::Const(1.0) / (Expr::Var * (Expr::Const(1.0) - Expr::Var)))).exp();
        TestFunction { id: String::from("bump"), expr }
    }

    /// Largest `|φ⁽ʲ⁾|` at `0` and `1` for `j < order`.
    ///
    /// Where an endpoint value is a removable singularity (the bump) it is
    /// replaced by the value `1e-6` inside the interval.
    pub fn boundary_residual(&self, order: u32) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..order {
            let d = self.expr.diff(j);
            for (x, inside) in [(0.0, LIMIT_OFFSET), (1.0, 1.0 - LIMIT_OFFSET)] {
                let v = d.eval(x).or_else(|_| d.eval(inside)).unwrap_or(f64::INFINITY);
                worst = worst.max(math::abs(v));
            }
        }
        worst
    }
}

/// The 17 test functions used at a given order.
pub fn battery(order: u32) -> Vec<TestFunction> {
    let mut out = Vec::with_capacity(17);
    for p in order + 1..=order + 4 {
        for q in order + 1..=order + 4 {
            out.push(TestFunction::polynomial(p, q));
        }
    }
    out.push(TestFunction::bump());
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakResidual {
    pub test_function: String,
    /// `∫ h φ`.
    pub lhs: f64,
    /// `(−1)^α ∫ f φ⁽ᵅ⁾`.
    pub rhs: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakCheckReport {
    pub order: u32,
    pub residuals: Vec<WeakResidual>,
    pub max_residual: f64,
    /// Largest `|lhs|` or `|rhs|` over the battery.
    pub scale: f64,
    pub passed: bool,
}

impl Sobolev {
    /// Checks whether `h` is the order-`order` weak derivative of `f`.
    pub fn weak_check(&self, f: &Expr, h: &Expr, order: u32) -> Result<WeakCheckReport, Error> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidArgument("weak derivative order must be 1, 2 or 3"));
        }
        let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut residuals = Vec::with_capacity(17);
        for phi in battery(order) {
            let integral = |integrand: Expr| -> Result<f64, Error> {
                let result = integrate(&integrand, 0.0, 1.0, &self.quad)?;
                if !result.converged {
                    return Err(Error::TestIntegral { test_function: phi.id.clone(), result });
                }
                Ok(result.value)
            };
            let lhs = integral(h.clone() * phi.expr.clone())?;
            let rhs = sign * integral(f.clone() * phi.expr.diff(order))?;
            residuals.push(WeakResidual {
                test_function: phi.id,
                lhs,
                rhs,
                residual: math::abs(lhs - rhs),
            });
        }
        let max_residual = residuals.iter().map(|r| r.residual).fold(0.0, f64::max);
        let scale = residuals.iter().map(|r| math::abs(r.lhs).max(math::abs(r.rhs))).fold(0.0, f64::max);
        let passed = max_residual <= PASS_TOL * (1.0 + scale);
        Ok(WeakCheckReport { order, residuals, max_residual, scale, passed })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    const RAMP: &str = "piecewise(0:0.5 -> 0; 0.5:1 -> x - 0.5)";
    const STEP: &str = "piecewise(0:0.5 -> 0; 0.5:1 -> 1)";

    #[test]
    fn battery_has_seventeen_admissible_members() {
        for order in 1..=MAX_ORDER {
            let b = battery(order);
            assert_eq!(b.len(), 17);
            for phi in &b {
                assert!(phi.boundary_residual(order) <= 1e-12, "{} at order {order}", phi.id);
            }
        }
    }

    #[test]
    fn ramp_has_step_as_weak_derivative() {
        let r = Sobolev::default().weak_check(&p(RAMP), &p(STEP), 1).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.max_residual <= 1e-9);
    }

    #[test]
    fn classical_derivative_passes() {
        let r = Sobolev::default().weak_check(&p("x^2"), &p("2*x"), 1).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn wrong_derivative_fails_with_expected_residual() {
        let r = Sobolev::default().weak_check(&p(RAMP), &p("0"), 1).unwrap();
        assert!(!r.passed);
        // ∫_{1/2}^1 (x − 1/2) φ′ with φ = x²(1−x)² equals −∫_{1/2}^1 φ = −1/60
        let phi22 = r.residuals.iter().find(|r| r.test_function == "x^2(1-x)^2").unwrap();
        assert!((phi22.residual - 1.0 / 60.0).abs() < 1e-13, "{phi22:?}");
    }

    #[test]
    fn rejects_unsupported_orders() {
        let w = Sobolev::default();
        assert!(w.weak_check(&p("x"), &p("1"), 0).is_err());
        assert!(w.weak_check(&p("x"), &p("1"), 4).is_err());
    }

    #[test]
    fn higher_orders() {
        let w = Sobolev::default();
        assert!(w.weak_check(&p("sin(x)"), &p("-sin(x)"), 2).unwrap().passed);
        assert!(w.weak_check(&p("x^4"), &p("24*x"), 3).unwrap().passed);
        assert!(!w.weak_check(&p("x^4"), &p("12*x^2"), 3).unwrap().passed);
    }
}
