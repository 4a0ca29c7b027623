//! The geometry of `W^{k,2}([0, 1])`.
//!
//! The order-`k` inner product sums the `L²` pairings of all derivatives up
//! to order `k`:
//!
//! ```text
//! ⟨f, g⟩_k = Σ_{j=0..k} ∫₀¹ f⁽ʲ⁾ g⁽ʲ⁾ dx
//! ```
//!
//! so `k = 0` is plain `L²` and `k = 1` is `W^{1,2}`. Norms, distances,
//! angles and one-dimensional projections all derive from it.

use alloc::vec::Vec;

use crate::error::Error;
use crate::expr::Expr;
use crate::math;
use crate::quad::{divergence_probe, integrate, ProbeVerdict, QuadResult};
use crate::Sobolev;

/// Highest derivative order the inner product will differentiate to.
pub const MAX_REGULARITY: u32 = 6;

/// Norms below this are treated as zero.
const ZERO_NORM: f64 = 1e-150;

/// Number of Sobolev derivatives, `k` in `W^{k,2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Regularity(u32);

impl Regularity {
    pub const L2: Regularity = Regularity(0);
    pub const W12: Regularity = Regularity(1);

    pub fn new(k: u32) -> Result<Regularity, Error> {
        if k > MAX_REGULARITY {
            return Err(Error::RegularityTooHigh(k));
        }
        Ok(Regularity(k))
    }

    pub fn k(self) -> u32 {
        self.0
    }
}

/// Whether a piecewise function is continuous across its breakpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Continuity {
    Continuous,
    /// Largest jump found at a breakpoint.
    Jump(f64),
    /// A one-sided value could not be evaluated.
    Unknown,
}

/// Membership of `f` in `L²` and `W^{1,2}` as judged by the divergence probe.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVerdict {
    pub in_l2: ProbeVerdict,
    pub in_w12: ProbeVerdict,
    pub continuity: Continuity,
    /// Collar summaries for `∫f²` and (when attempted) `∫(f′)²`.
    pub detail: Vec<QuadResult>,
}

/// `coef·g`, the projection of some `f` onto the line through `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub coef: f64,
    pub expr: Expr,
}

impl Sobolev {
    /// `∫₀¹ f⁽ʲ⁾ g⁽ʲ⁾` for `j = 0..=k`, one quadrature result per order.
    pub fn inner_terms(&self, f: &Expr, g: &Expr, k: Regularity) -> Result<Vec<QuadResult>, Error> {
        let mut fj = f.clone();
        let mut gj = g.clone();
        let mut terms = Vec::with_capacity(k.0 as usize + 1);
        for order in 0..=k.0 {
            if order > 0 {
                fj = fj.diff(1);
                gj = gj.diff(1);
            }
            let result = integrate(&(fj.clone() * gj.clone()), 0.0, 1.0, &self.quad)?;
            if !result.converged {
                return Err(Error::Integral { order, result });
            }
            terms.push(result);
        }
        Ok(terms)
    }

    pub fn inner(&self, f: &Expr, g: &Expr, k: Regularity) -> Result<f64, Error> {
        Ok(self.inner_terms(f, g, k)?.iter().map(|t| t.value).sum())
    }

    pub fn norm(&self, f: &Expr, k: Regularity) -> Result<f64, Error> {
        Ok(math::sqrt(self.inner(f, f, k)?.max(0.0)))
    }

    /// `‖f − g‖_k`.
    pub fn dist(&self, f: &Expr, g: &Expr, k: Regularity) -> Result<f64, Error> {
        self.norm(&(f.clone() - g.clone()), k)
    }

    /// Cosine of the angle between `f` and `g`.
    pub fn cos_angle(&self, f: &Expr, g: &Expr, k: Regularity) -> Result<f64, Error> {
        let nf = self.norm(f, k)?;
        let ng = self.norm(g, k)?;
        if nf <= ZERO_NORM || ng <= ZERO_NORM {
            return Err(Error::ZeroNorm);
        }
        Ok(self.inner(f, g, k)? / (nf * ng))
    }

    /// Projection of `f` onto the line spanned by `g`.
    pub fn proj(&self, f: &Expr, g: &Expr, k: Regularity) -> Result<Projection, Error> {
        let gg = self.inner(g, g, k)?;
        if math::sqrt(gg.max(0.0)) <= ZERO_NORM {
            return Err(Error::ZeroNorm);
        }
        let coef = self.inner(f, g, k)? / gg;
        Ok(Projection { coef, expr: Expr::Const(coef) * g.clone() })
    }

    /// Probes `∫f²` and `∫(f′)²` near both endpoints.
    ///
    /// A piecewise `f` that jumps at a breakpoint gets an inconclusive
    /// `W^{1,2}` verdict: its piecewise derivative is not its weak one.
    pub fn membership(&self, f: &Expr) -> MembershipVerdict {
        let l2 = divergence_probe(&(f.clone() * f.clone()), &self.quad);
        let in_l2 = l2.verdict;
        let mut detail = alloc::vec![l2.summary];

        let continuity = continuity(f);
        let in_w12 = if continuity != Continuity::Continuous {
            ProbeVerdict::Inconclusive
        } else {
            let df = f.diff(1);
            let h1 = divergence_probe(&(df.clone() * df), &self.quad);
            detail.push(h1.summary);
            in_l2.and(h1.verdict)
        };
        MembershipVerdict { in_l2, in_w12, continuity, detail }
    }

    /// Largest `|f(x) − f(y)| / |x − y|^exponent` over pairs from a 201-point
    /// uniform grid.
    ///
    /// A lower bound for the Hölder constant, not a certified supremum.
    pub fn holder_quotient(&self, f: &Expr, exponent: f64) -> Result<f64, Error> {
        if !(exponent > 0.0 && exponent <= 1.0) {
            return Err(Error::InvalidArgument("Hölder exponent must lie in (0, 1]"));
        }
        const POINTS: usize = 201;
        let step = 1.0 / (POINTS - 1) as f64;
        let grid: Vec<f64> = (0..POINTS).map(|i| i as f64 * step).collect();
        let values = grid.iter().map(|&x| f.eval(x)).collect::<Result<Vec<_>, _>>()?;
        let mut best: f64 = 0.0;
        for i in 0..POINTS {
            for j in i + 1..POINTS {
                let q = math::abs(values[j] - values[i]) / math::pow(grid[j] - grid[i], exponent);
                best = best.max(q);
            }
        }
        Ok(best)
    }
}

/// Continuity of `f` across its breakpoints, up to `1e-12` relative.
pub fn continuity(f: &Expr) -> Continuity {
    let mut worst: f64 = 0.0;
    for b in f.breakpoints() {
        let (Ok(right), Ok(left)) = (f.eval(b), f.eval_left(b)) else {
            return Continuity::Unknown;
        };
        let jump = math::abs(right - left);
        if jump > 1e-12 * (1.0 + math::abs(right)) {
            worst = worst.max(jump);
        }
    }
    if worst > 0.0 {
        Continuity::Jump(worst)
    } else {
        Continuity::Continuous
    }
}
