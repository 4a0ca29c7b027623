//! Orthogonal decompositions of `W^{1,2}([0, 1])`.
//!
//! * **Affine split**: `f = Pf + Qf` where `Pf` is the `W^{1,2}`-orthogonal
//!   projection onto the affine functions `span{1, x}` (the kernel of `D²`)
//!   and `Qf` is the remainder, which is the second derivative of some `η`.
//! * **Boundary split**: `f = (f − αeˣ − βe⁻ˣ) + (αeˣ + βe⁻ˣ)` where the
//!   first part vanishes at both endpoints and the second lies in
//!   `span{eˣ, e⁻ˣ}`, the orthogonal complement of `W₀^{1,2}`.
//!
//! Projections are computed from the Gram normal equations, never from
//! closed-form guesses, so the orthogonality residual is a genuine check.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::expr::Expr;
use crate::math;
use crate::quad::integrate;
use crate::space::Regularity;
use crate::Sobolev;

/// Smallest acceptable `|det G| / Π‖rowᵢ‖` before a basis counts as singular.
pub const DET_SCALE_MIN: f64 = 1e-12;

/// Number of abscissae in an [`EtaReport`].
pub const ETA_GRID: usize = 1025;

/// Normal equations `G c = r` for projecting `f` onto `span(basis)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSystem {
    pub basis: Vec<Expr>,
    /// Row-major `n × n` Gram matrix `⟨bᵢ, bⱼ⟩_k`.
    pub matrix: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub coeffs: Vec<f64>,
    /// `|det G|` relative to the product of the row norms, in `[0, 1]`.
    pub det_scale: f64,
}

impl GramSystem {
    /// `Σ cᵢ bᵢ` as an expression.
    pub fn combination(&self) -> Expr {
        let mut terms = self.coeffs.iter().zip(&self.basis).map(|(&c, b)| Expr::Const(c) * b.clone());
        let first = terms.next().unwrap_or(Expr::Const(0.0));
        terms.fold(first, |acc, t| acc + t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionKind {
    /// Affine part ⊕ second-derivative image.
    Bergman,
    /// `W₀^{1,2}` ⊕ `span{eˣ, e⁻ˣ}`.
    Boundary,
}

impl DecompositionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DecompositionKind::Bergman => "bergman",
            DecompositionKind::Boundary => "boundary",
        }
    }
}

/// `f = p_part + q_part` with `|⟨p_part, q_part⟩_{W^{1,2}}|` recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub p_part: Expr,
    pub q_part: Expr,
    pub ortho_residual: f64,
    pub kind: DecompositionKind,
    /// Coefficients of `p_part` in its basis (`a, b` of `a + bx`).
    pub coeffs: Vec<f64>,
}

/// Result of [`Sobolev::boundary_decompose`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySplit {
    pub alpha: f64,
    pub beta: f64,
    /// `f − αeˣ − βe⁻ˣ`, which vanishes at `0` and `1`.
    pub interior_part: Expr,
    /// `αeˣ + βe⁻ˣ`.
    pub boundary_part: Expr,
}

/// Values of `η`, `η′`, `η″` at one endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointValues {
    pub eta: f64,
    pub eta1: f64,
    /// `None` when the second derivative cannot be evaluated there.
    pub eta2: Option<f64>,
}

/// `η(x) = ∫₀ˣ (x − t) q(t) dt` on a uniform grid, so that `η″ = q` and
/// `η(0) = η′(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaReport {
    pub grid: Vec<f64>,
    pub eta_values: Vec<f64>,
    /// `η′` on the same grid.
    pub eta1_values: Vec<f64>,
    pub eta_at_1: f64,
    pub eta1_at_1: f64,
    pub at_0: EndpointValues,
    pub at_1: EndpointValues,
}

impl EtaReport {
    /// True when `η`, `η′` and `η″` all vanish at both ends within `tol`.
    pub fn vanishes_on_boundary(&self, tol: f64) -> bool {
        [self.at_0, self.at_1].iter().all(|v| {
            math::abs(v.eta) <= tol && math::abs(v.eta1) <= tol && v.eta2.is_some_and(|d| math::abs(d) <= tol)
        })
    }
}

/// Solves `G c = r` by Gaussian elimination with partial pivoting.
///
/// Returns the solution and the scaled determinant.
fn solve(matrix: &[Vec<f64>], rhs: &[f64]) -> (Vec<f64>, f64) {
    let n = rhs.len();
    let row_norm_product: f64 = matrix
        .iter()
        .map(|row| math::sqrt(row.iter().map(|v| v * v).sum::<f64>()))
        .product();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut b = rhs.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| math::abs(a[i][col]).total_cmp(&math::abs(a[j][col])))
            .unwrap_or(col);
        if pivot != col {
            a.swap(pivot, col);
            b.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        if p == 0.0 {
            return (vec![f64::NAN; n], 0.0);
        }
        for row in col + 1..n {
            let factor = a[row][col] / p;
            let (upper, lower) = a.split_at_mut(row);
            for (dst, src) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *dst -= factor * src;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    let scale = if row_norm_product > 0.0 { math::abs(det) / row_norm_product } else { 0.0 };
    (x, scale)
}

impl Sobolev {
    /// Orthogonal projection of `f` onto `span(basis)` in `W^{k,2}`.
    pub fn gram_project(&self, f: &Expr, basis: &[Expr], k: Regularity) -> Result<GramSystem, Error> {
        if basis.is_empty() {
            return Err(Error::EmptyBasis);
        }
        let n = basis.len();
        let mut matrix = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = self.inner(&basis[i], &basis[j], k)?;
                matrix[i][j] = v;
                matrix[j][i] = v;
            }
        }
        let rhs = basis.iter().map(|b| self.inner(f, b, k)).collect::<Result<Vec<_>, _>>()?;
        let (coeffs, det_scale) = solve(&matrix, &rhs);
        if det_scale.is_nan() || det_scale <= DET_SCALE_MIN {
            return Err(Error::IllConditioned { det_scale });
        }
        Ok(GramSystem { basis: basis.to_vec(), matrix, rhs, coeffs, det_scale })
    }

    /// Splits `f` into its `W^{1,2}` projection onto `span{1, x}` and the rest.
    pub fn bergman_decompose(&self, f: &Expr) -> Result<Decomposition, Error> {
        let system = self.gram_project(f, &[Expr::Const(1.0), Expr::Var], Regularity::W12)?;
        let (a, b) = (system.coeffs[0], system.coeffs[1]);
        let p_part = Expr::affine(a, b);
        let q_part = f.clone() - p_part.clone();
        let ortho_residual = math::abs(self.inner(&p_part, &q_part, Regularity::W12)?);
        Ok(Decomposition { p_part, q_part, ortho_residual, kind: DecompositionKind::Bergman, coeffs: vec![a, b] })
    }

    /// The boundary split with `α`, `β` from the endpoint values of `f`:
    ///
    /// ```text
    /// α = (f(1)e − f(0)) / (e² − 1),   β = (f(0)e² − f(1)e) / (e² − 1)
    /// ```
    pub fn boundary_decompose(&self, f: &Expr) -> Result<BoundarySplit, Error> {
        let f0 = f.eval(0.0)?;
        let f1 = f.eval(1.0)?;
        let e = math::E;
        let denom = e * e - 1.0;
        let alpha = (f1 * e - f0) / denom;
        let beta = (f0 * e * e - f1 * e) / denom;
        let boundary_part = Expr::Const(alpha) * Expr::Var.exp() + Expr::Const(beta) * (-Expr::Var).exp();
        let interior_part = f.clone() - boundary_part.clone();
        Ok(BoundarySplit { alpha, beta, interior_part, boundary_part })
    }

    /// The boundary split as a [`Decomposition`] (`p_part` in `W₀^{1,2}`).
    pub fn boundary_decomposition(&self, f: &Expr) -> Result<Decomposition, Error> {
        let split = self.boundary_decompose(f)?;
        let ortho_residual =
            math::abs(self.inner(&split.interior_part, &split.boundary_part, Regularity::W12)?);
        Ok(Decomposition {
            p_part: split.interior_part,
            q_part: split.boundary_part,
            ortho_residual,
            kind: DecompositionKind::Boundary,
            coeffs: vec![split.alpha, split.beta],
        })
    }

    /// Largest difference between the closed-form `(α, β)` and the Gram
    /// projection of `f` onto `{eˣ, e⁻ˣ}`.
    pub fn boundary_vs_gram_crosscheck(&self, f: &Expr) -> Result<f64, Error> {
        let split = self.boundary_decompose(f)?;
        let basis = [Expr::Var.exp(), (-Expr::Var).exp()];
        let system = self.gram_project(f, &basis, Regularity::W12)?;
        Ok(math::abs(system.coeffs[0] - split.alpha).max(math::abs(system.coeffs[1] - split.beta)))
    }

    /// Recovers `η` with `η″ = q_part`, `η(0) = η′(0) = 0`, on a 1025-point grid.
    pub fn eta_recover(&self, q_part: &Expr) -> Result<EtaReport, Error> {
        let step = 1.0 / (ETA_GRID - 1) as f64;
        let grid: Vec<f64> = (0..ETA_GRID).map(|i| if i + 1 == ETA_GRID { 1.0 } else { i as f64 * step }).collect();
        let moment = Expr::Var * q_part.clone();
        let mut mass = 0.0; // ∫₀ˣ q
        let mut first = 0.0; // ∫₀ˣ t q(t)
        let mut eta_values = Vec::with_capacity(ETA_GRID);
        let mut eta1_values = Vec::with_capacity(ETA_GRID);
        eta_values.push(0.0);
        eta1_values.push(0.0);
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            let cell = integrate(q_part, a, b, &self.quad)?;
            let cell_moment = integrate(&moment, a, b, &self.quad)?;
            for result in [cell, cell_moment] {
                if !result.converged {
                    return Err(Error::Integral { order: 0, result });
                }
            }
            mass += cell.value;
            first += cell_moment.value;
            eta_values.push(b * mass - first);
            eta1_values.push(mass);
        }
        let eta_at_1 = eta_values[ETA_GRID - 1];
        let eta1_at_1 = eta1_values[ETA_GRID - 1];
        Ok(EtaReport {
            grid,
            eta_values,
            eta1_values,
            eta_at_1,
            eta1_at_1,
            at_0: EndpointValues { eta: 0.0, eta1: 0.0, eta2: q_part.eval(0.0).ok() },
            at_1: EndpointValues { eta: eta_at_1, eta1: eta1_at_1, eta2: q_part.eval(1.0).ok() },
        })
    }

    /// Pairs a representer `r` with `g ∈ W₀^{1,2}` two ways: the `W^{1,2}`
    /// inner product `⟨r, g⟩`, and `∫₀¹ (r − r″) g` after integrating by
    /// parts. Returns `(pairing, functional_form)`.
    pub fn riesz_apply(&self, representer: &Expr, g: &Expr) -> Result<(f64, f64), Error> {
        for x in [0.0, 1.0] {
            let value = g.eval(x)?;
            if math::abs(value) > 1e-10 {
                return Err(Error::NotInW0 { x, value });
            }
        }
        let pairing = self.inner(representer, g, Regularity::W12)?;
        let density = representer.clone() - representer.diff(2);
        let result = integrate(&(density * g.clone()), 0.0, 1.0, &self.quad)?;
        if !result.converged {
            return Err(Error::Integral { order: 0, result });
        }
        Ok((pairing, result.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    const E: f64 = core::f64::consts::E;

    fn w() -> Sobolev {
        Sobolev::default()
    }

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn affine() -> [Expr; 2] {
        [Expr::Const(1.0), Expr::Var]
    }

    #[test]
    fn solver_handles_pivoting() {
        let (x, scale) = solve(&[vec![0.0, 1.0], vec![1.0, 0.0]], &[2.0, 3.0]);
        assert_eq!(x, vec![3.0, 2.0]);
        assert_eq!(scale, 1.0);
        let (_, scale) = solve(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[1.0, 2.0]);
        assert!(scale < 1e-15);
    }

    #[test]
    fn gram_examples() {
        let k1 = Regularity::W12;
        let s = w().gram_project(&p("x^2"), &affine(), k1).unwrap();
        assert!((s.coeffs[0] + 1.0 / 6.0).abs() < 1e-12 && (s.coeffs[1] - 1.0).abs() < 1e-12);
        let s = w().gram_project(&p("1"), &affine(), k1).unwrap();
        assert!((s.coeffs[0] - 1.0).abs() < 1e-12 && s.coeffs[1].abs() < 1e-12);
        let s = w().gram_project(&p("exp(x)"), &affine(), k1).unwrap();
        assert!((s.coeffs[0] - (10.0 * E - 16.0) / 13.0).abs() < 1e-12);
        assert!((s.coeffs[1] - 6.0 * (E + 1.0) / 13.0).abs() < 1e-12);
        assert!((s.matrix[0][1] - 0.5).abs() < 1e-15 && (s.matrix[1][1] - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gram_rejects_degenerate_bases() {
        let k1 = Regularity::W12;
        assert_eq!(w().gram_project(&p("x"), &[], k1), Err(Error::EmptyBasis));
        let dup = [p("x"), p("2*x")];
        assert!(matches!(w().gram_project(&p("x^2"), &dup, k1), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn bergman_examples() {
        let d = w().bergman_decompose(&p("x")).unwrap();
        assert!(d.coeffs[0].abs() < 1e-12 && (d.coeffs[1] - 1.0).abs() < 1e-12);
        assert!(w().norm(&d.q_part, Regularity::W12).unwrap() < 1e-8);
        let d = w().bergman_decompose(&p("x^2")).unwrap();
        assert!((d.coeffs[0] + 1.0 / 6.0).abs() < 1e-12 && (d.coeffs[1] - 1.0).abs() < 1e-12);
        assert!(d.ortho_residual < 1e-12);
        let d = w().bergman_decompose(&p("x^3")).unwrap();
        assert!((d.coeffs[0] + 16.0 / 65.0).abs() < 1e-12);
        assert!((d.coeffs[1] - 129.0 / 130.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_examples() {
        let s = w().boundary_decompose(&p("x")).unwrap();
        assert!((s.alpha - E / (E * E - 1.0)).abs() < 1e-15);
        assert!((s.beta + E / (E * E - 1.0)).abs() < 1e-15);
        let s = w().boundary_decompose(&p("exp(x)")).unwrap();
        assert!((s.alpha - 1.0).abs() < 1e-15 && s.beta.abs() < 1e-15);
        let s = w().boundary_decompose(&p("1")).unwrap();
        assert!((s.alpha - 1.0 / (E + 1.0)).abs() < 1e-15);
        assert!((s.beta - E / (E + 1.0)).abs() < 1e-15);
        assert!((s.alpha + s.beta - 1.0).abs() < 1e-15);
    }

    #[test]
    fn crosscheck_examples() {
        assert!(w().boundary_vs_gram_crosscheck(&p("x^2")).unwrap() <= 1e-8);
        assert!(w().boundary_vs_gram_crosscheck(&p("exp(x)")).unwrap() <= 1e-12);
        assert!(w().boundary_vs_gram_crosscheck(&p("sin(pi*x)")).unwrap() <= 1e-8);
    }

    #[test]
    fn eta_examples() {
        let r = w().eta_recover(&p("0")).unwrap();
        assert!(r.eta_values.iter().all(|&v| v == 0.0));
        let r = w().eta_recover(&p("1")).unwrap();
        assert_eq!(r.grid.len(), ETA_GRID);
        for (x, v) in r.grid.iter().zip(&r.eta_values) {
            assert!((v - x * x / 2.0).abs() < 1e-14);
        }
        assert!((r.eta1_at_1 - 1.0).abs() < 1e-14);
        assert_eq!(r.at_1.eta2, Some(1.0));
        assert!(!r.vanishes_on_boundary(1e-9));
    }

    #[test]
    fn riesz_examples() {
        let pi = core::f64::consts::PI;
        let g = p("x*(1-x)");
        let (pairing, form) = w().riesz_apply(&p("sin(pi*x)"), &g).unwrap();
        let exact = (1.0 + pi * pi) * 4.0 / pi.powi(3);
        assert!((pairing - exact).abs() < 1e-12 && (form - exact).abs() < 1e-12);
        let (pairing, form) = w().riesz_apply(&g, &g).unwrap();
        assert!((pairing - form).abs() < 1e-12);
        let (pairing, form) = w().riesz_apply(&p("2*exp(x) - exp(-x)"), &g).unwrap();
        assert!(pairing.abs() < 1e-12 && form.abs() < 1e-12);
        assert!(matches!(w().riesz_apply(&g, &p("x")), Err(Error::NotInW0 { x, .. }) if x == 1.0));
    }
}
