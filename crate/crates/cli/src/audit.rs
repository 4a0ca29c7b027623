//! Recomputation of the reference values for the worked examples.
//!
//! Each claim pairs a stated value with a closure that recomputes it through
//! the library. Entries are classified by the absolute difference:
//! confirmed within `1e-6·(1+|v|)`, refuted beyond `1e-3·(1+|v|)`,
//! inconclusive in between or when the recomputation fails.

use std::cmp::Ordering;
use std::f64::consts::E;

use serde::Serialize;
use sobolev::{Error, Expr, Regularity, Sobolev};

const CONFIRM_TOL: f64 = 1e-6;
const REFUTE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ClaimValue {
    Scalar(f64),
    Coefficients(Vec<f64>),
}

impl ClaimValue {
    fn magnitude(&self) -> f64 {
        match self {
            ClaimValue::Scalar(v) => v.abs(),
            ClaimValue::Coefficients(c) => c.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    /// Largest componentwise difference, `None` when the shapes differ.
    fn abs_diff(&self, other: &ClaimValue) -> Option<f64> {
        match (self, other) {
            (ClaimValue::Scalar(a), ClaimValue::Scalar(b)) => Some((a - b).abs()),
            (ClaimValue::Coefficients(a), ClaimValue::Coefficients(b)) if a.len() == b.len() => {
                Some(a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs())))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Confirmed,
    Refuted,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Confirmed => "confirmed",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn classify(abs_diff: f64, reference_magnitude: f64) -> Verdict {
        let scale = 1.0 + reference_magnitude;
        if abs_diff <= CONFIRM_TOL * scale {
            Verdict::Confirmed
        } else if abs_diff > REFUTE_TOL * scale {
            Verdict::Refuted
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub claim_id: String,
    pub description: String,
    pub paper_value: ClaimValue,
    pub computed_value: Option<ClaimValue>,
    pub abs_diff: Option<f64>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn entry(&self, claim_id: &str) -> Option<&AuditEntry> {
        self.entries.iter().find(|e| e.claim_id == claim_id)
    }
}

type Compute = Box<dyn Fn(&Sobolev) -> Result<ClaimValue, Error>>;

struct Claim {
    id: String,
    description: String,
    reference: ClaimValue,
    compute: Compute,
}

fn claim(
    id: impl Into<String>,
    description: impl Into<String>,
    reference: ClaimValue,
    compute: impl Fn(&Sobolev) -> Result<ClaimValue, Error> + 'static,
) -> Claim {
    Claim { id: id.into(), description: description.into(), reference, compute: Box::new(compute) }
}

fn expr(src: &str) -> Expr {
    src.parse().unwrap_or_else(|e| panic!("built-in expression {src:?} does not parse: {e}"))
}

fn scalar(v: f64) -> ClaimValue {
    ClaimValue::Scalar(v)
}

fn coeffs(v: impl Into<Vec<f64>>) -> ClaimValue {
    ClaimValue::Coefficients(v.into())
}

const L2: Regularity = Regularity::L2;
const W12: Regularity = Regularity::W12;

/// Every registered claim, in registration order.
fn registry() -> Vec<Claim> {
    let mut claims = vec![
        claim("Ex3a", "W^{1,2} norm of sin(x)", scalar(1.0), |w| Ok(scalar(w.norm(&expr("sin(x)"), W12)?))),
        claim("Ex3b", "W^{1,2} inner product of sin(x) and cos(x)", scalar(0.0), |w| {
            Ok(scalar(w.inner(&expr("sin(x)"), &expr("cos(x)"), W12)?))
        }),
        claim(
            "Ex3c",
            "largest |<exp(a*x), exp(b*x)>| in W^{1,2} over a*b = -1, a in {-1, 0.5, 2, 3}",
            scalar(0.0),
            |w| {
                let mut worst: f64 = 0.0;
                for a in [-1.0, 0.5, 2.0, 3.0] {
                    let ip = w.inner(&Expr::exp_rate(a), &Expr::exp_rate(-1.0 / a), W12)?;
                    worst = if ip.abs() > worst.abs() { ip } else { worst };
                }
                Ok(scalar(worst))
            },
        ),
        claim("Ex4a", "ratio of W^{1,2} to L2 norm of exp(x)", scalar(2f64.sqrt()), |w| {
            let f = expr("exp(x)");
            Ok(scalar(w.norm(&f, W12)? / w.norm(&f, L2)?))
        }),
        claim("Ex4a-neg", "ratio of W^{1,2} to L2 norm of exp(-x)", scalar(2f64.sqrt()), |w| {
            let f = expr("exp(-x)");
            Ok(scalar(w.norm(&f, W12)? / w.norm(&f, L2)?))
        }),
        claim("Ex4b", "ratio of W^{1,2} to L2 norm of x", scalar(2.0), |w| {
            let f = expr("x");
            Ok(scalar(w.norm(&f, W12)? / w.norm(&f, L2)?))
        }),
        claim("Ex6a", "W^{1,2} distance between cos(x) and sin(x)", scalar(2f64.sqrt()), |w| {
            Ok(scalar(w.dist(&expr("cos(x)"), &expr("sin(x)"), W12)?))
        }),
        claim(
            "Ex6b",
            "W^{1,2} distance between exp(x) and exp(-x), stated as sqrt(e^4 - 1)/e",
            scalar((E.powi(4) - 1.0).sqrt() / E),
            |w| Ok(scalar(w.dist(&expr("exp(x)"), &expr("exp(-x)"), W12)?)),
        ),
        claim(
            "Ex7a",
            "L2 distance between cos(x) and sin(x), stated as sqrt(1 - sin(1)^2)",
            scalar((1.0 - 1f64.sin().powi(2)).sqrt()),
            |w| Ok(scalar(w.dist(&expr("cos(x)"), &expr("sin(x)"), L2)?)),
        ),
        claim(
            "Ex7b",
            "L2 distance between exp(x) and exp(-x), stated as sqrt(e^4 - 2e^2 - 1)/(e*sqrt(2))",
            scalar((E.powi(4) - 2.0 * E * E - 1.0).sqrt() / (E * 2f64.sqrt())),
            |w| Ok(scalar(w.dist(&expr("exp(x)"), &expr("exp(-x)"), L2)?)),
        ),
        claim("Ex8a", "affine projection (a, b) of x", coeffs([0.0, 1.0]), |w| {
            Ok(coeffs(w.bergman_decompose(&expr("x"))?.coeffs))
        }),
        claim("Ex8b", "affine projection (a, b) of x^2", coeffs([-1.0 / 6.0, 1.0]), |w| {
            Ok(coeffs(w.bergman_decompose(&expr("x^2"))?.coeffs))
        }),
        claim(
            "Ex8d",
            "affine projection (a, b) of cos(x), stated as a = 6 - 6cos(1) - 2sin(1), b = -12 + 6sin(1) + 12cos(1)",
            coeffs([
                6.0 - 6.0 * 1f64.cos() - 2.0 * 1f64.sin(),
                -12.0 + 6.0 * 1f64.sin() + 12.0 * 1f64.cos(),
            ]),
            |w| Ok(coeffs(w.bergman_decompose(&expr("cos(x)"))?.coeffs)),
        ),
        claim(
            "Ex8f",
            "affine projection (a, b) of exp(x), stated as 4e - 6e*x",
            coeffs([4.0 * E, -6.0 * E]),
            |w| Ok(coeffs(w.bergman_decompose(&expr("exp(x)"))?.coeffs)),
        ),
        claim(
            "Ex8f-ortho",
            "W^{1,2} inner product of the stated parts 4e - 6e*x and exp(x) + 6e*x - 4e",
            scalar(0.0),
            |w| Ok(scalar(w.inner(&expr("4*e - 6*e*x"), &expr("exp(x) + 6*e*x - 4*e"), W12)?)),
        ),
        claim(
            "Ex8f-eta",
            "boundary values (eta(0), eta'(0), eta(1), eta'(1)) of the stated eta = exp(x) + e*x^3 - 2e*x^2",
            coeffs([0.0; 4]),
            |_| {
                let eta = expr("exp(x) + e*x^3 - 2*e*x^2");
                let d = eta.diff(1);
                Ok(coeffs([eta.eval(0.0)?, d.eval(0.0)?, eta.eval(1.0)?, d.eval(1.0)?]))
            },
        ),
        claim(
            "Ex8f-eta-ode",
            "L2 distance between eta'' for the stated eta and the stated part exp(x) + 6e*x - 4e",
            scalar(0.0),
            |w| {
                let eta = expr("exp(x) + e*x^3 - 2*e*x^2");
                Ok(scalar(w.dist(&eta.diff(2), &expr("exp(x) + 6*e*x - 4*e"), L2)?))
            },
        ),
        claim(
            "Ex8f-P2",
            "affine projection (a, b) of 4e - 6e*x reproduces it",
            coeffs([4.0 * E, -6.0 * E]),
            |w| Ok(coeffs(w.bergman_decompose(&Expr::affine(4.0 * E, -6.0 * E))?.coeffs)),
        ),
        claim(
            "Ex9a",
            "<x - 1/6, x^2 - x + 1/6>_L2 + <1, 2x - 1>_L2",
            scalar(0.0),
            |w| {
                let lhs = w.inner(&expr("x - 1/6"), &expr("x^2 - x + 1/6"), L2)?;
                let rhs = w.inner(&expr("1"), &expr("2*x - 1"), L2)?;
                Ok(scalar(lhs + rhs))
            },
        ),
        claim(
            "Ex9b",
            "<exp(2x), exp(-x/2)>_L2 + <2exp(2x), -exp(-x/2)/2>_L2",
            scalar(0.0),
            |w| {
                let lhs = w.inner(&expr("exp(2*x)"), &expr("exp(-0.5*x)"), L2)?;
                let rhs = w.inner(&expr("2*exp(2*x)"), &expr("-0.5*exp(-0.5*x)"), L2)?;
                Ok(scalar(lhs + rhs))
            },
        ),
        claim("Ex10a", "W^{1,2} projection coefficient of exp(x) onto x^2, stated as 15e/23", scalar(15.0 * E / 23.0), |w| {
            Ok(scalar(w.proj(&expr("exp(x)"), &expr("x^2"), W12)?.coef))
        }),
        claim("Ex10b", "W^{1,2} projection coefficient of exp(x) onto exp(-x)", scalar(0.0), |w| {
            Ok(scalar(w.proj(&expr("exp(x)"), &expr("exp(-x)"), W12)?.coef))
        }),
        claim("Ex10c", "W^{1,2} projection coefficient of sin(x) onto cos(x)", scalar(0.0), |w| {
            Ok(scalar(w.proj(&expr("sin(x)"), &expr("cos(x)"), W12)?.coef))
        }),
        claim(
            "Cor1",
            "W^{1,2} distance between x^2 and 2x^2 minus the norm of x^2",
            scalar(0.0),
            |w| {
                let f = expr("x^2");
                Ok(scalar(w.dist(&f, &expr("2*x^2"), W12)? - w.norm(&f, W12)?))
            },
        ),
    ];

    for n in 1..=6u32 {
        let nf = n as f64;
        let den = nf * nf + 3.0 * nf + 2.0;
        claims.push(claim(
            format!("Ex8c-n{n}"),
            format!("affine projection (a, b) of x^{n}, stated as a = -(2n-2)/(n^2+3n+2), b = 6n/(n^2+3n+2)"),
            coeffs([-(2.0 * nf - 2.0) / den, 6.0 * nf / den]),
            move |w| Ok(coeffs(w.bergman_decompose(&Expr::monomial(1.0, n))?.coeffs)),
        ));
    }

    let samples: [(f64, f64); 6] = [(1.0, 1.0), (2.0, -1.0), (-0.5, 1.0), (1.0, 2.0), (-1.0, 0.5), (2.0, 3.0)];
    for (i, (a, b)) in samples.into_iter().enumerate() {
        let gamma = ((2.0 * a + 2.0 * b) * (a + b).exp() - 2.0 * a * b * b - 2.0 * b)
            / ((a + b) * (b * b + 1.0) * ((2.0 * b).exp() - 1.0));
        claims.push(claim(
            format!("Ex10d-{}", i + 1),
            format!("W^{{1,2}} projection coefficient of exp({a}*x) onto exp({b}*x), stated gamma formula"),
            scalar(gamma),
            move |w| Ok(scalar(w.proj(&Expr::exp_rate(a), &Expr::exp_rate(b), W12)?.coef)),
        ));
    }

    for (i, src) in ["x^2", "sin(pi*x) + x", "exp(x)"].into_iter().enumerate() {
        claims.push(claim(
            format!("Prop12-{}", i + 1),
            format!("boundary split of {src}: (Pf(0), Pf(1), Qf(0) - f(0), Qf(1) - f(1))"),
            coeffs([0.0; 4]),
            move |w| {
                let f = expr(src);
                let s = w.boundary_decompose(&f)?;
                let (f0, f1) = (f.eval(0.0)?, f.eval(1.0)?);
                Ok(coeffs([
                    s.interior_part.eval(0.0)?,
                    s.interior_part.eval(1.0)?,
                    s.boundary_part.eval(0.0)? - f0,
                    s.boundary_part.eval(1.0)? - f1,
                ]))
            },
        ));
    }

    claims
}

fn evaluate(claim: Claim, w: &Sobolev) -> AuditEntry {
    let Claim { id, description, reference, compute } = claim;
    let (computed_value, abs_diff, verdict, error) = match compute(w) {
        Ok(value) => match reference.abs_diff(&value) {
            Some(d) if d.is_finite() => (Some(value), Some(d), Verdict::classify(d, reference.magnitude()), None),
            _ => (Some(value), None, Verdict::Inconclusive, Some("value is not comparable".to_string())),
        },
        Err(e) => (None, None, Verdict::Inconclusive, Some(e.to_string())),
    };
    AuditEntry { claim_id: id, description, paper_value: reference, computed_value, abs_diff, verdict, error }
}

/// Orders `"Ex8c-n2"` before `"Ex8c-n10"` and `"Ex9a"` before `"Ex10a"`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for ((da, sa), (db, sb)) in ca.iter().zip(&cb) {
        let ord = if *da && *db {
            let (ta, tb) = (sa.trim_start_matches('0'), sb.trim_start_matches('0'));
            ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb))
        } else {
            sa.cmp(sb)
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}

/// Recomputes every claim and returns the entries ordered by claim id.
pub fn audit(w: &Sobolev) -> AuditReport {
    let mut entries: Vec<AuditEntry> = registry().into_iter().map(|c| evaluate(c, w)).collect();
    entries.sort_by(|a, b| natural_cmp(&a.claim_id, &b.claim_id));
    AuditReport { entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_thresholds() {
        assert_eq!(Verdict::classify(1e-7, 0.0), Verdict::Confirmed);
        assert_eq!(Verdict::classify(1.9e-6, 1.0), Verdict::Confirmed);
        assert_eq!(Verdict::classify(1e-4, 0.0), Verdict::Inconclusive);
        assert_eq!(Verdict::classify(2e-3, 1.0), Verdict::Inconclusive);
        assert_eq!(Verdict::classify(2.1e-3, 1.0), Verdict::Refuted);
    }

    #[test]
    fn natural_order() {
        let mut ids = vec!["Ex10a", "Ex8c-n2", "Prop12-1", "Ex9b", "Cor1", "Ex8c-n10", "Ex3a", "Ex8c"];
        ids.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(ids, ["Cor1", "Ex3a", "Ex8c", "Ex8c-n2", "Ex8c-n10", "Ex9b", "Ex10a", "Prop12-1"]);
    }

    #[test]
    fn shape_mismatch_is_not_comparable() {
        assert_eq!(scalar(1.0).abs_diff(&coeffs([1.0])), None);
        assert_eq!(coeffs([1.0, 2.0]).abs_diff(&coeffs([1.0])), None);
        assert_eq!(coeffs([1.0, 2.0]).abs_diff(&coeffs([1.5, 1.0])), Some(1.0));
    }

    #[test]
    fn failures_become_inconclusive() {
        let c = claim("X1", "diverges", scalar(0.0), |w| Ok(scalar(w.norm(&expr("1/x"), W12)?)));
        let e = evaluate(c, &Sobolev::default());
        assert_eq!(e.verdict, Verdict::Inconclusive);
        assert!(e.computed_value.is_none() && e.error.is_some());
    }

    #[test]
    fn ids_are_unique() {
        let mut ids: Vec<String> = registry().into_iter().map(|c| c.id).collect();
        let n = ids.len();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }
}
