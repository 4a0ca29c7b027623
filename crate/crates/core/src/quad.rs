//! Adaptive Gauss–Kronrod integration on subintervals of `[0, 1]`.
//!
//! The 10-point Gauss / 21-point Kronrod pair only samples interior nodes,
//! so integrands with an endpoint singularity (`1/√x`, `1/x`) are probed
//! near the pole but never evaluated on it. Panels are refined worst-first
//! until the summed error estimate meets the tolerance, the subdivision
//! budget runs out, or the running total blows past `divergence_bound`.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::expr::{EvalError, Expr};
use crate::math;

/// Tolerances and budgets for [`integrate`] and [`divergence_probe`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub divergence_bound: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_subdivisions: 2000, divergence_bound: 1e8 }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<(), QuadError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if positive(self.abs_tol)
            && positive(self.rel_tol)
            && positive(self.divergence_bound)
            && self.max_subdivisions >= 1
        {
            Ok(())
        } else {
            Err(QuadError::InvalidConfig)
        }
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * math::abs(value))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
    pub converged: bool,
    /// Set when the partial sums kept growing instead of settling.
    pub diverged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadError {
    /// Non-finite integrand value at an interior node.
    Eval(EvalError),
    InvalidInterval { a: f64, b: f64 },
    InvalidConfig,
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadError::Eval(e) => write!(f, "integrand evaluation failed: {e}"),
            QuadError::InvalidInterval { a, b } => {
                write!(f, "integration interval [{a}, {b}] must satisfy 0 <= a < b <= 1")
            }
            QuadError::InvalidConfig => {
                write!(f, "tolerances and bounds must be positive and the subdivision budget at least 1")
            }
        }
    }
}

impl From<EvalError> for QuadError {
    fn from(e: EvalError) -> Self {
        QuadError::Eval(e)
    }
}

// Kronrod abscissae; odd indices are the Gauss-10 nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Panels narrower than this are not bisected further.
const MIN_PANEL_WIDTH: f64 = 1e-280;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // worst error first; ties broken by position so refinement order is fixed
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.a.total_cmp(&self.a))
    }
}

/// One 21-point Kronrod evaluation with the QUADPACK-style error rescaling
/// and roundoff floor.
fn kronrod21(f: &Expr, a: f64, b: f64) -> Result<Panel, EvalError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f.eval(center)?;
    let mut gauss = 0.0;
    let mut kronrod = fc * WGK[10];
    let mut abs_sum = math::abs(kronrod);
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f.eval(center - dx)?;
        let f2 = f.eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (math::abs(f1) + math::abs(f2));
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * math::abs(fc - mean);
    for j in 0..10 {
        asc += WGK[j] * (math::abs(fv1[j] - mean) + math::abs(fv2[j] - mean));
    }

    let value = kronrod * half;
    let abs_value = abs_sum * math::abs(half);
    let asc = asc * math::abs(half);
    let mut error = math::abs((kronrod - gauss) * half);
    if asc != 0.0 && error != 0.0 {
        let scale = math::pow(200.0 * error / asc, 1.5);
        error = if scale < 1.0 { asc * scale } else { asc };
    }
    // the 21-term sum itself is only good to a few ulps of Σ|f|
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_value);
    }
    if !value.is_finite() || !abs_value.is_finite() {
        return Err(EvalError { x: center, op: "panel sum" });
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `[a, b] ⊆ [0, 1]`.
///
/// Breakpoints of piecewise nodes inside `(a, b)` seed the initial panels.
/// A result with `converged == false` still carries the running estimate;
/// `diverged` marks runs whose partial sums grew without settling.
pub fn integrate(f: &Expr, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult, QuadError> {
    cfg.validate()?;
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(QuadError::InvalidInterval { a, b });
    }

    let mut cuts = Vec::with_capacity(4);
    cuts.push(a);
    cuts.extend(f.breakpoints().into_iter().filter(|&p| a < p && p < b));
    cuts.push(b);

    let mut heap = BinaryHeap::new();
    for w in cuts.windows(2) {
        heap.push(kronrod21(f, w[0], w[1])?);
    }
    let mut total: f64 = heap.iter().map(|p| p.value).sum();
    let mut total_err: f64 = heap.iter().map(|p| p.error).sum();
    let mut history = Vec::new();
    let mut subdivisions = 0;
    let mut converged = false;
    let mut diverged = false;

    loop {
        if total_err <= cfg.tolerance(total) {
            converged = true;
            break;
        }
        if math::abs(total) > cfg.divergence_bound {
            diverged = true;
            break;
        }
        if subdivisions >= cfg.max_subdivisions {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if worst.b - worst.a < MIN_PANEL_WIDTH || mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let left = kronrod21(f, worst.a, mid)?;
        let right = kronrod21(f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        history.push(total);
    }

    // re-sum in interval order so the reported value does not depend on
    // the accumulated update rounding
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error_estimate: f64 = panels.iter().map(|p| p.error).sum();
    if converged && error_estimate > cfg.tolerance(value) {
        converged = false;
    }
    if !converged && !diverged {
        diverged = partial_sums_grow(&history);
    }
    Ok(QuadResult { value, error_estimate, subdivisions, converged, diverged })
}

/// Heuristic on the running totals of a refinement that did not converge:
/// the last stretch of increments all share one sign and are not shrinking.
fn partial_sums_grow(history: &[f64]) -> bool {
    let window = 32;
    if history.len() < 2 * window + 1 {
        return false;
    }
    let steps: Vec<f64> = history.windows(2).map(|w| w[1] - w[0]).collect();
    let n = steps.len();
    let recent = &steps[n - window..];
    let earlier = &steps[n - 2 * window..n - window];
    let same_sign = recent.iter().all(|&d| d > 0.0) || recent.iter().all(|&d| d < 0.0);
    let recent_mass: f64 = recent.iter().map(|d| math::abs(*d)).sum();
    let earlier_mass: f64 = earlier.iter().map(|d| math::abs(*d)).sum();
    same_sign && recent_mass > 0.0 && recent_mass >= 0.5 * earlier_mass
}

/// Outcome of [`divergence_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeVerdict {
    Convergent,
    Divergent,
    Inconclusive,
}

impl ProbeVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ProbeVerdict::Convergent => "convergent",
            ProbeVerdict::Divergent => "divergent",
            ProbeVerdict::Inconclusive => "inconclusive",
        }
    }

    /// The weaker of two verdicts: divergent beats inconclusive beats convergent.
    pub fn and(self, other: ProbeVerdict) -> ProbeVerdict {
        use ProbeVerdict::*;
        match (self, other) {
            (Divergent, _) | (_, Divergent) => Divergent,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Convergent,
        }
    }
}

impl fmt::Display for ProbeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Collar integrals and the verdict drawn from them.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub verdict: ProbeVerdict,
    /// `∫` over `[2^-m, 1 - 2^-m]` for `m = 3, 4, …` (stops early on failure).
    pub partial_sums: Vec<f64>,
    /// Summary of all collar integrations; `value` is the last partial sum.
    pub summary: QuadResult,
}

const FIRST_COLLAR: i32 = 3;
const LAST_COLLAR: i32 = 30;
const TAIL: usize = 8;
/// Increment ratio below which a tail counts as geometrically decaying.
const DECAY_RATIO: f64 = 0.97;
/// Increment ratio above which a tail counts as not shrinking at all.
const STALL_RATIO: f64 = 0.99;

/// Classifies `∫₀¹ f` as convergent or divergent from the integrals over
/// shrinking collars `[2^-m, 1 − 2^-m]`, `m = 3..30`.
///
/// Each endpoint is judged separately from its own sequence of collar
/// increments: a partial sum beyond `divergence_bound` or increments of
/// one sign that stop shrinking mean divergence; increments that vanish
/// below `abs_tol` or shrink geometrically mean convergence. Anything else,
/// including evaluation failures, is inconclusive.
pub fn divergence_probe(f: &Expr, cfg: &QuadConfig) -> ProbeReport {
    let mut summary = QuadResult { value: 0.0, error_estimate: 0.0, subdivisions: 0, converged: false, diverged: false };
    let mut partial_sums = Vec::new();
    let inconclusive = |partial_sums, summary| ProbeReport { verdict: ProbeVerdict::Inconclusive, partial_sums, summary };

    let run = |a: f64, b: f64, summary: &mut QuadResult| -> Option<f64> {
        let r = integrate(f, a, b, cfg).ok()?;
        summary.error_estimate += r.error_estimate;
        summary.subdivisions += r.subdivisions;
        (r.converged).then_some(r.value)
    };

    let inner = math::powi(2.0, -(FIRST_COLLAR as i64));
    let Some(mut total) = run(inner, 1.0 - inner, &mut summary) else {
        return inconclusive(partial_sums, summary);
    };
    partial_sums.push(total);
    let mut left_steps = Vec::new();
    let mut right_steps = Vec::new();
    let mut blew_up = false;
    for m in FIRST_COLLAR + 1..=LAST_COLLAR {
        let outer = math::powi(2.0, -(m as i64));
        let prev = 2.0 * outer;
        let (Some(l), Some(r)) = (run(outer, prev, &mut summary), run(1.0 - prev, 1.0 - outer, &mut summary)) else {
            summary.value = total;
            return inconclusive(partial_sums, summary);
        };
        left_steps.push(l);
        right_steps.push(r);
        total += l + r;
        partial_sums.push(total);
        if math::abs(total) > cfg.divergence_bound {
            blew_up = true;
            break;
        }
    }
    summary.value = total;

    let verdict = if blew_up {
        ProbeVerdict::Divergent
    } else {
        classify_tail(&left_steps, cfg.abs_tol).and(classify_tail(&right_steps, cfg.abs_tol))
    };
    summary.converged = verdict == ProbeVerdict::Convergent;
    summary.diverged = verdict == ProbeVerdict::Divergent;
    ProbeReport { verdict, partial_sums, summary }
}

fn classify_tail(steps: &[f64], abs_tol: f64) -> ProbeVerdict {
    if steps.len() < TAIL + 1 {
        return ProbeVerdict::Inconclusive;
    }
    let tail = &steps[steps.len() - TAIL - 1..];
    if tail[1..].iter().all(|d| math::abs(*d) <= abs_tol) {
        return ProbeVerdict::Convergent;
    }
    let ratios: Vec<f64> = tail
        .windows(2)
        .map(|w| if w[0] == 0.0 { f64::INFINITY } else { math::abs(w[1] / w[0]) })
        .collect();
    let one_sign = tail.iter().all(|&d| d > 0.0) || tail.iter().all(|&d| d < 0.0);
    if ratios.iter().all(|&r| r <= DECAY_RATIO) {
        ProbeVerdict::Convergent
    } else if one_sign && ratios.iter().all(|&r| r >= STALL_RATIO) {
        ProbeVerdict::Divergent
    } else {
        ProbeVerdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    fn int(src: &str) -> QuadResult {
        integrate(&parse(src).unwrap(), 0.0, 1.0, &cfg()).unwrap()
    }

    #[test]
    fn integrates_smooth_functions() {
        let r = int("x^2");
        assert!(r.converged);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
        let r = int("exp(2*x)");
        let e2 = core::f64::consts::E * core::f64::consts::E;
        assert!((r.value - (e2 - 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn classifies_divergent_integral_as_diverged() {
        let r = int("1/(4*x)");
        assert!(!r.converged);
        assert!(r.diverged, "{r:?}");
        let r = int("1/x^2");
        assert!(!r.converged && r.diverged, "{r:?}");
    }

    #[test]
    fn handles_integrable_endpoint_singularity() {
        let r = int("x^(-0.5)");
        assert!(r.converged, "{r:?}");
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn splits_at_breakpoints() {
        let step = parse("piecewise(0:0.5 -> 0; 0.5:1 -> 1)").unwrap();
        let r = integrate(&step, 0.0, 1.0, &cfg()).unwrap();
        assert_eq!(r.subdivisions, 0);
        assert!((r.value - 0.5).abs() < 1e-15);
        let r = integrate(&step, 0.25, 0.75, &cfg()).unwrap();
        assert!((r.value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = parse("x").unwrap();
        assert!(matches!(integrate(&f, 0.5, 0.5, &cfg()), Err(QuadError::InvalidInterval { .. })));
        assert!(matches!(integrate(&f, -0.1, 0.5, &cfg()), Err(QuadError::InvalidInterval { .. })));
        assert!(matches!(integrate(&f, 0.0, 1.5, &cfg()), Err(QuadError::InvalidInterval { .. })));
        let bad = QuadConfig { abs_tol: 0.0, ..cfg() };
        assert_eq!(integrate(&f, 0.0, 1.0, &bad), Err(QuadError::InvalidConfig));
        let bad = QuadConfig { max_subdivisions: 0, ..cfg() };
        assert_eq!(integrate(&f, 0.0, 1.0, &bad), Err(QuadError::InvalidConfig));
        let pole = parse("1/(x - 0.5)^2").unwrap();
        // the centre node of a single panel lands on the pole
        assert!(matches!(integrate(&pole, 0.0, 1.0, &cfg()), Err(QuadError::Eval(_))));
    }

    #[test]
    fn respects_the_subdivision_budget() {
        let tight = QuadConfig { max_subdivisions: 5, ..cfg() };
        let r = integrate(&parse("x^(-0.9)").unwrap(), 0.0, 1.0, &tight).unwrap();
        assert!(r.subdivisions <= 5);
        assert!(!r.converged);
    }

    #[test]
    fn probe_verdicts() {
        let probe = |s: &str| divergence_probe(&parse(s).unwrap(), &cfg()).verdict;
        assert_eq!(probe("1/(4*x)"), ProbeVerdict::Divergent);
        assert_eq!(probe("x^2"), ProbeVerdict::Convergent);
        assert_eq!(probe("x^(-0.5)"), ProbeVerdict::Convergent);
        assert_eq!(probe("1/(1-x)"), ProbeVerdict::Divergent);
        assert_eq!(probe("1/x^2"), ProbeVerdict::Divergent);
        assert_eq!(probe("0"), ProbeVerdict::Convergent);
        // cancelling poles at both ends are still divergent
        assert_eq!(probe("1/x - 1/(1-x)"), ProbeVerdict::Divergent);
    }

    #[test]
    fn probe_partial_sums_approach_the_integral() {
        let report = divergence_probe(&parse("x^(-0.5)").unwrap(), &cfg());
        assert_eq!(report.partial_sums.len(), 28);
        let last = *report.partial_sums.last().unwrap();
        // ∫_{2^-30}^{1-2^-30} x^{-1/2} = 2(√(1-2^-30) - 2^-15)
        let exact = 2.0 * ((1.0 - 2f64.powi(-30)).sqrt() - 2f64.powi(-15));
        assert!((last - exact).abs() < 1e-9);
        assert!(report.summary.converged);
    }
}
