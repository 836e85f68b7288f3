//! Power means and numerical certification of s-concavity for functions of
//! one variable.
//!
//! A positive function `f` is s-concave when
//! `f((1-λ)t₁ + λt₂) >= M_s(f(t₁), f(t₂); λ)` for all `t₁, t₂` and `λ ∈ [0, 1]`.
//! The checks below sample that inequality on node triples of a grid.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Tolerance for curves evaluated in closed form.
pub const DEFAULT_TOL_EXACT: f64 = 1e-9;
/// Tolerance for curves obtained by quadrature or from grids.
pub const DEFAULT_TOL_GRID: f64 = 1e-4;

/// Number of violations kept in a report; the total is counted separately.
const KEPT_VIOLATIONS: usize = 256;

/// Refinement factor of the midpoint sweep relative to the pair grid.
const SWEEP_REFINEMENT: usize = 8;

const LAMBDAS: [f64; 3] = [0.25, 0.5, 0.75];

/// Power mean `M_s(a, b; λ) = ((1-λ)aˢ + λbˢ)^{1/s}`, with the geometric mean
/// at `s = 0`, `min` at `-∞` and `max` at `+∞`.
pub fn s_mean(a: f64, b: f64, lambda: f64, s: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "power mean needs positive arguments, got {a} and {b}"
        )));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!("λ must lie in [0, 1], got {lambda}")));
    }
    if s.is_nan() {
        return Err(Error::InvalidArgument("s is NaN".into()));
    }
    Ok(power_mean(a, b, lambda, s))
}

/// `M_s` for positive finite `a, b`. Written relative to `max(a, b)` (or the
/// min for `s < 0`) with `expm1`/`ln_1p` so that large `|s|` does not
/// overflow and small `|s|` does not cancel.
pub(crate) fn power_mean(a: f64, b: f64, lambda: f64, s: f64) -> f64 {
    if lambda == 0.0 {
        return a;
    }
    if lambda == 1.0 {
        return b;
    }
    if s == f64::INFINITY {
        return a.max(b);
    }
    if s == f64::NEG_INFINITY {
        return a.min(b);
    }
    let (la, lb) = (a.ln(), b.ln());
    if s == 0.0 {
        return ((1.0 - lambda) * la + lambda * lb).exp();
    }
    let lm = if s > 0.0 { la.max(lb) } else { la.min(lb) };
    let u = (1.0 - lambda) * (s * (la - lm)).exp_m1() + lambda * (s * (lb - lm)).exp_m1();
    (lm + u.ln_1p() / s).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// A tested triple where `f` at the interior point falls below the mean of
/// the end values by more than the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub t1: f64,
    pub t2: f64,
    pub lambda: f64,
    /// `M_s(f(t₁), f(t₂); λ) - f((1-λ)t₁ + λt₂)`.
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityReport {
    #[serde(serialize_with = "extended_real")]
    pub s: f64,
    pub verdict: Verdict,
    /// The worst violations, largest deficit first.
    pub violations: Vec<Violation>,
    pub violation_count: usize,
    /// Largest deficit over all tested triples, clamped at 0.
    pub worst_deficit: f64,
    /// Relative tolerance; a deficit counts when it exceeds `tolerance · scale`.
    pub tolerance: f64,
    /// Largest sampled value.
    pub scale: f64,
    pub triples_tested: usize,
    pub zero_points_skipped: usize,
    pub notes: Vec<String>,
}

impl ConcavityReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Serializes infinite values as the strings `"inf"` and `"-inf"`.
pub(crate) fn extended_real<S: Serializer>(x: &f64, ser: S) -> std::result::Result<S::Ok, S::Error> {
    if *x == f64::INFINITY {
        ser.serialize_str("inf")
    } else if *x == f64::NEG_INFINITY {
        ser.serialize_str("-inf")
    } else {
        ser.serialize_f64(*x)
    }
}

/// Checks s-concavity of `f` on `[t_lo, t_hi]`.
///
/// Every node triple of a `grid`-point uniform grid is tested (which covers
/// `λ ∈ {1/4, 1/2, 3/4}` whenever those points are nodes), and every midpoint
/// triple of an eight times finer grid is tested at `λ = 1/2`.
pub fn check_s_concave<F>(f: F, t_lo: f64, t_hi: f64, s: f64, grid: usize, tol: f64) -> Result<ConcavityReport>
where
    F: Fn(f64) -> f64 + Sync,
{
    if !(t_lo < t_hi && t_lo.is_finite() && t_hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("empty interval [{t_lo}, {t_hi}]")));
    }
    if grid < 3 {
        return Err(Error::InsufficientData(grid));
    }
    let n = SWEEP_REFINEMENT * (grid - 1) + 1;
    let dt = (t_hi - t_lo) / (n - 1) as f64;
    let ts: Vec<f64> = (0..n).map(|i| t_lo + i as f64 * dt).collect();
    let vs: Vec<f64> = ts.par_iter().map(|&t| f(t)).collect();
    check_samples(&ts, &vs, SWEEP_REFINEMENT, true, s, tol)
}

/// Checks γ-concavity of a sampled function using grid nodes only.
pub fn check_gamma_concave_fn(g: &GridFunction, gamma: f64, tol: f64) -> Result<ConcavityReport> {
    let ts: Vec<f64> = g.nodes().collect();
    check_samples(&ts, g.values(), 1, false, gamma, tol)
}

/// Checks s-concavity of samples `(tᵢ, vᵢ)` with strictly increasing `tᵢ`.
///
/// Pairs of samples are tested against the sample nearest to each
/// `(1-λ)tᵢ + λtₖ`, with `λ` recomputed from that sample's position, so
/// uneven spacing is handled exactly.
pub fn check_s_concave_samples(ts: &[f64], vs: &[f64], s: f64, tol: f64) -> Result<ConcavityReport> {
    check_samples(ts, vs, 1, false, s, tol)
}

fn check_samples(ts: &[f64], vs: &[f64], stride: usize, all_triples: bool, s: f64, tol: f64) -> Result<ConcavityReport> {
    if ts.len() != vs.len() {
        return Err(Error::InvalidArgument("sample abscissae and values differ in length".into()));
    }
    if s.is_nan() || !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("invalid s = {s} or tolerance = {tol}")));
    }
    if ts.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("abscissae must be strictly increasing".into()));
    }
    if let Some(v) = vs.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidArgument(format!("function values must be finite and non-negative, got {v}")));
    }
    let positive = vs.iter().filter(|&&v| v > 0.0).count();
    if positive < 3 {
        return Err(Error::InsufficientData(positive));
    }
    let scale = vs.iter().copied().fold(0.0, f64::max);
    let tester = Tester {
        ts,
        vs,
        s,
        threshold: tol * scale,
    };

    let n = ts.len();
    let coarse: Vec<usize> = (0..n).step_by(stride.max(1)).collect();
    let pairs = (0..coarse.len()).into_par_iter().map(|a| {
        let mut acc = Acc::default();
        for &k in &coarse[a + 1..] {
            let i = coarse[a];
            if all_triples {
                for &j in coarse[a + 1..].iter().take_while(|&&j| j < k) {
                    tester.test(i, j, k, &mut acc);
                }
                continue;
            }
            for lambda in LAMBDAS {
                if let Some(j) = nearest_interior(ts, i, k, (1.0 - lambda) * ts[i] + lambda * ts[k]) {
                    tester.test(i, j, k, &mut acc);
                }
            }
        }
        acc
    });
    let sweep = (0..n).into_par_iter().map(|i| {
        let mut acc = Acc::default();
        let mut m = 1;
        while i + 2 * m < n {
            tester.test(i, i + m, i + 2 * m, &mut acc);
            m += 1;
        }
        acc
    });
    let acc = pairs.chain(sweep).reduce(Acc::default, Acc::merge);

    let zeros = n - positive;
    let mut notes = Vec::new();
    if zeros > 0 {
        notes.push(format!("{zeros} sample(s) with f = 0 skipped as end points"));
    }
    Ok(ConcavityReport {
        s,
        verdict: if acc.count == 0 { Verdict::Pass } else { Verdict::Fail },
        violations: acc.kept,
        violation_count: acc.count,
        worst_deficit: acc.worst.max(0.0),
        tolerance: tol,
        scale,
        triples_tested: acc.tested,
        zero_points_skipped: zeros,
        notes,
    })
}

/// Index `j ∈ (i, k)` whose abscissa is closest to `target`.
fn nearest_interior(ts: &[f64], i: usize, k: usize, target: f64) -> Option<usize> {
    if k <= i + 1 {
        return None;
    }
    let p = i + 1 + ts[i + 1..k].partition_point(|&t| t < target);
    let candidates = [p.saturating_sub(1), p];
    candidates
        .into_iter()
        .filter(|&j| j > i && j < k)
        .min_by(|&x, &y| (ts[x] - target).abs().total_cmp(&(ts[y] - target).abs()))
}

struct Tester<'a> {
    ts: &'a [f64],
    vs: &'a [f64],
    s: f64,
    threshold: f64,
}

impl Tester<'_> {
    fn test(&self, i: usize, j: usize, k: usize, acc: &mut Acc) {
        let (f1, f2) = (self.vs[i], self.vs[k]);
        if f1 == 0.0 || f2 == 0.0 {
            return;
        }
        let lambda = (self.ts[j] - self.ts[i]) / (self.ts[k] - self.ts[i]);
        let deficit = power_mean(f1, f2, lambda, self.s) - self.vs[j];
        acc.tested += 1;
        acc.worst = acc.worst.max(deficit);
        if deficit > self.threshold {
            acc.count += 1;
            acc.keep(Violation {
                t1: self.ts[i],
                t2: self.ts[k],
                lambda,
                deficit,
            });
        }
    }
}

struct Acc {
    tested: usize,
    count: usize,
    worst: f64,
    kept: Vec<Violation>,
}

impl Default for Acc {
    fn default() -> Self {
        Self {
            tested: 0,
            count: 0,
            worst: f64::NEG_INFINITY,
            kept: Vec::new(),
        }
    }
}

impl Acc {
    fn keep(&mut self, v: Violation) {
        self.kept.push(v);
        if self.kept.len() >= 2 * KEPT_VIOLATIONS {
            self.trim();
        }
    }

    fn trim(&mut self) {
        self.kept.sort_by(|a, b| b.deficit.total_cmp(&a.deficit));
        self.kept.truncate(KEPT_VIOLATIONS);
    }

    fn merge(mut self, other: Self) -> Self {
        self.tested += other.tested;
        self.count += other.count;
        self.worst = self.worst.max(other.worst);
        self.kept.extend(other.kept);
        self.trim();
        self
    }
}
