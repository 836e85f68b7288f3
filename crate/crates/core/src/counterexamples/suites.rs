//! Randomized checks of the positive results on the line.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::concavity::check_s_concave;
use crate::error::{Error, Result};
use crate::interval_set::IntervalUnion;
use crate::measure1d::Density1D;
use crate::parallel_volume::VolumeCurve;

pub const SUITE_TOL: f64 = 1e-7;
pub const SUITE_A_EXPONENTS: [f64; 5] = [-1.0, -0.5, 0.0, 0.25, 0.5];
const GRID: usize = 41;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteFailure {
    pub case: usize,
    pub s: f64,
    pub set: String,
    pub measure: String,
    pub t_end: f64,
    pub worst_deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub cases: usize,
    pub passed: usize,
    pub failures: Vec<SuiteFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositiveSuites {
    pub seed: u64,
    pub cases: usize,
    pub suites: Vec<SuiteSummary>,
}

impl PositiveSuites {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed == s.cases)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteSummary> {
        self.suites.iter().find(|s| s.suite == name)
    }
}

/// A random union of at most five intervals with endpoints on the eighths
/// strictly inside `(lo, hi)`.
pub fn random_set(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> IntervalUnion {
    let first = ((lo + 0.25) * 8.0).ceil() as i64;
    let last = ((hi - 0.25) * 8.0).floor() as i64;
    let slots = (last - first + 1) as usize;
    let k = rng.gen_range(1..=5usize).min(slots / 2);
    let mut idx = sample(rng, slots, 2 * k).into_vec();
    idx.sort_unstable();
    let x = |i: usize| (first + idx[i] as i64) as f64 / 8.0;
    IntervalUnion::new((0..k).map(|c| (x(2 * c), x(2 * c + 1)))).expect("sorted distinct endpoints")
}

fn case_rng(seed: u64, suite: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((suite << 32) | case as u64);
    rng
}

/// Distance from `A` to the complement of `[lo, hi]`.
fn inner_distance(set: &IntervalUnion, lo: f64, hi: f64) -> f64 {
    (set.min() - lo).min(hi - set.max())
}

struct Case {
    s: f64,
    set: IntervalUnion,
    measure: Density1D,
    t_end: f64,
}

fn case_a(rng: &mut ChaCha8Rng) -> Result<Case> {
    let s = SUITE_A_EXPONENTS[rng.gen_range(0..SUITE_A_EXPONENTS.len())];
    if s == 0.0 {
        let mean = rng.gen_range(-2.0..2.0);
        let sd = rng.gen_range(0.5..2.0);
        let set = random_set(rng, -4.0, 4.0);
        let t_end = set.convexity_threshold() + 2.0 * sd + 1.0;
        return Ok(Case { s, set, measure: Density1D::gaussian(mean, sd)?, t_end });
    }
    let gamma = s / (1.0 - s);
    let lo = rng.gen_range(0.0..2.0);
    let hi = lo + rng.gen_range(6.0..12.0);
    let p = -lo + rng.gen_range(0.1..3.0);
    let set = random_set(rng, lo, hi);
    let t_end = set.convexity_threshold().max(hi - lo) + 0.5;
    Ok(Case { s, set, measure: Density1D::power(gamma, p, lo, hi)?, t_end })
}

fn case_b(rng: &mut ChaCha8Rng) -> Result<Case> {
    let gamma = rng.gen_range(1.0..4.0);
    let lo = rng.gen_range(-2.0..2.0);
    let hi = lo + rng.gen_range(4.0..10.0);
    let p = -lo + rng.gen_range(0.0..2.0);
    let set = random_set(rng, lo, hi);
    let t_end = inner_distance(&set, lo, hi);
    Ok(Case { s: 1.0, set, measure: Density1D::power(gamma, p, lo, hi)?, t_end })
}

fn case_c(rng: &mut ChaCha8Rng) -> Result<Case> {
    let c = rng.gen_range(0.5..2.0);
    let lo = rng.gen_range(-5.0..5.0);
    let hi = lo + rng.gen_range(4.0..10.0);
    let set = random_set(rng, lo, hi);
    let t_end = inner_distance(&set, lo, hi);
    Ok(Case { s: 1.0, set, measure: Density1D::uniform(c, lo, hi)?, t_end })
}

fn run_suite(
    name: &str,
    seed: u64,
    id: u64,
    cases: usize,
    make: fn(&mut ChaCha8Rng) -> Result<Case>,
) -> Result<SuiteSummary> {
    let results: Vec<Option<SuiteFailure>> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let Case { s, set, measure, t_end } = make(&mut case_rng(seed, id, i))?;
            let (set_text, measure_text) = (set.to_string(), measure.to_string());
            let curve = VolumeCurve::new(set, measure);
            let report = check_s_concave(|t| curve.eval(t).unwrap_or(f64::NAN), 0.0, t_end, s, GRID, SUITE_TOL)?;
            Ok((!report.passed()).then(|| SuiteFailure {
                case: i,
                s,
                set: set_text,
                measure: measure_text,
                t_end,
                worst_deficit: report.worst_deficit,
            }))
        })
        .collect::<Result<_>>()?;
    let failures: Vec<SuiteFailure> = results.into_iter().flatten().collect();
    Ok(SuiteSummary { suite: name.to_string(), cases, passed: cases - failures.len(), failures })
}

/// Runs the three randomized suites: (a) s-concavity for `s ≤ ½` with the
/// set inside the support, (b) concavity up to the support boundary for
/// densities with `s ≥ ½`, (c) the same for uniform densities.
pub fn run_positive_suites(seed: u64, cases: usize) -> Result<PositiveSuites> {
    if cases == 0 {
        return Err(Error::InvalidArgument("cases must be at least 1".into()));
    }
    Ok(PositiveSuites {
        seed,
        cases,
        suites: vec![
            run_suite("a", seed, 0, cases, case_a)?,
            run_suite("b", seed, 1, cases, case_b)?,
            run_suite("c", seed, 2, cases, case_c)?,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_sets_are_inside() {
        let mut rng = case_rng(7, 0, 0);
        for _ in 0..200 {
            let a = random_set(&mut rng, 1.0, 7.5);
            assert!(a.min() > 1.0 && a.max() < 7.5);
            assert!(a.component_count() <= 5);
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(run_positive_suites(3, 5).unwrap(), run_positive_suites(3, 5).unwrap());
    }

    #[test]
    fn small_run_passes() {
        let out = run_positive_suites(0, 20).unwrap();
        assert!(out.passed(), "{:?}", out.suites.iter().flat_map(|s| &s.failures).collect::<Vec<_>>());
    }

    #[test]
    fn uniform_single_interval_is_affine() {
        let curve = VolumeCurve::new(IntervalUnion::interval(1.0, 2.0).unwrap(), Density1D::uniform(1.0, 0.0, 10.0).unwrap());
        assert_eq!(curve.eval(0.5).unwrap(), 2.0);
        let r = check_s_concave(|t| curve.eval(t).unwrap(), 0.0, 1.0, 1.0, 41, SUITE_TOL).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn concave_power_density_up_to_boundary() {
        let curve = VolumeCurve::new(IntervalUnion::interval(2.0, 3.0).unwrap(), Density1D::power(1.0, 0.0, 0.0, 5.0).unwrap());
        let r = check_s_concave(|t| curve.eval(t).unwrap(), 0.0, 2.0, 1.0, 41, SUITE_TOL).unwrap();
        assert!(r.passed());
    }
}
