//! Parallel volume `t ↦ μ(A + t·[-1, 1])` of a compact set of the line.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval_set::IntervalUnion;
use crate::measure1d::Density1D;

/// Why the curve may fail to be differentiable at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakpointKind {
    /// Two components of the dilation fuse.
    Merge,
    /// A live endpoint of the dilation crosses an edge of the density support.
    SupportCrossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Breakpoint {
    pub t: f64,
    pub kind: BreakpointKind,
}

/// One-sided derivatives of `V^s` (or `log V` for `s = 0`) at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Junction {
    pub t: f64,
    pub kind: BreakpointKind,
    pub left: f64,
    pub right: f64,
    /// `left >= right` for `s >= 0`, `left <= right` for `s < 0`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeCurve {
    set: IntervalUnion,
    measure: Density1D,
    breakpoints: Vec<Breakpoint>,
}

impl VolumeCurve {
    pub fn new(set: IntervalUnion, measure: Density1D) -> Self {
        let breakpoints = compute_breakpoints(&set, &measure);
        Self {
            set,
            measure,
            breakpoints,
        }
    }

    pub fn set(&self) -> &IntervalUnion {
        &self.set
    }

    pub fn measure(&self) -> &Density1D {
        &self.measure
    }

    /// Sorted breakpoints, merges first when a merge and a crossing coincide.
    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn breakpoint_times(&self) -> Vec<f64> {
        self.breakpoints.iter().map(|b| b.t).collect()
    }

    pub fn is_breakpoint(&self, t: f64) -> bool {
        let tol = 1e-12 * t.abs().max(1.0);
        self.breakpoints.iter().any(|b| (b.t - t).abs() <= tol)
    }

    /// `μ(A + t·[-1, 1])`, using the closed dilation at merge times.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let dilated = self.set.dilate(t)?;
        dilated
            .intervals()
            .iter()
            .map(|&(a, b)| self.measure.integrate(a, b))
            .sum()
    }

    /// Right derivative: ψ summed over the boundary of the closed dilation,
    /// each endpoint taking the density limit on its outward side.
    pub fn derivative_right(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::NegativeRadius(t));
        }
        Ok(self
            .endpoints(t, false)
            .map(|(l, r)| self.measure.density_left_limit(l) + self.measure.density_right_limit(r))
            .sum())
    }

    /// Left derivative: ψ summed over the boundary of the open dilation,
    /// each endpoint taking the density limit on its inward side.
    pub fn derivative_left(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "left derivative needs t > 0, got {t}"
            )));
        }
        Ok(self
            .endpoints(t, true)
            .map(|(l, r)| self.measure.density_right_limit(l) + self.measure.density_left_limit(r))
            .sum())
    }

    /// `V''(t) = Σ [ψ'(R + t) - ψ'(L - t)]` over the dilation components.
    /// Tabulated densities fall back to Richardson-refined central differences
    /// of the exact first derivative.
    pub fn second_derivative(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "second derivative needs t > 0, got {t}"
            )));
        }
        if self.is_breakpoint(t) {
            return Err(Error::OneSidedOnly(t));
        }
        if let Density1D::Tabulated(_) = self.measure {
            return self.second_difference(t);
        }
        let mut total = 0.0;
        for (l, r) in self.endpoints(t, false) {
            let dl = self.measure.derivative_at(l).unwrap_or(0.0);
            let dr = self.measure.derivative_at(r).unwrap_or(0.0);
            total += dr - dl;
        }
        Ok(total)
    }

    fn second_difference(&self, t: f64) -> Result<f64> {
        let h = (1e-6 * t).max(1e-6).min(0.5 * t);
        let d2 = |h: f64| -> Result<f64> {
            Ok((self.derivative_right(t + h)? - self.derivative_right(t - h)?) / (2.0 * h))
        };
        let coarse = d2(h)?;
        let fine = d2(0.5 * h)?;
        Ok((4.0 * fine - coarse) / 3.0)
    }

    /// Checks the one-sided derivative ordering of `V^s` at every breakpoint.
    pub fn junction_check(&self, s: f64) -> Result<Vec<Junction>> {
        if !s.is_finite() {
            return Err(Error::InvalidArgument(format!("s must be finite, got {s}")));
        }
        self.breakpoints
            .iter()
            .map(|bp| {
                let v = self.eval(bp.t)?;
                if !(v > 0.0) {
                    return Err(Error::CurveVanishes(bp.t));
                }
                let factor = if s == 0.0 { 1.0 / v } else { s * v.powf(s - 1.0) };
                let left = factor * self.derivative_left(bp.t)?;
                let right = factor * self.derivative_right(bp.t)?;
                let slack = 1e-12 * left.abs().max(right.abs());
                let holds = if s >= 0.0 {
                    left >= right - slack
                } else {
                    left <= right + slack
                };
                Ok(Junction {
                    t: bp.t,
                    kind: bp.kind,
                    left,
                    right,
                    holds,
                })
            })
            .collect()
    }

    /// Endpoints `(L, R)` of the dilation components at radius `t`.
    fn endpoints(&self, t: f64, open: bool) -> impl Iterator<Item = (f64, f64)> + '_ {
        let iv = self.set.intervals();
        self.set
            .dilation_groups(t, open)
            .into_iter()
            .map(move |(first, last)| (iv[first].0 - t, iv[last].1 + t))
    }
}

fn compute_breakpoints(set: &IntervalUnion, measure: &Density1D) -> Vec<Breakpoint> {
    let iv = set.intervals();
    let mut out: Vec<Breakpoint> = set
        .merge_times()
        .into_iter()
        .map(|t| Breakpoint {
            t,
            kind: BreakpointKind::Merge,
        })
        .collect();
    if let Some((lo, hi)) = measure.support() {
        let gaps: Vec<f64> = set.gaps().collect();
        let mut push = |t: f64, live_until: f64| {
            if t > 0.0 && t < live_until {
                out.push(Breakpoint {
                    t,
                    kind: BreakpointKind::SupportCrossing,
                });
            }
        };
        for (i, &(a, b)) in iv.iter().enumerate() {
            // a left endpoint stops moving once the gap on its left closes
            let left_live = if i == 0 { f64::INFINITY } else { 0.5 * gaps[i - 1] };
            let right_live = if i + 1 == iv.len() { f64::INFINITY } else { 0.5 * gaps[i] };
            for edge in [lo, hi] {
                push(a - edge, left_live);
                push(edge - b, right_live);
            }
        }
    }
    out.sort_by(|x, y| x.t.total_cmp(&y.t).then((x.kind as u8).cmp(&(y.kind as u8))));
    out.dedup_by(|later, earlier| later.t == earlier.t);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_blocks() -> IntervalUnion {
        IntervalUnion::new([(0.0, 1.0), (2.0, 3.0)]).unwrap()
    }

    fn linear() -> Density1D {
        Density1D::power(1.0, 0.0, 0.0, 4.0).unwrap()
    }

    #[test]
    fn eval_examples() {
        let c = VolumeCurve::new(two_blocks(), Density1D::Lebesgue);
        assert_eq!(c.eval(0.25).unwrap(), 3.0);
        assert_eq!(c.eval(0.5).unwrap(), 4.0);
        assert!(c.eval(-0.1).is_err());
        let c = VolumeCurve::new(two_blocks(), linear());
        assert_relative_eq!(c.eval(0.25).unwrap(), 4.53125, max_relative = 1e-14);
    }

    #[test]
    fn one_sided_derivatives() {
        let c = VolumeCurve::new(two_blocks(), Density1D::Lebesgue);
        assert_eq!(c.derivative_left(0.25).unwrap(), 4.0);
        assert_eq!(c.derivative_right(0.25).unwrap(), 4.0);
        assert_eq!(c.derivative_left(0.5).unwrap(), 4.0);
        assert_eq!(c.derivative_right(0.5).unwrap(), 2.0);
        let convex = VolumeCurve::new(IntervalUnion::interval(0.0, 2.0).unwrap(), Density1D::Lebesgue);
        for t in [0.1, 1.0, 7.5] {
            assert_eq!(convex.derivative_left(t).unwrap(), 2.0);
            assert_eq!(convex.derivative_right(t).unwrap(), 2.0);
        }
    }

    #[test]
    fn second_derivative_examples() {
        // V(t) = (1+t)²/2 + ((3+t)² - (2-t)²)/2: only the inner endpoints cancel
        let c = VolumeCurve::new(two_blocks(), linear());
        assert_eq!(c.second_derivative(0.1).unwrap(), 1.0);
        let c = VolumeCurve::new(two_blocks(), Density1D::Lebesgue);
        assert_eq!(c.second_derivative(0.1).unwrap(), 0.0);
        assert_eq!(c.second_derivative(0.5), Err(Error::OneSidedOnly(0.5)));
    }

    #[test]
    fn second_derivative_matches_central_difference() {
        let set = IntervalUnion::new([(2.0, 3.0), (5.0, 6.0)]).unwrap();
        let c = VolumeCurve::new(set, Density1D::power(-0.5, 0.0, 0.0, 10.0).unwrap());
        let (t, h) = (0.1, 1e-4);
        let fd = (c.eval(t + h).unwrap() - 2.0 * c.eval(t).unwrap() + c.eval(t - h).unwrap()) / (h * h);
        let exact = c.second_derivative(t).unwrap();
        assert_relative_eq!(exact, fd, max_relative = 1e-6);
    }

    #[test]
    fn gaussian_second_derivative_matches_central_difference() {
        let c = VolumeCurve::new(two_blocks(), Density1D::gaussian(0.7, 1.3).unwrap());
        let (t, h) = (0.3, 1e-4);
        let fd = (c.eval(t + h).unwrap() - 2.0 * c.eval(t).unwrap() + c.eval(t - h).unwrap()) / (h * h);
        assert_relative_eq!(c.second_derivative(t).unwrap(), fd, max_relative = 1e-5);
    }

    #[test]
    fn breakpoints_include_live_support_crossings() {
        let c = VolumeCurve::new(two_blocks(), linear());
        // left end of [0,1] starts on the edge; right end of [2,3] reaches 4 at t = 1,
        // long after the merge at 0.5
        let bp = c.breakpoints();
        assert_eq!(bp.len(), 2);
        assert_eq!(bp[0], Breakpoint { t: 0.5, kind: BreakpointKind::Merge });
        assert_eq!(bp[1], Breakpoint { t: 1.0, kind: BreakpointKind::SupportCrossing });
        // the inner endpoints 1 + t and 3 - t merge before reaching an edge
        let inner = VolumeCurve::new(
            IntervalUnion::new([(0.0, 1.0), (3.0, 4.0)]).unwrap(),
            Density1D::uniform(1.0, -5.0, 6.0).unwrap(),
        );
        assert_eq!(inner.breakpoint_times(), vec![1.0, 2.0, 5.0]);
    }

    #[test]
    fn junction_examples() {
        let c = VolumeCurve::new(two_blocks(), Density1D::Lebesgue);
        let j = c.junction_check(1.0).unwrap();
        assert_eq!(j.len(), 1);
        assert_eq!((j[0].left, j[0].right, j[0].holds), (4.0, 2.0, true));

        let convex = VolumeCurve::new(IntervalUnion::interval(0.0, 3.0).unwrap(), Density1D::Lebesgue);
        assert!(convex.junction_check(0.3).unwrap().is_empty());

        let c = VolumeCurve::new(two_blocks(), linear());
        assert!(c.junction_check(0.5).unwrap().iter().all(|j| j.holds));
        for s in [-1.0, 0.0] {
            assert!(c.junction_check(s).unwrap().iter().all(|j| j.holds));
        }
    }

    #[test]
    fn junction_vanishing_curve_is_an_error() {
        let set = IntervalUnion::new([(20.0, 21.0), (22.0, 23.0)]).unwrap();
        let c = VolumeCurve::new(set, Density1D::uniform(1.0, 0.0, 10.0).unwrap());
        assert_eq!(c.junction_check(1.0), Err(Error::CurveVanishes(0.5)));
    }

    #[test]
    fn entering_the_support_creates_a_convex_kink() {
        // 12 - t enters [0, 10] at t = 2 while V > 0: the right derivative jumps up
        let set = IntervalUnion::new([(1.0, 2.0), (12.0, 13.0)]).unwrap();
        let c = VolumeCurve::new(set, Density1D::uniform(1.0, 0.0, 10.0).unwrap());
        assert_eq!(c.derivative_left(2.0).unwrap(), 1.0);
        assert_eq!(c.derivative_right(2.0).unwrap(), 2.0);
        let entry = c
            .junction_check(1.0)
            .unwrap()
            .into_iter()
            .find(|j| j.t == 2.0)
            .unwrap();
        assert_eq!(entry.kind, BreakpointKind::SupportCrossing);
        assert!(!entry.holds);
    }

    #[test]
    fn continuity_across_breakpoints() {
        let c = VolumeCurve::new(two_blocks(), linear());
        for bp in c.breakpoint_times() {
            let v = c.eval(bp).unwrap();
            let jump = (c.eval(bp - 1e-6).unwrap() - c.eval(bp + 1e-6).unwrap()).abs();
            assert!(jump <= 1e-5 * v);
        }
    }

    #[test]
    fn tabulated_second_derivative_uses_finite_differences() {
        let grid = crate::grid::GridFunction::from_fn(-10.0, 10.0, 2001, |x| 1.0 + 0.01 * x * x).unwrap();
        let c = VolumeCurve::new(IntervalUnion::interval(-1.0, 1.0).unwrap(), Density1D::tabulated(grid).unwrap());
        // slopes of the interpolant on the cells around ±1.505 are ±0.01 (1.50 + 1.51)
        assert_relative_eq!(c.second_derivative(0.505).unwrap(), 0.04 * 1.505, max_relative = 1e-6);
    }
}
