//! Compact subsets of the real line stored as sorted, disjoint closed intervals.
//!
//! Endpoints are compared exactly. Inputs that should merge under a fuzzy
//! tolerance must be rounded by the caller before construction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonempty finite union of closed intervals `[a_i, b_i]` with
/// `a_i <= b_i < a_{i+1}`. Degenerate points `[a, a]` are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    /// Sorts and merges the raw pairs. Overlapping and touching intervals are fused.
    pub fn new<I>(raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut raw: Vec<(f64, f64)> = raw.into_iter().collect();
        if raw.is_empty() {
            return Err(Error::EmptySet);
        }
        for &(a, b) in &raw {
            if !(a.is_finite() && b.is_finite()) || a > b {
                return Err(Error::MalformedInterval(a, b));
            }
        }
        raw.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(Self { intervals: merged })
    }

    /// The single interval `[a, b]`.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new([(a, b)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn component_count(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_convex(&self) -> bool {
        self.intervals.len() == 1
    }

    pub fn min(&self) -> f64 {
        self.intervals[0].0
    }

    pub fn max(&self) -> f64 {
        self.intervals[self.intervals.len() - 1].1
    }

    /// Lebesgue measure of the set.
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }

    /// Widths of the gaps between consecutive components.
    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.intervals.windows(2).map(|w| w[1].0 - w[0].1)
    }

    /// Minkowski sum `A + t·[-1, 1]`.
    ///
    /// Consecutive components are fused when their gap is at most `2t`, so at a
    /// merge time the closed (merged) dilation is returned.
    pub fn dilate(&self, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::NegativeRadius(t));
        }
        let intervals = self
            .dilation_groups(t, false)
            .into_iter()
            .map(|(first, last)| (self.intervals[first].0 - t, self.intervals[last].1 + t))
            .collect();
        Ok(Self { intervals })
    }

    /// Component index ranges `(first, last)` of the dilation at radius `t`.
    ///
    /// With `open = false` the groups are those of the closed dilation
    /// `A + t·[-1,1]` (gap `<= 2t` fuses). With `open = true` they are those of
    /// `A + t·(-1,1)`, where components that only touch stay separate.
    pub(crate) fn dilation_groups(&self, t: f64, open: bool) -> Vec<(usize, usize)> {
        let mut groups = Vec::with_capacity(self.intervals.len());
        let mut first = 0;
        for (i, gap) in self.gaps().enumerate() {
            let fused = if open { gap < 2.0 * t } else { gap <= 2.0 * t };
            if !fused {
                groups.push((first, i));
                first = i + 1;
            }
        }
        groups.push((first, self.intervals.len() - 1));
        groups
    }

    /// Radii at which consecutive gaps close, sorted ascending, one entry per gap.
    ///
    /// The gap `(b_i, a_{i+1})` closes at radius `(a_{i+1} - b_i) / 2`.
    pub fn merge_times(&self) -> Vec<f64> {
        let mut times: Vec<f64> = self.gaps().map(|g| 0.5 * g).collect();
        times.sort_by(f64::total_cmp);
        times
    }

    /// Smallest radius from which the dilation is a single interval:
    /// half the widest gap, or 0 for a convex set.
    pub fn convexity_threshold(&self) -> f64 {
        self.gaps().fold(0.0, f64::max) * 0.5
    }

    /// Distance from `x` to the set.
    pub fn distance(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| {
                if x < a {
                    a - x
                } else if x > b {
                    x - b
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, b)) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str("u")?;
            }
            write!(f, "[{a},{b}]")?;
        }
        Ok(())
    }
}

/// Parses literals such as `[0,1]u[2,3]` or `[-0.5,0.5]`.
impl FromStr for IntervalUnion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        let bad = || Error::Parse(format!("malformed set literal `{s}`"));
        let mut pairs = Vec::new();
        for part in s.split('u') {
            let inner = part
                .trim()
                .strip_prefix('[')
                .and_then(|p| p.strip_suffix(']'))
                .ok_or_else(bad)?;
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            pairs.push((a, b));
        }
        Self::new(pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(raw: &[(f64, f64)]) -> IntervalUnion {
        IntervalUnion::new(raw.iter().copied()).unwrap()
    }

    #[test]
    fn normalize_sorts_and_merges() {
        assert_eq!(set(&[(2.0, 3.0), (0.0, 1.0)]).intervals(), &[(0.0, 1.0), (2.0, 3.0)]);
        assert_eq!(set(&[(0.0, 1.0), (1.0, 2.0)]).intervals(), &[(0.0, 2.0)]);
        assert_eq!(set(&[(0.0, 5.0), (1.0, 2.0)]).intervals(), &[(0.0, 5.0)]);
    }

    #[test]
    fn normalize_rejects_empty_and_reversed() {
        assert_eq!(IntervalUnion::new(Vec::new()), Err(Error::EmptySet));
        assert!(matches!(
            IntervalUnion::new([(1.0, 0.0)]),
            Err(Error::MalformedInterval(..))
        ));
        assert!(IntervalUnion::new([(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn degenerate_points_are_kept() {
        let a = set(&[(0.0, 0.0), (3.0, 3.0)]);
        assert_eq!(a.component_count(), 2);
        assert_eq!(a.total_length(), 0.0);
        assert_eq!(a.dilate(0.5).unwrap().intervals(), &[(-0.5, 0.5), (2.5, 3.5)]);
    }

    #[test]
    fn dilate_examples() {
        let a = set(&[(0.0, 1.0), (2.0, 3.0)]);
        assert_eq!(a.dilate(0.25).unwrap().intervals(), &[(-0.25, 1.25), (1.75, 3.25)]);
        assert_eq!(a.dilate(0.5).unwrap().intervals(), &[(-0.5, 3.5)]);
        assert_eq!(a.dilate(0.0).unwrap(), a);
        assert_eq!(a.dilate(-1.0), Err(Error::NegativeRadius(-1.0)));
    }

    #[test]
    fn open_dilation_keeps_touching_components_apart() {
        let a = set(&[(0.0, 1.0), (2.0, 3.0)]);
        assert_eq!(a.dilation_groups(0.5, false), vec![(0, 1)]);
        assert_eq!(a.dilation_groups(0.5, true), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn merge_times_and_threshold() {
        assert_eq!(set(&[(0.0, 1.0), (2.0, 3.0)]).merge_times(), vec![0.5]);
        let three = set(&[(0.0, 1.0), (2.0, 3.0), (10.0, 11.0)]);
        assert_eq!(three.merge_times(), vec![0.5, 3.5]);
        assert!(set(&[(0.0, 3.0)]).merge_times().is_empty());

        assert_eq!(set(&[(0.0, 1.0), (2.0, 3.0)]).convexity_threshold(), 0.5);
        assert_eq!(three.convexity_threshold(), 3.5);
        assert_eq!(set(&[(-1.0, 1.0)]).convexity_threshold(), 0.0);
    }

    #[test]
    fn threshold_is_first_convex_radius() {
        let a = set(&[(0.0, 1.0), (2.0, 3.0), (10.0, 11.0)]);
        let t0 = a.convexity_threshold();
        assert!(a.dilate(t0).unwrap().is_convex());
        assert!(!a.dilate(t0 - 1e-9).unwrap().is_convex());
    }

    #[test]
    fn literal_round_trip() {
        let a: IntervalUnion = "[0,1]u[2,3]".parse().unwrap();
        assert_eq!(a.intervals(), &[(0.0, 1.0), (2.0, 3.0)]);
        assert_eq!(a.to_string(), "[0,1]u[2,3]");
        let b: IntervalUnion = " [-0.5, 0.25] ".parse().unwrap();
        assert_eq!(b.intervals(), &[(-0.5, 0.25)]);
    }

    #[test]
    fn literal_rejects_garbage() {
        for bad in ["", "[0,1", "0,1]", "[0;1]", "[a,1]", "[0,1]u", "[2,1]"] {
            assert!(bad.parse::<IntervalUnion>().is_err(), "{bad}");
        }
    }

    #[test]
    fn distance_to_set() {
        let a = set(&[(0.0, 1.0), (2.0, 3.0)]);
        assert_eq!(a.distance(1.5), 0.5);
        assert_eq!(a.distance(2.5), 0.0);
        assert_eq!(a.distance(-2.0), 2.0);
    }
}
