//! Uniformly sampled functions on an interval.

use crate::error::{Error, Result};

/// Marker for nodes where the sampled function is `+∞` (outside its domain).
///
/// It is the neutral element of the inf-convolution, so absent nodes drop out
/// of minimizations without special casing.
pub const ABSENT: f64 = f64::INFINITY;

/// Samples of a function at `n` uniform nodes `z_lo + i·Δz`, `Δz = (z_hi - z_lo)/(n - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    z_lo: f64,
    z_hi: f64,
    values: Vec<f64>,
}

impl GridFunction {
    /// Values must be finite or [`ABSENT`].
    pub fn new(z_lo: f64, z_hi: f64, values: Vec<f64>) -> Result<Self> {
        if !(z_lo.is_finite() && z_hi.is_finite() && z_lo < z_hi) {
            return Err(Error::InvalidArgument(format!(
                "grid bounds must satisfy z_lo < z_hi, got [{z_lo}, {z_hi}]"
            )));
        }
        if values.len() < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 nodes".into()));
        }
        if let Some(v) = values.iter().find(|v| v.is_nan() || **v == f64::NEG_INFINITY) {
            return Err(Error::InvalidArgument(format!("invalid grid value {v}")));
        }
        Ok(Self { z_lo, z_hi, values })
    }

    /// Samples `f` at `n` uniform nodes of `[z_lo, z_hi]`.
    pub fn from_fn(z_lo: f64, z_hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 nodes".into()));
        }
        let dz = (z_hi - z_lo) / (n - 1) as f64;
        let values = (0..n).map(|i| f(z_lo + i as f64 * dz)).collect();
        Self::new(z_lo, z_hi, values)
    }

    /// Same nodes, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::InvalidArgument("value count does not match grid".into()));
        }
        Self::new(self.z_lo, self.z_hi, values)
    }

    /// Pointwise map onto the same nodes.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn z_lo(&self) -> f64 {
        self.z_lo
    }

    pub fn z_hi(&self) -> f64 {
        self.z_hi
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        (self.z_hi - self.z_lo) / (self.values.len() - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.z_lo + i as f64 * self.step()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let dz = self.step();
        (0..self.values.len()).map(move |i| self.z_lo + i as f64 * dz)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_present(&self, i: usize) -> bool {
        self.values[i] != ABSENT
    }

    pub fn any_present(&self) -> bool {
        self.values.iter().any(|&v| v != ABSENT)
    }

    /// Largest finite value, or `None` if every node is absent.
    pub fn max_present(&self) -> Option<f64> {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .reduce(f64::max)
    }

    /// Piecewise-linear interpolant; `None` outside `[z_lo, z_hi]`.
    /// An absent neighbour makes the result absent.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        if !(x >= self.z_lo && x <= self.z_hi) {
            return None;
        }
        let dz = self.step();
        let pos = (x - self.z_lo) / dz;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let w = pos - i as f64;
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        if w == 0.0 {
            return Some(v0);
        }
        if w == 1.0 {
            return Some(v1);
        }
        if v0 == ABSENT || v1 == ABSENT {
            return Some(ABSENT);
        }
        Some(v0 + w * (v1 - v0))
    }

    /// Trapezoidal integral over the grid. Absent nodes count as 0.
    pub fn trapezoid(&self) -> f64 {
        trapezoid(&self.values, self.step())
    }

    /// Central first differences, one-sided at the two ends.
    pub fn derivative(&self) -> Vec<f64> {
        first_differences(&self.values, self.step())
    }

    /// Central second differences, copied from the neighbour at the two ends.
    pub fn second_derivative(&self) -> Vec<f64> {
        second_differences(&self.values, self.step())
    }
}

/// Trapezoid rule on uniform samples; non-finite samples are treated as 0.
pub fn trapezoid(values: &[f64], dz: f64) -> f64 {
    let clean = |v: f64| if v.is_finite() { v } else { 0.0 };
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1].iter().map(|&v| clean(v)).sum();
    dz * (inner + 0.5 * (clean(values[0]) + clean(values[n - 1])))
}

pub(crate) fn first_differences(v: &[f64], dz: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * dz);
    }
    d[0] = (v[1] - v[0]) / dz;
    d[n - 1] = (v[n - 1] - v[n - 2]) / dz;
    d
}

pub(crate) fn second_differences(v: &[f64], dz: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        return d;
    }
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (dz * dz);
    }
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    d
}

/// Natural cubic spline through uniform samples.
#[derive(Debug, Clone)]
pub(crate) struct CubicSpline {
    z_lo: f64,
    dz: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    /// All samples must be finite.
    pub(crate) fn new(z_lo: f64, dz: f64, y: &[f64]) -> Self {
        let n = y.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm for m_{i-1} + 4 m_i + m_{i+1} = 6 (y_{i+1} - 2y_i + y_{i-1}) / dz²
            let k = n - 2;
            let mut c = vec![0.0; k];
            let mut d = vec![0.0; k];
            for j in 0..k {
                let i = j + 1;
                let rhs = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (dz * dz);
                if j == 0 {
                    c[j] = 1.0 / 4.0;
                    d[j] = rhs / 4.0;
                } else {
                    let denom = 4.0 - c[j - 1];
                    c[j] = 1.0 / denom;
                    d[j] = (rhs - d[j - 1]) / denom;
                }
            }
            for j in (0..k).rev() {
                let next = if j + 1 < k { m[j + 2] } else { 0.0 };
                m[j + 1] = d[j] - c[j] * next;
            }
        }
        Self {
            z_lo,
            dz,
            y: y.to_vec(),
            m,
        }
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let pos = ((x - self.z_lo) / self.dz).clamp(0.0, (n - 1) as f64);
        let i = (pos.floor() as usize).min(n - 2);
        let b = pos - i as f64;
        let a = 1.0 - b;
        let h2 = self.dz * self.dz;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h2 / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_validates() {
        assert!(GridFunction::new(1.0, 0.0, vec![0.0, 0.0]).is_err());
        assert!(GridFunction::new(0.0, 1.0, vec![0.0]).is_err());
        assert!(GridFunction::new(0.0, 1.0, vec![0.0, f64::NAN]).is_err());
        assert!(GridFunction::new(0.0, 1.0, vec![0.0, f64::NEG_INFINITY]).is_err());
        assert!(GridFunction::new(0.0, 1.0, vec![0.0, ABSENT]).is_ok());
    }

    #[test]
    fn nodes_and_step() {
        let g = GridFunction::from_fn(-1.0, 1.0, 5, |x| x).unwrap();
        assert_eq!(g.step(), 0.5);
        assert_eq!(g.nodes().collect::<Vec<_>>(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(g.values(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn interpolation_is_linear_and_bounded() {
        let g = GridFunction::from_fn(0.0, 2.0, 3, |x| x * x).unwrap();
        assert_eq!(g.interpolate(0.5), Some(0.5));
        assert_eq!(g.interpolate(2.0), Some(4.0));
        assert_eq!(g.interpolate(2.5), None);
    }

    #[test]
    fn trapezoid_of_linear_is_exact() {
        let g = GridFunction::from_fn(0.0, 3.0, 31, |x| 2.0 * x + 1.0).unwrap();
        assert!((g.trapezoid() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn differences_of_quadratic() {
        let g = GridFunction::from_fn(-1.0, 1.0, 21, |x| x * x).unwrap();
        let d = g.derivative();
        let dd = g.second_derivative();
        assert!((d[10] - 0.0).abs() < 1e-12);
        assert!((d[15] - 1.0).abs() < 1e-12);
        assert!(dd.iter().all(|v| (v - 2.0).abs() < 1e-9));
    }

    #[test]
    fn spline_reproduces_cubic_interior() {
        let dz = 0.05;
        let y: Vec<f64> = (0..201).map(|i| (-5.0 + i as f64 * dz).sin()).collect();
        let s = CubicSpline::new(-5.0, dz, &y);
        for &x in &[-1.234, 0.0, 0.777, 2.5] {
            assert!((s.eval(x) - f64::sin(x)).abs() < 1e-6, "{x}");
        }
        assert_eq!(s.eval(-5.0), y[0]);
    }
}
