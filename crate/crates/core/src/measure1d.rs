//! Measures on the real line given by a density, and the exponent arithmetic
//! linking s-concave measures to γ-concave densities.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Density of a measure on ℝ.
#[derive(Debug, Clone, PartialEq)]
pub enum Density1D {
    /// ψ ≡ 1.
    Lebesgue,
    /// ψ = c·1_{[a,b]}.
    Uniform { c: f64, a: f64, b: f64 },
    /// ψ(x) = (x + p)^{1/γ}·1_{[a,b]}(x); γ-affine on its support.
    PiecewisePower { gamma: f64, p: f64, a: f64, b: f64 },
    /// Normal density with the given mean and standard deviation.
    Gaussian { mean: f64, stddev: f64 },
    /// Piecewise-linear interpolation of non-negative samples, 0 off the grid.
    Tabulated(GridFunction),
}

impl Density1D {
    pub fn uniform(c: f64, a: f64, b: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidDensity(format!("uniform constant must be positive, got {c}")));
        }
        if !(a < b && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidDensity(format!("uniform support [{a}, {b}] is empty")));
        }
        Ok(Self::Uniform { c, a, b })
    }

    /// `(x + p)^{1/γ}` on `[a, b]`. Requires `a + p >= 0`.
    ///
    /// When `a + p = 0` and `γ ∈ [-1, 0)` the density is not integrable at
    /// `a`, and intervals reaching `a` have infinite measure.
    pub fn power(gamma: f64, p: f64, a: f64, b: f64) -> Result<Self> {
        if gamma == 0.0 || !gamma.is_finite() {
            return Err(Error::InvalidDensity(format!(
                "power density needs a finite nonzero γ, got {gamma}"
            )));
        }
        if !(a < b && a.is_finite() && b.is_finite() && p.is_finite()) {
            return Err(Error::InvalidDensity(format!("power support [{a}, {b}] is empty")));
        }
        if a + p < 0.0 {
            return Err(Error::InvalidDensity(format!(
                "x + p must be non-negative on [{a}, {b}], p = {p}"
            )));
        }
        Ok(Self::PiecewisePower { gamma, p, a, b })
    }

    pub fn gaussian(mean: f64, stddev: f64) -> Result<Self> {
        if !(stddev > 0.0 && stddev.is_finite() && mean.is_finite()) {
            return Err(Error::InvalidDensity(format!("gaussian stddev must be positive, got {stddev}")));
        }
        Ok(Self::Gaussian { mean, stddev })
    }

    pub fn tabulated(grid: GridFunction) -> Result<Self> {
        if grid.values().iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidDensity(
                "tabulated density values must be finite and non-negative".into(),
            ));
        }
        Ok(Self::Tabulated(grid))
    }

    /// Closed support interval, `None` when the density lives on all of ℝ.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            Self::Lebesgue | Self::Gaussian { .. } => None,
            Self::Uniform { a, b, .. } | Self::PiecewisePower { a, b, .. } => Some((*a, *b)),
            Self::Tabulated(g) => Some((g.z_lo(), g.z_hi())),
        }
    }

    /// Density value ψ(x); 0 outside the support.
    pub fn density_at(&self, x: f64) -> f64 {
        match self {
            Self::Lebesgue => 1.0,
            Self::Uniform { c, a, b } => {
                if *a <= x && x <= *b {
                    *c
                } else {
                    0.0
                }
            }
            Self::PiecewisePower { gamma, p, a, b } => {
                if *a <= x && x <= *b {
                    (x + p).powf(1.0 / gamma)
                } else {
                    0.0
                }
            }
            Self::Gaussian { mean, stddev } => {
                let z = (x - mean) / stddev;
                (-0.5 * z * z).exp() / (stddev * (2.0 * PI).sqrt())
            }
            Self::Tabulated(g) => g.interpolate(x).unwrap_or(0.0),
        }
    }

    /// ψ(x⁺): the value seen by a boundary point moving to the right.
    pub fn density_right_limit(&self, x: f64) -> f64 {
        match self.support() {
            Some((lo, hi)) if x < lo || x >= hi => 0.0,
            _ => self.density_at(x),
        }
    }

    /// ψ(x⁻): the value seen by a boundary point moving to the left.
    pub fn density_left_limit(&self, x: f64) -> f64 {
        match self.support() {
            Some((lo, hi)) if x <= lo || x > hi => 0.0,
            _ => self.density_at(x),
        }
    }

    /// ψ'(x) in closed form, for points off the support boundary.
    /// `None` for tabulated densities.
    pub fn derivative_at(&self, x: f64) -> Option<f64> {
        match self {
            Self::Lebesgue | Self::Uniform { .. } => Some(0.0),
            Self::PiecewisePower { gamma, p, a, b } => {
                if *a < x && x < *b {
                    Some((x + p).powf((1.0 - gamma) / gamma) / gamma)
                } else {
                    Some(0.0)
                }
            }
            Self::Gaussian { mean, stddev } => {
                Some(-(x - mean) / (stddev * stddev) * self.density_at(x))
            }
            Self::Tabulated(_) => None,
        }
    }

    /// μ([a, b]). The interval is clipped to the support.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        if !(a <= b) {
            return Err(Error::MalformedInterval(a, b));
        }
        let (a, b) = match self.support() {
            Some((lo, hi)) => (a.max(lo), b.min(hi)),
            None => (a, b),
        };
        if a >= b {
            return Ok(0.0);
        }
        let value = match self {
            Self::Lebesgue => b - a,
            Self::Uniform { c, .. } => c * (b - a),
            Self::PiecewisePower { gamma, p, .. } => power_antiderivative(*gamma, *p, a, b),
            Self::Gaussian { mean, stddev } => gaussian_mass(*mean, *stddev, a, b),
            Self::Tabulated(g) => tabulated_mass(g, a, b),
        };
        Ok(value.max(0.0))
    }
}

/// ∫_a^b (x + p)^{1/γ} dx with `a + p >= 0`.
fn power_antiderivative(gamma: f64, p: f64, a: f64, b: f64) -> f64 {
    if gamma == -1.0 {
        return ((b + p) / (a + p)).ln();
    }
    let k = (gamma + 1.0) / gamma;
    gamma / (gamma + 1.0) * ((b + p).powf(k) - (a + p).powf(k))
}

fn gaussian_mass(mean: f64, stddev: f64, a: f64, b: f64) -> f64 {
    let za = (a - mean) / (stddev * SQRT_2);
    let zb = (b - mean) / (stddev * SQRT_2);
    // Difference of upper tails on the right, of lower tails on the left.
    if za >= 0.0 {
        0.5 * (libm::erfc(za) - libm::erfc(zb))
    } else if zb <= 0.0 {
        0.5 * (libm::erfc(-zb) - libm::erfc(-za))
    } else {
        1.0 - 0.5 * (libm::erfc(-za) + libm::erfc(zb))
    }
}

/// Exact integral of the linear interpolant over `[a, b] ⊂ [z_lo, z_hi]`.
fn tabulated_mass(g: &GridFunction, a: f64, b: f64) -> f64 {
    let dz = g.step();
    let v = g.values();
    let n = v.len();
    let cumulative_to = |x: f64| -> f64 {
        let pos = ((x - g.z_lo()) / dz).clamp(0.0, (n - 1) as f64);
        let i = (pos.floor() as usize).min(n - 2);
        let w = pos - i as f64;
        let whole: f64 = v[..=i].windows(2).map(|s| 0.5 * (s[0] + s[1]) * dz).sum();
        whole + dz * (v[i] * w + 0.5 * (v[i + 1] - v[i]) * w * w)
    };
    cumulative_to(b) - cumulative_to(a)
}

impl fmt::Display for Density1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lebesgue => f.write_str("lebesgue"),
            Self::Uniform { c, a, b } => write!(f, "uniform:{c}:{a}:{b}"),
            Self::PiecewisePower { gamma, p, a, b } => write!(f, "power:{gamma}:{p}:{a}:{b}"),
            Self::Gaussian { mean, stddev } => write!(f, "gauss:{mean}:{stddev}"),
            Self::Tabulated(g) => write!(f, "tabulated:{}:{}:{}", g.z_lo(), g.z_hi(), g.len()),
        }
    }
}

/// Parses `lebesgue`, `uniform:C:a:b`, `power:gamma:p:a:b` and `gauss:mu:sigma`.
impl FromStr for Density1D {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let kind = parts.next().unwrap_or_default();
        let nums = parts
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|_| Error::Parse(format!("malformed measure literal `{s}`")))?;
        match (kind, nums.as_slice()) {
            ("lebesgue", []) => Ok(Self::Lebesgue),
            ("uniform", &[c, a, b]) => Self::uniform(c, a, b),
            ("power", &[gamma, p, a, b]) => Self::power(gamma, p, a, b),
            ("gauss", &[mean, stddev]) => Self::gaussian(mean, stddev),
            _ => Err(Error::Parse(format!("malformed measure literal `{s}`"))),
        }
    }
}

/// Concavity index `s ∈ [-∞, +∞]` of a measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SConcavityClass {
    pub s: f64,
}

impl SConcavityClass {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_nan() {
            return Err(Error::InvalidArgument("s is NaN".into()));
        }
        Ok(Self { s })
    }

    /// Exponent of the density of an absolutely continuous measure in ℝⁿ of this class.
    pub fn density_gamma(&self, n: u32) -> Result<f64> {
        gamma_of_s(self.s, n)
    }

    /// Whether a nonzero measure with a density in ℝⁿ can belong to the class.
    pub fn admits_density(&self, n: u32) -> bool {
        self.s <= 1.0 / n as f64
    }
}

/// `γ = s / (1 - s·n)`; `s = -∞` maps to `-1/n`.
pub fn gamma_of_s(s: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let n = n as f64;
    if s == f64::NEG_INFINITY {
        return Ok(-1.0 / n);
    }
    if s * n == 1.0 {
        return Err(Error::GammaInfinite);
    }
    Ok(s / (1.0 - s * n))
}

/// `s = γ / (1 + γ·n)`; `γ = ±∞` maps to `1/n`.
pub fn s_of_gamma(gamma: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let n = n as f64;
    if gamma.is_infinite() {
        return Ok(1.0 / n);
    }
    if gamma * n == -1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(gamma / (1.0 + gamma * n))
}

/// Exponent α with `1/α = 1/β + 1/γ`: the product of a β-concave and a
/// γ-concave function is α-concave when `β + γ >= 0`.
pub fn alpha_of(beta: f64, gamma: f64) -> Result<f64> {
    if beta.is_nan() || gamma.is_nan() || !(beta + gamma >= 0.0) {
        return Err(Error::HypothesisViolated(format!(
            "β + γ must be non-negative, got β = {beta}, γ = {gamma}"
        )));
    }
    if beta == 0.0 || gamma == 0.0 {
        return Ok(0.0);
    }
    if beta.is_infinite() {
        return Ok(gamma);
    }
    if gamma.is_infinite() {
        return Ok(beta);
    }
    if beta + gamma == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(beta * gamma / (beta + gamma))
}
