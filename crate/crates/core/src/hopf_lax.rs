//! Hopf-Lax inf-convolution in one dimension and the functional parallel
//! volume built on it.
//!
//! For a convex cost `V` and `t > 0`,
//! `Q_t u(z) = inf_x ( u(x) + t·V((z - x)/t) )`, and for a non-negative `f`
//! the functional dilation is `h_t = (Q_t f^γ)^{1/γ}` (`exp(-Q_t(-log f))`
//! when `γ = 0`). Its integral `F(t)` generalizes the parallel volume.

use rayon::prelude::*;

use crate::concavity::{check_gamma_concave_fn, check_s_concave_samples, ConcavityReport};
use crate::error::{Error, Result};
use crate::grid::CubicSpline;
pub use crate::grid::{GridFunction, ABSENT};
use crate::measure1d::s_of_gamma;

/// Cost `V(y) = |y|^p / p` with `p ∈ [1, ∞]`.
///
/// `p = ∞` stands for the indicator of `[-1, 1]` (0 inside, `+∞` outside),
/// which is both the limit of `|y|^p/p` and the conjugate of `|y|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCost {
    p: f64,
}

/// Relative slack when testing `|y| <= 1` for the indicator cost, so that
/// dilation radii that are multiples of the grid step land inside.
const INDICATOR_SLACK: f64 = 1e-12;

impl PowerCost {
    pub fn new(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidArgument(format!("cost exponent must be at least 1, got {p}")));
        }
        Ok(Self { p })
    }

    pub fn indicator() -> Self {
        Self { p: f64::INFINITY }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn is_indicator(&self) -> bool {
        self.p == f64::INFINITY
    }

    /// `V(y)/|y| → ∞`; fails for `p = 1`.
    pub fn is_superlinear(&self) -> bool {
        self.p > 1.0
    }

    /// Conjugate exponent `q` with `1/p + 1/q = 1`.
    pub fn conjugate_exponent(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else if self.is_indicator() {
            1.0
        } else {
            self.p / (self.p - 1.0)
        }
    }

    pub fn value(&self, y: f64) -> f64 {
        if self.is_indicator() {
            if y.abs() <= 1.0 + INDICATOR_SLACK {
                0.0
            } else {
                f64::INFINITY
            }
        } else if self.p == 1.0 {
            y.abs()
        } else if self.p == 2.0 {
            0.5 * y * y
        } else {
            y.abs().powf(self.p) / self.p
        }
    }

    /// `V'(y) = sign(y)|y|^{p-1}`; 0 inside the indicator's domain.
    pub fn derivative(&self, y: f64) -> f64 {
        if self.is_indicator() {
            0.0
        } else if self.p == 1.0 {
            y.signum()
        } else {
            y.signum() * y.abs().powf(self.p - 1.0)
        }
    }

    /// `V''(y) = (p-1)|y|^{p-2}` away from the origin.
    pub fn second_derivative(&self, y: f64) -> f64 {
        if self.is_indicator() || self.p == 1.0 {
            0.0
        } else if self.p == 2.0 {
            1.0
        } else {
            (self.p - 1.0) * y.abs().powf(self.p - 2.0)
        }
    }
}

/// Legendre transform of a power cost: `|y|^p/p ↦ |u|^q/q`, with `|y|` and
/// the indicator of `[-1, 1]` exchanged.
pub fn legendre_conjugate(v: &PowerCost) -> PowerCost {
    PowerCost {
        p: v.conjugate_exponent(),
    }
}

/// `Q_t u` on the nodes of `u`, minimizing over the nodes of `u`.
///
/// Absent nodes of `u` are skipped; an output node is absent when no input
/// node reaches it with finite cost.
pub fn hopf_lax(u: &GridFunction, v: &PowerCost, t: f64) -> Result<GridFunction> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
    }
    if !u.any_present() {
        return Err(Error::EmptyDomain);
    }
    let dz = u.step();
    let n = u.len();
    let kernel: Vec<f64> = (0..n).map(|k| t * v.value(k as f64 * dz / t)).collect();
    let present: Vec<(usize, f64)> = u
        .values()
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, x)| *x != ABSENT)
        .collect();
    let out: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            present
                .iter()
                .map(|&(k, uk)| uk + kernel[i.abs_diff(k)])
                .fold(ABSENT, f64::min)
        })
        .collect();
    u.with_values(out)
}

/// `Q_t u(z)` at an arbitrary `z`, minimizing over the nodes of `u`.
fn hopf_lax_at(present: &[(f64, f64)], v: &PowerCost, t: f64, z: f64) -> f64 {
    present
        .iter()
        .map(|&(x, ux)| ux + t * v.value((z - x) / t))
        .fold(ABSENT, f64::min)
}

/// Hopf-Lax evaluation with sub-grid accuracy for smooth convex `u`.
///
/// `u` is replaced by its natural cubic spline and the node minimizer is
/// polished by golden-section search on the two adjacent cells.
#[derive(Debug, Clone)]
pub struct RefinedHopfLax {
    grid: GridFunction,
    spline: CubicSpline,
    cost: PowerCost,
}

impl RefinedHopfLax {
    /// Requires every node of `u` present and a finite superlinear cost.
    pub fn new(u: &GridFunction, v: &PowerCost) -> Result<Self> {
        if u.values().iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("refined Hopf-Lax needs a finite input".into()));
        }
        if !v.is_superlinear() || v.is_indicator() {
            return Err(Error::InvalidArgument(format!(
                "refined Hopf-Lax needs 1 < p < ∞, got {}",
                v.p()
            )));
        }
        Ok(Self {
            grid: u.clone(),
            spline: CubicSpline::new(u.z_lo(), u.step(), u.values()),
            cost: *v,
        })
    }

    pub fn eval(&self, t: f64, z: f64) -> f64 {
        let objective = |x: f64| self.spline.eval(x) + t * self.cost.value((z - x) / t);
        let vals = self.grid.values();
        let dz = self.grid.step();
        let best = (0..vals.len())
            .map(|k| (k, vals[k] + t * self.cost.value((z - self.grid.node(k)) / t)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        let lo = self.grid.node(best.saturating_sub(1));
        let hi = self.grid.node((best + 1).min(vals.len() - 1));
        let x = golden_section(objective, lo, hi, 1e-13 * dz.max(1.0));
        objective(x).min(objective(self.grid.node(best)))
    }
}

/// `Q_t u` on the nodes of `u` through [`RefinedHopfLax`].
pub fn hopf_lax_refined(u: &GridFunction, v: &PowerCost, t: f64) -> Result<GridFunction> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
    }
    let r = RefinedHopfLax::new(u, v)?;
    let out: Vec<f64> = (0..u.len()).into_par_iter().map(|i| r.eval(t, u.node(i))).collect();
    u.with_values(out)
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Which exponents `h_t` accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaPolicy {
    /// `γ ∈ (-1, 0]`, where concavity of `F` is a theorem.
    #[default]
    TheoremRange,
    /// Any `γ <= 0`. Results outside `(-1, 0]` are exploratory and unverified.
    Unverified,
}

fn check_gamma(gamma: f64, policy: GammaPolicy) -> Result<()> {
    let ok = match policy {
        GammaPolicy::TheoremRange => gamma > -1.0 && gamma <= 0.0,
        GammaPolicy::Unverified => gamma.is_finite() && gamma <= 0.0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfTheoremRange(gamma))
    }
}

/// `f ↦ f^γ` (`-log f` at `γ = 0`), with zeros mapped to [`ABSENT`].
fn lift(f: &GridFunction, gamma: f64) -> Result<GridFunction> {
    if let Some(v) = f.values().iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidArgument(format!("f must be finite and non-negative, got {v}")));
    }
    if f.values().iter().all(|&v| v == 0.0) {
        return Err(Error::EmptyDomain);
    }
    f.map(|v| {
        if v == 0.0 {
            ABSENT
        } else if gamma == 0.0 {
            -v.ln()
        } else {
            v.powf(gamma)
        }
    })
}

/// Inverse of [`lift`]; absent maps back to 0.
fn lower(q: f64, gamma: f64) -> f64 {
    if q == ABSENT {
        0.0
    } else if gamma == 0.0 {
        (-q).exp()
    } else {
        q.powf(1.0 / gamma)
    }
}

/// `h_t = (Q_t f^γ)^{1/γ}`, or `exp(-Q_t(-log f))` for `γ = 0`.
pub fn h_t(f: &GridFunction, gamma: f64, v: &PowerCost, t: f64, policy: GammaPolicy) -> Result<GridFunction> {
    check_gamma(gamma, policy)?;
    let q = hopf_lax(&lift(f, gamma)?, v, t)?;
    q.map(|x| lower(x, gamma))
}

/// Relative size of `f` at the grid ends above which the grid is too narrow.
const EDGE_MASS: f64 = 1e-12;

/// `F(t) = ∫ h_t` for each requested `t >= 0`.
///
/// `f` is taken to vanish off its grid. Inside the grid `h_t` is integrated
/// by the trapezoid rule; beyond it `h_t` is evaluated exactly from the
/// sampled `f` and integrated by Gauss-Legendre panels of doubling width,
/// closed by the power-law remainder `h ~ |z|^{p/γ}` when `γ < 0`.
pub fn functional_volume(
    f: &GridFunction,
    gamma: f64,
    v: &PowerCost,
    t_grid: &[f64],
    policy: GammaPolicy,
) -> Result<Vec<(f64, f64)>> {
    check_gamma(gamma, policy)?;
    let u = lift(f, gamma)?;
    let fmax = f.max_present().unwrap_or(0.0);
    let (first, last) = (f.values()[0], f.values()[f.len() - 1]);
    if first > EDGE_MASS * fmax || last > EDGE_MASS * fmax {
        return Err(Error::GridTooNarrow(format!(
            "f is {first:e} and {last:e} at the grid ends (max {fmax:e})"
        )));
    }
    if gamma < 0.0 && !v.is_indicator() && v.p() / gamma >= -1.0 {
        return Err(Error::InvalidArgument(format!(
            "h_t decays like |z|^{} and F(t) diverges",
            v.p() / gamma
        )));
    }
    let present: Vec<(f64, f64)> = u
        .nodes()
        .zip(u.values().iter().copied())
        .filter(|(_, x)| *x != ABSENT)
        .collect();
    t_grid
        .iter()
        .map(|&t| {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
            }
            if t == 0.0 {
                return Ok((t, f.trapezoid()));
            }
            let q = hopf_lax(&u, v, t)?;
            let inside = crate::grid::trapezoid(
                &q.values().iter().map(|&x| lower(x, gamma)).collect::<Vec<_>>(),
                q.step(),
            );
            let (q_lo, q_hi) = (q.values()[0], q.values()[q.len() - 1]);
            let tails = if v.is_indicator() {
                if q_lo != ABSENT || q_hi != ABSENT {
                    return Err(Error::GridTooNarrow(format!("the dilation at t = {t} leaves the grid")));
                }
                0.0
            } else {
                let h = |z: f64| lower(hopf_lax_at(&present, v, t, z), gamma);
                let width = (f.z_hi() - f.z_lo()) / 16.0;
                tail_integral(&h, f.z_hi(), 1.0, width, gamma, v.p())
                    + tail_integral(&h, f.z_lo(), -1.0, width, gamma, v.p())
            };
            Ok((t, inside + tails))
        })
        .collect()
}

const GAUSS_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gauss_legendre(h: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    GAUSS_NODES
        .iter()
        .zip(GAUSS_WEIGHTS)
        .map(|(&x, w)| w * (h(mid - half * x) + h(mid + half * x)))
        .sum::<f64>()
        * half
}

/// `∫_0^∞ h(z0 + dir·w) dw`.
fn tail_integral(h: &impl Fn(f64) -> f64, z0: f64, dir: f64, width: f64, gamma: f64, p: f64) -> f64 {
    let g = |w: f64| h(z0 + dir * w);
    let mut total = 0.0;
    let (mut w0, mut width) = (0.0, width);
    for k in 0..64 {
        let part = gauss_legendre(&g, w0, w0 + width);
        total += part;
        w0 += width;
        width *= 2.0;
        if k >= 4 && part <= 1e-17 * total {
            return total;
        }
    }
    if gamma < 0.0 {
        // ∫_W^∞ h(W)(w/W)^a dw with a = p/γ
        let a = p / gamma;
        total += g(w0) * w0 / (-a - 1.0);
    }
    total
}

/// Concavity of `F` on `t_grid` for `V = |y|^p/p`, `γ ∈ (-1, 0]`.
pub fn check_theorem_b(f: &GridFunction, gamma: f64, p: f64, t_grid: &[f64], tol: f64) -> Result<ConcavityReport> {
    let v = PowerCost::new(p)?;
    let curve = functional_volume(f, gamma, &v, t_grid, GammaPolicy::TheoremRange)?;
    let (ts, fs): (Vec<f64>, Vec<f64>) = curve.into_iter().unzip();
    check_s_concave_samples(&ts, &fs, 1.0, tol)
}

/// `φ_γ(g) = g^γ` (`-log g` for `γ = 0`), with zeros absent. Linear
/// interpolation in this variable keeps a γ-concave `g` γ-concave.
fn gamma_lift_strict(g: &GridFunction, gamma: f64) -> Result<GridFunction> {
    g.map(|v| {
        if v <= 0.0 {
            ABSENT
        } else if gamma == 0.0 {
            -v.ln()
        } else {
            v.powf(gamma)
        }
    })
}

/// `F(t) = ∫ sup_{z = x + ty} (f(x)^γ + t·g(y)^γ)^{1/γ} dz` by a direct
/// maximization (`f(x)·g(y)^t` at `γ = 0`).
///
/// `f` and `g` are interpolated linearly in `φ_γ`, so the objective is
/// piecewise linear in `x` and its supremum is attained where `x` or
/// `(z - x)/t` is a node; both families are scanned. `h_t` is sampled on
/// its support `[x₀ + t·y₀, x₁ + t·y₁]`, the hulls of the positive nodes.
pub fn functional_volume_direct(f: &GridFunction, g: &GridFunction, gamma: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
    }
    if !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!("γ must be finite, got {gamma}")));
    }
    for v in f.values().iter().chain(g.values()) {
        if !(v.is_finite() && *v >= 0.0) {
            return Err(Error::InvalidArgument(format!("values must be finite and non-negative, got {v}")));
        }
    }
    let lf = gamma_lift_strict(f, gamma)?;
    let lg = gamma_lift_strict(g, gamma)?;
    let present = |l: &GridFunction| -> Vec<(f64, f64)> {
        (0..l.len()).filter(|&i| l.is_present(i)).map(|i| (l.node(i), l.values()[i])).collect()
    };
    let (xs, ys) = (present(&lf), present(&lg));
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let (x_lo, x_hi) = (xs[0].0, xs[xs.len() - 1].0);
    let (y_lo, y_hi) = (ys[0].0, ys[ys.len() - 1].0);
    let (z_lo, z_hi) = (x_lo + t * y_lo, x_hi + t * y_hi);
    if z_hi <= z_lo {
        return Ok(0.0);
    }
    let lift_at = |l: &GridFunction, lo: f64, hi: f64, u: f64| -> Option<f64> {
        let eps = 1e-9 * l.step();
        if u < lo - eps || u > hi + eps {
            return None;
        }
        l.interpolate(u.clamp(lo, hi)).filter(|&v| v != ABSENT)
    };
    let value = |a: f64, b: f64| {
        if gamma == 0.0 {
            (-(a + t * b)).exp()
        } else {
            (a + t * b).powf(1.0 / gamma)
        }
    };
    let dz_target = 0.5 * f.step().min(t * g.step());
    let n = ((z_hi - z_lo) / dz_target).ceil().max(1.0) as usize + 1;
    let dz = (z_hi - z_lo) / (n - 1) as f64;
    let h: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let z = z_lo + j as f64 * dz;
            let from_f = xs.iter().filter_map(|&(x, a)| Some(value(a, lift_at(&lg, y_lo, y_hi, (z - x) / t)?)));
            let from_g = ys.iter().filter_map(|&(y, b)| Some(value(lift_at(&lf, x_lo, x_hi, z - t * y)?, b)));
            from_f.chain(from_g).fold(0.0, f64::max)
        })
        .collect();
    Ok(crate::grid::trapezoid(&h, dz))
}

/// s-concavity of `F` with `s = γ/(1+γ)` for two γ-concave functions `f, g`.
pub fn check_pair_concavity(
    f: &GridFunction,
    g: &GridFunction,
    gamma: f64,
    t_grid: &[f64],
    tol: f64,
) -> Result<ConcavityReport> {
    if !(gamma >= -1.0) || !gamma.is_finite() {
        return Err(Error::OutOfTheoremRange(gamma));
    }
    for (name, h) in [("f", f), ("g", g)] {
        let pre = check_gamma_concave_fn(h, gamma, 1e-9)?;
        if !pre.passed() {
            return Err(Error::HypothesisViolated(format!(
                "{name} is not {gamma}-concave (worst deficit {:e})",
                pre.worst_deficit
            )));
        }
    }
    let fs = t_grid
        .par_iter()
        .map(|&t| functional_volume_direct(f, g, gamma, t))
        .collect::<Result<Vec<f64>>>()?;
    check_s_concave_samples(t_grid, &fs, s_of_gamma(gamma, 1)?, tol)
}

/// `max |∂_t Q + V*(∂_z Q)|` over interior nodes of `u`, with central
/// differences of steps `dt` and `dz` applied to the refined Hopf-Lax solution.
pub fn pde_residual(u: &GridFunction, v: &PowerCost, t: f64, dt: f64, dz: f64) -> Result<f64> {
    if !(dt > 0.0 && dz > 0.0 && t > dt) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < dt < t and dz > 0, got t = {t}, dt = {dt}, dz = {dz}"
        )));
    }
    let r = RefinedHopfLax::new(u, v)?;
    let conj = legendre_conjugate(v);
    let n = u.len();
    let margin = n / 10;
    let residual = (margin..n - margin)
        .into_par_iter()
        .map(|i| {
            let z = u.node(i);
            let qt = (r.eval(t + dt, z) - r.eval(t - dt, z)) / (2.0 * dt);
            let qz = (r.eval(t, z + dz) - r.eval(t, z - dz)) / (2.0 * dz);
            (qt + conj.value(qz)).abs()
        })
        .reduce(|| 0.0, f64::max);
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn parabola(n: usize) -> GridFunction {
        GridFunction::from_fn(-6.0, 6.0, n, |x| 0.5 * x * x).unwrap()
    }

    #[test]
    fn conjugate_exponents() {
        assert_eq!(legendre_conjugate(&PowerCost::new(2.0).unwrap()).p(), 2.0);
        assert_relative_eq!(legendre_conjugate(&PowerCost::new(4.0).unwrap()).p(), 4.0 / 3.0);
        assert!(legendre_conjugate(&PowerCost::new(1.0).unwrap()).is_indicator());
        assert_eq!(legendre_conjugate(&PowerCost::indicator()).p(), 1.0);
        assert!(PowerCost::new(0.5).is_err());
    }

    #[test]
    fn conjugate_matches_brute_force_sup() {
        let v = PowerCost::new(3.0).unwrap();
        let conj = legendre_conjugate(&v);
        for u in [-1.7, 0.3, 2.2] {
            let sup = (0..200_001)
                .map(|i| -10.0 + i as f64 * 1e-4)
                .map(|x| x * u - v.value(x))
                .fold(f64::NEG_INFINITY, f64::max);
            assert_relative_eq!(conj.value(u), sup, max_relative = 1e-6);
        }
    }

    #[test]
    fn quadratic_example() {
        let u = parabola(1201);
        let v = PowerCost::new(2.0).unwrap();
        let q = hopf_lax(&u, &v, 1.0).unwrap();
        assert_relative_eq!(q.interpolate(2.0).unwrap(), 1.0, max_relative = 1e-3);
    }

    #[test]
    fn indicator_input_example() {
        let u = GridFunction::from_fn(-3.0, 3.0, 601, |x| if x.abs() <= 1.0 + 1e-9 { 0.0 } else { ABSENT }).unwrap();
        let q = hopf_lax(&u, &PowerCost::new(2.0).unwrap(), 0.5).unwrap();
        assert_relative_eq!(q.interpolate(2.0).unwrap(), 1.0, max_relative = 1e-9);
        assert_eq!(q.interpolate(0.3).unwrap(), 0.0);
    }

    #[test]
    fn all_absent_is_an_error() {
        let u = GridFunction::new(0.0, 1.0, vec![ABSENT; 5]).unwrap();
        assert_eq!(hopf_lax(&u, &PowerCost::new(2.0).unwrap(), 1.0), Err(Error::EmptyDomain));
    }

    #[test]
    fn q_is_below_u_and_shifts_with_constants() {
        let u = GridFunction::from_fn(-2.0, 2.0, 81, |x| (3.0 * x).sin() + x.abs()).unwrap();
        let v = PowerCost::new(1.5).unwrap();
        let q = hopf_lax(&u, &v, 0.7).unwrap();
        assert!(q.values().iter().zip(u.values()).all(|(a, b)| a <= b));
        let shifted = hopf_lax(&u.map(|x| x + 2.5).unwrap(), &v, 0.7).unwrap();
        for (a, b) in shifted.values().iter().zip(q.values()) {
            assert_relative_eq!(*a, b + 2.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn h_t_examples() {
        let v = PowerCost::new(2.0).unwrap();
        let ind = GridFunction::from_fn(-2.0, 3.0, 501, |x| if (-1e-9..=1.0 + 1e-9).contains(&x) { 1.0 } else { 0.0 }).unwrap();
        let h = h_t(&ind, 0.0, &v, 0.25, GammaPolicy::TheoremRange).unwrap();
        assert_relative_eq!(h.interpolate(1.1).unwrap(), (-0.02f64).exp(), max_relative = 1e-9);

        let gauss = GridFunction::from_fn(-8.0, 8.0, 801, |x| (-0.5 * x * x).exp()).unwrap();
        let h = h_t(&gauss, 0.0, &v, 1.0, GammaPolicy::TheoremRange).unwrap();
        assert_relative_eq!(h.interpolate(0.0).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn h_t_with_set_cost_is_the_dilated_indicator() {
        let a = crate::interval_set::IntervalUnion::new([(0.0, 1.0), (2.0, 3.0)]).unwrap();
        let f = GridFunction::from_fn(-2.0, 5.0, 701, |x| if a.contains(x) { 1.0 } else { 0.0 }).unwrap();
        let t = 0.25;
        let h = h_t(&f, 0.0, &PowerCost::indicator(), t, GammaPolicy::TheoremRange).unwrap();
        let dilated = a.dilate(t).unwrap();
        for (z, hz) in h.nodes().zip(h.values()) {
            let inside = dilated.distance(z) < 1e-9;
            assert_eq!(*hz, if inside { 1.0 } else { 0.0 }, "z = {z}");
        }
    }

    #[test]
    fn gamma_policy() {
        let f = GridFunction::from_fn(-1.0, 1.0, 21, |x| 1.0 - x * x).unwrap();
        let v = PowerCost::new(2.0).unwrap();
        assert_eq!(h_t(&f, -1.0, &v, 1.0, GammaPolicy::TheoremRange), Err(Error::OutOfTheoremRange(-1.0)));
        assert_eq!(h_t(&f, 0.5, &v, 1.0, GammaPolicy::TheoremRange), Err(Error::OutOfTheoremRange(0.5)));
        assert!(h_t(&f, -2.0, &v, 1.0, GammaPolicy::Unverified).is_ok());
        assert!(h_t(&f, 0.5, &v, 1.0, GammaPolicy::Unverified).is_err());
    }

    #[test]
    fn volume_of_laplace_density_is_constant_for_p_one() {
        let f = GridFunction::from_fn(-40.0, 40.0, 4001, |x| (-x.abs()).exp()).unwrap();
        let v = PowerCost::new(1.0).unwrap();
        let curve = functional_volume(&f, 0.0, &v, &[0.5, 1.0, 2.0], GammaPolicy::TheoremRange).unwrap();
        for (_, value) in curve {
            assert_relative_eq!(value, 2.0, max_relative = 1e-4);
        }
    }

    #[test]
    fn volume_of_gaussian() {
        let f = GridFunction::from_fn(-12.0, 12.0, 2401, |x| (-0.5 * x * x).exp()).unwrap();
        let v = PowerCost::new(2.0).unwrap();
        let curve = functional_volume(&f, 0.0, &v, &[0.5, 1.0, 3.0], GammaPolicy::TheoremRange).unwrap();
        for (t, value) in curve {
            assert_relative_eq!(value, (2.0 * PI * (1.0 + t)).sqrt(), max_relative = 1e-4);
        }
        assert_eq!(functional_volume(&f, 0.0, &v, &[0.5], GammaPolicy::TheoremRange).unwrap().len(), 1);
    }

    #[test]
    fn power_law_tails_are_integrated() {
        // f = 1_{[-1,1]}, γ = -1/2, p = 2: h_t(z) = (1 + (|z|-1)²/(2t))^{-2} off [-1, 1]
        let f = GridFunction::from_fn(-3.0, 3.0, 601, |x| if x.abs() <= 1.0 + 1e-9 { 1.0 } else { 0.0 }).unwrap();
        let t = 0.5;
        let v = PowerCost::new(2.0).unwrap();
        let value = functional_volume(&f, -0.5, &v, &[t], GammaPolicy::TheoremRange).unwrap()[0].1;
        // ∫_0^∞ (1 + w²/(2t))^{-2} dw = π √(2t) / 4
        let exact = 2.0 + 2.0 * PI * (2.0 * t).sqrt() / 4.0;
        assert_relative_eq!(value, exact, max_relative = 1e-4);
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let f = GridFunction::from_fn(-1.0, 1.0, 21, |x| (-x * x).exp()).unwrap();
        let r = functional_volume(&f, 0.0, &PowerCost::new(2.0).unwrap(), &[1.0], GammaPolicy::TheoremRange);
        assert!(matches!(r, Err(Error::GridTooNarrow(_))));
    }

    #[test]
    fn theorem_b_examples() {
        let ts: Vec<f64> = (0..11).map(|i| 0.1 + 0.2 * i as f64).collect();
        let gauss = GridFunction::from_fn(-12.0, 12.0, 1201, |x| (-0.5 * x * x).exp()).unwrap();
        assert!(check_theorem_b(&gauss, 0.0, 2.0, &ts, 1e-5).unwrap().passed());
        let laplace = GridFunction::from_fn(-40.0, 40.0, 2001, |x| (-x.abs()).exp()).unwrap();
        assert!(check_theorem_b(&laplace, 0.0, 1.0, &ts, 1e-9).unwrap().passed());
    }

    #[test]
    fn direct_volume_of_interval_pair() {
        let ind = GridFunction::from_fn(0.0, 1.0, 101, |_| 1.0).unwrap();
        for t in [0.25, 0.5, 1.0, 2.0] {
            assert_relative_eq!(functional_volume_direct(&ind, &ind, 0.0, t).unwrap(), 1.0 + t, max_relative = 1e-12);
            // γ = 1: h_t = 1 + t on [0, 1 + t]
            assert_relative_eq!(
                functional_volume_direct(&ind, &ind, 1.0, t).unwrap(),
                (1.0 + t) * (1.0 + t),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn pair_concavity_examples() {
        let ts: Vec<f64> = (1..=10).map(|i| 0.2 * i as f64).collect();
        let hat = GridFunction::from_fn(-1.0, 1.0, 201, |x| 1.0 - x.abs()).unwrap();
        assert!(check_pair_concavity(&hat, &hat, 1.0, &ts, 1e-4).unwrap().passed());
        let gauss = GridFunction::from_fn(-6.0, 6.0, 241, |x| (-0.5 * x * x).exp()).unwrap();
        assert!(check_pair_concavity(&gauss, &gauss, 0.0, &ts, 1e-4).unwrap().passed());
        let bumpy = GridFunction::from_fn(-1.0, 1.0, 201, |x| 1.0 + 0.5 * (8.0 * x).cos()).unwrap();
        assert!(matches!(
            check_pair_concavity(&bumpy, &hat, 1.0, &ts, 1e-4),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn refined_matches_closed_form() {
        let u = parabola(601);
        let v = PowerCost::new(2.0).unwrap();
        let q = hopf_lax_refined(&u, &v, 1.0).unwrap();
        for (z, qz) in q.nodes().zip(q.values()).filter(|(z, _)| z.abs() < 4.0) {
            assert_relative_eq!(*qz, z * z / 4.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn residual_vanishes_for_constants_and_shrinks_for_parabola() {
        let c = GridFunction::from_fn(-1.0, 1.0, 51, |_| 3.0).unwrap();
        let v = PowerCost::new(2.0).unwrap();
        assert!(pde_residual(&c, &v, 1.0, 0.1, 0.1).unwrap() < 1e-12);
        let u = parabola(601);
        let r1 = pde_residual(&u, &v, 1.0, 0.1, 0.1).unwrap();
        let r2 = pde_residual(&u, &v, 1.0, 0.05, 0.05).unwrap();
        assert!(r2 * 1.7 <= r1, "{r1} {r2}");
    }
}
