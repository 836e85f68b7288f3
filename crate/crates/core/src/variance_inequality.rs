//! Both sides of the one-dimensional variance inequality equivalent to
//! s-concavity of the functional parallel volume.
//!
//! With `Q = Q_t φ`, `dμ ∝ Q^{1/γ} dz` and `G = V*(Q')/Q`, the inequality reads
//!
//! `Var_μ(G) <= -γ/(1-γ) ∫ Q''·(V*'(Q'))²/Q dμ + (γ-s)/(1-γ)·(∫G dμ)²`.
//!
//! The log-concave variant (`γ = 0`, quadratic cost) is
//! `Var_μ((Q')²) <= 4 ∫ Q''·(Q')² dμ` with `dμ ∝ e^{-Q}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{first_differences, second_differences, trapezoid, GridFunction};
use crate::hopf_lax::{hopf_lax_refined, legendre_conjugate, PowerCost};
use crate::measure1d::s_of_gamma;

/// Relative weight of `μ` at the grid ends above which the grid is too narrow.
const EDGE_MASS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BLMode {
    Power,
    Log,
    Corollary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BLCheckResult {
    pub mode: BLMode,
    pub t: f64,
    pub gamma: f64,
    pub s: f64,
    /// Exponent of the cost whose conjugate enters `G`.
    pub p: f64,
    /// `Var_μ(G)`.
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// `∫ dμ` after normalization.
    pub mass: f64,
    pub nodes: usize,
    pub dz: f64,
}

/// Variance inequality for `γ ∈ (-1, 0)` and cost `V = |y|^p/p`, `1 < p < ∞`.
/// `s` defaults to `γ/(1+γ)`.
pub fn bl_check(phi: &GridFunction, v: &PowerCost, gamma: f64, t: f64, s: Option<f64>) -> Result<BLCheckResult> {
    if !(gamma > -1.0 && gamma < 0.0) {
        return Err(Error::OutOfTheoremRange(gamma));
    }
    let s = match s {
        Some(s) => s,
        None => s_of_gamma(gamma, 1)?,
    };
    let q = evolve(phi, v, t)?;
    power_sides(&q, v, gamma, s, t, BLMode::Power)
}

/// The `γ = 0`, `V = |y|²/2` variant, with `dμ ∝ e^{-Q_t φ}`.
pub fn bl_check_log(phi: &GridFunction, t: f64) -> Result<BLCheckResult> {
    let v = PowerCost::new(2.0)?;
    let q = evolve(phi, &v, t)?;
    let values = q.values();
    let dz = q.step();
    let d1 = first_differences(values, dz);
    let d2 = second_differences(values, dz);
    let qmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    let weight: Vec<f64> = values.iter().map(|&x| (qmin - x).exp()).collect();
    let g: Vec<f64> = d1.iter().map(|d| d * d).collect();
    let energy: Vec<f64> = d1.iter().zip(&d2).map(|(d, dd)| 4.0 * dd * d * d).collect();
    let (lhs, rhs_energy, _, mass) = moments(&weight, &g, &energy, dz)?;
    Ok(BLCheckResult {
        mode: BLMode::Log,
        t,
        gamma: 0.0,
        s: 0.0,
        p: 2.0,
        lhs,
        rhs: rhs_energy,
        slack: rhs_energy - lhs,
        mass,
        nodes: q.len(),
        dz,
    })
}

/// Weighted Brascamp-Lieb-type inequality obtained as `t → 0`:
/// `G = V(φ')/φ`, `dμ ∝ φ^{1/γ}` and the Hessian term `φ''·(V'(φ'))²/φ`.
pub fn corollary_check(phi: &GridFunction, v: &PowerCost, gamma: f64) -> Result<BLCheckResult> {
    if !v.is_superlinear() {
        return Err(Error::SuperlinearityRequired(v.p()));
    }
    if v.is_indicator() {
        return Err(Error::InvalidArgument("cost must be finite".into()));
    }
    if !(gamma > -1.0 && gamma < 0.0) {
        return Err(Error::OutOfTheoremRange(gamma));
    }
    ensure_convex(phi)?;
    // the cost whose conjugate is V
    let dual = legendre_conjugate(v);
    let mut r = power_sides(phi, &dual, gamma, s_of_gamma(gamma, 1)?, 0.0, BLMode::Corollary)?;
    r.p = v.p();
    Ok(r)
}

fn ensure_convex(phi: &GridFunction) -> Result<()> {
    if phi.values().iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("φ must be finite on the grid".into()));
    }
    let d2 = phi.second_derivative();
    let scale = d2.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if let Some((i, x)) = d2.iter().enumerate().find(|(_, x)| **x < -1e-8 * scale) {
        return Err(Error::NotConvex(format!(
            "second difference {x:e} at z = {}",
            phi.node(i)
        )));
    }
    Ok(())
}

fn evolve(phi: &GridFunction, v: &PowerCost, t: f64) -> Result<GridFunction> {
    ensure_convex(phi)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
    }
    if t == 0.0 {
        Ok(phi.clone())
    } else {
        hopf_lax_refined(phi, v, t)
    }
}

fn power_sides(q: &GridFunction, v: &PowerCost, gamma: f64, s: f64, t: f64, mode: BLMode) -> Result<BLCheckResult> {
    if !v.is_superlinear() || v.is_indicator() {
        return Err(Error::InvalidArgument(format!("cost needs 1 < p < ∞, got {}", v.p())));
    }
    let values = q.values();
    if let Some(x) = values.iter().find(|x| !(**x > 0.0)) {
        return Err(Error::Vanishing(format!("Q_t φ must stay positive, got {x}")));
    }
    let conj = legendre_conjugate(v);
    let dz = q.step();
    let d1 = first_differences(values, dz);
    let d2 = second_differences(values, dz);
    let qmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    // (Q/qmin)^{1/γ} <= 1
    let weight: Vec<f64> = values.iter().map(|&x| (x / qmin).powf(1.0 / gamma)).collect();
    let g: Vec<f64> = d1.iter().zip(values).map(|(&d, &x)| conj.value(d) / x).collect();
    let hess: Vec<f64> = d1
        .iter()
        .zip(&d2)
        .zip(values)
        .map(|((&d, &dd), &x)| dd * conj.derivative(d).powi(2) / x)
        .collect();
    let (lhs, hess_mean, mean, mass) = moments(&weight, &g, &hess, dz)?;
    let rhs = -gamma / (1.0 - gamma) * hess_mean + (gamma - s) / (1.0 - gamma) * mean * mean;
    Ok(BLCheckResult {
        mode,
        t,
        gamma,
        s,
        p: v.p(),
        lhs,
        rhs,
        slack: rhs - lhs,
        mass,
        nodes: q.len(),
        dz,
    })
}

/// `(Var_μ(g), ∫ e dμ, ∫ g dμ, ∫ dμ)` for `dμ ∝ weight`.
fn moments(weight: &[f64], g: &[f64], e: &[f64], dz: f64) -> Result<(f64, f64, f64, f64)> {
    let n = weight.len();
    let wmax = weight.iter().copied().fold(0.0, f64::max);
    let trivial = g.iter().all(|&x| x == 0.0);
    if !trivial && (weight[0] > EDGE_MASS * wmax || weight[n - 1] > EDGE_MASS * wmax) {
        return Err(Error::GridTooNarrow(format!(
            "μ has relative weight {:e} and {:e} at the grid ends",
            weight[0] / wmax,
            weight[n - 1] / wmax
        )));
    }
    let z = trapezoid(weight, dz);
    let mu: Vec<f64> = weight.iter().map(|w| w / z).collect();
    let integral = |f: &dyn Fn(usize) -> f64| trapezoid(&(0..n).map(f).collect::<Vec<_>>(), dz);
    let mass = integral(&|i| mu[i]);
    let mean = integral(&|i| g[i] * mu[i]);
    let var = integral(&|i| (g[i] - mean).powi(2) * mu[i]);
    let energy = integral(&|i| e[i] * mu[i]);
    Ok((var, energy, mean, mass))
}
