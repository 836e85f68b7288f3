//! # parcave
//!
//! Exact and numerical tools for concavity properties of parallel volumes.
//!
//! - [`interval_set`]: compact subsets of the line as unions of closed intervals,
//!   with Minkowski dilation by `t·[-1, 1]`.
//! - [`measure1d`]: densities on the line (Lebesgue, uniform, power, Gaussian,
//!   tabulated) with closed-form integration.
//! - [`parallel_volume`]: the curve `t ↦ μ(A + t·[-1,1])`, its one-sided
//!   derivatives at merge times and its second derivative between them.
//! - [`concavity`]: power means `M_s` and s-concavity certification of curves.
//! - [`hopf_lax`]: the inf-convolution `Q_t`, the functional dilation `h_t` and
//!   its integral `F(t)`.
//! - [`variance_inequality`]: both sides of the variance (Brascamp-Lieb-type)
//!   inequality in one dimension.
//! - [`counterexamples`]: reproducible catalog of explicit counterexamples and
//!   randomized positive suites.
//! - [`cli`]: the `parcave` command line front end.

#![forbid(unsafe_code)]

pub mod cli;
pub mod concavity;
pub mod counterexamples;
pub mod error;
pub mod grid;
pub mod hopf_lax;
pub mod interval_set;
pub mod measure1d;
pub mod parallel_volume;
pub mod variance_inequality;

pub use concavity::{check_gamma_concave_fn, check_s_concave, s_mean, ConcavityReport, Verdict};
pub use error::{Error, Result};
pub use grid::GridFunction;
pub use hopf_lax::PowerCost;
pub use interval_set::IntervalUnion;
pub use measure1d::{Density1D, SConcavityClass};
pub use parallel_volume::VolumeCurve;
