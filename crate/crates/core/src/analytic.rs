//! Closed-form outage probability and its reference integral.
//!
//! With `X = |h1|² ~ Exp(1)` and the aligned cascade `Y = Σ|h2,k||h3,k|`
//! approximated by a gamma law of shape `v` and scale `δ`, outage is
//! `P[X·Y² < T] = 1 − E[exp(−T/Y²)]`. Substituting `y = tan μ` maps the
//! expectation onto `(0, π/2)`, and Chebyshev–Gauss quadrature on `K` nodes
//! `ω_k = cos((2k−1)π/K)`, `μ_k = π(ω_k + 1)/4` gives
//!
//! ```text
//! P_out ≈ 1 − π²/(4K) Σ_k √(1−ω_k²) sec²μ_k (tan μ_k)^(v−1) / (Γ(v) δ^v)
//!                       · exp(−T/tan²μ_k − tan μ_k/δ)
//! ```
//!
//! At `v ≈ 161` (a hundred elements) the power and gamma factors are far
//! outside `f64` range, so every node term is assembled as a logarithm and
//! the sum is taken with a max shift.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::exec::{ordered_map, Workers};
use crate::params::{DerivedParams, SystemParams};
use crate::quadrature::{self, QuadratureError};
use crate::special::{log_gamma, log_sum_exp};

/// Node set used by the closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureNodes {
    pub omega: Vec<f64>,
    pub mu: Vec<f64>,
    /// √(1 − ω_k²).
    pub weights: Vec<f64>,
    pub k_nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageResult {
    /// `p_raw` clamped to [0, 1].
    pub p_out: f64,
    /// Unclamped quadrature value.
    pub p_raw: f64,
    pub k_used: usize,
    /// Nodes whose term is exactly zero in floating point (endpoint nodes
    /// and underflowed terms).
    pub terms_skipped: usize,
}

impl OutageResult {
    fn exact(p: f64, k_used: usize) -> Self {
        Self {
            p_out: p,
            p_raw: p,
            k_used,
            terms_skipped: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticError {
    #[error("quadrature needs at least one node, got {0}")]
    NodeCount(i64),
    #[error("reference tolerance must lie in (0, 1e-2], got {0}")]
    Tolerance(f64),
    #[error("reference integral requires at least one RIS element")]
    NoElements,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

pub fn chebyshev_nodes(k_nodes: i64) -> Result<QuadratureNodes, AnalyticError> {
    if k_nodes < 1 {
        return Err(AnalyticError::NodeCount(k_nodes));
    }
    let k = k_nodes as usize;
    let omega: Vec<f64> = (1..=k)
        .map(|i| ((2 * i - 1) as f64 * PI / k as f64).cos())
        .collect();
    let mu = omega.iter().map(|w| PI * (w + 1.0) / 4.0).collect();
    let weights = omega
        .iter()
        .map(|w| ((1.0 - w) * (1.0 + w)).max(0.0).sqrt())
        .collect();
    Ok(QuadratureNodes {
        omega,
        mu,
        weights,
        k_nodes: k,
    })
}

/// Closed-form outage with the node count from `params.k_nodes`.
pub fn outage_closed_form(
    params: &SystemParams,
    derived: &DerivedParams,
) -> Result<OutageResult, AnalyticError> {
    outage_closed_form_with(params, derived, params.k_nodes, Workers::Sequential)
}

/// Closed-form outage with an explicit node count and thread budget.
///
/// The per-node log terms are reduced in node order, so the result is
/// bit-identical for every `workers` value.
pub fn outage_closed_form_with(
    params: &SystemParams,
    derived: &DerivedParams,
    k_nodes: i64,
    workers: Workers,
) -> Result<OutageResult, AnalyticError> {
    let nodes = chebyshev_nodes(k_nodes)?;
    let k = nodes.k_nodes;

    if derived.is_degenerate() || params.m == 0 {
        // No cascade: z_u = 0, so outage iff the rate target is positive.
        let p = if params.r_rate > 0.0 { 1.0 } else { 0.0 };
        return Ok(OutageResult::exact(p, k));
    }

    let v = derived.v_shape;
    let scale = derived.delta_scale;
    let t = derived.threshold_t;
    let log_norm = log_gamma(v).expect("shape is positive for m >= 1") + v * scale.ln();

    let terms = ordered_map(k, workers, |i| {
        let weight = nodes.weights[i];
        let tan = nodes.mu[i].tan();
        if weight == 0.0 || tan <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let tan2 = tan * tan;
        weight.ln() + tan2.ln_1p() + (v - 1.0) * tan.ln() - log_norm - t / tan2 - tan / scale
    });

    let terms_skipped = terms.iter().filter(|&&x| x == f64::NEG_INFINITY).count();
    let log_sum = log_sum_exp(&terms);
    let integral = PI * PI / (4.0 * k as f64) * log_sum.exp();
    let p_raw = 1.0 - integral;

    Ok(OutageResult {
        p_out: p_raw.clamp(0.0, 1.0),
        p_raw,
        k_used: k,
        terms_skipped,
    })
}

/// Outage under the same gamma approximation, integrated adaptively to
/// absolute accuracy `tol` instead of by fixed Chebyshev nodes.
///
/// Integrates `∫ (1 − exp(−T/y²)) f_Y(y) dy` in the variable `μ = atan y`,
/// which is the complement of the closed form's integral and keeps relative
/// accuracy when the outage probability is small.
pub fn outage_reference(
    params: &SystemParams,
    derived: &DerivedParams,
    tol: f64,
) -> Result<f64, AnalyticError> {
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(AnalyticError::Tolerance(tol));
    }
    if params.m < 1 || derived.is_degenerate() {
        return Err(AnalyticError::NoElements);
    }
    let t = derived.threshold_t;
    if t == 0.0 {
        return Ok(0.0);
    }
    if t == f64::INFINITY {
        return Ok(1.0);
    }

    let v = derived.v_shape;
    let scale = derived.delta_scale;
    let log_norm = log_gamma(v).expect("shape is positive for m >= 1") + v * scale.ln();

    let integrand = |mu: f64| {
        let y = mu.tan();
        if y <= 0.0 || !y.is_finite() {
            return 0.0;
        }
        let miss = -(-t / (y * y)).exp_m1();
        let log_density = (v - 1.0) * y.ln() - y / scale - log_norm;
        // dy = sec²μ dμ = (1 + y²) dμ
        miss * (log_density + (y * y).ln_1p()).exp()
    };

    let breaks = reference_breakpoints(v, scale, t);
    let result = quadrature::integrate(integrand, &breaks, tol, 20_000)?;
    Ok(result.value.clamp(0.0, 1.0))
}

/// Initial partition of (0, π/2): a uniform grid plus points that bracket the
/// bulk of the gamma density and the knee of exp(−T/y²), so a narrow peak is
/// never missed by the first pass.
fn reference_breakpoints(v: f64, scale: f64, t: f64) -> Vec<f64> {
    let mean = v * scale;
    let sd = v.sqrt() * scale;
    let mut ys: Vec<f64> = (-12..=12).map(|j| mean + j as f64 * sd).collect();
    ys.extend([0.25, 0.5, 1.0, 2.0, 4.0].iter().map(|c| c * t.sqrt()));

    let mut mus: Vec<f64> = (0..=32).map(|i| FRAC_PI_2 * i as f64 / 32.0).collect();
    mus.extend(ys.into_iter().filter(|y| *y > 0.0).map(f64::atan));
    mus.retain(|m| m.is_finite() && (0.0..=FRAC_PI_2).contains(m));
    mus.sort_by(f64::total_cmp);
    mus.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    mus
}
