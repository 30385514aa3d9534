//! Built-in cross-check of the closed form against simulation.
//!
//! Runs both engines on a fixed grid of surface sizes and amplification
//! gains and requires `|p_analytic − p_mc| ≤ max(0.02, 3·stderr)` at every
//! graded point. Both engines model the same system, so this is a
//! self-consistency check rather than a comparison with published curves.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::point_seed;
use crate::analytic::{outage_closed_form_with, AnalyticError};
use crate::exec::{ordered_map, Workers};
use crate::montecarlo::{estimate_outage, McConfig, McError};
use crate::params::{derive, ParamError, SystemParams};

pub const GRADED_M: [i64; 5] = [8, 16, 32, 64, 100];
pub const GRID_RHO_DB: [f64; 2] = [0.0, 10.0];
/// Surface size reported for information only; the gamma fit is loosest there.
pub const INFORMATIONAL_M: i64 = 1;
pub const ABS_TOLERANCE: f64 = 0.02;
pub const STDERR_MULTIPLE: f64 = 3.0;

/// Deliberate corruption of the SNR threshold Δ used by the closed form,
/// for checking that validation can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Δ = 2^(r/(1−α)), dropping the −1.
    DeltaMissingMinusOne,
    /// Δ = e^(r/(1−α)) − 1, natural instead of binary exponent.
    DeltaNaturalBase,
}

impl Fault {
    pub const ALL: [Fault; 2] = [Fault::DeltaMissingMinusOne, Fault::DeltaNaturalBase];

    pub fn name(self) -> &'static str {
        match self {
            Fault::DeltaMissingMinusOne => "delta-missing-minus-one",
            Fault::DeltaNaturalBase => "delta-natural-base",
        }
    }

    fn corrupt_delta(self, params: &SystemParams) -> f64 {
        let exponent = params.r_rate / (1.0 - params.alpha);
        match self {
            Fault::DeltaMissingMinusOne => exponent.exp2(),
            Fault::DeltaNaturalBase => exponent.exp_m1(),
        }
    }
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fault::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown fault `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateOptions {
    /// Baseline; `m` and `rho_db` are overwritten by the grid.
    pub base: SystemParams,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub k_nodes: i64,
    /// Also report the `m = 1` points (never graded).
    pub include_informational: bool,
    pub fault: Option<Fault>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            base: SystemParams::default(),
            trials: 100_000,
            seed: 42,
            workers: McConfig::default().workers,
            k_nodes: 1000,
            include_informational: false,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub m: i64,
    pub rho_db: f64,
    pub p_analytic: f64,
    pub p_raw: f64,
    pub p_mc: f64,
    pub stderr: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub graded: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidateReport {
    pub points: Vec<PointReport>,
    pub trials: u64,
    pub seed: u64,
    pub k_nodes: i64,
    pub fault: Option<Fault>,
    pub passed: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ValidateError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Mc(#[from] McError),
}

fn grid(include_informational: bool) -> Vec<(i64, f64, bool)> {
    let mut ms: Vec<(i64, bool)> = GRADED_M.iter().map(|&m| (m, true)).collect();
    if include_informational {
        ms.insert(0, (INFORMATIONAL_M, false));
    }
    ms.into_iter()
        .flat_map(|(m, graded)| GRID_RHO_DB.iter().map(move |&rho| (m, rho, graded)))
        .collect()
}

/// Run the grid and grade each point.
pub fn validate_command(opts: &ValidateOptions) -> Result<ValidateReport, ValidateError> {
    let points = grid(opts.include_informational);
    let evaluated = ordered_map(points.len(), Workers::Sequential, |i| {
        let (m, rho_db, graded) = points[i];
        let params = SystemParams {
            m,
            rho_db,
            k_nodes: opts.k_nodes,
            ..opts.base
        };
        let derived = derive(&params)?;
        let analytic_view = match opts.fault {
            Some(f) => derived.with_delta_thr(f.corrupt_delta(&params)),
            None => derived,
        };
        let analytic =
            outage_closed_form_with(&params, &analytic_view, opts.k_nodes, Workers::Sequential)?;
        let mc = estimate_outage(
            &params,
            &derived,
            &McConfig {
                trials: opts.trials,
                seed: point_seed(opts.seed, i as u64),
                workers: opts.workers,
            },
        )?;
        let abs_diff = (analytic.p_out - mc.p_hat).abs();
        let tolerance = ABS_TOLERANCE.max(STDERR_MULTIPLE * mc.stderr);
        Ok(PointReport {
            m,
            rho_db,
            p_analytic: analytic.p_out,
            p_raw: analytic.p_raw,
            p_mc: mc.p_hat,
            stderr: mc.stderr,
            abs_diff,
            tolerance,
            graded,
            pass: abs_diff <= tolerance,
        })
    });
    let points = evaluated
        .into_iter()
        .collect::<Result<Vec<_>, ValidateError>>()?;
    let passed = points.iter().filter(|p| p.graded).all(|p| p.pass);
    Ok(ValidateReport {
        points,
        trials: opts.trials,
        seed: opts.seed,
        k_nodes: opts.k_nodes,
        fault: opts.fault,
        passed,
    })
}

impl fmt::Display for ValidateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "closed form (K = {}) vs Monte Carlo ({} trials per point, seed {})",
            self.k_nodes, self.trials, self.seed
        )?;
        if let Some(fault) = self.fault {
            writeln!(f, "fault injected into closed form: {}", fault.name())?;
        }
        writeln!(
            f,
            "{:>5} {:>7} {:>14} {:>14} {:>10} {:>10} {:>10}  result",
            "m", "rho_db", "p_analytic", "p_mc", "stderr", "|diff|", "tol"
        )?;
        for p in &self.points {
            let verdict = match (p.graded, p.pass) {
                (false, _) => "info",
                (true, true) => "pass",
                (true, false) => "FAIL",
            };
            writeln!(
                f,
                "{:>5} {:>7} {:>14.6e} {:>14.6e} {:>10.2e} {:>10.2e} {:>10.2e}  {}",
                p.m, p.rho_db, p.p_analytic, p.p_mc, p.stderr, p.abs_diff, p.tolerance, verdict
            )?;
        }
        writeln!(
            f,
            "both engines model the same system; this is a self-consistency check"
        )?;
        write!(f, "{}", if self.passed { "PASS" } else { "FAIL" })
    }
}
