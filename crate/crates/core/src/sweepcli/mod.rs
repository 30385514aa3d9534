//! Parameter sweeps, configuration files, record output and the built-in
//! analytic-versus-simulation validation run.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::outage_closed_form;
use crate::exec::{ordered_map, Workers};
use crate::montecarlo::{estimate_outage, McConfig};
use crate::params::{derive, SystemParams};

pub mod config;
pub mod records;
pub mod validate;

pub use config::{parse_config, Config, ConfigError};
pub use records::{read_records, write_records, Format, RecordsError, SweepRecord, CSV_HEADER};
pub use validate::{validate_command, Fault, PointReport, ValidateOptions, ValidateReport};

/// Parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    M,
    RhoDb,
    PPsDbm,
    Alpha,
    RRate,
    KNodes,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 6] = [
        SweepAxis::M,
        SweepAxis::RhoDb,
        SweepAxis::PPsDbm,
        SweepAxis::Alpha,
        SweepAxis::RRate,
        SweepAxis::KNodes,
    ];

    /// The [`SystemParams`] field this axis writes to.
    pub fn field(self) -> &'static str {
        match self {
            SweepAxis::M => "m",
            SweepAxis::RhoDb => "rho_db",
            SweepAxis::PPsDbm => "p_ps_dbm",
            SweepAxis::Alpha => "alpha",
            SweepAxis::RRate => "r_rate",
            SweepAxis::KNodes => "k_nodes",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.field())
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.field() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SweepAxis::ALL.iter().map(|a| a.field()).collect();
                format!(
                    "unknown sweep axis `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Analytic,
    Mc,
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "mc" => Ok(Engine::Mc),
            other => Err(format!(
                "unknown engine `{other}` (expected analytic or mc)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    /// Baseline; the axis field is overwritten at each point.
    pub fixed: SystemParams,
    pub engines: BTreeSet<Engine>,
    /// Simulation settings; defaults apply when the mc engine is selected
    /// without them.
    pub mc: Option<McConfig>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SweepError {
    #[error("sweep needs at least one engine")]
    NoEngines,
    #[error("sweep needs at least one value")]
    NoValues,
}

/// Seed for sweep point `index`, derived from the run seed by a bijective
/// 64-bit mix (splitmix64 finaliser).
pub fn point_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Evaluate every point of the sweep. Points are independent and run in
/// parallel; the output is in input order. A point whose parameters are
/// invalid yields a record with `error` set and no probabilities.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>, SweepError> {
    if spec.engines.is_empty() {
        return Err(SweepError::NoEngines);
    }
    if spec.values.is_empty() {
        return Err(SweepError::NoValues);
    }
    let mc = spec.mc.unwrap_or_default();
    let workers = if spec.engines.contains(&Engine::Mc) {
        Workers::from_count(mc.workers)
    } else {
        Workers::Global
    };

    let records = ordered_map(spec.values.len(), workers, |i| {
        let mut params = spec.fixed;
        let mut record = SweepRecord::new(params);
        if let Err(e) = params.set(spec.axis.field(), spec.values[i]) {
            record.error = Some(e.to_string());
            return record;
        }
        record.params = params;
        let derived = match derive(&params) {
            Ok(d) => d,
            Err(e) => {
                record.error = Some(e.to_string());
                return record;
            }
        };

        if spec.engines.contains(&Engine::Analytic) {
            match outage_closed_form(&params, &derived) {
                Ok(r) => {
                    record.p_out_analytic = Some(r.p_out);
                    record.p_raw = Some(r.p_raw);
                }
                Err(e) => record.error = Some(e.to_string()),
            }
        }
        if spec.engines.contains(&Engine::Mc) {
            let point = McConfig {
                seed: point_seed(mc.seed, i as u64),
                // Parallelism is spent across points.
                workers: 1,
                ..mc
            };
            match estimate_outage(&params, &derived, &point) {
                Ok(e) => {
                    record.p_out_mc = Some(e.p_hat);
                    record.mc_stderr = Some(e.stderr);
                    record.trials = Some(e.trials);
                    record.seed = Some(e.seed);
                }
                Err(e) => record.error = Some(e.to_string()),
            }
        }
        record
    });
    Ok(records)
}

/// Parse a value list: `a,b,c`, `start:end` (unit step, inclusive) or
/// `start:end:step`.
pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number `{s}`: {e}"))
        };
        let (start, end, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1.0),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(format!("bad range `{text}`")),
        };
        if step <= 0.0 || !step.is_finite() || !start.is_finite() || !end.is_finite() || end < start {
            return Err(format!("bad range `{text}`"));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize + 1;
        if count > 10_000_000 {
            return Err(format!("range `{text}` is too long"));
        }
        return Ok((0..count).map(|i| start + i as f64 * step).collect());
    }
    let values: Result<Vec<f64>, String> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number `{s}`: {e}"))
        })
        .collect();
    let values = values?;
    if values.is_empty() {
        return Err("empty value list".into());
    }
    Ok(values)
}
