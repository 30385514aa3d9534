//! Harvest-then-transmit link model: energy, transmit power, end-to-end SNR
//! and the per-realization outage event.

use serde::Serialize;

use crate::channel::{cascaded_gain_aligned, ChannelRealization};
use crate::params::{DerivedParams, SystemParams};

/// Linear gains of the two path losses and the element amplification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub zeta1: f64,
    pub zeta2: f64,
    /// ρ², power gain per element.
    pub rho2: f64,
}

impl LinkBudget {
    pub fn from_params(params: &SystemParams) -> Self {
        Self {
            zeta1: params.zeta1(),
            zeta2: params.zeta2(),
            rho2: params.rho2(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnrSample {
    /// End-to-end SNR at the base station.
    pub z_u: f64,
    /// (1−α)·log2(1 + z_u), bit/s/Hz.
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SysModelError {
    #[error("realization has {got} elements but the parameters specify {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Energy collected during the harvesting slot, mW·s.
pub fn harvested_energy(params: &SystemParams, h1_gain: f64) -> f64 {
    params.eta * params.alpha * params.tau_c * params.p_ps_mw() * h1_gain * params.zeta1()
}

/// Power available for uplink: the harvested energy spread over the
/// remaining (1−α)τ_c of the coherence interval, mW.
pub fn transmit_power(params: &SystemParams, h1_gain: f64) -> f64 {
    harvested_energy(params, h1_gain) / ((1.0 - params.alpha) * params.tau_c)
}

/// SNR and rate from the two fading statistics that matter under optimal
/// phases: `|h1|²` and the aligned cascade sum `Σ|h2,k||h3,k|`.
pub fn snr_from_gains(
    params: &SystemParams,
    derived: &DerivedParams,
    h1_gain: f64,
    cascade: f64,
) -> SnrSample {
    let budget = LinkBudget::from_params(params);
    let reflected = params.rho_amp() * cascade;
    let z_u = derived.p_e * budget.zeta1 * budget.zeta2 * h1_gain * reflected * reflected;
    SnrSample {
        z_u,
        rate: (1.0 - params.alpha) * (1.0 + z_u).log2(),
    }
}

/// SNR of one realization with the RIS phases set optimally.
pub fn snr(
    params: &SystemParams,
    derived: &DerivedParams,
    realization: &ChannelRealization,
) -> Result<SnrSample, SysModelError> {
    let expected = params.elements();
    let got = realization.elements();
    if got != expected || realization.h3.len() != expected {
        return Err(SysModelError::DimensionMismatch { expected, got });
    }
    let cascade = cascaded_gain_aligned(&realization.h2, &realization.h3);
    Ok(snr_from_gains(
        params,
        derived,
        realization.h1.norm_sqr(),
        cascade,
    ))
}

/// Outage in rate form: the achievable rate falls strictly below `r_rate`.
pub fn outage_indicator(sample: &SnrSample, r_rate: f64) -> bool {
    sample.rate < r_rate
}

/// Outage in threshold form: (|h1|·Σ|h2,k||h3,k|)² < T.
pub fn outage_by_threshold(h1_gain: f64, cascade: f64, threshold_t: f64) -> bool {
    h1_gain * cascade * cascade < threshold_t
}
