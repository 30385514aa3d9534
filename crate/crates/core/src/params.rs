//! System parameters, unit conversion and the derived constants shared by
//! the analytic and simulation engines.
//!
//! Everything user-facing is expressed in dB/dBm; everything returned by
//! [`derive`] is linear (mW or dimensionless).

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Scale of the gamma law fitted to the aligned cascade sum, `4/π − π/4`.
pub const GAMMA_SCALE: f64 = 4.0 / PI - PI / 4.0;

/// Names of every [`SystemParams`] field, in declaration order.
pub const FIELD_NAMES: [&str; 12] = [
    "alpha",
    "tau_c",
    "eta",
    "p_ps_dbm",
    "zeta1_db",
    "zeta2_db",
    "rho_db",
    "m",
    "sigma_b_dbm",
    "sigma_r_dbm",
    "r_rate",
    "k_nodes",
];

/// User-settable scalars of the energy-harvesting RIS link.
///
/// Integer fields are signed so that out-of-range input survives parsing and
/// is reported by [`validate`] with the offending field name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParams {
    /// Fraction of the coherence interval spent harvesting, in (0, 1).
    pub alpha: f64,
    /// Coherence interval in seconds.
    pub tau_c: f64,
    /// RF-to-DC conversion efficiency, in (0, 1].
    pub eta: f64,
    /// Power-station transmit power.
    pub p_ps_dbm: f64,
    /// PS → user path gain.
    pub zeta1_db: f64,
    /// User → RIS → BS path gain.
    pub zeta2_db: f64,
    /// Per-element amplification as a power gain.
    pub rho_db: f64,
    /// Number of RIS elements.
    pub m: i64,
    /// Noise power at the base station.
    pub sigma_b_dbm: f64,
    /// Noise power injected by each active element before amplification.
    pub sigma_r_dbm: f64,
    /// Codeword rate in bit/s/Hz.
    pub r_rate: f64,
    /// Number of Chebyshev nodes used by the closed form.
    pub k_nodes: i64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            tau_c: 1.0,
            eta: 0.9,
            p_ps_dbm: 10.0,
            zeta1_db: 0.0,
            zeta2_db: 0.0,
            rho_db: 10.0,
            m: 100,
            sigma_b_dbm: 0.0,
            sigma_r_dbm: -80.0,
            r_rate: 1.4,
            k_nodes: 1000,
        }
    }
}

impl SystemParams {
    pub fn p_ps_mw(&self) -> f64 {
        dbm_to_mw_unchecked(self.p_ps_dbm)
    }

    pub fn zeta1(&self) -> f64 {
        db_to_linear(self.zeta1_db)
    }

    pub fn zeta2(&self) -> f64 {
        db_to_linear(self.zeta2_db)
    }

    /// Power gain ρ² of one active element.
    pub fn rho2(&self) -> f64 {
        db_to_linear(self.rho_db)
    }

    /// Amplitude gain ρ.
    pub fn rho_amp(&self) -> f64 {
        10f64.powf(self.rho_db / 20.0)
    }

    pub fn sigma_b_mw(&self) -> f64 {
        dbm_to_mw_unchecked(self.sigma_b_dbm)
    }

    pub fn sigma_r_mw(&self) -> f64 {
        dbm_to_mw_unchecked(self.sigma_r_dbm)
    }

    /// Element count as an index type. Negative counts map to zero; call
    /// [`validate`] first if that matters.
    pub fn elements(&self) -> usize {
        usize::try_from(self.m).unwrap_or(0)
    }

    /// Field value by name, widened to `f64`. Used by sweeps and reports.
    pub fn get(&self, field: &str) -> Option<f64> {
        Some(match field {
            "alpha" => self.alpha,
            "tau_c" => self.tau_c,
            "eta" => self.eta,
            "p_ps_dbm" => self.p_ps_dbm,
            "zeta1_db" => self.zeta1_db,
            "zeta2_db" => self.zeta2_db,
            "rho_db" => self.rho_db,
            "m" => self.m as f64,
            "sigma_b_dbm" => self.sigma_b_dbm,
            "sigma_r_dbm" => self.sigma_r_dbm,
            "r_rate" => self.r_rate,
            "k_nodes" => self.k_nodes as f64,
            _ => return None,
        })
    }

    /// Overwrite one field by name. Integer fields reject non-integral values.
    pub fn set(&mut self, field: &str, value: f64) -> Result<(), ParamError> {
        let as_int = |v: f64| -> Result<i64, ParamError> {
            if v.is_finite() && v.fract() == 0.0 && v.abs() < 9.0e15 {
                Ok(v as i64)
            } else {
                Err(ParamError::NotAnInteger {
                    field: field.to_string(),
                    value: v,
                })
            }
        };
        match field {
            "alpha" => self.alpha = value,
            "tau_c" => self.tau_c = value,
            "eta" => self.eta = value,
            "p_ps_dbm" => self.p_ps_dbm = value,
            "zeta1_db" => self.zeta1_db = value,
            "zeta2_db" => self.zeta2_db = value,
            "rho_db" => self.rho_db = value,
            "m" => self.m = as_int(value)?,
            "sigma_b_dbm" => self.sigma_b_dbm = value,
            "sigma_r_dbm" => self.sigma_r_dbm = value,
            "r_rate" => self.r_rate = value,
            "k_nodes" => self.k_nodes = as_int(value)?,
            _ => return Err(ParamError::UnknownField(field.to_string())),
        }
        Ok(())
    }
}

/// Constants forced by a validated [`SystemParams`]. All linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// P_e = ηα·P_ps/(1−α), mW.
    pub p_e_mw: f64,
    /// σ_T² = σ_b² + ρ²σ_R², mW.
    pub sigma_t2_mw: f64,
    /// P_e/σ_T².
    pub p_e: f64,
    /// Δ = 2^(r/(1−α)) − 1, the SNR needed to sustain rate r.
    pub delta_thr: f64,
    /// Shape of the gamma law fitted to the cascade sum.
    pub v_shape: f64,
    /// Scale of the gamma law fitted to the cascade sum.
    pub delta_scale: f64,
    /// T = Δ/(p_e ζ1 ζ2 ρ²); outage iff (|h1|·Σ|h2||h3|)² < T.
    pub threshold_t: f64,
    /// p_e ζ1 ζ2 ρ², the factor multiplying (|h1|·Σ|h2||h3|)² in the SNR.
    pub snr_gain: f64,
}

impl DerivedParams {
    /// No RIS elements: the cascade is empty and the SNR is identically zero.
    pub fn is_degenerate(&self) -> bool {
        self.v_shape == 0.0
    }

    /// Same link with a different SNR threshold Δ; T is rescaled to match.
    pub fn with_delta_thr(&self, delta_thr: f64) -> Self {
        Self {
            delta_thr,
            threshold_t: delta_thr / self.snr_gain,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Outcome of [`validate`]: empty means the parameters are usable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn fields(&self) -> Vec<&'static str> {
        self.violations.iter().map(|v| v.field).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("invalid parameters: {0}")]
    Invalid(ValidationReport),
    #[error("non-finite power level {0} dBm")]
    NonFinite(f64),
    #[error("unknown parameter `{0}`")]
    UnknownField(String),
    #[error("parameter `{field}` must be an integer, got {value}")]
    NotAnInteger { field: String, value: f64 },
}

/// dBm → mW.
pub fn dbm_to_mw(dbm: f64) -> Result<f64, ParamError> {
    if !dbm.is_finite() {
        return Err(ParamError::NonFinite(dbm));
    }
    Ok(dbm_to_mw_unchecked(dbm))
}

/// mW → dBm. Zero maps to −∞.
pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Power ratio in dB → linear.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn dbm_to_mw_unchecked(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Check every field invariant and collect all violations.
pub fn validate(params: &SystemParams) -> ValidationReport {
    let mut violations = Vec::new();
    let mut fail = |field: &'static str, message: String| {
        violations.push(Violation { field, message });
    };

    let p = params;
    if !(p.alpha > 0.0 && p.alpha < 1.0) {
        fail("alpha", format!("must lie in (0, 1), got {}", p.alpha));
    }
    if !(p.tau_c > 0.0 && p.tau_c.is_finite()) {
        fail(
            "tau_c",
            format!("must be positive and finite, got {}", p.tau_c),
        );
    }
    if !(p.eta > 0.0 && p.eta <= 1.0) {
        fail("eta", format!("must lie in (0, 1], got {}", p.eta));
    }
    for (field, value) in [
        ("p_ps_dbm", p.p_ps_dbm),
        ("zeta1_db", p.zeta1_db),
        ("zeta2_db", p.zeta2_db),
        ("rho_db", p.rho_db),
        ("sigma_b_dbm", p.sigma_b_dbm),
        ("sigma_r_dbm", p.sigma_r_dbm),
    ] {
        if !value.is_finite() {
            fail(field, format!("must be finite, got {value}"));
        }
    }
    if p.m < 0 {
        fail("m", format!("must be >= 0, got {}", p.m));
    }
    if !(p.r_rate >= 0.0 && p.r_rate.is_finite()) {
        fail(
            "r_rate",
            format!("must be >= 0 and finite, got {}", p.r_rate),
        );
    }
    if p.k_nodes < 1 {
        fail("k_nodes", format!("must be >= 1, got {}", p.k_nodes));
    }

    ValidationReport { violations }
}

/// Compute every derived constant. Fails if [`validate`] reports anything.
pub fn derive(params: &SystemParams) -> Result<DerivedParams, ParamError> {
    let report = validate(params);
    if !report.is_ok() {
        return Err(ParamError::Invalid(report));
    }

    let p_e_mw = params.eta * params.alpha * params.p_ps_mw() / (1.0 - params.alpha);
    let rho2 = params.rho2();
    let sigma_t2_mw = params.sigma_b_mw() + rho2 * params.sigma_r_mw();
    let p_e = p_e_mw / sigma_t2_mw;
    let delta_thr = (params.r_rate / (1.0 - params.alpha)).exp2() - 1.0;
    let v_shape = params.m as f64 * (PI / 4.0) / GAMMA_SCALE;
    let snr_gain = p_e * params.zeta1() * params.zeta2() * rho2;
    let threshold_t = delta_thr / snr_gain;

    Ok(DerivedParams {
        p_e_mw,
        sigma_t2_mw,
        p_e,
        delta_thr,
        v_shape,
        delta_scale: GAMMA_SCALE,
        threshold_t,
        snr_gain,
    })
}
