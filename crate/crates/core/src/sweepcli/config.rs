//! JSON configuration documents.
//!
//! A document is a flat object whose keys are [`SystemParams`] field names,
//! plus two optional sections:
//!
//! ```json
//! {
//!   "m": 64, "rho_db": 10,
//!   "sweep": { "axis": "m", "values": [8, 16, 32], "engines": ["analytic", "mc"] },
//!   "mc": { "trials": 100000, "seed": 42, "workers": 8 }
//! }
//! ```
//!
//! Omitted parameters take their defaults.

use std::collections::BTreeSet;

use serde::Deserialize;
use serde_json::{Map, Value};

use super::{Engine, SweepAxis, SweepSpec};
use crate::montecarlo::McConfig;
use crate::params::{validate, SystemParams, ValidationReport, FIELD_NAMES};

const SWEEP_KEYS: [&str; 3] = ["axis", "values", "engines"];
const MC_KEYS: [&str; 3] = ["trials", "seed", "workers"];

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub params: SystemParams,
    pub sweep: Option<SweepSpec>,
    pub mc: Option<McConfig>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed JSON: {0}")]
    Malformed(#[source] serde_json::Error),
    #[error("configuration must be a JSON object")]
    NotAnObject,
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("invalid value in `{section}`: {source}")]
    InvalidValue {
        section: &'static str,
        #[source]
        source: serde_json::Error,
    },
    #[error("parameter constraints violated: {0}")]
    Invariant(ValidationReport),
}

#[derive(Deserialize)]
struct SweepSection {
    axis: SweepAxis,
    values: Vec<f64>,
    #[serde(default = "default_engines")]
    engines: BTreeSet<Engine>,
}

fn default_engines() -> BTreeSet<Engine> {
    BTreeSet::from([Engine::Analytic])
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], prefix: &str) -> Result<(), ConfigError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(ConfigError::UnknownKey(format!("{prefix}{k}"))),
        None => Ok(()),
    }
}

fn section<'a>(
    value: &'a Value,
    name: &'static str,
) -> Result<&'a Map<String, Value>, ConfigError> {
    value.as_object().ok_or_else(|| ConfigError::InvalidValue {
        section: name,
        source: serde::de::Error::custom(format!("`{name}` must be an object")),
    })
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let doc: Value = serde_json::from_str(text).map_err(ConfigError::Malformed)?;
    let Value::Object(mut obj) = doc else {
        return Err(ConfigError::NotAnObject);
    };

    let sweep_raw = obj.remove("sweep");
    let mc_raw = obj.remove("mc");
    check_keys(&obj, &FIELD_NAMES, "")?;
    if let Some(s) = &sweep_raw {
        check_keys(section(s, "sweep")?, &SWEEP_KEYS, "sweep.")?;
    }
    if let Some(m) = &mc_raw {
        check_keys(section(m, "mc")?, &MC_KEYS, "mc.")?;
    }

    let params: SystemParams =
        serde_json::from_value(Value::Object(obj)).map_err(|source| ConfigError::InvalidValue {
            section: "parameters",
            source,
        })?;
    let report = validate(&params);
    if !report.is_ok() {
        return Err(ConfigError::Invariant(report));
    }

    let mc = mc_raw
        .map(serde_json::from_value::<McConfig>)
        .transpose()
        .map_err(|source| ConfigError::InvalidValue {
            section: "mc",
            source,
        })?;

    let sweep = sweep_raw
        .map(serde_json::from_value::<SweepSection>)
        .transpose()
        .map_err(|source| ConfigError::InvalidValue {
            section: "sweep",
            source,
        })?
        .map(|s| SweepSpec {
            axis: s.axis,
            values: s.values,
            fixed: params,
            engines: s.engines,
            mc,
        });

    Ok(Config { params, sweep, mc })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_parameter_set() {
        let text = r#"{"alpha":0.5,"eta":0.9,"p_ps_dbm":10,"r_rate":1.4,"m":100,
            "sigma_b_dbm":0,"sigma_r_dbm":-80,"rho_db":10,"tau_c":1}"#;
        let c = parse_config(text).unwrap();
        assert_eq!(c.params.m, 100);
        assert_eq!(c.params.sigma_r_dbm, -80.0);
        assert!(c.sweep.is_none() && c.mc.is_none());
    }

    #[test]
    fn empty_document_gives_defaults() {
        let c = parse_config("{}").unwrap();
        assert_eq!(c.params, SystemParams::default());
        assert_eq!(c.params.zeta1_db, 0.0);
        assert_eq!(c.params.zeta2_db, 0.0);
        assert_eq!(c.params.k_nodes, 1000);
    }

    #[test]
    fn distinct_diagnostics() {
        assert!(matches!(parse_config("{"), Err(ConfigError::Malformed(_))));
        assert!(matches!(parse_config("[1]"), Err(ConfigError::NotAnObject)));
        match parse_config(r#"{"alpha":0.5,"gain":3}"#) {
            Err(ConfigError::UnknownKey(k)) => assert_eq!(k, "gain"),
            other => panic!("{other:?}"),
        }
        match parse_config(r#"{"alpha":1.5}"#) {
            Err(ConfigError::Invariant(r)) => assert_eq!(r.fields(), vec!["alpha"]),
            other => panic!("{other:?}"),
        }
        match parse_config(r#"{"m":-1}"#) {
            Err(ConfigError::Invariant(r)) => assert_eq!(r.fields(), vec!["m"]),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_config(r#"{"m":"many"}"#),
            Err(ConfigError::InvalidValue { .. })
        ));
        match parse_config(r#"{"mc":{"trials":10,"threads":2}}"#) {
            Err(ConfigError::UnknownKey(k)) => assert_eq!(k, "mc.threads"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sections() {
        let c = parse_config(
            r#"{"rho_db":0,"sweep":{"axis":"m","values":[1,2,3],"engines":["analytic","mc"]},
                "mc":{"trials":500,"seed":7}}"#,
        )
        .unwrap();
        let s = c.sweep.unwrap();
        assert_eq!(s.axis, SweepAxis::M);
        assert_eq!(s.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(s.fixed.rho_db, 0.0);
        assert!(s.engines.contains(&Engine::Mc));
        let mc = c.mc.unwrap();
        assert_eq!((mc.trials, mc.seed), (500, 7));
        assert_eq!(s.mc, Some(mc));
    }
}
