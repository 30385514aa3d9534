//! Sweep output rows and their CSV / JSON encodings.
//!
//! Probabilities and standard errors are written with 10 significant digits;
//! parameters use the shortest representation that reads back exactly.

use std::io::Write;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::params::SystemParams;

pub const CSV_HEADER: &str = "m,rho_db,p_ps_dbm,alpha,eta,tau_c,r_rate,zeta1_db,zeta2_db,\
sigma_b_dbm,sigma_r_dbm,k_nodes,p_out_analytic,p_raw,p_out_mc,mc_stderr,trials,seed";

const PARAM_COLUMNS: [&str; 12] = [
    "m",
    "rho_db",
    "p_ps_dbm",
    "alpha",
    "eta",
    "tau_c",
    "r_rate",
    "zeta1_db",
    "zeta2_db",
    "sigma_b_dbm",
    "sigma_r_dbm",
    "k_nodes",
];

/// One evaluated sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub params: SystemParams,
    pub p_out_analytic: Option<f64>,
    pub p_raw: Option<f64>,
    pub p_out_mc: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    /// Why this point produced no result. Not part of the CSV schema.
    pub error: Option<String>,
}

impl SweepRecord {
    pub fn new(params: SystemParams) -> Self {
        Self {
            params,
            p_out_analytic: None,
            p_raw: None,
            p_out_mc: None,
            mc_stderr: None,
            trials: None,
            seed: None,
            error: None,
        }
    }

    /// Copy with every probability rounded to the precision it is written at.
    pub fn rounded(&self) -> Self {
        let r = |x: Option<f64>| x.map(round_sig10);
        Self {
            p_out_analytic: r(self.p_out_analytic),
            p_raw: r(self.p_raw),
            p_out_mc: r(self.p_out_mc),
            mc_stderr: r(self.mc_stderr),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RecordsError {
    #[error("no records to write")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("CSV header does not match the record schema")]
    Header,
    #[error("row {row}: bad `{column}` value `{value}`")]
    Field {
        row: usize,
        column: &'static str,
        value: String,
    },
}

fn fmt_sig10(x: f64) -> String {
    format!("{x:.9e}")
}

fn round_sig10(x: f64) -> f64 {
    fmt_sig10(x).parse().unwrap_or(x)
}

fn param_strings(p: &SystemParams) -> [String; 12] {
    [
        p.m.to_string(),
        p.rho_db.to_string(),
        p.p_ps_dbm.to_string(),
        p.alpha.to_string(),
        p.eta.to_string(),
        p.tau_c.to_string(),
        p.r_rate.to_string(),
        p.zeta1_db.to_string(),
        p.zeta2_db.to_string(),
        p.sigma_b_dbm.to_string(),
        p.sigma_r_dbm.to_string(),
        p.k_nodes.to_string(),
    ]
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

/// Serialise `records` to `out`.
pub fn write_records<W: Write>(
    records: &[SweepRecord],
    format: Format,
    out: &mut W,
) -> Result<(), RecordsError> {
    if records.is_empty() {
        return Err(RecordsError::Empty);
    }
    match format {
        Format::Csv => write_csv(records, out),
        Format::Json => write_json(records, out),
    }
}

fn write_csv<W: Write>(records: &[SweepRecord], out: &mut W) -> Result<(), RecordsError> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let mut row: Vec<String> = param_strings(&r.params).into();
        row.push(opt(r.p_out_analytic, fmt_sig10));
        row.push(opt(r.p_raw, fmt_sig10));
        row.push(opt(r.p_out_mc, fmt_sig10));
        row.push(opt(r.mc_stderr, fmt_sig10));
        row.push(opt(r.trials, |t| t.to_string()));
        row.push(opt(r.seed, |s| s.to_string()));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

fn json_f64(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn json_prob(x: Option<f64>) -> Value {
    x.map_or(Value::Null, |v| json_f64(round_sig10(v)))
}

fn write_json<W: Write>(records: &[SweepRecord], out: &mut W) -> Result<(), RecordsError> {
    let rows: Vec<Value> = records
        .iter()
        .map(|r| {
            let p = &r.params;
            let mut obj = Map::new();
            for col in PARAM_COLUMNS {
                let v = match col {
                    "m" => Value::from(p.m),
                    "k_nodes" => Value::from(p.k_nodes),
                    _ => json_f64(p.get(col).expect("known column")),
                };
                obj.insert(col.into(), v);
            }
            obj.insert("p_out_analytic".into(), json_prob(r.p_out_analytic));
            obj.insert("p_raw".into(), json_prob(r.p_raw));
            obj.insert("p_out_mc".into(), json_prob(r.p_out_mc));
            obj.insert("mc_stderr".into(), json_prob(r.mc_stderr));
            obj.insert("trials".into(), r.trials.map_or(Value::Null, Value::from));
            obj.insert("seed".into(), r.seed.map_or(Value::Null, Value::from));
            if let Some(e) = &r.error {
                obj.insert("error".into(), Value::from(e.as_str()));
            }
            Value::Object(obj)
        })
        .collect();
    serde_json::to_writer_pretty(&mut *out, &rows)?;
    writeln!(out)?;
    Ok(())
}

/// Parse records previously produced by [`write_records`].
pub fn read_records(text: &str, format: Format) -> Result<Vec<SweepRecord>, RecordsError> {
    match format {
        Format::Csv => read_csv(text),
        Format::Json => read_json(text),
    }
}

fn parse_cell<T: FromStr>(
    row: usize,
    column: &'static str,
    cell: &str,
) -> Result<Option<T>, RecordsError> {
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse().map(Some).map_err(|_| RecordsError::Field {
        row,
        column,
        value: cell.to_string(),
    })
}

fn required<T: FromStr>(row: usize, column: &'static str, cell: &str) -> Result<T, RecordsError> {
    parse_cell(row, column, cell)?.ok_or_else(|| RecordsError::Field {
        row,
        column,
        value: String::new(),
    })
}

fn read_csv(text: &str) -> Result<Vec<SweepRecord>, RecordsError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(RecordsError::Header);
    }

    let mut out = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec?;
        let cell = |i: usize| rec.get(i).unwrap_or("");
        let mut params = SystemParams {
            m: required(row, "m", cell(0))?,
            k_nodes: required(row, "k_nodes", cell(11))?,
            ..Default::default()
        };
        for (i, col) in PARAM_COLUMNS.iter().enumerate().skip(1).take(10) {
            let v: f64 = required(row, col, cell(i))?;
            params.set(col, v).map_err(|_| RecordsError::Field {
                row,
                column: col,
                value: cell(i).to_string(),
            })?;
        }
        out.push(SweepRecord {
            params,
            p_out_analytic: parse_cell(row, "p_out_analytic", cell(12))?,
            p_raw: parse_cell(row, "p_raw", cell(13))?,
            p_out_mc: parse_cell(row, "p_out_mc", cell(14))?,
            mc_stderr: parse_cell(row, "mc_stderr", cell(15))?,
            trials: parse_cell(row, "trials", cell(16))?,
            seed: parse_cell(row, "seed", cell(17))?,
            error: None,
        });
    }
    Ok(out)
}

fn read_json(text: &str) -> Result<Vec<SweepRecord>, RecordsError> {
    let rows: Vec<Map<String, Value>> = serde_json::from_str(text)?;
    rows.into_iter()
        .enumerate()
        .map(|(row, obj)| {
            let bad = |column: &'static str| RecordsError::Field {
                row,
                column,
                value: obj.get(column).map(|v| v.to_string()).unwrap_or_default(),
            };
            let mut params = SystemParams::default();
            for col in PARAM_COLUMNS {
                let v = obj
                    .get(col)
                    .and_then(Value::as_f64)
                    .ok_or_else(|| bad(col))?;
                params.set(col, v).map_err(|_| bad(col))?;
            }
            let f = |col: &'static str| -> Result<Option<f64>, RecordsError> {
                match obj.get(col) {
                    None | Some(Value::Null) => Ok(None),
                    Some(v) => v.as_f64().map(Some).ok_or_else(|| bad(col)),
                }
            };
            let u = |col: &'static str| -> Result<Option<u64>, RecordsError> {
                match obj.get(col) {
                    None | Some(Value::Null) => Ok(None),
                    Some(v) => v.as_u64().map(Some).ok_or_else(|| bad(col)),
                }
            };
            Ok(SweepRecord {
                params,
                p_out_analytic: f("p_out_analytic")?,
                p_raw: f("p_raw")?,
                p_out_mc: f("p_out_mc")?,
                mc_stderr: f("mc_stderr")?,
                trials: u("trials")?,
                seed: u("seed")?,
                error: obj.get("error").and_then(Value::as_str).map(str::to_string),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analytic_only() -> SweepRecord {
        SweepRecord {
            p_out_analytic: Some(0.012_345_678_912_345),
            p_raw: Some(0.012_345_678_912_345),
            ..SweepRecord::new(SystemParams::default())
        }
    }

    #[test]
    fn header_is_exact() {
        assert_eq!(
            CSV_HEADER,
            "m,rho_db,p_ps_dbm,alpha,eta,tau_c,r_rate,zeta1_db,zeta2_db,sigma_b_dbm,\
             sigma_r_dbm,k_nodes,p_out_analytic,p_raw,p_out_mc,mc_stderr,trials,seed"
        );
        assert_eq!(CSV_HEADER.split(',').count(), 18);
    }

    #[test]
    fn analytic_only_row_has_empty_mc_columns() {
        let mut buf = Vec::new();
        write_records(&[analytic_only()], Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(
            lines[1],
            "100,10,10,0.5,0.9,1,1.4,0,0,0,-80,1000,1.234567891e-2,1.234567891e-2,,,,"
        );
    }

    #[test]
    fn empty_input_rejected() {
        let mut buf = Vec::new();
        assert!(matches!(
            write_records(&[], Format::Csv, &mut buf),
            Err(RecordsError::Empty)
        ));
    }

    #[test]
    fn both_formats_read_back() {
        let mut full = analytic_only();
        full.p_out_mc = Some(0.0125);
        full.mc_stderr = Some(3.5e-4);
        full.trials = Some(100_000);
        full.seed = Some(u64::MAX);
        let records = vec![analytic_only(), full];
        for format in [Format::Csv, Format::Json] {
            let mut buf = Vec::new();
            write_records(&records, format, &mut buf).unwrap();
            let back = read_records(std::str::from_utf8(&buf).unwrap(), format).unwrap();
            let expected: Vec<_> = records.iter().map(SweepRecord::rounded).collect();
            assert_eq!(back, expected, "{format:?}");
        }
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(matches!(
            read_records("m,rho\n1,2\n", Format::Csv),
            Err(RecordsError::Header)
        ));
    }
}
