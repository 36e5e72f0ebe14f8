//! CSV and JSON renderings of analysis results.
//!
//! CSV column orders are fixed:
//!
//! | artifact | columns            |
//! |----------|--------------------|
//! | curve    | `m,std_db`         |
//! | delta    | `m,delta_db`       |
//! | cdf      | `x_db,F`           |
//! | map      | `port,gain_db`     |
//! | surface  | `m,P=<p>...`       |
//!
//! Ports are 1-based. A `-inf` value is an empty CSV field and `null` in JSON.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{EmpiricalCdf, GainMap};
use crate::error::{Error, Result};
use crate::gain::HardeningCurve;
use crate::theory::Count;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidArgument(format!("unknown format '{other}'"))),
        }
    }
}

/// A value as a CSV field: shortest round-trip decimal, empty if not finite.
pub fn csv_field(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

pub fn json_number(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn json_numbers(values: &[f64]) -> Value {
    Value::Array(values.iter().map(|&v| json_number(v)).collect())
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

fn two_columns(header: &str, rows: impl Iterator<Item = (String, f64)>) -> String {
    let mut out = format!("{header}\n");
    for (key, v) in rows {
        writeln!(out, "{key},{}", csv_field(v)).unwrap();
    }
    out
}

pub fn render_curve(curve: &HardeningCurve, format: Format) -> String {
    match format {
        Format::Csv => two_columns(
            "m,std_db",
            curve
                .std_db
                .iter()
                .enumerate()
                .map(|(i, &v)| ((i + 1).to_string(), v)),
        ),
        Format::Json => to_json_string(curve),
    }
}

/// `deltas[i]` is the step from size i+1 to size i+2.
pub fn render_delta(deltas: &[f64], format: Format) -> String {
    match format {
        Format::Csv => two_columns(
            "m,delta_db",
            deltas
                .iter()
                .enumerate()
                .map(|(i, &v)| ((i + 2).to_string(), v)),
        ),
        Format::Json => to_json_string(&json!({
            "m": (2..deltas.len() + 2).collect::<Vec<_>>(),
            "delta_db": json_numbers(deltas),
        })),
    }
}

pub fn render_cdf(cdf: &EmpiricalCdf, format: Format) -> String {
    let steps = cdf.steps();
    match format {
        Format::Csv => {
            let mut out = String::from("x_db,F\n");
            for (x, f) in steps {
                writeln!(out, "{},{}", csv_field(x), f).unwrap();
            }
            out
        }
        Format::Json => to_json_string(&json!({
            "x_db": json_numbers(&steps.iter().map(|s| s.0).collect::<Vec<_>>()),
            "F": steps.iter().map(|s| s.1).collect::<Vec<_>>(),
        })),
    }
}

pub fn render_map(map: &GainMap, format: Format) -> String {
    match format {
        Format::Csv => two_columns(
            "port,gain_db",
            map.gain_db
                .iter()
                .enumerate()
                .map(|(i, &v)| ((i + 1).to_string(), v)),
        ),
        Format::Json => to_json_string(&json!({
            "port": (1..=map.gain_db.len()).collect::<Vec<_>>(),
            "gain_db": json_numbers(&map.gain_db),
            "median_port": map.median_port + 1,
        })),
    }
}

/// Rows follow `antennas`, columns follow `paths`.
pub fn render_surface(
    antennas: &[Count],
    paths: &[Count],
    values: &[Vec<f64>],
    format: Format,
) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("m");
            for p in paths {
                write!(out, ",P={p}").unwrap();
            }
            out.push('\n');
            for (m, row) in antennas.iter().zip(values) {
                out.push_str(&m.to_string());
                for &v in row {
                    write!(out, ",{}", csv_field(v)).unwrap();
                }
                out.push('\n');
            }
            out
        }
        Format::Json => to_json_string(&json!({
            "m": antennas,
            "p": paths,
            "std_db": values.iter().map(|r| json_numbers(r)).collect::<Vec<_>>(),
        })),
    }
}

/// Header labels and `(m, row)` pairs of a surface table.
pub type SurfaceTable = (Vec<String>, Vec<(String, Vec<f64>)>);

/// Parses a surface CSV written by [`render_surface`] back into its header
/// labels and rows; empty fields become `-inf`.
pub fn parse_surface_csv(text: &str) -> Result<SurfaceTable> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::InvalidArgument("empty surface".into()))?
        .split(',')
        .skip(1)
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|line| {
            let mut fields = line.split(',');
            let m = fields.next().unwrap_or_default().to_string();
            let values = fields
                .map(|f| {
                    if f.is_empty() {
                        Ok(f64::NEG_INFINITY)
                    } else {
                        f.parse::<f64>()
                            .map_err(|e| Error::InvalidArgument(format!("bad field '{f}': {e}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((m, values))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::OrderLabel;

    fn curve() -> HardeningCurve {
        HardeningCurve::from_std_db(
            OrderLabel::Original,
            vec![0.5, f64::NEG_INFINITY],
            vec![0, 1],
        )
        .unwrap()
    }

    #[test]
    fn curve_csv_uses_empty_field_for_neg_inf() {
        assert_eq!(render_curve(&curve(), Format::Csv), "m,std_db\n1,0.5\n2,\n");
    }

    #[test]
    fn curve_json_uses_null() {
        let v: Value = serde_json::from_str(&render_curve(&curve(), Format::Json)).unwrap();
        assert_eq!(v["std_db"], json!([0.5, null]));
        assert_eq!(v["order"], "original");
        assert_eq!(v["hardening_db"], Value::Null);
    }

    #[test]
    fn csv_values_roundtrip_exactly() {
        let x = -10.514_999_682_338_12_f64;
        assert_eq!(csv_field(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn surface_roundtrip() {
        let m = [Count::Finite(1), Count::Finite(2)];
        let p = [Count::Finite(3), Count::Infinite];
        let v = vec![vec![0.0, 0.0], vec![-1.25, f64::NEG_INFINITY]];
        let text = render_surface(&m, &p, &v, Format::Csv);
        assert!(text.starts_with("m,P=3,P=inf\n1,0,0\n"));
        let (header, rows) = parse_surface_csv(&text).unwrap();
        assert_eq!(header, vec!["P=3", "P=inf"]);
        assert_eq!(rows[1].1, v[1]);
    }

    #[test]
    fn map_and_cdf_headers() {
        let map = GainMap {
            gain_db: vec![0.0, 3.0],
            median_port: 0,
        };
        assert_eq!(render_map(&map, Format::Csv), "port,gain_db\n1,0\n2,3\n");
        let cdf = EmpiricalCdf::from_linear(&[1.0, 10.0]).unwrap();
        assert_eq!(render_cdf(&cdf, Format::Csv), "x_db,F\n0,0.5\n10,1\n");
        assert_eq!(render_delta(&[-1.0], Format::Csv), "m,delta_db\n2,-1\n");
    }
}
