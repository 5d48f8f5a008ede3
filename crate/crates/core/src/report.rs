//! Serializers for command output.
//!
//! Numbers are printed with 12 significant digits, trailing zeros trimmed.
//! CSV tables have a fixed column order (see the `*_COLUMNS` constants);
//! JSON documents echo the full run configuration under `"config"`.

use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::model::{ChannelParams, Strategy};
use crate::region::{RegionEstimate, VertexSource};

pub const SIGNIFICANT_DIGITS: usize = 12;

pub const REGION_COLUMNS: &[&str] = &["r1", "r2", "kind"];

/// Formats `x` with [`SIGNIFICANT_DIGITS`] significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-3..15).contains(&magnitude) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - magnitude).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `x` rounded to the printed precision, for JSON output.
pub fn round_num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = fmt_num(x).parse().expect("formatted number parses");
    json!(rounded)
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Rows as JSON objects; cells that parse as numbers become numbers.
    pub fn to_json_rows(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (c, v) in self.columns.iter().zip(row) {
                    let value = match v.as_str() {
                        "true" => Value::Bool(true),
                        "false" => Value::Bool(false),
                        s => s.parse::<f64>().ok().filter(|x| x.is_finite()).map(|x| json!(x)).unwrap_or(json!(s)),
                    };
                    obj.insert(c.clone(), value);
                }
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

pub fn config_json(config: &RunConfig) -> Value {
    serde_json::to_value(config).expect("config serializes")
}

pub fn document(config: &RunConfig, results: Value) -> String {
    let mut s = serde_json::to_string_pretty(&json!({ "config": config_json(config), "results": results }))
        .expect("json document");
    s.push('\n');
    s
}

pub fn channel_cells(ch: &ChannelParams) -> Vec<String> {
    vec![fmt_num(ch.a()), fmt_num(ch.a_c()), fmt_num(ch.noise())]
}

pub fn strategy_cells(s: &Strategy) -> Vec<String> {
    s.to_array().iter().map(|&x| fmt_num(x)).collect()
}

fn source_str(source: VertexSource) -> &'static str {
    match source {
        VertexSource::Origin => "origin",
        VertexSource::AxisIntercept => "axis-intercept",
        VertexSource::Frontier => "frontier",
    }
}

/// `r1,r2,kind` rows: hull vertices first (counterclockwise), then frontier
/// samples by ascending `r1` when requested.
pub fn region_csv(region: &RegionEstimate, with_frontier: bool) -> String {
    let mut table = Table::new(REGION_COLUMNS);
    for v in &region.hull {
        table.push(vec![fmt_num(v.r1), fmt_num(v.r2), "hull".into()]);
    }
    if with_frontier {
        for f in &region.frontier {
            table.push(vec![fmt_num(f.rates.r1()), fmt_num(f.rates.r2()), "frontier".into()]);
        }
    }
    table.to_csv()
}

pub fn region_json(config: &RunConfig, region: &RegionEstimate) -> String {
    let p = &region.parameters;
    let hull: Vec<Value> = region
        .hull
        .iter()
        .map(|v| json!({ "r1": round_num(v.r1), "r2": round_num(v.r2), "source": source_str(v.source) }))
        .collect();
    let frontier: Vec<Value> = region
        .frontier
        .iter()
        .map(|f| {
            let [p1, p2, l1, l2] = f.strategy.to_array();
            json!({
                "r1": round_num(f.rates.r1()),
                "r2": round_num(f.rates.r2()),
                "r1_raw": round_num(f.rates.r1_raw()),
                "r2_raw": round_num(f.rates.r2_raw()),
                "p1": round_num(p1),
                "p2": round_num(p2),
                "lambda1": round_num(l1),
                "lambda2": round_num(l2),
            })
        })
        .collect();
    let results = json!({
        "with_artificial_noise": region.with_artificial_noise,
        "channel": { "a": p.channel.a(), "a_c": p.channel.a_c(), "n": p.channel.noise() },
        "power": p.power.peak(),
        "grid": p.grid,
        "hull": hull,
        "frontier": frontier,
    });
    document(config, results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(2.4627067506701583), "2.46270675067");
        assert_eq!(fmt_num(53.20612738511151), "53.2061273851");
        assert_eq!(fmt_num(100.0), "100");
        assert_eq!(fmt_num(0.05), "0.05");
        assert_eq!(fmt_num(-0.125), "-0.125");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0e-7), "1e-7");
        assert_eq!(fmt_num(1.234567890123456e20), "1.23456789012e20");
        assert_eq!(fmt_num(0.00123456789012345), "0.00123456789012");
        assert_eq!(fmt_num(2.00269083715e-5), "2.00269083715e-5");
    }

    #[test]
    fn rounding_parses_back() {
        assert_eq!(round_num(2.4627067506701583), json!(2.46270675067));
        assert_eq!(round_num(f64::NAN), Value::Null);
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new(&["x", "ok", "label"]);
        t.push(vec!["1.5".into(), "true".into(), "tie".into()]);
        assert_eq!(t.to_csv(), "x,ok,label\n1.5,true,tie\n");
        assert_eq!(t.to_json_rows(), json!([{ "x": 1.5, "ok": true, "label": "tie" }]));
    }
}
