//! Fixed numeric formatting for CSV, JSON and key-value outputs.
//!
//! Every number is written with at most 9 significant digits in the manner
//! of C's `%.9g`: positional notation for decimal exponents in `[-5, 9)`,
//! scientific otherwise, trailing zeros removed. Re-parsing and re-formatting
//! a written value reproduces it exactly.

use crate::error::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 9;

pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if !(-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

/// Rounds to the value that [`fmt_num`] would print.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_num(x).parse().expect("formatted number parses")
    } else {
        x
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A table cell. Numbers are written with [`fmt_num`].
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(t) => t.clone(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Num(x) if x.is_finite() => {
                // the rendered digits, so that JSON and CSV carry the same value
                let v: serde_json::Number = fmt_num(*x).parse().expect("finite number parses");
                serde_json::Value::Number(v)
            }
            Cell::Num(x) => serde_json::Value::String(fmt_num(*x)),
            Cell::Int(i) => serde_json::Value::from(*i),
            Cell::Text(t) => serde_json::Value::String(t.clone()),
        }
    }

    fn from_json(v: &serde_json::Value) -> Result<Cell> {
        match v {
            serde_json::Value::Number(n) => Ok(match n.as_i64() {
                Some(i) if !n.to_string().contains(['.', 'e', 'E']) => Cell::Int(i),
                _ => Cell::Num(n.as_f64().ok_or_else(|| Error::domain("bad JSON number"))?),
            }),
            serde_json::Value::String(s) => Ok(Cell::Text(s.clone())),
            other => Err(Error::domain(format!("unsupported JSON cell {other}"))),
        }
    }

    fn from_csv_field(s: &str) -> Cell {
        if let Ok(i) = s.parse::<i64>() {
            return Cell::Int(i);
        }
        match s.parse::<f64>() {
            Ok(x) if x.is_finite() && fmt_num(x) == s => Cell::Num(x),
            _ => Cell::Text(s.to_string()),
        }
    }
}

/// Column-named rows, written as CSV (header line, then records) or as a
/// JSON array of objects.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::to_json))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("table serialises");
        s.push('\n');
        s
    }

    pub fn from_csv(text: &str) -> Result<Table> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let columns = rdr.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            rows.push(rec?.iter().map(Cell::from_csv_field).collect());
        }
        Ok(Table { columns, rows })
    }

    /// Inverse of [`Table::to_json`]; `columns` fixes the column order.
    pub fn from_json(text: &str, columns: &[&str]) -> Result<Table> {
        let v: Vec<serde_json::Map<String, serde_json::Value>> =
            serde_json::from_str(text).map_err(|e| Error::domain(e.to_string()))?;
        let mut t = Table::new(columns.iter().copied());
        for obj in v {
            let row = columns
                .iter()
                .map(|c| {
                    obj.get(*c)
                        .ok_or_else(|| Error::domain(format!("missing column {c}")))
                        .and_then(Cell::from_json)
                })
                .collect::<Result<Vec<_>>>()?;
            t.push(row);
        }
        Ok(t)
    }
}

/// `key=value` lines in insertion order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KeyValues(pub Vec<(String, Cell)>);

impl KeyValues {
    pub fn push(&mut self, key: &str, value: Cell) {
        self.0.push((key.to_string(), value));
    }

    pub fn to_text(&self) -> String {
        self.0
            .iter()
            .map(|(k, v)| format!("{k}={}\n", v.render()))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let obj: serde_json::Map<String, serde_json::Value> = self
            .0
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        let mut s = serde_json::to_string_pretty(&obj).expect("summary serialises");
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<KeyValues> {
        let mut kv = KeyValues::default();
        for (i, line) in text.lines().enumerate() {
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i as u64 + 1,
                message: "expected key=value".into(),
            })?;
            kv.push(k, Cell::from_csv_field(v));
        }
        Ok(kv)
    }

    pub fn get(&self, key: &str) -> Option<&Cell> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(fmt_num(0.3989422804014327), "0.39894228");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-100.0), "-100");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(123456789.4), "123456789");
        assert_eq!(fmt_num(1234567890.0), "1.23456789e9");
        assert_eq!(fmt_num(0.000012345), "0.000012345");
        assert_eq!(fmt_num(0.0000012345), "1.2345e-6");
        assert_eq!(fmt_num(0.353553390593), "0.353553391");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(9.9999999999), "10");
    }

    #[test]
    fn table_round_trips() {
        let mut t = Table::new(["timestamp", "x", "n", "flag"]);
        t.push(vec![
            Cell::Text("2020-01-02".into()),
            Cell::Num(0.1 / 3.0),
            Cell::Int(4),
            Cell::Text("no".into()),
        ]);
        t.push(vec![
            Cell::Text("2020-01-03".into()),
            Cell::Num(-1e-9),
            Cell::Int(-1),
            Cell::Text("yes".into()),
        ]);
        let csv = t.to_csv();
        assert_eq!(Table::from_csv(&csv).unwrap().to_csv(), csv);
        let json = t.to_json();
        let cols = ["timestamp", "x", "n", "flag"];
        assert_eq!(Table::from_json(&json, &cols).unwrap().to_json(), json);
        assert!(csv.starts_with("timestamp,x,n,flag\n2020-01-02,0.0333333333,4,no\n"));
    }

    #[test]
    fn key_values_round_trip() {
        let mut kv = KeyValues::default();
        kv.push("total_pnl", Cell::Num(1.0 / 7.0));
        kv.push("trades", Cell::Int(12));
        let text = kv.to_text();
        assert_eq!(text, "total_pnl=0.142857143\ntrades=12\n");
        assert_eq!(KeyValues::from_text(&text).unwrap().to_text(), text);
        assert!(KeyValues::from_text("oops").is_err());
    }

    proptest! {
        #[test]
        fn reformat_is_stable(x in proptest::num::f64::NORMAL) {
            let once = fmt_num(x);
            let back: f64 = once.parse().unwrap();
            prop_assert_eq!(fmt_num(back), once);
        }

        #[test]
        fn keeps_nine_digits(x in -1e6..1e6f64) {
            let back: f64 = fmt_num(x).parse().unwrap();
            prop_assert!((back - x).abs() <= 5e-9 * x.abs().max(1e-300) + 1e-300);
        }
    }
}
