use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use crate::error::{Error, Result};
use crate::format::{Cell, Table};

/// Ordering key of a timestamp.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TimeKey {
    Index(i64),
    /// UTC-normalised instant.
    Instant(NaiveDateTime),
}

/// A timestamp as written in the input, with its ordering key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Timestamp {
    pub raw: String,
    pub key: TimeKey,
}

impl Timestamp {
    pub fn index(i: i64) -> Self {
        Timestamp {
            raw: i.to_string(),
            key: TimeKey::Index(i),
        }
    }

    /// Accepts integer indices, RFC 3339 date-times, naive ISO-8601
    /// date-times and plain dates.
    pub fn parse(raw: &str) -> Option<Self> {
        let raw = raw.trim();
        let key = if let Ok(i) = raw.parse::<i64>() {
            TimeKey::Index(i)
        } else if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
            TimeKey::Instant(dt.naive_utc())
        } else if let Some(dt) = [
            "%Y-%m-%dT%H:%M:%S%.f",
            "%Y-%m-%d %H:%M:%S%.f",
            "%Y-%m-%dT%H:%M",
        ]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(raw, f).ok())
        {
            TimeKey::Instant(dt)
        } else if let Ok(d) = NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
            TimeKey::Instant(d.and_hms_opt(0, 0, 0)?)
        } else {
            return None;
        };
        Some(Timestamp {
            raw: raw.to_string(),
            key,
        })
    }
}

/// Realized per-period simple returns, optionally with the trader's
/// conditional mean `alpha[t]` and standard deviation `s[t]` of `r_{t+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnSeries {
    timestamps: Vec<Timestamp>,
    returns: Vec<f64>,
    moments: Option<(Vec<f64>, Vec<f64>)>,
}

impl ReturnSeries {
    pub fn new(
        timestamps: Vec<Timestamp>,
        returns: Vec<f64>,
        moments: Option<(Vec<f64>, Vec<f64>)>,
    ) -> Result<Self> {
        if timestamps.len() != returns.len() {
            return Err(Error::domain("timestamps and returns differ in length"));
        }
        for (i, w) in timestamps.windows(2).enumerate() {
            let same_kind = matches!(
                (w[0].key, w[1].key),
                (TimeKey::Index(_), TimeKey::Index(_)) | (TimeKey::Instant(_), TimeKey::Instant(_))
            );
            if !same_kind {
                return Err(Error::domain(format!(
                    "row {}: mixed timestamp kinds",
                    i + 1
                )));
            }
            if w[1].key <= w[0].key {
                return Err(Error::domain(format!(
                    "timestamps must be strictly increasing: {} then {}",
                    w[0].raw, w[1].raw
                )));
            }
        }
        if let Some(i) = returns.iter().position(|r| !r.is_finite()) {
            return Err(Error::domain(format!("row {i}: return is not finite")));
        }
        if let Some((alpha, s)) = &moments {
            if alpha.len() != returns.len() || s.len() != returns.len() {
                return Err(Error::domain(
                    "moment columns differ in length from returns",
                ));
            }
            if let Some(i) = alpha.iter().position(|a| !a.is_finite()) {
                return Err(Error::domain(format!("row {i}: alpha is not finite")));
            }
            if let Some(i) = s.iter().position(|s| !(*s > 0.0 && s.is_finite())) {
                return Err(Error::domain(format!("row {i}: s must be positive")));
            }
        }
        Ok(ReturnSeries {
            timestamps,
            returns,
            moments,
        })
    }

    /// Series indexed `0, 1, 2, ...`.
    pub fn from_returns(returns: Vec<f64>) -> Result<Self> {
        let ts = (0..returns.len() as i64).map(Timestamp::index).collect();
        ReturnSeries::new(ts, returns, None)
    }

    pub fn with_moments(self, alpha: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        ReturnSeries::new(self.timestamps, self.returns, Some((alpha, s)))
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    pub fn timestamps(&self) -> &[Timestamp] {
        &self.timestamps
    }

    pub fn returns(&self) -> &[f64] {
        &self.returns
    }

    pub fn supplied_moments(&self) -> Option<(&[f64], &[f64])> {
        self.moments
            .as_ref()
            .map(|(a, s)| (a.as_slice(), s.as_slice()))
    }

    /// Same timestamps with every return (and supplied moment) mapped.
    pub fn map_returns(&self, f: impl Fn(f64) -> f64, scale_s: f64) -> Result<Self> {
        let returns = self.returns.iter().map(|&r| f(r)).collect();
        let moments = self.moments.as_ref().map(|(a, s)| {
            (
                a.iter().map(|&x| f(x)).collect(),
                s.iter().map(|&x| x * scale_s).collect(),
            )
        });
        ReturnSeries::new(self.timestamps.clone(), returns, moments)
    }

    pub fn to_table(&self) -> Table {
        let mut t = match self.moments {
            Some(_) => Table::new(["timestamp", "return", "alpha", "s"]),
            None => Table::new(["timestamp", "return"]),
        };
        for (i, ts) in self.timestamps.iter().enumerate() {
            let mut row = vec![Cell::Text(ts.raw.clone()), Cell::Num(self.returns[i])];
            if let Some((a, s)) = &self.moments {
                row.push(Cell::Num(a[i]));
                row.push(Cell::Num(s[i]));
            }
            t.push(row);
        }
        t
    }
}

/// Writes the series as CSV `timestamp,return[,alpha,s]`.
pub fn write_series(series: &ReturnSeries) -> String {
    series.to_table().to_csv()
}

pub fn read_series_file(path: &Path) -> Result<ReturnSeries> {
    let f = std::fs::File::open(path)?;
    read_series(f)
}

/// Reads CSV with header `timestamp,return` or `timestamp,return,alpha,s`.
/// Errors name the offending line (the header is line 1).
pub fn read_series<R: Read>(input: R) -> Result<ReturnSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let with_moments = match header
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .as_slice()
    {
        ["timestamp", "return"] => false,
        ["timestamp", "return", "alpha", "s"] => true,
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!(
                    "expected header timestamp,return[,alpha,s], found {}",
                    header.join(",")
                ),
            })
        }
    };
    let width = header.len();

    let mut timestamps = Vec::new();
    let mut returns = Vec::new();
    let mut alpha = Vec::new();
    let mut s = Vec::new();
    let mut last: Option<TimeKey> = None;
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |message: String| Error::Parse { line, message };
        if rec.len() != width {
            return Err(bad(format!("expected {width} fields, found {}", rec.len())));
        }
        let ts = Timestamp::parse(&rec[0])
            .ok_or_else(|| bad(format!("invalid timestamp {:?}", &rec[0])))?;
        if let Some(prev) = last {
            let same_kind = matches!(
                (prev, ts.key),
                (TimeKey::Index(_), TimeKey::Index(_)) | (TimeKey::Instant(_), TimeKey::Instant(_))
            );
            if !same_kind {
                return Err(bad("timestamp kind differs from previous rows".into()));
            }
            if ts.key <= prev {
                return Err(bad(format!(
                    "timestamp {} is not after the previous row",
                    ts.raw
                )));
            }
        }
        last = Some(ts.key);
        let num = |i: usize, name: &str| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(format!("invalid {name} {:?}", &rec[i])))
        };
        returns.push(num(1, "return")?);
        if with_moments {
            alpha.push(num(2, "alpha")?);
            let sv = num(3, "s")?;
            if sv <= 0.0 {
                return Err(bad(format!("s must be positive, found {sv}")));
            }
            s.push(sv);
        }
        timestamps.push(ts);
    }
    ReturnSeries::new(timestamps, returns, with_moments.then_some((alpha, s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_plain_and_moment_files() {
        let s = read_series("timestamp,return\n0,0.01\n1,-0.02\n2,0.005\n".as_bytes()).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.returns(), &[0.01, -0.02, 0.005]);
        assert!(s.supplied_moments().is_none());

        let text = "timestamp,return,alpha,s\n2020-01-02,0.01,0.001,0.02\n2020-01-03T00:00:00Z,0.02,0.0,0.01\n";
        let s = read_series(text.as_bytes()).unwrap();
        assert_eq!(s.supplied_moments().unwrap().1, &[0.02, 0.01]);
        assert_eq!(s.timestamps()[1].raw, "2020-01-03T00:00:00Z");
    }

    #[test]
    fn errors_name_the_line() {
        let err = read_series("timestamp,return\n0,0.01\n1,abc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = read_series("timestamp,return\n0,0.01\n1,0.1,7\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = read_series("timestamp,return\n5,0.01\n5,0.1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = read_series("timestamp,return\n2020-01-01,0.01\n3,0.1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = read_series("timestamp,return,alpha,s\n0,0.01,0.0,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = read_series("time,ret\n0,0.01\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = read_series("timestamp,return\nyesterday,0.01\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn write_then_read() {
        let s = ReturnSeries::from_returns(vec![0.1, -0.25, 1.0 / 3.0]).unwrap();
        let text = write_series(&s);
        assert_eq!(text, "timestamp,return\n0,0.1\n1,-0.25\n2,0.333333333\n");
        assert_eq!(write_series(&read_series(text.as_bytes()).unwrap()), text);
    }

    #[test]
    fn validation() {
        assert!(ReturnSeries::from_returns(vec![0.1, f64::NAN]).is_err());
        let s = ReturnSeries::from_returns(vec![0.1, 0.2]).unwrap();
        assert!(s.clone().with_moments(vec![0.0], vec![0.1]).is_err());
        assert!(s
            .clone()
            .with_moments(vec![0.0, 0.0], vec![0.1, 0.0])
            .is_err());
        assert!(s.with_moments(vec![0.0, 0.0], vec![0.1, 0.2]).is_ok());
    }
}
