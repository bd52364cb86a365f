//! The calendar-aware series container shared by every model.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A position on a regular calendar: a year and a sub-period `1..=m`.
///
/// Ordering is chronological as long as both stamps share the same `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Period {
    pub year: i32,
    pub period: u32,
}

impl Period {
    pub fn new(year: i32, period: u32) -> Self {
        Period { year, period }
    }

    /// Absolute period count since year 0, for a cycle of length `m`.
    fn ordinal(self, m: usize) -> i64 {
        self.year as i64 * m as i64 + (self.period as i64 - 1)
    }

    fn from_ordinal(ord: i64, m: usize) -> Self {
        let m = m as i64;
        Period {
            year: ord.div_euclid(m) as i32,
            period: (ord.rem_euclid(m) + 1) as u32,
        }
    }

    /// The stamp `steps` periods later (or earlier, when negative).
    pub fn shift(self, steps: i64, m: usize) -> Self {
        Self::from_ordinal(self.ordinal(m) + steps, m)
    }

    /// Signed number of periods from `self` to `other`.
    pub fn periods_until(self, other: Period, m: usize) -> i64 {
        other.ordinal(m) - self.ordinal(m)
    }
}

/// Quarterly stamps print as `YYYY-Qn`.
impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-Q{}", self.year, self.period)
    }
}

impl FromStr for Period {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::input(format!("invalid quarter '{s}', expected YYYY-Qn"));
        let (year, quarter) = s.split_once("-Q").ok_or_else(bad)?;
        let year: i32 = year.parse().map_err(|_| bad())?;
        let period: u32 = quarter.parse().map_err(|_| bad())?;
        if !(1..=4).contains(&period) {
            return Err(bad());
        }
        Ok(Period { year, period })
    }
}

/// A non-empty run of finite observations on a regular calendar with
/// seasonal period `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    origin: Period,
    period_length: usize,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, origin: Period, period_length: usize) -> Result<Self> {
        if period_length == 0 {
            return Err(Error::input("period length must be positive"));
        }
        if origin.period < 1 || origin.period as usize > period_length {
            return Err(Error::input(format!(
                "origin period {} outside 1..={period_length}",
                origin.period
            )));
        }
        if values.is_empty() {
            return Err(Error::input("a series needs at least one value"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(i, "non-finite value"));
        }
        Ok(TimeSeries {
            values,
            origin,
            period_length,
        })
    }

    /// Quarterly series starting at `origin`.
    pub fn quarterly(values: Vec<f64>, origin: Period) -> Result<Self> {
        Self::new(values, origin, 4)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn origin(&self) -> Period {
        self.origin
    }

    pub fn period_length(&self) -> usize {
        self.period_length
    }

    /// Calendar stamp of element `i`.
    pub fn period_at(&self, i: usize) -> Period {
        self.origin.shift(i as i64, self.period_length)
    }

    /// Stamp of the last observation.
    pub fn end(&self) -> Period {
        self.period_at(self.len() - 1)
    }

    /// Index of a calendar stamp, if it falls inside the series.
    pub fn index_of(&self, p: Period) -> Option<usize> {
        let k = self.origin.periods_until(p, self.period_length);
        (k >= 0 && (k as usize) < self.len()).then_some(k as usize)
    }

    pub fn periods(&self) -> impl Iterator<Item = Period> + '_ {
        (0..self.len()).map(|i| self.period_at(i))
    }

    /// A series on the same calendar with replacement values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::input(format!(
                "replacement has {} values, series has {}",
                values.len(),
                self.len()
            )));
        }
        TimeSeries::new(values, self.origin, self.period_length)
    }

    /// Elements `start..end` as a new series with the matching origin.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len() {
            return Err(Error::input(format!(
                "slice {start}..{end} outside series of length {}",
                self.len()
            )));
        }
        TimeSeries::new(
            self.values[start..end].to_vec(),
            self.period_at(start),
            self.period_length,
        )
    }

    /// Observations up to and including `last`.
    pub fn until(&self, last: Period) -> Result<Self> {
        let k = self.origin.periods_until(last, self.period_length);
        if k < 0 {
            return Err(Error::input(format!("{last} precedes the series origin")));
        }
        self.slice(0, (k as usize + 1).min(self.len()))
    }

    /// Observations strictly after `last`.
    pub fn after(&self, last: Period) -> Result<Self> {
        let k = self.origin.periods_until(last, self.period_length) + 1;
        let start = k.max(0) as usize;
        self.slice(start, self.len())
    }

    /// Parse the canonical `date,value` CSV with `YYYY-Qn` dates.
    ///
    /// Rows must be consecutive quarters: gaps, duplicates and reordering are
    /// rejected.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::input("empty CSV input"))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols != ["date", "value"] {
            return Err(Error::input(format!(
                "CSV header must be 'date,value', found '{}'",
                header.trim()
            )));
        }
        let mut origin = None;
        let mut prev: Option<Period> = None;
        let mut values = Vec::new();
        for (lineno, line) in lines {
            let (date, value) = line.split_once(',').ok_or_else(|| {
                Error::input(format!("line {}: expected two fields", lineno + 1))
            })?;
            let p: Period = date.parse()?;
            let v: f64 = value.trim().parse().map_err(|_| {
                Error::input(format!("line {}: invalid number '{}'", lineno + 1, value.trim()))
            })?;
            if let Some(q) = prev {
                match q.periods_until(p, 4) {
                    1 => {}
                    0 => return Err(Error::input(format!("duplicate date {p}"))),
                    k if k > 1 => return Err(Error::input(format!("gap between {q} and {p}"))),
                    _ => return Err(Error::input(format!("date {p} out of order after {q}"))),
                }
            } else {
                origin = Some(p);
            }
            prev = Some(p);
            values.push(v);
        }
        let origin = origin.ok_or_else(|| Error::input("CSV contains no observations"))?;
        TimeSeries::quarterly(values, origin)
    }

    /// Canonical `date,value` CSV. Values use the shortest round-trip
    /// representation so that a write/read cycle is lossless.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("date,value\n");
        for (p, v) in self.periods().zip(&self.values) {
            out.push_str(&format!("{p},{v}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calendar_mapping_wraps_years() {
        let s = TimeSeries::quarterly(vec![0.0; 6], Period::new(1996, 3)).unwrap();
        let stamps: Vec<_> = s.periods().map(|p| p.to_string()).collect();
        assert_eq!(
            stamps,
            ["1996-Q3", "1996-Q4", "1997-Q1", "1997-Q2", "1997-Q3", "1997-Q4"]
        );
        assert_eq!(s.index_of(Period::new(1997, 2)), Some(3));
        assert_eq!(s.index_of(Period::new(1996, 2)), None);
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(TimeSeries::quarterly(vec![], Period::new(2000, 1)).is_err());
        assert!(TimeSeries::quarterly(vec![1.0], Period::new(2000, 5)).is_err());
        assert!(matches!(
            TimeSeries::quarterly(vec![1.0, f64::NAN], Period::new(2000, 1)),
            Err(Error::Domain { index: 1, .. })
        ));
    }

    #[test]
    fn csv_round_trip_and_validation() {
        let text = "date,value\n1996-Q4,1.5\n1997-Q1,2\n1997-Q2,0.1\n";
        let s = TimeSeries::from_csv_str(text).unwrap();
        assert_eq!(s.origin(), Period::new(1996, 4));
        assert_eq!(s.values(), &[1.5, 2.0, 0.1]);
        assert_eq!(TimeSeries::from_csv_str(&s.to_csv_string()).unwrap(), s);

        let gap = "date,value\n1996-Q1,1\n1996-Q3,2\n";
        assert!(TimeSeries::from_csv_str(gap).unwrap_err().to_string().contains("gap"));
        let dup = "date,value\n1996-Q1,1\n1996-Q1,2\n";
        assert!(TimeSeries::from_csv_str(dup).unwrap_err().to_string().contains("duplicate"));
        assert!(TimeSeries::from_csv_str("when,value\n1996-Q1,1\n").is_err());
        assert!(TimeSeries::from_csv_str("date,value\n1996-Q5,1\n").is_err());
    }

    #[test]
    fn window_helpers() {
        let s = TimeSeries::quarterly((0..12).map(f64::from).collect(), Period::new(2015, 1)).unwrap();
        let train = s.until(Period::new(2016, 4)).unwrap();
        let test = s.after(Period::new(2016, 4)).unwrap();
        assert_eq!(train.len(), 8);
        assert_eq!(test.origin(), Period::new(2017, 1));
        assert_eq!(test.values(), &[8.0, 9.0, 10.0, 11.0]);
    }
}
