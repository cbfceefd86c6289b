//! CPI observations on a decimal-year time axis.
//!
//! Input records are `time,value` pairs. A time field written as exactly
//! four digits, a dot and two digits (`1993.06`) is a month code; anything
//! else is read as a decimal year (`1993.5`, `2003.0`).

use std::fmt;

use crate::error::{Error, Result};

/// A calendar month written as `YYYY.MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthCode {
    year: i32,
    month: u32,
}

impl MonthCode {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::Domain(format!("month {month} is outside 1..=12")));
        }
        Ok(Self { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month
    }

    /// Decimal-year image: `year + month/12`, with December landing exactly on
    /// the next year.
    pub fn to_time(self) -> f64 {
        if self.month == 12 {
            f64::from(self.year + 1)
        } else {
            f64::from(self.year) + f64::from(self.month) / 12.0
        }
    }
}

impl fmt::Display for MonthCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}.{:02}", self.year, self.month)
    }
}

pub fn month_code_to_time(year: i32, month: u32) -> Result<f64> {
    Ok(MonthCode::new(year, month)?.to_time())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpiObservation {
    pub time: f64,
    pub value: f64,
}

impl CpiObservation {
    pub fn new(time: f64, value: f64) -> Result<Self> {
        if !time.is_finite() {
            return Err(Error::Domain(format!("observation time {time} is not finite")));
        }
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::Domain(format!(
                "observation value {value} at t = {time} must be positive and finite"
            )));
        }
        Ok(Self { time, value })
    }
}

/// At least two observations with strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct CpiSeries {
    observations: Vec<CpiObservation>,
}

impl CpiSeries {
    /// Sorts by time and validates. Duplicate times are rejected.
    pub fn new(mut observations: Vec<CpiObservation>) -> Result<Self> {
        for obs in &observations {
            CpiObservation::new(obs.time, obs.value)?;
        }
        observations.sort_by(|a, b| a.time.total_cmp(&b.time));
        if observations.len() < 2 {
            return Err(Error::Series(format!(
                "need at least 2 observations, got {}",
                observations.len()
            )));
        }
        if let Some(w) = observations.windows(2).find(|w| w[0].time >= w[1].time) {
            return Err(Error::Series(format!("duplicate time {}", w[0].time)));
        }
        Ok(Self { observations })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        pairs
            .iter()
            .map(|&(t, v)| CpiObservation::new(t, v))
            .collect::<Result<Vec<_>>>()
            .and_then(Self::new)
    }

    pub fn observations(&self) -> &[CpiObservation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.time).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.value).collect()
    }

    pub fn start(&self) -> f64 {
        self.observations[0].time
    }

    pub fn end(&self) -> f64 {
        self.observations[self.observations.len() - 1].time
    }

    /// Same times, every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.observations
                .iter()
                .map(|o| CpiObservation::new(o.time, o.value * factor))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// Writes the series back out with decimal times only.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for o in &self.observations {
            out.push_str(&format_time(o.time));
            out.push(',');
            out.push_str(&format!("{:?}", o.value));
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip decimal, padded so it never looks like a month code.
fn format_time(t: f64) -> String {
    let s = format!("{t:?}");
    if is_month_code_shape(&s) {
        format!("{s}0")
    } else {
        s
    }
}

fn is_month_code_shape(field: &str) -> bool {
    let b = field.as_bytes();
    b.len() == 7 && b[4] == b'.' && b.iter().enumerate().all(|(i, c)| i == 4 || c.is_ascii_digit())
}

/// Observations in file order; no series-level validation.
pub fn parse_cpi_records(text: &str) -> Result<Vec<CpiObservation>> {
    let mut out: Vec<(usize, CpiObservation)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: line_no, message };
        let mut fields = line.split(',');
        let (Some(t_field), Some(v_field), None) = (fields.next(), fields.next(), fields.next())
        else {
            return Err(parse_err(format!("expected two comma-separated fields, got {line:?}")));
        };
        let (t_field, v_field) = (t_field.trim(), v_field.trim());

        let time = if is_month_code_shape(t_field) {
            let year: i32 = t_field[..4].parse().map_err(|_| parse_err(format!("bad year in {t_field:?}")))?;
            let month: u32 = t_field[5..].parse().map_err(|_| parse_err(format!("bad month in {t_field:?}")))?;
            month_code_to_time(year, month).map_err(|e| parse_err(e.to_string()))?
        } else {
            t_field
                .parse::<f64>()
                .map_err(|_| parse_err(format!("bad time {t_field:?}")))?
        };
        let value: f64 = v_field
            .parse()
            .map_err(|_| parse_err(format!("bad value {v_field:?}")))?;
        let obs = CpiObservation::new(time, value).map_err(|e| parse_err(e.to_string()))?;
        if let Some((prev_line, _)) = out.iter().find(|(_, o)| o.time == time) {
            return Err(parse_err(format!("duplicate time {time} (first seen on line {prev_line})")));
        }
        out.push((line_no, obs));
    }
    Ok(out.into_iter().map(|(_, o)| o).collect())
}

pub fn parse_cpi_csv(text: &str) -> Result<CpiSeries> {
    CpiSeries::new(parse_cpi_records(text)?)
}

/// One entry per consecutive observation pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRatio {
    pub start: f64,
    pub end: f64,
    pub log_ratio: f64,
}

pub fn series_log_ratios(series: &CpiSeries) -> Vec<LogRatio> {
    series
        .observations()
        .windows(2)
        .map(|w| LogRatio {
            start: w[0].time,
            end: w[1].time,
            log_ratio: w[1].value.ln() - w[0].value.ln(),
        })
        .collect()
}

/// The bundled index of non-regulated prices, 1993.01 to 2003.
pub const BUNDLED_CPI_CSV: &str = include_str!("../data/cpi_nonregulated.csv");

pub fn bundled_series() -> CpiSeries {
    parse_cpi_csv(BUNDLED_CPI_CSV).expect("bundled fixture is valid")
}
