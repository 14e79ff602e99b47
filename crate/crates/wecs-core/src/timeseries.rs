//! Uniformly sampled, named simulation channels and their CSV form.

use std::io::{self, Write};

use crate::error::{Error, Result};

/// A table of named channels sampled on a uniform time grid.
///
/// Every pushed row is checked to be finite, and [`TimeSeries::verify_uniform`]
/// confirms the grid spacing, so downstream consumers (CSV output, harmonic
/// analysis) can rely on both.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    names: Vec<String>,
    t: Vec<f64>,
    columns: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let columns = names.iter().map(|_| Vec::new()).collect();
        TimeSeries {
            names,
            t: Vec::new(),
            columns,
        }
    }

    /// Append one sample. `row` must carry one value per channel, all finite.
    pub fn push(&mut self, t: f64, row: &[f64]) -> Result<()> {
        if row.len() != self.names.len() {
            return Err(Error::InvalidParameter {
                name: "row",
                reason: format!("expected {} values, got {}", self.names.len(), row.len()),
            });
        }
        if !t.is_finite() {
            return Err(Error::NonFinite {
                channel: "t".to_owned(),
                t,
            });
        }
        for (name, &value) in self.names.iter().zip(row) {
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    channel: name.clone(),
                    t,
                });
            }
        }
        self.t.push(t);
        for (column, &value) in self.columns.iter_mut().zip(row) {
            column.push(value);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn time(&self) -> &[f64] {
        &self.t
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        let idx = self.names.iter().position(|n| n == name)?;
        Some(&self.columns[idx])
    }

    /// Grid spacing, if at least two samples exist.
    pub fn sample_interval(&self) -> Option<f64> {
        (self.t.len() >= 2).then(|| self.t[1] - self.t[0])
    }

    /// Confirm the time grid is uniform to within `rel_tol` of its spacing.
    pub fn verify_uniform(&self, rel_tol: f64) -> Result<()> {
        let Some(dt) = self.sample_interval() else {
            return Ok(());
        };
        if dt <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: format!("non-increasing time grid (first step {dt})"),
            });
        }
        for (k, pair) in self.t.windows(2).enumerate() {
            let step = pair[1] - pair[0];
            if (step - dt).abs() > rel_tol * dt {
                return Err(Error::InvalidParameter {
                    name: "t",
                    reason: format!(
                        "non-uniform sampling: step {} at index {} vs {} at index 0",
                        step, k, dt
                    ),
                });
            }
        }
        Ok(())
    }

    /// Write `t` plus all channels as CSV (header row first, `.` decimal
    /// separator, no digit grouping). Float formatting is the shortest
    /// round-trip form, so repeated writes of the same data are
    /// byte-identical.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "t")?;
        for name in &self.names {
            write!(out, ",{name}")?;
        }
        writeln!(out)?;
        for k in 0..self.t.len() {
            write!(out, "{}", self.t[k])?;
            for column in &self.columns {
                write!(out, ",{}", column[k])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}
