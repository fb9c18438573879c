//! Column-oriented time series, the common output record.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of the abscissa column.
pub const TIME_COLUMN: &str = "omega_t";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Named real columns over a shared time axis.
///
/// The first column is always [`TIME_COLUMN`], in units of the inverse
/// atom-mode coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesTable {
    pub name: String,
    pub metadata: BTreeMap<String, String>,
    columns: Vec<Column>,
}

impl TimeSeriesTable {
    pub fn new(name: impl Into<String>, omega_t: Vec<f64>) -> Result<Self> {
        if omega_t.is_empty() {
            return Err(Error::invalid("grid", "table needs at least one time point"));
        }
        if omega_t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("grid", "time column must be strictly increasing"));
        }
        Ok(Self {
            name: name.into(),
            metadata: BTreeMap::new(),
            columns: vec![Column {
                name: TIME_COLUMN.to_string(),
                values: omega_t,
            }],
        })
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.len() {
            return Err(Error::invalid(
                format!("column {name}"),
                format!("has {} rows, table has {}", values.len(), self.len()),
            ));
        }
        if self.columns.iter().any(|c| c.name == name) {
            return Err(Error::invalid(format!("column {name}"), "duplicate column name"));
        }
        self.columns.push(Column { name, values });
        Ok(())
    }

    /// Append all non-time columns of `other`, which must share the time axis.
    pub fn merge(&mut self, other: TimeSeriesTable) -> Result<()> {
        if other.time() != self.time() {
            return Err(Error::invalid("table", "time axes differ"));
        }
        for c in other.columns.into_iter().skip(1) {
            self.push_column(c.name, c.values)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.columns[0].values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn time(&self) -> &[f64] {
        &self.columns[0].values
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    /// CSV with a header row; numbers carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(self.columns.iter().map(|c| c.name.as_str())).map_err(io)?;
        let mut row = Vec::with_capacity(self.columns.len());
        for i in 0..self.len() {
            row.clear();
            row.extend(self.columns.iter().map(|c| format_number(c.values[i])));
            w.write_record(&row).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Shortest-exact scientific form with 17 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TimeSeriesTable {
        let mut t = TimeSeriesTable::new("demo", vec![0.0, 0.5, 1.0]).unwrap().with_meta("gamma", 6);
        t.push_column("a,b", vec![0.1, 1.0 / 3.0, -2.5e-300]).unwrap();
        t
    }

    #[test]
    fn csv_layout_and_roundtrip() {
        let s = sample().to_csv_string().unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "omega_t,\"a,b\"");
        let mut r = csv::Reader::from_reader(s.as_bytes());
        let rows: Vec<Vec<f64>> = r
            .records()
            .map(|rec| rec.unwrap().iter().map(|f| f.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows[1][1], 1.0 / 3.0);
        assert_eq!(rows[2][1], -2.5e-300);
    }

    #[test]
    fn json_roundtrip() {
        let t = sample();
        let back: TimeSeriesTable = serde_json::from_str(&t.to_json_string().unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_bad_columns() {
        let mut t = sample();
        assert!(t.push_column("short", vec![1.0]).is_err());
        assert!(t.push_column("a,b", vec![1.0; 3]).is_err());
        assert!(TimeSeriesTable::new("x", vec![]).is_err());
        assert!(TimeSeriesTable::new("x", vec![0.0, 0.0]).is_err());
    }
}
