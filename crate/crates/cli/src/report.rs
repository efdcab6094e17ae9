//! Tabular reports rendered as CSV or JSON with identical field names.

use std::path::{Path, PathBuf};

use nagaolab::BadReason;
use serde_json::{Map, Number, Value};

use crate::config::Format;
use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::UInt(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::UInt(v) => Value::from(*v),
            Cell::Float(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::UInt(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Primes skipped by the run, with the reason.
    pub bad_primes: Vec<(u64, BadReason)>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Self {
        Report {
            columns: columns.to_vec(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, v)| (k.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&Value::Array(rows)).expect("json");
        out.push('\n');
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn bad_primes_csv(&self) -> String {
        let mut out = String::from("p,reason\n");
        for (p, reason) in &self.bad_primes {
            out.push_str(&format!("{},{}\n", p, reason));
        }
        out
    }

    /// Writes the report to `path` and the skipped primes next to it.
    pub fn write(&self, path: &Path, format: Format) -> Result<(), CliError> {
        std::fs::write(path, self.render(format)).map_err(|e| CliError::io(path, e))?;
        let side = sidecar_path(path);
        std::fs::write(&side, self.bad_primes_csv()).map_err(|e| CliError::io(&side, e))
    }
}

/// `<output>.bad-primes.csv`.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".bad-primes.csv");
    PathBuf::from(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(&["N", "S1", "note"]);
        r.push(vec![1000u64.into(), 0.5.into(), Cell::Text("a,b".into())]);
        r.push(vec![2000u64.into(), f64::NAN.into(), Cell::Empty]);
        r.bad_primes = vec![(2, BadReason::Two), (3, BadReason::Discriminant)];
        r
    }

    #[test]
    fn csv_rendering() {
        assert_eq!(
            sample().to_csv(),
            "N,S1,note\n1000,0.5,\"a,b\"\n2000,NaN,\n"
        );
        assert_eq!(sample().bad_primes_csv(), "p,reason\n2,p=2\n3,disc\n");
    }

    #[test]
    fn json_mirrors_csv() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(v[0]["N"], 1000);
        assert_eq!(v[0]["S1"], 0.5);
        assert_eq!(v[0]["note"], "a,b");
        assert!(v[1]["S1"].is_null());
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            sidecar_path(Path::new("/tmp/out.csv")),
            PathBuf::from("/tmp/out.csv.bad-primes.csv")
        );
    }
}
