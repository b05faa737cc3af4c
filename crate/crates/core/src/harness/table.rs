use std::fmt;

use serde_json::{Map, Number};

use super::HarnessError;

/// A single cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

/// Scientific notation with 17 significant digits, enough to round-trip any f64.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => f.write_str(&format_float(*x)),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl Value {
    /// Inverse of `Display`: floats always carry an exponent, so integers and
    /// floats are distinguishable; anything else is text.
    fn parse(cell: &str) -> Value {
        if let Ok(i) = cell.parse::<i64>() {
            return Value::Int(i);
        }
        let numeric = cell.contains(['e', 'E']) || matches!(cell, "NaN" | "inf" | "-inf");
        if numeric {
            if let Ok(x) = cell.parse::<f64>() {
                return Value::Float(x);
            }
        }
        Value::Text(cell.to_string())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Float(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            Value::Text(_) => None,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Int(i) => serde_json::Value::from(*i),
            Value::Float(x) => Number::from_f64(*x)
                .map(serde_json::Value::Number)
                .unwrap_or_else(|| serde_json::Value::String(format_float(*x))),
            Value::Text(s) => serde_json::Value::String(s.clone()),
        }
    }
}

/// Rows with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let err = |e: csv::Error| HarnessError::Table(e.to_string());
        w.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))
                .map_err(err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| HarnessError::Table(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| HarnessError::Table(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self, HarnessError> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let err = |e: csv::Error| HarnessError::Table(e.to_string());
        let columns: Vec<String> = r.headers().map_err(err)?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(err)?;
            rows.push(rec.iter().map(Value::parse).collect());
        }
        Ok(Self { columns, rows })
    }

    /// Array of objects, one per row, keys in column order.
    pub fn to_json(&self) -> Result<String, HarnessError> {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Value::to_json))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut s =
            serde_json::to_string_pretty(&rows).map_err(|e| HarnessError::Table(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-2.0), "-2.0000000000000000e0");
    }

    #[test]
    fn csv_shape() {
        let mut t = Table::new(&["family", "f", "n"]);
        t.push(vec!["BB1".into(), 0.5.into(), 3usize.into()]);
        assert_eq!(
            t.to_csv().unwrap(),
            "family,f,n\nBB1,5.0000000000000000e-1,3\n"
        );
    }

    proptest! {
        #[test]
        fn csv_round_trip(xs in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..20),
                          n in any::<i64>(), label in "[a-zA-Z][a-zA-Z0-9 _-]{0,8}".prop_filter("not a float literal", |l| l != "inf" && l != "NaN")) {
            let mut t = Table::new(&["label", "n", "x"]);
            for x in &xs {
                t.push(vec![Value::Text(label.clone()), Value::Int(n), Value::Float(*x)]);
            }
            let back = Table::from_csv(&t.to_csv().unwrap()).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
