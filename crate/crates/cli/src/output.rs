//! CSV and JSON rendering. Both formats carry the effective parameters.

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::config::Format;
use crate::CliError;

pub struct Report {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Vec<(String, Value)>,
}

/// Integral values print without a trailing `.0`.
pub fn num(x: f64) -> Value {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 9.0e15 {
        Value::from(x as i64)
    } else {
        serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
    }
}

pub fn int(x: i128) -> Value {
    match i64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => match u64::try_from(x) {
            Ok(v) => Value::from(v),
            Err(_) => Value::String(x.to_string()),
        },
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

impl Report {
    pub fn new(command: &str, params: BTreeMap<String, String>, columns: Vec<&'static str>) -> Self {
        Report { command: command.to_string(), params, columns, rows: Vec::new(), summary: Vec::new() }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut header = format!("# command={}\n", self.command);
        for (k, v) in &self.params {
            header.push_str(&format!("# {k}={v}\n"));
        }
        for (k, v) in &self.summary {
            header.push_str(&format!("# {k}={}\n", cell(v)));
        }
        let mut w = csv::Writer::from_writer(header.into_bytes());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    fn json(&self) -> Result<String, CliError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().map(|c| c.to_string()).zip(row.iter().cloned()).collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("command".into(), Value::from(self.command.clone()));
        doc.insert(
            "params".into(),
            Value::Object(self.params.iter().map(|(k, v)| (k.clone(), Value::from(v.clone()))).collect()),
        );
        doc.insert("summary".into(), Value::Object(self.summary.iter().cloned().collect()));
        doc.insert("rows".into(), Value::Array(rows));
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("json serialization");
        text.push('\n');
        Ok(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_numbers_drop_the_fraction() {
        assert_eq!(num(55.0).to_string(), "55");
        assert_eq!(num(1.40625).to_string(), "1.40625");
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(int(i128::MAX), Value::String(i128::MAX.to_string()));
    }

    #[test]
    fn csv_quotes_fields_with_commas() {
        let mut r = Report::new("t", BTreeMap::new(), vec!["field", "n"]);
        r.rows.push(vec![Value::from("Q(sqrt,-1)"), num(3.0)]);
        assert_eq!(r.render(Format::Csv).unwrap(), "# command=t\nfield,n\n\"Q(sqrt,-1)\",3\n");
    }
}
