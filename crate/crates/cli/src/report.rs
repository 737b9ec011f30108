use serde_json::{Map, Value};

use crate::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// A finished report. JSON is canonical; CSV is either an explicit table or
/// a one-row flattening of the JSON body.
#[derive(Debug, Clone)]
pub struct Report {
    pub body: Value,
    pub ok: bool,
    table: Option<Table>,
}

#[derive(Debug, Clone)]
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Report {
    /// Wraps an object body and records `ok` in it.
    pub fn new(mut body: Value, ok: bool) -> Self {
        if let Value::Object(map) = &mut body {
            map.insert("ok".into(), Value::Bool(ok));
        }
        Report { body, ok, table: None }
    }

    pub fn with_table(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.table = Some(Table { header: header.iter().map(|s| s.to_string()).collect(), rows });
        self
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.body).expect("report is valid JSON");
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let table = match &self.table {
                    Some(t) => t.clone(),
                    None => {
                        let mut flat = Vec::new();
                        flatten("", &self.body, &mut flat);
                        let (header, row) = flat.into_iter().unzip();
                        Table { header, rows: vec![row] }
                    }
                };
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&table.header).map_err(csv_err)?;
                for row in &table.rows {
                    w.write_record(row).map_err(csv_err)?;
                }
                Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("CSV is UTF-8"))
            }
        }
    }
}

fn csv_err(e: csv::Error) -> crate::CliError {
    crate::CliError::Core(ergstab::Error::Construction(format!("CSV output: {e}")))
}

/// Scalars keep their key, nested objects get dotted keys, and arrays are
/// written as compact JSON.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => flatten_map(prefix, map, out),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn flatten_map(prefix: &str, map: &Map<String, Value>, out: &mut Vec<(String, String)>) {
    for (k, v) in map {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        flatten(&key, v, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_flattens_nested_objects() {
        let r = Report::new(json!({"b": {"x": 1, "y": [1, 2]}, "a": "s"}), true);
        assert_eq!(r.render(Format::Csv).unwrap(), "a,b.x,b.y,ok\ns,1,\"[1,2]\",true\n");
    }

    #[test]
    fn json_keys_are_sorted() {
        let r = Report::new(json!({"z": 1, "a": 2}), false);
        assert_eq!(r.render(Format::Json).unwrap(), "{\n  \"a\": 2,\n  \"ok\": false,\n  \"z\": 1\n}\n");
    }
}
