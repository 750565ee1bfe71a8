//! Text and CSV views of a JSON report. Both are computed from the JSON
//! value alone, so every format carries the same numbers.

use anyhow::{bail, Result};
use serde_json::Value;

pub fn text(report: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, report, 0);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = items.iter().filter_map(scalar).collect();
            Some(format!("[{}]", parts.join(", ")))
        }
        _ => None,
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match scalar(x) {
                    Some(s) if !s.contains('\n') => out.push_str(&format!("{pad}{k}: {s}\n")),
                    Some(s) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for line in s.lines() {
                            out.push_str(&format!("{pad}  {line}\n"));
                        }
                    }
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_value(out, x, depth + 1);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        write_value(out, item, depth + 1);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

/// CSV of `result.rows`, an array of flat objects sharing the keys of the
/// first row.
pub fn csv(report: &Value) -> Result<String> {
    let Some(rows) = report.pointer("/result/rows").and_then(Value::as_array) else {
        bail!("this report has no table; use --format json or text");
    };
    let header: Vec<String> = match rows.first() {
        Some(Value::Object(m)) => m.keys().cloned().collect(),
        Some(_) => bail!("table rows are not objects"),
        None => Vec::new(),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for row in rows {
        let fields: Vec<String> = header
            .iter()
            .map(|k| match row.get(k) {
                Some(Value::String(s)) => s.clone(),
                Some(x) => scalar(x).unwrap_or_else(|| x.to_string()),
                None => String::new(),
            })
            .collect();
        w.write_record(&fields)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn text_nests_objects_and_lists() {
        let v = json!({"a": 1, "b": {"c": [1, 2]}, "d": [{"e": true}]});
        assert_eq!(text(&v), "a: 1\nb:\n  c: [1, 2]\nd:\n  -\n    e: true\n");
    }

    #[test]
    fn csv_uses_first_row_keys() {
        let v = json!({"result": {"rows": [{"x": 1, "y": "a,b"}, {"x": 2, "y": "c"}]}});
        assert_eq!(csv(&v).unwrap(), "x,y\n1,\"a,b\"\n2,c\n");
        assert!(csv(&json!({"result": {}})).is_err());
    }
}
