//! Plain-text view of a run report.

use std::fmt::Write;

use serde_json::Value;

/// Criteria of a suite report get one summary line each; everything else is
/// flattened to `path  value` rows.
pub fn render(report: &Value) -> String {
    let mut out = String::new();
    if let Some(criteria) = report["outputs"]["criteria"].as_array() {
        for c in criteria {
            let verdict = if c["passed"].as_bool() == Some(true) {
                "PASS"
            } else {
                "FAIL"
            };
            let _ = write!(
                out,
                "{:>2}  {:<20} {verdict}",
                c["id"].as_u64().unwrap_or(0),
                c["name"].as_str().unwrap_or("")
            );
            if let Some(t) = c["elapsed_seconds"].as_f64() {
                let _ = write!(out, "  {t:.2}s");
            }
            out.push('\n');
        }
        return out;
    }
    let mut rows = Vec::new();
    flatten("", report, &mut rows);
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, rows)),
        // short numeric arrays read better on one line
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) || is_complex_list(a) => {
            rows.push((prefix.to_string(), v.to_string()))
        }
        Value::Array(a) => a
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&key(&i.to_string()), v, rows)),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn is_complex_list(a: &[Value]) -> bool {
    a.iter().all(|x| {
        x.as_array()
            .is_some_and(|p| p.len() == 2 && p.iter().all(Value::is_number))
    })
}
