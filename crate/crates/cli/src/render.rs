//! Aligned plain-text rendering of JSON reports.

use serde_json::Value;

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(items) if items.iter().all(is_scalar) => items.iter().map(scalar).collect::<Vec<_>>().join(", "),
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Object(_) | Value::Array(_))
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(is_scalar),
        other => is_scalar(other),
    }
}

/// Rows of objects with flat fields become a table; other arrays are
/// listed item by item.
fn table(items: &[Value], indent: usize, out: &mut String) -> bool {
    let Some(Value::Object(first)) = items.first() else { return false };
    let columns: Vec<&String> = first.keys().collect();
    let rows: Option<Vec<Vec<String>>> = items
        .iter()
        .map(|item| match item {
            Value::Object(map) if map.len() == columns.len() => {
                columns.iter().map(|c| map.get(*c).filter(|v| is_flat(v)).map(scalar)).collect()
            }
            _ => None,
        })
        .collect();
    let Some(rows) = rows else { return false };
    let widths: Vec<usize> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0).max(c.chars().count()))
        .collect();
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}{}\n", " ".repeat(indent), padded.join("  ").trim_end())
    };
    out.push_str(&line(columns.iter().map(|c| c.as_str()).collect()));
    for row in &rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    true
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            let width = map.keys().filter(|k| is_flat(&map[*k])).map(|k| k.chars().count()).max().unwrap_or(0);
            for (k, val) in map {
                if is_flat(val) {
                    out.push_str(&format!("{pad}{k:<width$}  {}\n", scalar(val)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render(val, indent + 2, out);
                }
            }
        }
        Value::Array(items) => {
            if !table(items, indent, out) {
                for (i, item) in items.iter().enumerate() {
                    if is_flat(item) {
                        out.push_str(&format!("{pad}- {}\n", scalar(item)));
                    } else {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        render(item, indent + 2, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

pub fn pretty(v: &Value) -> String {
    let mut out = String::new();
    render(v, 0, &mut out);
    out
}
