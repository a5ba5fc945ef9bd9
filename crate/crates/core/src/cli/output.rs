use serde_json::Value;

use crate::montecarlo::Histogram;

/// Flattens nested objects and arrays into `(dotted.key, value)` pairs in
/// document order. Strings are unquoted; `null` becomes an empty value.
pub fn flatten_json(doc: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let key = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(m) => {
                for (k, v) in m {
                    walk(&key(k), v, out);
                }
            }
            Value::Array(a) => {
                for (i, v) in a.iter().enumerate() {
                    walk(&key(&i.to_string()), v, out);
                }
            }
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            Value::Null => out.push((prefix.to_string(), String::new())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    walk("", doc, &mut out);
    out
}

/// `key,value` rows, then a `bin_lo,bin_hi,count` table when a histogram
/// is present.
pub fn render_csv(doc: &Value, histogram: Option<&Histogram>) -> String {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    w.write_record(["key", "value"]).expect("in-memory write");
    for (k, v) in flatten_json(doc) {
        w.write_record([k, v]).expect("in-memory write");
    }
    if let Some(h) = histogram {
        w.write_record(["bin_lo", "bin_hi", "count"]).expect("in-memory write");
        for (i, c) in h.counts.iter().enumerate() {
            w.write_record([
                h.bin_edges[i].to_string(),
                h.bin_edges[i + 1].to_string(),
                c.to_string(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}
