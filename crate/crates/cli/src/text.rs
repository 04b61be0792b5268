//! Plain-text rendering of a JSON report: one `path: value` line per leaf,
//! with arrays of scalars kept on one line.

use serde_json::Value;

pub fn render(v: &Value) -> String {
    let mut out = String::new();
    walk(v, "", &mut out);
    if out.is_empty() {
        out.push('\n');
    }
    out
}

fn is_flat(items: &[Value]) -> bool {
    items.iter().all(|x| !x.is_object() && !x.is_array())
}

fn walk(v: &Value, path: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                walk(x, &p, out);
            }
        }
        Value::Array(items) if !is_flat(items) => {
            for (i, x) in items.iter().enumerate() {
                walk(x, &format!("{path}[{i}]"), out);
            }
        }
        leaf => {
            let shown = match leaf {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{path}: {shown}\n"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn renders_paths() {
        let v = json!({"b": {"c": [1, 2]}, "a": "x", "m": [[1, 0], [0, 1]]});
        assert_eq!(render(&v), "a: x\nb.c: [1,2]\nm[0]: [1,0]\nm[1]: [0,1]\n");
    }
}
