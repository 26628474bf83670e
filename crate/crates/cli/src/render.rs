//! Text rendering of a report envelope. Every number is printed from the
//! same JSON value the `--format json` output serializes, so the two
//! formats never disagree.

use serde_json::Value;

use colorcenter::io::ReportEnvelope;

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            // Short numeric rows stay on one line.
            if a.len() <= 9 && a.iter().all(Value::is_number) {
                let row: Vec<String> = a.iter().map(Value::to_string).collect();
                out.push((prefix.to_string(), format!("[{}]", row.join(", "))));
            } else {
                for (i, x) in a.iter().enumerate() {
                    flatten(&format!("{prefix}[{i}]"), x, out);
                }
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn render_text(env: &ReportEnvelope) -> String {
    let mut out = format!("# {} {} — {} {}\n", env.tool, env.version, env.module, env.operation);
    for (q, u) in &env.units {
        out.push_str(&format!("# unit {q}: {u}\n"));
    }
    for (name, fp) in &env.inputs {
        out.push_str(&format!("# input {name}: sha256 {fp}\n"));
    }
    let mut rows = Vec::new();
    flatten("", &env.payload, &mut rows);
    for (k, v) in rows {
        out.push_str(&format!("{k} = {v}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_match_json() {
        let env = ReportEnvelope::new("m", "op", serde_json::json!({"a": {"b": 0.1 + 0.2}, "v": [1.5, -2.0], "s": "x"}))
            .unwrap()
            .unit("a.b", "eV");
        let t = render_text(&env);
        assert!(t.contains("a.b = 0.30000000000000004\n"), "{t}");
        assert!(t.contains("v = [1.5, -2.0]\n"));
        assert!(t.contains("s = x\n"));
        assert!(t.contains("# unit a.b: eV\n"));
    }
}
