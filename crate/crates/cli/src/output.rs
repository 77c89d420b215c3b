use serde::Serialize;
use serde_json::{json, Value};

/// `x` rounded to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Shortest decimal that round-trips `round15(x)`.
pub fn num(x: f64) -> String {
    let y = round15(x);
    if y != 0.0 && (y.abs() < 1e-5 || y.abs() >= 1e16) {
        format!("{y:e}")
    } else {
        format!("{y}")
    }
}

pub fn envelope(command: &str, config: &Value, result: impl Serialize) -> String {
    let body = json!({ "command": command, "config": config, "result": result });
    serde_json::to_string_pretty(&body).expect("JSON values always serialize")
}

/// `# key=value …` summary of the resolved configuration.
pub fn config_line(command: &str, config: &Value) -> String {
    let mut line = format!("# zcorr {command}");
    if let Value::Object(map) = config {
        for (key, value) in map {
            match value {
                Value::Null => {}
                Value::String(s) => line.push_str(&format!(" {key}={s}")),
                other => line.push_str(&format!(" {key}={other}")),
            }
        }
    }
    line
}
