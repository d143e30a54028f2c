//! Deterministic JSON reports.

use serde_json::{json, Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to 12 significant digits. Non-finite values become strings.
pub fn round_sig(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(format!("{x}"));
    }
    let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let r: f64 = s.parse().expect("formatted float parses");
    serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
}

/// Applies [`round_sig`] to every float in the tree. Object keys are kept
/// sorted by `serde_json::Map`.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => round_sig(n.as_f64().expect("f64 number")),
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

/// A report under construction: one `results` object plus verification
/// checks that decide the exit status.
#[derive(Debug, Clone, Default)]
pub struct Report {
    results: Map<String, Value>,
    failures: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.results.insert(key.to_string(), value.into());
        self
    }

    /// Records `value ≤ limit` under `key`; a breach marks the report as
    /// failed.
    pub fn residual(&mut self, key: &str, value: f64, limit: f64) -> &mut Self {
        if !(value <= limit) {
            self.failures.push(format!("{key} = {value:.3e} exceeds {limit:.1e}"));
        }
        self.set(key, value)
    }

    /// Records a verdict that must come out as `expected`.
    pub fn check(&mut self, key: &str, value: bool, expected: bool) -> &mut Self {
        if value != expected {
            self.failures.push(format!("{key} is {value}, expected {expected}"));
        }
        self.set(key, value)
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }

    pub fn failures(&self) -> &[String] {
        &self.failures
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn results(&self) -> &Map<String, Value> {
        &self.results
    }
}

/// Full document: tool header, config echo, results, status.
pub fn emit_report(command: &str, config: Value, report: &Report) -> String {
    let doc = json!({
        "tool": "biiso",
        "version": VERSION,
        "command": command,
        "config": config,
        "results": Value::Object(report.results.clone()),
        "status": if report.passed() { "ok" } else { "verification_failed" },
        "failures": report.failures,
    });
    let mut s = serde_json::to_string_pretty(&normalize(doc)).expect("reports serialize");
    s.push('\n');
    s
}
