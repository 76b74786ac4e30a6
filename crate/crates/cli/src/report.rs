use serde_json::{json, Map, Value};

/// Outcome of one subcommand. Field order is fixed so JSON output is
/// byte-stable.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub instances: Vec<String>,
    pub pass: bool,
    pub metrics: Map<String, Value>,
    pub counterexample: Option<Value>,
    /// Extra lines for the plain-text rendering.
    pub lines: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            instances: Vec::new(),
            pass: true,
            metrics: Map::new(),
            counterexample: None,
            lines: Vec::new(),
        }
    }

    pub fn metric(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.metrics.insert(key.to_string(), value.into());
        self
    }

    /// Records a check; the first failure also records its witness.
    pub fn require(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        if !ok {
            if self.pass {
                self.counterexample = Some(witness());
            }
            self.pass = false;
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "command": self.command,
            "instances": self.instances,
            "status": if self.pass { "pass" } else { "fail" },
            "metrics": self.metrics,
        });
        if let Some(c) = &self.counterexample {
            v["counterexample"] = c.clone();
        }
        v
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            return serde_json::to_string_pretty(&self.to_json()).expect("reports serialize") + "\n";
        }
        let mut out = format!("{}: {}\n", self.command, if self.pass { "pass" } else { "FAIL" });
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        for (k, v) in &self.metrics {
            out.push_str(&format!("  {k}: {}\n", compact(v)));
        }
        if let Some(c) = &self.counterexample {
            out.push_str(&format!("  counterexample: {}\n", compact(c)));
        }
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
