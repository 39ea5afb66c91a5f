use serde::Serialize;
use serde_json::{Map, Value};
use ultraweight::{ConditionVerdict, VerdictKind};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: String,
    pub input: Map<String, Value>,
    pub results: Vec<Value>,
    pub diagnostics: Vec<String>,
    pub wall_time_ms: u64,
    #[serde(skip)]
    kinds: Vec<VerdictKind>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            input: Map::new(),
            results: Vec::new(),
            diagnostics: Vec::new(),
            wall_time_ms: 0,
            kinds: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) {
        self.input.insert(key.to_string(), serde_json::to_value(value).expect("input serializes"));
    }

    /// A named verdict; counts towards the exit code.
    pub fn verdict(&mut self, name: &str, v: &ConditionVerdict) {
        self.kinds.push(v.kind());
        let mut obj = serde_json::to_value(v).expect("verdict serializes");
        obj.as_object_mut().expect("verdict is an object").insert("name".into(), name.into());
        self.results.push(obj);
    }

    /// A result that does not affect the exit code.
    pub fn value(&mut self, name: &str, value: impl Serialize) {
        let mut obj = Map::new();
        obj.insert("name".into(), name.into());
        obj.insert("value".into(), serde_json::to_value(value).expect("result serializes"));
        self.results.push(Value::Object(obj));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.diagnostics.push(text.into());
    }

    /// 0 when everything is Satisfied, 1 if anything is Violated, else 2 if anything is Inconclusive.
    pub fn exit_code(&self) -> u8 {
        if self.kinds.contains(&VerdictKind::Violated) {
            1
        } else if self.kinds.contains(&VerdictKind::Inconclusive) {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let mut r = Report::new("check");
        assert_eq!(r.exit_code(), 0);
        r.verdict("a", &ConditionVerdict::satisfied([("C", 1.0)]));
        assert_eq!(r.exit_code(), 0);
        r.verdict("b", &ConditionVerdict::inconclusive("x", vec![]));
        assert_eq!(r.exit_code(), 2);
        r.verdict("c", &ConditionVerdict::violated(1.0, 2.0, "y"));
        assert_eq!(r.exit_code(), 1);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["results"][2]["verdict"], "violated");
        assert_eq!(v["results"][2]["name"], "c");
    }
}
