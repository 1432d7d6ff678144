//! Command reports: an ordered list of `key = value` lines, rendered as
//! plain text or as a JSON document.

use serde_json::{json, Map, Value};

/// Whether a command reached an affirmative or a negative verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Affirmative,
    Negative,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Affirmative => 0,
            Verdict::Negative => 1,
        }
    }
}

#[derive(Debug)]
pub struct Report {
    command: &'static str,
    entries: Vec<(String, String)>,
    verdict: Verdict,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            entries: Vec::new(),
            verdict: Verdict::Affirmative,
        }
    }

    /// Appends a line. Keys must be unique within a report.
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        let key = key.into();
        debug_assert!(
            self.entries.iter().all(|(k, _)| *k != key),
            "duplicate report key {key}"
        );
        self.entries.push((key, value.to_string()));
    }

    pub fn fail(&mut self) {
        self.verdict = Verdict::Negative;
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    pub fn text(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn json(&self) -> String {
        let results: Map<String, Value> = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let doc = json!({
            "command": self.command,
            "exit_code": self.verdict.exit_code(),
            "results": results,
        });
        serde_json::to_string_pretty(&doc).expect("strings serialize") + "\n"
    }
}

/// The JSON document for a failed command.
pub fn error_json(command: &str, exit_code: u8, message: &str) -> String {
    let doc = json!({
        "command": command,
        "exit_code": exit_code,
        "error": message,
    });
    serde_json::to_string_pretty(&doc).expect("strings serialize") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_agree() {
        let mut r = Report::new("charge");
        r.push("Omega_0", "y1*c1");
        r.push("[Omega,Omega]", 0);
        assert_eq!(r.text(), "Omega_0 = y1*c1\n[Omega,Omega] = 0\n");
        let doc: Value = serde_json::from_str(&r.json()).unwrap();
        assert_eq!(doc["exit_code"], 0);
        assert_eq!(doc["results"]["Omega_0"], "y1*c1");
        let keys: Vec<&String> = doc["results"].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["Omega_0", "[Omega,Omega]"]);
    }

    #[test]
    fn negative_verdict_sets_exit_code() {
        let mut r = Report::new("check");
        r.fail();
        assert_eq!(r.verdict().exit_code(), 1);
        let doc: Value = serde_json::from_str(&r.json()).unwrap();
        assert_eq!(doc["exit_code"], 1);
    }
}
