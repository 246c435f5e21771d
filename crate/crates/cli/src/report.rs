use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub law: String,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instances: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fact {
    pub key: String,
    pub value: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub verdicts: Vec<Verdict>,
    pub facts: Vec<Fact>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Report {
        Report {
            command: command.into(),
            ..Report::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&mut self, check: impl Into<String>, passed: bool) -> &mut Verdict {
        self.verdicts.push(Verdict {
            check: check.into(),
            passed,
            instances: None,
            witness: None,
        });
        self.verdicts.last_mut().expect("just pushed")
    }

    /// A verdict that fails with `message` when `failure` is present.
    pub fn expect(&mut self, check: impl Into<String>, failure: Option<String>) {
        let passed = failure.is_none();
        let v = self.verdict(check, passed);
        v.witness = failure.map(|message| Witness {
            law: v.check.clone(),
            message,
            entries: vec![],
        });
    }

    pub fn fact(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.facts.push(Fact {
            key: key.into(),
            value: vec![value.into()],
        });
    }

    pub fn list<I, S>(&mut self, key: impl Into<String>, values: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.facts.push(Fact {
            key: key.into(),
            value: values.into_iter().map(Into::into).collect(),
        });
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        for f in &self.facts {
            match f.value.as_slice() {
                [one] => {
                    let _ = writeln!(out, "{}: {one}", f.key);
                }
                many => {
                    let _ = writeln!(out, "{}: ({})", f.key, many.len());
                    for v in many {
                        let _ = writeln!(out, "  {v}");
                    }
                }
            }
        }
        for v in &self.verdicts {
            let mark = if v.passed { "PASS" } else { "FAIL" };
            let count = v.instances.map(|n| format!(" ({n} {})", if n == 1 { "instance" } else { "instances" })).unwrap_or_default();
            let _ = writeln!(out, "{mark} {}{count}", v.check);
            if let Some(w) = &v.witness {
                let _ = writeln!(out, "  witness: {}", w.message);
                for e in &w.entries {
                    let _ = writeln!(out, "    at {e}");
                }
            }
        }
        if let Some(ms) = self.elapsed_ms {
            let _ = writeln!(out, "elapsed: {ms} ms");
        }
        let _ = writeln!(out, "result: {}", if self.passed() { "pass" } else { "fail" });
        out
    }
}
