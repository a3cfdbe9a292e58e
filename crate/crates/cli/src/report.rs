//! Reports: titled sections of info lines and verdicts, rendered as text
//! or as a flat JSON verdict list.

use std::fmt::Write;

use valstrat::verdict::{overall, Status, Verdict};

#[derive(Debug, Default)]
pub struct Section {
    pub title: Option<String>,
    pub info: Vec<String>,
    pub verdicts: Vec<Verdict>,
}

impl Section {
    pub fn titled(title: impl Into<String>) -> Self {
        Section {
            title: Some(title.into()),
            ..Default::default()
        }
    }

    pub fn info(&mut self, line: impl Into<String>) {
        self.info.push(line.into());
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }
}

#[derive(Debug, Default)]
pub struct Report {
    pub sections: Vec<Section>,
    /// Printed last in text mode.
    pub footer: Option<String>,
    /// Replaces the verdict list in JSON mode.
    pub json: Option<serde_json::Value>,
}

impl Report {
    pub fn single(section: Section) -> Self {
        Report {
            sections: vec![section],
            ..Default::default()
        }
    }

    pub fn status(&self) -> Status {
        let all: Vec<Verdict> = self.sections.iter().flat_map(|s| s.verdicts.iter().cloned()).collect();
        overall(&all)
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            if let Some(t) = &s.title {
                writeln!(out, "[{t}]").unwrap();
            }
            for l in &s.info {
                writeln!(out, "{l}").unwrap();
            }
            for v in &s.verdicts {
                writeln!(out, "{v}").unwrap();
            }
        }
        if let Some(f) = &self.footer {
            writeln!(out, "{f}").unwrap();
        }
        out
    }

    /// Verdict labels get their section title as a prefix.
    pub fn json(&self) -> String {
        if let Some(v) = &self.json {
            return serde_json::to_string_pretty(v).expect("serializable") + "\n";
        }
        let all: Vec<Verdict> = self
            .sections
            .iter()
            .flat_map(|s| {
                s.verdicts.iter().map(move |v| {
                    let mut v = v.clone();
                    if let Some(t) = &s.title {
                        v.label = format!("{t}/{}", v.label);
                    }
                    v
                })
            })
            .collect();
        serde_json::to_string_pretty(&all).expect("serializable") + "\n"
    }
}
