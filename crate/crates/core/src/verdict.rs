//! Line-oriented verdicts shared by all checkers.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Holds,
    Fails,
    /// Holds because the hypotheses of the condition are not met.
    Vacuous,
    /// The available bounds cannot separate the two sides.
    Indeterminate,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Holds => "HOLDS",
            Status::Fails => "FAILS",
            Status::Vacuous => "VACUOUS",
            Status::Indeterminate => "INDETERMINATE",
        }
    }

    pub fn from_bool(holds: bool) -> Self {
        if holds {
            Status::Holds
        } else {
            Status::Fails
        }
    }

    /// Vacuous counts as holding.
    pub fn is_ok(self) -> bool {
        matches!(self, Status::Holds | Status::Vacuous)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Status {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "HOLDS" => Ok(Status::Holds),
            "FAILS" => Ok(Status::Fails),
            "VACUOUS" => Ok(Status::Vacuous),
            "INDETERMINATE" => Ok(Status::Indeterminate),
            _ => Err(crate::Error::invalid(format!("unknown verdict {s:?}"))),
        }
    }
}

/// One checked condition: `vm2: FAILS lhs=0 required=1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub label: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub required: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl Verdict {
    pub fn new(label: impl Into<String>, status: Status) -> Self {
        Verdict {
            label: label.into(),
            status,
            lhs: None,
            required: None,
            note: None,
        }
    }

    pub fn with_sides(mut self, lhs: impl fmt::Display, required: impl fmt::Display) -> Self {
        self.lhs = Some(lhs.to_string());
        self.required = Some(required.to_string());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.label, self.status)?;
        if let Some(l) = &self.lhs {
            write!(f, " lhs={l}")?;
        }
        if let Some(r) = &self.required {
            write!(f, " required={r}")?;
        }
        if let Some(n) = &self.note {
            write!(f, " ({n})")?;
        }
        Ok(())
    }
}

/// Combined status: any failure fails, then any indeterminate, and a
/// report of only vacuous lines is vacuous.
pub fn overall(verdicts: &[Verdict]) -> Status {
    if verdicts.iter().any(|v| v.status == Status::Fails) {
        Status::Fails
    } else if verdicts.iter().any(|v| v.status == Status::Indeterminate) {
        Status::Indeterminate
    } else if !verdicts.is_empty() && verdicts.iter().all(|v| v.status == Status::Vacuous) {
        Status::Vacuous
    } else {
        Status::Holds
    }
}
