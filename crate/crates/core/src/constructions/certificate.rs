use std::fmt::Display;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One checked inequality, both sides exact (integers or `p/q`) unless the
/// note says otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub stage: usize,
    pub condition: String,
    pub statement: String,
    pub lhs: String,
    pub relation: String,
    pub rhs: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl ConditionRecord {
    pub(crate) fn new(
        stage: usize,
        condition: &str,
        statement: &str,
        lhs: impl Display,
        relation: &str,
        rhs: impl Display,
        pass: bool,
    ) -> Self {
        ConditionRecord {
            stage,
            condition: condition.into(),
            statement: statement.into(),
            lhs: lhs.to_string(),
            relation: relation.into(),
            rhs: rhs.to_string(),
            pass,
            note: None,
        }
    }

    pub(crate) fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Conditions checked for one stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCertificate {
    pub stage: usize,
    pub theorem: String,
    pub period: u64,
    pub records: Vec<ConditionRecord>,
}

impl StageCertificate {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn record(&self, condition: &str) -> Option<&ConditionRecord> {
        self.records.iter().find(|r| r.condition == condition)
    }

    /// One JSON object per condition, newline-terminated.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(&CertificateLine {
                theorem: &self.theorem,
                period: self.period,
                record: r,
            })?);
            out.push('\n');
        }
        Ok(out)
    }
}

#[derive(Serialize)]
struct CertificateLine<'a> {
    theorem: &'a str,
    period: u64,
    #[serde(flatten)]
    record: &'a ConditionRecord,
}

/// JSON lines for a list of certificates.
pub fn certificates_to_json_lines(certs: &[StageCertificate]) -> Result<String> {
    let mut out = String::new();
    for c in certs {
        out.push_str(&c.to_json_lines()?);
    }
    Ok(out)
}
