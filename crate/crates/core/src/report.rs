//! Verdicts and obstruction reports.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Outcome of a single check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    NotApplicable,
}

impl Outcome {
    pub fn from_bool(passes: bool) -> Self {
        if passes {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::NotApplicable => "not-applicable",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value reduced into `0..modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    pub value: u64,
    pub modulus: u64,
}

impl Residue {
    /// Euclidean reduction, so negative inputs land in the canonical range.
    pub fn reduce(value: i128, modulus: u64) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        let r = value.rem_euclid(modulus as i128);
        Residue {
            value: r as u64,
            modulus,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Additive inverse in the same modulus.
    pub fn negate(&self) -> Self {
        Residue::reduce(-(self.value as i128), self.modulus)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

/// One row of a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residue: Option<Residue>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
    pub reason: String,
}

impl Verdict {
    pub fn new(check: &str, outcome: Outcome, reason: impl Into<String>) -> Self {
        Verdict {
            check: check.to_string(),
            outcome,
            residue: None,
            witness: None,
            reason: reason.into(),
        }
    }

    pub fn not_applicable(check: &str, reason: impl Into<String>) -> Self {
        Verdict::new(check, Outcome::NotApplicable, reason)
    }

    pub fn with_residue(mut self, residue: Residue) -> Self {
        self.residue = Some(residue);
        self
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }
}

/// Ordered verdicts for one checked object.
///
/// `overall` is derived from the verdicts at construction and cannot be set
/// independently: any applicable failure makes it `Fail`, otherwise any pass
/// makes it `Pass`, otherwise it is `NotApplicable`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    subject: String,
    verdicts: Vec<Verdict>,
    overall: Outcome,
}

impl ObstructionReport {
    pub fn new(subject: impl Into<String>, verdicts: Vec<Verdict>) -> Self {
        let overall = overall_of(&verdicts);
        ObstructionReport {
            subject: subject.into(),
            verdicts,
            overall,
        }
    }

    pub fn subject(&self) -> &str {
        &self.subject
    }

    pub fn verdicts(&self) -> &[Verdict] {
        &self.verdicts
    }

    pub fn overall(&self) -> Outcome {
        self.overall
    }

    pub fn verdict(&self, check: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.check == check)
    }
}

pub fn overall_of(verdicts: &[Verdict]) -> Outcome {
    if verdicts.iter().any(|v| v.outcome == Outcome::Fail) {
        Outcome::Fail
    } else if verdicts.iter().any(|v| v.outcome == Outcome::Pass) {
        Outcome::Pass
    } else {
        Outcome::NotApplicable
    }
}
