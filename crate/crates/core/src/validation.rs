use serde::Serialize;

use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub law: String,
    pub cell: String,
}

/// Every violated law together with the cell that witnesses it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, law: &str, cell: impl Into<String>) {
        self.violations.push(Violation {
            law: law.to_string(),
            cell: cell.into(),
        });
    }

    pub fn extend(&mut self, prefix: &str, other: ValidationReport) {
        for v in other.violations {
            self.violations.push(Violation {
                law: v.law,
                cell: format!("{prefix}{}", v.cell),
            });
        }
    }

    pub fn first_message(&self) -> Option<String> {
        self.violations
            .first()
            .map(|v| format!("{} at {}", v.law, v.cell))
    }

    /// Turns a failed report into an error built by `wrap`.
    pub fn into_result(self, wrap: fn(String) -> Error) -> Result<(), Error> {
        match self.first_message() {
            None => Ok(()),
            Some(msg) => Err(wrap(msg)),
        }
    }
}
