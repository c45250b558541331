use serde::Serialize;

use crate::symkernel::{GradedSeries, ZeroStatus, ZeroTest};

/// One component of an identity check that did not vanish symbolically.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Finding {
    pub check: String,
    pub indices: Vec<String>,
    pub residue: String,
    pub status: ZeroStatus,
}

/// Outcome of an identity check over many components.
///
/// Only components that are not symbolically zero are listed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub status: ZeroStatus,
    pub checked: usize,
    pub findings: Vec<Finding>,
}

impl Report {
    pub fn new(check: &str) -> Self {
        Report {
            check: check.into(),
            status: ZeroStatus::SymbolicZero,
            checked: 0,
            findings: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status.is_zero()
    }

    /// Records a residue that should vanish.
    pub fn record(
        &mut self,
        indices: Vec<String>,
        residue: &GradedSeries,
        test: &ZeroTest,
    ) -> ZeroStatus {
        let status = residue.zero_status(test);
        self.checked += 1;
        self.status = self.status.and(status);
        if status != ZeroStatus::SymbolicZero {
            self.findings.push(Finding {
                check: self.check.clone(),
                indices,
                residue: residue.display(),
                status,
            });
        }
        status
    }

    /// Records a structural condition.
    pub fn require(&mut self, check: &str, indices: Vec<String>, ok: bool, detail: String) {
        self.checked += 1;
        if !ok {
            self.status = ZeroStatus::Nonzero;
            self.findings.push(Finding {
                check: check.into(),
                indices,
                residue: detail,
                status: ZeroStatus::Nonzero,
            });
        }
    }

    pub fn absorb(&mut self, other: Report) {
        self.checked += other.checked;
        self.status = self.status.and(other.status);
        self.findings.extend(other.findings);
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}
