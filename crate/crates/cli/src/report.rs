//! The pass/fail report written to `report.txt`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
}

impl Check {
    /// PASS iff `holds`; a NaN comparison therefore fails.
    pub fn require(name: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            verdict: if holds { Verdict::Pass } else { Verdict::Fail },
            detail: detail.into(),
        }
    }

    pub fn inconclusive(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            verdict: Verdict::Inconclusive,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub title: String,
    /// Free-form `key: value` lines printed before the checks.
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
    /// Set when the solver stopped early.
    pub solver_failure: Option<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn has_failure(&self) -> bool {
        self.checks.iter().any(|c| c.verdict == Verdict::Fail)
    }

    /// 0 when nothing failed, 1 on any FAIL, 3 when the solver stopped.
    pub fn exit_code(&self) -> i32 {
        if self.solver_failure.is_some() {
            3
        } else if self.has_failure() {
            1
        } else {
            0
        }
    }

    pub fn overall(&self) -> Verdict {
        if self.solver_failure.is_some() || self.has_failure() {
            Verdict::Fail
        } else if self.checks.iter().any(|c| c.verdict == Verdict::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for note in &self.notes {
            writeln!(f, "  {note}")?;
        }
        if let Some(failure) = &self.solver_failure {
            writeln!(f, "solver failure: {failure}")?;
        }
        for c in &self.checks {
            writeln!(f, "{:<12} {}: {}", c.verdict.to_string(), c.name, c.detail)?;
        }
        writeln!(f, "overall: {}", self.overall())
    }
}
