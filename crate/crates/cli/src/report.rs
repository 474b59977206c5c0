//! Machine-readable verification reports.
//!
//! Each suite produces a [`Report`]: a list of named checks, every one
//! carrying the measured deviation and the tolerance it was held to. The
//! JSON rendering goes to stdout and is deterministic for a fixed seed,
//! except for the trailing `duration_ms` field; the human-readable lines
//! go to stderr.

use std::io::Write as _;

use serde::{Deserialize, Serialize};

/// One verified inequality (or equality, or boolean fact).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// `"pass"` or `"fail"`.
    pub status: String,
    /// The measured quantity, usually a maximal absolute deviation.
    pub max_dev: f64,
    /// The bound it is compared against.
    pub tolerance: f64,
    /// How the two relate when the check passes: `"<="`, `">"` or `"=="`.
    pub cmp: String,
    /// Optional structured evidence (counterexample configurations,
    /// per-window spreads, …).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl Check {
    /// Pass iff `dev <= tol`. Adding `0.0` turns a negative zero (an
    /// artifact of empty float sums) into a plain zero before display.
    pub fn at_most(name: impl Into<String>, dev: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            status: if dev <= tol { "pass" } else { "fail" }.into(),
            max_dev: dev + 0.0,
            tolerance: tol,
            cmp: "<=".into(),
            witness: None,
        }
    }

    /// Pass iff `dev > bound` — for checks that must see a genuinely
    /// nonzero effect (non-associativity, inequivalence witnesses).
    pub fn at_least(name: impl Into<String>, dev: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            status: if dev > bound { "pass" } else { "fail" }.into(),
            max_dev: dev + 0.0,
            tolerance: bound,
            cmp: ">".into(),
            witness: None,
        }
    }

    /// Pass iff `ok`; rendered as `1 == 1` or `0 == 1`.
    pub fn boolean(name: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            status: if ok { "pass" } else { "fail" }.into(),
            max_dev: if ok { 1.0 } else { 0.0 },
            tolerance: 1.0,
            cmp: "==".into(),
            witness: None,
        }
    }

    pub fn with_witness(mut self, w: serde_json::Value) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

/// A full suite run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Wall-clock time; the only nondeterministic field.
    pub duration_ms: u64,
}

impl Report {
    pub fn new(suite: impl Into<String>, seed: u64, samples: usize, checks: Vec<Check>) -> Self {
        Report {
            suite: suite.into(),
            seed,
            samples,
            passed: checks.iter().all(Check::passed),
            checks,
            duration_ms: 0,
        }
    }

    /// Pretty JSON to stdout, one summary line per check to stderr.
    /// Returns the process exit code: 0 if every check passed, 1 otherwise.
    pub fn emit(&self) -> i32 {
        println!(
            "{}",
            serde_json::to_string_pretty(self).expect("report serializes")
        );
        let mut err = std::io::stderr().lock();
        for c in &self.checks {
            let _ = writeln!(
                err,
                "[{}] {}: {:.3e} {} {:.3e}",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.max_dev,
                c.cmp,
                c.tolerance
            );
        }
        let _ = writeln!(
            err,
            "{}: {} ({}/{} checks, {} ms)",
            self.suite,
            if self.passed { "pass" } else { "FAIL" },
            self.checks.iter().filter(|c| c.passed()).count(),
            self.checks.len(),
            self.duration_ms
        );
        if self.passed {
            0
        } else {
            1
        }
    }
}
