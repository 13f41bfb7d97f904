//! Reporting for the acceptance target: each criterion is a closure returning a
//! numeric verdict, timed against its runtime budget.

use std::fmt;
use std::time::{Duration, Instant};

/// What a criterion measured.
#[derive(Debug, Clone, PartialEq)]
pub struct Measured {
    pub pass: bool,
    pub detail: String,
}

impl Measured {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u32,
    pub name: String,
    pub measured: Measured,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.measured.pass && self.elapsed <= self.budget
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let over = if self.elapsed > self.budget { ", over budget" } else { "" };
        write!(
            f,
            "{} {:>2} {}: {} ({:.1} s of {:.0} s{over})",
            if self.pass() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs_f64()
        )
    }
}

/// Runs one criterion; errors count as failures.
pub fn run<E: fmt::Display>(id: u32, name: &str, budget_s: f64, f: impl FnOnce() -> Result<Measured, E>) -> Outcome {
    let start = Instant::now();
    let measured = f().unwrap_or_else(|e| Measured::new(false, format!("error: {e}")));
    Outcome { id, name: name.into(), measured, elapsed: start.elapsed(), budget: Duration::from_secs_f64(budget_s) }
}
