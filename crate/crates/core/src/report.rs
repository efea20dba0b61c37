//! Run reports: a text table for people and a JSON document for scripts.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::approx::{CheckBudget, Method, COMPARISON_SLACK};
use crate::groups::Element;
use crate::length::{Axiom, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Settings {
    pub budget: u64,
    pub samples: usize,
    pub seed: u64,
}

impl From<CheckBudget> for Settings {
    fn from(b: CheckBudget) -> Settings {
        Settings {
            budget: b.budget,
            samples: b.samples,
            seed: b.seed,
        }
    }
}

/// One checked bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

impl Verdict {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Verdict {
        Verdict {
            name: name.into(),
            value,
            bound,
            holds: value <= bound + COMPARISON_SLACK,
        }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Verdict {
        Verdict {
            name: name.into(),
            value,
            bound,
            holds: value >= bound - COMPARISON_SLACK,
        }
    }

    pub fn count(name: &str, value: usize, bound: usize) -> Verdict {
        Verdict {
            name: name.into(),
            value: value as f64,
            bound: bound as f64,
            holds: value <= bound,
        }
    }

    pub fn holds(name: &str, holds: bool) -> Verdict {
        Verdict {
            name: name.into(),
            value: if holds { 1.0 } else { 0.0 },
            bound: 1.0,
            holds,
        }
    }
}

/// An element or pair that broke a bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Offender {
    pub check: String,
    pub elements: Vec<Element>,
    pub value: f64,
    pub bound: f64,
}

impl Offender {
    pub fn pair(g: &Element, h: &Element, defect: f64, bound: f64) -> Offender {
        Offender {
            check: "defect".into(),
            elements: vec![g.clone(), h.clone()],
            value: defect,
            bound,
        }
    }

    pub fn from_violation(v: &Violation) -> Offender {
        let at = |i: usize| v.values.get(i).copied().unwrap_or(f64::NAN);
        let bound = match v.axiom {
            Axiom::IdentityZero | Axiom::PositiveOffIdentity => 0.0,
            Axiom::Range => 1.0,
            Axiom::Symmetry | Axiom::ConjugationInvariance => at(1),
            Axiom::Subadditivity => at(1) + at(2),
            Axiom::CommutatorContractive => 4.0 * at(1) * at(2),
        };
        Offender {
            check: serde_json::to_value(v.axiom)
                .ok()
                .and_then(|x| x.as_str().map(str::to_string))
                .unwrap_or_else(|| format!("{:?}", v.axiom)),
            elements: v.elements.clone(),
            value: at(0),
            bound,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: u32,
    pub task: String,
    pub scenario: Value,
    pub settings: Settings,
    pub witnesses: Value,
    pub method: Option<Method>,
    /// The sampling seed when the method sampled, else `None`.
    pub seed: Option<u64>,
    pub pair_count: Option<u64>,
    pub max_defect: Option<f64>,
    pub min_slack: Option<f64>,
    pub verdicts: Vec<Verdict>,
    pub offending: Vec<Offender>,
    /// Per-pair measurements.
    pub pairs: Value,
    pub details: Value,
    pub passed: bool,
}

impl Report {
    pub fn new(task: &str, scenario: Value, settings: Settings) -> Report {
        Report {
            version: crate::scenario::SCHEMA_VERSION,
            task: task.into(),
            scenario,
            settings,
            witnesses: Value::Null,
            method: None,
            seed: None,
            pair_count: None,
            max_defect: None,
            min_slack: None,
            verdicts: Vec::new(),
            offending: Vec::new(),
            pairs: Value::Array(Vec::new()),
            details: Value::Null,
            passed: false,
        }
    }

    pub(crate) fn finish(&mut self) {
        if let Some(Method::Sampled { seed, .. }) = self.method {
            self.seed = Some(seed);
        }
        self.passed = self.verdicts.iter().all(|v| v.holds);
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    /// Pretty JSON; identical inputs give identical bytes.
    pub fn to_machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "task: {}", self.task);
        let method = match self.method {
            None => "n/a".to_string(),
            Some(Method::Exhaustive) => "exhaustive".to_string(),
            Some(Method::Sampled { samples, seed }) => format!("sampled ({samples} samples, seed {seed})"),
        };
        match self.pair_count {
            Some(n) => {
                let _ = writeln!(out, "method: {method}, pairs: {n}");
            }
            None => {
                let _ = writeln!(out, "method: {method}");
            }
        }
        let _ = writeln!(out, "seed: {}", self.settings.seed);
        if let Some(d) = self.max_defect {
            let _ = writeln!(out, "max defect: {d:.12}");
        }
        if let Some(s) = self.min_slack {
            let _ = writeln!(out, "min slack: {s:.12}");
        }
        if !self.witnesses.is_null() {
            let _ = writeln!(out, "witnesses: {}", compact(&self.witnesses));
        }

        let width = self.verdicts.iter().map(|v| v.name.len()).max().unwrap_or(0).max(5);
        let _ = writeln!(out, "\n{:<6}{:<width$}  {:>16}  {:>16}", "", "bound", "value", "limit");
        for v in &self.verdicts {
            let _ = writeln!(
                out,
                "{:<6}{:<width$}  {:>16.12}  {:>16.12}",
                if v.holds { "PASS" } else { "FAIL" },
                v.name,
                v.value,
                v.bound
            );
        }

        if !self.offending.is_empty() {
            let cells: Vec<String> = self
                .offending
                .iter()
                .map(|o| {
                    let parts: Vec<String> = o.elements.iter().map(Element::to_json).collect();
                    format!("({})", parts.join(", "))
                })
                .collect();
            let ew = cells.iter().map(String::len).max().unwrap_or(0).max(8);
            let cw = self.offending.iter().map(|o| o.check.len()).max().unwrap_or(0).max(5);
            let _ = writeln!(out, "\noffending:");
            let _ = writeln!(out, "  {:<cw$}  {:<ew$}  {:>16}  {:>16}", "check", "elements", "value", "limit");
            for (o, cell) in self.offending.iter().zip(&cells) {
                let _ = writeln!(out, "  {:<cw$}  {:<ew$}  {:>16.12}  {:>16.12}", o.check, cell, o.value, o.bound);
            }
        }

        let _ = writeln!(out, "\nscenario: {}", compact(&self.scenario));
        let _ = writeln!(out, "result: {}", if self.passed { "PASS" } else { "FAIL" });
        out
    }
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("value serializes")
}
