//! Result reports and their table and JSON renderings.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Refines,
    TimelockFree,
    DoesNotTerminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub params: Vec<Param>,
    pub max_states: usize,
    pub jobs: usize,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub kind: CheckKind,
    pub result: Outcome,
    /// States of the explored subject (the implementation for a refinement).
    pub states: usize,
    pub transitions: usize,
    pub compile_ms: f64,
    pub verify_ms: f64,
    pub total_ms: f64,
    pub counterexample: Option<Vec<String>>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub model: String,
    pub assertions: String,
    pub config: ConfigEcho,
    pub build_ms: f64,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

impl RunReport {
    pub fn summarise(rows: &[Row]) -> Summary {
        let count = |o| rows.iter().filter(|r| r.result == o).count();
        Summary {
            total: rows.len(),
            passed: count(Outcome::Pass),
            failed: count(Outcome::Fail),
            errors: count(Outcome::Error),
        }
    }

    /// 0 when everything passed, 1 when something failed, 2 on errors.
    pub fn exit_code(&self) -> i32 {
        if self.summary.errors > 0 {
            2
        } else if self.summary.failed > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialise")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let params: Vec<String> = self.config.params.iter().map(|p| format!("{} = {}", p.name, p.value)).collect();
        let _ = writeln!(out, "model: {}", self.model);
        let _ = writeln!(out, "assertions: {}", self.assertions);
        if !params.is_empty() {
            let _ = writeln!(out, "config: {}", params.join(", "));
        }
        out.push('\n');
        let header = ["Assertion", "Result", "Compile (ms)", "Verify (ms)", "Total (ms)", "States", "Transitions"];
        let cells: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.name.clone(),
                    match r.result {
                        Outcome::Pass => "pass".into(),
                        Outcome::Fail => "FAIL".into(),
                        Outcome::Error => "ERROR".into(),
                    },
                    format!("{:.1}", r.compile_ms),
                    format!("{:.1}", r.verify_ms),
                    format!("{:.1}", r.total_ms),
                    r.states.to_string(),
                    r.transitions.to_string(),
                ]
            })
            .collect();
        let mut width = header.map(str::len);
        for c in &cells {
            for (w, s) in width.iter_mut().zip(c) {
                *w = (*w).max(s.len());
            }
        }
        let line = |cols: &[String]| {
            let mut s = String::new();
            for (i, (c, w)) in cols.iter().zip(width).enumerate() {
                if i < 2 {
                    let _ = write!(s, "{c:<w$}  ");
                } else {
                    let _ = write!(s, "{c:>w$}  ");
                }
            }
            s.trim_end().to_string()
        };
        let _ = writeln!(out, "{}", line(&header.map(String::from)));
        let _ = writeln!(out, "{}", "-".repeat(width.iter().sum::<usize>() + 2 * (width.len() - 1)));
        for c in &cells {
            let _ = writeln!(out, "{}", line(c));
        }
        for r in &self.rows {
            if let Some(e) = &r.error {
                let _ = writeln!(out, "\n{}: {e}", r.name);
            }
        }
        let _ = writeln!(
            out,
            "\n{}/{} assertions pass ({} failed, {} errors)",
            self.summary.passed, self.summary.total, self.summary.failed, self.summary.errors
        );
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MachineStats {
    pub name: String,
    pub configurations: usize,
    pub states: usize,
    pub transitions: usize,
    pub unreachable: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositionStats {
    pub name: String,
    pub states: usize,
    pub transitions: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub model: String,
    pub params: Vec<Param>,
    pub machines: Vec<MachineStats>,
    pub compositions: Vec<CompositionStats>,
    pub warnings: Vec<String>,
}

impl StatsReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model: {}", self.model);
        let params: Vec<String> = self.params.iter().map(|p| format!("{} = {}", p.name, p.value)).collect();
        if !params.is_empty() {
            let _ = writeln!(out, "config: {}", params.join(", "));
        }
        let w = self
            .machines
            .iter()
            .map(|m| m.name.len())
            .chain(self.compositions.iter().map(|c| c.name.len()))
            .chain(["Machine".len()])
            .max()
            .unwrap_or(0);
        let _ = writeln!(out, "\n{:<w$}  {:>14}  {:>10}  {:>11}", "Machine", "Configurations", "States", "Transitions");
        for m in &self.machines {
            let _ = writeln!(
                out,
                "{:<w$}  {:>14}  {:>10}  {:>11}",
                m.name, m.configurations, m.states, m.transitions
            );
        }
        for c in &self.compositions {
            let _ = writeln!(out, "{:<w$}  {:>14}  {:>10}  {:>11}", c.name, "-", c.states, c.transitions);
        }
        if !self.warnings.is_empty() {
            out.push('\n');
        }
        for warn in &self.warnings {
            let _ = writeln!(out, "warning: {warn}");
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayStep {
    pub event: String,
    /// Control state of each component after the event.
    pub components: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub assertion: String,
    pub passed: bool,
    pub counterexample: Vec<String>,
    pub initial: Vec<String>,
    pub replay: Vec<ReplayStep>,
}

impl TraceReport {
    pub fn to_text(&self) -> String {
        if self.passed {
            return "assertion passes; no counterexample\n".into();
        }
        let mut out = String::new();
        let _ = writeln!(out, "counterexample to {} ({} events):", self.assertion, self.counterexample.len());
        for e in &self.counterexample {
            let _ = writeln!(out, "{e}");
        }
        let _ = writeln!(out, "\nreplay:");
        let w = self.replay.iter().map(|s| s.event.len()).max().unwrap_or(0).max("(start)".len());
        let _ = writeln!(out, "  {:<w$}  {}", "(start)", self.initial.join(" | "));
        for s in &self.replay {
            let _ = writeln!(out, "  {:<w$}  {}", s.event, s.components.join(" | "));
        }
        out
    }
}
