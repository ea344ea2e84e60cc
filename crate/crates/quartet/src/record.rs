//! Structured observations returned by sub-agent executions.

use serde::{Deserialize, Serialize};

use crate::micro_usd::MicroUsd;
use crate::spec::AgentSpec;

/// Subtask outcome vocabulary. Profiles restrict which subset a sub-agent
/// may self-report; `Timeout` is always engine-assigned on step exhaustion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubtaskStatus {
    Done,
    Partial,
    Blocked,
    Timeout,
}

impl SubtaskStatus {
    pub fn parse(s: &str) -> Option<SubtaskStatus> {
        match s {
            "done" => Some(SubtaskStatus::Done),
            "partial" => Some(SubtaskStatus::Partial),
            "blocked" => Some(SubtaskStatus::Blocked),
            "timeout" => Some(SubtaskStatus::Timeout),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SubtaskStatus::Done => "done",
            SubtaskStatus::Partial => "partial",
            SubtaskStatus::Blocked => "blocked",
            SubtaskStatus::Timeout => "timeout",
        }
    }
}

/// The observation o_t handed back to the orchestrator after a delegation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubtaskRecord {
    pub spec: AgentSpec,
    pub status: SubtaskStatus,
    pub result: String,
    pub completed: Vec<String>,
    pub issues: Vec<String>,
    /// Reviewer summary, nominally 5-10 bullets.
    pub summary: Vec<String>,
    /// Set when the reviewer returned fewer than 5 bullets (or failed and
    /// the summary fell back to the finish message).
    #[serde(default)]
    pub summary_flagged: bool,
    pub steps_used: u32,
    pub cost: MicroUsd,
    pub wall_time: f64,
}

impl SubtaskRecord {
    /// Render one record for embedding in the orchestrator's history
    /// section.
    pub fn render(&self, index: usize) -> String {
        let mut out = String::new();
        out.push_str(&format!("--- Subtask {index} ---\n"));
        out.push_str(&format!("Model: {}\n", self.spec.model));
        out.push_str(&format!("Instruction: {}\n", self.spec.instruction));
        out.push_str(&format!("Status: {}\n", self.status.as_str()));
        out.push_str(&format!("Result: {}\n", self.result));
        if !self.completed.is_empty() {
            out.push_str("Completed:\n");
            for item in &self.completed {
                out.push_str(&format!("  - {item}\n"));
            }
        }
        if !self.issues.is_empty() {
            out.push_str("Issues:\n");
            for item in &self.issues {
                out.push_str(&format!("  - {item}\n"));
            }
        }
        if !self.summary.is_empty() {
            out.push_str("Key findings:\n");
            for bullet in &self.summary {
                out.push_str(&format!("  - {bullet}\n"));
            }
        }
        out.push_str(&format!(
            "Steps used: {}  Cost: {}\n",
            self.steps_used,
            self.cost.to_usd_string()
        ));
        out
    }
}

/// Render the whole subtask history, oldest first.
pub fn render_history(history: &[SubtaskRecord]) -> String {
    let mut out = String::new();
    for (i, record) in history.iter().enumerate() {
        out.push_str(&record.render(i + 1));
        out.push('\n');
    }
    out
}
