//! The four-tuple agent specification and its validation.

use serde::{Deserialize, Serialize};

use crate::gateway::ModelRegistry;
use crate::profile::TaskProfile;

/// The instantiable four-tuple (instruction, context, tools, model) that a
/// delegation carries. A sub-agent conditions only on this.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSpec {
    /// Subtask objective and success criteria.
    pub instruction: String,
    /// Curated working context; may be empty.
    pub context: String,
    /// Tool names the sub-agent may invoke, in order. `finish` is implicit
    /// and always available.
    pub tools: Vec<String>,
    /// Model alias, resolved through the model registry.
    pub model: String,
}

impl AgentSpec {
    pub fn new(
        instruction: impl Into<String>,
        context: impl Into<String>,
        tools: Vec<String>,
        model: impl Into<String>,
    ) -> Self {
        AgentSpec {
            instruction: instruction.into(),
            context: context.into(),
            tools,
            model: model.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

/// Validation outcome: zero violations means the spec satisfies every
/// invariant under the given profile and registry.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, field: &str, message: String) {
        self.violations.push(Violation { field: field.to_string(), message });
    }
}

/// Check an AgentSpec against profile and registry. Failures are data, not
/// faults: the report names each offending field.
pub fn validate_spec(
    spec: &AgentSpec,
    profile: &TaskProfile,
    models: &ModelRegistry,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    if spec.instruction.trim().is_empty() {
        report.push("instruction", "instruction empty".to_string());
    }
    let mut seen = Vec::new();
    for tool in &spec.tools {
        if !profile.has_tool(tool) {
            report.push("tools", format!("tool not in registry: {tool}"));
        }
        if seen.contains(&tool) {
            report.push("tools", format!("duplicate tool: {tool}"));
        }
        seen.push(tool);
    }
    if !models.contains(&spec.model) {
        report.push("model", format!("unknown model alias: {}", spec.model));
    }
    report
}
