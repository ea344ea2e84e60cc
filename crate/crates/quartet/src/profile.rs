//! Task profiles: per-benchmark bundles of tool registry, terminal action
//! name, sub-agent output format, and prompt template ids.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::prompt::TemplateRole;
use crate::record::SubtaskStatus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileName {
    Gaia,
    Terminal,
    Swe,
    Custom,
}

impl ProfileName {
    pub fn parse(s: &str) -> Option<ProfileName> {
        match s.to_ascii_lowercase().as_str() {
            "gaia" => Some(ProfileName::Gaia),
            "terminal" => Some(ProfileName::Terminal),
            "swe" => Some(ProfileName::Swe),
            "custom" => Some(ProfileName::Custom),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProfileName::Gaia => "gaia",
            ProfileName::Terminal => "terminal",
            ProfileName::Swe => "swe",
            ProfileName::Custom => "custom",
        }
    }
}

/// How a sub-agent emits actions: a single JSON action object, or the
/// two-section DISCUSSION/COMMAND protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubagentOutputFormat {
    JsonObject,
    DiscussionCommand,
}

#[derive(Debug, Clone)]
pub struct TaskProfile {
    pub name: ProfileName,
    /// Action name that terminates a run: "complete" or "submit".
    pub terminal_action_name: String,
    /// Tool names available under this profile, in documentation order.
    pub tool_registry: Vec<String>,
    pub subagent_output_format: SubagentOutputFormat,
    pub prompt_template_ids: BTreeMap<TemplateRole, String>,
    /// Statuses a sub-agent may self-report in finish. Timeout is always
    /// engine-assigned and never accepted from the model.
    pub allowed_finish_statuses: Vec<SubtaskStatus>,
    /// Whether every subtask gets a fresh sandbox session (true) or the
    /// session persists across subtasks within one task (false).
    pub fresh_session_per_subtask: bool,
}

impl TaskProfile {
    pub fn named(name: ProfileName) -> TaskProfile {
        match name {
            ProfileName::Gaia => TaskProfile {
                name,
                terminal_action_name: "complete".into(),
                tool_registry: vec![
                    "GoogleSearchAction".into(),
                    "ExtractUrlContentAction".into(),
                    "ExecuteCodeAction".into(),
                    "ImageAnalysisAction".into(),
                    "ParseAudioAction".into(),
                    "finish".into(),
                ],
                subagent_output_format: SubagentOutputFormat::JsonObject,
                prompt_template_ids: template_ids("gaia"),
                allowed_finish_statuses: vec![
                    SubtaskStatus::Done,
                    SubtaskStatus::Partial,
                    SubtaskStatus::Blocked,
                ],
                fresh_session_per_subtask: true,
            },
            ProfileName::Terminal => TaskProfile {
                name,
                terminal_action_name: "submit".into(),
                tool_registry: vec!["execute".into(), "finish".into()],
                subagent_output_format: SubagentOutputFormat::JsonObject,
                prompt_template_ids: template_ids("terminal"),
                allowed_finish_statuses: vec![SubtaskStatus::Done, SubtaskStatus::Partial],
                fresh_session_per_subtask: true,
            },
            ProfileName::Swe => TaskProfile {
                name,
                terminal_action_name: "submit".into(),
                tool_registry: vec![
                    "execute".into(),
                    "view_file".into(),
                    "edit_file".into(),
                    "finish".into(),
                ],
                subagent_output_format: SubagentOutputFormat::DiscussionCommand,
                prompt_template_ids: template_ids("swe"),
                allowed_finish_statuses: vec![SubtaskStatus::Done, SubtaskStatus::Partial],
                fresh_session_per_subtask: false,
            },
            ProfileName::Custom => TaskProfile {
                name,
                terminal_action_name: "complete".into(),
                tool_registry: vec![
                    "GoogleSearchAction".into(),
                    "ExtractUrlContentAction".into(),
                    "ExecuteCodeAction".into(),
                    "ImageAnalysisAction".into(),
                    "ParseAudioAction".into(),
                    "execute".into(),
                    "view_file".into(),
                    "edit_file".into(),
                    "finish".into(),
                ],
                subagent_output_format: SubagentOutputFormat::JsonObject,
                prompt_template_ids: template_ids("custom"),
                allowed_finish_statuses: vec![
                    SubtaskStatus::Done,
                    SubtaskStatus::Partial,
                    SubtaskStatus::Blocked,
                ],
                fresh_session_per_subtask: true,
            },
        }
    }

    pub fn template_id(&self, role: TemplateRole) -> &str {
        self.prompt_template_ids
            .get(&role)
            .map(|s| s.as_str())
            .unwrap_or_else(|| match role {
                TemplateRole::Summarizer => "summarizer/default",
                TemplateRole::StrategyOptimize => "strategy/optimize",
                TemplateRole::StrategySelect => "strategy/select",
                _ => unreachable!("orchestrator/subagent ids are always set"),
            })
    }

    pub fn has_tool(&self, name: &str) -> bool {
        self.tool_registry.iter().any(|t| t == name)
    }

    /// Tools delegable to a sub-agent: the registry minus the engine-owned
    /// finish action.
    pub fn delegable_tools(&self) -> Vec<String> {
        self.tool_registry.iter().filter(|t| t.as_str() != "finish").cloned().collect()
    }

    pub fn allows_finish_status(&self, status: SubtaskStatus) -> bool {
        self.allowed_finish_statuses.contains(&status)
    }
}

fn template_ids(suffix: &str) -> BTreeMap<TemplateRole, String> {
    let mut ids = BTreeMap::new();
    ids.insert(TemplateRole::Orchestrator, format!("orchestrator/{suffix}"));
    ids.insert(TemplateRole::Subagent, format!("subagent/{suffix}"));
    ids.insert(TemplateRole::Summarizer, "summarizer/default".to_string());
    ids.insert(TemplateRole::StrategyOptimize, "strategy/optimize".to_string());
    ids.insert(TemplateRole::StrategySelect, "strategy/select".to_string());
    ids
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_terminal_action_names() {
        assert_eq!(TaskProfile::named(ProfileName::Gaia).terminal_action_name, "complete");
        assert_eq!(TaskProfile::named(ProfileName::Terminal).terminal_action_name, "submit");
        assert_eq!(TaskProfile::named(ProfileName::Swe).terminal_action_name, "submit");
    }

    #[test]
    fn discussion_command_only_for_swe() {
        for name in [ProfileName::Gaia, ProfileName::Terminal, ProfileName::Custom] {
            assert_eq!(
                TaskProfile::named(name).subagent_output_format,
                SubagentOutputFormat::JsonObject
            );
        }
        assert_eq!(
            TaskProfile::named(ProfileName::Swe).subagent_output_format,
            SubagentOutputFormat::DiscussionCommand
        );
    }

    #[test]
    fn terminal_registry_is_execute_and_finish() {
        let p = TaskProfile::named(ProfileName::Terminal);
        assert_eq!(p.tool_registry, vec!["execute".to_string(), "finish".to_string()]);
        assert_eq!(p.delegable_tools(), vec!["execute".to_string()]);
    }

    #[test]
    fn finish_status_subsets() {
        let gaia = TaskProfile::named(ProfileName::Gaia);
        assert!(gaia.allows_finish_status(SubtaskStatus::Blocked));
        let term = TaskProfile::named(ProfileName::Terminal);
        assert!(!term.allows_finish_status(SubtaskStatus::Blocked));
        assert!(!term.allows_finish_status(SubtaskStatus::Timeout));
    }
}
