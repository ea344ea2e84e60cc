//! Prompt templates and placeholder rendering.
//!
//! Template bodies use `{name}` placeholders; literal braces are escaped as
//! `{{` and `}}`. Rendering is a pure function of (template, bindings) and
//! fails loudly on any unresolved placeholder.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("missing placeholder binding: {0}")]
    MissingPlaceholder(String),
    #[error("malformed template {id}: {reason}")]
    MalformedTemplate { id: String, reason: String },
    #[error("no template registered for id: {0}")]
    UnknownTemplate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateRole {
    Orchestrator,
    Subagent,
    Summarizer,
    StrategyOptimize,
    StrategySelect,
}

#[derive(Debug, Clone)]
pub struct PromptTemplate {
    pub id: String,
    pub role: TemplateRole,
    pub body: String,
    pub required_placeholders: BTreeSet<String>,
}

impl PromptTemplate {
    pub fn new(id: &str, role: TemplateRole, body: &str) -> Self {
        let required = placeholders_in(body);
        PromptTemplate {
            id: id.to_string(),
            role,
            body: body.to_string(),
            required_placeholders: required,
        }
    }

    /// Substitute every `{name}` with its binding. All placeholders in the
    /// body must be bound; the output contains no unresolved placeholder.
    pub fn render(&self, bindings: &BTreeMap<&str, String>) -> Result<String, PromptError> {
        let mut out = String::with_capacity(self.body.len());
        let mut chars = self.body.chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                '{' => {
                    if chars.peek() == Some(&'{') {
                        chars.next();
                        out.push('{');
                        continue;
                    }
                    let mut name = String::new();
                    for n in chars.by_ref() {
                        if n == '}' {
                            break;
                        }
                        name.push(n);
                    }
                    if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                        return Err(PromptError::MalformedTemplate {
                            id: self.id.clone(),
                            reason: format!("bad placeholder '{{{name}'"),
                        });
                    }
                    match bindings.get(name.as_str()) {
                        Some(value) => out.push_str(value),
                        None => return Err(PromptError::MissingPlaceholder(name)),
                    }
                }
                '}' => {
                    if chars.peek() == Some(&'}') {
                        chars.next();
                        out.push('}');
                    } else {
                        return Err(PromptError::MalformedTemplate {
                            id: self.id.clone(),
                            reason: "unescaped '}'".into(),
                        });
                    }
                }
                other => out.push(other),
            }
        }
        Ok(out)
    }
}

/// Placeholder names appearing in a body (escapes excluded).
pub fn placeholders_in(body: &str) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    let mut chars = body.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '{' {
            if chars.peek() == Some(&'{') {
                chars.next();
                continue;
            }
            let mut name = String::new();
            for n in chars.by_ref() {
                if n == '}' {
                    break;
                }
                name.push(n);
            }
            if !name.is_empty() && name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                names.insert(name);
            }
        } else if c == '}' && chars.peek() == Some(&'}') {
            chars.next();
        }
    }
    names
}

/// Registry of built-in templates keyed by id.
#[derive(Debug, Clone)]
pub struct TemplateStore {
    templates: BTreeMap<String, PromptTemplate>,
}

impl Default for TemplateStore {
    fn default() -> Self {
        Self::builtin()
    }
}

impl TemplateStore {
    pub fn builtin() -> Self {
        let mut templates = BTreeMap::new();
        let all = [
            PromptTemplate::new("orchestrator/gaia", TemplateRole::Orchestrator, ORCH_GAIA),
            PromptTemplate::new("orchestrator/terminal", TemplateRole::Orchestrator, ORCH_TERMINAL),
            PromptTemplate::new("orchestrator/swe", TemplateRole::Orchestrator, ORCH_SWE),
            PromptTemplate::new("orchestrator/custom", TemplateRole::Orchestrator, ORCH_CUSTOM),
            PromptTemplate::new("subagent/gaia", TemplateRole::Subagent, SUBAGENT_GAIA),
            PromptTemplate::new("subagent/terminal", TemplateRole::Subagent, SUBAGENT_TERMINAL),
            PromptTemplate::new("subagent/swe", TemplateRole::Subagent, SUBAGENT_SWE),
            PromptTemplate::new("subagent/custom", TemplateRole::Subagent, SUBAGENT_CUSTOM),
            PromptTemplate::new("summarizer/default", TemplateRole::Summarizer, SUMMARIZER),
            PromptTemplate::new("strategy/optimize", TemplateRole::StrategyOptimize, STRATEGY_OPTIMIZE),
            PromptTemplate::new("strategy/select", TemplateRole::StrategySelect, STRATEGY_SELECT),
        ];
        for t in all {
            templates.insert(t.id.clone(), t);
        }
        TemplateStore { templates }
    }

    pub fn get(&self, id: &str) -> Result<&PromptTemplate, PromptError> {
        self.templates.get(id).ok_or_else(|| PromptError::UnknownTemplate(id.to_string()))
    }

    pub fn insert(&mut self, template: PromptTemplate) {
        self.templates.insert(template.id.clone(), template);
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(|s| s.as_str())
    }
}

/// Default model-selection strategy block embedded in orchestrator prompts;
/// the in-context learning loop replaces it with learned text.
pub const DEFAULT_STRATEGY_BLOCK: &str = "- Choose cheaper models for simple tasks\n- Choose more capable models for complex reasoning or critical attempts";

/// Sentinel rendered in place of the subtask history when none exists.
pub const NO_HISTORY_SENTINEL: &str = "No subtasks completed yet.";

const ORCH_GAIA: &str = r#"[GAIA BENCHMARK - QUESTION ANSWERING TASK]
You are the MainAgent (Orchestrator). Your task is to solve the given QUESTION by decomposing it into subtasks and delegating each to a sub-agent.

DECISION PROCESS:
1. REVIEW the SUBTASK HISTORY below - check status, result, and key findings of each attempt
2. EVALUATE: Do the results SUFFICIENTLY answer the QUESTION?
   - If any subtask returned a valid result with status "done" -> Consider using 'complete'
   - If subtask status is "incomplete" -> Review its key findings to see what was accomplished
3. DECIDE next action:
   - Results sufficient -> Use 'complete' with the answer
   - Need more work -> Use 'delegate_task' for the REMAINING work (don't repeat what's done)

BUDGET AWARENESS:
- You have LIMITED attempts (see Progress below)
- Each delegation costs time and resources - choose models wisely based on task complexity
- If a result looks correct and was verified, trust it and complete

==== MODEL SELECTION GUIDE ====
{model_pricing_table}

Model Selection Strategy:
{strategy_block}

==== Progress ====
[Attempt {attempt_index}/{max_attempts}] Remaining {remaining_attempts} attempts
Budget is limited. Make each attempt count.
{budget_warning}

==== QUESTION ====
{instruction}

==== SUBTASK HISTORY ====
{subtask_history}

==== AVAILABLE TOOLS ====
{tools_description}

==== OUTPUT ====
ANSWER FORMAT: GAIA requires precise, concise answers (single word, number, or short phrase). Do NOT include explanations in the answer field.

Return JSON:

If results are SUFFICIENT:
{{
  "action": "complete",
  "reasoning": "The subtask results show [X], which answers the question",
  "params": {{ "answer": "concise answer" }}
}}

If more work is NEEDED:
{{
  "action": "delegate_task",
  "reasoning": "We have [X] from previous attempts, but still need [Y] to answer the question",
  "params": {{
    "task_instruction": "A SPECIFIC, ACTIONABLE subtask (e.g., 'Extract second word from abstract of paper 2211.xxxxx')",
    "context": "Relevant findings from previous attempts",
    "model": "one of {sub_models}",
    "tools": ["GoogleSearchAction", "ExtractUrlContentAction", "ExecuteCodeAction", "ImageAnalysisAction", "ParseAudioAction"]
  }}
}}
"#;

const ORCH_TERMINAL: &str = r#"You are the MainAgent (Orchestrator). Your task is to complete the given software installation/configuration task by delegating to SubAgents.

CRITICAL: CONTAINER LIFECYCLE
- Each SubAgent runs in a FRESH container - if you delegate_task again, the previous work will be lost
- When SubAgent reports status="done", use 'submit' immediately to run tests in that container

==== DECISION PROCESS ====
1. READ the original TASK carefully - identify ALL requirements and edge cases
2. REVIEW SUBTASK HISTORY - check status and completed steps
3. VERIFY SubAgent's work against TASK requirements:
   - Did SubAgent test ALL requirements mentioned in TASK?
   - Did SubAgent test edge cases? (e.g., if TASK mentions "keyboard interrupt", was it actually tested?)
   - Are SubAgent's "completed" items actually addressing the TASK requirements?
4. DECIDE:
   - status="done" AND verification passes -> Use 'submit'
   - status="done" BUT some requirements are not met -> Use 'delegate_task' to fix
   - status="partial" -> Use 'delegate_task' with context about what worked/failed

{budget_warning}

==== MODEL SELECTION ====
{model_pricing_table}

Model Selection Strategy:
{strategy_block}

==== Progress ====
[Attempt {attempt_index}/{max_attempts}] Remaining {remaining_attempts} attempts

==== TASK ====
{instruction}

==== SUBTASK HISTORY ====
{subtask_history}

==== AVAILABLE TOOLS ====
{tools_description}

==== OUTPUT ====
Return JSON:

If SubAgent status="done" AND you verified all TASK requirements are met:
{{
  "action": "submit",
  "reasoning": "Verified: [list which TASK requirements were addressed]. Submitting.",
  "params": {{ "reason": "Task completed: [specific accomplishments matching TASK requirements]" }}
}}

If SubAgent status="done" BUT verification shows gaps:
{{
  "action": "delegate_task",
  "reasoning": "SubAgent claimed done but [specific gap]: TASK requires [X] but SubAgent only tested [Y]",
  "params": {{
    "task_instruction": "CRITICAL: Previous attempt missed [specific requirement]. You MUST: [exact steps to fix]",
    "context": "PREVIOUS SUBAGENT CLAIMED DONE BUT MISSED: [specific gap]\n- WORKED: [steps to keep]\n- MUST FIX: [what was missed]",
    "model": "one of {sub_models}"
  }}
}}

If SubAgent status="partial":
{{
  "action": "delegate_task",
  "reasoning": "SubAgent made partial progress, need to continue with [remaining work]",
  "params": {{
    "task_instruction": "Continue from where previous SubAgent left off: [specific next steps]",
    "context": "From SUBTASK HISTORY:\n- WORKED: [steps to REPEAT]\n- FAILED: [approaches to AVOID]",
    "model": "one of {sub_models}"
  }}
}}
"#;

const ORCH_SWE: &str = r#"You are the MainAgent (Orchestrator) for a SWE-bench task. Your goal is to fix a GitHub issue by delegating work to SubAgents.

==== TASK ====
{instruction}

REPOSITORY: {repo}
INSTANCE: {instance_id}

==== DECISION PROCESS ====
1. READ the TASK carefully - understand the GitHub issue and what needs to be fixed
2. REVIEW SUBTASK HISTORY - check SubAgent's progress, completed steps, and test results
3. VERIFY against TASK requirements:
   - Did SubAgent locate the buggy code?
   - Did SubAgent make appropriate code changes?
   - Did SubAgent run tests and confirm the fix works?
4. DECIDE:
   - status="done" AND tests pass -> Use 'submit'
   - status="done" BUT tests fail or incomplete -> Use 'delegate_task' to fix remaining issues
   - status="partial" -> Use 'delegate_task' with guidance on next steps

CRITICAL: SWE-BENCH CONTAINER BEHAVIOR
- When SubAgent reports status="done" with passing tests, use 'submit' to trigger final evaluation
- 'submit' runs the official test suite (FAIL_TO_PASS + PASS_TO_PASS tests) to determine success

==== MODEL SELECTION ====
{model_pricing_table}

Model Selection Strategy:
{strategy_block}

==== Progress ====
[Attempt {attempt_index}/{max_attempts}] Remaining {remaining_attempts} attempts
{budget_warning}

==== SUBTASK HISTORY ====
{subtask_history}

==== AVAILABLE TOOLS ====
{tools_description}

==== OUTPUT ====
Return JSON:

If SubAgent status="done" AND tests pass:
{{
  "action": "submit",
  "reasoning": "Verified: [what was fixed, which tests passed]. Submitting for evaluation.",
  "params": {{ "reason": "Fix verified: [specific fix description]" }}
}}

If SubAgent status="done" BUT tests fail or incomplete:
{{
  "action": "delegate_task",
  "reasoning": "SubAgent reported done but [specific issue]: tests show [failure details]",
  "params": {{
    "task_instruction": "CRITICAL: Previous fix incomplete. [specific next steps needed]",
    "context": "ISSUE: [what failed]\n- DONE: [completed work]\n- TODO: [remaining work]",
    "model": "one of {sub_models}"
  }}
}}

If SubAgent status="partial":
{{
  "action": "delegate_task",
  "reasoning": "SubAgent made partial progress: [summary]. Need to [next steps]",
  "params": {{
    "task_instruction": "Continue: [specific next steps based on SUBTASK HISTORY]",
    "context": "From previous attempt:\n- WORKED: [keep these]\n- FAILED: [avoid these]",
    "model": "one of {sub_models}"
  }}
}}
"#;

const ORCH_CUSTOM: &str = r#"You are the MainAgent (Orchestrator). Your task is to solve the given GOAL by decomposing it into subtasks and delegating each to a sub-agent.

DECISION PROCESS:
1. REVIEW the SUBTASK HISTORY below - check status, result, and key findings of each attempt
2. EVALUATE: Do the results SUFFICIENTLY achieve the GOAL?
3. DECIDE next action:
   - Results sufficient -> Use 'complete' with the answer
   - Need more work -> Use 'delegate_task' for the REMAINING work (don't repeat what's done)

==== MODEL SELECTION GUIDE ====
{model_pricing_table}

Model Selection Strategy:
{strategy_block}

==== Progress ====
[Attempt {attempt_index}/{max_attempts}] Remaining {remaining_attempts} attempts
Budget is limited. Make each attempt count.
{budget_warning}

==== GOAL ====
{instruction}

==== SUBTASK HISTORY ====
{subtask_history}

==== AVAILABLE TOOLS ====
{tools_description}

==== OUTPUT ====
Return JSON:

If results are SUFFICIENT:
{{
  "action": "complete",
  "reasoning": "The subtask results show [X], which achieves the goal",
  "params": {{ "answer": "final answer" }}
}}

If more work is NEEDED:
{{
  "action": "delegate_task",
  "reasoning": "We have [X] from previous attempts, but still need [Y]",
  "params": {{
    "task_instruction": "A SPECIFIC, ACTIONABLE subtask",
    "context": "Relevant findings from previous attempts",
    "model": "one of {sub_models}",
    "tools": ["..."]
  }}
}}
"#;

const SUBAGENT_GAIA: &str = r#"==== Progress ====
[Step {current_step}/{max_steps}] Remaining {remaining_steps} steps
{budget_warning}

==== Your Task (from MainAgent) ====
{task_instruction}

==== Context ====
{context}

==== Original Question (for reference) ====
{original_question}

==== Available Tools ====
{action_space}

==== Guidelines ====
1. Focus on completing YOUR TASK above
2. Think step by step before outputting an action
3. Write key observations to the "memory" field
4. Use print() in ExecuteCodeAction to see computation results
5. Once done, use 'finish' IMMEDIATELY

BUDGET: When remaining_steps <= 5, use 'finish' NOW!

==== Output Format ====
```json
{{
    "action": "<tool_name>",
    "params": {{}},
    "memory": "<observations>"
}}
```

==== Memory ====
{memory}

==== Current Observation ====
{obs}
"#;

const SUBAGENT_TERMINAL: &str = r#"==== Progress ====
[Step {current_step}/{max_steps}] Remaining: {remaining_steps} step(s)
{budget_warning}
If you run out of steps without "finish", your work is lost and marked as timeout.

==== Your Task (from MainAgent) ====
{task_instruction}

==== Context (from previous attempts) ====
{context}
Use this info: repeat what WORKED, avoid what FAILED.

==== Original Question (for reference) ====
{original_question}

==== Action Space ====
{action_space}

==== Memory ====
Recent memory:
{memory}

==== Current Observation ====
{obs}

==== Thinking ====
Think step by step before outputting an action. Write key reasoning in memory for future steps.

==== Action Guidelines ====
You have TWO actions available:

1. **execute** - Run shell commands and observe results
   - Use this to install packages, configure services, verify status, etc.
   - Example: "apt update && apt install -y nginx"

2. **finish** - Report your progress to MainAgent
   - Use when task is COMPLETE (status="done")
   - Use when you made PROGRESS but need more work (status="partial")
   - MUST use before running out of steps! Your work is LOST if you timeout.

**What to report in finish:**
- completed: List SUCCESSFUL steps that WORKED (e.g., ["apt update succeeded", "nginx installed"])
- issues: List FAILED attempts with WHY (e.g., ["nginx -v failed: command not found"])
- message: Brief summary of current state

This info helps the NEXT SubAgent know what to repeat and what to avoid.

==== Output Format ====
CRITICAL: You MUST reply with ONLY a JSON object. No explanations, no markdown, no other text.

For execute:
{{"action": "execute", "params": {{"command": "your shell command"}}, "memory": "key findings"}}

For finish:
{{"action": "finish", "params": {{"status": "done|partial", "completed": [...], "issues": [...], "message": "..."}}, "memory": "final notes"}}
"#;

const SUBAGENT_SWE: &str = r#"You are an autonomous software engineering agent tasked with solving GitHub issues.
You have access to a specialized command interface (ACI) for navigating, viewing, editing, and testing code.
You will work in a Docker container with the repository already cloned and checked out to the correct commit.

==== Progress ====
[Step {current_step}/{max_steps}] Remaining: {remaining_steps} step(s)
{budget_warning}
If you run out of steps without "finish", your work is lost and marked as timeout.

==== Your Task (from MainAgent) ====
{task_instruction}

==== Context (from previous attempts) ====
{context}

==== Current State ====
{state_info}

==== Command Reference ====
{command_docs}

=== FINISH (Report to MainAgent) ===
finish <status> <message>
    Report your progress back to MainAgent. Status MUST be one of:
    - done: Task completed successfully, tests pass
    - partial: Made progress but not finished (e.g., found bug but fix not working)

==== Memory ====
Recent memory:
{memory}

==== Current Observation ====
{observation}

==== OUTPUT FORMAT (STRICT) ====
You MUST output EXACTLY two sections in this order. No other text allowed.

DISCUSSION
<your reasoning here>

COMMAND
<single command here>

RULES:
- DISCUSSION must contain your step-by-step reasoning
- COMMAND must contain exactly ONE command on a single line
- After COMMAND line, do NOT add any explanation, examples, or comments
- Do NOT output anything after the command
"#;

const SUBAGENT_CUSTOM: &str = r#"==== Progress ====
[Step {current_step}/{max_steps}] Remaining {remaining_steps} steps
{budget_warning}

==== Your Task (from MainAgent) ====
{task_instruction}

==== Context ====
{context}

==== Original Question (for reference) ====
{original_question}

==== Available Tools ====
{action_space}

==== Guidelines ====
1. Focus on completing YOUR TASK above
2. Think step by step before outputting an action
3. Write key observations to the "memory" field
4. Once done, use 'finish' IMMEDIATELY

BUDGET: When remaining_steps <= 5, use 'finish' NOW!

==== Output Format ====
```json
{{
    "action": "<tool_name>",
    "params": {{}},
    "memory": "<observations>"
}}
```

==== Memory ====
{memory}

==== Current Observation ====
{obs}
"#;

const SUMMARIZER: &str = r#"You are a trajectory summarizer. Review the SubAgent's execution trace.
Compare the execution trace against the original task requirements.

== ORIGINAL TASK ==
{original_question}

== EXECUTION TRACE ==
{trace_text}

== OUTPUT ==
Based on the trace, answer:
1. COMPLETED: What requirements from the original task were actually done?
2. REMAINING: What requirements are still missing or not properly tested?

Summarize in 5-10 bullets: key progress, problems, remaining issues.
Output ONLY bullets. Be specific and concise. Output ONLY the two sections above."#;

const STRATEGY_OPTIMIZE: &str = r#"You are optimizing the MainAgent strategy block for agentic tasks.
Focus on selecting sub-models, deciding when to delegate, and managing cost vs performance.
You need to analyze the model ability and cost on this task,
and create a better strategy for the main agent to select cheaper models while keeping the performance.

Current strategy block:
{strategy}

Evaluation summary:
- pass_rate: {pass_rate}
- avg_reward: {avg_reward}
- total_cost: {total_cost}

Recent trajectories (summarized):
{trajectories}

Write one improved strategy block ONLY. Output in XML:
<prompt>...strategy text...</prompt>
"#;

const STRATEGY_SELECT: &str = r#"You are comparing two MainAgent strategy prompts for agentic tasks.
Summarize each trajectory's strengths/weaknesses,
relate them to the strategy text,
then decide which strategy is better overall considering BOTH performance and cost.

# A (parent/best-so-far)
pass_rate: {pass_rate_a} / avg_reward: {avg_reward_a} / total_cost: {total_cost_a}
strategy: {strategy_a}
trajectories: {traj_a}

# B (new candidate)
pass_rate: {pass_rate_b} / avg_reward: {avg_reward_b} / total_cost: {total_cost_b}
strategy: {strategy_b}
trajectories: {traj_b}

Respond with XML:
<analysis>your reasoning</analysis>
<choose>A/B</choose>
"#;

#[cfg(test)]
mod tests {
    use super::*;

    fn bind(pairs: &[(&'static str, &str)]) -> BTreeMap<&'static str, String> {
        pairs.iter().map(|(k, v)| (*k, v.to_string())).collect()
    }

    #[test]
    fn renders_placeholders_and_escapes() {
        let t = PromptTemplate::new("t", TemplateRole::Orchestrator, "a {x} {{literal}} b");
        let out = t.render(&bind(&[("x", "X")])).unwrap();
        assert_eq!(out, "a X {literal} b");
    }

    #[test]
    fn missing_binding_is_an_error() {
        let t = PromptTemplate::new("t", TemplateRole::Orchestrator, "{x} {y}");
        let err = t.render(&bind(&[("x", "X")])).unwrap_err();
        assert_eq!(err, PromptError::MissingPlaceholder("y".into()));
    }

    #[test]
    fn collects_required_placeholders() {
        let t = PromptTemplate::new("t", TemplateRole::Subagent, "{a} {{no}} {b} {a}");
        let names: Vec<_> = t.required_placeholders.iter().cloned().collect();
        assert_eq!(names, vec!["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn builtin_templates_render_with_complete_bindings() {
        let store = TemplateStore::builtin();
        for id in store.ids().map(String::from).collect::<Vec<_>>() {
            let t = store.get(&id).unwrap();
            let bindings: BTreeMap<&str, String> = t
                .required_placeholders
                .iter()
                .map(|name| (name.as_str(), format!("<{name}>")))
                .collect();
            let rendered = t.render(&bindings).expect("template renders");
            for name in &t.required_placeholders {
                assert!(rendered.contains(&format!("<{name}>")), "{id} drops {name}");
            }
        }
    }

    #[test]
    fn gaia_orchestrator_declares_expected_placeholders() {
        let store = TemplateStore::builtin();
        let t = store.get("orchestrator/gaia").unwrap();
        for name in [
            "instruction",
            "attempt_index",
            "max_attempts",
            "remaining_attempts",
            "subtask_history",
            "model_pricing_table",
            "tools_description",
            "sub_models",
            "budget_warning",
            "strategy_block",
        ] {
            assert!(t.required_placeholders.contains(name), "missing {name}");
        }
    }
}
