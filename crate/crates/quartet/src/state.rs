//! Orchestrator state and the pure state-transition function.
//!
//! States are immutable values: `transition` consumes a state and returns
//! the next one. Cost bookkeeping is exact integer micro-USD.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::micro_usd::MicroUsd;
use crate::record::SubtaskRecord;
use crate::spec::AgentSpec;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransitionError {
    #[error("transition after terminal state")]
    TransitionAfterTerminal,
    #[error("delegate action requires an observation")]
    MissingObservation,
    #[error("finish action must not carry an observation")]
    UnexpectedObservation,
    #[error("attempt budget exceeded: {used} delegations of {max} allowed")]
    AttemptBudgetExceeded { used: u32, max: u32 },
}

/// Terminal output of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalAnswer {
    /// Answer text (gaia `complete`) or submission reason (terminal/swe
    /// `submit`).
    pub text: String,
    /// The profile action name that produced it.
    pub via: String,
}

/// Action emitted by the orchestrator: it never acts in the environment
/// directly, only delegates or finishes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OrchestratorAction {
    Delegate { reasoning: String, spec: AgentSpec },
    Finish { reasoning: String, answer: FinalAnswer },
}

impl OrchestratorAction {
    pub fn reasoning(&self) -> &str {
        match self {
            OrchestratorAction::Delegate { reasoning, .. } => reasoning,
            OrchestratorAction::Finish { reasoning, .. } => reasoning,
        }
    }

    pub fn is_delegate(&self) -> bool {
        matches!(self, OrchestratorAction::Delegate { .. })
    }
}

/// The orchestrator's evolving state: goal, attempt bookkeeping, completed
/// delegations, and exact accumulated cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrchestratorState {
    pub goal: String,
    /// 1-based index of the attempt currently being decided; equals
    /// completed delegations + 1, capped at max_attempts + 1.
    pub attempt_index: u32,
    pub max_attempts: u32,
    pub history: Vec<SubtaskRecord>,
    pub total_cost: MicroUsd,
    /// Portion of total_cost charged by orchestrator-side completions.
    pub orchestrator_cost: MicroUsd,
    pub terminal: Option<FinalAnswer>,
}

impl OrchestratorState {
    pub fn new(goal: impl Into<String>, max_attempts: u32) -> Self {
        OrchestratorState {
            goal: goal.into(),
            attempt_index: 1,
            max_attempts,
            history: Vec::new(),
            total_cost: MicroUsd::ZERO,
            orchestrator_cost: MicroUsd::ZERO,
            terminal: None,
        }
    }

    pub fn delegations(&self) -> u32 {
        self.history.len() as u32
    }

    pub fn budget_exhausted(&self) -> bool {
        self.delegations() >= self.max_attempts
    }

    /// Charge an orchestrator completion to the running total. Pure:
    /// returns the updated state.
    pub fn with_orchestrator_cost(mut self, cost: MicroUsd) -> Self {
        self.orchestrator_cost += cost;
        self.total_cost += cost;
        self
    }

    /// Compact canonical snapshot used as the per-step state digest.
    pub fn digest(&self) -> String {
        format!(
            "{{\"attempt_index\":{},\"delegations\":{},\"goal\":{},\"max_attempts\":{},\"total_cost_micro_usd\":{}}}",
            self.attempt_index,
            self.delegations(),
            serde_json::to_string(&self.goal).unwrap_or_default(),
            self.max_attempts,
            self.total_cost.as_u64(),
        )
    }
}

/// The state-transition function: fold one (action, observation) pair into
/// the state. Delegate appends the observation and advances the attempt
/// counter; finish freezes the state.
pub fn transition(
    state: &OrchestratorState,
    action: &OrchestratorAction,
    observation: Option<SubtaskRecord>,
) -> Result<OrchestratorState, TransitionError> {
    if state.terminal.is_some() {
        return Err(TransitionError::TransitionAfterTerminal);
    }
    match action {
        OrchestratorAction::Delegate { .. } => {
            let record = observation.ok_or(TransitionError::MissingObservation)?;
            if state.delegations() >= state.max_attempts {
                return Err(TransitionError::AttemptBudgetExceeded {
                    used: state.delegations(),
                    max: state.max_attempts,
                });
            }
            let mut next = state.clone();
            next.total_cost += record.cost;
            next.history.push(record);
            next.attempt_index = state.attempt_index + 1;
            Ok(next)
        }
        OrchestratorAction::Finish { answer, .. } => {
            if observation.is_some() {
                return Err(TransitionError::UnexpectedObservation);
            }
            let mut next = state.clone();
            next.terminal = Some(answer.clone());
            Ok(next)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::SubtaskStatus;

    fn record(cost: u64) -> SubtaskRecord {
        SubtaskRecord {
            spec: AgentSpec::new("t", "", vec![], "model_1"),
            status: SubtaskStatus::Done,
            result: "r".into(),
            completed: vec![],
            issues: vec![],
            summary: vec![],
            summary_flagged: false,
            steps_used: 1,
            cost: MicroUsd::new(cost),
            wall_time: 0.0,
        }
    }

    fn delegate() -> OrchestratorAction {
        OrchestratorAction::Delegate {
            reasoning: "r".into(),
            spec: AgentSpec::new("t", "", vec![], "model_1"),
        }
    }

    fn finish() -> OrchestratorAction {
        OrchestratorAction::Finish {
            reasoning: "r".into(),
            answer: FinalAnswer { text: "a".into(), via: "complete".into() },
        }
    }

    #[test]
    fn first_delegate_bookkeeping() {
        let s0 = OrchestratorState::new("g", 10);
        let s1 = transition(&s0, &delegate(), Some(record(20_000))).unwrap();
        assert_eq!(s1.history.len(), 1);
        assert_eq!(s1.total_cost, MicroUsd::new(20_000));
        assert_eq!(s1.attempt_index, 2);
    }

    #[test]
    fn three_delegates_sum_exactly() {
        // summation oracle: 100_000 + 200_000 + 300_000
        let mut state = OrchestratorState::new("g", 10);
        for cost in [100_000u64, 200_000, 300_000] {
            state = transition(&state, &delegate(), Some(record(cost))).unwrap();
        }
        let expected: MicroUsd = [100_000u64, 200_000, 300_000].iter().map(|&c| MicroUsd::new(c)).sum();
        assert_eq!(state.total_cost, expected);
        assert_eq!(state.total_cost, MicroUsd::new(600_000));
    }

    #[test]
    fn budget_allows_exactly_max_delegations() {
        let mut state = OrchestratorState::new("g", 10);
        for _ in 0..10 {
            state = transition(&state, &delegate(), Some(record(1))).unwrap();
        }
        assert_eq!(state.delegations(), 10);
        assert_eq!(state.attempt_index, 11);
        let err = transition(&state, &delegate(), Some(record(1))).unwrap_err();
        assert_eq!(err, TransitionError::AttemptBudgetExceeded { used: 10, max: 10 });
    }

    #[test]
    fn finish_freezes_state() {
        let s0 = OrchestratorState::new("g", 10);
        let s1 = transition(&s0, &finish(), None).unwrap();
        assert!(s1.terminal.is_some());
        assert_eq!(
            transition(&s1, &delegate(), Some(record(1))).unwrap_err(),
            TransitionError::TransitionAfterTerminal
        );
        assert_eq!(transition(&s1, &finish(), None).unwrap_err(), TransitionError::TransitionAfterTerminal);
    }

    #[test]
    fn delegate_without_observation_fails() {
        let s0 = OrchestratorState::new("g", 10);
        assert_eq!(
            transition(&s0, &delegate(), None).unwrap_err(),
            TransitionError::MissingObservation
        );
    }

    #[test]
    fn transition_is_pure() {
        let s0 = OrchestratorState::new("g", 10);
        let a = transition(&s0, &delegate(), Some(record(7))).unwrap();
        let b = transition(&s0, &delegate(), Some(record(7))).unwrap();
        assert_eq!(a, b);
        assert_eq!(s0.history.len(), 0);
    }

    #[test]
    fn history_order_is_delegation_order() {
        let mut state = OrchestratorState::new("g", 10);
        for (i, cost) in [1u64, 2, 3].iter().enumerate() {
            let mut r = record(*cost);
            r.result = format!("r{i}");
            state = transition(&state, &delegate(), Some(r)).unwrap();
        }
        let results: Vec<_> = state.history.iter().map(|r| r.result.clone()).collect();
        assert_eq!(results, vec!["r0", "r1", "r2"]);
    }

    #[test]
    fn digest_is_stable() {
        let s = OrchestratorState::new("g", 10);
        assert_eq!(s.digest(), s.digest());
        assert!(s.digest().contains("\"attempt_index\":1"));
    }
}
