//! Append-only cost ledger.
//!
//! Every model completion anywhere in the engine (orchestrator, sub-agent,
//! reviewer, learner) lands here as exactly one entry, with the actor tag,
//! model alias, token usage, and exact micro-USD cost.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::gateway::Usage;
use crate::micro_usd::MicroUsd;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub actor: String,
    pub alias: String,
    pub usage: Usage,
    pub cost_micro_usd: MicroUsd,
    pub ts_unix_ms: u64,
}

/// Thread-safe append-only ledger. Totals are exact integer sums.
#[derive(Default)]
pub struct CostLedger {
    entries: Mutex<Vec<LedgerEntry>>,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn append(&self, entry: LedgerEntry) {
        self.entries.lock().expect("ledger poisoned").push(entry);
    }

    pub fn entries(&self) -> Vec<LedgerEntry> {
        self.entries.lock().expect("ledger poisoned").clone()
    }

    pub fn total(&self) -> MicroUsd {
        self.entries
            .lock()
            .expect("ledger poisoned")
            .iter()
            .map(|e| e.cost_micro_usd)
            .sum()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("ledger poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of entries recorded under the given actor tag.
    pub fn count_for_actor(&self, actor: &str) -> usize {
        self.entries
            .lock()
            .expect("ledger poisoned")
            .iter()
            .filter(|e| e.actor == actor)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_is_exact_sum() {
        let ledger = CostLedger::new();
        for cost in [1u64, 2, 3, 999_999] {
            ledger.append(LedgerEntry {
                actor: "t".into(),
                alias: "model_1".into(),
                usage: Usage::reported(1, 1),
                cost_micro_usd: MicroUsd::new(cost),
                ts_unix_ms: 0,
            });
        }
        assert_eq!(ledger.total(), MicroUsd::new(1_000_005));
        assert_eq!(ledger.len(), 4);
    }
}
