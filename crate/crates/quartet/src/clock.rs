//! Time source abstraction.
//!
//! Scripted runs use a logical clock so trajectory logs and reports are
//! byte-identical across executions; live runs use the system clock.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

pub trait Clock: Send + Sync {
    /// Milliseconds since an epoch (UNIX for the system clock, run start
    /// for the logical clock).
    fn now_ms(&self) -> u64;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0)
    }
}

/// Monotonic counter clock: every observation advances time by 1 ms.
#[derive(Default)]
pub struct LogicalClock {
    ticks: AtomicU64,
}

impl LogicalClock {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Clock for LogicalClock {
    fn now_ms(&self) -> u64 {
        self.ticks.fetch_add(1, Ordering::Relaxed)
    }
}

pub type SharedClock = Arc<dyn Clock>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logical_clock_is_deterministic() {
        let c = LogicalClock::new();
        assert_eq!(c.now_ms(), 0);
        assert_eq!(c.now_ms(), 1);
        assert_eq!(c.now_ms(), 2);
    }
}
