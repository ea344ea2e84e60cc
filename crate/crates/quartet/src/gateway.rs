//! Uniform completion interface over model backends.
//!
//! Prompts reference models through aliases (`model_1` ... `model_n`); the
//! registry binds aliases to provider model ids and per-1K-token prices in
//! micro-USD. Every completion appends exactly one ledger entry.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::SharedClock;
use crate::ledger::{CostLedger, LedgerEntry};
use crate::micro_usd::MicroUsd;

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("unknown model alias: {0}")]
    UnknownAlias(String),
    #[error("gateway failure after {attempts} attempt(s): {reason}")]
    Failure { attempts: u32, reason: String },
    #[error("invalid model registry: {0}")]
    InvalidRegistry(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn user(content: impl Into<String>) -> Self {
        Message { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Message { role: Role::Assistant, content: content.into() }
    }
}

/// Token counts for one completion. `reported=false` marks estimated
/// counts from backends that omit usage metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Usage {
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub reported: bool,
}

impl Usage {
    pub fn reported(input_tokens: u64, output_tokens: u64) -> Self {
        Usage { input_tokens, output_tokens, reported: true }
    }

    /// ceil(chars/4) per side, for backends without usage metadata.
    pub fn estimate(input_chars: usize, output_chars: usize) -> Self {
        Usage {
            input_tokens: (input_chars as u64 + 3) / 4,
            output_tokens: (output_chars as u64 + 3) / 4,
            reported: false,
        }
    }
}

/// Alias binding plus per-1K-token prices in micro-USD.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelProfile {
    pub alias: String,
    pub provider_model_id: String,
    /// micro-USD per 1K input tokens
    pub input_price: u64,
    /// micro-USD per 1K output tokens
    pub output_price: u64,
}

/// Exact cost of a completion: token/1000 * price per side, summed in
/// integer micro-USD with a single round-half-up at the end.
pub fn cost_of(usage: &Usage, profile: &ModelProfile) -> MicroUsd {
    let numerator = usage.input_tokens as u128 * profile.input_price as u128
        + usage.output_tokens as u128 * profile.output_price as u128;
    MicroUsd::new(((numerator + 500) / 1000) as u64)
}

/// Ordered alias registry. Row order in rendered tables follows alias
/// order as loaded.
#[derive(Debug, Clone, Default)]
pub struct ModelRegistry {
    profiles: Vec<ModelProfile>,
}

impl ModelRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, profile: ModelProfile) -> Result<(), GatewayError> {
        if self.profiles.iter().any(|p| p.alias == profile.alias) {
            return Err(GatewayError::InvalidRegistry(format!(
                "duplicate alias: {}",
                profile.alias
            )));
        }
        self.profiles.push(profile);
        Ok(())
    }

    pub fn resolve(&self, alias: &str) -> Result<&ModelProfile, GatewayError> {
        self.profiles
            .iter()
            .find(|p| p.alias == alias)
            .ok_or_else(|| GatewayError::UnknownAlias(alias.to_string()))
    }

    pub fn contains(&self, alias: &str) -> bool {
        self.profiles.iter().any(|p| p.alias == alias)
    }

    pub fn aliases(&self) -> impl Iterator<Item = &str> {
        self.profiles.iter().map(|p| p.alias.as_str())
    }

    pub fn profiles(&self) -> &[ModelProfile] {
        &self.profiles
    }

    /// Built-in price table with the default alias pool
    /// (`model_1` .. `model_4`) bound to a mixed-cost selection.
    pub fn builtin_default() -> Self {
        let mut reg = ModelRegistry::new();
        let defaults = [
            ("model_1", "gemini-3-flash-preview"),
            ("model_2", "deepseek-chat"),
            ("model_3", "claude-4-5-haiku"),
            ("model_4", "gpt-5-mini"),
        ];
        for (alias, id) in defaults {
            let (input, output) = builtin_price(id).expect("builtin id priced");
            reg.insert(ModelProfile {
                alias: alias.to_string(),
                provider_model_id: id.to_string(),
                input_price: input,
                output_price: output,
            })
            .expect("unique builtin alias");
        }
        reg
    }

    /// Parse a registry file: `{"prices": {id: {"input": usd_per_1k,
    /// "output": usd_per_1k}}, "aliases": {alias: id}}`. Alias order is the
    /// file's key order. Prices absent from `prices` fall back to the
    /// built-in table.
    pub fn from_json(text: &str) -> Result<Self, GatewayError> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| GatewayError::InvalidRegistry(e.to_string()))?;
        let prices = value.get("prices").and_then(|v| v.as_object());
        let aliases = value
            .get("aliases")
            .and_then(|v| v.as_object())
            .ok_or_else(|| GatewayError::InvalidRegistry("missing aliases map".into()))?;
        let mut reg = ModelRegistry::new();
        for (alias, id) in aliases {
            let id = id
                .as_str()
                .ok_or_else(|| GatewayError::InvalidRegistry(format!("alias {alias}: id must be a string")))?;
            let looked_up = prices.and_then(|p| p.get(id)).map(parse_price_pair).transpose()?;
            let (input, output) = match looked_up.or_else(|| builtin_price(id)) {
                Some(pair) => pair,
                None => {
                    return Err(GatewayError::InvalidRegistry(format!(
                        "no price for model id {id}"
                    )))
                }
            };
            reg.insert(ModelProfile {
                alias: alias.clone(),
                provider_model_id: id.to_string(),
                input_price: input,
                output_price: output,
            })?;
        }
        Ok(reg)
    }
}

fn parse_price_pair(v: &serde_json::Value) -> Result<(u64, u64), GatewayError> {
    let get = |side: &str| -> Result<u64, GatewayError> {
        let usd = v
            .get(side)
            .and_then(|x| x.as_f64())
            .ok_or_else(|| GatewayError::InvalidRegistry(format!("price missing {side}")))?;
        if usd < 0.0 {
            return Err(GatewayError::InvalidRegistry("negative price".into()));
        }
        // USD per 1K -> micro-USD per 1K; table prices are exact at
        // micro-USD resolution, so rounding removes float noise only.
        Ok((usd * 1_000_000.0).round() as u64)
    };
    Ok((get("input")?, get("output")?))
}

/// Price table in micro-USD per 1K tokens.
pub fn builtin_price(model_id: &str) -> Option<(u64, u64)> {
    let pair = match model_id {
        "gpt-4o-mini" => (150, 600),
        "o3" => (2000, 8000),
        "o3-mini" => (1100, 4400),
        "gpt-5" => (1250, 10000),
        "gpt-5-mini" => (250, 2000),
        "claude-sonnet-4-20250514" => (3000, 15000),
        "moonshotai/kimi-k2" => (296, 1185),
        "deepseek/deepseek-chat-v3.1" => (250, 1000),
        "deepseek-chat" => (250, 1000),
        "z-ai/glm-4.5" => (330, 1320),
        "gemini-2.5-pro" => (1250, 10000),
        "claude-4-sonnet" => (3000, 15000),
        "claude-sonnet-4-5" => (3000, 15000),
        "claude-4-5-haiku" => (880, 4400),
        "claude-4-sonnet-20250514" => (3000, 15000),
        "gemini-2.5-flash" => (300, 2520),
        "gemini-3-flash-preview" => (500, 3000),
        "gemini-3-pro-preview" => (2000, 4000),
        "gemini-2.5-flash-image" => (300, 30000),
        _ => return None,
    };
    Some(pair)
}

/// All built-in model ids, in table order.
pub fn builtin_model_ids() -> &'static [&'static str] {
    &[
        "gpt-4o-mini",
        "o3",
        "o3-mini",
        "gpt-5",
        "gpt-5-mini",
        "claude-sonnet-4-20250514",
        "moonshotai/kimi-k2",
        "deepseek/deepseek-chat-v3.1",
        "deepseek-chat",
        "z-ai/glm-4.5",
        "gemini-2.5-pro",
        "claude-4-sonnet",
        "claude-sonnet-4-5",
        "claude-4-5-haiku",
        "claude-4-sonnet-20250514",
        "gemini-2.5-flash",
        "gemini-3-flash-preview",
        "gemini-3-pro-preview",
        "gemini-2.5-flash-image",
    ]
}

/// Human-readable alias -> price table for prompt embedding. Deterministic:
/// same registry, same bytes.
pub fn render_pricing_table(registry: &ModelRegistry) -> String {
    let mut out = String::from("alias | model | $/1K input | $/1K output\n");
    for p in registry.profiles() {
        out.push_str(&format!(
            "{} | {} | {} | {}\n",
            p.alias,
            p.provider_model_id,
            MicroUsd::new(p.input_price).to_usd_string(),
            MicroUsd::new(p.output_price).to_usd_string(),
        ));
    }
    out
}

/// What a backend returns for one completion request.
#[derive(Debug, Clone)]
pub struct BackendReply {
    pub text: String,
    pub usage: Option<Usage>,
}

pub trait CompletionBackend: Send + Sync {
    fn complete(&self, model_id: &str, messages: &[Message]) -> Result<BackendReply, String>;
}

/// One entry of a scripted backend: matched by substring against the
/// concatenated message contents, consumed in order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScriptEntry {
    /// Substring the prompt must contain; empty matches anything.
    #[serde(rename = "match", default)]
    pub matcher: String,
    pub response: String,
    #[serde(default)]
    pub input_tokens: u64,
    #[serde(default)]
    pub output_tokens: u64,
    /// Repeatable entries match any number of times.
    #[serde(default)]
    pub repeat: bool,
}

/// Deterministic completion provider keyed on prompt content. The first
/// unconsumed entry whose matcher occurs in the prompt wins; `repeat`
/// entries are never consumed.
pub struct ScriptedBackend {
    entries: Vec<ScriptEntry>,
    consumed: Mutex<Vec<bool>>,
}

impl ScriptedBackend {
    pub fn new(entries: Vec<ScriptEntry>) -> Self {
        let consumed = Mutex::new(vec![false; entries.len()]);
        Self { entries, consumed }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let entries: Vec<ScriptEntry> = serde_json::from_str(text)?;
        Ok(Self::new(entries))
    }
}

impl CompletionBackend for ScriptedBackend {
    fn complete(&self, _model_id: &str, messages: &[Message]) -> Result<BackendReply, String> {
        let prompt: String = messages.iter().map(|m| m.content.as_str()).collect();
        let mut consumed = self.consumed.lock().expect("script poisoned");
        for (i, entry) in self.entries.iter().enumerate() {
            if consumed[i] {
                continue;
            }
            if entry.matcher.is_empty() || prompt.contains(&entry.matcher) {
                if !entry.repeat {
                    consumed[i] = true;
                }
                return Ok(BackendReply {
                    text: entry.response.clone(),
                    usage: Some(Usage::reported(entry.input_tokens, entry.output_tokens)),
                });
            }
        }
        Err("no script entry matched the prompt".to_string())
    }
}

/// Test double that fails a fixed number of times before delegating.
pub struct FlakyBackend<B> {
    inner: B,
    failures_remaining: AtomicUsize,
    pub calls: AtomicUsize,
}

impl<B> FlakyBackend<B> {
    pub fn new(inner: B, failures: usize) -> Self {
        Self { inner, failures_remaining: AtomicUsize::new(failures), calls: AtomicUsize::new(0) }
    }
}

impl<B: CompletionBackend> CompletionBackend for FlakyBackend<B> {
    fn complete(&self, model_id: &str, messages: &[Message]) -> Result<BackendReply, String> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let left = self.failures_remaining.load(Ordering::SeqCst);
        if left > 0 {
            self.failures_remaining.store(left - 1, Ordering::SeqCst);
            return Err("transient backend fault".to_string());
        }
        self.inner.complete(model_id, messages)
    }
}

#[derive(Debug, Clone)]
pub struct GatewayOptions {
    /// Total completion attempts per request (1 initial + retries).
    pub retry_attempts: u32,
    /// Base of the exponential backoff between transport retries.
    pub backoff_base: Duration,
}

impl Default for GatewayOptions {
    fn default() -> Self {
        Self { retry_attempts: 3, backoff_base: Duration::from_secs(1) }
    }
}

/// Completion gateway: alias resolution, transport retry, usage capture,
/// cost accounting. Safe for concurrent use.
pub struct Gateway {
    registry: ModelRegistry,
    backend: Box<dyn CompletionBackend>,
    ledger: CostLedger,
    clock: SharedClock,
    options: GatewayOptions,
}

impl Gateway {
    pub fn new(
        registry: ModelRegistry,
        backend: Box<dyn CompletionBackend>,
        clock: SharedClock,
        options: GatewayOptions,
    ) -> Self {
        Self { registry, backend, ledger: CostLedger::new(), clock, options }
    }

    pub fn registry(&self) -> &ModelRegistry {
        &self.registry
    }

    pub fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    pub fn clock(&self) -> &SharedClock {
        &self.clock
    }

    /// Run one completion under `alias`, retrying transport faults up to the
    /// configured attempt cap, and append one ledger entry tagged `actor`.
    pub fn complete(
        &self,
        actor: &str,
        alias: &str,
        messages: &[Message],
    ) -> Result<(String, Usage), GatewayError> {
        let profile = self.registry.resolve(alias)?;
        let mut last_err = String::new();
        for attempt in 0..self.options.retry_attempts {
            if attempt > 0 {
                let backoff = self.options.backoff_base * 2u32.saturating_pow(attempt - 1);
                if !backoff.is_zero() {
                    thread::sleep(backoff);
                }
            }
            match self.backend.complete(&profile.provider_model_id, messages) {
                Ok(reply) => {
                    let usage = reply.usage.unwrap_or_else(|| {
                        let input_chars: usize =
                            messages.iter().map(|m| m.content.chars().count()).sum();
                        Usage::estimate(input_chars, reply.text.chars().count())
                    });
                    let cost = cost_of(&usage, profile);
                    self.ledger.append(LedgerEntry {
                        actor: actor.to_string(),
                        alias: alias.to_string(),
                        usage,
                        cost_micro_usd: cost,
                        ts_unix_ms: self.clock.now_ms(),
                    });
                    return Ok((reply.text, usage));
                }
                Err(e) => last_err = e,
            }
        }
        Err(GatewayError::Failure { attempts: self.options.retry_attempts, reason: last_err })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::LogicalClock;
    use std::sync::Arc;

    fn profile(id: &str) -> ModelProfile {
        let (input, output) = builtin_price(id).unwrap();
        ModelProfile {
            alias: "m".into(),
            provider_model_id: id.into(),
            input_price: input,
            output_price: output,
        }
    }

    #[test]
    fn cost_of_zero_tokens_is_zero() {
        let p = profile("gemini-3-flash-preview");
        assert_eq!(cost_of(&Usage::reported(0, 0), &p), MicroUsd::ZERO);
    }

    #[test]
    fn cost_of_matches_hand_arithmetic() {
        let p = profile("gemini-3-flash-preview");
        assert_eq!(cost_of(&Usage::reported(1000, 1000), &p), MicroUsd::new(3500));
        let p = profile("gpt-5");
        assert_eq!(cost_of(&Usage::reported(2000, 500), &p), MicroUsd::new(7500));
    }

    #[test]
    fn cost_of_rounds_half_up_at_final_step() {
        // 2000*296 + 500*1185 = 1_184_500 -> 1184.5 -> 1185
        let p = profile("moonshotai/kimi-k2");
        assert_eq!(cost_of(&Usage::reported(2000, 500), &p), MicroUsd::new(1185));
    }

    #[test]
    fn estimator_is_ceil_chars_over_four() {
        let u = Usage::estimate(0, 400);
        assert_eq!(u.output_tokens, 100);
        assert!(!u.reported);
        assert_eq!(Usage::estimate(5, 0).input_tokens, 2);
    }

    #[test]
    fn resolve_and_unknown_alias() {
        let reg = ModelRegistry::builtin_default();
        assert_eq!(reg.resolve("model_1").unwrap().provider_model_id, "gemini-3-flash-preview");
        assert!(matches!(reg.resolve("nope"), Err(GatewayError::UnknownAlias(_))));
    }

    #[test]
    fn two_aliases_may_share_a_provider_id() {
        let text = r#"{
            "prices": {"x": {"input": 0.001, "output": 0.002}},
            "aliases": {"model_1": "x", "model_2": "x"}
        }"#;
        let reg = ModelRegistry::from_json(text).unwrap();
        assert_eq!(reg.resolve("model_1").unwrap().provider_model_id, "x");
        assert_eq!(reg.resolve("model_2").unwrap().provider_model_id, "x");
        assert_eq!(reg.resolve("model_1").unwrap().input_price, 1000);
    }

    #[test]
    fn pricing_table_is_stable_and_complete() {
        let reg = ModelRegistry::builtin_default();
        let a = render_pricing_table(&reg);
        let b = render_pricing_table(&reg);
        assert_eq!(a, b);
        for alias in reg.aliases() {
            assert!(a.contains(alias));
        }
        assert_eq!(a.lines().count(), 1 + reg.profiles().len());
    }

    #[test]
    fn scripted_backend_matches_in_order_and_consumes() {
        let backend = ScriptedBackend::new(vec![
            ScriptEntry {
                matcher: "Q1".into(),
                response: "first".into(),
                input_tokens: 1,
                output_tokens: 2,
                repeat: false,
            },
            ScriptEntry {
                matcher: "Q1".into(),
                response: "second".into(),
                input_tokens: 3,
                output_tokens: 4,
                repeat: false,
            },
        ]);
        let msgs = [Message::user("prompt with Q1 marker")];
        assert_eq!(backend.complete("id", &msgs).unwrap().text, "first");
        assert_eq!(backend.complete("id", &msgs).unwrap().text, "second");
        assert!(backend.complete("id", &msgs).is_err());
    }

    #[test]
    fn gateway_retries_then_succeeds() {
        let scripted = ScriptedBackend::new(vec![ScriptEntry {
            matcher: String::new(),
            response: "ok".into(),
            input_tokens: 10,
            output_tokens: 20,
            repeat: false,
        }]);
        let flaky = FlakyBackend::new(scripted, 2);
        let calls = std::sync::Arc::new(flaky);
        // Box a thin forwarder so we can still read the call counter.
        struct Fwd(std::sync::Arc<FlakyBackend<ScriptedBackend>>);
        impl CompletionBackend for Fwd {
            fn complete(&self, id: &str, m: &[Message]) -> Result<BackendReply, String> {
                self.0.complete(id, m)
            }
        }
        let gw = Gateway::new(
            ModelRegistry::builtin_default(),
            Box::new(Fwd(calls.clone())),
            Arc::new(LogicalClock::new()),
            GatewayOptions { retry_attempts: 3, backoff_base: Duration::ZERO },
        );
        let (text, usage) = gw.complete("test", "model_1", &[Message::user("x")]).unwrap();
        assert_eq!(text, "ok");
        assert!(usage.reported);
        assert_eq!(calls.calls.load(Ordering::SeqCst), 3);
        assert_eq!(gw.ledger().len(), 1);
    }

    #[test]
    fn gateway_estimates_usage_when_backend_omits_it() {
        struct NoUsage;
        impl CompletionBackend for NoUsage {
            fn complete(&self, _: &str, _: &[Message]) -> Result<BackendReply, String> {
                Ok(BackendReply { text: "y".repeat(400), usage: None })
            }
        }
        let gw = Gateway::new(
            ModelRegistry::builtin_default(),
            Box::new(NoUsage),
            Arc::new(LogicalClock::new()),
            GatewayOptions { retry_attempts: 1, backoff_base: Duration::ZERO },
        );
        let (_, usage) = gw.complete("t", "model_1", &[Message::user("abcd")]).unwrap();
        assert_eq!(usage.output_tokens, 100);
        assert_eq!(usage.input_tokens, 1);
        assert!(!usage.reported);
    }
}
