//! Endpoint abstraction for chat-completion APIs: option-constrained
//! answer selection over a three-tier capability ladder, client-side rate
//! limiting with bounded retries, a content-addressed response cache with
//! in-flight deduplication, and deterministic scripted respondents for
//! offline runs.

mod cache;
mod endpoint;
mod parse;
mod scripted;
mod wire;

pub use cache::{cache_key, run_with_cache, CacheRecord, CacheStore};
pub use endpoint::{ConversationSide, EndpointProfile, HttpEndpoint, Respondent};
pub use parse::first_valid_token;
pub use scripted::ScriptedRespondent;
pub use wire::{ChatChoice, ChatRequest, ChatResponse, LogprobEntry, TokenLogprobs, WireMessage};

use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

/// How an answer was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMethod {
    /// Compared returned token scores at the answer position.
    TokenScores,
    /// Scored each candidate as a forced continuation.
    PerOptionContinuation,
    /// Temperature-0 generation, first valid token matched.
    GenerateAndMatch,
    /// Deterministic offline policy.
    Scripted,
}

/// The selected answer for one prompt bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub presented_label: String,
    pub original_option_index: usize,
    pub method: SelectionMethod,
    /// Upstream response payload, persisted before interpretation.
    pub raw_payload: String,
    pub cached: bool,
    /// Equal top scores were broken toward the earliest presented label.
    pub tie_broken: bool,
}

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("transport failure after {attempts} attempts: {cause}")]
    Transport { attempts: u32, cause: String },

    #[error("endpoint returned status {status}: {body}")]
    Status { status: u16, body: String },

    #[error("endpoint supports none of the selection methods")]
    AllMethodsUnsupported,

    #[error("no valid answer token in generation: {generation:?}")]
    Refusal { generation: String },

    #[error("endpoint has no system role but the bundle carries a system message")]
    SystemRoleUnsupported,

    #[error("cache record {digest} is corrupt: {problem}")]
    CacheCorrupt { digest: String, problem: String },

    #[error("cache store io: {0}")]
    CacheIo(#[from] std::io::Error),

    #[error("selection label '{0}' is not among the candidate answers")]
    LabelOutsideCandidates(String),
}

impl Error {
    /// Refusals are model behavior, not transport faults; callers exclude
    /// rather than retry them.
    pub fn is_refusal(&self) -> bool {
        matches!(self, Error::Refusal { .. })
    }
}
