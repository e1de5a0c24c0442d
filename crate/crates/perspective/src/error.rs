use thiserror::Error;

use crate::types::ChatMessage;

#[derive(Debug, Error)]
pub enum Error {
    #[error("perspective has no induction (kind none)")]
    NoInduction,

    #[error("value-targeted perspective needs at least one target")]
    EmptyTargets,

    #[error("free-text perspective needs a non-empty text")]
    EmptyFreeText,

    #[error("unknown dimension '{0}' in perspective targets")]
    UnknownDimension(String),

    #[error("unknown context fixture '{name}' (available: {})", available.join(", "))]
    UnknownFixture {
        name: String,
        available: Vec<String>,
    },

    #[error("conversation fixture '{name}' does not parse: {problem}")]
    BadFixture { name: String, problem: String },

    #[error("scale has {points} options; presented labels support at most 26")]
    TooManyOptions { points: usize },

    #[error("permutation has length {got}, scale has {want} options")]
    PermutationShape { got: usize, want: usize },

    #[error("permutation is not a bijection on option indices")]
    NotAPermutation,

    #[error("system-channel induction conflicts with a conversation context that already defines a system message")]
    SystemMessageConflict,

    #[error("item '{0}' does not belong to the questionnaire")]
    UnknownItem(String),

    #[error("at least one exchange required")]
    NoExchanges,

    #[error("endpoint failure after {} messages: {cause}", transcript.len())]
    Simulation {
        cause: String,
        transcript: Vec<ChatMessage>,
    },
}
