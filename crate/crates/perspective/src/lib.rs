//! Prompt construction for questionnaire administration: perspective
//! inductions (value-targeted or free text, over the system or user
//! channel, in second or third person), context injections (conversations,
//! textual formats, prepended paragraphs), seeded answer-order
//! permutations and answer-extraction specs.

mod bundle;
mod error;
mod fixtures;
mod formats;
mod induction;
mod permute;
mod simulate;
mod types;

pub use bundle::{build_prompt, build_prompt_with};
pub use error::Error;
pub use fixtures::{available_fixtures, load_context_fixture, parse_msgs, to_msgs};
pub use formats::wrap_format;
pub use induction::{render_induction, render_induction_with, InductionTemplates};
pub use permute::{invert, permutations_of, permute_options};
pub use simulate::{simulate_conversation, ChatTurnProvider};
pub use types::{
    AnswerExtractionSpec, CandidateAnswer, Channel, ChatMessage, ContextSpec, Direction,
    ExtractionMode, FormatId, Intensity, Person, PerspectiveSpec, PromptBundle, Role,
};
