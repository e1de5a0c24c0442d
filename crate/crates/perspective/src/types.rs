use serde::{Deserialize, Serialize};

/// Chat roles on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
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

/// One chat message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub text: String,
}

impl ChatMessage {
    pub fn system(text: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::System,
            text: text.into(),
        }
    }

    pub fn user(text: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::User,
            text: text.into(),
        }
    }

    pub fn assistant(text: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::Assistant,
            text: text.into(),
        }
    }
}

/// Whether a target dimension is pushed up or down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    High,
    Low,
}

impl Direction {
    pub fn word(self) -> &'static str {
        match self {
            Direction::High => "high",
            Direction::Low => "low",
        }
    }
}

/// Induction strength: "slightly more", "more" or "extremely more".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intensity {
    Slight,
    High,
    Extreme,
}

impl Intensity {
    pub fn phrase(self) -> &'static str {
        match self {
            Intensity::Slight => "slightly more",
            Intensity::High => "more",
            Intensity::Extreme => "extremely more",
        }
    }
}

/// Where the induction message is carried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    SystemMsg,
    UserMsg,
}

/// Grammatical person of the induction text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Person {
    Second,
    Third,
}

/// The perspective induced before a questionnaire item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerspectiveSpec {
    /// No induction (baseline runs).
    None,
    /// Target dimensions with a direction, rendered from fixed templates.
    ValueTargeted {
        targets: Vec<(String, Direction)>,
        intensity: Intensity,
        channel: Channel,
        person: Person,
    },
    /// A caller-supplied induction emitted verbatim.
    FreeText {
        text: String,
        channel: Channel,
        label: String,
    },
}

impl PerspectiveSpec {
    pub fn channel(&self) -> Option<Channel> {
        match self {
            PerspectiveSpec::None => None,
            PerspectiveSpec::ValueTargeted { channel, .. }
            | PerspectiveSpec::FreeText { channel, .. } => Some(*channel),
        }
    }

    /// Stable axis label for tensors and reports.
    pub fn label(&self) -> String {
        match self {
            PerspectiveSpec::None => "none".to_string(),
            PerspectiveSpec::ValueTargeted { targets, .. } => targets
                .iter()
                .map(|(d, dir)| format!("{}-{}", dir.word(), d))
                .collect::<Vec<_>>()
                .join("+"),
            PerspectiveSpec::FreeText { label, .. } => label.clone(),
        }
    }

    /// Clone with channel and person replaced (grid variant expansion).
    pub fn with_variant(&self, channel: Channel, person: Person) -> PerspectiveSpec {
        match self {
            PerspectiveSpec::None => PerspectiveSpec::None,
            PerspectiveSpec::ValueTargeted {
                targets, intensity, ..
            } => PerspectiveSpec::ValueTargeted {
                targets: targets.clone(),
                intensity: *intensity,
                channel,
                person,
            },
            PerspectiveSpec::FreeText { text, label, .. } => PerspectiveSpec::FreeText {
                text: text.clone(),
                channel,
                label: label.clone(),
            },
        }
    }
}

/// The five textual formats a question can be wrapped in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormatId {
    Chat,
    PyCode,
    CppCode,
    TomlConf,
    Latex,
}

impl FormatId {
    /// Label used on tensor axes and in tables.
    pub fn label(self) -> &'static str {
        match self {
            FormatId::Chat => "chat",
            FormatId::PyCode => "code_py",
            FormatId::CppCode => "code_cpp",
            FormatId::TomlConf => "conf_toml",
            FormatId::Latex => "latex",
        }
    }

    pub fn parse(s: &str) -> Option<FormatId> {
        match s {
            "chat" => Some(FormatId::Chat),
            "code_py" | "py" | "python" => Some(FormatId::PyCode),
            "code_cpp" | "cpp" => Some(FormatId::CppCode),
            "conf_toml" | "toml" => Some(FormatId::TomlConf),
            "latex" => Some(FormatId::Latex),
            _ => None,
        }
    }

    pub fn all() -> [FormatId; 5] {
        [
            FormatId::Chat,
            FormatId::PyCode,
            FormatId::CppCode,
            FormatId::TomlConf,
            FormatId::Latex,
        ]
    }
}

/// Context the model is exposed to before the question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContextSpec {
    None,
    /// A transcript injected before the question message.
    Conversation {
        label: String,
        messages: Vec<ChatMessage>,
    },
    /// The question rendered in a non-chat textual format.
    TextFormat {
        format: FormatId,
    },
    /// A paragraph prepended inside the question message.
    PrependedParagraph {
        label: String,
        paragraph: String,
    },
}

impl ContextSpec {
    pub fn label(&self) -> String {
        match self {
            ContextSpec::None => "none".to_string(),
            ContextSpec::Conversation { label, .. } => label.clone(),
            ContextSpec::TextFormat { format } => format.label().to_string(),
            ContextSpec::PrependedParagraph { label, .. } => label.clone(),
        }
    }
}

/// How to read the model's answer out of its continuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionMode {
    LetterAfterCue,
}

/// Answer extraction contract for one bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerExtractionSpec {
    pub mode: ExtractionMode,
    /// The text the prompt ends with.
    pub cue: String,
    /// The presented option letters, in presentation order.
    pub valid_tokens: Vec<String>,
}

/// One presented answer option.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateAnswer {
    /// Consecutive letters starting at "A".
    pub presented_label: String,
    /// Index of the option on the questionnaire's scale.
    pub original_option_index: usize,
}

/// Everything needed to administer one item once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub messages: Vec<ChatMessage>,
    pub candidate_answers: Vec<CandidateAnswer>,
    pub extraction: AnswerExtractionSpec,
}

impl PromptBundle {
    /// Maps a presented letter back to the original option index.
    pub fn original_index(&self, presented_label: &str) -> Option<usize> {
        self.candidate_answers
            .iter()
            .find(|c| c.presented_label == presented_label)
            .map(|c| c.original_option_index)
    }
}
