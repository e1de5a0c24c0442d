use thiserror::Error;

/// Errors produced while loading definitions or scoring answer sheets.
#[derive(Debug, Error)]
pub enum Error {
    #[error("definition does not parse: {0}")]
    Schema(String),

    #[error("unknown questionnaire '{id}' (available: {})", available.join(", "))]
    UnknownQuestionnaire { id: String, available: Vec<String> },

    #[error("duplicate item id '{0}'")]
    DuplicateItem(String),

    #[error("duplicate dimension id '{0}'")]
    DuplicateDimension(String),

    #[error("item '{item}' references unknown dimension '{dimension}'")]
    UnknownDimension { item: String, dimension: String },

    #[error("dimension '{dimension}' references unknown category '{category}'")]
    UnknownCategory { dimension: String, category: String },

    #[error("dimension '{0}' has no items")]
    EmptyDimension(String),

    #[error("scale has {labels} labels but {values} values")]
    ScaleLengthMismatch { labels: usize, values: usize },

    #[error("scale needs at least 2 points, got {0}")]
    ScaleTooSmall(usize),

    #[error("scale values must be distinct, got duplicates")]
    ScaleValuesNotDistinct,

    #[error("questionnaire '{id}' must have {expected} dimensions, found {found}")]
    DimensionCountMismatch {
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("questionnaire '{id}' must have {expected} categories, found {found}")]
    CategoryCountMismatch {
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("VSM dimension requires exactly 4 items: dimension '{dimension}' has {found}")]
    VsmItemCount { dimension: String, found: usize },

    #[error("VSM slot {slot} of dimension '{dimension}' is {problem}")]
    VsmSlot {
        dimension: String,
        slot: String,
        problem: &'static str,
    },

    #[error("item '{item}' carries a VSM slot but scoring rule is not VSM")]
    UnexpectedSlot { item: String },

    #[error("dimension '{dimension}' carries VSM constants but scoring rule is not VSM")]
    UnexpectedConstants { dimension: String },

    #[error("dimension '{dimension}' is missing VSM constants")]
    MissingConstants { dimension: String },

    #[error("invalid keying {value} for item '{item}' (must be 1 or -1)")]
    InvalidKeying { item: String, value: i64 },

    #[error("answer sheet is for questionnaire '{sheet}', expected '{questionnaire}'")]
    QuestionnaireMismatch {
        sheet: String,
        questionnaire: String,
    },

    #[error("answer sheet is incomplete: missing item '{0}'")]
    MissingAnswer(String),

    #[error("answer sheet has an entry for unknown item '{0}'")]
    UnknownAnswer(String),

    #[error("value {value} for item '{item}' is not on the scale")]
    ValueOutsideScale { item: String, value: f64 },

    #[error("scoring rule mismatch: expected {expected}, questionnaire uses {found}")]
    ScoringRuleMismatch {
        expected: &'static str,
        found: &'static str,
    },
}
