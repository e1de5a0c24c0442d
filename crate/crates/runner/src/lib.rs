//! Declarative experiment orchestration: a config expands into the
//! (context x perspective x variant x permutation x item) grid, executes
//! resumably against a respondent, and the completed ledger assembles
//! into score tensors.

mod assemble;
mod config;
mod execute;
mod grid;
mod ledger;
mod respondents;

pub use assemble::{assemble_tensor, DataQualityAnnex, ExclusionNote, ExclusionPolicy, TensorSet};
pub use config::{ExperimentConfig, PerspectiveSelector};
pub use execute::{execute, ExecuteOptions};
pub use grid::{expand_grid, AdminTask, ResolvedPlan};
pub use ledger::{AnswerRecord, LedgerStore, RunLedger, StatusSummary, TaskStatus};
pub use respondents::resolve_scripted;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Questionnaire(#[from] persona_questionnaire::Error),

    #[error(transparent)]
    Perspective(#[from] persona_perspective::Error),

    #[error(transparent)]
    Client(#[from] persona_model_client::Error),

    #[error(transparent)]
    Metrics(#[from] persona_metrics::Error),

    #[error("experiment '{id}' already exists")]
    ExperimentExists { id: String },

    #[error("unknown experiment '{id}'")]
    UnknownExperiment { id: String },

    #[error("ledger belongs to a different config: stored digest {expected}, supplied config digest {actual}")]
    DigestMismatch { expected: String, actual: String },

    #[error("ledger is corrupt: {problem}")]
    LedgerCorrupt { problem: String },

    #[error("task '{task_id}' is already done; done is terminal")]
    DoneIsTerminal { task_id: String },

    #[error("induction variant '{variant}' needs a system role the endpoint does not support")]
    ChannelUnsupported { variant: String },

    #[error("cell {cell} is incomplete and no exclusion policy was set: {reason}")]
    IncompleteCell { cell: String, reason: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("internal invariant broken: {0}")]
    Internal(&'static str),
}
