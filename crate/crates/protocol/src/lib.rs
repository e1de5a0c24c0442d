//! Request and response bodies of the HTTP/JSON service. Domain types
//! (questionnaires, prompt bundles, tensors, reports) serialize directly;
//! this crate adds the envelopes around them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use persona_metrics::{ControllabilityReport, ScoreTensor, StabilityReport, Which};
pub use persona_perspective::{ContextSpec, PerspectiveSpec, PromptBundle};
pub use persona_questionnaire::{Questionnaire, ScoreProfile};
pub use persona_runner::{DataQualityAnnex, ExperimentConfig, StatusSummary};
pub use persona_stats::{PairwiseComparison, TestResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub version: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuestionnaireSummary {
    pub id: String,
    pub name: String,
    pub items: usize,
    pub dimensions: usize,
    pub scale_points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub questionnaire_id: String,
    /// item id -> numeric Likert value.
    pub entries: BTreeMap<String, f64>,
    #[serde(default)]
    pub permutation_index: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PreviewRequest {
    pub questionnaire_id: String,
    /// Defaults to the first item.
    #[serde(default)]
    pub item_id: Option<String>,
    pub perspective: PerspectiveSpec,
    /// Context fixture reference (`none`, `conversation/<t>`, ...).
    pub context: String,
    pub seed: u64,
    /// Which of the seeded permutations to apply.
    #[serde(default)]
    pub permutation_index: usize,
    #[serde(default)]
    pub identity_first: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmitResponse {
    pub experiment_id: String,
    pub task_count: usize,
    pub config_digest: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatusResponse {
    pub experiment_id: String,
    pub config_digest: String,
    pub summary: StatusSummary,
    pub running: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorsResponse {
    /// Induction variant -> tensor.
    pub tensors: BTreeMap<String, ScoreTensor>,
    pub annex: DataQualityAnnex,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRequest {
    #[serde(default = "default_true")]
    pub tables: bool,
    #[serde(default = "default_true")]
    pub charts: bool,
    /// Inline human-baselines JSON overriding the shipped constants.
    #[serde(default)]
    pub baselines_json: Option<String>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportResponse {
    pub experiment_id: String,
    /// Paths of the written artifacts, relative to the data directory.
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ControllabilityRequest {
    pub tensor: ScoreTensor,
    pub target_map: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityRequest {
    pub tensor: ScoreTensor,
    pub perspective: String,
    pub which: Which,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoSampleRequest {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupsRequest {
    pub groups: Vec<Vec<f64>>,
    #[serde(default)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairsRequest {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationResponse {
    pub r: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BonferroniRequest {
    pub alpha: f64,
    pub comparisons: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BonferroniResponse {
    pub adjusted_alpha: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectSizeResponse {
    pub d: f64,
}
