use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::Error;

/// An ordered response scale.
///
/// `labels[i]` is presented as option `i` (the identity-permutation order)
/// and maps to `values[i]`. The value list defaults to `1..=points` but a
/// definition file may supply an explicit map: the PVQ fixture keeps the
/// scrambled presentation order of its source prompts, so its values are
/// not monotone in presentation order. The values themselves must form a
/// strictly increasing scale once sorted (all distinct).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikertScale {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
}

impl LikertScale {
    /// Number of scale points.
    pub fn points(&self) -> usize {
        self.labels.len()
    }

    /// Smallest numeric value on the scale.
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest numeric value on the scale.
    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when `value` is one of the scale's numeric values.
    pub fn contains(&self, value: f64) -> bool {
        self.values.contains(&value)
    }

    /// Reflects a value across the scale midpoint (`min + max - value`),
    /// used for reverse-keyed items.
    pub fn reflect(&self, value: f64) -> f64 {
        self.min_value() + self.max_value() - value
    }
}

/// Direction of an item's contribution to its dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Keying {
    /// Agreement indicates a high standing on the dimension.
    Normal,
    /// Agreement indicates a low standing; the value is reflected first.
    Reverse,
}

impl Keying {
    pub fn from_sign(sign: i64) -> Option<Keying> {
        match sign {
            1 => Some(Keying::Normal),
            -1 => Some(Keying::Reverse),
            _ => None,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Keying::Normal => 1,
            Keying::Reverse => -1,
        }
    }
}

/// Position of a VSM item inside its dimension's score formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VsmSlot {
    Q1,
    Q2,
    Q3,
    Q4,
}

impl VsmSlot {
    pub fn parse(s: &str) -> Option<VsmSlot> {
        match s {
            "q1" => Some(VsmSlot::Q1),
            "q2" => Some(VsmSlot::Q2),
            "q3" => Some(VsmSlot::Q3),
            "q4" => Some(VsmSlot::Q4),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VsmSlot::Q1 => "q1",
            VsmSlot::Q2 => "q2",
            VsmSlot::Q3 => "q3",
            VsmSlot::Q4 => "q4",
        }
    }
}

/// A single questionnaire item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub id: String,
    pub text: String,
    pub dimension_id: String,
    pub keying: Keying,
    /// Present iff the questionnaire is scored by the VSM formula.
    pub vsm_slot: Option<VsmSlot>,
}

/// Constants of the VSM score formula `a*(q1 - q2) + b*(q3 - q4) + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VsmConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// A scored dimension (personal value, cultural dimension or trait).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub id: String,
    pub name: String,
    /// Higher-order group (PVQ only).
    pub category_id: Option<String>,
    /// Score-formula constants (VSM only).
    pub vsm_constants: Option<VsmConstants>,
}

/// A higher-order dimension group (PVQ's four value categories).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Category {
    pub id: String,
    pub name: String,
}

/// How raw answers aggregate into dimension scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoringRule {
    /// Keyed mean of the dimension's item values (PVQ, IPIP).
    MeanPerDimension,
    /// Hofstede's linear slot formula (VSM).
    VsmFormula,
}

impl ScoringRule {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoringRule::MeanPerDimension => "mean_per_dimension",
            ScoringRule::VsmFormula => "vsm_formula",
        }
    }
}

/// A fully validated questionnaire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Questionnaire {
    pub id: String,
    pub name: String,
    pub scale: LikertScale,
    pub items: Vec<Item>,
    pub dimensions: Vec<Dimension>,
    pub categories: Vec<Category>,
    pub scoring_rule: ScoringRule,
    /// Adapted instructions shown before every item.
    pub instructions: String,
}

impl Questionnaire {
    pub fn item(&self, id: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn dimension(&self, id: &str) -> Option<&Dimension> {
        self.dimensions.iter().find(|d| d.id == id)
    }

    pub fn dimension_ids(&self) -> Vec<String> {
        self.dimensions.iter().map(|d| d.id.clone()).collect()
    }

    pub fn items_of(&self, dimension_id: &str) -> Vec<&Item> {
        self.items
            .iter()
            .filter(|i| i.dimension_id == dimension_id)
            .collect()
    }

    /// Dimension ids belonging to a category.
    pub fn category_members(&self, category_id: &str) -> Vec<String> {
        self.dimensions
            .iter()
            .filter(|d| d.category_id.as_deref() == Some(category_id))
            .map(|d| d.id.clone())
            .collect()
    }
}

/// One complete pass over a questionnaire: a numeric value per item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerSheet {
    pub questionnaire_id: String,
    /// item id -> numeric Likert value.
    pub entries: BTreeMap<String, f64>,
    pub permutation_index: u32,
}

impl AnswerSheet {
    pub fn new(questionnaire_id: impl Into<String>, permutation_index: u32) -> Self {
        AnswerSheet {
            questionnaire_id: questionnaire_id.into(),
            entries: BTreeMap::new(),
            permutation_index,
        }
    }

    pub fn record(&mut self, item_id: impl Into<String>, value: f64) {
        self.entries.insert(item_id.into(), value);
    }

    /// Checks completeness and value validity against a questionnaire.
    pub fn validate(&self, q: &Questionnaire) -> Result<(), Error> {
        if self.questionnaire_id != q.id {
            return Err(Error::QuestionnaireMismatch {
                sheet: self.questionnaire_id.clone(),
                questionnaire: q.id.clone(),
            });
        }
        for item in &q.items {
            match self.entries.get(&item.id) {
                None => return Err(Error::MissingAnswer(item.id.clone())),
                Some(v) if !q.scale.contains(*v) => {
                    return Err(Error::ValueOutsideScale {
                        item: item.id.clone(),
                        value: *v,
                    })
                }
                Some(_) => {}
            }
        }
        for key in self.entries.keys() {
            if q.item(key).is_none() {
                return Err(Error::UnknownAnswer(key.clone()));
            }
        }
        Ok(())
    }
}

/// Per-dimension scores for one answer sheet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreProfile {
    /// dimension id -> raw score on the instrument's native scale.
    pub dimension_scores: BTreeMap<String, f64>,
    /// dimension id -> score mapped affinely onto `[0, 1]`.
    pub normalized_scores: BTreeMap<String, f64>,
    pub permutation_index: u32,
}
