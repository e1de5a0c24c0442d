//! Scoring completed ledgers into score tensors.

use std::collections::BTreeMap;

use persona_metrics::ScoreTensor;
use persona_questionnaire::{score, AnswerSheet};
use serde::{Deserialize, Serialize};

use crate::grid::ResolvedPlan;
use crate::ledger::{RunLedger, TaskStatus};
use crate::Error;

/// What to do with (context, perspective, variant, permutation) groups
/// that are not fully answered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionPolicy {
    /// Any incomplete group is an error.
    Strict,
    /// Drop incomplete groups and report them in the annex.
    ExcludeIncomplete,
}

/// One dropped group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExclusionNote {
    pub variant: String,
    pub context: String,
    pub perspective: String,
    pub permutation: u32,
    pub reason: String,
}

/// Data-quality annex: what was dropped and why, plus refusal counts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DataQualityAnnex {
    pub excluded: Vec<ExclusionNote>,
    pub refusals: usize,
    pub failures: usize,
    pub ties_broken: usize,
    /// Analyses that were skipped (degenerate data and similar).
    #[serde(default)]
    pub notes: Vec<String>,
}

/// Tensors assembled per induction variant, with the annex.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorSet {
    pub tensors: BTreeMap<String, ScoreTensor>,
    pub annex: DataQualityAnnex,
}

/// Scores every complete answer sheet in the ledger and arranges the
/// profiles on (context, perspective, permutation, dimension) axes, one
/// tensor per induction variant.
pub fn assemble_tensor(
    plan: &ResolvedPlan,
    ledger: &RunLedger,
    model_id: &str,
    policy: ExclusionPolicy,
) -> Result<TensorSet, Error> {
    let q = &plan.questionnaire;
    let mut annex = DataQualityAnnex::default();

    // Group answers by (variant, context, perspective, permutation).
    type GroupKey = (String, String, String, u32);
    let mut groups: BTreeMap<GroupKey, AnswerSheet> = BTreeMap::new();
    let mut incomplete: BTreeMap<GroupKey, String> = BTreeMap::new();

    for task in &plan.tasks {
        let key: GroupKey = (
            task.variant.clone(),
            task.context.clone(),
            task.perspective.clone(),
            task.permutation_index,
        );
        match ledger.records.get(&task.task_id) {
            Some(r) if r.status == TaskStatus::Done => {
                if r.tie_broken {
                    annex.ties_broken += 1;
                }
                let sheet = groups
                    .entry(key)
                    .or_insert_with(|| AnswerSheet::new(q.id.clone(), task.permutation_index));
                sheet.record(
                    task.item_id.clone(),
                    r.value
                        .ok_or(Error::Internal("done record without value"))?,
                );
            }
            Some(r) => {
                match r.status {
                    TaskStatus::Refused => annex.refusals += 1,
                    TaskStatus::Failed => annex.failures += 1,
                    _ => {}
                }
                incomplete.entry(key).or_insert_with(|| {
                    format!("{}: {}", task.task_id, r.error.clone().unwrap_or_default())
                });
            }
            None => {
                incomplete
                    .entry(key)
                    .or_insert_with(|| format!("{}: pending", task.task_id));
            }
        }
    }

    for (key, reason) in &incomplete {
        if policy == ExclusionPolicy::Strict {
            return Err(Error::IncompleteCell {
                cell: format!("{}/{}/{}/p{:04}", key.0, key.1, key.2, key.3),
                reason: reason.clone(),
            });
        }
        groups.remove(key);
        annex.excluded.push(ExclusionNote {
            variant: key.0.clone(),
            context: key.1.clone(),
            perspective: key.2.clone(),
            permutation: key.3,
            reason: reason.clone(),
        });
    }

    let mut tensors: BTreeMap<String, ScoreTensor> = BTreeMap::new();
    for ((variant, context, perspective, perm), sheet) in groups {
        let profile = score(&sheet, q)?;
        let tensor = tensors
            .entry(variant)
            .or_insert_with(|| ScoreTensor::new(q.id.clone(), model_id, q.dimension_ids()));
        let scores: BTreeMap<String, (f64, f64)> = profile
            .dimension_scores
            .iter()
            .map(|(d, raw)| (d.clone(), (*raw, profile.normalized_scores[d])))
            .collect();
        tensor.insert(&context, &perspective, perm, &scores)?;
    }

    Ok(TensorSet { tensors, annex })
}
