//! Turning complete answer sheets into per-dimension score profiles.

use std::collections::BTreeMap;

use crate::types::{AnswerSheet, Questionnaire, ScoreProfile, ScoringRule, VsmSlot};
use crate::{Error, Keying};

/// Scores a sheet with the questionnaire's own scoring rule.
pub fn score(sheet: &AnswerSheet, q: &Questionnaire) -> Result<ScoreProfile, Error> {
    match q.scoring_rule {
        ScoringRule::MeanPerDimension => score_mean_per_dimension(sheet, q),
        ScoringRule::VsmFormula => score_vsm(sheet, q),
    }
}

/// Keyed per-dimension mean (PVQ, IPIP).
///
/// Reverse-keyed values are reflected across the scale (`min + max - value`)
/// before averaging. The normalized score maps `[scale_min, scale_max]`
/// affinely onto `[0, 1]`.
pub fn score_mean_per_dimension(
    sheet: &AnswerSheet,
    q: &Questionnaire,
) -> Result<ScoreProfile, Error> {
    if q.scoring_rule != ScoringRule::MeanPerDimension {
        return Err(Error::ScoringRuleMismatch {
            expected: ScoringRule::MeanPerDimension.as_str(),
            found: q.scoring_rule.as_str(),
        });
    }
    sheet.validate(q)?;

    let lo = q.scale.min_value();
    let hi = q.scale.max_value();
    let mut raw_scores = BTreeMap::new();
    let mut normalized = BTreeMap::new();
    for dim in &q.dimensions {
        let mut sum = 0.0;
        let mut n = 0usize;
        for item in q.items.iter().filter(|i| i.dimension_id == dim.id) {
            let value = sheet.entries[&item.id];
            let effective = match item.keying {
                Keying::Normal => value,
                Keying::Reverse => q.scale.reflect(value),
            };
            sum += effective;
            n += 1;
        }
        let raw = sum / n as f64;
        raw_scores.insert(dim.id.clone(), raw);
        normalized.insert(dim.id.clone(), (raw - lo) / (hi - lo));
    }

    Ok(ScoreProfile {
        dimension_scores: raw_scores,
        normalized_scores: normalized,
        permutation_index: sheet.permutation_index,
    })
}

/// Hofstede's VSM formula: `s = a*(q1 - q2) + b*(q3 - q4) + c` per dimension.
///
/// The normalized score maps the analytic range
/// `[c - (a+b)*span, c + (a+b)*span]` (with `span = scale_max - scale_min`)
/// affinely onto `[0, 1]`; the bounds follow from the constants rather than
/// any empirical minimum or maximum.
pub fn score_vsm(sheet: &AnswerSheet, q: &Questionnaire) -> Result<ScoreProfile, Error> {
    if q.scoring_rule != ScoringRule::VsmFormula {
        return Err(Error::ScoringRuleMismatch {
            expected: ScoringRule::VsmFormula.as_str(),
            found: q.scoring_rule.as_str(),
        });
    }
    sheet.validate(q)?;

    let span = q.scale.max_value() - q.scale.min_value();
    let mut raw_scores = BTreeMap::new();
    let mut normalized = BTreeMap::new();
    for dim in &q.dimensions {
        let constants = dim.vsm_constants.ok_or(Error::MissingConstants {
            dimension: dim.id.clone(),
        })?;
        let mut slot_value = BTreeMap::new();
        for item in q.items.iter().filter(|i| i.dimension_id == dim.id) {
            let slot = item.vsm_slot.ok_or(Error::VsmSlot {
                dimension: dim.id.clone(),
                slot: format!("for item '{}'", item.id),
                problem: "missing",
            })?;
            slot_value.insert(slot, sheet.entries[&item.id]);
        }
        let get = |s: VsmSlot| slot_value[&s];
        let raw = constants.a * (get(VsmSlot::Q1) - get(VsmSlot::Q2))
            + constants.b * (get(VsmSlot::Q3) - get(VsmSlot::Q4))
            + constants.c;
        let half_width = (constants.a + constants.b) * span;
        raw_scores.insert(dim.id.clone(), raw);
        normalized.insert(
            dim.id.clone(),
            (raw - (constants.c - half_width)) / (2.0 * half_width),
        );
    }

    Ok(ScoreProfile {
        dimension_scores: raw_scores,
        normalized_scores: normalized,
        permutation_index: sheet.permutation_index,
    })
}
