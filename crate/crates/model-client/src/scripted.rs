//! Deterministic offline respondents. A policy is a total function from
//! a prompt bundle to a presented label; the whole pipeline becomes
//! reproducible end-to-end when driven by one.

use async_trait::async_trait;
use persona_perspective::PromptBundle;
use persona_questionnaire::{Keying, Questionnaire};

use crate::endpoint::Respondent;
use crate::{Error, SelectionMethod, SelectionResult};

type Policy = dyn Fn(&PromptBundle) -> String + Send + Sync;

/// A scripted respondent: deterministic, total over valid bundles.
pub struct ScriptedRespondent {
    id: String,
    description: String,
    policy: Box<Policy>,
}

impl ScriptedRespondent {
    pub fn new(
        id: impl Into<String>,
        description: impl Into<String>,
        policy: impl Fn(&PromptBundle) -> String + Send + Sync + 'static,
    ) -> Self {
        ScriptedRespondent {
            id: id.into(),
            description: description.into(),
            policy: Box::new(policy),
        }
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Always answers the first presented option.
    pub fn always_first() -> Self {
        ScriptedRespondent::new(
            "scripted-first",
            "always the first presented option",
            |_| "A".to_string(),
        )
    }

    /// Always answers the option carrying a fixed original scale index,
    /// wherever the permutation put it.
    pub fn fixed_original_option(index: usize) -> Self {
        ScriptedRespondent::new(
            format!("scripted-orig{index}"),
            format!("always original option {index}"),
            move |bundle| {
                bundle
                    .candidate_answers
                    .iter()
                    .find(|c| c.original_option_index == index)
                    .map(|c| c.presented_label.clone())
                    .unwrap_or_else(|| "A".to_string())
            },
        )
    }

    /// Answers maximally on induced target dimensions and minimally
    /// elsewhere, reading the targets out of the induction text. Reverse
    /// keyed items answer the opposite pole so that the dimension score
    /// lands on the intended extreme.
    pub fn target_conditional(q: Questionnaire) -> Self {
        // (lowercased item text, dimension display name lowercased,
        //  dimension id with spaces, normal keying) per item.
        let lookup: Vec<(String, String, String, bool)> = q
            .items
            .iter()
            .map(|i| {
                let dim = q.dimension(&i.dimension_id).expect("item dimension exists");
                (
                    i.text.to_lowercase(),
                    dim.name.to_lowercase(),
                    dim.id.replace('_', " "),
                    i.keying == Keying::Normal,
                )
            })
            .collect();
        ScriptedRespondent::new(
            "scripted-target",
            "maximal on induced target dimensions, minimal elsewhere",
            move |bundle| {
                let text: String = bundle
                    .messages
                    .iter()
                    .map(|m| m.text.to_lowercase())
                    .collect::<Vec<_>>()
                    .join("\n");
                let induction = text
                    .split("importance to")
                    .nth(1)
                    .and_then(|t| t.lines().next())
                    .unwrap_or("");

                // Which item is being asked? Match by item text.
                let Some((_, dim_name, dim_words, normal_keyed)) = lookup
                    .iter()
                    .find(|(item_text, ..)| text.contains(item_text))
                else {
                    return "A".to_string();
                };
                let targeted = induction.contains(dim_name) || induction.contains(dim_words);
                let want_high = targeted == *normal_keyed;
                pick_extreme(bundle, &q, want_high)
            },
        )
    }

    /// Seeded pseudo-random answers independent of any induction: the
    /// perspective-blind control. Uses a splitmix-style hash of the seed
    /// and the bundle's user text so answers are stable across runs.
    pub fn seeded_random(seed: u64) -> Self {
        ScriptedRespondent::new(
            format!("scripted-random{seed}"),
            "perspective-blind seeded random answers",
            move |bundle| {
                let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
                for m in &bundle.messages {
                    for b in m.text.as_bytes() {
                        h = h.wrapping_mul(0x100_0000_01b3).wrapping_add(*b as u64);
                    }
                }
                h ^= h >> 30;
                h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
                h ^= h >> 27;
                let pick = (h % bundle.candidate_answers.len() as u64) as usize;
                bundle.candidate_answers[pick].presented_label.clone()
            },
        )
    }
}

/// Presented label of the option with the maximal (or minimal) scale value.
fn pick_extreme(bundle: &PromptBundle, q: &Questionnaire, want_high: bool) -> String {
    let mut best: Option<(f64, &str)> = None;
    for c in &bundle.candidate_answers {
        let value = q.scale.values[c.original_option_index];
        let better = match best {
            None => true,
            Some((bv, _)) => {
                if want_high {
                    value > bv
                } else {
                    value < bv
                }
            }
        };
        if better {
            best = Some((value, &c.presented_label));
        }
    }
    best.map(|(_, l)| l.to_string())
        .expect("bundle has candidates")
}

#[async_trait]
impl Respondent for ScriptedRespondent {
    async fn select_option(&self, bundle: &PromptBundle) -> Result<SelectionResult, Error> {
        let label = (self.policy)(bundle);
        let original = bundle
            .original_index(&label)
            .ok_or_else(|| Error::LabelOutsideCandidates(label.clone()))?;
        Ok(SelectionResult {
            presented_label: label,
            original_option_index: original,
            method: SelectionMethod::Scripted,
            raw_payload: format!("{{\"scripted\":\"{}\"}}", self.id),
            cached: false,
            tie_broken: false,
        })
    }

    fn model_id(&self) -> String {
        self.id.clone()
    }

    fn supports_system_role(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use persona_perspective::{
        build_prompt, Channel, ContextSpec, Intensity, Person, PerspectiveSpec,
    };
    use persona_questionnaire::builtin;

    #[tokio::test]
    async fn always_first_maps_through_the_permutation() {
        let q = builtin("pvq").unwrap();
        let item = q.item("pvq01").unwrap().clone();
        // Option at presented position A is original index 2.
        let bundle = build_prompt(
            &q,
            &item,
            &PerspectiveSpec::None,
            &ContextSpec::None,
            &[2, 0, 1, 3, 4, 5],
        )
        .unwrap();
        let result = ScriptedRespondent::always_first()
            .select_option(&bundle)
            .await
            .unwrap();
        assert_eq!(result.presented_label, "A");
        assert_eq!(result.original_option_index, 2);
        assert_eq!(result.method, SelectionMethod::Scripted);
    }

    #[tokio::test]
    async fn target_conditional_answers_extremes() {
        let q = builtin("pvq").unwrap();
        let respondent = ScriptedRespondent::target_conditional(q.clone());
        let persp = PerspectiveSpec::targeting_high(
            &["achievement", "power"],
            Intensity::Extreme,
            Channel::SystemMsg,
            Person::Second,
        );
        // pvq04 is an achievement item: expect the maximal value (6).
        let item = q.item("pvq04").unwrap().clone();
        let bundle =
            build_prompt(&q, &item, &persp, &ContextSpec::None, &[0, 1, 2, 3, 4, 5]).unwrap();
        let result = respondent.select_option(&bundle).await.unwrap();
        assert_eq!(q.scale.values[result.original_option_index], 6.0);
        // pvq03 is universalism: expect the minimal value (1).
        let item = q.item("pvq03").unwrap().clone();
        let bundle =
            build_prompt(&q, &item, &persp, &ContextSpec::None, &[0, 1, 2, 3, 4, 5]).unwrap();
        let result = respondent.select_option(&bundle).await.unwrap();
        assert_eq!(q.scale.values[result.original_option_index], 1.0);
    }

    #[tokio::test]
    async fn target_conditional_respects_reverse_keying() {
        let q = builtin("ipip").unwrap();
        let respondent = ScriptedRespondent::target_conditional(q.clone());
        let persp = PerspectiveSpec::targeting_high(
            &["extraversion"],
            Intensity::Extreme,
            Channel::SystemMsg,
            Person::Second,
        );
        // ipip07 "Have little to say." is reverse-keyed extraversion: the
        // maximal dimension score needs the minimal agreement value.
        let item = q.item("ipip07").unwrap().clone();
        let bundle =
            build_prompt(&q, &item, &persp, &ContextSpec::None, &[0, 1, 2, 3, 4, 5]).unwrap();
        let result = respondent.select_option(&bundle).await.unwrap();
        assert_eq!(q.scale.values[result.original_option_index], 1.0);
    }

    #[tokio::test]
    async fn seeded_random_is_deterministic_and_perspective_blind() {
        let q = builtin("pvq").unwrap();
        let item = q.item("pvq01").unwrap().clone();
        let bundle = build_prompt(
            &q,
            &item,
            &PerspectiveSpec::None,
            &ContextSpec::None,
            &[0, 1, 2, 3, 4, 5],
        )
        .unwrap();
        let r = ScriptedRespondent::seeded_random(7);
        let a = r.select_option(&bundle).await.unwrap();
        let b = r.select_option(&bundle).await.unwrap();
        assert_eq!(a, b);
        let other_seed = ScriptedRespondent::seeded_random(8);
        // Different seeds eventually differ across items.
        let mut any_diff = false;
        for item in q.items.iter().take(10) {
            let bundle = build_prompt(
                &q,
                item,
                &PerspectiveSpec::None,
                &ContextSpec::None,
                &[0, 1, 2, 3, 4, 5],
            )
            .unwrap();
            let x = r.select_option(&bundle).await.unwrap();
            let y = other_seed.select_option(&bundle).await.unwrap();
            if x.presented_label != y.presented_label {
                any_diff = true;
            }
        }
        assert!(any_diff);
    }
}
