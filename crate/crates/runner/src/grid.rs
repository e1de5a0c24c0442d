//! Expansion of a config into the full administration grid.

use std::collections::{BTreeMap, BTreeSet};

use persona_perspective::{
    load_context_fixture, permute_options, Channel, ContextSpec, Direction, Intensity, Person,
    PerspectiveSpec,
};
use persona_questionnaire::{builtin, Questionnaire};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, PerspectiveSelector};
use crate::Error;

/// One questionnaire administration: a single item under a single
/// (context, perspective, variant, permutation) condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdminTask {
    /// Stable id: `context|perspective|variant|pNNNN|item`.
    pub task_id: String,
    pub context: String,
    pub perspective: String,
    pub variant: String,
    pub permutation_index: u32,
    pub item_id: String,
}

/// A config resolved against its questionnaire and fixtures.
pub struct ResolvedPlan {
    pub questionnaire: Questionnaire,
    pub contexts: Vec<(String, ContextSpec)>,
    /// (label, base spec before variant rewriting).
    pub perspectives: Vec<(String, PerspectiveSpec)>,
    /// (label, channel/person); the `none` perspective carries no variant.
    pub variants: Vec<(String, Channel, Person)>,
    pub permutations: Vec<Vec<usize>>,
    pub tasks: Vec<AdminTask>,
}

impl ResolvedPlan {
    /// perspective label -> targeted dimension ids, for controllability.
    pub fn target_map(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut map = BTreeMap::new();
        for (label, spec) in &self.perspectives {
            if let PerspectiveSpec::ValueTargeted { targets, .. } = spec {
                map.insert(
                    label.clone(),
                    targets
                        .iter()
                        .map(|(d, _)| d.clone())
                        .collect::<BTreeSet<_>>(),
                );
            }
        }
        map
    }

    pub fn perspective(&self, label: &str) -> Option<&PerspectiveSpec> {
        self.perspectives
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, s)| s)
    }

    pub fn context(&self, label: &str) -> Option<&ContextSpec> {
        self.contexts
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, s)| s)
    }

    pub fn variant(&self, label: &str) -> Option<(Channel, Person)> {
        self.variants
            .iter()
            .find(|(l, _, _)| l == label)
            .map(|(_, c, p)| (*c, *p))
    }
}

fn expand_perspectives(
    selectors: &[PerspectiveSelector],
    q: &Questionnaire,
    intensity: Option<Intensity>,
) -> Result<Vec<(String, PerspectiveSpec)>, Error> {
    let intensity = intensity.unwrap_or(Intensity::Extreme);
    // Channel and person placeholders; variants rewrite them per task.
    let (channel, person) = (Channel::SystemMsg, Person::Second);
    let selectors = if selectors.is_empty() {
        &[PerspectiveSelector::None][..]
    } else {
        selectors
    };

    let mut out: Vec<(String, PerspectiveSpec)> = Vec::new();
    let targeted = |dims: Vec<(String, Direction)>| PerspectiveSpec::ValueTargeted {
        targets: dims,
        intensity,
        channel,
        person,
    };
    for sel in selectors {
        match sel {
            PerspectiveSelector::None => out.push(("none".to_string(), PerspectiveSpec::None)),
            PerspectiveSelector::Category { category } => {
                let members = q.category_members(category);
                if members.is_empty() {
                    return Err(Error::Config(format!(
                        "questionnaire '{}' has no category '{category}'",
                        q.id
                    )));
                }
                let dims = members.into_iter().map(|d| (d, Direction::High)).collect();
                out.push((category.clone(), targeted(dims)));
            }
            PerspectiveSelector::EachCategory => {
                if q.categories.is_empty() {
                    return Err(Error::Config(format!(
                        "questionnaire '{}' has no categories; use each_dimension",
                        q.id
                    )));
                }
                for cat in &q.categories {
                    let dims = q
                        .category_members(&cat.id)
                        .into_iter()
                        .map(|d| (d, Direction::High))
                        .collect();
                    out.push((cat.id.clone(), targeted(dims)));
                }
            }
            PerspectiveSelector::Dimensions { high, low } => {
                if high.is_empty() && low.is_empty() {
                    return Err(Error::Config("dimensions selector needs targets".into()));
                }
                let mut dims: Vec<(String, Direction)> = Vec::new();
                for d in high {
                    check_dimension(q, d)?;
                    dims.push((d.clone(), Direction::High));
                }
                for d in low {
                    check_dimension(q, d)?;
                    dims.push((d.clone(), Direction::Low));
                }
                let spec = targeted(dims);
                out.push((spec.label(), spec));
            }
            PerspectiveSelector::EachDimension => {
                for d in &q.dimensions {
                    out.push((
                        d.id.clone(),
                        targeted(vec![(d.id.clone(), Direction::High)]),
                    ));
                }
            }
            PerspectiveSelector::FreeText { text, label } => {
                if text.is_empty() {
                    return Err(Error::Config("free_text perspective needs text".into()));
                }
                out.push((
                    label.clone(),
                    PerspectiveSpec::FreeText {
                        text: text.clone(),
                        channel,
                        label: label.clone(),
                    },
                ));
            }
        }
    }
    Ok(out)
}

fn check_dimension(q: &Questionnaire, d: &str) -> Result<(), Error> {
    if q.dimension(d).is_none() {
        return Err(Error::Config(format!(
            "questionnaire '{}' has no dimension '{d}'",
            q.id
        )));
    }
    Ok(())
}

/// Expands a config into its deterministic task list. Permutations are
/// sampled once per (questionnaire, seed) and shared by every context and
/// perspective so stability metrics compare identical permutation sets.
/// Task order: contexts, then perspectives, then variants, then
/// permutations, then items; a full questionnaire pass completes per
/// permutation before the next permutation starts.
pub fn expand_grid(config: &ExperimentConfig) -> Result<ResolvedPlan, Error> {
    config.validate()?;
    let questionnaire = builtin(&config.questionnaire)?;
    let perspectives = expand_perspectives(
        &config.perspectives,
        &questionnaire,
        config.parsed_intensity()?,
    )?;
    let variants = config.parsed_variants()?;

    // An empty context list means the bare baseline condition.
    let mut contexts = Vec::new();
    if config.contexts.is_empty() {
        contexts.push(("none".to_string(), ContextSpec::None));
    }
    for name in &config.contexts {
        let spec = load_context_fixture(name)?;
        contexts.push((spec.label(), spec));
    }

    let permutations = permute_options(
        &questionnaire,
        config.seed,
        config.permutations,
        config.identity_first,
    );

    let mut tasks = Vec::new();
    for (ctx_label, _) in &contexts {
        for (persp_label, persp) in &perspectives {
            // The bare perspective has no induction variants.
            let task_variants: Vec<String> = match persp {
                PerspectiveSpec::None => vec!["none".to_string()],
                _ => variants.iter().map(|(l, _, _)| l.clone()).collect(),
            };
            for variant in &task_variants {
                for perm in 0..config.permutations as u32 {
                    for item in &questionnaire.items {
                        tasks.push(AdminTask {
                            task_id: format!(
                                "{ctx_label}|{persp_label}|{variant}|p{perm:04}|{}",
                                item.id
                            ),
                            context: ctx_label.clone(),
                            perspective: persp_label.clone(),
                            variant: variant.clone(),
                            permutation_index: perm,
                            item_id: item.id.clone(),
                        });
                    }
                }
            }
        }
    }

    Ok(ResolvedPlan {
        questionnaire,
        contexts,
        perspectives,
        variants,
        permutations,
        tasks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            r#"
id = "grid-test"
questionnaire = "pvq"
endpoint = "scripted:first"
contexts = ["none"]
permutations = 50
seed = 17
variants = ["system-2nd"]

[[perspectives]]
kind = "each_category"
"#,
        )
        .unwrap()
    }

    #[test]
    fn four_perspectives_one_variant_fifty_permutations_forty_items() {
        let plan = expand_grid(&base_config()).unwrap();
        assert_eq!(plan.perspectives.len(), 4);
        assert_eq!(plan.tasks.len(), 4 * 50 * 40);
        assert_eq!(plan.tasks.len(), 8000);
    }

    #[test]
    fn four_variants_scale_the_grid() {
        let mut config = base_config();
        config.variants = vec![
            "system-2nd".into(),
            "system-3rd".into(),
            "user-2nd".into(),
            "user-3rd".into(),
        ];
        config.permutations = 10;
        let plan = expand_grid(&config).unwrap();
        // Table-1 cell shape: 4 variants x 10 permutations x |P| x items.
        assert_eq!(plan.tasks.len(), 4 * 10 * 4 * 40);
    }

    #[test]
    fn baseline_none_perspective_collapses_variants() {
        let mut config = base_config();
        config.perspectives = vec![PerspectiveSelector::None];
        config.variants = vec![
            "system-2nd".into(),
            "system-3rd".into(),
            "user-2nd".into(),
            "user-3rd".into(),
        ];
        config.permutations = 3;
        let plan = expand_grid(&config).unwrap();
        assert_eq!(plan.tasks.len(), 3 * 40);
        assert!(plan.tasks.iter().all(|t| t.variant == "none"));
    }

    #[test]
    fn task_ids_are_stable_across_expansions() {
        let a = expand_grid(&base_config()).unwrap();
        let b = expand_grid(&base_config()).unwrap();
        let ids_a: Vec<&String> = a.tasks.iter().map(|t| &t.task_id).collect();
        let ids_b: Vec<&String> = b.tasks.iter().map(|t| &t.task_id).collect();
        assert_eq!(ids_a, ids_b);
    }

    #[test]
    fn permutations_precede_items_in_task_order() {
        let plan = expand_grid(&base_config()).unwrap();
        // Within one condition the first 40 tasks are permutation 0.
        assert_eq!(plan.tasks[0].permutation_index, 0);
        assert_eq!(plan.tasks[39].permutation_index, 0);
        assert_eq!(plan.tasks[40].permutation_index, 1);
    }

    #[test]
    fn empty_contexts_with_none_perspective_is_a_baseline_grid() {
        let mut config = base_config();
        config.contexts = vec![];
        config.perspectives = vec![PerspectiveSelector::None];
        config.permutations = 2;
        let plan = expand_grid(&config).unwrap();
        // Single condition: one implicit bare context, no variants.
        assert_eq!(plan.tasks.len(), 2 * 40);
        assert!(plan
            .tasks
            .iter()
            .all(|t| t.context == "none" && t.variant == "none"));
    }

    #[test]
    fn unknown_fixture_reference_fails_expansion() {
        let mut config = base_config();
        config.contexts = vec!["conversation/banter".into()];
        assert!(expand_grid(&config).is_err());
    }

    #[test]
    fn target_map_covers_category_members() {
        let plan = expand_grid(&base_config()).unwrap();
        let map = plan.target_map();
        let se: Vec<&String> = map["self_enhancement"].iter().collect();
        assert_eq!(se, ["achievement", "power"]);
    }
}
