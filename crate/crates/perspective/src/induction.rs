//! Rendering of perspective-induction messages.

use persona_questionnaire::Questionnaire;

use crate::types::{Channel, Direction, Person, PerspectiveSpec, Role};
use crate::Error;

/// The sentence skeletons, overridable because only fragments of the
/// original wording are public. `{intensity}` and `{targets}` are replaced
/// at render time.
#[derive(Debug, Clone)]
pub struct InductionTemplates {
    pub second_person: String,
    pub third_person: String,
}

impl Default for InductionTemplates {
    fn default() -> Self {
        InductionTemplates {
            second_person: "You are a person attributing {intensity} importance to {targets}."
                .to_string(),
            third_person:
                "The following are answers from a person attributing {intensity} importance to {targets}."
                    .to_string(),
        }
    }
}

/// Renders the induction message for a non-`None` perspective with the
/// default templates.
pub fn render_induction(
    perspective: &PerspectiveSpec,
    questionnaire: &Questionnaire,
) -> Result<(Role, String), Error> {
    render_induction_with(perspective, questionnaire, &InductionTemplates::default())
}

pub fn render_induction_with(
    perspective: &PerspectiveSpec,
    questionnaire: &Questionnaire,
    templates: &InductionTemplates,
) -> Result<(Role, String), Error> {
    match perspective {
        PerspectiveSpec::None => Err(Error::NoInduction),
        PerspectiveSpec::FreeText { text, channel, .. } => {
            if text.is_empty() {
                return Err(Error::EmptyFreeText);
            }
            Ok((role_for(*channel), text.clone()))
        }
        PerspectiveSpec::ValueTargeted {
            targets,
            intensity,
            channel,
            person,
        } => {
            if targets.is_empty() {
                return Err(Error::EmptyTargets);
            }
            for (dim, _) in targets {
                if questionnaire.dimension(dim).is_none() {
                    return Err(Error::UnknownDimension(dim.clone()));
                }
            }
            let targets_phrase = render_targets(targets, questionnaire);
            let template = match person {
                Person::Second => &templates.second_person,
                Person::Third => &templates.third_person,
            };
            let text = template
                .replace("{intensity}", intensity.phrase())
                .replace("{targets}", &targets_phrase);
            Ok((role_for(*channel), text))
        }
    }
}

fn role_for(channel: Channel) -> Role {
    match channel {
        Channel::SystemMsg => Role::System,
        Channel::UserMsg => Role::User,
    }
}

/// Renders the target list, grouping by direction: "high power, achievement
/// and self-enhancement". When the high-direction targets are exactly the
/// members of one higher-order category, the category name is appended to
/// the list, matching how category perspectives are phrased.
fn render_targets(targets: &[(String, Direction)], q: &Questionnaire) -> String {
    let mut groups: Vec<(Direction, Vec<String>)> = Vec::new();
    for (dim, dir) in targets {
        let name = q
            .dimension(dim)
            .map(|d| d.name.to_lowercase())
            .unwrap_or_else(|| dim.clone());
        match groups.last_mut() {
            Some((last_dir, names)) if last_dir == dir => names.push(name),
            _ => groups.push((*dir, vec![name])),
        }
    }

    // Category suffix for an exact member match among the high targets.
    let high_ids: Vec<&String> = targets
        .iter()
        .filter(|(_, d)| *d == Direction::High)
        .map(|(id, _)| id)
        .collect();
    let category_suffix = q.categories.iter().find_map(|cat| {
        let mut members = q.category_members(&cat.id);
        members.sort();
        let mut sorted_high: Vec<String> = high_ids.iter().map(|s| s.to_string()).collect();
        sorted_high.sort();
        (members == sorted_high).then(|| cat.name.to_lowercase())
    });

    let mut parts = Vec::new();
    for (dir, mut names) in groups {
        if dir == Direction::High {
            if let Some(cat) = &category_suffix {
                names.push(cat.clone());
            }
        }
        parts.push(format!("{} {}", dir.word(), join_natural(&names)));
    }
    join_natural(&parts)
}

/// "a", "a and b", "a, b and c".
fn join_natural(parts: &[String]) -> String {
    match parts.len() {
        0 => String::new(),
        1 => parts[0].clone(),
        _ => format!(
            "{} and {}",
            parts[..parts.len() - 1].join(", "),
            parts[parts.len() - 1]
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Intensity;
    use persona_questionnaire::builtin;

    fn vsm_high_individualism(intensity: Intensity, person: Person) -> PerspectiveSpec {
        PerspectiveSpec::ValueTargeted {
            targets: vec![("individualism".to_string(), Direction::High)],
            intensity,
            channel: Channel::SystemMsg,
            person,
        }
    }

    #[test]
    fn second_person_extreme_single_target() {
        let q = builtin("vsm").unwrap();
        let (role, text) = render_induction(
            &vsm_high_individualism(Intensity::Extreme, Person::Second),
            &q,
        )
        .unwrap();
        assert_eq!(role, Role::System);
        assert_eq!(
            text,
            "You are a person attributing extremely more importance to high individualism."
        );
    }

    #[test]
    fn slight_intensity_only_changes_the_intensity_word() {
        let q = builtin("vsm").unwrap();
        let (_, extreme) = render_induction(
            &vsm_high_individualism(Intensity::Extreme, Person::Second),
            &q,
        )
        .unwrap();
        let (_, slight) = render_induction(
            &vsm_high_individualism(Intensity::Slight, Person::Second),
            &q,
        )
        .unwrap();
        assert_eq!(extreme.replace("extremely more", "slightly more"), slight);
        assert!(slight.contains("slightly more importance"));
    }

    #[test]
    fn third_person_template() {
        let q = builtin("vsm").unwrap();
        let (_, text) = render_induction(
            &vsm_high_individualism(Intensity::Extreme, Person::Third),
            &q,
        )
        .unwrap();
        assert_eq!(
            text,
            "The following are answers from a person attributing extremely more importance to high individualism."
        );
    }

    #[test]
    fn category_perspective_appends_category_name() {
        let q = builtin("pvq").unwrap();
        let p = PerspectiveSpec::ValueTargeted {
            targets: vec![
                ("achievement".to_string(), Direction::High),
                ("power".to_string(), Direction::High),
            ],
            intensity: Intensity::Extreme,
            channel: Channel::SystemMsg,
            person: Person::Second,
        };
        let (_, text) = render_induction(&p, &q).unwrap();
        assert_eq!(
            text,
            "You are a person attributing extremely more importance to high achievement, power and self-enhancement."
        );
    }

    #[test]
    fn free_text_is_emitted_verbatim() {
        let q = builtin("pvq").unwrap();
        let p = PerspectiveSpec::FreeText {
            text: "You are Pippin from The Lord of the Rings".to_string(),
            channel: Channel::SystemMsg,
            label: "pippin".to_string(),
        };
        let (role, text) = render_induction(&p, &q).unwrap();
        assert_eq!(role, Role::System);
        assert_eq!(text, "You are Pippin from The Lord of the Rings");
    }

    #[test]
    fn unknown_dimension_is_rejected() {
        let q = builtin("vsm").unwrap();
        let p = PerspectiveSpec::ValueTargeted {
            targets: vec![("bogus".to_string(), Direction::High)],
            intensity: Intensity::Extreme,
            channel: Channel::UserMsg,
            person: Person::Second,
        };
        assert!(
            matches!(render_induction(&p, &q), Err(Error::UnknownDimension(d)) if d == "bogus")
        );
    }

    #[test]
    fn empty_targets_are_rejected() {
        let q = builtin("vsm").unwrap();
        let p = PerspectiveSpec::ValueTargeted {
            targets: vec![],
            intensity: Intensity::Extreme,
            channel: Channel::UserMsg,
            person: Person::Second,
        };
        assert!(matches!(render_induction(&p, &q), Err(Error::EmptyTargets)));
    }
}
