//! Assembly of full prompt bundles from questionnaire, perspective,
//! context and permutation.

use persona_questionnaire::{Item, Questionnaire};

use crate::induction::{render_induction_with, InductionTemplates};
use crate::types::{
    CandidateAnswer, Channel, ChatMessage, ContextSpec, FormatId, PerspectiveSpec, PromptBundle,
    Role,
};
use crate::wrap_format;
use crate::Error;

/// Builds the complete message list for administering one item.
///
/// Message order: system induction (when the perspective rides the system
/// channel), then the context's messages, then one user message holding
/// the user-channel induction (if any), the prepended paragraph (if any)
/// and the formatted question block. The item always appears alone; no
/// earlier questions or answers are ever included.
pub fn build_prompt(
    q: &Questionnaire,
    item: &Item,
    perspective: &PerspectiveSpec,
    context: &ContextSpec,
    permutation: &[usize],
) -> Result<PromptBundle, Error> {
    build_prompt_with(
        q,
        item,
        perspective,
        context,
        permutation,
        &InductionTemplates::default(),
    )
}

pub fn build_prompt_with(
    q: &Questionnaire,
    item: &Item,
    perspective: &PerspectiveSpec,
    context: &ContextSpec,
    permutation: &[usize],
    templates: &InductionTemplates,
) -> Result<PromptBundle, Error> {
    if q.item(&item.id).is_none() {
        return Err(Error::UnknownItem(item.id.clone()));
    }
    let points = q.scale.points();
    if points > 26 {
        return Err(Error::TooManyOptions { points });
    }
    if permutation.len() != points {
        return Err(Error::PermutationShape {
            got: permutation.len(),
            want: points,
        });
    }
    let mut seen = vec![false; points];
    for &orig in permutation {
        if orig >= points || seen[orig] {
            return Err(Error::NotAPermutation);
        }
        seen[orig] = true;
    }

    let candidate_answers: Vec<CandidateAnswer> = permutation
        .iter()
        .enumerate()
        .map(|(pos, &orig)| CandidateAnswer {
            presented_label: char::from(b'A' + pos as u8).to_string(),
            original_option_index: orig,
        })
        .collect();
    let options: Vec<(String, String)> = candidate_answers
        .iter()
        .map(|c| {
            (
                c.presented_label.clone(),
                q.scale.labels[c.original_option_index].clone(),
            )
        })
        .collect();

    let induction = match perspective {
        PerspectiveSpec::None => None,
        _ => Some(render_induction_with(perspective, q, templates)?),
    };

    let mut messages: Vec<ChatMessage> = Vec::new();
    if let Some((Role::System, text)) = &induction {
        if let ContextSpec::Conversation {
            messages: ctx_msgs, ..
        } = context
        {
            if ctx_msgs.iter().any(|m| m.role == Role::System) {
                return Err(Error::SystemMessageConflict);
            }
        }
        messages.push(ChatMessage::system(text.clone()));
    }
    if let ContextSpec::Conversation {
        messages: ctx_msgs, ..
    } = context
    {
        messages.extend(ctx_msgs.iter().cloned());
    }

    let format = match context {
        ContextSpec::TextFormat { format } => *format,
        _ => FormatId::Chat,
    };
    let block = format!("{}\n\n{}", q.instructions, item.text);
    let (question_text, extraction) = wrap_format(&block, &options, format);

    let mut parts: Vec<String> = Vec::new();
    if let Some((Role::User, text)) = &induction {
        parts.push(text.clone());
    }
    if let ContextSpec::PrependedParagraph { paragraph, .. } = context {
        parts.push(paragraph.clone());
    }
    parts.push(question_text);
    messages.push(ChatMessage::user(parts.join("\n\n")));

    Ok(PromptBundle {
        messages,
        candidate_answers,
        extraction,
    })
}

impl PerspectiveSpec {
    /// Convenience constructor for a value-targeted perspective aiming all
    /// listed dimensions high.
    pub fn targeting_high(
        dims: &[&str],
        intensity: crate::types::Intensity,
        channel: Channel,
        person: crate::types::Person,
    ) -> PerspectiveSpec {
        PerspectiveSpec::ValueTargeted {
            targets: dims
                .iter()
                .map(|d| (d.to_string(), crate::types::Direction::High))
                .collect(),
            intensity,
            channel,
            person,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Intensity, Person};
    use persona_questionnaire::builtin;

    #[test]
    fn item_appears_exactly_once_and_alone() {
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
        assert_eq!(bundle.messages.len(), 1);
        assert_eq!(bundle.messages[0].role, Role::User);
        assert!(bundle.messages[0].text.contains(&item.text));
        // No other item text leaks into the prompt.
        for other in q.items.iter().filter(|i| i.id != "pvq01") {
            assert!(!bundle.messages[0].text.contains(&other.text));
        }
    }

    #[test]
    fn permutation_bookkeeping_records_the_swap() {
        let q = builtin("pvq").unwrap();
        let item = q.item("pvq01").unwrap().clone();
        // Swap the first two options.
        let bundle = build_prompt(
            &q,
            &item,
            &PerspectiveSpec::None,
            &ContextSpec::TextFormat {
                format: FormatId::CppCode,
            },
            &[1, 0, 2, 3, 4, 5],
        )
        .unwrap();
        assert_eq!(bundle.original_index("A"), Some(1));
        assert_eq!(bundle.original_index("B"), Some(0));
        // Presented "A" shows the label of original option 1.
        assert!(bundle.messages[0]
            .text
            .contains("{\"A.\", \"Not like me at all\"}"));
    }

    #[test]
    fn system_channel_induction_leads_the_transcript() {
        let q = builtin("pvq").unwrap();
        let item = q.item("pvq01").unwrap().clone();
        let persp = PerspectiveSpec::targeting_high(
            &["achievement", "power"],
            Intensity::Extreme,
            Channel::SystemMsg,
            Person::Second,
        );
        let bundle =
            build_prompt(&q, &item, &persp, &ContextSpec::None, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(bundle.messages.len(), 2);
        assert_eq!(bundle.messages[0].role, Role::System);
        assert!(bundle.messages[0]
            .text
            .contains("extremely more importance"));
        assert_eq!(bundle.messages[1].role, Role::User);
    }

    #[test]
    fn user_channel_induction_prefixes_the_question() {
        let q = builtin("pvq").unwrap();
        let item = q.item("pvq01").unwrap().clone();
        let persp = PerspectiveSpec::targeting_high(
            &["achievement", "power"],
            Intensity::Extreme,
            Channel::UserMsg,
            Person::Second,
        );
        let bundle =
            build_prompt(&q, &item, &persp, &ContextSpec::None, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(bundle.messages.len(), 1);
        assert!(bundle.messages[0]
            .text
            .starts_with("You are a person attributing"));
        assert!(bundle.messages[0].text.contains("Here we briefly describe"));
    }

    #[test]
    fn system_conflict_with_conversation_system_message() {
        let q = builtin("pvq").unwrap();
        let item = q.item("pvq01").unwrap().clone();
        let persp = PerspectiveSpec::targeting_high(
            &["power"],
            Intensity::Extreme,
            Channel::SystemMsg,
            Person::Second,
        );
        let ctx = ContextSpec::Conversation {
            label: "weird".to_string(),
            messages: vec![
                ChatMessage::system("Already set."),
                ChatMessage::user("Hi."),
            ],
        };
        let err = build_prompt(&q, &item, &persp, &ctx, &[0, 1, 2, 3, 4, 5]).unwrap_err();
        assert!(matches!(err, Error::SystemMessageConflict));
    }

    #[test]
    fn bad_permutations_are_rejected() {
        let q = builtin("pvq").unwrap();
        let item = q.item("pvq01").unwrap().clone();
        let err = build_prompt(
            &q,
            &item,
            &PerspectiveSpec::None,
            &ContextSpec::None,
            &[0, 1, 2],
        )
        .unwrap_err();
        assert!(matches!(err, Error::PermutationShape { .. }));
        let err = build_prompt(
            &q,
            &item,
            &PerspectiveSpec::None,
            &ContextSpec::None,
            &[0, 0, 2, 3, 4, 5],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotAPermutation));
    }

    #[test]
    fn build_prompt_is_pure() {
        let q = builtin("ipip").unwrap();
        let item = q.item("ipip07").unwrap().clone();
        let ctx = ContextSpec::TextFormat {
            format: FormatId::Latex,
        };
        let a = build_prompt(&q, &item, &PerspectiveSpec::None, &ctx, &[5, 4, 3, 2, 1, 0]).unwrap();
        let b = build_prompt(&q, &item, &PerspectiveSpec::None, &ctx, &[5, 4, 3, 2, 1, 0]).unwrap();
        assert_eq!(a, b);
    }
}
