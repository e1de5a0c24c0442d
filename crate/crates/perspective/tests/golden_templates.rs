//! Golden-file equality for the five textual formats and the full
//! induction-bundle layout, plus the permutation round-trip invariant.

use persona_perspective::{
    build_prompt, load_context_fixture, permute_options, to_msgs, Channel, ContextSpec, FormatId,
    Intensity, Person, PerspectiveSpec, Role,
};
use persona_questionnaire::builtin;

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("missing {path}: {e}"));
    // Files end with one conventional newline that is not part of the prompt.
    text.strip_suffix('\n').unwrap_or(&text).to_string()
}

/// Identity permutation of the PVQ fixture item rendered in every format.
fn render(format: FormatId) -> String {
    let q = builtin("pvq").unwrap();
    let item = q.item("pvq01").unwrap().clone();
    let bundle = build_prompt(
        &q,
        &item,
        &PerspectiveSpec::None,
        &ContextSpec::TextFormat { format },
        &[0, 1, 2, 3, 4, 5],
    )
    .unwrap();
    assert_eq!(bundle.messages.len(), 1);
    bundle.messages[0].text.clone()
}

#[test]
fn chat_format_matches_golden() {
    assert_eq!(render(FormatId::Chat), golden("chat.golden"));
}

#[test]
fn py_format_matches_golden() {
    assert_eq!(render(FormatId::PyCode), golden("code_py.golden"));
}

#[test]
fn cpp_format_matches_golden() {
    assert_eq!(render(FormatId::CppCode), golden("code_cpp.golden"));
}

#[test]
fn toml_format_matches_golden() {
    assert_eq!(render(FormatId::TomlConf), golden("conf_toml.golden"));
}

#[test]
fn latex_format_matches_golden() {
    assert_eq!(render(FormatId::Latex), golden("latex.golden"));
}

#[test]
fn induction_bundle_layout_matches_golden() {
    // System-channel second-person induction of the self-enhancement
    // category values for the PVQ fixture item.
    let q = builtin("pvq").unwrap();
    let item = q.item("pvq01").unwrap().clone();
    let persp = PerspectiveSpec::targeting_high(
        &["achievement", "power"],
        Intensity::Extreme,
        Channel::SystemMsg,
        Person::Second,
    );
    let bundle = build_prompt(&q, &item, &persp, &ContextSpec::None, &[0, 1, 2, 3, 4, 5]).unwrap();
    let rendered = to_msgs(&bundle.messages);
    let rendered = rendered.strip_suffix('\n').unwrap_or(&rendered);
    assert_eq!(rendered, golden("fig1_bundle.golden"));
}

#[test]
fn conversation_bundle_ends_with_the_questionnaire_message() {
    let q = builtin("pvq").unwrap();
    let item = q.item("pvq01").unwrap().clone();
    let ctx = load_context_fixture("conversation/joke").unwrap();
    let bundle =
        build_prompt(&q, &item, &PerspectiveSpec::None, &ctx, &[0, 1, 2, 3, 4, 5]).unwrap();
    // Six fixture messages plus the questionnaire user message.
    assert_eq!(bundle.messages.len(), 7);
    assert_eq!(bundle.messages[0].text, "Tell me a joke.");
    let last = bundle.messages.last().unwrap();
    assert_eq!(last.role, Role::User);
    assert!(last.text.starts_with("Here we briefly describe"));
    assert!(last.text.ends_with("Answer:"));
}

#[test]
fn wiki_bundle_prepends_the_paragraph() {
    let q = builtin("pvq").unwrap();
    let item = q.item("pvq01").unwrap().clone();
    let ctx = load_context_fixture("wiki/hip-hop").unwrap();
    let bundle =
        build_prompt(&q, &item, &PerspectiveSpec::None, &ctx, &[0, 1, 2, 3, 4, 5]).unwrap();
    assert_eq!(bundle.messages.len(), 1);
    assert!(bundle.messages[0].text.starts_with("Hip hop"));
    assert!(bundle.messages[0]
        .text
        .contains("\n\nHere we briefly describe"));
}

#[test]
fn round_trip_exhaustive_over_labels_permutations_questionnaires() {
    // Selecting any presented label maps back to the original option
    // index, exhaustively over all labels, 50 seeded permutations and the
    // three shipped instruments.
    for qid in ["pvq", "vsm", "ipip"] {
        let q = builtin(qid).unwrap();
        let item = q.items[0].clone();
        let perms = permute_options(&q, 17, 50, false);
        assert_eq!(perms.len(), 50);
        for perm in &perms {
            let bundle =
                build_prompt(&q, &item, &PerspectiveSpec::None, &ContextSpec::None, perm).unwrap();
            assert_eq!(bundle.extraction.valid_tokens.len(), q.scale.points());
            for (pos, candidate) in bundle.candidate_answers.iter().enumerate() {
                let label = &candidate.presented_label;
                assert_eq!(bundle.extraction.valid_tokens[pos], *label);
                let original = bundle.original_index(label).unwrap();
                assert_eq!(original, perm[pos]);
                // Inverting the permutation recovers the presented position.
                let inv = persona_perspective::invert(perm);
                assert_eq!(inv[original], pos);
            }
        }
    }
}

#[test]
fn identity_chat_block_reproduces_the_scrambled_label_order() {
    // The PVQ fixture preserves its source's scrambled label order, so the
    // identity permutation must show "A. Not like me / B. Not like me at
    // all / ...".
    let text = render(FormatId::Chat);
    let a_pos = text.find("A. Not like me\n").unwrap();
    let b_pos = text.find("B. Not like me at all\n").unwrap();
    assert!(a_pos < b_pos);
}
