//! Shipped context fixtures: five transcribed conversations, six frozen
//! encyclopedia paragraphs and the five textual formats. Fixture content
//! is embedded so lookups are byte-stable across installs.

use crate::types::{ChatMessage, ContextSpec, FormatId, Role};
use crate::Error;

macro_rules! fixture {
    ($path:literal) => {
        include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../fixtures/contexts/",
            $path
        ))
    };
}

const CONVERSATIONS: [(&str, &str); 5] = [
    ("chess", fixture!("conversations/chess.msgs")),
    ("grammar", fixture!("conversations/grammar.msgs")),
    ("history", fixture!("conversations/history.msgs")),
    ("joke", fixture!("conversations/joke.msgs")),
    ("poem", fixture!("conversations/poem.msgs")),
];

const WIKI: [(&str, &str); 6] = [
    ("classical", fixture!("wiki/classical.txt")),
    ("gospel", fixture!("wiki/gospel.txt")),
    ("heavy-metal", fixture!("wiki/heavy-metal.txt")),
    ("hip-hop", fixture!("wiki/hip-hop.txt")),
    ("jazz", fixture!("wiki/jazz.txt")),
    ("reggae", fixture!("wiki/reggae.txt")),
];

/// Names accepted by [`load_context_fixture`].
pub fn available_fixtures() -> Vec<String> {
    let mut names = vec!["none".to_string()];
    names.extend(
        CONVERSATIONS
            .iter()
            .map(|(n, _)| format!("conversation/{n}")),
    );
    names.extend(WIKI.iter().map(|(n, _)| format!("wiki/{n}")));
    names.extend(
        FormatId::all()
            .iter()
            .map(|f| format!("format/{}", f.label())),
    );
    names
}

/// Loads a shipped context by name: `none`, `conversation/<topic>`,
/// `wiki/<genre>` or `format/<format>`.
pub fn load_context_fixture(name: &str) -> Result<ContextSpec, Error> {
    if name == "none" {
        return Ok(ContextSpec::None);
    }
    if let Some(topic) = name.strip_prefix("conversation/") {
        if let Some((_, text)) = CONVERSATIONS.iter().find(|(n, _)| *n == topic) {
            return Ok(ContextSpec::Conversation {
                label: topic.to_string(),
                messages: parse_msgs(text).map_err(|problem| Error::BadFixture {
                    name: name.to_string(),
                    problem,
                })?,
            });
        }
    }
    if let Some(genre) = name.strip_prefix("wiki/") {
        if let Some((_, text)) = WIKI.iter().find(|(n, _)| *n == genre) {
            return Ok(ContextSpec::PrependedParagraph {
                label: genre.to_string(),
                paragraph: text.trim_end_matches('\n').to_string(),
            });
        }
    }
    if let Some(fmt) = name.strip_prefix("format/") {
        if let Some(format) = FormatId::parse(fmt) {
            return Ok(ContextSpec::TextFormat { format });
        }
    }
    Err(Error::UnknownFixture {
        name: name.to_string(),
        available: available_fixtures(),
    })
}

/// Parses the role-tagged transcript format: a line starting with
/// `USER : `, `ASSISTANT : ` or `SYSTEM : ` opens a message; following
/// lines extend it.
pub fn parse_msgs(text: &str) -> Result<Vec<ChatMessage>, String> {
    let mut messages: Vec<ChatMessage> = Vec::new();
    for line in text.lines() {
        let tagged = [
            ("USER : ", Role::User),
            ("ASSISTANT : ", Role::Assistant),
            ("SYSTEM : ", Role::System),
        ]
        .iter()
        .find_map(|(tag, role)| line.strip_prefix(tag).map(|rest| (*role, rest)));
        match tagged {
            Some((role, rest)) => messages.push(ChatMessage {
                role,
                text: rest.to_string(),
            }),
            None => match messages.last_mut() {
                Some(last) => {
                    last.text.push('\n');
                    last.text.push_str(line);
                }
                None => return Err(format!("line before any role tag: {line:?}")),
            },
        }
    }
    if messages.is_empty() {
        return Err("transcript is empty".to_string());
    }
    Ok(messages)
}

/// Serializes a transcript back into the role-tagged line format.
pub fn to_msgs(messages: &[ChatMessage]) -> String {
    let mut out = String::new();
    for m in messages {
        let tag = match m.role {
            Role::User => "USER : ",
            Role::Assistant => "ASSISTANT : ",
            Role::System => "SYSTEM : ",
        };
        out.push_str(tag);
        out.push_str(&m.text);
        out.push('\n');
    }
    out
}
