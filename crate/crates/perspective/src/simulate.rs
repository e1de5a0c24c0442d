//! Live generation of conversation contexts by letting two endpoints talk.

use async_trait::async_trait;

use crate::types::{ChatMessage, ContextSpec};
use crate::Error;

/// Anything that can produce the next turn of a conversation. The model
/// client implements this for real endpoints; tests use scripted
/// providers.
#[async_trait]
pub trait ChatTurnProvider: Send + Sync {
    /// Produces the next message text given the transcript so far.
    async fn reply(
        &self,
        transcript: &[ChatMessage],
    ) -> Result<String, Box<dyn std::error::Error + Send + Sync>>;
}

/// Simulates a human/chatbot conversation: the seed message opens as the
/// simulated human (user role), then the chatbot and the simulant
/// alternate for `exchanges` further messages. With the default five
/// exchanges the transcript has six messages and ends on the assistant
/// side, matching the shipped fixtures.
pub async fn simulate_conversation(
    topic_seed_message: &str,
    chatbot: &dyn ChatTurnProvider,
    simulant: &dyn ChatTurnProvider,
    exchanges: usize,
    label: &str,
) -> Result<ContextSpec, Error> {
    if exchanges == 0 {
        return Err(Error::NoExchanges);
    }
    let mut messages = vec![ChatMessage::user(topic_seed_message)];
    for turn in 0..exchanges {
        let chatbot_turn = turn % 2 == 0;
        let provider = if chatbot_turn { chatbot } else { simulant };
        let text = provider
            .reply(&messages)
            .await
            .map_err(|e| Error::Simulation {
                cause: e.to_string(),
                transcript: messages.clone(),
            })?;
        messages.push(if chatbot_turn {
            ChatMessage::assistant(text)
        } else {
            ChatMessage::user(text)
        });
    }
    Ok(ContextSpec::Conversation {
        label: label.to_string(),
        messages,
    })
}
