//! HTTP endpoint profiles and the option-selection ladder.

use std::sync::Arc;
use std::time::Duration;

use async_trait::async_trait;
use persona_perspective::{ChatMessage, PromptBundle, Role};
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;
use tokio::time::Instant;

use crate::parse::first_valid_token;
use crate::wire::{ChatRequest, ChatResponse, WireMessage};
use crate::{Error, SelectionMethod, SelectionResult};

fn default_max_attempts() -> u32 {
    3
}

/// A chat-completions endpoint and its capabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointProfile {
    pub id: String,
    pub base_url: String,
    pub model_name: String,
    pub supports_system_role: bool,
    pub supports_token_scores: bool,
    /// Environment variable holding the bearer credential; never a literal
    /// key. Defaults to `PERSONA_PROBE_API_KEY_<ID>`.
    #[serde(default)]
    pub auth_ref: Option<String>,
    /// Requests per minute, enforced client-side.
    pub rate_limit: f64,
    /// Per-request timeout in seconds.
    pub timeout: f64,
    #[serde(default = "default_max_attempts")]
    pub max_attempts: u32,
}

impl EndpointProfile {
    pub fn auth_env_var(&self) -> String {
        self.auth_ref
            .clone()
            .unwrap_or_else(|| format!("PERSONA_PROBE_API_KEY_{}", self.id.to_uppercase()))
    }
}

/// Anything that can answer a prompt bundle: HTTP endpoints and scripted
/// respondents share this surface.
#[async_trait]
pub trait Respondent: Send + Sync {
    async fn select_option(&self, bundle: &PromptBundle) -> Result<SelectionResult, Error>;

    /// Identifier used in cache keys and reports.
    fn model_id(&self) -> String;

    fn supports_system_role(&self) -> bool;
}

/// Token-bucket limiter: `rate` requests per minute.
struct RateLimiter {
    state: Mutex<(f64, Instant)>,
    per_second: f64,
    burst: f64,
}

impl RateLimiter {
    fn new(per_minute: f64) -> Self {
        let per_second = per_minute / 60.0;
        RateLimiter {
            state: Mutex::new((1.0, Instant::now())),
            per_second,
            burst: per_minute.clamp(1.0, 60.0),
        }
    }

    async fn acquire(&self) {
        loop {
            let wait = {
                let mut state = self.state.lock().await;
                let now = Instant::now();
                let elapsed = now.duration_since(state.1).as_secs_f64();
                state.0 = (state.0 + elapsed * self.per_second).min(self.burst);
                state.1 = now;
                if state.0 >= 1.0 {
                    state.0 -= 1.0;
                    return;
                }
                Duration::from_secs_f64((1.0 - state.0) / self.per_second)
            };
            tokio::time::sleep(wait).await;
        }
    }
}

/// An HTTP chat-completions client with rate limiting and bounded retries.
pub struct HttpEndpoint {
    profile: EndpointProfile,
    client: reqwest::Client,
    limiter: Arc<RateLimiter>,
}

impl HttpEndpoint {
    pub fn new(profile: EndpointProfile) -> Self {
        let client = reqwest::Client::builder()
            .timeout(Duration::from_secs_f64(profile.timeout))
            .build()
            .expect("reqwest client");
        let limiter = Arc::new(RateLimiter::new(profile.rate_limit));
        HttpEndpoint {
            profile,
            client,
            limiter,
        }
    }

    pub fn profile(&self) -> &EndpointProfile {
        &self.profile
    }

    /// Posts a chat request with exponential backoff on transport errors,
    /// 429 and 5xx. The attempt budget comes from the profile.
    pub async fn post_chat(&self, request: &ChatRequest) -> Result<ChatResponse, Error> {
        let url = format!(
            "{}/chat/completions",
            self.profile.base_url.trim_end_matches('/')
        );
        let auth = std::env::var(self.profile.auth_env_var()).ok();
        let mut delay = Duration::from_millis(250);
        let mut last_err = String::new();
        for attempt in 1..=self.profile.max_attempts {
            self.limiter.acquire().await;
            let mut req = self.client.post(&url).json(request);
            if let Some(key) = &auth {
                req = req.bearer_auth(key);
            }
            match req.send().await {
                Ok(resp) => {
                    let status = resp.status();
                    if status.is_success() {
                        let body = resp.text().await.map_err(|e| Error::Transport {
                            attempts: attempt,
                            cause: e.to_string(),
                        })?;
                        return serde_json::from_str(&body).map_err(|e| Error::Transport {
                            attempts: attempt,
                            cause: format!("bad response body: {e}"),
                        });
                    }
                    let body = resp.text().await.unwrap_or_default();
                    if status.as_u16() == 429 || status.is_server_error() {
                        last_err = format!("status {status}");
                    } else {
                        return Err(Error::Status {
                            status: status.as_u16(),
                            body,
                        });
                    }
                }
                Err(e) => last_err = e.to_string(),
            }
            if attempt < self.profile.max_attempts {
                tokio::time::sleep(delay).await;
                delay *= 2;
            }
        }
        Err(Error::Transport {
            attempts: self.profile.max_attempts,
            cause: last_err,
        })
    }

    fn wire_messages(&self, bundle: &PromptBundle) -> Result<Vec<WireMessage>, Error> {
        if !self.profile.supports_system_role
            && bundle.messages.iter().any(|m| m.role == Role::System)
        {
            return Err(Error::SystemRoleUnsupported);
        }
        Ok(bundle.messages.iter().map(WireMessage::from).collect())
    }

    /// Tier 1: compare returned token scores at the answer position.
    async fn try_token_scores(
        &self,
        bundle: &PromptBundle,
    ) -> Result<Option<(String, String, bool)>, Error> {
        let request = ChatRequest {
            model: self.profile.model_name.clone(),
            messages: self.wire_messages(bundle)?,
            temperature: 0.0,
            max_tokens: 4,
            logprobs: Some(true),
            top_logprobs: Some(20),
            continuation_scores: None,
        };
        let response = self.post_chat(&request).await?;
        let raw = serde_json::to_string(&response).expect("response serializes");
        let Some(choice) = response.choices.first() else {
            return Ok(None);
        };
        let Some(logprobs) = &choice.logprobs else {
            return Ok(None);
        };
        let Some(first_pos) = logprobs.content.first() else {
            return Ok(None);
        };
        // Scores of valid tokens at the first generated position. The
        // chosen token itself counts alongside the alternatives.
        let mut scored: Vec<(usize, f64)> = Vec::new();
        for (idx, token) in bundle.extraction.valid_tokens.iter().enumerate() {
            let mut best: Option<f64> = None;
            let mut consider = |tok: &str, lp: f64| {
                if normalize_token(tok) == *token {
                    best = Some(best.map_or(lp, |b: f64| b.max(lp)));
                }
            };
            consider(&first_pos.token, first_pos.logprob);
            for entry in &first_pos.top_logprobs {
                consider(&entry.token, entry.logprob);
            }
            if let Some(lp) = best {
                scored.push((idx, lp));
            }
        }
        if scored.is_empty() {
            return Ok(None);
        }
        let best_score = scored
            .iter()
            .map(|(_, lp)| *lp)
            .fold(f64::NEG_INFINITY, f64::max);
        let winners: Vec<usize> = scored
            .iter()
            .filter(|(_, lp)| *lp == best_score)
            .map(|(i, _)| *i)
            .collect();
        let tie = winners.len() > 1;
        let label = bundle.extraction.valid_tokens[winners[0]].clone();
        Ok(Some((label, raw, tie)))
    }

    /// Tier 2: ask the server to score each candidate as a forced
    /// continuation; unsupported servers omit the field.
    async fn try_continuations(
        &self,
        bundle: &PromptBundle,
    ) -> Result<Option<(String, String, bool)>, Error> {
        let request = ChatRequest {
            model: self.profile.model_name.clone(),
            messages: self.wire_messages(bundle)?,
            temperature: 0.0,
            max_tokens: 0,
            logprobs: None,
            top_logprobs: None,
            continuation_scores: Some(bundle.extraction.valid_tokens.clone()),
        };
        let response = self.post_chat(&request).await?;
        let raw = serde_json::to_string(&response).expect("response serializes");
        let Some(scores) = &response.continuation_logprobs else {
            return Ok(None);
        };
        let mut best: Option<(usize, f64)> = None;
        let mut tie = false;
        for (idx, token) in bundle.extraction.valid_tokens.iter().enumerate() {
            let Some(lp) = scores.get(token) else {
                continue;
            };
            match best {
                None => best = Some((idx, *lp)),
                Some((_, blp)) if *lp > blp => {
                    best = Some((idx, *lp));
                    tie = false;
                }
                Some((_, blp)) if *lp == blp => tie = true,
                _ => {}
            }
        }
        Ok(best.map(|(idx, _)| (bundle.extraction.valid_tokens[idx].clone(), raw, tie)))
    }

    /// Tier 3: greedy generation, first valid token wins.
    async fn generate_and_match(&self, bundle: &PromptBundle) -> Result<(String, String), Error> {
        let request = ChatRequest {
            model: self.profile.model_name.clone(),
            messages: self.wire_messages(bundle)?,
            temperature: 0.0,
            max_tokens: 16,
            logprobs: None,
            top_logprobs: None,
            continuation_scores: None,
        };
        let response = self.post_chat(&request).await?;
        let raw = serde_json::to_string(&response).expect("response serializes");
        let generation = response
            .choices
            .first()
            .map(|c| c.message.content.clone())
            .unwrap_or_default();
        match first_valid_token(&generation, &bundle.extraction.valid_tokens) {
            Some(label) => Ok((label, raw)),
            None => Err(Error::Refusal { generation }),
        }
    }
}

/// Strips whitespace and trailing punctuation a tokenizer may attach to an
/// option letter.
fn normalize_token(token: &str) -> String {
    token
        .trim()
        .trim_end_matches(['.', ':', ')', ']', '"', '\''])
        .to_string()
}

#[async_trait]
impl Respondent for HttpEndpoint {
    async fn select_option(&self, bundle: &PromptBundle) -> Result<SelectionResult, Error> {
        let finish = |label: String, method, raw: String, tie: bool| {
            let original = bundle
                .original_index(&label)
                .ok_or_else(|| Error::LabelOutsideCandidates(label.clone()))?;
            Ok(SelectionResult {
                presented_label: label,
                original_option_index: original,
                method,
                raw_payload: raw,
                cached: false,
                tie_broken: tie,
            })
        };
        if self.profile.supports_token_scores {
            if let Some((label, raw, tie)) = self.try_token_scores(bundle).await? {
                return finish(label, SelectionMethod::TokenScores, raw, tie);
            }
        }
        if let Some((label, raw, tie)) = self.try_continuations(bundle).await? {
            return finish(label, SelectionMethod::PerOptionContinuation, raw, tie);
        }
        let (label, raw) = self.generate_and_match(bundle).await?;
        finish(label, SelectionMethod::GenerateAndMatch, raw, false)
    }

    fn model_id(&self) -> String {
        self.profile.model_name.clone()
    }

    fn supports_system_role(&self) -> bool {
        self.profile.supports_system_role
    }
}

/// Lets an endpoint serve as a conversation partner for live context
/// generation. `invert_roles` makes the endpoint play the human side: it
/// sees the transcript with user/assistant swapped and its system prompt
/// prepended.
pub struct ConversationSide {
    pub endpoint: HttpEndpoint,
    pub system_prompt: Option<String>,
    pub invert_roles: bool,
}

#[async_trait]
impl persona_perspective::ChatTurnProvider for ConversationSide {
    async fn reply(
        &self,
        transcript: &[ChatMessage],
    ) -> Result<String, Box<dyn std::error::Error + Send + Sync>> {
        let mut messages: Vec<WireMessage> = Vec::new();
        if let Some(system) = &self.system_prompt {
            messages.push(WireMessage {
                role: "system".into(),
                content: system.clone(),
            });
        }
        for m in transcript {
            let role = match (m.role, self.invert_roles) {
                (Role::User, false) | (Role::Assistant, true) => "user",
                (Role::User, true) | (Role::Assistant, false) => "assistant",
                (Role::System, _) => "system",
            };
            messages.push(WireMessage {
                role: role.into(),
                content: m.text.clone(),
            });
        }
        let request = ChatRequest {
            model: self.endpoint.profile.model_name.clone(),
            messages,
            temperature: 1.0,
            max_tokens: 512,
            logprobs: None,
            top_logprobs: None,
            continuation_scores: None,
        };
        let response = self.endpoint.post_chat(&request).await?;
        Ok(response
            .choices
            .first()
            .map(|c| c.message.content.clone())
            .unwrap_or_default())
    }
}
