//! Resolution of `scripted:<policy>` endpoint references.

use std::sync::Arc;

use persona_model_client::{Respondent, ScriptedRespondent};
use persona_questionnaire::builtin;

use crate::Error;

/// Resolves the scripted respondent named by an endpoint reference:
/// `scripted:first`, `scripted:option:<original-index>`,
/// `scripted:target` (needs the questionnaire id) and
/// `scripted:random:<seed>`.
pub fn resolve_scripted(
    endpoint_ref: &str,
    questionnaire_id: &str,
) -> Result<Option<Arc<dyn Respondent>>, Error> {
    let Some(policy) = endpoint_ref.strip_prefix("scripted:") else {
        return Ok(None);
    };
    let respondent: Arc<dyn Respondent> = match policy {
        "first" => Arc::new(ScriptedRespondent::always_first()),
        "target" => Arc::new(ScriptedRespondent::target_conditional(builtin(
            questionnaire_id,
        )?)),
        other => {
            if let Some(idx) = other.strip_prefix("option:") {
                let idx: usize = idx
                    .parse()
                    .map_err(|_| Error::Config(format!("bad option index in '{endpoint_ref}'")))?;
                Arc::new(ScriptedRespondent::fixed_original_option(idx))
            } else if let Some(seed) = other.strip_prefix("random:") {
                let seed: u64 = seed
                    .parse()
                    .map_err(|_| Error::Config(format!("bad seed in '{endpoint_ref}'")))?;
                Arc::new(ScriptedRespondent::seeded_random(seed))
            } else {
                return Err(Error::Config(format!(
                    "unknown scripted policy '{other}' (expected first, target, option:<i> or random:<seed>)"
                )));
            }
        }
    };
    Ok(Some(respondent))
}
