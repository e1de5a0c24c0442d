//! Experiment configuration: a declarative document expanded into an
//! administration grid.

use persona_perspective::{Channel, Intensity, Person};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Error;

/// Selects the perspectives an experiment induces. `each_category` and
/// `each_dimension` expand into one perspective per category/dimension of
/// the questionnaire, which is how the controllability protocol builds its
/// set of alternative perspectives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerspectiveSelector {
    None,
    Category {
        category: String,
    },
    EachCategory,
    Dimensions {
        #[serde(default)]
        high: Vec<String>,
        #[serde(default)]
        low: Vec<String>,
    },
    EachDimension,
    FreeText {
        text: String,
        label: String,
    },
}

fn default_variants() -> Vec<String> {
    vec!["user-2nd".to_string()]
}

fn default_retry_budget() -> u32 {
    2
}

fn default_concurrency() -> usize {
    4
}

/// A declarative experiment: questionnaire, endpoint, perspectives,
/// contexts, permutation count and induction variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub id: String,
    pub questionnaire: String,
    /// Endpoint profile id, or `scripted:<policy>` for offline runs.
    pub endpoint: String,
    #[serde(default)]
    pub perspectives: Vec<PerspectiveSelector>,
    /// Context fixture references (`none`, `conversation/<t>`, `wiki/<g>`,
    /// `format/<f>`).
    pub contexts: Vec<String>,
    pub permutations: usize,
    pub seed: u64,
    /// Force permutation 0 to the original option order.
    #[serde(default)]
    pub identity_first: bool,
    /// Induction variants: subset of system/user x 2nd/3rd.
    #[serde(default = "default_variants")]
    pub variants: Vec<String>,
    /// Overrides the intensity of every value-targeted perspective.
    #[serde(default)]
    pub intensity: Option<String>,
    #[serde(default = "default_retry_budget")]
    pub retry_budget: u32,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Stable content digest used for tamper checks between a config and
    /// its ledger.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hex::encode(hasher.finalize())
    }

    pub fn parsed_intensity(&self) -> Result<Option<Intensity>, Error> {
        match self.intensity.as_deref() {
            None => Ok(None),
            Some("slight") => Ok(Some(Intensity::Slight)),
            Some("high") => Ok(Some(Intensity::High)),
            Some("extreme") => Ok(Some(Intensity::Extreme)),
            Some(other) => Err(Error::Config(format!(
                "unknown intensity '{other}' (expected slight, high or extreme)"
            ))),
        }
    }

    pub fn parsed_variants(&self) -> Result<Vec<(String, Channel, Person)>, Error> {
        let mut out = Vec::new();
        for v in &self.variants {
            let parsed = match v.as_str() {
                "system-2nd" => (Channel::SystemMsg, Person::Second),
                "system-3rd" => (Channel::SystemMsg, Person::Third),
                "user-2nd" => (Channel::UserMsg, Person::Second),
                "user-3rd" => (Channel::UserMsg, Person::Third),
                other => {
                    return Err(Error::Config(format!(
                        "unknown induction variant '{other}' (expected system-2nd, system-3rd, user-2nd or user-3rd)"
                    )))
                }
            };
            out.push((v.clone(), parsed.0, parsed.1));
        }
        if out.is_empty() {
            return Err(Error::Config(
                "at least one induction variant required".into(),
            ));
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.permutations == 0 {
            return Err(Error::Config("permutations must be at least 1".into()));
        }
        if self.contexts.is_empty() && self.perspectives.is_empty() {
            return Err(Error::Config(
                "at least one context or perspective required (use context \"none\")".into(),
            ));
        }
        self.parsed_variants()?;
        self.parsed_intensity()?;
        Ok(())
    }
}
