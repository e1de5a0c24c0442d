//! Questionnaire definitions, loading and scoring.
//!
//! Three instruments ship with the crate: the Portrait Values Questionnaire
//! (PVQ, 10 personal values in 4 higher-order categories), the Values Survey
//! Module (VSM 2013, 6 cultural dimensions scored by a linear formula) and
//! the IPIP NEO domain scales (Big Five, with reverse-keyed items).
//!
//! Scoring is pure: a complete [`AnswerSheet`] maps to a [`ScoreProfile`]
//! with raw per-dimension scores and scores normalized to `[0, 1]`.

mod error;
mod loader;
mod scoring;
mod types;

pub use error::Error;
pub use loader::load_questionnaire;
pub use scoring::{score, score_mean_per_dimension, score_vsm};
pub use types::{
    AnswerSheet, Category, Dimension, Item, Keying, LikertScale, Questionnaire, ScoreProfile,
    ScoringRule, VsmConstants, VsmSlot,
};

/// Shipped PVQ definition file.
pub const PVQ_DEF: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../fixtures/questionnaires/pvq.def"
));
/// Shipped VSM 2013 definition file.
pub const VSM_DEF: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../fixtures/questionnaires/vsm.def"
));
/// Shipped IPIP NEO-domains definition file.
pub const IPIP_DEF: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../fixtures/questionnaires/ipip.def"
));

/// Ids of the instruments shipped with the crate.
pub const BUILTIN_IDS: [&str; 3] = ["pvq", "vsm", "ipip"];

/// Loads one of the shipped instruments by id.
pub fn builtin(id: &str) -> Result<Questionnaire, Error> {
    let source = match id {
        "pvq" => PVQ_DEF,
        "vsm" => VSM_DEF,
        "ipip" => IPIP_DEF,
        _ => {
            return Err(Error::UnknownQuestionnaire {
                id: id.to_string(),
                available: BUILTIN_IDS.iter().map(|s| s.to_string()).collect(),
            })
        }
    };
    load_questionnaire(source)
}

/// Loads all shipped instruments.
pub fn builtins() -> Vec<Questionnaire> {
    BUILTIN_IDS
        .iter()
        .map(|id| builtin(id).expect("shipped definition must load"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_load() {
        let all = builtins();
        assert_eq!(all.len(), 3);
        assert_eq!(all[0].id, "pvq");
        assert_eq!(all[1].id, "vsm");
        assert_eq!(all[2].id, "ipip");
    }

    #[test]
    fn unknown_builtin_is_rejected() {
        let err = builtin("nope").unwrap_err();
        assert!(err.to_string().contains("nope"));
    }
}
