//! Published human value-stability coefficients, shipped as reference
//! constants for side-by-side report rows.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::Error;

/// One human study's per-dimension values; absent cells were never
/// published.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub id: String,
    pub label: String,
    #[serde(default)]
    pub values: BTreeMap<String, f64>,
    #[serde(default)]
    pub mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpsativeBaseline {
    pub id: String,
    pub label: String,
    pub mean: f64,
    pub median: Option<f64>,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Section<T> {
    #[serde(alias = "flag_threshold_abs")]
    flag_threshold: f64,
    studies: Vec<T>,
}

/// The full baselines file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanBaselines {
    #[serde(default)]
    description: String,
    mean_level_d: Section<StudyRow>,
    rank_order_r: Section<StudyRow>,
    ipsative_r: Section<IpsativeBaseline>,
}

impl HumanBaselines {
    /// Loads the constants shipped with the crate.
    pub fn shipped() -> Self {
        serde_json::from_str(include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../fixtures/human_baselines.json"
        )))
        .expect("shipped baselines parse")
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::BadBaselines(e.to_string()))
    }

    pub fn mean_level_studies(&self) -> &[StudyRow] {
        &self.mean_level_d.studies
    }

    pub fn rank_order_studies(&self) -> &[StudyRow] {
        &self.rank_order_r.studies
    }

    pub fn ipsative_studies(&self) -> &[IpsativeBaseline] {
        &self.ipsative_r.studies
    }

    /// Largest published human mean-level change (|d|).
    pub fn mean_level_flag_threshold(&self) -> f64 {
        self.mean_level_d.flag_threshold
    }

    /// Smallest published human rank-order mean r.
    pub fn rank_order_flag_threshold(&self) -> f64 {
        self.rank_order_r.flag_threshold
    }

    /// An ipsative r below this is a bigger-than-human change.
    pub fn ipsative_flag_threshold(&self) -> f64 {
        self.ipsative_r.flag_threshold
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_baselines_carry_the_published_thresholds() {
        let b = HumanBaselines::shipped();
        assert_eq!(b.ipsative_flag_threshold(), 0.59);
        assert_eq!(b.mean_level_flag_threshold(), 0.53);
        assert_eq!(b.mean_level_studies().len(), 4);
        assert_eq!(b.rank_order_studies().len(), 3);
        assert_eq!(b.ipsative_studies().len(), 6);
        // Spot-check published cells.
        let eight_years = b
            .mean_level_studies()
            .iter()
            .find(|s| s.id == "dev_8y_adults")
            .unwrap();
        assert_eq!(eight_years.values["conformity"], 0.53);
        let reading = b
            .mean_level_studies()
            .iter()
            .find(|s| s.id == "priming_reading")
            .unwrap();
        assert_eq!(reading.values.len(), 1);
        let soldiers = b
            .ipsative_studies()
            .iter()
            .find(|s| s.id == "war_soldiers")
            .unwrap();
        assert_eq!(soldiers.median, None);
    }
}
