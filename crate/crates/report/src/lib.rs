//! Report emission: controllability tables, stability tables with human
//! baseline rows, significance-annotated test summaries and bar charts.
//! Artifacts are deterministic byte-for-byte given identical inputs; the
//! delimited tables round for display while their JSON sidecars carry the
//! exact values.

mod baselines;
mod charts;
mod pipeline;
mod tables;

pub use baselines::{HumanBaselines, IpsativeBaseline, StudyRow};
pub use charts::{emit_charts, ChartModel, ChartSeries, ChartSpec, GroupBy};
pub use pipeline::{
    build_report, significance_by_dimension, significance_by_dimension_with, ReportOptions,
};
pub use tables::{
    emit_aggregate_stability, emit_controllability_table, emit_significance_summary,
    emit_stability_tables, TableArtifact,
};

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use persona_runner::DataQualityAnnex;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("unknown chart spec '{0}'")]
    UnknownChartSpec(String),

    #[error("empty tensor")]
    EmptyTensor,

    #[error("baselines file does not parse: {0}")]
    BadBaselines(String),

    #[error(transparent)]
    Metrics(#[from] persona_metrics::Error),

    #[error(transparent)]
    Stats(#[from] persona_stats::Error),

    #[error(transparent)]
    Runner(#[from] persona_runner::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Where a report's numbers came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub experiment_id: String,
    pub config_digest: String,
    /// sha256 of each shipped questionnaire definition.
    pub fixture_digests: std::collections::BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(experiment_id: &str, config_digest: &str) -> Self {
        let mut fixture_digests = std::collections::BTreeMap::new();
        for (name, text) in [
            ("pvq.def", persona_questionnaire::PVQ_DEF),
            ("vsm.def", persona_questionnaire::VSM_DEF),
            ("ipip.def", persona_questionnaire::IPIP_DEF),
        ] {
            let mut h = Sha256::new();
            h.update(text.as_bytes());
            fixture_digests.insert(name.to_string(), hex::encode(h.finalize()));
        }
        Provenance {
            experiment_id: experiment_id.to_string(),
            config_digest: config_digest.to_string(),
            fixture_digests,
        }
    }
}

/// A chart artifact: deterministic SVG bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartArtifact {
    pub name: String,
    pub svg: String,
}

/// Everything one report run emits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportBundle {
    pub tables: Vec<TableArtifact>,
    pub charts: Vec<ChartArtifact>,
    pub annex: DataQualityAnnex,
    pub provenance: Provenance,
}

impl ReportBundle {
    /// Writes tables (`.tsv` plus `.sidecar.json`), charts (`.svg`), the
    /// annex and provenance under `dir`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<(), Error> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        for t in &self.tables {
            std::fs::write(dir.join(format!("{}.tsv", t.name)), &t.tsv)?;
            std::fs::write(
                dir.join(format!("{}.sidecar.json", t.name)),
                serde_json::to_string_pretty(&t.sidecar).expect("sidecar serializes"),
            )?;
        }
        if !self.charts.is_empty() {
            std::fs::create_dir_all(dir.join("charts"))?;
            for c in &self.charts {
                std::fs::write(dir.join("charts").join(format!("{}.svg", c.name)), &c.svg)?;
            }
        }
        std::fs::write(
            dir.join("annex.json"),
            serde_json::to_string_pretty(&self.annex).expect("annex serializes"),
        )?;
        std::fs::write(
            dir.join("provenance.json"),
            serde_json::to_string_pretty(&self.provenance).expect("provenance serializes"),
        )?;
        Ok(())
    }
}

/// Fixed-precision display rendering used in the delimited tables.
pub(crate) fn display(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    format!("{x:.3}")
}
