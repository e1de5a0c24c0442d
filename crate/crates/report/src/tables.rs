//! Delimited-table artifacts with exact-value JSON sidecars.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use persona_metrics::{ControllabilityReport, StabilityReport};
use persona_stats::{PairwiseComparison, TestResult};

use crate::baselines::HumanBaselines;
use crate::display;

/// A named tabular artifact: display TSV plus an exact sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableArtifact {
    pub name: String,
    pub tsv: String,
    pub sidecar: serde_json::Value,
}

/// Controllability comparison: rows are models, columns induction
/// variants, cells the global controllability. Missing cells (an endpoint
/// without the channel) render `n/a`; the per-table maximum is flagged
/// with `*`.
pub fn emit_controllability_table(
    questionnaire_id: &str,
    variant_order: &[String],
    rows: &[(String, BTreeMap<String, Option<ControllabilityReport>>)],
) -> TableArtifact {
    let mut best: Option<(f64, usize, usize)> = None;
    for (ri, (_, cells)) in rows.iter().enumerate() {
        for (ci, variant) in variant_order.iter().enumerate() {
            if let Some(Some(report)) = cells.get(variant) {
                if best.is_none_or(|(b, _, _)| report.global > b) {
                    best = Some((report.global, ri, ci));
                }
            }
        }
    }

    let mut tsv = String::from("model");
    for v in variant_order {
        tsv.push('\t');
        tsv.push_str(v);
    }
    tsv.push('\n');
    let mut sidecar_rows = Vec::new();
    for (ri, (model, cells)) in rows.iter().enumerate() {
        tsv.push_str(model);
        let mut exact: BTreeMap<String, serde_json::Value> = BTreeMap::new();
        for (ci, variant) in variant_order.iter().enumerate() {
            tsv.push('\t');
            match cells.get(variant) {
                Some(Some(report)) => {
                    tsv.push_str(&display(report.global));
                    if best == Some((report.global, ri, ci)) {
                        tsv.push('*');
                    }
                    exact.insert(
                        variant.clone(),
                        json!({
                            "global": report.global,
                            "per_perspective": report.per_perspective,
                            "permutation_count": report.permutation_count,
                        }),
                    );
                }
                _ => {
                    tsv.push_str("n/a");
                    exact.insert(variant.clone(), serde_json::Value::Null);
                }
            }
        }
        tsv.push('\n');
        sidecar_rows.push(json!({"model": model, "cells": exact}));
    }

    TableArtifact {
        name: format!("controllability_{questionnaire_id}"),
        tsv,
        sidecar: json!({
            "schema": "controllability/v1",
            "questionnaire": questionnaire_id,
            "variants": variant_order,
            "rows": sidecar_rows,
            "max_flag": best.map(|(v, ri, ci)| json!({
                "value": v, "model": rows[ri].0, "variant": variant_order[ci],
            })),
        }),
    }
}

/// The three stability tables for one report, with human baseline rows
/// and bigger-than-human flags.
pub fn emit_stability_tables(
    report: &StabilityReport,
    baselines: &HumanBaselines,
    dimensions: &[String],
) -> Vec<TableArtifact> {
    vec![
        mean_level_table(report, baselines, dimensions),
        rank_order_table(report, baselines, dimensions),
        ipsative_table(report, baselines),
    ]
}

fn mean_level_table(
    report: &StabilityReport,
    baselines: &HumanBaselines,
    dimensions: &[String],
) -> TableArtifact {
    let threshold = baselines.mean_level_flag_threshold();
    let mut tsv = String::from("pair");
    for d in dimensions {
        tsv.push('\t');
        tsv.push_str(d);
    }
    tsv.push('\n');
    for study in baselines.mean_level_studies() {
        tsv.push_str(&format!("human: {}", study.label));
        for d in dimensions {
            tsv.push('\t');
            match study.values.get(d) {
                Some(v) => tsv.push_str(&display(*v)),
                None => tsv.push('-'),
            }
        }
        tsv.push('\n');
    }
    for pair in &report.mean_level.pairs {
        tsv.push_str(&format!("{} - {}", pair.context_a, pair.context_b));
        for d in dimensions {
            tsv.push('\t');
            let v = pair.per_dimension[d];
            tsv.push_str(&display(v));
            if v.abs() > threshold {
                tsv.push('*');
            }
        }
        tsv.push('\n');
    }
    tsv.push_str(&format!(
        "# mean |d| over {} values: {}\n",
        report.mean_level.count,
        display(report.mean_level.mean_abs_d)
    ));

    TableArtifact {
        name: "stability_mean_level".into(),
        tsv,
        sidecar: json!({
            "schema": "stability_mean_level/v1",
            "flag_threshold_abs": threshold,
            "pairs": report.mean_level.pairs,
            "mean_abs_d": report.mean_level.mean_abs_d,
            "count": report.mean_level.count,
        }),
    }
}

fn rank_order_table(
    report: &StabilityReport,
    baselines: &HumanBaselines,
    dimensions: &[String],
) -> TableArtifact {
    let mut tsv = String::from("row");
    for d in dimensions {
        tsv.push('\t');
        tsv.push_str(d);
    }
    tsv.push_str("\tmean\n");
    for study in baselines.rank_order_studies() {
        tsv.push_str(&format!("human: {}", study.label));
        for d in dimensions {
            tsv.push('\t');
            match study.values.get(d) {
                Some(v) => tsv.push_str(&display(*v)),
                None => tsv.push('-'),
            }
        }
        tsv.push('\t');
        tsv.push_str(&study.mean.map_or("-".to_string(), display));
        tsv.push('\n');
    }
    let mut push_direction = |label: &str, per_dim: &BTreeMap<String, f64>, mean: f64| {
        tsv.push_str(label);
        for d in dimensions {
            tsv.push('\t');
            tsv.push_str(&display(per_dim[d]));
        }
        tsv.push('\t');
        tsv.push_str(&display(mean));
        tsv.push('\n');
    };
    push_direction(
        "context order change due to permutation change",
        &report.rank_order.context_order.per_dimension,
        report.rank_order.context_order.mean,
    );
    push_direction(
        "permutation order change due to context change",
        &report.rank_order.permutation_order.per_dimension,
        report.rank_order.permutation_order.mean,
    );
    push_direction(
        "mean",
        &report.rank_order.per_dimension_mean,
        report.rank_order.grand_mean,
    );

    TableArtifact {
        name: "stability_rank_order".into(),
        tsv,
        sidecar: json!({
            "schema": "stability_rank_order/v1",
            "flag_threshold": baselines.rank_order_flag_threshold(),
            "report": report.rank_order,
        }),
    }
}

fn ipsative_table(report: &StabilityReport, baselines: &HumanBaselines) -> TableArtifact {
    let threshold = baselines.ipsative_flag_threshold();
    let mut tsv = String::from("context change\tmean\tmedian\tstd\tmin\tmax\n");
    for study in baselines.ipsative_studies() {
        tsv.push_str(&format!(
            "human: {}\t{}\t{}\t{}\t{}\t{}\n",
            study.label,
            display(study.mean),
            study.median.map_or("-".to_string(), display),
            display(study.std),
            display(study.min),
            display(study.max),
        ));
    }
    for s in &report.ipsative {
        let flag = if s.mean < threshold { "*" } else { "" };
        tsv.push_str(&format!(
            "{} - {}\t{}{}\t{}\t{}\t{}\t{}\n",
            s.context_a,
            s.context_b,
            display(s.mean),
            flag,
            display(s.median),
            display(s.std),
            display(s.min),
            display(s.max),
        ));
    }

    TableArtifact {
        name: "stability_ipsative".into(),
        tsv,
        sidecar: json!({
            "schema": "stability_ipsative/v1",
            "flag_threshold": threshold,
            "pairs": report.ipsative,
        }),
    }
}

/// Aggregated three-way stability comparison, one row per model.
pub fn emit_aggregate_stability(rows: &[(String, StabilityReport)]) -> TableArtifact {
    let mut tsv =
        String::from("model\tmean_level_abs_d\trank_order_r\tipsative_r\tpermutation_variance\n");
    let mut sidecar_rows = Vec::new();
    for (model, report) in rows {
        let ipsative = report.ipsative_aggregate();
        tsv.push_str(&format!(
            "{model}\t{}\t{}\t{}\t{}\n",
            display(report.mean_level.mean_abs_d),
            display(report.rank_order.grand_mean),
            display(ipsative),
            display(report.permutation_variance),
        ));
        sidecar_rows.push(json!({
            "model": model,
            "mean_level_abs_d": report.mean_level.mean_abs_d,
            "rank_order_r": report.rank_order.grand_mean,
            "ipsative_r": ipsative,
            "permutation_variance": report.permutation_variance,
        }));
    }
    TableArtifact {
        name: "stability_aggregate".into(),
        tsv,
        sidecar: json!({"schema": "stability_aggregate/v1", "rows": sidecar_rows}),
    }
}

/// Per-dimension ANOVA results with the Bonferroni-corrected threshold
/// and the post-hoc pairs that stayed significant.
pub fn emit_significance_summary(
    anova: &BTreeMap<String, TestResult>,
    tukey: &BTreeMap<String, Vec<PairwiseComparison>>,
    alpha: f64,
    comparisons: usize,
) -> TableArtifact {
    let corrected = persona_stats::bonferroni(alpha, comparisons);
    let mut tsv = format!(
        "# alpha {} with Bonferroni correction over {} comparisons: corrected alpha {}\n",
        alpha, comparisons, corrected
    );
    tsv.push_str("dimension\tF\tp\tsignificant\ttukey_significant_pairs\n");
    let mut sidecar_rows = Vec::new();
    for (dim, result) in anova {
        let significant = result.p_value < corrected;
        let pairs = tukey.get(dim).map(|v| v.as_slice()).unwrap_or(&[]);
        let sig_pairs: Vec<String> = pairs
            .iter()
            .filter(|p| p.significant)
            .map(|p| format!("{}-{}", p.group_a, p.group_b))
            .collect();
        tsv.push_str(&format!(
            "{dim}\t{}\t{}\t{}\t{}\n",
            display(result.statistic),
            display(result.p_value),
            // The published figures gray out non-significant dimensions.
            if significant { "yes" } else { "no (gray)" },
            if sig_pairs.is_empty() {
                "-".to_string()
            } else {
                sig_pairs.join(",")
            },
        ));
        sidecar_rows.push(json!({
            "dimension": dim,
            "anova": result,
            "significant_at_corrected": significant,
            "tukey": pairs,
        }));
    }
    TableArtifact {
        name: "significance".into(),
        tsv,
        sidecar: json!({
            "schema": "significance/v1",
            "alpha": alpha,
            "comparisons": comparisons,
            "corrected_alpha": corrected,
            "rows": sidecar_rows,
        }),
    }
}
