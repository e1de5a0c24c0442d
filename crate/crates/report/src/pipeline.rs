//! The full analysis pipeline from a completed ledger to a report bundle:
//! tensors per induction variant, controllability (when perspectives were
//! induced), stability tables (when contexts vary), per-dimension
//! ANOVA/Tukey significance grids and charts.

use std::collections::BTreeMap;

use persona_metrics::{controllability, ScoreTensor, StabilityReport, Which};
use persona_runner::{assemble_tensor, ExclusionPolicy, ExperimentConfig, ResolvedPlan, RunLedger};
use persona_stats::{bonferroni, one_way_anova, tukey_hsd, PairwiseComparison, TestResult};
use serde_json::json;

use crate::charts::{ChartSpec, GroupBy};
use crate::tables::{
    emit_aggregate_stability, emit_controllability_table, emit_significance_summary,
    emit_stability_tables, TableArtifact,
};
use crate::{emit_charts, Error, HumanBaselines, Provenance, ReportBundle};

/// Significance level before Bonferroni correction.
const ALPHA: f64 = 0.05;

/// Per-dimension ANOVA results plus the post-hoc pairs.
pub type SignificanceGrid = (
    BTreeMap<String, TestResult>,
    BTreeMap<String, Vec<PairwiseComparison>>,
);

pub struct ReportOptions {
    pub tables: bool,
    pub charts: bool,
    pub baselines: HumanBaselines,
    /// Judge the Tukey HSD pairs at the Bonferroni-corrected threshold as
    /// well; disable to flag post-hoc pairs at the uncorrected alpha.
    pub double_correction: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            tables: true,
            charts: true,
            baselines: HumanBaselines::shipped(),
            double_correction: true,
        }
    }
}

/// Builds every artifact the ledger supports.
pub fn build_report(
    config: &ExperimentConfig,
    plan: &ResolvedPlan,
    ledger: &RunLedger,
    options: &ReportOptions,
) -> Result<ReportBundle, Error> {
    let mut set = assemble_tensor(
        plan,
        ledger,
        &config.endpoint,
        ExclusionPolicy::ExcludeIncomplete,
    )?;

    let mut tables: Vec<TableArtifact> = Vec::new();
    let mut charts = Vec::new();

    // Raw tensors ship alongside the analysis tables.
    for (variant, tensor) in &set.tensors {
        tables.push(TableArtifact {
            name: format!("tensor_{variant}"),
            tsv: tensor.to_tsv(),
            sidecar: json!({
                "schema": "score_tensor/v1",
                "questionnaire": tensor.questionnaire_id(),
                "model": tensor.model_id(),
                "variant": variant,
            }),
        });
    }

    let target_map = plan.target_map();
    if options.tables && !target_map.is_empty() {
        let variant_order: Vec<String> = set.tensors.keys().cloned().collect();
        let mut cells = BTreeMap::new();
        for (variant, tensor) in &set.tensors {
            let report = controllability(tensor, &target_map)?;
            cells.insert(variant.clone(), Some(report));
        }
        tables.push(emit_controllability_table(
            &config.questionnaire,
            &variant_order,
            &[(config.endpoint.clone(), cells)],
        ));
    }

    for (variant, tensor) in &set.tensors {
        let suffix = if set.tensors.len() > 1 {
            format!("_{variant}")
        } else {
            String::new()
        };
        if tensor.contexts().len() >= 2 {
            for perspective in tensor.perspectives() {
                if options.tables {
                    // A collapsed model (identical answers everywhere)
                    // makes the correlation-based measures undefined;
                    // skip them and say so rather than fail the report.
                    match StabilityReport::compute(tensor, &perspective, Which::Raw) {
                        Ok(stability) => {
                            let mut emitted = emit_stability_tables(
                                &stability,
                                &options.baselines,
                                tensor.dimensions(),
                            );
                            for t in &mut emitted {
                                t.name.push_str(&suffix);
                            }
                            tables.extend(emitted);
                            let mut aggregate = emit_aggregate_stability(&[(
                                config.endpoint.clone(),
                                stability,
                            )]);
                            aggregate.name.push_str(&suffix);
                            tables.push(aggregate);
                        }
                        Err(e) => set.annex.notes.push(format!(
                            "stability skipped for variant '{variant}', perspective '{perspective}': {e}"
                        )),
                    }
                    match significance_by_dimension_with(
                        tensor,
                        &perspective,
                        options.double_correction,
                    ) {
                        Ok((anova, tukey)) => {
                            let mut sig = emit_significance_summary(
                                &anova,
                                &tukey,
                                ALPHA,
                                tensor.dimensions().len(),
                            );
                            sig.name.push_str(&suffix);
                            tables.push(sig);
                        }
                        Err(e) => set.annex.notes.push(format!(
                            "significance skipped for variant '{variant}', perspective '{perspective}': {e}"
                        )),
                    }
                }
            }
        }
        if options.charts {
            let group_by = if tensor.contexts().len() > 1 {
                GroupBy::Context
            } else {
                GroupBy::Perspective
            };
            let spec = ChartSpec::grouped_bars(Which::Raw, group_by);
            charts.push(emit_charts(
                tensor,
                &spec,
                &format!("scores_{variant}"),
                &format!(
                    "{} on {} ({variant})",
                    config.endpoint, config.questionnaire
                ),
            )?);
        }
    }

    Ok(ReportBundle {
        tables,
        charts,
        annex: set.annex,
        provenance: Provenance::new(&config.id, &config.digest()),
    })
}

/// Per-dimension one-way ANOVA over contexts (permutations as replicates)
/// plus Tukey HSD at the Bonferroni-corrected threshold.
pub fn significance_by_dimension(
    tensor: &ScoreTensor,
    perspective: &str,
) -> Result<SignificanceGrid, Error> {
    significance_by_dimension_with(tensor, perspective, true)
}

/// As [`significance_by_dimension`]; `double_correction` selects whether
/// the Tukey pairs are judged at the corrected or the raw alpha.
pub fn significance_by_dimension_with(
    tensor: &ScoreTensor,
    perspective: &str,
    double_correction: bool,
) -> Result<SignificanceGrid, Error> {
    let contexts: Vec<String> = tensor
        .contexts()
        .into_iter()
        .filter(|c| tensor.permutations(c, perspective).is_ok())
        .collect();
    let corrected = bonferroni(ALPHA, tensor.dimensions().len());
    let tukey_alpha = if double_correction { corrected } else { ALPHA };
    let mut anova = BTreeMap::new();
    let mut tukey = BTreeMap::new();
    for dim in tensor.dimensions() {
        let mut groups = Vec::new();
        for ctx in &contexts {
            let xs: Vec<f64> = tensor
                .column(ctx, perspective, dim, Which::Raw)?
                .into_values()
                .collect();
            groups.push(xs);
        }
        let mut result = one_way_anova(&groups)?;
        result.significant_at = Some(corrected);
        let pairs = tukey_hsd(&groups, tukey_alpha)?;
        // Group labels become context labels.
        let pairs = pairs
            .into_iter()
            .map(|mut p| {
                let idx = |label: &str| {
                    label
                        .strip_prefix("group")
                        .and_then(|i| i.parse::<usize>().ok())
                        .unwrap_or(0)
                };
                p.group_a = contexts[idx(&p.group_a)].clone();
                p.group_b = contexts[idx(&p.group_b)].clone();
                p
            })
            .collect();
        anova.insert(dim.clone(), result);
        tukey.insert(dim.clone(), pairs);
    }
    Ok((anova, tukey))
}
