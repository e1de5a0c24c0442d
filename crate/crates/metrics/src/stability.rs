//! Value-stability measures: mean-level change (Cohen's d), rank-order
//! stability, ipsative change, and permutation variance.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::pearson;
use crate::tensor::{ScoreTensor, Which};
use crate::Error;

/// Variance convention for [`permutation_variance`]. The metric describes
/// the realized permutation set, so population variance is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceConvention {
    Population,
    Sample,
}

/// Correlation backing the rank-order and ipsative measures. The source
/// tables report Pearson, so that is the default; Spearman is available
/// behind this flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    #[default]
    Pearson,
    Spearman,
}

/// Average ranks with ties sharing their midrank.
fn rank_transform(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("scores are not NaN"));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = midrank;
        }
        i = j + 1;
    }
    ranks
}

fn correlate(x: &[f64], y: &[f64], kind: CorrelationKind) -> Option<f64> {
    match kind {
        CorrelationKind::Pearson => pearson(x, y),
        CorrelationKind::Spearman => pearson(&rank_transform(x), &rank_transform(y)),
    }
}

/// Cohen's d with the pooled standard deviation (sample variances).
///
/// A zero pooled deviation with equal means gives 0 by the zero-numerator
/// rule; with unequal means the result is the signed infinity sentinel.
pub fn cohens_d(group_a: &[f64], group_b: &[f64]) -> Result<f64, Error> {
    if group_a.len() < 2 {
        return Err(Error::GroupTooSmall(group_a.len()));
    }
    if group_b.len() < 2 {
        return Err(Error::GroupTooSmall(group_b.len()));
    }
    let (na, nb) = (group_a.len() as f64, group_b.len() as f64);
    let ma = group_a.iter().sum::<f64>() / na;
    let mb = group_b.iter().sum::<f64>() / nb;
    let va = group_a.iter().map(|x| (x - ma) * (x - ma)).sum::<f64>() / (na - 1.0);
    let vb = group_b.iter().map(|x| (x - mb) * (x - mb)).sum::<f64>() / (nb - 1.0);
    let pooled = (((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0)).sqrt();
    if pooled == 0.0 {
        if ma == mb {
            return Ok(0.0);
        }
        return Ok(if ma > mb {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        });
    }
    Ok((ma - mb) / pooled)
}

/// One context pair in a mean-level table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanLevelPair {
    pub context_a: String,
    pub context_b: String,
    /// dimension -> Cohen's d for the (a, b) ordering.
    pub per_dimension: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanLevelReport {
    pub pairs: Vec<MeanLevelPair>,
    /// Mean of |d| over every (context pair, dimension) combination.
    pub mean_abs_d: f64,
    /// Number of d values that entered the aggregate.
    pub count: usize,
}

/// Mean-level change across contexts for one perspective.
pub fn mean_level_aggregate(
    tensor: &ScoreTensor,
    perspective: &str,
    which: Which,
) -> Result<MeanLevelReport, Error> {
    let contexts = tensor.contexts();
    let contexts: Vec<String> = contexts
        .into_iter()
        .filter(|c| tensor.permutations(c, perspective).is_ok())
        .collect();
    if contexts.len() < 2 {
        return Err(Error::NotEnough {
            what: "contexts",
            need: 2,
            got: contexts.len(),
        });
    }

    let mut pairs = Vec::new();
    let mut abs_sum = 0.0;
    let mut count = 0usize;
    for i in 0..contexts.len() {
        for j in (i + 1)..contexts.len() {
            let mut per_dimension = BTreeMap::new();
            for dim in tensor.dimensions() {
                let a: Vec<f64> = tensor
                    .column(&contexts[i], perspective, dim, which)?
                    .into_values()
                    .collect();
                let b: Vec<f64> = tensor
                    .column(&contexts[j], perspective, dim, which)?
                    .into_values()
                    .collect();
                let d = cohens_d(&a, &b)?;
                abs_sum += d.abs();
                count += 1;
                per_dimension.insert(dim.clone(), d);
            }
            pairs.push(MeanLevelPair {
                context_a: contexts[i].clone(),
                context_b: contexts[j].clone(),
                per_dimension,
            });
        }
    }
    Ok(MeanLevelReport {
        pairs,
        mean_abs_d: abs_sum / count as f64,
        count,
    })
}

/// Per-dimension correlations and their mean for one change direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionStats {
    pub per_dimension: BTreeMap<String, f64>,
    pub mean: f64,
    /// Pairs dropped because one vector had zero variance.
    pub excluded_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOrderReport {
    /// Stability of the context ordering under permutation change.
    pub context_order: DirectionStats,
    /// Stability of the permutation ordering under context change.
    pub permutation_order: DirectionStats,
    /// Per-dimension mean of the two directions.
    pub per_dimension_mean: BTreeMap<String, f64>,
    /// Mean of the two direction means.
    pub grand_mean: f64,
}

/// Rank-order stability for one perspective with the default Pearson
/// correlation.
pub fn rank_order_stability(
    tensor: &ScoreTensor,
    perspective: &str,
    which: Which,
) -> Result<RankOrderReport, Error> {
    rank_order_stability_with(tensor, perspective, which, CorrelationKind::Pearson)
}

/// Rank-order stability for one perspective.
///
/// Direction one fixes a dimension, forms the vector of context scores for
/// each permutation, and averages the correlation over all permutation
/// pairs. Direction two swaps the roles of contexts and permutations.
/// Zero-variance vectors make a pair undefined; such pairs are dropped
/// and counted.
pub fn rank_order_stability_with(
    tensor: &ScoreTensor,
    perspective: &str,
    which: Which,
    kind: CorrelationKind,
) -> Result<RankOrderReport, Error> {
    let contexts: Vec<String> = tensor
        .contexts()
        .into_iter()
        .filter(|c| tensor.permutations(c, perspective).is_ok())
        .collect();
    if contexts.len() < 2 {
        return Err(Error::NotEnough {
            what: "contexts",
            need: 2,
            got: contexts.len(),
        });
    }
    // Shared permutation set across contexts keeps the pairs aligned.
    let mut shared: Vec<u32> = tensor.permutations(&contexts[0], perspective)?;
    for c in &contexts[1..] {
        let perms = tensor.permutations(c, perspective)?;
        shared.retain(|p| perms.contains(p));
    }
    if shared.len() < 2 {
        return Err(Error::NotEnough {
            what: "shared permutations",
            need: 2,
            got: shared.len(),
        });
    }

    // scores[dim][context index][permutation index]
    let dims = tensor.dimensions().to_vec();
    let mut scores: BTreeMap<&str, Vec<Vec<f64>>> = BTreeMap::new();
    for dim in &dims {
        let mut per_context = Vec::new();
        for c in &contexts {
            let col = tensor.column(c, perspective, dim, which)?;
            per_context.push(shared.iter().map(|p| col[p]).collect::<Vec<f64>>());
        }
        scores.insert(dim.as_str(), per_context);
    }

    let mut dir1 = BTreeMap::new();
    let mut dir1_excluded = 0usize;
    for dim in &dims {
        let per_context = &scores[dim.as_str()];
        let mut rs = Vec::new();
        for a in 0..shared.len() {
            for b in (a + 1)..shared.len() {
                let va: Vec<f64> = per_context.iter().map(|ctx| ctx[a]).collect();
                let vb: Vec<f64> = per_context.iter().map(|ctx| ctx[b]).collect();
                match correlate(&va, &vb, kind) {
                    Some(r) => rs.push(r),
                    None => dir1_excluded += 1,
                }
            }
        }
        let mean = if rs.is_empty() {
            f64::NAN
        } else {
            rs.iter().sum::<f64>() / rs.len() as f64
        };
        dir1.insert(dim.clone(), mean);
    }

    let mut dir2 = BTreeMap::new();
    let mut dir2_excluded = 0usize;
    for dim in &dims {
        let per_context = &scores[dim.as_str()];
        let mut rs = Vec::new();
        for a in 0..contexts.len() {
            for b in (a + 1)..contexts.len() {
                match correlate(&per_context[a], &per_context[b], kind) {
                    Some(r) => rs.push(r),
                    None => dir2_excluded += 1,
                }
            }
        }
        let mean = if rs.is_empty() {
            f64::NAN
        } else {
            rs.iter().sum::<f64>() / rs.len() as f64
        };
        dir2.insert(dim.clone(), mean);
    }

    let mean_of = |m: &BTreeMap<String, f64>| {
        let vals: Vec<f64> = m.values().copied().filter(|v| !v.is_nan()).collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    };
    let dir1_mean = mean_of(&dir1);
    let dir2_mean = mean_of(&dir2);
    let per_dimension_mean: BTreeMap<String, f64> = dims
        .iter()
        .map(|d| (d.clone(), (dir1[d] + dir2[d]) / 2.0))
        .collect();

    Ok(RankOrderReport {
        context_order: DirectionStats {
            per_dimension: dir1,
            mean: dir1_mean,
            excluded_pairs: dir1_excluded,
        },
        permutation_order: DirectionStats {
            per_dimension: dir2,
            mean: dir2_mean,
            excluded_pairs: dir2_excluded,
        },
        per_dimension_mean,
        grand_mean: (dir1_mean + dir2_mean) / 2.0,
    })
}

/// Summary of per-permutation profile correlations between two contexts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpsativeSummary {
    pub context_a: String,
    pub context_b: String,
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation of the per-permutation correlations.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    /// Permutations that entered the summary.
    pub used: usize,
    /// Permutations dropped because a profile had zero variance.
    pub excluded: usize,
}

/// Ipsative change between two contexts with the default Pearson
/// correlation.
pub fn ipsative_change(
    tensor: &ScoreTensor,
    perspective: &str,
    context_a: &str,
    context_b: &str,
    which: Which,
) -> Result<IpsativeSummary, Error> {
    ipsative_change_with(
        tensor,
        perspective,
        context_a,
        context_b,
        which,
        CorrelationKind::Pearson,
    )
}

/// Ipsative (within-profile) change between two contexts.
///
/// For every permutation the per-dimension profiles of the two contexts are
/// correlated; the summary statistics run over permutations.
pub fn ipsative_change_with(
    tensor: &ScoreTensor,
    perspective: &str,
    context_a: &str,
    context_b: &str,
    which: Which,
    kind: CorrelationKind,
) -> Result<IpsativeSummary, Error> {
    if tensor.dimensions().len() < 3 {
        return Err(Error::NotEnough {
            what: "dimensions",
            need: 3,
            got: tensor.dimensions().len(),
        });
    }
    let perms_a = tensor.permutations(context_a, perspective)?;
    let perms_b = tensor.permutations(context_b, perspective)?;
    if perms_a != perms_b {
        return Err(Error::PermutationSetMismatch {
            a: context_a.to_string(),
            b: context_b.to_string(),
        });
    }
    if perms_a.is_empty() {
        return Err(Error::NotEnough {
            what: "permutations",
            need: 1,
            got: 0,
        });
    }

    let mut rs = Vec::new();
    let mut excluded = 0usize;
    for perm in &perms_a {
        let pa = tensor.row(context_a, perspective, *perm, which)?;
        let pb = tensor.row(context_b, perspective, *perm, which)?;
        match correlate(&pa, &pb, kind) {
            Some(r) => rs.push(r),
            None => excluded += 1,
        }
    }
    if rs.is_empty() {
        return Err(Error::NotEnough {
            what: "usable permutations",
            need: 1,
            got: 0,
        });
    }

    let n = rs.len() as f64;
    let mean = rs.iter().sum::<f64>() / n;
    let std = if rs.len() > 1 {
        (rs.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted = rs.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("correlations are not NaN"));
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]) / 2.0
    };

    Ok(IpsativeSummary {
        context_a: context_a.to_string(),
        context_b: context_b.to_string(),
        mean,
        median,
        std,
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        used: rs.len(),
        excluded,
    })
}

/// Mean variance of scores over permutations: the variance over the
/// permutation axis, averaged over (context, perspective) cells and then
/// over dimensions.
pub fn permutation_variance(
    tensor: &ScoreTensor,
    which: Which,
    convention: VarianceConvention,
) -> Result<f64, Error> {
    let mut dim_means = Vec::new();
    for dim in tensor.dimensions() {
        let mut cell_vars = Vec::new();
        for context in tensor.contexts() {
            for perspective in tensor.perspectives() {
                let col = match tensor.column(&context, &perspective, dim, which) {
                    Ok(c) => c,
                    Err(Error::MissingCell { .. }) => continue,
                    Err(e) => return Err(e),
                };
                let xs: Vec<f64> = col.into_values().collect();
                if xs.len() < 2 {
                    return Err(Error::NotEnough {
                        what: "permutations",
                        need: 2,
                        got: xs.len(),
                    });
                }
                let n = xs.len() as f64;
                let m = xs.iter().sum::<f64>() / n;
                let ss = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
                let var = match convention {
                    VarianceConvention::Population => ss / n,
                    VarianceConvention::Sample => ss / (n - 1.0),
                };
                cell_vars.push(var);
            }
        }
        if cell_vars.is_empty() {
            return Err(Error::NotEnough {
                what: "cells",
                need: 1,
                got: 0,
            });
        }
        dim_means.push(cell_vars.iter().sum::<f64>() / cell_vars.len() as f64);
    }
    if dim_means.is_empty() {
        return Err(Error::NotEnough {
            what: "dimensions",
            need: 1,
            got: 0,
        });
    }
    Ok(dim_means.iter().sum::<f64>() / dim_means.len() as f64)
}

/// Everything the stability tables need, computed on one shared tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub perspective: String,
    pub which: Which,
    pub mean_level: MeanLevelReport,
    pub rank_order: RankOrderReport,
    pub ipsative: Vec<IpsativeSummary>,
    pub permutation_variance: f64,
}

impl StabilityReport {
    /// Computes all stability measures for one perspective of a tensor.
    pub fn compute(tensor: &ScoreTensor, perspective: &str, which: Which) -> Result<Self, Error> {
        let mean_level = mean_level_aggregate(tensor, perspective, which)?;
        let rank_order = rank_order_stability(tensor, perspective, which)?;
        let contexts: Vec<String> = tensor
            .contexts()
            .into_iter()
            .filter(|c| tensor.permutations(c, perspective).is_ok())
            .collect();
        let mut ipsative = Vec::new();
        for i in 0..contexts.len() {
            for j in (i + 1)..contexts.len() {
                ipsative.push(ipsative_change(
                    tensor,
                    perspective,
                    &contexts[i],
                    &contexts[j],
                    which,
                )?);
            }
        }
        let permutation_variance =
            permutation_variance(tensor, which, VarianceConvention::Population)?;
        Ok(StabilityReport {
            perspective: perspective.to_string(),
            which,
            mean_level,
            rank_order,
            ipsative,
            permutation_variance,
        })
    }

    /// Mean of the per-pair ipsative means (the aggregated ipsative index).
    pub fn ipsative_aggregate(&self) -> f64 {
        self.ipsative.iter().map(|s| s.mean).sum::<f64>() / self.ipsative.len() as f64
    }
}
