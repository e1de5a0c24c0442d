//! Perspective controllability: the margin by which induced target
//! dimensions outscore the rest.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::tensor::{ScoreTensor, Which};
use crate::Error;

/// Controllability of one model under one induction method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllabilityReport {
    /// perspective -> controllability averaged over permutations (and
    /// contexts, when the tensor has several).
    pub per_perspective: BTreeMap<String, f64>,
    /// Mean of the per-perspective values.
    pub global: f64,
    pub permutation_count: usize,
    /// Per-permutation controllability samples per perspective, in
    /// (context, permutation) iteration order; feeds the model-comparison
    /// t-tests.
    pub per_perspective_samples: BTreeMap<String, Vec<f64>>,
}

/// Computes controllability from normalized scores.
///
/// For each perspective `P` and permutation, the score is the mean over the
/// targeted dimensions minus the mean over all other dimensions; the
/// per-perspective value averages those samples, and the global value
/// averages the perspectives.
pub fn controllability(
    tensor: &ScoreTensor,
    target_map: &BTreeMap<String, BTreeSet<String>>,
) -> Result<ControllabilityReport, Error> {
    let dims: BTreeSet<String> = tensor.dimensions().iter().cloned().collect();
    let perspectives = tensor.perspectives();
    if perspectives.is_empty() {
        return Err(Error::NotEnough {
            what: "perspectives",
            need: 1,
            got: 0,
        });
    }

    for perspective in &perspectives {
        let targets = target_map
            .get(perspective)
            .ok_or_else(|| Error::MissingTargets(perspective.clone()))?;
        if targets.is_empty() {
            return Err(Error::BadTargetSet {
                perspective: perspective.clone(),
                problem: "empty",
            });
        }
        if !targets.is_subset(&dims) {
            return Err(Error::BadTargetSet {
                perspective: perspective.clone(),
                problem: "contains unknown dimensions",
            });
        }
        if targets.len() == dims.len() {
            return Err(Error::BadTargetSet {
                perspective: perspective.clone(),
                problem: "covers every dimension",
            });
        }
    }

    let dim_order = tensor.dimensions().to_vec();
    let mut per_perspective = BTreeMap::new();
    let mut per_perspective_samples = BTreeMap::new();
    let mut permutation_count = 0usize;

    for perspective in &perspectives {
        let targets = &target_map[perspective];
        let target_idx: Vec<usize> = dim_order
            .iter()
            .enumerate()
            .filter(|(_, d)| targets.contains(*d))
            .map(|(i, _)| i)
            .collect();
        let other_idx: Vec<usize> = dim_order
            .iter()
            .enumerate()
            .filter(|(_, d)| !targets.contains(*d))
            .map(|(i, _)| i)
            .collect();

        let mut samples = Vec::new();
        for context in tensor.contexts() {
            let perms = match tensor.permutations(&context, perspective) {
                Ok(p) => p,
                // A perspective may be absent under some context.
                Err(Error::MissingCell { .. }) => continue,
                Err(e) => return Err(e),
            };
            permutation_count = permutation_count.max(perms.len());
            for perm in perms {
                let row = tensor.row(&context, perspective, perm, Which::Normalized)?;
                let t_mean =
                    target_idx.iter().map(|&i| row[i]).sum::<f64>() / target_idx.len() as f64;
                let o_mean =
                    other_idx.iter().map(|&i| row[i]).sum::<f64>() / other_idx.len() as f64;
                samples.push(t_mean - o_mean);
            }
        }
        if samples.is_empty() {
            return Err(Error::NotEnough {
                what: "administrations for perspective",
                need: 1,
                got: 0,
            });
        }
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        per_perspective.insert(perspective.clone(), mean);
        per_perspective_samples.insert(perspective.clone(), samples);
    }

    let global = per_perspective.values().sum::<f64>() / per_perspective.len() as f64;
    Ok(ControllabilityReport {
        per_perspective,
        global,
        permutation_count,
        per_perspective_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tensor_with(
        perspectives: &[&str],
        perms: u32,
        score: impl Fn(&str, &str, u32) -> f64,
    ) -> ScoreTensor {
        let dims = vec![
            "d1".to_string(),
            "d2".to_string(),
            "d3".to_string(),
            "d4".to_string(),
        ];
        let mut t = ScoreTensor::new("q", "m", dims.clone());
        for p in perspectives {
            for perm in 0..perms {
                let scores: BTreeMap<String, (f64, f64)> = dims
                    .iter()
                    .map(|d| {
                        let s = score(p, d, perm);
                        (d.clone(), (s, s))
                    })
                    .collect();
                t.insert("none", p, perm, &scores).unwrap();
            }
        }
        t
    }

    fn targets(pairs: &[(&str, &[&str])]) -> BTreeMap<String, BTreeSet<String>> {
        pairs
            .iter()
            .map(|(p, ds)| (p.to_string(), ds.iter().map(|d| d.to_string()).collect()))
            .collect()
    }

    #[test]
    fn constant_tensor_has_zero_controllability() {
        let t = tensor_with(&["p1", "p2"], 5, |_, _, _| 0.7);
        let map = targets(&[("p1", &["d1"]), ("p2", &["d2", "d3"])]);
        let report = controllability(&t, &map).unwrap();
        assert!(report.global.abs() < 1e-12);
        assert!(report.per_perspective.values().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn perfect_separation_scores_one() {
        let map = targets(&[("p1", &["d1"]), ("p2", &["d2", "d3"])]);
        let t = tensor_with(&["p1", "p2"], 5, |p, d, _| {
            let on_target = match p {
                "p1" => d == "d1",
                _ => d == "d2" || d == "d3",
            };
            if on_target {
                1.0
            } else {
                0.0
            }
        });
        let report = controllability(&t, &map).unwrap();
        assert_eq!(report.global, 1.0);
    }

    #[test]
    fn missing_target_set_is_rejected() {
        let t = tensor_with(&["p1"], 2, |_, _, _| 0.5);
        let err = controllability(&t, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, Error::MissingTargets(p) if p == "p1"));
    }

    #[test]
    fn full_target_set_is_rejected() {
        let t = tensor_with(&["p1"], 2, |_, _, _| 0.5);
        let map = targets(&[("p1", &["d1", "d2", "d3", "d4"])]);
        let err = controllability(&t, &map).unwrap_err();
        assert!(matches!(err, Error::BadTargetSet { .. }));
    }

    #[test]
    fn antisymmetric_under_complement_target_swap() {
        let t = tensor_with(&["p1"], 8, |_, d, perm| {
            (d.len() as f64 * 0.11 + perm as f64 * 0.07).sin().abs()
        });
        let forward = targets(&[("p1", &["d1", "d3"])]);
        let complement = targets(&[("p1", &["d2", "d4"])]);
        let c1 = controllability(&t, &forward).unwrap().global;
        let c2 = controllability(&t, &complement).unwrap().global;
        assert!((c1 + c2).abs() < 1e-12, "{c1} vs {c2}");
    }

    #[test]
    fn global_is_mean_of_perspectives() {
        let map = targets(&[("p1", &["d1"]), ("p2", &["d2"])]);
        let t = tensor_with(&["p1", "p2"], 3, |p, d, _| match (p, d) {
            ("p1", "d1") => 0.9,
            ("p2", "d2") => 0.6,
            _ => 0.3,
        });
        let report = controllability(&t, &map).unwrap();
        let mean = report.per_perspective.values().sum::<f64>() / 2.0;
        assert!((report.global - mean).abs() < 1e-15);
        assert!((report.per_perspective["p1"] - 0.6).abs() < 1e-12);
        assert!((report.per_perspective["p2"] - 0.3).abs() < 1e-12);
    }
}
