//! The hypothesis tests themselves. All tests are two-sided.

use crate::dist::{dist_f_sf, dist_q_sf, dist_t_sf};
use crate::types::{PairwiseComparison, TestResult};
use crate::Error;

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (n - 1 denominator).
fn sample_var(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Pearson product-moment correlation.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64, Error> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            a: x.len(),
            b: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::GroupTooSmall {
            need: 3,
            got: x.len(),
        });
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance("correlation input"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Welch's unequal-variances t-test with Welch-Satterthwaite degrees of
/// freedom and a two-sided p-value.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<TestResult, Error> {
    if a.len() < 2 {
        return Err(Error::GroupTooSmall {
            need: 2,
            got: a.len(),
        });
    }
    if b.len() < 2 {
        return Err(Error::GroupTooSmall {
            need: 2,
            got: b.len(),
        });
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sample_var(a), sample_var(b));
    if va == 0.0 && vb == 0.0 {
        return Err(Error::ZeroVariance("both groups"));
    }
    let sea = va / na;
    let seb = vb / nb;
    let t = (mean(a) - mean(b)) / (sea + seb).sqrt();
    let df = (sea + seb) * (sea + seb) / (sea * sea / (na - 1.0) + seb * seb / (nb - 1.0));
    let p = (2.0 * dist_t_sf(t.abs(), df)?).min(1.0);
    Ok(TestResult {
        statistic: t,
        df1: df,
        df2: None,
        p_value: p,
        significant_at: None,
        method: "welch_t".into(),
        degenerate: false,
    })
}

/// One-way fixed-effects analysis of variance.
///
/// When every sample in every group is identical the F ratio is 0/0; by
/// convention the result carries p = 1 with the `degenerate` flag set,
/// which is what collapsed-model data produces.
pub fn one_way_anova(groups: &[Vec<f64>]) -> Result<TestResult, Error> {
    if groups.len() < 2 {
        return Err(Error::TooFewGroups {
            need: 2,
            got: groups.len(),
        });
    }
    for g in groups {
        if g.len() < 2 {
            return Err(Error::GroupTooSmall {
                need: 2,
                got: g.len(),
            });
        }
    }
    let k = groups.len() as f64;
    let n_total: usize = groups.iter().map(|g| g.len()).sum();
    let n = n_total as f64;
    let grand = groups.iter().flatten().sum::<f64>() / n;

    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in groups {
        let m = mean(g);
        ss_between += g.len() as f64 * (m - grand) * (m - grand);
        ss_within += g.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
    }
    let df1 = k - 1.0;
    let df2 = n - k;

    if ss_within == 0.0 {
        if ss_between == 0.0 {
            return Ok(TestResult {
                statistic: 0.0,
                df1,
                df2: Some(df2),
                p_value: 1.0,
                significant_at: None,
                method: "one_way_anova".into(),
                degenerate: true,
            });
        }
        // Perfect separation with zero within-group noise.
        return Ok(TestResult {
            statistic: f64::INFINITY,
            df1,
            df2: Some(df2),
            p_value: 0.0,
            significant_at: None,
            method: "one_way_anova".into(),
            degenerate: false,
        });
    }

    let f = (ss_between / df1) / (ss_within / df2);
    let p = dist_f_sf(f, df1, df2)?;
    Ok(TestResult {
        statistic: f,
        df1,
        df2: Some(df2),
        p_value: p,
        significant_at: None,
        method: "one_way_anova".into(),
        degenerate: false,
    })
}

/// Tukey's honestly-significant-difference test over all group pairs.
///
/// The studentized range statistic uses the Tukey-Kramer standard error
/// `sqrt(MS_within / 2 * (1/n_i + 1/n_j))`, and p-values come from the
/// studentized range distribution with `N - k` error degrees of freedom.
pub fn tukey_hsd(groups: &[Vec<f64>], alpha: f64) -> Result<Vec<PairwiseComparison>, Error> {
    if groups.len() < 2 {
        return Err(Error::TooFewGroups {
            need: 2,
            got: groups.len(),
        });
    }
    for g in groups {
        if g.len() < 2 {
            return Err(Error::GroupTooSmall {
                need: 2,
                got: g.len(),
            });
        }
    }
    let k = groups.len();
    let n_total: usize = groups.iter().map(|g| g.len()).sum();
    let df = (n_total - k) as f64;
    let ms_within: f64 = groups
        .iter()
        .map(|g| sample_var(g) * (g.len() as f64 - 1.0))
        .sum::<f64>()
        / df;
    let means: Vec<f64> = groups.iter().map(|g| mean(g)).collect();

    let mut out = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let diff = means[i] - means[j];
            let (ni, nj) = (groups[i].len() as f64, groups[j].len() as f64);
            let se = (ms_within / 2.0 * (1.0 / ni + 1.0 / nj)).sqrt();
            let (q, p) = if se == 0.0 {
                if diff == 0.0 {
                    (0.0, 1.0)
                } else {
                    (f64::INFINITY, 0.0)
                }
            } else {
                let q = diff.abs() / se;
                (q, dist_q_sf(q, k, df)?)
            };
            out.push(PairwiseComparison {
                group_a: format!("group{i}"),
                group_b: format!("group{j}"),
                mean_difference: diff,
                statistic: q,
                p_value: p,
                significant: p < alpha,
            });
        }
    }
    Ok(out)
}

/// Bonferroni-adjusted significance threshold for `m` comparisons.
pub fn bonferroni(alpha: f64, m: usize) -> f64 {
    assert!(m >= 1, "bonferroni needs at least one comparison");
    alpha / m as f64
}

#[cfg(test)]
mod unit {
    use super::*;

    #[test]
    fn pearson_reference_values() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson_r(&x, &x).unwrap() - 1.0).abs() < 1e-14);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson_r(&x, &neg).unwrap() + 1.0).abs() < 1e-14);
        let y = [2.0, 1.0, 4.0, 3.0];
        assert!((pearson_r(&x, &y).unwrap() - 0.6).abs() < 1e-14);
    }

    #[test]
    fn pearson_rejects_bad_input() {
        assert!(matches!(
            pearson_r(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::GroupTooSmall { .. })
        ));
        assert!(matches!(
            pearson_r(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            pearson_r(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::ZeroVariance(_))
        ));
    }

    #[test]
    fn welch_identical_groups() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let r = welch_t(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn welch_reference_example() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [2.0, 3.0, 4.0, 5.0, 6.0];
        let r = welch_t(&a, &b).unwrap();
        assert!((r.statistic + 1.0).abs() < 1e-12);
        assert!((r.df1 - 8.0).abs() < 1e-12);
        assert!((r.p_value - 0.3466).abs() < 1e-4);
    }

    #[test]
    fn welch_is_antisymmetric() {
        let a = [1.0, 5.0, 2.0, 8.0];
        let b = [3.0, 3.0, 4.0, 1.0, 2.0];
        let ab = welch_t(&a, &b).unwrap();
        let ba = welch_t(&b, &a).unwrap();
        assert!((ab.statistic + ba.statistic).abs() < 1e-12);
        assert!((ab.p_value - ba.p_value).abs() < 1e-12);
    }

    #[test]
    fn welch_zero_numerator_means_t_zero() {
        // Equal means, different variances.
        let a = [2.0, 4.0];
        let b = [1.0, 3.0, 5.0];
        let r = welch_t(&a, &b).unwrap();
        assert_eq!(r.statistic, 0.0);
    }

    #[test]
    fn welch_rejects_twin_constant_groups() {
        assert!(matches!(
            welch_t(&[5.0, 5.0, 5.0], &[5.0, 5.0, 5.0]),
            Err(Error::ZeroVariance(_))
        ));
    }

    #[test]
    fn anova_reference_example() {
        let groups = vec![
            vec![1.0, 2.0, 3.0],
            vec![2.0, 3.0, 4.0],
            vec![3.0, 4.0, 5.0],
        ];
        let r = one_way_anova(&groups).unwrap();
        assert!((r.statistic - 3.0).abs() < 1e-12);
        assert_eq!((r.df1, r.df2.unwrap()), (2.0, 6.0));
        assert!((r.p_value - 0.125).abs() < 1e-3);
    }

    #[test]
    fn anova_degenerate_constant_groups() {
        let groups = vec![vec![2.0, 2.0], vec![2.0, 2.0, 2.0]];
        let r = one_way_anova(&groups).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn anova_two_groups_equals_squared_t() {
        // With two equal-variance groups, F = t^2 for the pooled t-test.
        let a = vec![1.0, 2.0, 4.0, 5.5];
        let b = vec![2.0, 4.0, 6.0, 7.5];
        let f = one_way_anova([a.clone(), b.clone()].as_ref())
            .unwrap()
            .statistic;
        // Pooled (equal-variance) t-statistic computed directly.
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let sp2 = ((na - 1.0) * sample_var(&a) + (nb - 1.0) * sample_var(&b)) / (na + nb - 2.0);
        let t = (mean(&a) - mean(&b)) / (sp2 * (1.0 / na + 1.0 / nb)).sqrt();
        assert!((f - t * t).abs() < 1e-9);
    }

    #[test]
    fn anova_shift_and_scale_invariance() {
        let groups = vec![vec![1.0, 2.0, 3.0], vec![4.0, 2.0, 6.0]];
        let shifted: Vec<Vec<f64>> = groups
            .iter()
            .map(|g| g.iter().map(|x| x + 100.0).collect())
            .collect();
        let scaled: Vec<Vec<f64>> = groups
            .iter()
            .map(|g| g.iter().map(|x| x * -7.5).collect())
            .collect();
        let r1 = one_way_anova(&groups).unwrap();
        let r2 = one_way_anova(&shifted).unwrap();
        let r3 = one_way_anova(&scaled).unwrap();
        assert!((r1.statistic - r2.statistic).abs() < 1e-9);
        assert!((r1.statistic - r3.statistic).abs() < 1e-9);
    }

    #[test]
    fn tukey_no_significant_pairs_on_identical_groups() {
        let g = vec![1.0, 2.0, 3.0, 4.0];
        let pairs = tukey_hsd([g.clone(), g.clone(), g.clone()].as_ref(), 0.05).unwrap();
        assert_eq!(pairs.len(), 3);
        assert!(pairs.iter().all(|p| !p.significant));
        assert!(pairs.iter().all(|p| p.statistic == 0.0 && p.p_value == 1.0));
    }

    #[test]
    fn tukey_flags_only_the_shifted_group() {
        // Means 0, 0, 100 with sd 1 and n = 10: exactly the two pairs that
        // involve the shifted group are significant.
        let base: Vec<f64> = (0..10).map(|i| (i as f64 - 4.5) / 3.0).collect();
        let shifted: Vec<f64> = base.iter().map(|x| x + 100.0).collect();
        let pairs = tukey_hsd([base.clone(), base.clone(), shifted].as_ref(), 0.05).unwrap();
        let flags: Vec<bool> = pairs.iter().map(|p| p.significant).collect();
        // Pairs come out as (0,1), (0,2), (1,2).
        assert_eq!(flags, vec![false, true, true]);
    }

    #[test]
    fn bonferroni_reference_values() {
        assert_eq!(bonferroni(0.05, 10), 0.005);
        assert!((bonferroni(0.05, 6) - 0.05 / 6.0).abs() < 1e-15);
        assert_eq!(bonferroni(0.05, 1), 0.05);
    }
}
