//! Grouped bar charts over a tensor: one group of bars per dimension,
//! one bar per context (or perspective), whiskers showing the standard
//! deviation over permutations. Rendering is plain SVG with fixed
//! formatting so identical inputs give identical bytes.

use serde::{Deserialize, Serialize};

use persona_metrics::{ScoreTensor, Which};

use crate::{ChartArtifact, Error};

/// Which axis forms the bar groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    Context,
    Perspective,
}

/// Chart request; only `grouped_bars` is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub kind: String,
    pub which: Which,
    pub group_by: GroupBy,
}

impl ChartSpec {
    pub fn grouped_bars(which: Which, group_by: GroupBy) -> Self {
        ChartSpec {
            kind: "grouped_bars".into(),
            which,
            group_by,
        }
    }
}

/// One bar series (one context or perspective).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSeries {
    pub label: String,
    /// Mean score per dimension, tensor dimension order.
    pub means: Vec<f64>,
    /// Standard deviation over permutations per dimension (population).
    pub whiskers: Vec<f64>,
}

/// The numeric content of a chart, exposed so tests can cross-check the
/// whiskers against the dispersion metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartModel {
    pub dimensions: Vec<String>,
    pub series: Vec<ChartSeries>,
    pub which: Which,
}

impl ChartModel {
    pub fn from_tensor(tensor: &ScoreTensor, spec: &ChartSpec) -> Result<ChartModel, Error> {
        if spec.kind != "grouped_bars" {
            return Err(Error::UnknownChartSpec(spec.kind.clone()));
        }
        if tensor.is_empty() {
            return Err(Error::EmptyTensor);
        }
        let (outer, inner) = match spec.group_by {
            GroupBy::Context => (tensor.contexts(), tensor.perspectives()),
            GroupBy::Perspective => (tensor.perspectives(), tensor.contexts()),
        };
        let mut series = Vec::new();
        for group in &outer {
            let mut means = Vec::new();
            let mut whiskers = Vec::new();
            for dim in tensor.dimensions() {
                // Pool the scores over the other axis and permutations.
                let mut xs = Vec::new();
                for other in &inner {
                    let (ctx, persp) = match spec.group_by {
                        GroupBy::Context => (group, other),
                        GroupBy::Perspective => (other, group),
                    };
                    match tensor.column(ctx, persp, dim, spec.which) {
                        Ok(col) => xs.extend(col.into_values()),
                        Err(persona_metrics::Error::MissingCell { .. }) => continue,
                        Err(e) => return Err(e.into()),
                    }
                }
                if xs.is_empty() {
                    means.push(f64::NAN);
                    whiskers.push(0.0);
                    continue;
                }
                let n = xs.len() as f64;
                let mean = xs.iter().sum::<f64>() / n;
                let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
                means.push(mean);
                whiskers.push(var.sqrt());
            }
            series.push(ChartSeries {
                label: group.clone(),
                means,
                whiskers,
            });
        }
        Ok(ChartModel {
            dimensions: tensor.dimensions().to_vec(),
            series,
            which: spec.which,
        })
    }

    /// Renders the model as a standalone SVG document.
    pub fn to_svg(&self, title: &str) -> String {
        const PALETTE: [&str; 8] = [
            "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#9c755f",
        ];
        let n_dims = self.dimensions.len();
        let n_series = self.series.len().max(1);
        let bar_w = 14.0;
        let group_w = bar_w * n_series as f64 + 18.0;
        let margin_left = 52.0;
        let margin_top = 34.0;
        let plot_h = 220.0;
        let legend_h = 18.0 * self.series.len() as f64 + 10.0;
        let width = margin_left + group_w * n_dims as f64 + 20.0;
        let height = margin_top + plot_h + 70.0 + legend_h;

        let max_val = self
            .series
            .iter()
            .flat_map(|s| s.means.iter().zip(&s.whiskers).map(|(m, w)| m + w))
            .fold(f64::NEG_INFINITY, f64::max)
            .max(1e-9);
        let scale = plot_h / (max_val * 1.05);
        let y_of = |v: f64| margin_top + plot_h - v * scale;

        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\">\n",
            fmt(width),
            fmt(height)
        );
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"20\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            fmt(width / 2.0),
            xml_escape(title)
        ));
        // Axis.
        svg.push_str(&format!(
            "<line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"#333\"/>\n<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"#333\"/>\n",
            l = fmt(margin_left),
            t = fmt(margin_top),
            b = fmt(margin_top + plot_h),
            r = fmt(width - 10.0),
        ));
        // Y ticks at quarters.
        for i in 0..=4 {
            let v = max_val * 1.05 * i as f64 / 4.0;
            let y = y_of(v);
            svg.push_str(&format!(
                "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#333\"/><text x=\"{}\" y=\"{}\" font-size=\"9\" text-anchor=\"end\">{}</text>\n",
                fmt(margin_left - 4.0),
                fmt(margin_left),
                fmt(margin_left - 7.0),
                fmt(y + 3.0),
                fmt(v),
                y = fmt(y),
            ));
        }

        for (di, dim) in self.dimensions.iter().enumerate() {
            let group_x = margin_left + 9.0 + group_w * di as f64;
            for (si, s) in self.series.iter().enumerate() {
                let x = group_x + bar_w * si as f64;
                let mean = s.means[di];
                if mean.is_nan() {
                    continue;
                }
                let whisker = s.whiskers[di];
                let color = PALETTE[si % PALETTE.len()];
                svg.push_str(&format!(
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{color}\"/>\n",
                    fmt(x),
                    fmt(y_of(mean)),
                    fmt(bar_w - 2.0),
                    fmt(mean * scale),
                ));
                if whisker > 0.0 {
                    let cx = x + (bar_w - 2.0) / 2.0;
                    svg.push_str(&format!(
                        "<line x1=\"{cx}\" y1=\"{}\" x2=\"{cx}\" y2=\"{}\" stroke=\"#222\"/>\n",
                        fmt(y_of(mean + whisker)),
                        fmt(y_of((mean - whisker).max(0.0))),
                        cx = fmt(cx),
                    ));
                    svg.push_str(&format!(
                        "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#222\"/>\n",
                        fmt(cx - 3.0),
                        fmt(cx + 3.0),
                        y = fmt(y_of(mean + whisker)),
                    ));
                }
            }
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"9\" text-anchor=\"end\" transform=\"rotate(-45 {} {})\">{}</text>\n",
                fmt(group_x + group_w / 2.0 - 9.0),
                fmt(margin_top + plot_h + 12.0),
                fmt(group_x + group_w / 2.0 - 9.0),
                fmt(margin_top + plot_h + 12.0),
                xml_escape(dim)
            ));
        }

        // Legend.
        let legend_y = margin_top + plot_h + 60.0;
        for (si, s) in self.series.iter().enumerate() {
            let y = legend_y + 18.0 * si as f64;
            svg.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/><text x=\"{}\" y=\"{}\" font-size=\"10\">{}</text>\n",
                fmt(margin_left),
                fmt(y),
                PALETTE[si % PALETTE.len()],
                fmt(margin_left + 14.0),
                fmt(y + 9.0),
                xml_escape(&s.label)
            ));
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// Renders one grouped-bar chart for a tensor.
pub fn emit_charts(
    tensor: &ScoreTensor,
    spec: &ChartSpec,
    name: &str,
    title: &str,
) -> Result<ChartArtifact, Error> {
    let model = ChartModel::from_tensor(tensor, spec)?;
    Ok(ChartArtifact {
        name: name.to_string(),
        svg: model.to_svg(title),
    })
}

/// Fixed four-decimal formatting keeps the SVG byte-stable.
fn fmt(x: f64) -> String {
    format!("{x:.4}")
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn tensor(values: impl Fn(&str, u32) -> f64) -> ScoreTensor {
        let dims = vec!["d0".to_string(), "d1".to_string()];
        let mut t = ScoreTensor::new("q", "m", dims.clone());
        for ctx in ["c1", "c2"] {
            for perm in 0..4u32 {
                let scores: BTreeMap<String, (f64, f64)> = dims
                    .iter()
                    .map(|d| {
                        let v = values(ctx, perm) + d.len() as f64 * 0.0;
                        (d.clone(), (v, v / 10.0))
                    })
                    .collect();
                t.insert(ctx, "none", perm, &scores).unwrap();
            }
        }
        t
    }

    #[test]
    fn constant_tensor_gives_equal_bars_and_zero_whiskers() {
        let t = tensor(|_, _| 3.0);
        let model =
            ChartModel::from_tensor(&t, &ChartSpec::grouped_bars(Which::Raw, GroupBy::Context))
                .unwrap();
        for s in &model.series {
            assert!(s.means.iter().all(|m| *m == 3.0));
            assert!(s.whiskers.iter().all(|w| *w == 0.0));
        }
    }

    #[test]
    fn identical_inputs_give_identical_svg_bytes() {
        let t = tensor(|ctx, perm| {
            if ctx == "c1" {
                2.0 + perm as f64 * 0.1
            } else {
                4.0
            }
        });
        let spec = ChartSpec::grouped_bars(Which::Raw, GroupBy::Context);
        let a = emit_charts(&t, &spec, "x", "title").unwrap();
        let b = emit_charts(&t, &spec, "x", "title").unwrap();
        assert_eq!(a.svg, b.svg);
    }

    #[test]
    fn whiskers_square_to_the_permutation_variance() {
        // One context, one perspective: the chart whisker per dimension is
        // the sqrt of the per-dimension variance over permutations; its
        // square averaged over dimensions is the permutation variance.
        let dims = vec!["d0".to_string()];
        let mut t = ScoreTensor::new("q", "m", dims.clone());
        for (perm, v) in [0.0, 1.0].iter().enumerate() {
            let scores = BTreeMap::from([("d0".to_string(), (*v, *v))]);
            t.insert("c1", "none", perm as u32, &scores).unwrap();
        }
        let model =
            ChartModel::from_tensor(&t, &ChartSpec::grouped_bars(Which::Raw, GroupBy::Context))
                .unwrap();
        let whisker = model.series[0].whiskers[0];
        let pv = persona_metrics::permutation_variance(
            &t,
            Which::Raw,
            persona_metrics::VarianceConvention::Population,
        )
        .unwrap();
        assert!((whisker * whisker - pv).abs() < 1e-12);
        assert_eq!(pv, 0.25);
    }

    #[test]
    fn unknown_chart_spec_is_rejected() {
        let t = tensor(|_, _| 1.0);
        let spec = ChartSpec {
            kind: "pie".into(),
            which: Which::Raw,
            group_by: GroupBy::Context,
        };
        assert!(matches!(
            ChartModel::from_tensor(&t, &spec),
            Err(Error::UnknownChartSpec(k)) if k == "pie"
        ));
    }
}
