//! The score tensor: per-dimension scores indexed by
//! (context, perspective, permutation).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::Error;

/// Rows grouped by (context, perspective, permutation) during parsing.
type GroupedRows = BTreeMap<(String, String, u32), BTreeMap<String, (f64, f64)>>;

/// Which score column an analysis reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Raw,
    Normalized,
}

/// One tensor entry in columnar form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorRecord {
    pub context: String,
    pub perspective: String,
    pub permutation: u32,
    pub dimension: String,
    pub raw: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
struct Cell {
    /// permutation index -> per-dimension (raw, normalized) pairs in
    /// tensor dimension order.
    rows: BTreeMap<u32, Vec<(f64, f64)>>,
}

/// Scores on the (context, perspective, permutation, dimension) axes.
///
/// Within each (context, perspective) cell every permutation row covers all
/// dimensions; permutation sets may differ between cells when refusals were
/// excluded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "TensorDto", try_from = "TensorDto")]
pub struct ScoreTensor {
    questionnaire_id: String,
    model_id: String,
    dimensions: Vec<String>,
    cells: BTreeMap<(String, String), Cell>,
}

impl ScoreTensor {
    pub fn new(
        questionnaire_id: impl Into<String>,
        model_id: impl Into<String>,
        dimensions: Vec<String>,
    ) -> Self {
        ScoreTensor {
            questionnaire_id: questionnaire_id.into(),
            model_id: model_id.into(),
            dimensions,
            cells: BTreeMap::new(),
        }
    }

    pub fn questionnaire_id(&self) -> &str {
        &self.questionnaire_id
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn dimensions(&self) -> &[String] {
        &self.dimensions
    }

    /// Inserts one scored administration. `scores` maps dimension id to
    /// (raw, normalized) and must cover exactly the tensor's dimensions.
    pub fn insert(
        &mut self,
        context: &str,
        perspective: &str,
        permutation: u32,
        scores: &BTreeMap<String, (f64, f64)>,
    ) -> Result<(), Error> {
        if scores.len() != self.dimensions.len() {
            return Err(Error::RowShape {
                context: context.to_string(),
                perspective: perspective.to_string(),
                permutation,
                got: scores.len(),
                want: self.dimensions.len(),
            });
        }
        let mut row = Vec::with_capacity(self.dimensions.len());
        for dim in &self.dimensions {
            let pair = scores
                .get(dim)
                .ok_or_else(|| Error::UnknownDimension(dim.clone()))?;
            row.push(*pair);
        }
        let cell = self
            .cells
            .entry((context.to_string(), perspective.to_string()))
            .or_default();
        if cell.rows.insert(permutation, row).is_some() {
            return Err(Error::DuplicateRow {
                context: context.to_string(),
                perspective: perspective.to_string(),
                permutation,
            });
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Distinct context labels in sorted order.
    pub fn contexts(&self) -> Vec<String> {
        let set: BTreeSet<_> = self.cells.keys().map(|(c, _)| c.clone()).collect();
        set.into_iter().collect()
    }

    /// Distinct perspective labels in sorted order.
    pub fn perspectives(&self) -> Vec<String> {
        let set: BTreeSet<_> = self.cells.keys().map(|(_, p)| p.clone()).collect();
        set.into_iter().collect()
    }

    /// Permutation indices present in a cell.
    pub fn permutations(&self, context: &str, perspective: &str) -> Result<Vec<u32>, Error> {
        let cell = self.cell(context, perspective)?;
        Ok(cell.rows.keys().copied().collect())
    }

    /// Full score row for one administration, in dimension order.
    pub fn row(
        &self,
        context: &str,
        perspective: &str,
        permutation: u32,
        which: Which,
    ) -> Result<Vec<f64>, Error> {
        let cell = self.cell(context, perspective)?;
        let row = cell.rows.get(&permutation).ok_or(Error::NotEnough {
            what: "permutations in cell",
            need: permutation as usize,
            got: cell.rows.len(),
        })?;
        Ok(row.iter().map(|&(r, n)| pick(r, n, which)).collect())
    }

    /// Scores of one dimension over the permutations of a cell, keyed by
    /// permutation index.
    pub fn column(
        &self,
        context: &str,
        perspective: &str,
        dimension: &str,
        which: Which,
    ) -> Result<BTreeMap<u32, f64>, Error> {
        let idx = self.dim_index(dimension)?;
        let cell = self.cell(context, perspective)?;
        Ok(cell
            .rows
            .iter()
            .map(|(perm, row)| (*perm, pick(row[idx].0, row[idx].1, which)))
            .collect())
    }

    fn dim_index(&self, dimension: &str) -> Result<usize, Error> {
        self.dimensions
            .iter()
            .position(|d| d == dimension)
            .ok_or_else(|| Error::UnknownDimension(dimension.to_string()))
    }

    fn cell(&self, context: &str, perspective: &str) -> Result<&Cell, Error> {
        self.cells
            .get(&(context.to_string(), perspective.to_string()))
            .ok_or_else(|| Error::MissingCell {
                context: context.to_string(),
                perspective: perspective.to_string(),
            })
    }

    /// Columnar records sorted by (context, perspective, permutation,
    /// dimension position).
    pub fn to_records(&self) -> Vec<TensorRecord> {
        let mut out = Vec::new();
        for ((context, perspective), cell) in &self.cells {
            for (perm, row) in &cell.rows {
                for (dim, &(raw, normalized)) in self.dimensions.iter().zip(row) {
                    out.push(TensorRecord {
                        context: context.clone(),
                        perspective: perspective.clone(),
                        permutation: *perm,
                        dimension: dim.clone(),
                        raw,
                        normalized,
                    });
                }
            }
        }
        out
    }

    /// Tab-separated serialization with a fixed header, one record per line.
    pub fn to_tsv(&self) -> String {
        let mut out =
            String::from("context\tperspective\tpermutation\tdimension\traw\tnormalized\n");
        for r in self.to_records() {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                r.context,
                r.perspective,
                r.permutation,
                r.dimension,
                fmt_f64(r.raw),
                fmt_f64(r.normalized)
            ));
        }
        out
    }

    pub fn from_tsv(
        questionnaire_id: &str,
        model_id: &str,
        dimensions: Vec<String>,
        text: &str,
    ) -> Result<Self, Error> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty tensor file".into()))?;
        if header != "context\tperspective\tpermutation\tdimension\traw\tnormalized" {
            return Err(Error::Format(format!("unexpected header: {header}")));
        }
        let mut grouped: GroupedRows = BTreeMap::new();
        for (no, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split('\t').collect();
            if parts.len() != 6 {
                return Err(Error::Format(format!(
                    "line {}: expected 6 columns",
                    no + 2
                )));
            }
            let perm: u32 = parts[2]
                .parse()
                .map_err(|_| Error::Format(format!("line {}: bad permutation", no + 2)))?;
            let raw: f64 = parts[4]
                .parse()
                .map_err(|_| Error::Format(format!("line {}: bad raw score", no + 2)))?;
            let norm: f64 = parts[5]
                .parse()
                .map_err(|_| Error::Format(format!("line {}: bad normalized score", no + 2)))?;
            grouped
                .entry((parts[0].to_string(), parts[1].to_string(), perm))
                .or_default()
                .insert(parts[3].to_string(), (raw, norm));
        }
        let mut tensor = ScoreTensor::new(questionnaire_id, model_id, dimensions);
        for ((ctx, persp, perm), scores) in grouped {
            tensor.insert(&ctx, &persp, perm, &scores)?;
        }
        Ok(tensor)
    }
}

fn pick(raw: f64, normalized: f64, which: Which) -> f64 {
    match which {
        Which::Raw => raw,
        Which::Normalized => normalized,
    }
}

/// Shortest round-trippable decimal form, stable across runs.
fn fmt_f64(x: f64) -> String {
    let mut s = format!("{x}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

/// Serde representation: metadata plus columnar records.
#[derive(Serialize, Deserialize)]
struct TensorDto {
    questionnaire_id: String,
    model_id: String,
    dimensions: Vec<String>,
    records: Vec<TensorRecord>,
}

impl From<ScoreTensor> for TensorDto {
    fn from(t: ScoreTensor) -> Self {
        TensorDto {
            questionnaire_id: t.questionnaire_id.clone(),
            model_id: t.model_id.clone(),
            dimensions: t.dimensions.clone(),
            records: t.to_records(),
        }
    }
}

impl TryFrom<TensorDto> for ScoreTensor {
    type Error = Error;

    fn try_from(dto: TensorDto) -> Result<Self, Error> {
        let mut grouped: GroupedRows = BTreeMap::new();
        for r in dto.records {
            grouped
                .entry((r.context, r.perspective, r.permutation))
                .or_default()
                .insert(r.dimension, (r.raw, r.normalized));
        }
        let mut tensor = ScoreTensor::new(dto.questionnaire_id, dto.model_id, dto.dimensions);
        for ((ctx, persp, perm), scores) in grouped {
            tensor.insert(&ctx, &persp, perm, &scores)?;
        }
        Ok(tensor)
    }
}
