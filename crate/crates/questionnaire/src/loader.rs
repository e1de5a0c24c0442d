//! Parsing and validation of questionnaire definition files.
//!
//! A definition is a TOML document with `id`, `name`, `scoring`,
//! `instructions`, a `[scale]` table, optional `[[categories]]` and the
//! `[[dimensions]]` / `[[items]]` lists. Validation enforces every type
//! invariant before a [`Questionnaire`] is handed out.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;

use crate::types::{
    Category, Dimension, Item, Keying, LikertScale, Questionnaire, ScoringRule, VsmConstants,
    VsmSlot,
};
use crate::Error;

#[derive(Debug, Deserialize)]
struct RawDefinition {
    id: String,
    name: String,
    scoring: String,
    instructions: String,
    scale: RawScale,
    #[serde(default)]
    categories: Vec<RawCategory>,
    dimensions: Vec<RawDimension>,
    items: Vec<RawItem>,
}

#[derive(Debug, Deserialize)]
struct RawScale {
    labels: Vec<String>,
    /// Defaults to 1..=points when omitted (positional mapping).
    values: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
struct RawCategory {
    id: String,
    name: String,
}

#[derive(Debug, Deserialize)]
struct RawDimension {
    id: String,
    name: String,
    category: Option<String>,
    constants: Option<RawConstants>,
}

#[derive(Debug, Deserialize)]
struct RawConstants {
    a: f64,
    b: f64,
    #[serde(default)]
    c: f64,
}

#[derive(Debug, Deserialize)]
struct RawItem {
    id: String,
    text: String,
    dimension: String,
    keying: i64,
    slot: Option<String>,
}

/// Expected dimension/category counts for the shipped instruments.
fn known_shape(id: &str) -> Option<(usize, usize)> {
    match id {
        "pvq" => Some((10, 4)),
        "vsm" => Some((6, 0)),
        "ipip" => Some((5, 0)),
        _ => None,
    }
}

/// Parses and validates a questionnaire definition document.
pub fn load_questionnaire(source: &str) -> Result<Questionnaire, Error> {
    let raw: RawDefinition = toml::from_str(source).map_err(|e| Error::Schema(e.to_string()))?;

    let scoring_rule = match raw.scoring.as_str() {
        "mean_per_dimension" => ScoringRule::MeanPerDimension,
        "vsm_formula" => ScoringRule::VsmFormula,
        other => return Err(Error::Schema(format!("unknown scoring rule '{other}'"))),
    };

    let scale = build_scale(raw.scale)?;
    // Item texts may lead with a newline when the TOML used a multi-line
    // string starting on its own line.
    let trim = |s: String| s.trim_matches('\n').to_string();

    let categories: Vec<Category> = raw
        .categories
        .into_iter()
        .map(|c| Category {
            id: c.id,
            name: c.name,
        })
        .collect();

    let mut dimensions = Vec::new();
    let mut dim_ids = BTreeSet::new();
    for d in raw.dimensions {
        if !dim_ids.insert(d.id.clone()) {
            return Err(Error::DuplicateDimension(d.id));
        }
        if let Some(cat) = &d.category {
            if !categories.iter().any(|c| &c.id == cat) {
                return Err(Error::UnknownCategory {
                    dimension: d.id.clone(),
                    category: cat.clone(),
                });
            }
        }
        let constants = d.constants.map(|c| VsmConstants {
            a: c.a,
            b: c.b,
            c: c.c,
        });
        match scoring_rule {
            ScoringRule::VsmFormula if constants.is_none() => {
                return Err(Error::MissingConstants { dimension: d.id })
            }
            ScoringRule::MeanPerDimension if constants.is_some() => {
                return Err(Error::UnexpectedConstants { dimension: d.id })
            }
            _ => {}
        }
        dimensions.push(Dimension {
            id: d.id,
            name: d.name,
            category_id: d.category,
            vsm_constants: constants,
        });
    }

    let mut items = Vec::new();
    let mut item_ids = BTreeSet::new();
    for i in raw.items {
        if !item_ids.insert(i.id.clone()) {
            return Err(Error::DuplicateItem(i.id));
        }
        if !dim_ids.contains(&i.dimension) {
            return Err(Error::UnknownDimension {
                item: i.id,
                dimension: i.dimension,
            });
        }
        let keying = Keying::from_sign(i.keying).ok_or(Error::InvalidKeying {
            item: i.id.clone(),
            value: i.keying,
        })?;
        let vsm_slot = match (&scoring_rule, i.slot) {
            (ScoringRule::VsmFormula, Some(s)) => {
                Some(VsmSlot::parse(&s).ok_or(Error::VsmSlot {
                    dimension: i.dimension.clone(),
                    slot: s,
                    problem: "not one of q1..q4",
                })?)
            }
            (ScoringRule::VsmFormula, None) => {
                return Err(Error::VsmSlot {
                    dimension: i.dimension.clone(),
                    slot: format!("for item '{}'", i.id),
                    problem: "missing",
                })
            }
            (ScoringRule::MeanPerDimension, Some(_)) => {
                return Err(Error::UnexpectedSlot { item: i.id })
            }
            (ScoringRule::MeanPerDimension, None) => None,
        };
        items.push(Item {
            id: i.id,
            text: trim(i.text),
            dimension_id: i.dimension,
            keying,
            vsm_slot,
        });
    }

    // Every dimension needs at least one item; VSM needs the full slot set.
    for dim in &dimensions {
        let members: Vec<&Item> = items.iter().filter(|i| i.dimension_id == dim.id).collect();
        if members.is_empty() {
            return Err(Error::EmptyDimension(dim.id.clone()));
        }
        if scoring_rule == ScoringRule::VsmFormula {
            if members.len() != 4 {
                return Err(Error::VsmItemCount {
                    dimension: dim.id.clone(),
                    found: members.len(),
                });
            }
            let mut seen = BTreeMap::new();
            for item in &members {
                let slot = item.vsm_slot.expect("validated above");
                if seen.insert(slot, item.id.clone()).is_some() {
                    return Err(Error::VsmSlot {
                        dimension: dim.id.clone(),
                        slot: slot.as_str().to_string(),
                        problem: "used twice",
                    });
                }
            }
        }
    }

    if let Some((dims, cats)) = known_shape(&raw.id) {
        if dimensions.len() != dims {
            return Err(Error::DimensionCountMismatch {
                id: raw.id,
                expected: dims,
                found: dimensions.len(),
            });
        }
        if cats > 0 && categories.len() != cats {
            return Err(Error::CategoryCountMismatch {
                id: raw.id,
                expected: cats,
                found: categories.len(),
            });
        }
    }

    Ok(Questionnaire {
        id: raw.id,
        name: raw.name,
        scale,
        items,
        dimensions,
        categories,
        scoring_rule,
        instructions: trim(raw.instructions),
    })
}

fn build_scale(raw: RawScale) -> Result<LikertScale, Error> {
    let points = raw.labels.len();
    if points < 2 {
        return Err(Error::ScaleTooSmall(points));
    }
    let values = match raw.values {
        Some(v) => {
            if v.len() != points {
                return Err(Error::ScaleLengthMismatch {
                    labels: points,
                    values: v.len(),
                });
            }
            v
        }
        None => (1..=points).map(|i| i as f64).collect(),
    };
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("scale values must not be NaN"));
    if sorted.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::ScaleValuesNotDistinct);
    }
    Ok(LikertScale {
        labels: raw.labels,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pvq_loads_with_expected_shape() {
        let q = load_questionnaire(crate::PVQ_DEF).unwrap();
        assert_eq!(q.scoring_rule, ScoringRule::MeanPerDimension);
        assert_eq!(q.dimensions.len(), 10);
        assert_eq!(q.categories.len(), 4);
        assert_eq!(q.items.len(), 40);
        assert_eq!(q.scale.points(), 6);
        // Scrambled presentation order with an explicit value map.
        assert_eq!(q.scale.labels[0], "Not like me");
        assert_eq!(q.scale.values, vec![2.0, 1.0, 5.0, 6.0, 4.0, 3.0]);
        assert_eq!(
            q.category_members("self_enhancement"),
            vec!["achievement", "power"]
        );
    }

    #[test]
    fn vsm_loads_with_slots_and_constants() {
        let q = load_questionnaire(crate::VSM_DEF).unwrap();
        assert_eq!(q.scoring_rule, ScoringRule::VsmFormula);
        assert_eq!(q.dimensions.len(), 6);
        assert_eq!(q.items.len(), 24);
        let pd = q.dimension("power_distance").unwrap();
        let c = pd.vsm_constants.unwrap();
        assert_eq!((c.a, c.b, c.c), (35.0, 35.0, 0.0));
        let ind = q.dimension("indulgence").unwrap().vsm_constants.unwrap();
        assert_eq!((ind.a, ind.b), (35.0, 40.0));
        let ua = q
            .dimension("uncertainty_avoidance")
            .unwrap()
            .vsm_constants
            .unwrap();
        assert_eq!((ua.a, ua.b), (40.0, 25.0));
    }

    #[test]
    fn ipip_loads_with_reverse_keys() {
        let q = load_questionnaire(crate::IPIP_DEF).unwrap();
        assert_eq!(q.dimensions.len(), 5);
        assert_eq!(q.items.len(), 50);
        assert_eq!(q.scale.points(), 6);
        let reversed = q
            .items
            .iter()
            .filter(|i| i.keying == Keying::Reverse)
            .count();
        assert_eq!(reversed, 25);
        for d in &q.dimensions {
            assert_eq!(q.items_of(&d.id).len(), 10);
        }
    }

    #[test]
    fn vsm_dimension_with_three_items_is_rejected() {
        // Drop one power_distance item from the shipped definition.
        let crippled = crate::VSM_DEF.replace(
            "[[items]]\nid = \"m02\"\ntext = \"have a boss (direct superior) you can respect\"\ndimension = \"power_distance\"\nkeying = 1\nslot = \"q2\"\n",
            "",
        );
        assert_ne!(
            crippled,
            crate::VSM_DEF,
            "fixture text changed; update the test"
        );
        let err = load_questionnaire(&crippled).unwrap_err();
        match err {
            Error::VsmItemCount { dimension, found } => {
                assert_eq!(dimension, "power_distance");
                assert_eq!(found, 3);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn unknown_dimension_reference_names_item_and_dimension() {
        let def = r#"
id = "mini"
name = "Mini"
scoring = "mean_per_dimension"
instructions = "Answer."

[scale]
labels = ["no", "yes"]

[[dimensions]]
id = "a"
name = "A"

[[items]]
id = "i1"
text = "First."
dimension = "xyz"
keying = 1
"#;
        let err = load_questionnaire(def).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("i1") && msg.contains("xyz"), "got: {msg}");
    }

    #[test]
    fn duplicate_item_ids_are_rejected() {
        let def = r#"
id = "mini"
name = "Mini"
scoring = "mean_per_dimension"
instructions = "Answer."

[scale]
labels = ["no", "yes"]

[[dimensions]]
id = "a"
name = "A"

[[items]]
id = "i1"
text = "First."
dimension = "a"
keying = 1

[[items]]
id = "i1"
text = "Second."
dimension = "a"
keying = 1
"#;
        assert!(matches!(load_questionnaire(def), Err(Error::DuplicateItem(id)) if id == "i1"));
    }

    #[test]
    fn positional_values_default_to_one_based() {
        let def = r#"
id = "mini"
name = "Mini"
scoring = "mean_per_dimension"
instructions = "Answer."

[scale]
labels = ["low", "mid", "high"]

[[dimensions]]
id = "a"
name = "A"

[[items]]
id = "i1"
text = "First."
dimension = "a"
keying = 1
"#;
        let q = load_questionnaire(def).unwrap();
        assert_eq!(q.scale.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn duplicate_scale_values_are_rejected() {
        let def = r#"
id = "mini"
name = "Mini"
scoring = "mean_per_dimension"
instructions = "Answer."

[scale]
labels = ["low", "high"]
values = [2, 2]

[[dimensions]]
id = "a"
name = "A"

[[items]]
id = "i1"
text = "First."
dimension = "a"
keying = 1
"#;
        assert!(matches!(
            load_questionnaire(def),
            Err(Error::ScaleValuesNotDistinct)
        ));
    }
}
