//! JSON documents for actions and algebra elements.
//!
//! ```json
//! {
//!   "field": { "kind": "rationals" },
//!   "group": { "kind": "cyclic", "order": 2 },
//!   "set": ["a", "b", "c"],
//!   "maps": [{ "t": "1", "pairs": [["a", "b"], ["b", "a"]] }]
//! }
//! ```
//!
//! Skew elements are lists of `{"t": ..., "coeffs": {label: scalar}}` and
//! relation elements lists of `{"x": ..., "y": ..., "value": scalar}`. Scalars
//! are always strings. Unknown keys are rejected.

use std::fmt;
use std::sync::Arc;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::error::AlgebraError;
use crate::field::{FieldError, FieldSpec};
use crate::function_algebra::FunAlgElement;
use crate::group::{CayleyTable, GroupElement, GroupError, GroupSpec};
use crate::partial_actions::{ActionData, ActionError, Carrier, PartialAction, PartialBijection, Relation, ValidationReport};
use crate::relation_algebra::RelElement;
use crate::skew_ring::SkewElement;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("not a partial action:\n{0}")]
    Validation(ValidationReport),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldDoc {
    Rationals,
    Prime { modulus: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupDoc {
    Cyclic { order: u64 },
    Integers,
    Table { elements: Vec<String>, identity: String, table: Vec<Vec<String>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub t: String,
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDocument {
    pub field: FieldDoc,
    pub group: GroupDoc,
    pub set: Vec<String>,
    pub maps: Vec<MapDoc>,
}

/// A parsed and validated action document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedAction {
    pub field: FieldSpec,
    pub action: Arc<PartialAction>,
}

impl FieldDoc {
    pub fn to_spec(&self) -> Result<FieldSpec, FieldError> {
        match *self {
            FieldDoc::Rationals => Ok(FieldSpec::Rationals),
            FieldDoc::Prime { modulus } => FieldSpec::prime(modulus),
        }
    }

    pub fn from_spec(field: FieldSpec) -> Self {
        match field {
            FieldSpec::Rationals => FieldDoc::Rationals,
            FieldSpec::Prime(p) => FieldDoc::Prime { modulus: p.get() },
        }
    }
}

impl GroupDoc {
    pub fn to_spec(&self) -> Result<GroupSpec, GroupError> {
        match self {
            GroupDoc::Cyclic { order } => GroupSpec::cyclic(*order),
            GroupDoc::Integers => Ok(GroupSpec::Integers),
            GroupDoc::Table { elements, identity, table } => {
                Ok(GroupSpec::Table(CayleyTable::new(elements, identity, table)?))
            }
        }
    }

    pub fn from_spec(group: &GroupSpec) -> Self {
        match group {
            GroupSpec::Cyclic(n) => GroupDoc::Cyclic { order: *n },
            GroupSpec::Integers => GroupDoc::Integers,
            GroupSpec::Table(t) => {
                let elements: Vec<String> = (0..t.len()).map(|i| t.name(i).to_string()).collect();
                let table = (0..t.len())
                    .map(|i| {
                        (0..t.len())
                            .map(|j| {
                                let p = group.mul(GroupElement::Index(i), GroupElement::Index(j)).expect("table elements");
                                group.format(p)
                            })
                            .collect()
                    })
                    .collect();
                GroupDoc::Table { identity: t.name(0).to_string(), elements, table }
            }
        }
    }
}

impl ActionDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Builds the candidate data without checking the axioms.
    pub fn to_data(&self) -> Result<(FieldSpec, ActionData), DocumentError> {
        let field = self.field.to_spec()?;
        let group = self.group.to_spec()?;
        let carrier = Arc::new(Carrier::new(self.set.iter().cloned())?);
        let mut listed = Vec::with_capacity(self.maps.len());
        for m in &self.maps {
            let t = group.parse(&m.t)?;
            let pairs = m
                .pairs
                .iter()
                .map(|(x, y)| Ok((carrier.point(x)?, carrier.point(y)?)))
                .collect::<Result<Vec<_>, ActionError>>()?;
            listed.push((t, PartialBijection::new(pairs)?));
        }
        Ok((field, ActionData::new(group, carrier, listed)?))
    }

    pub fn load(&self) -> Result<LoadedAction, DocumentError> {
        let (field, data) = self.to_data()?;
        let action = PartialAction::new(data).map_err(DocumentError::Validation)?;
        Ok(LoadedAction { field, action: Arc::new(action) })
    }

    /// The document of a validated action, listing every nonempty `h_t`
    /// except the identity.
    pub fn from_action(field: FieldSpec, pa: &PartialAction) -> Self {
        let g = pa.group();
        let c = pa.carrier();
        let e = g.identity();
        let maps = pa
            .listed()
            .filter(|&(t, _)| t != e)
            .map(|(t, h)| MapDoc {
                t: g.format(t),
                pairs: h.pairs().map(|(x, y)| (c.label(x).to_string(), c.label(y).to_string())).collect(),
            })
            .collect();
        ActionDocument {
            field: FieldDoc::from_spec(field),
            group: GroupDoc::from_spec(g),
            set: c.labels().to_vec(),
            maps,
        }
    }
}

pub fn load_action(text: &str) -> Result<LoadedAction, DocumentError> {
    ActionDocument::parse(text)?.load()
}

/// Label/scalar pairs in document order; a repeated label is an error.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Coeffs(pub Vec<(String, String)>);

impl Serialize for Coeffs {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(k, v)| (k, v)))
    }
}

impl<'de> Deserialize<'de> for Coeffs {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Coeffs;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object from point labels to scalar strings")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Coeffs, A::Error> {
                let mut out: Vec<(String, String)> = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, String>()? {
                    if out.iter().any(|(seen, _)| *seen == k) {
                        return Err(serde::de::Error::custom(format!("label {k:?} repeated")));
                    }
                    out.push((k, v));
                }
                Ok(Coeffs(out))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkewTermDoc {
    pub t: String,
    pub coeffs: Coeffs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelEntryDoc {
    pub x: String,
    pub y: String,
    pub value: String,
}

/// Reads a skew element; repeated `t` entries are summed.
pub fn parse_skew(text: &str, alpha: &Arc<crate::function_algebra::InducedAlgebraAction>) -> Result<SkewElement, DocumentError> {
    let doc: Vec<SkewTermDoc> = serde_json::from_str(text)?;
    let c = alpha.carrier();
    let field = alpha.field();
    let mut terms = Vec::with_capacity(doc.len());
    for term in &doc {
        let t = alpha.group().parse(&term.t)?;
        let coeffs = term
            .coeffs
            .0
            .iter()
            .map(|(x, k)| Ok((c.point(x)?, field.parse(k)?)))
            .collect::<Result<Vec<_>, DocumentError>>()?;
        terms.push((t, FunAlgElement::from_coeffs(c.clone(), field, coeffs)?));
    }
    Ok(SkewElement::new(alpha.clone(), terms)?)
}

pub fn skew_to_doc(u: &SkewElement) -> Vec<SkewTermDoc> {
    let c = u.alpha().carrier();
    let g = u.alpha().group();
    u.terms()
        .map(|(t, f)| SkewTermDoc {
            t: g.format(t),
            coeffs: Coeffs(f.coeffs().map(|(x, k)| (c.label(x).to_string(), k.to_string())).collect()),
        })
        .collect()
}

/// Reads a relation element; repeated pairs are summed.
pub fn parse_rel(text: &str, relation: &Arc<Relation>, field: FieldSpec) -> Result<RelElement, DocumentError> {
    let doc: Vec<RelEntryDoc> = serde_json::from_str(text)?;
    let c = relation.carrier();
    let coeffs = doc
        .iter()
        .map(|e| Ok(((c.point(&e.x)?, c.point(&e.y)?), field.parse(&e.value)?)))
        .collect::<Result<Vec<_>, DocumentError>>()?;
    Ok(RelElement::new(relation.clone(), field, coeffs)?)
}

pub fn rel_to_doc(f: &RelElement) -> Vec<RelEntryDoc> {
    let c = f.relation().carrier();
    f.coeffs()
        .map(|((x, y), k)| RelEntryDoc { x: c.label(x).to_string(), y: c.label(y).to_string(), value: k.to_string() })
        .collect()
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}
