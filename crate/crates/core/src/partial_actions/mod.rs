//! Partial actions of groups on finite sets and the equivalence relation they
//! generate.

mod action;
mod relation;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::group::GroupError;

pub use action::{
    check_free, relevant_elements, validate_partial_action, ActionData, Axiom, Freeness, PartialAction,
    ValidationReport, Violation, Witness,
};
pub use relation::{
    build_relation, enumerate_invariant_subsets, equivalence_classes, invariant_closure,
    count_invariant_subsets, verify_equivalence, witness, InvariantSubset, Partition, Relation, MAX_ENUMERATED_CLASSES,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown point label {0:?}")]
    UnknownLabel(String),
    #[error("point index {0} outside a carrier of size {1}")]
    PointOutsideCarrier(usize, usize),
    #[error("map is not injective: {0} is used twice as a {1}")]
    NotInjective(String, &'static str),
    #[error("group element {0} listed twice")]
    DuplicateMap(String),
    #[error("integer group element {0} outside the supported range |t| <= 2^40")]
    ElementOutOfRange(i64),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("partial action axioms violated:\n{0}")]
    Invalid(String),
    #[error("action is not free: {0}")]
    NotFree(String),
}

/// A point of a carrier, by dense index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub usize);

impl Point {
    pub fn index(self) -> usize {
        self.0
    }
}

/// The finite set `X`: an ordered list of unique labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Carrier {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Carrier {
    pub fn new<I, S>(labels: I) -> Result<Self, ActionError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(ActionError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Carrier { labels, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.labels.len()).map(Point)
    }

    pub fn all(&self) -> BTreeSet<Point> {
        self.points().collect()
    }

    pub fn label(&self, p: Point) -> &str {
        &self.labels[p.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn point(&self, label: &str) -> Result<Point, ActionError> {
        self.index
            .get(label)
            .map(|&i| Point(i))
            .ok_or_else(|| ActionError::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, p: Point) -> bool {
        p.0 < self.labels.len()
    }

    pub fn check(&self, p: Point) -> Result<Point, ActionError> {
        if self.contains(p) {
            Ok(p)
        } else {
            Err(ActionError::PointOutsideCarrier(p.0, self.len()))
        }
    }

    /// Renders a point set as `{a, b}` in carrier order.
    pub fn show(&self, set: &BTreeSet<Point>) -> String {
        let inner: Vec<&str> = set.iter().map(|&p| self.label(p)).collect();
        format!("{{{}}}", inner.join(", "))
    }
}

/// A bijection between two subsets of a carrier, stored as its graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialBijection {
    forward: BTreeMap<Point, Point>,
    backward: BTreeMap<Point, Point>,
}

impl PartialBijection {
    pub fn new<I: IntoIterator<Item = (Point, Point)>>(pairs: I) -> Result<Self, ActionError> {
        let mut map = PartialBijection::default();
        for (x, y) in pairs {
            if map.forward.insert(x, y).is_some() {
                return Err(ActionError::NotInjective(format!("#{}", x.0), "source"));
            }
            if map.backward.insert(y, x).is_some() {
                return Err(ActionError::NotInjective(format!("#{}", y.0), "target"));
            }
        }
        Ok(map)
    }

    pub fn identity(points: impl IntoIterator<Item = Point>) -> Self {
        let forward: BTreeMap<Point, Point> = points.into_iter().map(|p| (p, p)).collect();
        let backward = forward.clone();
        PartialBijection { forward, backward }
    }

    pub fn apply(&self, x: Point) -> Option<Point> {
        self.forward.get(&x).copied()
    }

    pub fn apply_inverse(&self, y: Point) -> Option<Point> {
        self.backward.get(&y).copied()
    }

    pub fn domain(&self) -> BTreeSet<Point> {
        self.forward.keys().copied().collect()
    }

    pub fn codomain(&self) -> BTreeSet<Point> {
        self.backward.keys().copied().collect()
    }

    pub fn inverse(&self) -> PartialBijection {
        PartialBijection {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }

    /// Image of the part of `set` that lies in the domain.
    pub fn image(&self, set: &BTreeSet<Point>) -> BTreeSet<Point> {
        set.iter().filter_map(|&x| self.apply(x)).collect()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.forward.iter().map(|(&x, &y)| (x, y))
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}
