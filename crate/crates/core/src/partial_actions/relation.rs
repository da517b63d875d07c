use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigUint;

use super::{ActionError, Carrier, PartialAction, Point};
use crate::group::{GroupElement, GroupSpec};

/// The orbit relation `R = {(x, h_t(x)) : x in X_{t^-1}}` with, for each
/// pair, every group element realizing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    group: GroupSpec,
    carrier: Arc<Carrier>,
    pairs: BTreeMap<(Point, Point), Vec<GroupElement>>,
}

impl Relation {
    /// An arbitrary witnessed pair set; it need not be an equivalence.
    pub fn from_pairs(
        group: GroupSpec,
        carrier: Arc<Carrier>,
        pairs: impl IntoIterator<Item = (Point, Point, GroupElement)>,
    ) -> Result<Self, ActionError> {
        let mut map: BTreeMap<(Point, Point), Vec<GroupElement>> = BTreeMap::new();
        for (x, y, t) in pairs {
            carrier.check(x)?;
            carrier.check(y)?;
            let ws = map.entry((x, y)).or_default();
            if !ws.contains(&t) {
                ws.push(t);
                ws.sort();
            }
        }
        Ok(Relation { group, carrier, pairs: map })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    pub fn contains(&self, x: Point, y: Point) -> bool {
        self.pairs.contains_key(&(x, y))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs in lexicographic carrier order.
    pub fn pairs(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.pairs.keys().copied()
    }

    pub fn witnesses(&self, x: Point, y: Point) -> &[GroupElement] {
        self.pairs.get(&(x, y)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// True when every pair has exactly one witness.
    pub fn is_free(&self) -> bool {
        self.pairs.values().all(|w| w.len() == 1)
    }

    /// Pairs `(x, y)` in `R` with first coordinate `x`.
    pub fn row(&self, x: Point) -> impl Iterator<Item = Point> + '_ {
        self.pairs
            .range((x, Point(0))..=(x, Point(usize::MAX)))
            .map(|(&(_, y), _)| y)
    }

    /// Position of a pair in [`Relation::pairs`] order.
    pub fn position(&self, x: Point, y: Point) -> Option<usize> {
        self.pairs.keys().position(|&p| p == (x, y))
    }
}

pub fn build_relation(pa: &PartialAction) -> Relation {
    let triples: Vec<(Point, Point, GroupElement)> = pa
        .listed()
        .flat_map(|(t, h)| h.pairs().map(move |(x, y)| (x, y, t)))
        .collect();
    Relation::from_pairs(pa.group().clone(), pa.carrier().clone(), triples)
        .expect("validated action stays inside its carrier")
}

/// Reflexive, symmetric and transitive on the `(x, y)` projection. When every
/// pair has a unique witness this also checks that the witness of a composite
/// pair is the product of the witnesses.
pub fn verify_equivalence(r: &Relation) -> bool {
    let reflexive = r.carrier.points().all(|x| r.contains(x, x));
    let symmetric = r.pairs().all(|(x, y)| r.contains(y, x));
    if !(reflexive && symmetric) {
        return false;
    }
    let single = r.is_free();
    for (x, y) in r.pairs() {
        for z in r.row(y) {
            if !r.contains(x, z) {
                return false;
            }
            if single {
                let t = r.witnesses(x, y)[0];
                let s = r.witnesses(y, z)[0];
                match r.group.mul(s, t) {
                    Ok(st) if r.witnesses(x, z) == [st] => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

/// Equivalence classes, each in carrier order, ordered by least member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<Vec<Point>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // keep the smaller index as root so roots are least members
        if ra < rb {
            self.parent[rb] = ra;
        } else if rb < ra {
            self.parent[ra] = rb;
        }
    }
}

pub fn equivalence_classes(r: &Relation) -> Result<Partition, ActionError> {
    if !verify_equivalence(r) {
        return Err(ActionError::Invalid("relation is not an equivalence relation".into()));
    }
    let n = r.carrier.len();
    let mut uf = UnionFind::new(n);
    for (x, y) in r.pairs() {
        uf.union(x.0, y.0);
    }
    let mut blocks: BTreeMap<usize, Vec<Point>> = BTreeMap::new();
    for i in 0..n {
        let root = uf.find(i);
        blocks.entry(root).or_default().push(Point(i));
    }
    Ok(Partition { blocks: blocks.into_values().collect() })
}

/// A subset `Z` closed under `R`: `z in Z` and `(z, x) in R` imply `x in Z`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InvariantSubset {
    pub members: BTreeSet<Point>,
}

impl InvariantSubset {
    /// Wraps `members` after checking invariance.
    pub fn new(r: &Relation, members: BTreeSet<Point>) -> Result<Self, ActionError> {
        for &z in &members {
            r.carrier.check(z)?;
            if let Some(x) = r.row(z).find(|x| !members.contains(x)) {
                return Err(ActionError::Invalid(format!(
                    "subset is not R-invariant: ({}, {}) leaves it",
                    r.carrier.label(z),
                    r.carrier.label(x)
                )));
            }
        }
        Ok(InvariantSubset { members })
    }

    pub fn contains(&self, p: Point) -> bool {
        self.members.contains(&p)
    }
}

/// The least invariant superset of `seed`.
pub fn invariant_closure(r: &Relation, seed: &BTreeSet<Point>) -> Result<InvariantSubset, ActionError> {
    let mut members = BTreeSet::new();
    let mut stack: Vec<Point> = Vec::new();
    for &p in seed {
        r.carrier.check(p)?;
        if members.insert(p) {
            stack.push(p);
        }
    }
    while let Some(z) = stack.pop() {
        for x in r.row(z) {
            if members.insert(x) {
                stack.push(x);
            }
        }
    }
    Ok(InvariantSubset { members })
}

/// Largest class count accepted by [`enumerate_invariant_subsets`].
pub const MAX_ENUMERATED_CLASSES: usize = 24;

/// All unions of classes. Bit `i` of the enumeration index selects class `i`,
/// so the list starts with the empty set and ends with the whole carrier.
pub fn enumerate_invariant_subsets(r: &Relation) -> Result<Vec<InvariantSubset>, ActionError> {
    let classes = equivalence_classes(r)?;
    let k = classes.len();
    if k > MAX_ENUMERATED_CLASSES {
        return Err(ActionError::Invalid(format!(
            "{k} classes give 2^{k} invariant subsets, too many to list"
        )));
    }
    Ok((0u64..1 << k)
        .map(|mask| InvariantSubset {
            members: classes
                .blocks
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .flat_map(|(_, b)| b.iter().copied())
                .collect(),
        })
        .collect())
}

/// `2^k` for `k` classes.
pub fn count_invariant_subsets(r: &Relation) -> Result<BigUint, ActionError> {
    let k = equivalence_classes(r)?.len();
    Ok(BigUint::from(1u32) << k)
}

/// The unique `t` with `h_t(x) = y`.
pub fn witness(r: &Relation, x: Point, y: Point) -> Result<GroupElement, ActionError> {
    let ws = r.witnesses(x, y);
    if ws.is_empty() {
        let name = |p: Point| if r.carrier.contains(p) { r.carrier.label(p).to_string() } else { format!("#{}", p.0) };
        return Err(ActionError::Invalid(format!("({}, {}) is not in R", name(x), name(y))));
    }
    if !r.is_free() {
        let ((a, b), w) = r.pairs.iter().find(|(_, w)| w.len() > 1).expect("some pair has several witnesses");
        return Err(ActionError::NotFree(format!(
            "({}, {}) has witnesses {}",
            r.carrier.label(*a),
            r.carrier.label(*b),
            w.iter().map(|&t| r.group.format(t)).collect::<Vec<_>>().join(", ")
        )));
    }
    Ok(ws[0])
}
