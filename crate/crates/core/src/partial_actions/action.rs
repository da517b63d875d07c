use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::{ActionError, Carrier, PartialBijection, Point};
use crate::group::{GroupElement, GroupSpec};

const INT_LIMIT: i64 = 1 << 40;

/// A structurally well-formed candidate partial action, not yet checked
/// against the axioms.
///
/// The entry for `t` is `h_t`, with domain `X_{t^-1}` and codomain `X_t`.
/// Group elements with no entry (and whose inverse has no entry) have empty
/// domains. If `t` is listed but `t^-1` is not, `h_{t^-1}` is filled in as the
/// inverse of `h_t`. If `e` is unlisted it is the identity on `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionData {
    group: GroupSpec,
    carrier: Arc<Carrier>,
    maps: BTreeMap<GroupElement, PartialBijection>,
}

impl ActionData {
    pub fn new(
        group: GroupSpec,
        carrier: Arc<Carrier>,
        listed: impl IntoIterator<Item = (GroupElement, PartialBijection)>,
    ) -> Result<Self, ActionError> {
        let mut maps = BTreeMap::new();
        for (t, h) in listed {
            if !group.contains(t) {
                return Err(ActionError::Group(crate::group::GroupError::Mismatch {
                    element: format!("{t:?}"),
                    group: group.to_string(),
                }));
            }
            if let GroupElement::Int(n) = t {
                if n.unsigned_abs() > INT_LIMIT as u64 {
                    return Err(ActionError::ElementOutOfRange(n));
                }
            }
            for (x, y) in h.pairs() {
                carrier.check(x)?;
                carrier.check(y)?;
            }
            if maps.insert(t, h).is_some() {
                return Err(ActionError::DuplicateMap(group.format(t)));
            }
        }
        let missing: Vec<(GroupElement, PartialBijection)> = maps
            .iter()
            .filter_map(|(&t, h)| {
                let ti = group.inv(t).expect("listed elements belong to the group");
                (!maps.contains_key(&ti)).then(|| (ti, h.inverse()))
            })
            .collect();
        maps.extend(missing);
        maps.entry(group.identity())
            .or_insert_with(|| PartialBijection::identity(carrier.points()));
        Ok(ActionData { group, carrier, maps })
    }

    /// Convenience constructor from textual encodings: each entry is a group
    /// element string and its list of `(x, h_t(x))` label pairs.
    pub fn from_encoded(
        group: GroupSpec,
        labels: &[&str],
        maps: &[(&str, &[(&str, &str)])],
    ) -> Result<Self, ActionError> {
        let carrier = Arc::new(Carrier::new(labels.iter().copied())?);
        let mut listed = Vec::with_capacity(maps.len());
        for &(t, pairs) in maps {
            let t = group.parse(t)?;
            let pairs = pairs
                .iter()
                .map(|&(x, y)| Ok((carrier.point(x)?, carrier.point(y)?)))
                .collect::<Result<Vec<_>, ActionError>>()?;
            listed.push((t, PartialBijection::new(pairs)?));
        }
        ActionData::new(group, carrier, listed)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    /// `h_t`, if `t` has an entry.
    pub fn map(&self, t: GroupElement) -> Option<&PartialBijection> {
        self.maps.get(&t)
    }

    /// The set `X_t`, the codomain of `h_t`.
    pub fn domain(&self, t: GroupElement) -> BTreeSet<Point> {
        self.maps.get(&t).map(|h| h.codomain()).unwrap_or_default()
    }

    fn source(&self, t: GroupElement) -> BTreeSet<Point> {
        self.maps.get(&t).map(|h| h.domain()).unwrap_or_default()
    }

    fn apply(&self, t: GroupElement, x: Point) -> Option<Point> {
        self.maps.get(&t).and_then(|h| h.apply(x))
    }

    fn closure_set(&self) -> Vec<GroupElement> {
        relevant_elements(&self.group, self.maps.keys().copied())
    }

    fn mul(&self, t: GroupElement, s: GroupElement) -> GroupElement {
        // listed integers are bounded by 2^40, so closure products cannot overflow
        self.group.mul(t, s).expect("bounded group product")
    }

    fn inv(&self, t: GroupElement) -> GroupElement {
        self.group.inv(t).expect("bounded group inverse")
    }
}

/// The listed elements `S` together with `{t^-1 u : t, u in S}`, sorted.
/// Outside this set every domain is empty, so the axioms only need checking
/// on pairs drawn from it. `S` must be closed under inverses and its elements
/// small enough that the products do not overflow.
pub fn relevant_elements(group: &GroupSpec, listed: impl IntoIterator<Item = GroupElement>) -> Vec<GroupElement> {
    let listed: Vec<GroupElement> = listed.into_iter().collect();
    let mut out: BTreeSet<GroupElement> = listed.iter().copied().collect();
    out.insert(group.identity());
    for &t in &listed {
        let ti = group.inv(t).expect("listed elements belong to the group");
        for &u in &listed {
            out.insert(group.mul(ti, u).expect("bounded group product"));
        }
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    /// `X_e = X` and `h_e` is the identity.
    Identity,
    /// `h_t(X_{t^-1} ∩ X_s) = X_t ∩ X_{ts}`.
    Restriction,
    /// `h_t(h_s(x)) = h_{ts}(x)` on `X_{s^-1} ∩ X_{s^-1 t^-1}`.
    Composition,
    /// `h_{t^-1}` is the inverse of `h_t`.
    Inverse,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Identity => "1",
            Axiom::Restriction => "2",
            Axiom::Composition => "3",
            Axiom::Inverse => "inverse",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Point(Point),
    /// The two sides of the restriction axiom.
    Sets { image: BTreeSet<Point>, expected: BTreeSet<Point> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub t: GroupElement,
    pub s: Option<GroupElement>,
    pub witness: Witness,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let lines: Vec<&str> = self.violations.iter().map(|v| v.message.as_str()).collect();
        write!(f, "{}", lines.join("\n"))
    }
}

/// Checks the three partial action axioms plus `h_{t^-1} = h_t^{-1}`.
pub fn validate_partial_action(data: &ActionData) -> ValidationReport {
    let g = &data.group;
    let c = &data.carrier;
    let e = g.identity();
    let fmt_t = |t: GroupElement| g.format(t);
    let mut violations = Vec::new();

    let id = data.map(e).cloned().unwrap_or_default();
    if let Some(x) = c.points().find(|&x| id.apply(x) != Some(x)) {
        violations.push(Violation {
            axiom: Axiom::Identity,
            t: e,
            s: None,
            witness: Witness::Point(x),
            message: format!("axiom 1: h_e is not the identity at {}", c.label(x)),
        });
    }

    for (&t, h) in &data.maps {
        let ti = data.inv(t);
        let hi = data.map(ti).cloned().unwrap_or_default();
        if hi != h.inverse() {
            let x = h
                .pairs()
                .find(|&(x, y)| hi.apply(y) != Some(x))
                .map(|(x, _)| x)
                .or_else(|| hi.pairs().find(|&(_, x)| h.apply(x).is_none()).map(|(_, x)| x))
                .expect("maps differ somewhere");
            violations.push(Violation {
                axiom: Axiom::Inverse,
                t,
                s: None,
                witness: Witness::Point(x),
                message: format!(
                    "inverse: h_{} is not the inverse of h_{} at {}",
                    fmt_t(ti),
                    fmt_t(t),
                    c.label(x)
                ),
            });
        }
    }

    let elements = data.closure_set();
    for &t in &elements {
        for &s in &elements {
            let ts = data.mul(t, s);
            let lhs_dom: BTreeSet<Point> = data.source(t).intersection(&data.domain(s)).copied().collect();
            let image = data.map(t).map(|h| h.image(&lhs_dom)).unwrap_or_default();
            let expected: BTreeSet<Point> = data.domain(t).intersection(&data.domain(ts)).copied().collect();
            if image != expected {
                let message = format!(
                    "axiom 2 at (t,s)=({},{}): h_t(X_t^-1 ∩ X_s) = {} but X_t ∩ X_ts = {}",
                    fmt_t(t),
                    fmt_t(s),
                    c.show(&image),
                    c.show(&expected)
                );
                violations.push(Violation {
                    axiom: Axiom::Restriction,
                    t,
                    s: Some(s),
                    witness: Witness::Sets { image, expected },
                    message,
                });
            }

            let si = data.inv(s);
            let sti = data.inv(ts);
            let region: BTreeSet<Point> = data.domain(si).intersection(&data.domain(sti)).copied().collect();
            let bad = region.into_iter().find(|&x| {
                let lhs = data.apply(s, x).and_then(|y| data.apply(t, y));
                let rhs = data.apply(ts, x);
                lhs.is_none() || lhs != rhs
            });
            if let Some(x) = bad {
                violations.push(Violation {
                    axiom: Axiom::Composition,
                    t,
                    s: Some(s),
                    witness: Witness::Point(x),
                    message: format!(
                        "axiom 3 at (t,s)=({},{}): h_t(h_s(x)) != h_ts(x) for x = {}",
                        fmt_t(t),
                        fmt_t(s),
                        c.label(x)
                    ),
                });
            }
        }
    }
    ValidationReport { violations }
}

/// A partial action that has passed [`validate_partial_action`].
///
/// Entries with empty maps are dropped, so two actions are equal exactly when
/// they have the same group, carrier and nonempty `h_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAction {
    group: GroupSpec,
    carrier: Arc<Carrier>,
    maps: BTreeMap<GroupElement, PartialBijection>,
}

impl PartialAction {
    pub fn new(data: ActionData) -> Result<Self, ValidationReport> {
        let report = validate_partial_action(&data);
        if !report.is_ok() {
            return Err(report);
        }
        let e = data.group.identity();
        let ActionData { group, carrier, mut maps } = data;
        maps.retain(|&t, h| t == e || !h.is_empty());
        Ok(PartialAction { group, carrier, maps })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    /// `h_t`, or `None` when `X_{t^-1}` is empty.
    pub fn map(&self, t: GroupElement) -> Option<&PartialBijection> {
        self.maps.get(&t)
    }

    pub fn apply(&self, t: GroupElement, x: Point) -> Option<Point> {
        self.maps.get(&t).and_then(|h| h.apply(x))
    }

    /// `X_t`.
    pub fn domain(&self, t: GroupElement) -> BTreeSet<Point> {
        self.maps.get(&t).map(|h| h.codomain()).unwrap_or_default()
    }

    /// Elements with nonempty domain, identity first.
    pub fn listed(&self) -> impl Iterator<Item = (GroupElement, &PartialBijection)> {
        self.maps.iter().map(|(&t, h)| (t, h))
    }

    pub fn is_free(&self) -> bool {
        check_free(self) == Freeness::Free
    }

    /// See [`relevant_elements`].
    pub fn relevant_elements(&self) -> Vec<GroupElement> {
        relevant_elements(&self.group, self.maps.keys().copied())
    }

    /// Drops back to unvalidated data, e.g. to build a mutant.
    pub fn to_data(&self) -> ActionData {
        ActionData {
            group: self.group.clone(),
            carrier: self.carrier.clone(),
            maps: self.maps.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Freeness {
    Free,
    /// `h_t(point) = point` with `t != e`.
    NotFree { t: GroupElement, point: Point },
}

pub fn check_free(pa: &PartialAction) -> Freeness {
    let e = pa.group.identity();
    pa.listed()
        .filter(|&(t, _)| t != e)
        .find_map(|(t, h)| h.pairs().find(|&(x, y)| x == y).map(|(x, _)| Freeness::NotFree { t, point: x }))
        .unwrap_or(Freeness::Free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn z() -> GroupSpec {
        GroupSpec::Integers
    }

    #[test]
    fn fixtures_validate() {
        assert!(validate_partial_action(&fixtures::e1_data()).is_ok());
        assert!(validate_partial_action(&fixtures::e2_data()).is_ok());
    }

    #[test]
    fn e2_without_h2_breaks_restriction_axiom() {
        let data = ActionData::from_encoded(z(), &["1", "2", "3"], &[("1", &[("1", "2"), ("2", "3")])]).unwrap();
        let report = validate_partial_action(&data);
        let first = &report.violations[0];
        assert_eq!(first.axiom, Axiom::Restriction);
        assert_eq!((first.t, first.s), (GroupElement::Int(1), Some(GroupElement::Int(1))));
        let c = data.carrier();
        assert_eq!(
            first.witness,
            Witness::Sets { image: [c.point("3").unwrap()].into(), expected: BTreeSet::new() }
        );
        assert!(first.message.starts_with("axiom 2 at (t,s)=(1,1)"), "{}", first.message);
    }

    #[test]
    fn identity_entry_must_be_identity() {
        let g = GroupSpec::cyclic(2).unwrap();
        let data = ActionData::from_encoded(g, &["a", "b"], &[("0", &[("a", "b"), ("b", "a")])]).unwrap();
        let report = validate_partial_action(&data);
        assert_eq!(report.violations[0].axiom, Axiom::Identity);
    }

    #[test]
    fn inconsistent_inverse_listing() {
        let data = ActionData::from_encoded(
            z(),
            &["1", "2", "3"],
            &[("1", &[("1", "2")]), ("-1", &[("3", "2")])],
        )
        .unwrap();
        let report = validate_partial_action(&data);
        assert!(!report.is_ok());
        assert!(report.violations.iter().any(|v| v.axiom == Axiom::Inverse));
    }

    #[test]
    fn z3_rotation_missing_square() {
        // h_1 a full rotation but h_2 empty: axiom 2 fails
        let g = GroupSpec::cyclic(3).unwrap();
        let data = ActionData::from_encoded(
            g,
            &["a", "b", "c"],
            &[("1", &[("a", "b"), ("b", "c"), ("c", "a")]), ("2", &[])],
        )
        .unwrap();
        assert!(!validate_partial_action(&data).is_ok());
    }

    #[test]
    fn composition_axiom_detected() {
        // Z/3 acting globally but h_2 is not h_1 composed with h_1
        let g = GroupSpec::cyclic(3).unwrap();
        let data = ActionData::from_encoded(
            g,
            &["a", "b", "c"],
            &[
                ("1", &[("a", "b"), ("b", "c"), ("c", "a")]),
                ("2", &[("a", "b"), ("b", "c"), ("c", "a")]),
            ],
        )
        .unwrap();
        let report = validate_partial_action(&data);
        assert!(report.violations.iter().any(|v| v.axiom == Axiom::Composition), "{report}");
    }

    #[test]
    fn structural_errors() {
        let g = GroupSpec::cyclic(2).unwrap();
        assert!(ActionData::from_encoded(g.clone(), &["a"], &[("1", &[("a", "z")])]).is_err());
        assert!(ActionData::from_encoded(g.clone(), &["a", "a"], &[]).is_err());
        assert!(ActionData::from_encoded(g.clone(), &["a", "b"], &[("1", &[("a", "b"), ("a", "a")])]).is_err());
        assert!(matches!(
            ActionData::from_encoded(g, &["a"], &[("1", &[]), ("1", &[])]),
            Err(ActionError::DuplicateMap(_))
        ));
        assert!(matches!(
            ActionData::from_encoded(z(), &["a"], &[("1099511627777", &[])]),
            Err(ActionError::ElementOutOfRange(_))
        ));
    }

    #[test]
    fn empty_carrier_is_valid() {
        let data = ActionData::from_encoded(GroupSpec::cyclic(1).unwrap(), &[], &[]).unwrap();
        let pa = PartialAction::new(data).unwrap();
        assert!(pa.carrier().is_empty());
        assert!(pa.is_free());
    }

    #[test]
    fn freeness() {
        assert_eq!(check_free(&fixtures::e1()), Freeness::Free);
        assert_eq!(check_free(&fixtures::e2()), Freeness::Free);
        assert_eq!(check_free(&fixtures::trivial(3)), Freeness::Free);
        let m = fixtures::e1_fixing_c();
        let c = m.carrier().point("c").unwrap();
        assert_eq!(check_free(&m), Freeness::NotFree { t: GroupElement::Residue(1), point: c });
    }

    #[test]
    fn inverse_maps_are_inverse() {
        for pa in [fixtures::e1(), fixtures::e2(), fixtures::e1_fixing_c()] {
            for (t, h) in pa.listed() {
                let ti = pa.group().inv(t).unwrap();
                assert_eq!(pa.map(ti).unwrap(), &h.inverse());
            }
        }
    }

    #[test]
    fn empty_entries_canonicalized() {
        let g = GroupSpec::cyclic(2).unwrap();
        let with_empty = ActionData::from_encoded(g.clone(), &["a"], &[("1", &[])]).unwrap();
        let without = ActionData::from_encoded(g, &["a"], &[]).unwrap();
        assert_eq!(PartialAction::new(with_empty).unwrap(), PartialAction::new(without).unwrap());
    }
}
