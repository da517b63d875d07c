//! Small reference actions used by tests, the self-test battery and the docs.
//!
//! * `E1`: `Z/2` on `{a, b, c}` with `h_1` swapping `a` and `b`.
//! * `E2`: `Z` on `{1, 2, 3}` with `h_1 = {1->2, 2->3}` and `h_2 = {1->3}`.

use crate::group::GroupSpec;
use crate::partial_actions::{ActionData, PartialAction};

pub fn e1_data() -> ActionData {
    let g = GroupSpec::cyclic(2).expect("order 2");
    ActionData::from_encoded(g, &["a", "b", "c"], &[("1", &[("a", "b"), ("b", "a")])]).expect("E1 is well formed")
}

pub fn e2_data() -> ActionData {
    ActionData::from_encoded(
        GroupSpec::Integers,
        &["1", "2", "3"],
        &[("1", &[("1", "2"), ("2", "3")]), ("2", &[("1", "3")])],
    )
    .expect("E2 is well formed")
}

/// `E2` with `h_2` (and so `h_-2`) removed. Not a partial action.
pub fn e2_without_h2_data() -> ActionData {
    ActionData::from_encoded(GroupSpec::Integers, &["1", "2", "3"], &[("1", &[("1", "2"), ("2", "3")])])
        .expect("well formed")
}

/// `E1` with `X_1 = {a, b, c}` and `h_1 = (a b)(c)`. Valid but not free.
pub fn e1_fixing_c_data() -> ActionData {
    let g = GroupSpec::cyclic(2).expect("order 2");
    ActionData::from_encoded(g, &["a", "b", "c"], &[("1", &[("a", "b"), ("b", "a"), ("c", "c")])])
        .expect("well formed")
}

pub fn e1() -> PartialAction {
    PartialAction::new(e1_data()).expect("E1 is a partial action")
}

pub fn e2() -> PartialAction {
    PartialAction::new(e2_data()).expect("E2 is a partial action")
}

pub fn e1_fixing_c() -> PartialAction {
    PartialAction::new(e1_fixing_c_data()).expect("a partial action")
}

/// The trivial group acting on `n` points labelled `p0, p1, ...`.
pub fn trivial(n: usize) -> PartialAction {
    let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let data = ActionData::from_encoded(GroupSpec::cyclic(1).expect("order 1"), &refs, &[]).expect("well formed");
    PartialAction::new(data).expect("trivial action")
}
