//! Random elements for property checks.
//!
//! Supports have size uniform in `0..=n` over the relevant basis, and
//! coefficients are nonzero: `±k/d` with `k, d in {1, 2, 3}` over the
//! rationals, any nonzero residue over a prime field.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::field::{FieldSpec, Scalar};
use crate::function_algebra::{FunAlgElement, InducedAlgebraAction};
use crate::group::GroupElement;
use crate::partial_actions::{Carrier, Point, Relation};
use crate::relation_algebra::RelElement;
use crate::skew_ring::SkewElement;

pub fn nonzero_scalar<R: Rng + ?Sized>(rng: &mut R, field: FieldSpec) -> Scalar {
    match field {
        FieldSpec::Rationals => {
            let num = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
            let den = rng.gen_range(1..=3);
            field.from_ratio(num, den).expect("nonzero denominator")
        }
        FieldSpec::Prime(p) => {
            let k = rng.gen_range(1..p.get());
            field.from_i64(k as i64)
        }
    }
}

/// A random subset of `basis` of uniformly chosen size, in `basis` order.
pub fn subset<R: Rng + ?Sized, T: Copy + Ord>(rng: &mut R, basis: &[T]) -> Vec<T> {
    let k = rng.gen_range(0..=basis.len());
    let mut chosen: Vec<T> = basis.choose_multiple(rng, k).copied().collect();
    chosen.sort();
    chosen
}

pub fn fun_element<R: Rng + ?Sized>(rng: &mut R, carrier: &Arc<Carrier>, field: FieldSpec) -> FunAlgElement {
    let points: Vec<Point> = carrier.points().collect();
    let coeffs: Vec<(Point, Scalar)> = subset(rng, &points).into_iter().map(|x| (x, nonzero_scalar(rng, field))).collect();
    FunAlgElement::from_coeffs(carrier.clone(), field, coeffs).expect("points of the carrier")
}

/// The basis `{δ_x δ_t : x in X_t}` in term order.
pub fn skew_basis(alpha: &InducedAlgebraAction) -> Vec<(GroupElement, Point)> {
    alpha
        .action()
        .listed()
        .flat_map(|(t, h)| h.codomain().into_iter().map(move |x| (t, x)))
        .collect()
}

pub fn skew_element<R: Rng + ?Sized>(rng: &mut R, alpha: &Arc<InducedAlgebraAction>) -> SkewElement {
    let basis = skew_basis(alpha);
    let field = alpha.field();
    let mut terms: BTreeMap<GroupElement, Vec<(Point, Scalar)>> = BTreeMap::new();
    for (t, x) in subset(rng, &basis) {
        terms.entry(t).or_default().push((x, nonzero_scalar(rng, field)));
    }
    let terms = terms.into_iter().map(|(t, cs)| {
        (t, FunAlgElement::from_coeffs(alpha.carrier().clone(), field, cs).expect("points of the carrier"))
    });
    SkewElement::new(alpha.clone(), terms).expect("basis terms lie in their ideals")
}

pub fn rel_element<R: Rng + ?Sized>(rng: &mut R, relation: &Arc<Relation>, field: FieldSpec) -> RelElement {
    let basis: Vec<(Point, Point)> = relation.pairs().collect();
    let coeffs: Vec<((Point, Point), Scalar)> =
        subset(rng, &basis).into_iter().map(|p| (p, nonzero_scalar(rng, field))).collect();
    RelElement::new(relation.clone(), field, coeffs).expect("pairs of the relation")
}
