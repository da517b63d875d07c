//! The convolution algebra `F0(R)` of the orbit relation, the isomorphism
//! `Γ : F0(X) ⋊_α G -> F0(R)`, and the ideals `F0((Z × Z) ∩ R)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::AlgebraError;
use crate::field::{FieldSpec, Scalar};
use crate::function_algebra::{FunAlgElement, InducedAlgebraAction};
use crate::group::GroupElement;
use crate::partial_actions::{
    build_relation, count_invariant_subsets, invariant_closure, witness, ActionError, InvariantSubset, Point, Relation,
};
use crate::skew_ring::SkewElement;
use crate::span::Subspace;

/// A finitely supported function on `R`, stored without zero values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelElement {
    relation: Arc<Relation>,
    field: FieldSpec,
    coeffs: BTreeMap<(Point, Point), Scalar>,
}

fn same_relation(a: &Arc<Relation>, b: &Arc<Relation>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn require_free(r: &Relation) -> Result<(), AlgebraError> {
    if r.is_free() {
        return Ok(());
    }
    let (x, y) = r.pairs().find(|&(x, y)| r.witnesses(x, y).len() > 1).expect("a pair with several witnesses");
    let ws: Vec<String> = r.witnesses(x, y).iter().map(|&t| r.group().format(t)).collect();
    Err(AlgebraError::NotFree(format!(
        "({}, {}) is realized by {}",
        r.carrier().label(x),
        r.carrier().label(y),
        ws.join(" and ")
    )))
}

impl RelElement {
    pub fn zero(relation: Arc<Relation>, field: FieldSpec) -> Self {
        RelElement { relation, field, coeffs: BTreeMap::new() }
    }

    /// Sums repeated pairs and drops zeros. Every pair must lie in `R`.
    pub fn new<I>(relation: Arc<Relation>, field: FieldSpec, coeffs: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = ((Point, Point), Scalar)>,
    {
        let mut out = RelElement::zero(relation, field);
        for ((x, y), k) in coeffs {
            if !out.relation.contains(x, y) {
                let c = out.relation.carrier();
                let name = |p: Point| if c.contains(p) { c.label(p).to_string() } else { format!("#{}", p.0) };
                return Err(AlgebraError::NotInRelation(name(x), name(y)));
            }
            if k.field() != field {
                return Err(crate::field::FieldError::Mismatch(k.field(), field).into());
            }
            out.add_at((x, y), k);
        }
        Ok(out)
    }

    /// `δ_{(x, y)}`.
    pub fn delta(relation: Arc<Relation>, field: FieldSpec, x: Point, y: Point) -> Result<Self, AlgebraError> {
        Self::new(relation, field, [((x, y), field.one())])
    }

    fn add_at(&mut self, p: (Point, Point), k: Scalar) {
        let v = match self.coeffs.remove(&p) {
            Some(old) => &old + &k,
            None => k,
        };
        if !v.is_zero() {
            self.coeffs.insert(p, v);
        }
    }

    pub fn relation(&self) -> &Arc<Relation> {
        &self.relation
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn get(&self, x: Point, y: Point) -> Scalar {
        self.coeffs.get(&(x, y)).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Nonzero coefficients in lexicographic pair order.
    pub fn coeffs(&self) -> impl Iterator<Item = ((Point, Point), &Scalar)> {
        self.coeffs.iter().map(|(&p, k)| (p, k))
    }

    pub fn support(&self) -> BTreeSet<(Point, Point)> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn compatible(&self, other: &Self) -> Result<(), AlgebraError> {
        if !same_relation(&self.relation, &other.relation) {
            return Err(AlgebraError::ContextMismatch);
        }
        if self.field != other.field {
            return Err(crate::field::FieldError::Mismatch(self.field, other.field).into());
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (&p, k) in &other.coeffs {
            out.add_at(p, k.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(&p, k)| (p, -k)).collect();
        RelElement { relation: self.relation.clone(), field: self.field, coeffs }
    }

    pub fn scale(&self, k: &Scalar) -> Result<Self, AlgebraError> {
        if k.field() != self.field {
            return Err(crate::field::FieldError::Mismatch(k.field(), self.field).into());
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&p, v)| (p, v * k))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Ok(RelElement { relation: self.relation.clone(), field: self.field, coeffs })
    }

    /// Coordinates in [`Relation::pairs`] order.
    pub fn to_dense(&self) -> Vec<Scalar> {
        self.relation.pairs().map(|(x, y)| self.get(x, y)).collect()
    }
}

/// `(f ∗ g)(x, z) = Σ_y f(x, y) g(y, z)`.
pub fn rel_convolve(f: &RelElement, g: &RelElement) -> Result<RelElement, AlgebraError> {
    f.compatible(g)?;
    require_free(&f.relation)?;
    let mut by_first: BTreeMap<Point, Vec<(Point, &Scalar)>> = BTreeMap::new();
    for (&(y, z), k) in &g.coeffs {
        by_first.entry(y).or_default().push((z, k));
    }
    let mut out = RelElement::zero(f.relation.clone(), f.field);
    for (&(x, y), a) in &f.coeffs {
        for &(z, b) in by_first.get(&y).map(Vec::as_slice).unwrap_or(&[]) {
            out.add_at((x, z), a * b);
        }
    }
    Ok(out)
}

impl fmt::Display for RelElement {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(out, "0");
        }
        let c = self.relation.carrier();
        for (i, (&(x, y), k)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(out, " + ")?;
            }
            if !k.is_one() {
                write!(out, "({k})·")?;
            }
            write!(out, "δ_({}, {})", c.label(x), c.label(y))?;
        }
        Ok(())
    }
}

/// `Γ(f δ_t) = Σ_x f(x) δ_{(x, h_{t^-1}(x))}` and its inverse, for a free
/// partial action.
#[derive(Debug, Clone)]
pub struct Gamma {
    alpha: Arc<InducedAlgebraAction>,
    relation: Arc<Relation>,
}

impl Gamma {
    pub fn new(alpha: Arc<InducedAlgebraAction>) -> Result<Self, AlgebraError> {
        let relation = Arc::new(build_relation(alpha.action()));
        require_free(&relation)?;
        Ok(Gamma { alpha, relation })
    }

    pub fn alpha(&self) -> &Arc<InducedAlgebraAction> {
        &self.alpha
    }

    pub fn relation(&self) -> &Arc<Relation> {
        &self.relation
    }

    pub fn apply(&self, u: &SkewElement) -> Result<RelElement, AlgebraError> {
        if !(Arc::ptr_eq(u.alpha(), &self.alpha) || **u.alpha() == *self.alpha) {
            return Err(AlgebraError::ContextMismatch);
        }
        let pa = self.alpha.action();
        let g = pa.group();
        let mut coeffs = Vec::new();
        for (t, f) in u.terms() {
            let ti = g.inv(t)?;
            for (x, k) in f.coeffs() {
                let y = pa.apply(ti, x).ok_or_else(|| {
                    AlgebraError::Support(format!("{} is not in X_{}", pa.carrier().label(x), g.format(t)))
                })?;
                coeffs.push(((x, y), k.clone()));
            }
        }
        RelElement::new(self.relation.clone(), self.alpha.field(), coeffs)
    }

    /// The coefficient at `(x, y)` with witness `s` becomes `f(x, y) δ_x` in
    /// the term at `s^-1`.
    pub fn invert(&self, f: &RelElement) -> Result<SkewElement, AlgebraError> {
        if !same_relation(f.relation(), &self.relation) {
            return Err(AlgebraError::ContextMismatch);
        }
        let g = self.alpha.group();
        let c = self.alpha.carrier();
        let mut terms: BTreeMap<GroupElement, Vec<(Point, Scalar)>> = BTreeMap::new();
        for ((x, y), k) in f.coeffs() {
            let s = witness(&self.relation, x, y).map_err(|e| match e {
                ActionError::NotFree(m) => AlgebraError::NotFree(m),
                other => other.into(),
            })?;
            terms.entry(g.inv(s)?).or_default().push((x, k.clone()));
        }
        let terms = terms
            .into_iter()
            .map(|(t, cs)| Ok((t, FunAlgElement::from_coeffs(c.clone(), f.field(), cs)?)))
            .collect::<Result<Vec<_>, AlgebraError>>()?;
        SkewElement::new(self.alpha.clone(), terms)
    }
}

pub fn gamma(map: &Gamma, u: &SkewElement) -> Result<RelElement, AlgebraError> {
    map.apply(u)
}

pub fn gamma_inv(map: &Gamma, f: &RelElement) -> Result<SkewElement, AlgebraError> {
    map.invert(f)
}

/// The ideal `F0((Z × Z) ∩ R)` of an invariant set `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelIdeal {
    pub invariant: InvariantSubset,
    /// `(Z × Z) ∩ R` in lexicographic order.
    pub basis: Vec<(Point, Point)>,
}

impl RelIdeal {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// The span of the basis in the coordinates of [`RelElement::to_dense`].
    pub fn span(&self, relation: &Relation, field: FieldSpec) -> Subspace {
        Subspace::spanned_by(
            field,
            relation.len(),
            self.basis.iter().map(|&(x, y)| unit_vector(relation, field, x, y)),
        )
    }
}

fn unit_vector(relation: &Relation, field: FieldSpec, x: Point, y: Point) -> Vec<Scalar> {
    let mut v = vec![field.zero(); relation.len()];
    v[relation.position(x, y).expect("pair of the relation")] = field.one();
    v
}

/// Builds `F0((Z × Z) ∩ R)` and checks that it absorbs convolution by every
/// `δ_{(x, y)}` on both sides.
pub fn ideal_from_invariant(relation: &Arc<Relation>, z: &InvariantSubset) -> Result<RelIdeal, AlgebraError> {
    let z = InvariantSubset::new(relation, z.members.clone())?;
    let basis: Vec<(Point, Point)> = relation.pairs().filter(|&(x, y)| z.contains(x) && z.contains(y)).collect();
    let inside: BTreeSet<(Point, Point)> = basis.iter().copied().collect();
    let field = FieldSpec::Rationals;
    for &(x, y) in &basis {
        let b = RelElement::delta(relation.clone(), field, x, y)?;
        for (p, q) in relation.pairs() {
            let d = RelElement::delta(relation.clone(), field, p, q)?;
            for product in [rel_convolve(&d, &b)?, rel_convolve(&b, &d)?] {
                if !product.support().is_subset(&inside) {
                    return Err(AlgebraError::Invalid("(Z × Z) ∩ R is not closed under convolution".into()));
                }
            }
        }
    }
    Ok(RelIdeal { invariant: z, basis })
}

/// The invariant set of the ideal generated by `f`: the closure of the first
/// coordinates of its support.
pub fn ideal_closure_of(f: &RelElement) -> Result<InvariantSubset, AlgebraError> {
    let seed: BTreeSet<Point> = f.coeffs.keys().map(|&(x, _)| x).collect();
    Ok(invariant_closure(&f.relation, &seed)?)
}

pub fn ideal_membership(g: &RelElement, ideal: &RelIdeal) -> Result<bool, AlgebraError> {
    let z = &ideal.invariant;
    Ok(g.coeffs.keys().all(|&(x, y)| z.contains(x) && z.contains(y)))
}

/// The smallest subspace containing `generators` and closed under
/// convolution by every `δ_{(x, y)}` on either side, found by exact row
/// reduction until the dimension stops growing.
pub fn brute_force_ideal_span(
    relation: &Arc<Relation>,
    field: FieldSpec,
    generators: &[RelElement],
) -> Result<Subspace, AlgebraError> {
    require_free(relation)?;
    let units: Vec<RelElement> = relation
        .pairs()
        .map(|(x, y)| RelElement::delta(relation.clone(), field, x, y))
        .collect::<Result<_, _>>()?;
    let mut span = Subspace::zero(field, relation.len());
    let mut frontier: Vec<RelElement> = generators.to_vec();
    while let Some(f) = frontier.pop() {
        if !same_relation(f.relation(), relation) {
            return Err(AlgebraError::ContextMismatch);
        }
        if span.insert(f.to_dense()) {
            for d in &units {
                frontier.push(rel_convolve(d, &f)?);
                frontier.push(rel_convolve(&f, d)?);
            }
        }
    }
    Ok(span)
}

/// `2^k` for `k` equivalence classes.
pub fn count_ideals(relation: &Relation) -> Result<BigUint, AlgebraError> {
    Ok(count_invariant_subsets(relation)?)
}
