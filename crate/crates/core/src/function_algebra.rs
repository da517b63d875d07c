//! The algebra `F0(X)` of finitely supported functions with pointwise
//! operations, and the dictionary between set-level and algebra-level data:
//! points and evaluation homomorphisms, bijections and isomorphisms, subsets
//! and ideals, partial actions on `X` and partial actions on `F0(X)`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::AlgebraError;
use crate::field::{FieldSpec, Scalar};
use crate::group::{GroupElement, GroupSpec};
use crate::partial_actions::{ActionData, Carrier, PartialAction, PartialBijection, Point};

/// A finitely supported function `X -> K`, stored without zero values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunAlgElement {
    carrier: Arc<Carrier>,
    field: FieldSpec,
    coeffs: BTreeMap<Point, Scalar>,
}

pub(crate) fn same_carrier(a: &Arc<Carrier>, b: &Arc<Carrier>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl FunAlgElement {
    pub fn zero(carrier: Arc<Carrier>, field: FieldSpec) -> Self {
        FunAlgElement { carrier, field, coeffs: BTreeMap::new() }
    }

    /// The indicator `δ_x`.
    pub fn delta(carrier: Arc<Carrier>, field: FieldSpec, x: Point) -> Result<Self, AlgebraError> {
        carrier.check(x)?;
        let coeffs = BTreeMap::from([(x, field.one())]);
        Ok(FunAlgElement { carrier, field, coeffs })
    }

    /// The indicator of a point set.
    pub fn indicator(carrier: Arc<Carrier>, field: FieldSpec, set: &BTreeSet<Point>) -> Result<Self, AlgebraError> {
        Self::from_coeffs(carrier, field, set.iter().map(|&x| (x, field.one())))
    }

    /// Sums repeated points and drops zeros.
    pub fn from_coeffs<I>(carrier: Arc<Carrier>, field: FieldSpec, coeffs: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Point, Scalar)>,
    {
        let mut out: BTreeMap<Point, Scalar> = BTreeMap::new();
        for (x, k) in coeffs {
            carrier.check(x)?;
            if k.field() != field {
                return Err(crate::field::FieldError::Mismatch(k.field(), field).into());
            }
            let v = match out.remove(&x) {
                Some(old) => &old + &k,
                None => k,
            };
            if !v.is_zero() {
                out.insert(x, v);
            }
        }
        Ok(FunAlgElement { carrier, field, coeffs: out })
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn get(&self, x: Point) -> Scalar {
        self.coeffs.get(&x).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (Point, &Scalar)> {
        self.coeffs.iter().map(|(&x, k)| (x, k))
    }

    pub fn support(&self) -> BTreeSet<Point> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn compatible(&self, other: &Self) -> Result<(), AlgebraError> {
        if !same_carrier(&self.carrier, &other.carrier) {
            return Err(AlgebraError::CarrierMismatch);
        }
        if self.field != other.field {
            return Err(crate::field::FieldError::Mismatch(self.field, other.field).into());
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.compatible(other)?;
        let mut coeffs = self.coeffs.clone();
        for (&x, k) in &other.coeffs {
            let v = match coeffs.remove(&x) {
                Some(old) => &old + k,
                None => k.clone(),
            };
            if !v.is_zero() {
                coeffs.insert(x, v);
            }
        }
        Ok(FunAlgElement { carrier: self.carrier.clone(), field: self.field, coeffs })
    }

    pub fn scale(&self, k: &Scalar) -> Result<Self, AlgebraError> {
        if k.field() != self.field {
            return Err(crate::field::FieldError::Mismatch(k.field(), self.field).into());
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&x, v)| (x, v * k))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Ok(FunAlgElement { carrier: self.carrier.clone(), field: self.field, coeffs })
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(&x, v)| (x, -v)).collect();
        FunAlgElement { carrier: self.carrier.clone(), field: self.field, coeffs }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .filter_map(|(x, a)| other.coeffs.get(x).map(|b| (*x, a * b)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Ok(FunAlgElement { carrier: self.carrier.clone(), field: self.field, coeffs })
    }

    /// Restriction of supports: true iff `f` lies in `F0(set)`.
    pub fn supported_in(&self, set: &BTreeSet<Point>) -> bool {
        self.coeffs.keys().all(|x| set.contains(x))
    }

    /// Dense coefficient vector in carrier order.
    pub fn to_dense(&self) -> Vec<Scalar> {
        self.carrier.points().map(|x| self.get(x)).collect()
    }
}

pub enum FaOperand<'a> {
    Element(&'a FunAlgElement),
    Scalar(&'a Scalar),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaOp {
    Add,
    Scale,
    Mul,
}

pub fn fa_arith(op: FaOp, f: &FunAlgElement, arg: FaOperand<'_>) -> Result<FunAlgElement, AlgebraError> {
    match (op, arg) {
        (FaOp::Add, FaOperand::Element(g)) => f.add(g),
        (FaOp::Mul, FaOperand::Element(g)) => f.mul(g),
        (FaOp::Scale, FaOperand::Scalar(k)) => f.scale(k),
        (op, _) => Err(AlgebraError::Invalid(format!("wrong operand kind for {op:?}"))),
    }
}

/// Why a functional is not an algebra homomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplicativityWitness {
    /// `x != y` with `φ(δ_x) φ(δ_y) != 0` although `δ_x δ_y = 0`.
    Pair(Point, Point),
    /// `φ(δ_x)^2 != φ(δ_x)`.
    NotIdempotent(Point),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomClassification {
    Zero,
    Evaluation(Point),
    NotMultiplicative(MultiplicativityWitness),
}

/// Classifies the linear functional with values `φ(δ_x)` given by `values`.
///
/// Witnesses are the least offending points in carrier order: two nonzero
/// values give a `Pair`, a single nonzero value other than 1 gives
/// `NotIdempotent`.
pub fn classify_linear_functional(values: &FunAlgElement) -> HomClassification {
    let mut nonzero = values.coeffs();
    match (nonzero.next(), nonzero.next()) {
        (None, _) => HomClassification::Zero,
        (Some((x, _)), Some((y, _))) => HomClassification::NotMultiplicative(MultiplicativityWitness::Pair(x, y)),
        (Some((x, v)), None) => {
            if (v * v) == *v {
                HomClassification::Evaluation(x)
            } else {
                HomClassification::NotMultiplicative(MultiplicativityWitness::NotIdempotent(x))
            }
        }
    }
}

/// A bijection `h` from a subset of one carrier onto a subset of another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bijection {
    source: Arc<Carrier>,
    target: Arc<Carrier>,
    map: PartialBijection,
}

impl Bijection {
    /// `map` viewed as a bijection from its domain onto its codomain.
    pub fn new(source: Arc<Carrier>, target: Arc<Carrier>, map: PartialBijection) -> Result<Self, AlgebraError> {
        for (x, y) in map.pairs() {
            source.check(x)?;
            target.check(y)?;
        }
        Ok(Bijection { source, target, map })
    }

    /// Requires `map` to be defined on all of `source` and onto all of `target`.
    pub fn total(source: Arc<Carrier>, target: Arc<Carrier>, map: PartialBijection) -> Result<Self, AlgebraError> {
        if map.len() != source.len() || map.len() != target.len() {
            return Err(AlgebraError::NotBijective(format!(
                "{} pairs between sets of size {} and {}",
                map.len(),
                source.len(),
                target.len()
            )));
        }
        Self::new(source, target, map)
    }

    pub fn map(&self) -> &PartialBijection {
        &self.map
    }

    pub fn source(&self) -> &Arc<Carrier> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Carrier> {
        &self.target
    }
}

/// A linear map `F0(A) -> F0(B)` for `A` a subset of the source carrier and
/// `B` of the target carrier, given by the images of the basis `δ_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMapOnBasis {
    source: Arc<Carrier>,
    source_support: BTreeSet<Point>,
    target: Arc<Carrier>,
    target_support: BTreeSet<Point>,
    field: FieldSpec,
    columns: BTreeMap<Point, FunAlgElement>,
}

impl LinearMapOnBasis {
    pub fn new(
        source: Arc<Carrier>,
        source_support: BTreeSet<Point>,
        target: Arc<Carrier>,
        target_support: BTreeSet<Point>,
        field: FieldSpec,
        columns: BTreeMap<Point, FunAlgElement>,
    ) -> Result<Self, AlgebraError> {
        for &p in &source_support {
            source.check(p)?;
        }
        for &p in &target_support {
            target.check(p)?;
        }
        if columns.keys().copied().collect::<BTreeSet<_>>() != source_support {
            return Err(AlgebraError::Invalid("columns must be given for exactly the source basis".into()));
        }
        for (y, col) in &columns {
            if !same_carrier(col.carrier(), &target) || col.field() != field {
                return Err(AlgebraError::CarrierMismatch);
            }
            if !col.supported_in(&target_support) {
                return Err(AlgebraError::Support(format!(
                    "image of δ_{} leaves the target ideal",
                    source.label(*y)
                )));
            }
        }
        Ok(LinearMapOnBasis { source, source_support, target, target_support, field, columns })
    }

    pub fn identity(carrier: Arc<Carrier>, field: FieldSpec, support: BTreeSet<Point>) -> Self {
        let columns = support
            .iter()
            .map(|&x| (x, FunAlgElement::delta(carrier.clone(), field, x).expect("point in carrier")))
            .collect();
        LinearMapOnBasis {
            source: carrier.clone(),
            source_support: support.clone(),
            target: carrier,
            target_support: support,
            field,
            columns,
        }
    }

    pub fn source_support(&self) -> &BTreeSet<Point> {
        &self.source_support
    }

    pub fn target_support(&self) -> &BTreeSet<Point> {
        &self.target_support
    }

    pub fn column(&self, y: Point) -> Option<&FunAlgElement> {
        self.columns.get(&y)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn apply(&self, f: &FunAlgElement) -> Result<FunAlgElement, AlgebraError> {
        if !same_carrier(f.carrier(), &self.source) {
            return Err(AlgebraError::CarrierMismatch);
        }
        if !f.supported_in(&self.source_support) {
            return Err(AlgebraError::Support("argument outside the source ideal".into()));
        }
        let mut out = FunAlgElement::zero(self.target.clone(), self.field);
        for (y, k) in f.coeffs() {
            out = out.add(&self.columns[&y].scale(k)?)?;
        }
        Ok(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMapOnBasis) -> Result<LinearMapOnBasis, AlgebraError> {
        if !same_carrier(&other.target, &self.source) {
            return Err(AlgebraError::CarrierMismatch);
        }
        let columns = other
            .columns
            .iter()
            .map(|(&y, col)| Ok((y, self.apply(col)?)))
            .collect::<Result<BTreeMap<_, _>, AlgebraError>>()?;
        LinearMapOnBasis::new(
            other.source.clone(),
            other.source_support.clone(),
            self.target.clone(),
            self.target_support.clone(),
            self.field,
            columns,
        )
    }

    /// Multiplies every column by `k`.
    pub fn scaled(&self, k: &Scalar) -> Result<LinearMapOnBasis, AlgebraError> {
        let columns = self
            .columns
            .iter()
            .map(|(&y, c)| Ok((y, c.scale(k)?)))
            .collect::<Result<BTreeMap<_, _>, AlgebraError>>()?;
        Ok(LinearMapOnBasis { columns, ..self.clone() })
    }
}

/// `ψ_h : F0(Y) -> F0(X)`, `f ↦ f ∘ h`, for `h : X -> Y`. On the basis,
/// `ψ_h(δ_y) = δ_{h^-1(y)}`.
pub fn psi_from_bijection(h: &Bijection, field: FieldSpec) -> LinearMapOnBasis {
    let columns = h
        .map
        .pairs()
        .map(|(x, y)| (y, FunAlgElement::delta(h.source.clone(), field, x).expect("checked point")))
        .collect();
    LinearMapOnBasis {
        source: h.target.clone(),
        source_support: h.map.codomain(),
        target: h.source.clone(),
        target_support: h.map.domain(),
        field,
        columns,
    }
}

/// Recovers the unique `h` with `γ = ψ_h` from an isomorphism
/// `γ : F0(Y) -> F0(X)` by classifying each `ε_x ∘ γ`.
pub fn bijection_from_isomorphism(gamma: &LinearMapOnBasis) -> Result<Bijection, AlgebraError> {
    let mut pairs = Vec::with_capacity(gamma.target_support.len());
    for &x in &gamma.target_support {
        let values = FunAlgElement::from_coeffs(
            gamma.source.clone(),
            gamma.field,
            gamma.columns.iter().map(|(&y, col)| (y, col.get(x))),
        )?;
        match classify_linear_functional(&values) {
            HomClassification::Evaluation(y) => pairs.push((x, y)),
            HomClassification::Zero => {
                return Err(AlgebraError::NotMultiplicative(format!(
                    "ε_{} ∘ γ is zero",
                    gamma.target.label(x)
                )))
            }
            HomClassification::NotMultiplicative(w) => {
                let detail = match w {
                    MultiplicativityWitness::Pair(a, b) => format!(
                        "ε_{} ∘ γ is nonzero on both δ_{} and δ_{}",
                        gamma.target.label(x),
                        gamma.source.label(a),
                        gamma.source.label(b)
                    ),
                    MultiplicativityWitness::NotIdempotent(a) => format!(
                        "ε_{} ∘ γ takes δ_{} to {}, which is not idempotent",
                        gamma.target.label(x),
                        gamma.source.label(a),
                        values.get(a)
                    ),
                };
                return Err(AlgebraError::NotMultiplicative(detail));
            }
        }
    }
    let map = PartialBijection::new(pairs)
        .map_err(|_| AlgebraError::NotBijective("two points evaluate at the same point".into()))?;
    if map.codomain() != gamma.source_support {
        return Err(AlgebraError::NotBijective("some basis vector is never evaluated".into()));
    }
    let h = Bijection::new(gamma.target.clone(), gamma.source.clone(), map)?;
    if psi_from_bijection(&h, gamma.field) != *gamma {
        return Err(AlgebraError::NotMultiplicative("γ differs from ψ_h on some column".into()));
    }
    Ok(h)
}

/// The set `A` with `(generators) = F0(A)`: every point where some generator
/// is nonzero.
pub fn subset_of_ideal(generators: &[FunAlgElement]) -> BTreeSet<Point> {
    generators.iter().flat_map(|f| f.coeffs.keys().copied()).collect()
}

/// The partial action `α` on `F0(X)` arising from a partial action on `X`:
/// `D_t = F0(X_t)` and `α_t(f) = f ∘ h_{t^-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedAlgebraAction {
    action: Arc<PartialAction>,
    field: FieldSpec,
}

pub fn induce_algebra_action(theta: Arc<PartialAction>, field: FieldSpec) -> Result<InducedAlgebraAction, AlgebraError> {
    let alpha = InducedAlgebraAction { action: theta, field };
    alpha.check_axioms()?;
    Ok(alpha)
}

impl InducedAlgebraAction {
    pub fn action(&self) -> &Arc<PartialAction> {
        &self.action
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        self.action.carrier()
    }

    pub fn group(&self) -> &GroupSpec {
        self.action.group()
    }

    /// Support set `X_t` of the ideal `D_t`.
    pub fn ideal(&self, t: GroupElement) -> BTreeSet<Point> {
        self.action.domain(t)
    }

    pub fn apply(&self, t: GroupElement, f: &FunAlgElement) -> Result<FunAlgElement, AlgebraError> {
        apply_alpha(self, t, f)
    }

    /// `α_t` as a map `F0(X_{t^-1}) -> F0(X_t)`.
    pub fn alpha_map(&self, t: GroupElement) -> Result<LinearMapOnBasis, AlgebraError> {
        let ti = self.group().inv(t)?;
        let source = self.ideal(ti);
        let columns = source
            .iter()
            .map(|&y| {
                let d = FunAlgElement::delta(self.carrier().clone(), self.field, y)?;
                Ok((y, self.apply(t, &d)?))
            })
            .collect::<Result<BTreeMap<_, _>, AlgebraError>>()?;
        LinearMapOnBasis::new(self.carrier().clone(), source, self.carrier().clone(), self.ideal(t), self.field, columns)
    }

    /// The data `({D_t}, {α_t})` for every `t` with nonzero ideal, with each
    /// `D_t` presented by the generators `δ_x`, `x in X_t`.
    pub fn to_family(&self) -> Result<AlgebraActionFamily, AlgebraError> {
        let mut ideals = BTreeMap::new();
        let mut maps = BTreeMap::new();
        for (t, _) in self.action.listed() {
            let gens = self
                .ideal(t)
                .iter()
                .map(|&x| FunAlgElement::delta(self.carrier().clone(), self.field, x))
                .collect::<Result<Vec<_>, _>>()?;
            ideals.insert(t, gens);
            maps.insert(t, self.alpha_map(t)?);
        }
        Ok(AlgebraActionFamily {
            group: self.group().clone(),
            carrier: self.carrier().clone(),
            field: self.field,
            ideals,
            maps,
        })
    }

    /// Checks the algebra-level axioms on basis vectors: `D_e = F0(X)` with
    /// `α_e = id`, `α_t(D_{t^-1} ∩ D_s) = D_t ∩ D_{ts}`, and
    /// `α_t ∘ α_s = α_{ts}` on `D_{s^-1} ∩ D_{s^-1 t^-1}`.
    pub fn check_axioms(&self) -> Result<(), AlgebraError> {
        let g = self.group();
        let c = self.carrier().clone();
        let e = g.identity();
        let delta = |x: Point| FunAlgElement::delta(c.clone(), self.field, x);
        if self.ideal(e) != c.all() {
            return Err(AlgebraError::Invalid("D_e is not F0(X)".into()));
        }
        for x in c.points() {
            if self.apply(e, &delta(x)?)? != delta(x)? {
                return Err(AlgebraError::Invalid("α_e is not the identity".into()));
            }
        }
        let elements = self.action.relevant_elements();
        for &t in &elements {
            let ti = g.inv(t)?;
            for &s in &elements {
                let ts = g.mul(t, s)?;
                let meet: BTreeSet<Point> = self.ideal(ti).intersection(&self.ideal(s)).copied().collect();
                let mut image = BTreeSet::new();
                for &x in &meet {
                    let img = self.apply(t, &delta(x)?)?;
                    let supp = img.support();
                    if supp.len() != 1 {
                        return Err(AlgebraError::Invalid("α_t does not map basis to basis".into()));
                    }
                    image.extend(supp);
                }
                let expected: BTreeSet<Point> = self.ideal(t).intersection(&self.ideal(ts)).copied().collect();
                if image != expected {
                    return Err(AlgebraError::Invalid(format!(
                        "α_{}(D_t^-1 ∩ D_s) != D_t ∩ D_ts for s = {}",
                        g.format(t),
                        g.format(s)
                    )));
                }
                let si = g.inv(s)?;
                let region: BTreeSet<Point> = self.ideal(si).intersection(&self.ideal(g.inv(ts)?)).copied().collect();
                for &x in &region {
                    let d = delta(x)?;
                    let lhs = self.apply(t, &self.apply(s, &d)?)?;
                    if lhs != self.apply(ts, &d)? {
                        return Err(AlgebraError::Invalid(format!(
                            "α_t α_s != α_ts at (t,s)=({},{})",
                            g.format(t),
                            g.format(s)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `α_t(f) = f ∘ h_{t^-1}`, defined for `f` in `D_{t^-1}`.
pub fn apply_alpha(alpha: &InducedAlgebraAction, t: GroupElement, f: &FunAlgElement) -> Result<FunAlgElement, AlgebraError> {
    if !same_carrier(f.carrier(), alpha.carrier()) {
        return Err(AlgebraError::CarrierMismatch);
    }
    if f.field() != alpha.field {
        return Err(crate::field::FieldError::Mismatch(f.field(), alpha.field).into());
    }
    let g = alpha.group();
    let ti = g.inv(t)?;
    let source = alpha.ideal(ti);
    if let Some(x) = f.coeffs.keys().find(|x| !source.contains(x)) {
        return Err(AlgebraError::Support(format!(
            "{} is not in X_{}, so f is not in D_{}",
            alpha.carrier().label(*x),
            g.format(ti),
            g.format(ti)
        )));
    }
    let h_inv = alpha.action.map(ti);
    let coeffs = alpha
        .ideal(t)
        .into_iter()
        .filter_map(|x| {
            let y = h_inv.and_then(|h| h.apply(x)).expect("h_{t^-1} maps X_t onto X_{t^-1}");
            f.coeffs.get(&y).map(|k| (x, k.clone()))
        })
        .collect();
    Ok(FunAlgElement { carrier: f.carrier.clone(), field: f.field, coeffs })
}

/// A partial action on `F0(X)` given as raw data: each ideal `D_t` by a list
/// of generators and each `α_t : D_{t^-1} -> D_t` on basis vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraActionFamily {
    pub group: GroupSpec,
    pub carrier: Arc<Carrier>,
    pub field: FieldSpec,
    pub ideals: BTreeMap<GroupElement, Vec<FunAlgElement>>,
    pub maps: BTreeMap<GroupElement, LinearMapOnBasis>,
}

/// Finds the set-level partial action from which `family` arises: `X_t` from
/// the ideal generators and `h_{t^-1}` as the bijection with
/// `α_t = ψ_{h_{t^-1}}`.
pub fn recover_set_action(family: &AlgebraActionFamily) -> Result<PartialAction, AlgebraError> {
    let g = &family.group;
    let supports: BTreeMap<GroupElement, BTreeSet<Point>> =
        family.ideals.iter().map(|(&t, gens)| (t, subset_of_ideal(gens))).collect();
    let support = |t: GroupElement| supports.get(&t).cloned().unwrap_or_default();

    let mut listed = Vec::new();
    for (&t, alpha_t) in &family.maps {
        let ti = g.inv(t)?;
        if alpha_t.source_support != support(ti) || alpha_t.target_support != support(t) {
            return Err(AlgebraError::Invalid(format!(
                "α_{} is not a map D_{} -> D_{}",
                g.format(t),
                g.format(ti),
                g.format(t)
            )));
        }
        let h = bijection_from_isomorphism(alpha_t)?;
        listed.push((ti, h.map.clone()));
    }
    for (&t, set) in &supports {
        let ti = g.inv(t)?;
        if !set.is_empty() && !family.maps.contains_key(&ti) {
            return Err(AlgebraError::Invalid(format!(
                "D_{} is nonzero but α_{} is missing",
                g.format(t),
                g.format(ti)
            )));
        }
    }
    let data = ActionData::new(g.clone(), family.carrier.clone(), listed)?;
    let theta = PartialAction::new(data)
        .map_err(|report| AlgebraError::Invalid(format!("recovered family is not a partial action: {report}")))?;

    let induced = InducedAlgebraAction { action: Arc::new(theta.clone()), field: family.field };
    for (&t, alpha_t) in &family.maps {
        if alpha_t.source_support.is_empty() && alpha_t.target_support.is_empty() {
            continue;
        }
        if induced.alpha_map(t)? != *alpha_t {
            return Err(AlgebraError::Invalid(format!("α_{} is not reproduced", g.format(t))));
        }
    }
    Ok(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::span::Subspace;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn abc() -> Arc<Carrier> {
        Arc::new(Carrier::new(["a", "b", "c"]).unwrap())
    }

    fn el(c: &Arc<Carrier>, f: FieldSpec, pairs: &[(&str, i64)]) -> FunAlgElement {
        FunAlgElement::from_coeffs(c.clone(), f, pairs.iter().map(|&(l, k)| (c.point(l).unwrap(), f.from_i64(k)))).unwrap()
    }

    #[test]
    fn pointwise_arithmetic() {
        let c = abc();
        let da = el(&c, q(), &[("a", 1)]);
        let db = el(&c, q(), &[("b", 1)]);
        assert!(fa_arith(FaOp::Mul, &da, FaOperand::Element(&db)).unwrap().is_zero());
        assert_eq!(fa_arith(FaOp::Mul, &da, FaOperand::Element(&da)).unwrap(), da);
        let lhs = el(&c, q(), &[("a", 2), ("c", 1)]);
        let sum = fa_arith(FaOp::Add, &lhs, FaOperand::Element(&el(&c, q(), &[("a", 3)]))).unwrap();
        assert_eq!(sum, el(&c, q(), &[("a", 5), ("c", 1)]));
        let zero = fa_arith(FaOp::Scale, &lhs, FaOperand::Scalar(&q().zero())).unwrap();
        assert!(zero.is_zero());
        assert!(fa_arith(FaOp::Scale, &lhs, FaOperand::Element(&da)).is_err());
    }

    #[test]
    fn mismatches() {
        let c = abc();
        let other = Arc::new(Carrier::new(["x"]).unwrap());
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(el(&c, q(), &[("a", 1)]).add(&el(&other, q(), &[("x", 1)])), Err(AlgebraError::CarrierMismatch));
        assert!(el(&c, q(), &[("a", 1)]).mul(&el(&c, f5, &[("a", 1)])).is_err());
    }

    #[test]
    fn classification_examples() {
        let c = abc();
        assert_eq!(
            classify_linear_functional(&el(&c, q(), &[("a", 1)])),
            HomClassification::Evaluation(Point(0))
        );
        assert_eq!(
            classify_linear_functional(&el(&c, q(), &[("a", 1), ("b", 1), ("c", 1)])),
            HomClassification::NotMultiplicative(MultiplicativityWitness::Pair(Point(0), Point(1)))
        );
        assert_eq!(
            classify_linear_functional(&el(&c, q(), &[("a", 2)])),
            HomClassification::NotMultiplicative(MultiplicativityWitness::NotIdempotent(Point(0)))
        );
        assert_eq!(classify_linear_functional(&FunAlgElement::zero(c, q())), HomClassification::Zero);
    }

    /// Evaluates a functional on `f` by linearity.
    fn eval(phi: &FunAlgElement, f: &FunAlgElement) -> Scalar {
        f.coeffs().fold(phi.field().zero(), |acc, (x, k)| &acc + &(k * &phi.get(x)))
    }

    #[test]
    fn classification_agrees_with_brute_force_multiplicativity() {
        // over GF(3) on 3 points there are 27 functionals; a functional is a
        // homomorphism iff φ(fg) = φ(f)φ(g) for all f, g, checked on all 27^2 pairs
        let c = abc();
        let f3 = FieldSpec::prime(3).unwrap();
        let all: Vec<FunAlgElement> = (0..27)
            .map(|n: i64| {
                FunAlgElement::from_coeffs(c.clone(), f3, (0..3).map(|i| (Point(i), f3.from_i64(n / 3i64.pow(i as u32) % 3)))).unwrap()
            })
            .collect();
        for phi in &all {
            let hom = all.iter().all(|f| all.iter().all(|g| eval(phi, &f.mul(g).unwrap()) == &eval(phi, f) * &eval(phi, g)));
            let class = classify_linear_functional(phi);
            match class {
                HomClassification::Zero => assert!(phi.is_zero()),
                HomClassification::Evaluation(x) => {
                    assert!(hom);
                    assert_eq!(*phi, FunAlgElement::delta(c.clone(), f3, x).unwrap());
                }
                HomClassification::NotMultiplicative(w) => {
                    assert!(!hom);
                    match w {
                        MultiplicativityWitness::Pair(x, y) => {
                            assert_ne!(x, y);
                            assert!(!(&phi.get(x) * &phi.get(y)).is_zero());
                        }
                        MultiplicativityWitness::NotIdempotent(x) => {
                            assert_ne!(&phi.get(x) * &phi.get(x), phi.get(x));
                        }
                    }
                }
            }
        }
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn bij(c: &Arc<Carrier>, p: &[usize]) -> Bijection {
        let map = PartialBijection::new(p.iter().enumerate().map(|(i, &j)| (Point(i), Point(j)))).unwrap();
        Bijection::total(c.clone(), c.clone(), map).unwrap()
    }

    #[test]
    fn psi_examples() {
        let c = abc();
        let id = bij(&c, &[0, 1, 2]);
        assert_eq!(psi_from_bijection(&id, q()), LinearMapOnBasis::identity(c.clone(), q(), c.all()));
        let swap = bij(&c, &[1, 0, 2]);
        let psi = psi_from_bijection(&swap, q());
        assert_eq!(psi.apply(&el(&c, q(), &[("a", 1)])).unwrap(), el(&c, q(), &[("b", 1)]));
    }

    #[test]
    fn psi_is_contravariant_and_invertible_on_s3() {
        let c = abc();
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        let probes: Vec<FunAlgElement> = vec![el(&c, q(), &[("a", 2), ("b", -1)]), el(&c, q(), &[("b", 3), ("c", 5)])];
        for p in &perms {
            let h = bij(&c, p);
            let psi_h = psi_from_bijection(&h, q());
            assert_eq!(bijection_from_isomorphism(&psi_h).unwrap(), h);
            for f in &probes {
                for g in &probes {
                    // multiplicative
                    assert_eq!(psi_h.apply(&f.mul(g).unwrap()).unwrap(), psi_h.apply(f).unwrap().mul(&psi_h.apply(g).unwrap()).unwrap());
                }
            }
            for r in &perms {
                let g = bij(&c, r);
                // g ∘ h as x ↦ g(h(x))
                let gh: Vec<usize> = p.iter().map(|&i| r[i]).collect();
                let lhs = psi_h.compose(&psi_from_bijection(&g, q())).unwrap();
                assert_eq!(lhs, psi_from_bijection(&bij(&c, &gh), q()));
            }
        }
    }

    #[test]
    fn isomorphism_examples() {
        let c = abc();
        let id = LinearMapOnBasis::identity(c.clone(), q(), c.all());
        assert_eq!(bijection_from_isomorphism(&id).unwrap(), bij(&c, &[0, 1, 2]));
        let swap = psi_from_bijection(&bij(&c, &[1, 0, 2]), q());
        assert_eq!(bijection_from_isomorphism(&swap).unwrap().map().apply(Point(0)), Some(Point(1)));
        let doubled = id.scaled(&q().from_i64(2)).unwrap();
        assert!(matches!(bijection_from_isomorphism(&doubled), Err(AlgebraError::NotMultiplicative(_))));
        // projection onto δ_a is multiplicative on columns it hits but not bijective
        let mut cols = BTreeMap::new();
        for x in c.points() {
            cols.insert(x, el(&c, q(), &[("a", 1)]));
        }
        let collapse = LinearMapOnBasis::new(c.clone(), c.all(), c.clone(), c.all(), q(), cols).unwrap();
        assert!(bijection_from_isomorphism(&collapse).is_err());
    }

    #[test]
    fn ideal_subsets() {
        let c = abc();
        assert_eq!(subset_of_ideal(&[el(&c, q(), &[("a", 1)])]), [Point(0)].into());
        assert_eq!(subset_of_ideal(&[el(&c, q(), &[("a", 2), ("b", 1)])]), [Point(0), Point(1)].into());
        assert!(subset_of_ideal(&[]).is_empty());
        assert!(subset_of_ideal(&[FunAlgElement::zero(c, q())]).is_empty());
    }

    #[test]
    fn ideal_correspondence_matches_brute_force_span() {
        let c = Arc::new(Carrier::new(["a", "b", "c", "d"]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for field in [q(), FieldSpec::prime(5).unwrap()] {
            for _ in 0..50 {
                let ngen = rng.gen_range(0..3);
                let gens: Vec<FunAlgElement> = (0..ngen)
                    .map(|_| {
                        let coeffs: Vec<(Point, Scalar)> = c
                            .points()
                            .filter_map(|x| if rng.gen_bool(0.4) { Some((x, field.from_i64(rng.gen_range(-3..=3)))) } else { None })
                            .collect();
                        FunAlgElement::from_coeffs(c.clone(), field, coeffs).unwrap()
                    })
                    .collect();
                // close the linear span under multiplication by every δ_x
                let mut span = Subspace::zero(field, c.len());
                let mut frontier: Vec<FunAlgElement> = gens.clone();
                while let Some(f) = frontier.pop() {
                    if span.insert(f.to_dense()) {
                        for x in c.points() {
                            frontier.push(FunAlgElement::delta(c.clone(), field, x).unwrap().mul(&f).unwrap());
                        }
                    }
                }
                let a = subset_of_ideal(&gens);
                let expected = Subspace::spanned_by(
                    field,
                    c.len(),
                    a.iter().map(|&x| FunAlgElement::delta(c.clone(), field, x).unwrap().to_dense()),
                );
                assert_eq!(span, expected);
            }
        }
    }

    #[test]
    fn induced_action_examples() {
        let e1 = Arc::new(fixtures::e1());
        let alpha = induce_algebra_action(e1.clone(), q()).unwrap();
        let c = e1.carrier().clone();
        let g = GroupElement::Residue(1);
        assert_eq!(apply_alpha(&alpha, g, &el(&c, q(), &[("a", 1)])).unwrap(), el(&c, q(), &[("b", 1)]));
        let f = el(&c, q(), &[("a", 2), ("c", -1)]);
        assert_eq!(apply_alpha(&alpha, GroupElement::Residue(0), &f).unwrap(), f);
        assert!(matches!(apply_alpha(&alpha, g, &f), Err(AlgebraError::Support(_))));

        let e2 = Arc::new(fixtures::e2());
        let alpha2 = induce_algebra_action(e2.clone(), q()).unwrap();
        let c2 = e2.carrier().clone();
        let one = GroupElement::Int(1);
        assert_eq!(apply_alpha(&alpha2, one, &el(&c2, q(), &[("1", 1)])).unwrap(), el(&c2, q(), &[("2", 1)]));
        assert!(matches!(apply_alpha(&alpha2, one, &el(&c2, q(), &[("3", 1)])), Err(AlgebraError::Support(_))));
    }

    #[test]
    fn alpha_inverse_undoes_alpha() {
        let e2 = Arc::new(fixtures::e2());
        let alpha = induce_algebra_action(e2.clone(), q()).unwrap();
        let c = e2.carrier().clone();
        for (t, _) in e2.listed() {
            let ti = e2.group().inv(t).unwrap();
            let f = FunAlgElement::from_coeffs(
                c.clone(),
                q(),
                alpha.ideal(ti).into_iter().enumerate().map(|(i, x)| (x, q().from_i64(i as i64 + 2))),
            )
            .unwrap();
            let there = alpha.apply(t, &f).unwrap();
            assert!(there.supported_in(&alpha.ideal(t)));
            assert_eq!(alpha.apply(ti, &there).unwrap(), f);
        }
    }

    #[test]
    fn round_trips_through_families() {
        for pa in [fixtures::e1(), fixtures::e2(), fixtures::e1_fixing_c(), fixtures::trivial(2)] {
            for field in [q(), FieldSpec::prime(5).unwrap()] {
                let alpha = induce_algebra_action(Arc::new(pa.clone()), field).unwrap();
                let family = alpha.to_family().unwrap();
                let back = recover_set_action(&family).unwrap();
                assert_eq!(back, pa);
                assert_eq!(induce_algebra_action(Arc::new(back), field).unwrap().to_family().unwrap(), family);
            }
        }
    }

    #[test]
    fn recover_accepts_other_generators() {
        let pa = fixtures::e1();
        let alpha = induce_algebra_action(Arc::new(pa.clone()), q()).unwrap();
        let mut family = alpha.to_family().unwrap();
        let c = pa.carrier().clone();
        family.ideals.insert(GroupElement::Residue(1), vec![el(&c, q(), &[("a", 2), ("b", 1)])]);
        assert_eq!(recover_set_action(&family).unwrap(), pa);
    }

    #[test]
    fn recover_rejects_scaled_map() {
        let alpha = induce_algebra_action(Arc::new(fixtures::e1()), q()).unwrap();
        let mut family = alpha.to_family().unwrap();
        let g = GroupElement::Residue(1);
        let scaled = family.maps[&g].scaled(&q().from_i64(2)).unwrap();
        family.maps.insert(g, scaled);
        assert!(matches!(recover_set_action(&family), Err(AlgebraError::NotMultiplicative(_))));
    }

    #[test]
    fn recover_rejects_set_level_failure() {
        // Z on {1,2,3}: α_1, α_-1 from h_1 but D_2 missing, so axiom 2 fails
        let alpha = induce_algebra_action(Arc::new(fixtures::e2()), q()).unwrap();
        let mut family = alpha.to_family().unwrap();
        for t in [2, -2] {
            family.ideals.remove(&GroupElement::Int(t));
            family.maps.remove(&GroupElement::Int(t));
        }
        assert!(matches!(recover_set_action(&family), Err(AlgebraError::Invalid(_))));
    }
}
