//! The partial skew group ring `F0(X) ⋊_α G` of finite formal sums
//! `Σ a_t δ_t` with `a_t in D_t`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::AlgebraError;
use crate::field::Scalar;
use crate::function_algebra::{FunAlgElement, InducedAlgebraAction};
use crate::group::GroupElement;
use crate::partial_actions::Point;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewElement {
    alpha: Arc<InducedAlgebraAction>,
    terms: BTreeMap<GroupElement, FunAlgElement>,
}

impl SkewElement {
    pub fn zero(alpha: Arc<InducedAlgebraAction>) -> Self {
        SkewElement { alpha, terms: BTreeMap::new() }
    }

    /// `Σ_x δ_x δ_e`, the unit of the ring.
    pub fn one(alpha: Arc<InducedAlgebraAction>) -> Self {
        let c = alpha.carrier().clone();
        let e = alpha.group().identity();
        let f = FunAlgElement::indicator(c.clone(), alpha.field(), &c.all()).expect("whole carrier");
        SkewElement::raw(alpha, [(e, f)])
    }

    /// Sums the given terms, dropping zeros, and checks `a_t in D_t`.
    pub fn new<I>(alpha: Arc<InducedAlgebraAction>, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (GroupElement, FunAlgElement)>,
    {
        let u = Self::collect(alpha, terms)?;
        if let Some((t, bad)) = u.first_violation() {
            return Err(AlgebraError::Support(format!(
                "{} is not in X_{}",
                u.alpha.carrier().label(bad),
                u.alpha.group().format(t)
            )));
        }
        Ok(u)
    }

    /// Like [`SkewElement::new`] without the support check, so that
    /// [`skew_validate`] has something to reject.
    pub fn new_unchecked<I>(alpha: Arc<InducedAlgebraAction>, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (GroupElement, FunAlgElement)>,
    {
        Self::collect(alpha, terms)
    }

    /// `f δ_t`.
    pub fn monomial(alpha: Arc<InducedAlgebraAction>, t: GroupElement, f: FunAlgElement) -> Result<Self, AlgebraError> {
        Self::new(alpha, [(t, f)])
    }

    /// `δ_x δ_t`.
    pub fn basis(alpha: Arc<InducedAlgebraAction>, t: GroupElement, x: Point) -> Result<Self, AlgebraError> {
        let f = FunAlgElement::delta(alpha.carrier().clone(), alpha.field(), x)?;
        Self::monomial(alpha, t, f)
    }

    fn collect<I>(alpha: Arc<InducedAlgebraAction>, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (GroupElement, FunAlgElement)>,
    {
        let mut out = SkewElement::zero(alpha);
        for (t, f) in terms {
            if !out.alpha.group().contains(t) {
                return Err(AlgebraError::Invalid(format!("{t:?} is not in {}", out.alpha.group())));
            }
            if !crate::function_algebra::same_carrier(f.carrier(), out.alpha.carrier()) {
                return Err(AlgebraError::CarrierMismatch);
            }
            if f.field() != out.alpha.field() {
                return Err(crate::field::FieldError::Mismatch(f.field(), out.alpha.field()).into());
            }
            out.add_term(t, f)?;
        }
        Ok(out)
    }

    fn raw<I: IntoIterator<Item = (GroupElement, FunAlgElement)>>(alpha: Arc<InducedAlgebraAction>, terms: I) -> Self {
        let terms = terms.into_iter().filter(|(_, f)| !f.is_zero()).collect();
        SkewElement { alpha, terms }
    }

    fn add_term(&mut self, t: GroupElement, f: FunAlgElement) -> Result<(), AlgebraError> {
        let sum = match self.terms.remove(&t) {
            Some(old) => old.add(&f)?,
            None => f,
        };
        if !sum.is_zero() {
            self.terms.insert(t, sum);
        }
        Ok(())
    }

    fn first_violation(&self) -> Option<(GroupElement, Point)> {
        self.terms.iter().find_map(|(&t, f)| {
            let xt = self.alpha.ideal(t);
            f.coeffs().map(|(x, _)| x).find(|x| !xt.contains(x)).map(|x| (t, x))
        })
    }

    pub fn alpha(&self) -> &Arc<InducedAlgebraAction> {
        &self.alpha
    }

    /// Nonzero terms, identity first.
    pub fn terms(&self) -> impl Iterator<Item = (GroupElement, &FunAlgElement)> {
        self.terms.iter().map(|(&t, f)| (t, f))
    }

    pub fn term(&self, t: GroupElement) -> Option<&FunAlgElement> {
        self.terms.get(&t)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn compatible(&self, other: &Self) -> Result<(), AlgebraError> {
        if Arc::ptr_eq(&self.alpha, &other.alpha) || self.alpha == other.alpha {
            Ok(())
        } else {
            Err(AlgebraError::ContextMismatch)
        }
    }

    pub fn neg(&self) -> Self {
        SkewElement::raw(self.alpha.clone(), self.terms.iter().map(|(&t, f)| (t, f.neg())))
    }

    pub fn scale(&self, k: &Scalar) -> Result<Self, AlgebraError> {
        let terms = self
            .terms
            .iter()
            .map(|(&t, f)| Ok((t, f.scale(k)?)))
            .collect::<Result<Vec<_>, AlgebraError>>()?;
        Ok(SkewElement::raw(self.alpha.clone(), terms))
    }
}

pub fn skew_add(u: &SkewElement, v: &SkewElement) -> Result<SkewElement, AlgebraError> {
    u.compatible(v)?;
    let mut out = u.clone();
    for (&t, f) in &v.terms {
        out.add_term(t, f.clone())?;
    }
    Ok(out)
}

/// `(a_t δ_t)(b_s δ_s) = α_t(α_{t^-1}(a_t) b_s) δ_{ts}`, extended bilinearly.
pub fn skew_mul(u: &SkewElement, v: &SkewElement) -> Result<SkewElement, AlgebraError> {
    u.compatible(v)?;
    let alpha = &u.alpha;
    let g = alpha.group();
    let mut out = SkewElement::zero(alpha.clone());
    for (&t, a) in &u.terms {
        let ti = g.inv(t)?;
        let back = alpha.apply(ti, a)?;
        let x_ti = alpha.ideal(ti);
        for (&s, b) in &v.terms {
            let middle = back.mul(b)?;
            assert!(middle.supported_in(&x_ti), "α_t^-1(a_t) b_s lies in D_t^-1");
            let product = alpha.apply(t, &middle)?;
            out.add_term(g.mul(t, s)?, product)?;
        }
    }
    Ok(out)
}

/// True iff every `a_t` is supported in `X_t`.
pub fn skew_validate(u: &SkewElement) -> bool {
    u.first_violation().is_none()
}

impl fmt::Display for SkewElement {
    /// `2·δ_a δ_1 + δ_c δ_0`-style rendering in term order.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(out, "0");
        }
        let mut first = true;
        for (&t, f) in &self.terms {
            for (x, k) in f.coeffs() {
                if !first {
                    write!(out, " + ")?;
                }
                first = false;
                if !k.is_one() {
                    write!(out, "({k})·")?;
                }
                write!(out, "δ_{} δ_{}", self.alpha.carrier().label(x), self.alpha.group().format(t))?;
            }
        }
        Ok(())
    }
}
