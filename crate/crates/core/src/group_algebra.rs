//! The group algebra `L = K[Z]` over a finite field `K`.
//!
//! An element is a finite sum `Σ c_β t_β` with `t_α t_β = t_{α+β}`, stored as
//! `(exponent, coefficient)` pairs with strictly increasing exponents and no
//! zero coefficients. `L₊` is the subring spanned by `t_β` with `β >= 0`.
//! The valuation `ord` is the least exponent present, and `π: L₊ -> K` reads
//! off the coefficient of `t₀`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{ElementEncoding, FieldElement, FieldError, FieldSpec};
use crate::ring::Ring;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupAlgebraError {
    #[error("ord is undefined for the zero element")]
    OrdOfZero,
    #[error("element is not in L+ (its order is {0})")]
    NotInLPlus(i64),
    #[error("elements have different coefficient fields")]
    FieldMismatch,
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("malformed term list: {0}")]
    Malformed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupAlgebraElement {
    spec: FieldSpec,
    terms: Vec<(i64, FieldElement)>,
}

impl fmt::Debug for GroupAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GroupAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·t[{e}]")?;
        }
        Ok(())
    }
}

impl GroupAlgebraElement {
    pub fn zero(spec: &FieldSpec) -> Self {
        GroupAlgebraElement {
            spec: spec.clone(),
            terms: Vec::new(),
        }
    }

    /// The unity `t₀`.
    pub fn one(spec: &FieldSpec) -> Self {
        Self::monomial(0, spec.one())
    }

    /// `c · t_α`; the zero element when `c = 0`.
    pub fn monomial(alpha: i64, c: FieldElement) -> Self {
        let spec = c.spec().clone();
        let terms = if c.is_zero() { Vec::new() } else { vec![(alpha, c)] };
        GroupAlgebraElement { spec, terms }
    }

    /// Builds an element from arbitrary `(exponent, coefficient)` pairs,
    /// summing repeated exponents and dropping zeros.
    pub fn from_terms(
        spec: &FieldSpec,
        terms: impl IntoIterator<Item = (i64, FieldElement)>,
    ) -> Result<Self, GroupAlgebraError> {
        let mut all: Vec<(i64, FieldElement)> = Vec::new();
        for (e, c) in terms {
            if !c.spec().same_field(spec) {
                return Err(GroupAlgebraError::FieldMismatch);
            }
            all.push((e, c));
        }
        all.sort_by_key(|(e, _)| *e);
        let mut merged: Vec<(i64, FieldElement)> = Vec::with_capacity(all.len());
        for (e, c) in all {
            match merged.last_mut() {
                Some((le, lc)) if *le == e => *lc = &*lc + &c,
                _ => merged.push((e, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        Ok(GroupAlgebraElement {
            spec: spec.clone(),
            terms: merged,
        })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    /// Stored terms, exponents strictly increasing, coefficients nonzero.
    pub fn terms(&self) -> &[(i64, FieldElement)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient `[t_β] a`.
    pub fn coeff(&self, beta: i64) -> FieldElement {
        match self.terms.binary_search_by_key(&beta, |(e, _)| *e) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => self.spec.zero(),
        }
    }

    /// The smallest exponent with a nonzero coefficient.
    pub fn ord(&self) -> Result<i64, GroupAlgebraError> {
        self.terms.first().map(|(e, _)| *e).ok_or(GroupAlgebraError::OrdOfZero)
    }

    /// Membership in `L₊`: zero, or `ord >= 0`.
    pub fn in_lplus(&self) -> bool {
        self.terms.first().is_none_or(|(e, _)| *e >= 0)
    }

    /// Membership in the ideal `L₊₊`: zero, or `ord > 0`.
    pub fn in_lplusplus(&self) -> bool {
        self.terms.first().is_none_or(|(e, _)| *e > 0)
    }

    /// The constant-term map `π: L₊ -> K`.
    pub fn pi(&self) -> Result<FieldElement, GroupAlgebraError> {
        match self.terms.first() {
            Some((e, _)) if *e < 0 => Err(GroupAlgebraError::NotInLPlus(*e)),
            _ => Ok(self.coeff(0)),
        }
    }

    /// Multiplication by `t_shift`.
    pub fn shift(&self, shift: i64) -> Result<Self, GroupAlgebraError> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                e.checked_add(shift)
                    .map(|e| (e, c.clone()))
                    .ok_or(GroupAlgebraError::ExponentOverflow)
            })
            .collect::<Result<_, _>>()?;
        Ok(GroupAlgebraElement {
            spec: self.spec.clone(),
            terms,
        })
    }

    pub fn scale(&self, c: &FieldElement) -> Result<Self, GroupAlgebraError> {
        if !c.spec().same_field(&self.spec) {
            return Err(GroupAlgebraError::FieldMismatch);
        }
        if c.is_zero() {
            return Ok(Self::zero(&self.spec));
        }
        let terms = self.terms.iter().map(|(e, x)| (*e, x * c)).collect();
        Ok(GroupAlgebraElement {
            spec: self.spec.clone(),
            terms,
        })
    }

    pub fn arith(&self, op: RingOp, rhs: &Self) -> Result<Self, GroupAlgebraError> {
        if !self.spec.same_field(&rhs.spec) {
            return Err(GroupAlgebraError::FieldMismatch);
        }
        match op {
            RingOp::Add => Ok(self.merge(rhs, false)),
            RingOp::Sub => Ok(self.merge(rhs, true)),
            RingOp::Mul => self.product(rhs),
        }
    }

    fn merge(&self, rhs: &Self, negate_rhs: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        let fix = |c: &FieldElement| if negate_rhs { -c } else { c.clone() };
        while i < self.terms.len() || j < rhs.terms.len() {
            match (self.terms.get(i), rhs.terms.get(j)) {
                (Some((ea, ca)), Some((eb, cb))) if ea == eb => {
                    let c = if negate_rhs { ca - cb } else { ca + cb };
                    if !c.is_zero() {
                        out.push((*ea, c));
                    }
                    i += 1;
                    j += 1;
                }
                (Some((ea, ca)), Some((eb, _))) if ea < eb => {
                    out.push((*ea, ca.clone()));
                    i += 1;
                }
                (Some(_), Some((eb, cb))) => {
                    out.push((*eb, fix(cb)));
                    j += 1;
                }
                (Some((ea, ca)), None) => {
                    out.push((*ea, ca.clone()));
                    i += 1;
                }
                (None, Some((eb, cb))) => {
                    out.push((*eb, fix(cb)));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        GroupAlgebraElement {
            spec: self.spec.clone(),
            terms: out,
        }
    }

    fn product(&self, rhs: &Self) -> Result<Self, GroupAlgebraError> {
        let mut raw = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.checked_add(*eb).ok_or(GroupAlgebraError::ExponentOverflow)?;
                raw.push((e, ca * cb));
            }
        }
        Self::from_terms(&self.spec, raw)
    }

    pub fn to_repr(&self) -> TermsRepr {
        TermsRepr {
            terms: self.terms.iter().map(|(e, c)| (*e, c.encoding())).collect(),
        }
    }

    /// Decodes `{"terms": [[exponent, coeff], ...]}`; exponents must be
    /// strictly increasing and coefficients nonzero.
    pub fn from_repr(spec: &FieldSpec, repr: &TermsRepr) -> Result<Self, GroupAlgebraError> {
        let mut terms = Vec::with_capacity(repr.terms.len());
        for (e, enc) in &repr.terms {
            let c = spec.decode(enc)?;
            if c.is_zero() {
                return Err(GroupAlgebraError::Malformed(format!(
                    "zero coefficient at exponent {e}"
                )));
            }
            if terms.last().is_some_and(|(le, _): &(i64, FieldElement)| *le >= *e) {
                return Err(GroupAlgebraError::Malformed("exponents not strictly increasing".into()));
            }
            terms.push((*e, c));
        }
        Ok(GroupAlgebraElement {
            spec: spec.clone(),
            terms,
        })
    }
}

/// JSON shape of a group-algebra element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermsRepr {
    pub terms: Vec<(i64, ElementEncoding)>,
}

macro_rules! ga_binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait<&GroupAlgebraElement> for &GroupAlgebraElement {
            type Output = GroupAlgebraElement;
            fn $method(self, rhs: &GroupAlgebraElement) -> GroupAlgebraElement {
                self.arith($op, rhs).expect("group algebra arithmetic")
            }
        }
        impl $trait<GroupAlgebraElement> for GroupAlgebraElement {
            type Output = GroupAlgebraElement;
            fn $method(self, rhs: GroupAlgebraElement) -> GroupAlgebraElement {
                (&self).$method(&rhs)
            }
        }
    };
}

ga_binop!(Add, add, RingOp::Add);
ga_binop!(Sub, sub, RingOp::Sub);
ga_binop!(Mul, mul, RingOp::Mul);

impl Neg for &GroupAlgebraElement {
    type Output = GroupAlgebraElement;
    fn neg(self) -> GroupAlgebraElement {
        GroupAlgebraElement {
            spec: self.spec.clone(),
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for GroupAlgebraElement {
    type Output = GroupAlgebraElement;
    fn neg(self) -> GroupAlgebraElement {
        -&self
    }
}

impl Ring for GroupAlgebraElement {
    fn zero_like(&self) -> Self {
        Self::zero(&self.spec)
    }
    fn one_like(&self) -> Self {
        Self::one(&self.spec)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> FieldSpec {
        FieldSpec::of_order(q).unwrap()
    }

    fn el(spec: &FieldSpec, terms: &[(i64, i64)]) -> GroupAlgebraElement {
        GroupAlgebraElement::from_terms(spec, terms.iter().map(|&(e, c)| (e, spec.from_int(c)))).unwrap()
    }

    #[test]
    fn monomials() {
        let k = gf(5);
        let unit = GroupAlgebraElement::monomial(0, k.one());
        assert_eq!(unit, GroupAlgebraElement::one(&k));
        assert!(GroupAlgebraElement::monomial(5, k.zero()).is_zero());
        let m = GroupAlgebraElement::monomial(-3, k.from_int(2));
        assert_eq!(m.terms(), &[(-3, k.from_int(2))]);
    }

    #[test]
    fn arithmetic_examples() {
        let k = gf(7);
        let t2 = el(&k, &[(2, 1)]);
        let t3 = el(&k, &[(3, 1)]);
        assert_eq!(&t2 * &t3, el(&k, &[(5, 1)]));
        assert_eq!(&(&t2 - &t3) + &t3, t2);

        let k2 = gf(2);
        let a = el(&k2, &[(0, 1), (1, 1)]);
        assert_eq!(&a * &a, el(&k2, &[(0, 1), (2, 1)]));
    }

    #[test]
    fn coefficients_and_order() {
        let k = gf(7);
        let a = el(&k, &[(2, 1), (3, -1), (6, 5)]);
        assert_eq!(a.coeff(3), k.from_int(-1));
        assert_eq!(a.coeff(2), k.one());
        assert_eq!(a.coeff(4), k.zero());
        assert_eq!(GroupAlgebraElement::zero(&k).coeff(7), k.zero());
        assert_eq!(a.ord(), Ok(2));
        for alpha in [-4, 0, 9] {
            assert_eq!(el(&k, &[(alpha, 1)]).ord(), Ok(alpha));
        }
        assert_eq!(GroupAlgebraElement::zero(&k).ord(), Err(GroupAlgebraError::OrdOfZero));
    }

    #[test]
    fn lplus_and_pi() {
        let k = gf(5);
        assert!(el(&k, &[(0, 1), (5, 1)]).in_lplus());
        assert!(!el(&k, &[(-1, 1)]).in_lplus());
        assert!(GroupAlgebraElement::zero(&k).in_lplus());
        assert_eq!(el(&k, &[(0, 1), (2, 3)]).pi(), Ok(k.one()));
        assert_eq!(el(&k, &[(1, 1)]).pi(), Ok(k.zero()));
        assert_eq!(el(&k, &[(-2, 1), (0, 1)]).pi(), Err(GroupAlgebraError::NotInLPlus(-2)));
        assert!(el(&k, &[(1, 4)]).in_lplusplus());
        assert!(!el(&k, &[(0, 4)]).in_lplusplus());
    }

    #[test]
    fn mismatched_fields() {
        let a = GroupAlgebraElement::one(&gf(5));
        let b = GroupAlgebraElement::one(&gf(7));
        assert_eq!(a.arith(RingOp::Add, &b), Err(GroupAlgebraError::FieldMismatch));
    }

    #[test]
    fn from_terms_normalizes() {
        let k = gf(3);
        let a = el(&k, &[(4, 1), (1, 2), (4, 2), (1, 2)]);
        // 3 t4 = 0, 4 t1 = t1
        assert_eq!(a.terms(), &[(1, k.one())]);
    }

    #[test]
    fn json_shape() {
        let k = gf(7);
        let a = el(&k, &[(-2, 3), (0, 1)]);
        let json = serde_json::to_string(&a.to_repr()).unwrap();
        assert_eq!(json, r#"{"terms":[[-2,3],[0,1]]}"#);
        let back: TermsRepr = serde_json::from_str(&json).unwrap();
        assert_eq!(GroupAlgebraElement::from_repr(&k, &back).unwrap(), a);
        let bad: TermsRepr = serde_json::from_str(r#"{"terms":[[1,3],[0,1]]}"#).unwrap();
        assert!(GroupAlgebraElement::from_repr(&k, &bad).is_err());
    }
}
