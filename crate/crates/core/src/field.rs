//! Finite fields GF(p) and GF(p^n).
//!
//! Elements are stored as a single canonical code: for a prime field the
//! residue in `[0, p)`, for an extension field the little-endian digit
//! expansion `c0 + c1 p + ... + c_{n-1} p^{n-1}` of the coefficient vector
//! of the residue class modulo the defining polynomial. Equal elements have
//! equal codes, and enumeration walks codes in increasing order, so `0` comes
//! first and `1` second.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::Ring;

/// Largest admissible characteristic.
pub const MAX_CHARACTERISTIC: u64 = 1 << 31;
/// Largest field order for which elements may be enumerated.
pub const ENUMERATION_LIMIT: u64 = 1 << 20;
/// Moduli of extension fields up to this order are checked by exhaustive
/// trial division; larger ones use Rabin's test.
const EXHAUSTIVE_IRREDUCIBILITY_LIMIT: u64 = 1 << 16;

/// Built-in monic irreducible moduli, little-endian coefficients.
const DEFAULT_MODULI: &[(u64, u32, &[u64])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 0, 0, 0, 1]),
    (3, 2, &[1, 0, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 2, &[2, 0, 1]),
    (7, 2, &[1, 0, 1]),
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} exceeds 2^31")]
    CharacteristicTooLarge(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("no modulus supplied for GF({p}^{n}) and none is built in")]
    MissingModulus { p: u64, n: u32 },
    #[error("modulus must have {expected} coefficients, got {got}")]
    ModulusLength { expected: usize, got: usize },
    #[error("modulus coefficient {0} is not in [0, p)")]
    CoefficientOutOfRange(u64),
    #[error("modulus is not monic")]
    NotMonic,
    #[error("modulus is reducible over GF({0})")]
    Reducible(u64),
    #[error("field order {p}^{n} does not fit in 64 bits")]
    OrderOverflow { p: u64, n: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {0} exceeds the enumeration limit 2^20")]
    TooLargeToEnumerate(u64),
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid element encoding: {0}")]
    BadEncoding(String),
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct FieldInner {
    p: u64,
    n: u32,
    modulus: Vec<u64>,
    order: u64,
}

/// A finite field `GF(p^n)`, cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec(Arc<FieldInner>);

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.n == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{}; {:?})", self.0.p, self.0.n, self.0.modulus)
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.0.order)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(p, n)` with `q = p^n`, if `q` is a prime power.
pub fn prime_power_decomposition(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut rest = q;
    let mut n = 0;
    while rest % p == 0 {
        rest /= p;
        n += 1;
    }
    (rest == 1).then_some((p, n))
}

/// The built-in modulus for `GF(p^n)`, if there is one.
pub fn default_modulus(p: u64, n: u32) -> Option<Vec<u64>> {
    DEFAULT_MODULI
        .iter()
        .find(|(mp, mn, _)| *mp == p && *mn == n)
        .map(|(_, _, m)| m.to_vec())
}

/// Whether `GF(q)` can be built without a user-supplied modulus.
pub fn is_available_order(q: u64) -> bool {
    match prime_power_decomposition(q) {
        Some((p, 1)) => p <= MAX_CHARACTERISTIC,
        Some((p, n)) => default_modulus(p, n).is_some(),
        None => false,
    }
}

/// Smallest `q >= min` for which [`FieldSpec::of_order`] succeeds.
pub fn smallest_available_order(min: u64) -> u64 {
    let mut q = min.max(2);
    while !is_available_order(q) {
        q += 1;
    }
    q
}

impl FieldSpec {
    /// Builds `GF(p^n)`. For `n > 1` the modulus is the little-endian
    /// coefficient list of a monic irreducible polynomial of degree `n`; when
    /// omitted the built-in table is consulted.
    pub fn new(p: u64, n: u32, modulus: Option<Vec<u64>>) -> Result<Self, FieldError> {
        if p > MAX_CHARACTERISTIC {
            return Err(FieldError::CharacteristicTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if n == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = p.checked_pow(n).ok_or(FieldError::OrderOverflow { p, n })?;
        let modulus = if n == 1 {
            match modulus {
                Some(m) if !m.is_empty() => {
                    return Err(FieldError::ModulusLength {
                        expected: 0,
                        got: m.len(),
                    })
                }
                _ => Vec::new(),
            }
        } else {
            let m = match modulus {
                Some(m) => m,
                None => default_modulus(p, n).ok_or(FieldError::MissingModulus { p, n })?,
            };
            if m.len() != n as usize + 1 {
                return Err(FieldError::ModulusLength {
                    expected: n as usize + 1,
                    got: m.len(),
                });
            }
            if let Some(&c) = m.iter().find(|&&c| c >= p) {
                return Err(FieldError::CoefficientOutOfRange(c));
            }
            if m[n as usize] != 1 {
                return Err(FieldError::NotMonic);
            }
            let irreducible = if order <= EXHAUSTIVE_IRREDUCIBILITY_LIMIT {
                modp::is_irreducible_exhaustive(&m, p)
            } else {
                modp::is_irreducible_rabin(&m, p)
            };
            if !irreducible {
                return Err(FieldError::Reducible(p));
            }
            m
        };
        Ok(FieldSpec(Arc::new(FieldInner { p, n, modulus, order })))
    }

    pub fn prime(p: u64) -> Result<Self, FieldError> {
        Self::new(p, 1, None)
    }

    /// `GF(q)` for a prime power `q`, using the built-in modulus table.
    pub fn of_order(q: u64) -> Result<Self, FieldError> {
        let (p, n) = prime_power_decomposition(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::new(p, n, None)
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.n
    }

    pub fn order(&self) -> u64 {
        self.0.order
    }

    /// Little-endian modulus coefficients; empty for prime fields.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn same_field(&self, other: &FieldSpec) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            spec: self.clone(),
            code: 0,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            spec: self.clone(),
            code: 1,
        }
    }

    /// The image of an integer under the canonical map `Z -> GF(p) ⊆ GF(q)`.
    pub fn from_int(&self, v: i64) -> FieldElement {
        let p = self.0.p as i64;
        FieldElement {
            spec: self.clone(),
            code: v.rem_euclid(p) as u64,
        }
    }

    pub fn element(&self, code: u64) -> Result<FieldElement, FieldError> {
        if code >= self.0.order {
            return Err(FieldError::BadEncoding(format!(
                "code {code} >= field order {}",
                self.0.order
            )));
        }
        Ok(FieldElement {
            spec: self.clone(),
            code,
        })
    }

    /// Element from little-endian coefficients (at most `n` of them).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement, FieldError> {
        if coeffs.len() > self.0.n as usize {
            return Err(FieldError::BadEncoding(format!(
                "{} coefficients for a degree-{} field",
                coeffs.len(),
                self.0.n
            )));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.0.p) {
            return Err(FieldError::BadEncoding(format!(
                "coefficient {c} not in [0, {})",
                self.0.p
            )));
        }
        Ok(FieldElement {
            spec: self.clone(),
            code: self.encode(coeffs),
        })
    }

    /// All `q` elements: `0`, `1`, then the rest in increasing code order.
    pub fn elements(&self) -> Result<Vec<FieldElement>, FieldError> {
        if self.0.order > ENUMERATION_LIMIT {
            return Err(FieldError::TooLargeToEnumerate(self.0.order));
        }
        Ok((0..self.0.order)
            .map(|code| FieldElement {
                spec: self.clone(),
                code,
            })
            .collect())
    }

    /// Decodes the serialized form of an element of this field.
    pub fn decode(&self, enc: &ElementEncoding) -> Result<FieldElement, FieldError> {
        match (enc, self.0.n) {
            (ElementEncoding::Scalar(v), 1) => self.element(*v),
            (ElementEncoding::Coeffs(c), n) if n > 1 => {
                if c.len() != n as usize {
                    return Err(FieldError::BadEncoding(format!(
                        "expected {n} coefficients, got {}",
                        c.len()
                    )));
                }
                self.from_coeffs(c)
            }
            (ElementEncoding::Scalar(_), _) => {
                Err(FieldError::BadEncoding("scalar encoding for an extension field".into()))
            }
            (ElementEncoding::Coeffs(_), _) => Err(FieldError::BadEncoding("array encoding for a prime field".into())),
        }
    }

    // ---- code-level arithmetic ------------------------------------------

    fn digits(&self, code: u64) -> Vec<u64> {
        let p = self.0.p;
        let mut c = code;
        (0..self.0.n)
            .map(|_| {
                let d = c % p;
                c /= p;
                d
            })
            .collect()
    }

    fn encode(&self, digits: &[u64]) -> u64 {
        digits.iter().rev().fold(0u64, |acc, &d| acc * self.0.p + d)
    }

    pub(crate) fn add_codes(&self, a: u64, b: u64) -> u64 {
        let p = self.0.p;
        if self.0.n == 1 {
            return (a + b) % p;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
        self.encode(&sum)
    }

    pub(crate) fn neg_code(&self, a: u64) -> u64 {
        let p = self.0.p;
        if self.0.n == 1 {
            return (p - a) % p;
        }
        let neg: Vec<u64> = self.digits(a).iter().map(|x| (p - x) % p).collect();
        self.encode(&neg)
    }

    pub(crate) fn sub_codes(&self, a: u64, b: u64) -> u64 {
        self.add_codes(a, self.neg_code(b))
    }

    pub(crate) fn mul_codes(&self, a: u64, b: u64) -> u64 {
        let p = self.0.p;
        if self.0.n == 1 {
            return a * b % p;
        }
        let product = modp::mul(&self.digits(a), &self.digits(b), p);
        let mut reduced = modp::rem_monic(&product, &self.0.modulus, p);
        reduced.resize(self.0.n as usize, 0);
        self.encode(&reduced)
    }

    pub(crate) fn pow_code(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_codes(acc, base);
            }
            base = self.mul_codes(base, base);
            e >>= 1;
        }
        acc
    }

    pub(crate) fn inv_code(&self, a: u64) -> Option<u64> {
        (a != 0).then(|| self.pow_code(a, self.0.order - 2))
    }
}

/// Serialized form of an element: an integer for prime fields, a
/// little-endian coefficient array for extension fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementEncoding {
    Scalar(u64),
    Coeffs(Vec<u64>),
}

#[derive(Serialize, Deserialize)]
struct FieldSpecRepr {
    p: u64,
    n: u32,
    modulus: Vec<u64>,
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FieldSpecRepr {
            p: self.0.p,
            n: self.0.n,
            modulus: self.0.modulus.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = FieldSpecRepr::deserialize(d)?;
        let modulus = (r.n > 1).then_some(r.modulus);
        FieldSpec::new(r.p, r.n, modulus).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An element of a [`FieldSpec`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    spec: FieldSpec,
    code: u64,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spec.degree() == 1 {
            write!(f, "{}", self.code)
        } else {
            write!(f, "{:?}", self.coeffs())
        }
    }
}

impl FieldElement {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    /// Canonical integer code in `[0, q)`.
    pub fn code(&self) -> u64 {
        self.code
    }

    /// Little-endian coefficients, length `n`.
    pub fn coeffs(&self) -> Vec<u64> {
        self.spec.digits(self.code)
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    pub fn is_one(&self) -> bool {
        self.code == 1
    }

    pub fn encoding(&self) -> ElementEncoding {
        if self.spec.degree() == 1 {
            ElementEncoding::Scalar(self.code)
        } else {
            ElementEncoding::Coeffs(self.coeffs())
        }
    }

    fn check(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.spec.same_field(&other.spec) {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    fn with_code(&self, code: u64) -> FieldElement {
        FieldElement {
            spec: self.spec.clone(),
            code,
        }
    }

    /// Binary field operation with full error reporting.
    pub fn arith(&self, op: FieldOp, rhs: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(rhs)?;
        let s = &self.spec;
        let code = match op {
            FieldOp::Add => s.add_codes(self.code, rhs.code),
            FieldOp::Sub => s.sub_codes(self.code, rhs.code),
            FieldOp::Mul => s.mul_codes(self.code, rhs.code),
            FieldOp::Div => {
                let inv = s.inv_code(rhs.code).ok_or(FieldError::DivisionByZero)?;
                s.mul_codes(self.code, inv)
            }
        };
        Ok(self.with_code(code))
    }

    pub fn checked_add(&self, rhs: &FieldElement) -> Result<FieldElement, FieldError> {
        self.arith(FieldOp::Add, rhs)
    }

    pub fn checked_sub(&self, rhs: &FieldElement) -> Result<FieldElement, FieldError> {
        self.arith(FieldOp::Sub, rhs)
    }

    pub fn checked_mul(&self, rhs: &FieldElement) -> Result<FieldElement, FieldError> {
        self.arith(FieldOp::Mul, rhs)
    }

    pub fn checked_div(&self, rhs: &FieldElement) -> Result<FieldElement, FieldError> {
        self.arith(FieldOp::Div, rhs)
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        self.spec
            .inv_code(self.code)
            .map(|c| self.with_code(c))
            .ok_or(FieldError::DivisionByZero)
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.with_code(self.spec.pow_code(self.code, e))
    }
}

// Operator impls panic when the operands come from different fields; use
// `arith` when the fields are not known to agree.
macro_rules! field_binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.arith($op, rhs).expect("field mismatch")
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
    };
}

field_binop!(Add, add, FieldOp::Add);
field_binop!(Sub, sub, FieldOp::Sub);
field_binop!(Mul, mul, FieldOp::Mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.with_code(self.spec.neg_code(self.code))
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl Ring for FieldElement {
    fn zero_like(&self) -> Self {
        self.spec.zero()
    }
    fn one_like(&self) -> Self {
        self.spec.one()
    }
    fn is_zero(&self) -> bool {
        self.code == 0
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

/// Dense polynomials over GF(p), little-endian `u64` coefficients.
mod modp {
    pub(super) fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub(super) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y % p) % p;
            }
        }
        trim(out)
    }

    fn inv(a: u64, p: u64) -> u64 {
        let mut acc = 1u64;
        let (mut base, mut e) = (a % p, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    }

    /// Remainder of `a` modulo a nonzero divisor.
    pub(super) fn rem(a: &[u64], divisor: &[u64], p: u64) -> Vec<u64> {
        let d = trim(divisor.to_vec());
        let dl = d.len();
        assert!(dl > 0, "division by the zero polynomial");
        let lead_inv = inv(d[dl - 1], p);
        let mut r = trim(a.to_vec());
        while r.len() >= dl {
            let shift = r.len() - dl;
            let factor = r[r.len() - 1] * lead_inv % p;
            for (i, &c) in d.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - factor * c % p) % p;
            }
            r = trim(r);
        }
        r
    }

    pub(super) fn rem_monic(a: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
        rem(a, modulus, p)
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    fn powmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, f, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), f, p);
            }
            b = rem(&mul(&b, &b, p), f, p);
            e >>= 1;
        }
        acc
    }

    /// Trial division by every monic polynomial of degree `1..=deg/2`.
    pub(super) fn is_irreducible_exhaustive(f: &[u64], p: u64) -> bool {
        let n = f.len() - 1;
        for deg in 1..=n / 2 {
            let count = p.pow(deg as u32);
            for code in 0..count {
                let mut g: Vec<u64> = Vec::with_capacity(deg + 1);
                let mut c = code;
                for _ in 0..deg {
                    g.push(c % p);
                    c /= p;
                }
                g.push(1);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    /// Rabin's test: `x^(p^n) = x mod f` and `gcd(x^(p^(n/r)) - x, f) = 1`
    /// for every prime `r | n`.
    pub(super) fn is_irreducible_rabin(f: &[u64], p: u64) -> bool {
        let n = f.len() - 1;
        let x = vec![0u64, 1];
        let frob = |k: usize| {
            let mut acc = rem(&x, f, p);
            for _ in 0..k {
                acc = powmod(&acc, p, f, p);
            }
            acc
        };
        let minus_x = |mut a: Vec<u64>| {
            a.resize(a.len().max(2), 0);
            a[1] = (a[1] + p - 1) % p;
            trim(a)
        };
        if !minus_x(frob(n)).is_empty() {
            return false;
        }
        let mut primes = Vec::new();
        let mut m = n;
        let mut r = 2;
        while m > 1 {
            if m % r == 0 {
                primes.push(r);
                while m % r == 0 {
                    m /= r;
                }
            }
            r += 1;
        }
        primes.into_iter().all(|r| gcd(&minus_x(frob(n / r)), f, p).len() == 1)
    }
}
