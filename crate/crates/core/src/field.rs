//! Exact scalars: arbitrary-precision rationals and prime fields.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("field mismatch: {0} vs {1}")]
    Mismatch(FieldSpec, FieldSpec),
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse scalar {text:?} over {field}")]
    Parse { text: String, field: FieldSpec },
    #[error("binary operation {0:?} needs a second operand")]
    MissingOperand(ScalarOp),
}

/// A prime modulus, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if is_prime(p) {
            Ok(PrimeModulus(p))
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

/// The coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    Prime(PrimeModulus),
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "GF({})", p.0),
        }
    }
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        PrimeModulus::new(p).map(FieldSpec::Prime)
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            FieldSpec::Prime(p) => Scalar::Residue {
                value: (n as i128).rem_euclid(p.0 as i128) as u64,
                modulus: p,
            },
        }
    }

    /// `num / den` in this field; over a prime field this is `num * den^-1`.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Scalar, FieldError> {
        if den == 0 {
            return Err(FieldError::ZeroDenominator);
        }
        match *self {
            FieldSpec::Rationals => Ok(Scalar::Rational(BigRational::new(
                BigInt::from(num),
                BigInt::from(den),
            ))),
            FieldSpec::Prime(_) => {
                let d = self.from_i64(den);
                let inv = d.inv()?;
                Ok(&self.from_i64(num) * &inv)
            }
        }
    }

    /// Parses the textual encoding: `"p/q"` or `"n"` for rationals, `"k"` with
    /// `0 <= k < p` for prime fields.
    pub fn parse(&self, text: &str) -> Result<Scalar, FieldError> {
        let err = || FieldError::Parse {
            text: text.to_string(),
            field: *self,
        };
        match *self {
            FieldSpec::Rationals => {
                let (num, den) = match text.split_once('/') {
                    Some((n, d)) => (n, Some(d)),
                    None => (text, None),
                };
                let num = BigInt::from_str(num).map_err(|_| err())?;
                let den = match den {
                    Some(d) => {
                        if d.starts_with(['+', '-']) {
                            return Err(err());
                        }
                        BigInt::from_str(d).map_err(|_| err())?
                    }
                    None => BigInt::one(),
                };
                if den.is_zero() {
                    return Err(FieldError::ZeroDenominator);
                }
                Ok(Scalar::Rational(BigRational::new(num, den)))
            }
            FieldSpec::Prime(p) => {
                if !text.bytes().all(|b| b.is_ascii_digit()) || text.is_empty() {
                    return Err(err());
                }
                let value = u64::from_str(text).map_err(|_| err())?;
                if value >= p.0 {
                    return Err(err());
                }
                Ok(Scalar::Residue { value, modulus: p })
            }
        }
    }
}

/// An exact field element in canonical form.
///
/// Rationals are kept in lowest terms with a positive denominator (guaranteed
/// by `BigRational`), residues are kept in `[0, p)`, so derived equality is
/// equality of field elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue { value: u64, modulus: PrimeModulus },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarOp {
    Add,
    Mul,
    Neg,
    Inv,
}

/// Applies `op` to `x` (and `y` for the binary operations).
pub fn scalar_arith(op: ScalarOp, x: &Scalar, y: Option<&Scalar>) -> Result<Scalar, FieldError> {
    match op {
        ScalarOp::Add => x.checked_add(y.ok_or(FieldError::MissingOperand(op))?),
        ScalarOp::Mul => x.checked_mul(y.ok_or(FieldError::MissingOperand(op))?),
        ScalarOp::Neg => Ok(-x),
        ScalarOp::Inv => x.inv(),
    }
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::Rationals,
            Scalar::Residue { modulus, .. } => FieldSpec::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    fn same_field(&self, other: &Scalar) -> Result<(), FieldError> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(FieldError::Mismatch(self.field(), other.field()))
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.same_field(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Residue { value: a, modulus }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: ((*a as u128 + *b as u128) % modulus.0 as u128) as u64,
                    modulus: *modulus,
                }
            }
            _ => unreachable!("fields already compared"),
        })
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.same_field(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Residue { value: a, modulus }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: mul_mod(*a, *b, modulus.0),
                    modulus: *modulus,
                }
            }
            _ => unreachable!("fields already compared"),
        })
    }

    pub fn inv(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        Ok(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: pow_mod(*value, modulus.0 - 2, modulus.0),
                modulus: *modulus,
            },
        })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

// The operator forms panic on a field mismatch. Algebra code checks fields once
// at element boundaries and then uses these.
impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.checked_add(rhs).expect("scalar field mismatch")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.checked_mul(rhs).expect("scalar field mismatch")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: if *value == 0 { 0 } else { modulus.0 - value },
                modulus: *modulus,
            },
        }
    }
}

impl Scalar {
    /// True if this is a rational with negative sign. Always false for residues.
    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Rational(r) if r.is_negative())
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        FieldSpec::Rationals.from_ratio(n, d).unwrap()
    }

    #[test]
    fn rational_sum() {
        assert_eq!(&q(1, 2) + &q(1, 3), q(5, 6));
        assert_eq!((&q(1, 2) + &q(1, 3)).to_string(), "5/6");
    }

    #[test]
    fn prime_product() {
        let f = FieldSpec::prime(5).unwrap();
        let prod = scalar_arith(ScalarOp::Mul, &f.from_i64(3), Some(&f.from_i64(4))).unwrap();
        assert_eq!(prod, f.from_i64(2));
    }

    #[test]
    fn inverse_of_zero_fails() {
        let err = scalar_arith(ScalarOp::Inv, &FieldSpec::Rationals.zero(), None).unwrap_err();
        assert_eq!(err.to_string(), "zero has no inverse");
        let f = FieldSpec::prime(7).unwrap();
        assert_eq!(f.zero().inv(), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn mismatched_fields_rejected() {
        let f = FieldSpec::prime(5).unwrap();
        assert!(matches!(
            q(1, 2).checked_add(&f.one()),
            Err(FieldError::Mismatch(..))
        ));
        let g = FieldSpec::prime(7).unwrap();
        assert!(f.one().checked_mul(&g.one()).is_err());
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
        assert_eq!(FieldSpec::prime(9), Err(FieldError::NotPrime(9)));
    }

    #[test]
    fn parsing_and_display() {
        let f = FieldSpec::Rationals;
        assert_eq!(f.parse("-6/4").unwrap().to_string(), "-3/2");
        assert_eq!(f.parse("7").unwrap().to_string(), "7");
        assert_eq!(f.parse("4/2").unwrap().to_string(), "2");
        assert!(f.parse("1/0").is_err());
        assert!(f.parse("1/-2").is_err());
        assert!(f.parse("x").is_err());
        let p = FieldSpec::prime(5).unwrap();
        assert_eq!(p.parse("4").unwrap(), p.from_i64(-1));
        assert!(p.parse("5").is_err());
        assert!(p.parse("-1").is_err());
    }

    #[test]
    fn prime_ratio() {
        let p = FieldSpec::prime(5).unwrap();
        // 1/2 = 3 mod 5
        assert_eq!(p.from_ratio(1, 2).unwrap(), p.from_i64(3));
        assert_eq!(p.from_ratio(1, 5), Err(FieldError::ZeroInverse));
    }

    fn rational() -> impl Strategy<Value = Scalar> {
        (-20i64..20, 1i64..8).prop_map(|(n, d)| q(n, d))
    }

    fn residue() -> impl Strategy<Value = Scalar> {
        (0i64..13).prop_map(|n| FieldSpec::prime(13).unwrap().from_i64(n))
    }

    macro_rules! field_axioms {
        ($name:ident, $arb:expr) => {
            mod $name {
                use super::*;
                proptest! {
                    #[test]
                    fn commutative(x in $arb, y in $arb) {
                        prop_assert_eq!(&x + &y, &y + &x);
                        prop_assert_eq!(&x * &y, &y * &x);
                    }

                    #[test]
                    fn associative(x in $arb, y in $arb, z in $arb) {
                        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
                        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
                    }

                    #[test]
                    fn distributive(x in $arb, y in $arb, z in $arb) {
                        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
                    }

                    #[test]
                    fn inverses(x in $arb) {
                        prop_assert!((&x + &(-&x)).is_zero());
                        if !x.is_zero() {
                            prop_assert!((&x * &x.inv().unwrap()).is_one());
                        }
                    }

                    #[test]
                    fn equality_respects_addition(x in $arb, z in $arb) {
                        let y = x.field().parse(&x.to_string()).unwrap();
                        prop_assert_eq!(&x, &y);
                        prop_assert_eq!(&x + &z, &y + &z);
                    }
                }
            }
        };
    }

    field_axioms!(rationals, rational());
    field_axioms!(gf13, residue());
}
