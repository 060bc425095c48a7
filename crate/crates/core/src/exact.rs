//! Exact integers and rationals together with the p-adic valuation of
//! `Z_(p)`.
//!
//! Rationals are stored in lowest terms with a positive denominator, so
//! structural equality is value equality and the valuation of a rational is
//! the difference of the valuations of its two parts.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An element of the quotient field `Q` of `Z_(p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::from_integer(n.into()))
    }

    /// `numerator / denominator`, reduced. Fails on a zero denominator.
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>) -> Result<Self> {
        let den = denominator.into();
        if den.is_zero() {
            return Err(Error::InvalidRational("zero denominator".into()));
        }
        Ok(ExactRational(BigRational::new(numerator.into(), den)))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    /// Always positive.
    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.abs())
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(ExactRational(self.0.recip()))
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        ExactRational(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for ExactRational {
    fn from(value: BigRational) -> Self {
        ExactRational(value)
    }
}

impl From<BigInt> for ExactRational {
    fn from(value: BigInt) -> Self {
        ExactRational::from_integer(value)
    }
}

impl From<i64> for ExactRational {
    fn from(value: i64) -> Self {
        ExactRational::from_integer(value)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}

impl fmt::Display for ExactRational {
    /// Canonical form: `a` for integers, `a/b` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for ExactRational {
    type Err = Error;

    /// Accepts decimal integers (`-12`) and fractions (`3/4`, `-3/-4`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidRational(s.to_string());
        let parse_int = |t: &str| -> Result<BigInt> {
            let t = t.trim();
            let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            BigInt::from_str(t).map_err(|_| bad())
        };
        match s.split_once('/') {
            None => Ok(ExactRational::from_integer(parse_int(s)?)),
            Some((num, den)) => {
                let den = parse_int(den)?;
                if den.is_zero() {
                    return Err(bad());
                }
                ExactRational::new(parse_int(num)?, den)
            }
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A value in `Z ∪ {∞}`; `∞` is reserved for the valuation of zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtValuation {
    Finite(i64),
    Infinite,
}

impl ExtValuation {
    pub fn is_infinite(self) -> bool {
        matches!(self, ExtValuation::Infinite)
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            ExtValuation::Finite(v) => Some(v),
            ExtValuation::Infinite => None,
        }
    }

    pub fn min(self, other: Self) -> Self {
        std::cmp::min(self, other)
    }
}

impl PartialOrd for ExtValuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtValuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtValuation::Finite(a), ExtValuation::Finite(b)) => a.cmp(b),
            (ExtValuation::Finite(_), ExtValuation::Infinite) => Ordering::Less,
            (ExtValuation::Infinite, ExtValuation::Finite(_)) => Ordering::Greater,
            (ExtValuation::Infinite, ExtValuation::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for ExtValuation {
    type Output = ExtValuation;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtValuation::Finite(a), ExtValuation::Finite(b)) => ExtValuation::Finite(a + b),
            _ => ExtValuation::Infinite,
        }
    }
}

impl fmt::Display for ExtValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValuation::Finite(v) => write!(f, "{v}"),
            ExtValuation::Infinite => f.write_str("inf"),
        }
    }
}

/// The discrete valuation ring `Z_(p)`: a prime `p < 2^64` whose residue
/// field has `q = p` elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicContext {
    p: u64,
    p_big: BigInt,
}

impl PadicContext {
    /// Rejects non-primes (deterministic Miller-Rabin over the full `u64`
    /// range).
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        Ok(PadicContext {
            p,
            p_big: BigInt::from(p),
        })
    }

    /// Parses a decimal prime; anything at or above `2^64` is rejected.
    pub fn from_decimal(s: &str) -> Result<Self> {
        let value = BigUint::from_str(s.trim()).map_err(|_| Error::NotPrime(s.to_string()))?;
        match value.to_u64() {
            Some(p) => PadicContext::new(p),
            None => Err(Error::PrimeTooLarge(value.to_string())),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn p_big(&self) -> &BigInt {
        &self.p_big
    }

    /// Size of the residue field.
    pub fn q(&self) -> u64 {
        self.p
    }

    /// `p^e` as a big integer.
    pub fn power(&self, e: u32) -> BigInt {
        num_traits::pow(self.p_big.clone(), e as usize)
    }
}

/// `v_p(n)` for an integer; `None` when `n = 0`.
pub fn int_valuation(n: &BigInt, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    if p == 2 {
        return n.trailing_zeros();
    }
    let mut m = n.magnitude().clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&BigUint::from(p));
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

pub fn valuation(x: &ExactRational, ctx: &PadicContext) -> ExtValuation {
    match int_valuation(x.numerator(), ctx.p()) {
        None => ExtValuation::Infinite,
        Some(vn) => {
            let vd = int_valuation(x.denominator(), ctx.p()).unwrap_or(0);
            ExtValuation::Finite(vn as i64 - vd as i64)
        }
    }
}

/// Membership in `Z_(p)`.
pub fn is_p_integral(x: &ExactRational, ctx: &PadicContext) -> bool {
    valuation(x, ctx) >= ExtValuation::Finite(0)
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

/// Deterministic Miller-Rabin; the first twelve prime bases are a proven
/// witness set for all 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `≤ bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&k| is_prime_u64(k)).collect()
}

/// Smallest prime `≥ start`.
pub fn next_prime(start: u64) -> u64 {
    let mut k = start.max(2);
    while !is_prime_u64(k) {
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn valuation_examples() {
        let p3 = PadicContext::new(3).unwrap();
        let p5 = PadicContext::new(5).unwrap();
        assert_eq!(valuation(&q("9"), &p3), ExtValuation::Finite(2));
        assert_eq!(valuation(&q("0"), &p5), ExtValuation::Infinite);
        assert_eq!(valuation(&q("10/7"), &p3), ExtValuation::Finite(0));
        assert_eq!(valuation(&q("2/27"), &p3), ExtValuation::Finite(-3));
    }

    #[test]
    fn integrality_examples() {
        let p3 = PadicContext::new(3).unwrap();
        assert!(is_p_integral(&q("1/2"), &p3));
        assert!(!is_p_integral(&q("1/3"), &p3));
        assert!(is_p_integral(&q("0"), &p3));
    }

    #[test]
    fn context_rejects_composites_and_large_inputs() {
        assert!(PadicContext::new(1).is_err());
        assert!(PadicContext::new(91).is_err());
        assert!(PadicContext::new(18446744073709551557).is_ok());
        assert!(matches!(
            PadicContext::from_decimal("18446744073709551629"),
            Err(Error::PrimeTooLarge(_))
        ));
        assert_eq!(PadicContext::from_decimal("7").unwrap().q(), 7);
    }

    #[test]
    fn primality_agrees_with_trial_division() {
        for n in 0u64..5000 {
            let trial = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime_u64(n), trial, "n = {n}");
        }
        // strong pseudoprimes to several small bases
        assert!(!is_prime_u64(3_215_031_751));
        assert!(!is_prime_u64(341_550_071_728_321));
    }

    #[test]
    fn rational_parsing_and_canonical_output() {
        assert_eq!(q("6/4").to_string(), "3/2");
        assert_eq!(q("-6/-4").to_string(), "3/2");
        assert_eq!(q("4/-2").to_string(), "-2");
        assert!("1/0".parse::<ExactRational>().is_err());
        assert!("x".parse::<ExactRational>().is_err());
        assert!("".parse::<ExactRational>().is_err());
    }

    #[test]
    fn ext_valuation_arithmetic() {
        use ExtValuation::*;
        assert_eq!(Finite(2) + Infinite, Infinite);
        assert_eq!(Finite(2).min(Infinite), Finite(2));
        assert!(Finite(i64::MAX) < Infinite);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rational() -> impl Strategy<Value = ExactRational> {
            (-5000i64..5000, 1i64..5000).prop_map(|(a, b)| ExactRational::new(a, b).unwrap())
        }

        fn prime() -> impl Strategy<Value = PadicContext> {
            prop::sample::select(vec![2u64, 3, 5, 7, 11]).prop_map(|p| PadicContext::new(p).unwrap())
        }

        proptest! {
            #[test]
            fn valuation_is_multiplicative(x in rational(), y in rational(), ctx in prime()) {
                prop_assert_eq!(valuation(&(&x * &y), &ctx), valuation(&x, &ctx) + valuation(&y, &ctx));
            }

            #[test]
            fn valuation_is_ultrametric(x in rational(), y in rational(), ctx in prime()) {
                let vx = valuation(&x, &ctx);
                let vy = valuation(&y, &ctx);
                let vs = valuation(&(&x + &y), &ctx);
                prop_assert!(vs >= vx.min(vy));
                if vx != vy {
                    prop_assert_eq!(vs, vx.min(vy));
                }
            }

            #[test]
            fn display_parse_round_trip(x in rational()) {
                let back: ExactRational = x.to_string().parse().unwrap();
                prop_assert_eq!(back, x);
            }
        }
    }
}
