//! Dense univariate polynomials over `Q` and the factored form
//! `f = ∏ g^{m_g}` over `Z_(p)` that every analysis consumes.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{is_p_integral, valuation, ExactRational, ExtValuation, PadicContext};

/// Coefficients are stored lowest degree first with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Polynomial {
    coeffs: Vec<ExactRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<ExactRational>) -> Self {
        while coeffs.last().is_some_and(ExactRational::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    /// Integer coefficients, lowest degree first.
    pub fn from_integers<T: Into<BigInt> + Copy>(coeffs: &[T]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| ExactRational::from_integer(c)).collect())
    }

    pub fn from_integers_big(coeffs: Vec<BigInt>) -> Self {
        Polynomial::new(coeffs.into_iter().map(ExactRational::from).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(ExactRational::one())
    }

    pub fn constant(c: ExactRational) -> Self {
        Polynomial::new(vec![c])
    }

    /// `x - root`.
    pub fn linear(root: impl Into<BigInt>) -> Self {
        Polynomial::new(vec![
            ExactRational::from_integer(-root.into()),
            ExactRational::one(),
        ])
    }

    pub fn coefficients(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: usize) -> ExactRational {
        self.coeffs.get(k).cloned().unwrap_or_else(ExactRational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&ExactRational> {
        self.coeffs.last()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(ExactRational::is_one)
    }

    pub fn evaluate(&self, a: &ExactRational) -> ExactRational {
        self.coeffs
            .iter()
            .rev()
            .fold(ExactRational::zero(), |acc, c| &(&acc * a) + c)
    }

    pub fn scale(&self, c: &ExactRational) -> Self {
        Polynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..len).map(|k| &self.coefficient(k) + &other.coefficient(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..len).map(|k| &self.coefficient(k) - &other.coefficient(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![ExactRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Polynomial::new(out)
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Minimum coefficient valuation; `∞` for the zero polynomial.
    pub fn content_valuation(&self, ctx: &PadicContext) -> ExtValuation {
        self.coeffs
            .iter()
            .map(|c| valuation(c, ctx))
            .min()
            .unwrap_or(ExtValuation::Infinite)
    }

    pub fn is_p_integral(&self, ctx: &PadicContext) -> bool {
        self.coeffs.iter().all(|c| is_p_integral(c, ctx))
    }

    /// Multiplies through by the lcm of the denominators and returns the
    /// integer coefficients together with that lcm.
    pub fn clear_denominators(&self) -> (Vec<BigInt>, BigInt) {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denominator()));
        let ints = self
            .coeffs
            .iter()
            .map(|c| c.numerator() * (&lcm / c.denominator()))
            .collect();
        (ints, lcm)
    }

    /// Integer polynomial with coprime coefficients and positive leading
    /// coefficient, associated to `self` over `Q`.
    pub fn primitive_integer_form(&self) -> Vec<BigInt> {
        let (mut ints, _) = self.clear_denominators();
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if !content.is_zero() {
            for c in &mut ints {
                *c = &*c / &content;
            }
        }
        if ints.last().is_some_and(Signed::is_negative) {
            for c in &mut ints {
                *c = -&*c;
            }
        }
        ints
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let mag = c.abs();
            if k == 0 {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one() {
                if mag.is_integer() {
                    write!(f, "{mag}")?;
                } else {
                    write!(f, "{mag}*")?;
                }
            }
            f.write_str("x")?;
            if k > 1 {
                write!(f, "^{k}")?;
            }
        }
        Ok(())
    }
}

impl From<Polynomial> for String {
    fn from(p: Polynomial) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Polynomial {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        crate::cli::parse::parse_polynomial(&s)
    }
}

/// `f(a)`, exactly.
pub fn evaluate(f: &Polynomial, a: &ExactRational) -> ExactRational {
    f.evaluate(a)
}

/// Primitive at `p`: the coefficients generate `Z_(p)`.
pub fn is_primitive_at(f: &Polynomial, ctx: &PadicContext) -> bool {
    f.content_valuation(ctx) == ExtValuation::Finite(0)
}

/// `h = u·g` for a constant unit `u` of `Z_(p)`.
pub fn are_associated(g: &Polynomial, h: &Polynomial, ctx: &PadicContext) -> bool {
    let (Some(lg), Some(lh)) = (g.leading(), h.leading()) else {
        return false;
    };
    if g.degree() != h.degree() {
        return false;
    }
    let u = lh * &lg.recip().expect("leading coefficient is nonzero");
    valuation(&u, ctx) == ExtValuation::Finite(0) && g.scale(&u) == *h
}

/// Every coefficient of `g - h` has valuation at least `k`.
pub fn congruent_mod_power(g: &Polynomial, h: &Polynomial, k: u32, ctx: &PadicContext) -> bool {
    g.sub(h).content_valuation(ctx) >= ExtValuation::Finite(k as i64)
}

/// One irreducible divisor `g` together with its multiplicity `m_g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub poly: Polynomial,
    pub multiplicity: u32,
}

/// `f = ∏ g^{m_g}` over `Z_(p)` with a fixed order on the divisors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredPolynomial {
    ctx: PadicContext,
    factors: Vec<Factor>,
}

impl FactoredPolynomial {
    /// Builds the factored form and rejects structural defects (constant or
    /// non-integral factors, associated factors, imprimitive product).
    pub fn new(ctx: PadicContext, factors: Vec<(Polynomial, u32)>) -> Result<Self> {
        let fp = FactoredPolynomial::new_unchecked(ctx, factors);
        validate_factored(&fp)?;
        Ok(fp)
    }

    pub fn new_unchecked(ctx: PadicContext, factors: Vec<(Polynomial, u32)>) -> Self {
        FactoredPolynomial {
            ctx,
            factors: factors
                .into_iter()
                .map(|(poly, multiplicity)| Factor { poly, multiplicity })
                .collect(),
        }
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn polys(&self) -> impl Iterator<Item = &Polynomial> {
        self.factors.iter().map(|f| &f.poly)
    }

    pub fn multiplicities(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.multiplicity as u64).collect()
    }

    pub fn expand(&self) -> Polynomial {
        expand(self)
    }

    pub fn multiplicity_gcd(&self) -> u64 {
        multiplicity_gcd(self)
    }
}

impl fmt::Display for FactoredPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "({})", factor.poly)?;
            if factor.multiplicity != 1 {
                write!(f, "^{}", factor.multiplicity)?;
            }
        }
        Ok(())
    }
}

pub fn expand(fp: &FactoredPolynomial) -> Polynomial {
    fp.factors
        .iter()
        .fold(Polynomial::one(), |acc, f| acc.mul(&f.poly.pow(f.multiplicity)))
}

pub fn multiplicity_gcd(fp: &FactoredPolynomial) -> u64 {
    fp.factors
        .iter()
        .fold(0u64, |acc, f| acc.gcd(&(f.multiplicity as u64)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Unverified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn push(&mut self, name: impl Into<String>, status: CheckStatus, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status,
            detail: detail.into(),
        });
    }

    /// Non-structural findings (reducible or uncertified factors).
    pub fn warnings(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status != CheckStatus::Pass)
    }
}

/// Structural checks are hard errors; irreducibility of each factor is
/// certified where a cheap criterion applies and reported otherwise.
pub fn validate_factored(fp: &FactoredPolynomial) -> Result<ValidationReport> {
    let ctx = &fp.ctx;
    let mut report = ValidationReport::default();
    if fp.factors.is_empty() {
        return Err(Error::Validation("no factors given".into()));
    }
    for (i, factor) in fp.factors.iter().enumerate() {
        let g = &factor.poly;
        if factor.multiplicity == 0 {
            return Err(Error::Validation(format!("factor {} ({g}) has multiplicity 0", i + 1)));
        }
        if g.is_constant() {
            return Err(Error::Validation(format!("factor {} ({g}) is constant", i + 1)));
        }
        if !g.is_p_integral(ctx) {
            return Err(Error::Validation(format!(
                "factor {} ({g}) has a coefficient outside Z_({})",
                i + 1,
                ctx.p()
            )));
        }
        report.push(format!("factor {} p-integral", i + 1), CheckStatus::Pass, g.to_string());
    }
    for i in 0..fp.factors.len() {
        for j in i + 1..fp.factors.len() {
            let (g, h) = (&fp.factors[i].poly, &fp.factors[j].poly);
            if are_associated(g, h, ctx) {
                return Err(Error::Validation(format!(
                    "associated factors {} ({g}) and {} ({h})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    report.push("pairwise non-associated", CheckStatus::Pass, "");
    // f is primitive iff every factor is (Gauss's lemma over Z_(p)).
    for (i, factor) in fp.factors.iter().enumerate() {
        if !is_primitive_at(&factor.poly, ctx) {
            return Err(Error::Validation(format!(
                "factor {} ({}) is not primitive at {}, so neither is the product",
                i + 1,
                factor.poly,
                ctx.p()
            )));
        }
    }
    report.push("product primitive", CheckStatus::Pass, "");
    for (i, factor) in fp.factors.iter().enumerate() {
        let (status, detail) = irreducibility_over_q(&factor.poly);
        report.push(format!("factor {} irreducible over Q", i + 1), status, detail);
    }
    Ok(report)
}

const ROOT_TEST_LIMIT: u64 = 1_000_000_000_000;
const EISENSTEIN_TRIAL_LIMIT: u64 = 100_000;

/// Best-effort certificate: linear factors, Eisenstein at a prime found by
/// trial division, or the rational-root test (decisive up to degree 3).
pub fn irreducibility_over_q(g: &Polynomial) -> (CheckStatus, String) {
    let Some(deg) = g.degree() else {
        return (CheckStatus::Fail, "zero polynomial".into());
    };
    if deg == 0 {
        return (CheckStatus::Fail, "constant".into());
    }
    if deg == 1 {
        return (CheckStatus::Pass, "linear".into());
    }
    let ints = g.primitive_integer_form();
    if let Some(q) = eisenstein_prime(&ints) {
        return (CheckStatus::Pass, format!("Eisenstein at {q}"));
    }
    match rational_root(&ints) {
        Some(Some(root)) => (CheckStatus::Fail, format!("rational root {root}")),
        Some(None) if deg <= 3 => (CheckStatus::Pass, "no rational roots".into()),
        Some(None) => (
            CheckStatus::Unverified,
            "no rational roots, but degree > 3 and no Eisenstein prime found".into(),
        ),
        None => (
            CheckStatus::Unverified,
            "coefficients too large for the rational-root test".into(),
        ),
    }
}

fn eisenstein_prime(ints: &[BigInt]) -> Option<u64> {
    let (lead, rest) = ints.split_last()?;
    let common = rest.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if common.is_zero() {
        return None;
    }
    let mut m = common.magnitude().clone();
    let mut d = 2u64;
    while d <= EISENSTEIN_TRIAL_LIMIT && !m.is_one() {
        if (&m % d).is_zero() {
            while (&m % d).is_zero() {
                m /= d;
            }
            let dq = BigInt::from(d);
            if !(lead % &dq).is_zero() && !(&ints[0] % (&dq * &dq)).is_zero() {
                return Some(d);
            }
        }
        d += 1;
    }
    None
}

fn small_divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out
}

/// `Some(Some(r))` when a rational root exists, `Some(None)` when none does,
/// `None` when the coefficients are too large to decide cheaply.
fn rational_root(ints: &[BigInt]) -> Option<Option<ExactRational>> {
    if ints[0].is_zero() {
        return Some(Some(ExactRational::zero()));
    }
    let c0 = ints[0].magnitude().to_u64().filter(|&c| c <= ROOT_TEST_LIMIT)?;
    let cd = ints.last()?.magnitude().to_u64().filter(|&c| c <= ROOT_TEST_LIMIT)?;
    let poly = Polynomial::from_integers_big(ints.to_vec());
    for a in small_divisors(c0) {
        for b in small_divisors(cd) {
            for sign in [1i64, -1] {
                let r = ExactRational::new(BigInt::from(a) * sign, BigInt::from(b)).ok()?;
                if poly.evaluate(&r).is_zero() {
                    return Some(Some(r));
                }
            }
        }
    }
    Some(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PadicContext {
        PadicContext::new(p).unwrap()
    }

    fn z3_example() -> FactoredPolynomial {
        FactoredPolynomial::new(
            ctx(3),
            vec![
                (Polynomial::from_integers(&[9, 0, 1]), 1),
                (Polynomial::linear(5), 3),
                (Polynomial::linear(1), 1),
                (Polynomial::linear(7), 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let f = z3_example().expand();
        assert_eq!(evaluate(&f, &ExactRational::zero()), ExactRational::from(-7875));
        let x = Polynomial::from_integers(&[0, 1]);
        let half = ExactRational::new(3, 2).unwrap();
        assert_eq!(evaluate(&x, &half), half);
        let g = Polynomial::from_integers(&[0, -1, 1]);
        assert!(evaluate(&g, &ExactRational::one()).is_zero());
    }

    #[test]
    fn expand_examples() {
        let fp = FactoredPolynomial::new(
            ctx(2),
            vec![(Polynomial::from_integers(&[0, 1]), 1), (Polynomial::linear(1), 1)],
        )
        .unwrap();
        assert_eq!(fp.expand(), Polynomial::from_integers(&[0, -1, 1]));
        let cube = FactoredPolynomial::new(ctx(3), vec![(Polynomial::linear(5), 3)]).unwrap();
        assert_eq!(cube.expand(), Polynomial::from_integers(&[-125, 75, -15, 1]));
        let f = z3_example().expand();
        assert_eq!(f.degree(), Some(7));
    }

    #[test]
    fn expand_agrees_with_factorwise_evaluation() {
        let fp = z3_example();
        let f = fp.expand();
        for a in [-7i64, -2, 0, 3, 4, 11, 13, 29, 100, 1234] {
            let a = ExactRational::from(a);
            let direct = fp.factors().iter().fold(ExactRational::one(), |acc, fac| {
                &acc * &fac.poly.evaluate(&a).pow(fac.multiplicity)
            });
            assert_eq!(f.evaluate(&a), direct);
        }
    }

    #[test]
    fn primitivity_examples() {
        let c = ctx(3);
        assert!(!is_primitive_at(&Polynomial::from_integers(&[9, 3]), &c));
        assert!(is_primitive_at(&Polynomial::from_integers(&[1, 3]), &c));
        assert!(!is_primitive_at(&Polynomial::zero(), &c));
    }

    #[test]
    fn association_examples() {
        let c = ctx(3);
        let g = Polynomial::linear(1);
        assert!(are_associated(&g, &Polynomial::from_integers(&[-2, 2]), &c));
        assert!(!are_associated(&g, &Polynomial::from_integers(&[-3, 3]), &c));
        assert!(!are_associated(&g, &Polynomial::linear(2), &c));
    }

    #[test]
    fn congruence_examples() {
        let c = ctx(2);
        let g = Polynomial::from_integers(&[8, 1]);
        let h = Polynomial::from_integers(&[0, 1]);
        assert!(congruent_mod_power(&g, &h, 3, &c));
        assert!(!congruent_mod_power(&g, &h, 4, &c));
        assert!(congruent_mod_power(&g, &g, 50, &c));
    }

    #[test]
    fn multiplicity_gcd_examples() {
        let mk = |ms: &[u32]| {
            FactoredPolynomial::new_unchecked(
                ctx(3),
                ms.iter().enumerate().map(|(i, &m)| (Polynomial::linear(i as i64), m)).collect(),
            )
        };
        assert_eq!(mk(&[1, 3, 1, 1]).multiplicity_gcd(), 1);
        assert_eq!(mk(&[2, 4]).multiplicity_gcd(), 2);
        assert_eq!(mk(&[5]).multiplicity_gcd(), 5);
    }

    #[test]
    fn validation_examples() {
        let err = FactoredPolynomial::new(
            ctx(3),
            vec![(Polynomial::linear(1), 1), (Polynomial::from_integers(&[-2, 2]), 1)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("associated")));

        let report = validate_factored(&z3_example()).unwrap();
        assert!(report.warnings().next().is_none(), "{report:?}");

        let reducible = FactoredPolynomial::new_unchecked(
            ctx(3),
            vec![(Polynomial::from_integers(&[-1, 0, 1]), 1)],
        );
        let report = validate_factored(&reducible).unwrap();
        let bad: Vec<_> = report.warnings().collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].status, CheckStatus::Fail);
    }

    #[test]
    fn imprimitive_and_constant_factors_are_rejected() {
        assert!(FactoredPolynomial::new(ctx(3), vec![(Polynomial::from_integers(&[3, 3]), 1)]).is_err());
        assert!(FactoredPolynomial::new(ctx(3), vec![(Polynomial::from_integers(&[2]), 1)]).is_err());
        let non_integral = Polynomial::new(vec![ExactRational::new(1, 3).unwrap(), ExactRational::one()]);
        assert!(FactoredPolynomial::new(ctx(3), vec![(non_integral, 1)]).is_err());
    }

    #[test]
    fn irreducibility_certificates() {
        let eis = Polynomial::from_integers(&[6, 3, 0, 1]);
        assert_eq!(irreducibility_over_q(&eis).0, CheckStatus::Pass);
        let quartic = Polynomial::from_integers(&[1, 0, 0, 0, 1]);
        assert_eq!(irreducibility_over_q(&quartic).0, CheckStatus::Unverified);
        let rooted = Polynomial::from_integers(&[-2, 0, 0, 0, 0, 1, 1]);
        assert_eq!(irreducibility_over_q(&rooted).0, CheckStatus::Fail);
        let half_root = Polynomial::from_integers(&[-1, 2, 0, 0, 1]).mul(&Polynomial::from_integers(&[-1, 2]));
        assert_eq!(irreducibility_over_q(&half_root).0, CheckStatus::Fail);
    }

    #[test]
    fn display_is_parseable() {
        let f = z3_example();
        assert_eq!(f.to_string(), "(x^2 + 9)*(x - 5)^3*(x - 1)*(x - 7)");
        let g = Polynomial::new(vec![ExactRational::new(-1, 2).unwrap(), ExactRational::from(-3)]);
        assert_eq!(g.to_string(), "-3x - 1/2");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn poly() -> impl Strategy<Value = Polynomial> {
            prop::collection::vec(-20i64..20, 1..5).prop_map(|c| Polynomial::from_integers(&c))
        }

        fn nonzero_poly() -> impl Strategy<Value = Polynomial> {
            poly().prop_filter("nonzero", |p| !p.is_zero())
        }

        proptest! {
            #[test]
            fn expansion_is_multiplicative(a in prop::collection::vec((nonzero_poly(), 1u32..3), 1..3),
                                           b in prop::collection::vec((nonzero_poly(), 1u32..3), 1..3)) {
                let c = ctx(5);
                let fa = FactoredPolynomial::new_unchecked(c.clone(), a.clone());
                let fb = FactoredPolynomial::new_unchecked(c.clone(), b.clone());
                let both = FactoredPolynomial::new_unchecked(c, a.into_iter().chain(b).collect());
                prop_assert_eq!(both.expand(), fa.expand().mul(&fb.expand()));
            }

            #[test]
            fn association_is_an_equivalence(g in nonzero_poly(), u in prop::sample::select(vec![1i64, -1, 2, 4, -7]),
                                              w in prop::sample::select(vec![1i64, 3, -2, 8])) {
                let c = ctx(3);
                let h = g.scale(&ExactRational::from(u));
                let k = h.scale(&ExactRational::from(w));
                prop_assert!(are_associated(&g, &g, &c));
                prop_assert_eq!(are_associated(&g, &h, &c), are_associated(&h, &g, &c));
                if are_associated(&g, &h, &c) && are_associated(&h, &k, &c) {
                    prop_assert!(are_associated(&g, &k, &c));
                }
                prop_assert_eq!(are_associated(&g, &k, &c), (u * w) % 3 != 0);
            }

            #[test]
            fn valuation_of_product_is_weighted_sum(a in -200i64..200) {
                let fp = z3_example();
                let x = ExactRational::from(a);
                let values: Vec<_> = fp.factors().iter().map(|f| f.poly.evaluate(&x)).collect();
                prop_assume!(values.iter().all(|v| !v.is_zero()));
                let c = fp.ctx();
                let weighted = fp.factors().iter().zip(&values).fold(ExtValuation::Finite(0), |acc, (f, v)| {
                    acc + ExtValuation::Finite(f.multiplicity as i64 * valuation(v, c).finite().unwrap())
                });
                prop_assert_eq!(valuation(&fp.expand().evaluate(&x), c), weighted);
            }
        }
    }
}
