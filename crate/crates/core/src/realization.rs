//! Extremal families: irreducible `F` whose least non-uniquely factoring
//! power is exactly `(n+1)((n−1)^{r−1} + (n−1)^{r−2})`.
//!
//! A product `∏ h_j` of linear factors is laid out over a complete residue
//! system modulo `p` so that its reduced fdp matrix is bidiagonal; each
//! `h_j` is then replaced by an Eisenstein polynomial `g_j ≡ h_j` modulo a
//! high power of every small prime.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::classify::{analyze, Analysis};
use crate::error::{Error, Result};
use crate::exact::{int_valuation, next_prime, primes_up_to, ExactRational, PadicContext};
use crate::fixdiv::{Engine, DEFAULT_DEPTH_CAP};
use crate::poly::{congruent_mod_power, FactoredPolynomial, Polynomial};
use crate::powerfac::{min_nonunique_power, OracleMode, OracleResult};

/// One `h_j` as a product of `(x − root)^e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearProduct {
    pub factors: Vec<LinearFactor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearFactor {
    #[serde(with = "crate::json::string")]
    pub root: BigInt,
    pub exponent: u32,
}

impl LinearProduct {
    fn new(factors: &[(&BigInt, u32)]) -> Self {
        LinearProduct {
            factors: factors
                .iter()
                .filter(|(_, e)| *e > 0)
                .map(|(root, exponent)| LinearFactor {
                    root: (*root).clone(),
                    exponent: *exponent,
                })
                .collect(),
        }
    }

    pub fn expand(&self) -> Polynomial {
        self.factors.iter().fold(Polynomial::one(), |acc, f| {
            acc.mul(&Polynomial::linear(f.root.clone()).pow(f.exponent))
        })
    }

    pub fn degree(&self) -> u64 {
        self.factors.iter().map(|f| f.exponent as u64).sum()
    }
}

impl std::fmt::Display for LinearProduct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "({})", Polynomial::linear(factor.root.clone()))?;
            if factor.exponent != 1 {
                write!(f, "^{}", factor.exponent)?;
            }
        }
        Ok(())
    }
}

/// Data of the congruence step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrtData {
    /// Total degree of the family.
    pub d: u64,
    /// Every prime `ℓ ≤ max(d, p)` with `v_ℓ` of the fixed divisor of `∏ h_j`.
    pub small_primes: Vec<(u64, u64)>,
    /// `∏ ℓ^{e_ℓ + n + 2}`.
    #[serde(with = "crate::json::string")]
    pub modulus: BigInt,
    /// The Eisenstein prime.
    pub eisenstein_prime: u64,
    /// `g_j ≡ h_j` modulo `p^congruence_exponent`.
    pub congruence_exponent: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationSpec {
    pub r: u64,
    pub n: u64,
    pub p: u64,
    /// Product of the primes below `p`; the residues are its multiples.
    #[serde(with = "crate::json::string")]
    pub primorial: BigInt,
    #[serde(with = "crate::json::string_vec")]
    pub w: Vec<BigInt>,
    #[serde(with = "crate::json::string_vec")]
    pub a: Vec<BigInt>,
    #[serde(with = "crate::json::string_vec")]
    pub z: Vec<BigInt>,
    #[serde(with = "crate::json::string_vec")]
    pub b: Vec<BigInt>,
    #[serde(with = "crate::json::string_vec")]
    pub c: Vec<BigInt>,
    pub h_family: Vec<LinearProduct>,
    pub g_family: Vec<Polynomial>,
    pub crt: Option<CrtData>,
    #[serde(with = "crate::json::string")]
    pub expected_s: BigUint,
}

pub fn expected_s(r: u64, n: u64) -> Result<BigUint> {
    if r < 2 || n < 2 {
        return Err(Error::Precondition(format!("need r, n >= 2, got r = {r}, n = {n}")));
    }
    let base = BigUint::from(n - 1);
    let r = u32::try_from(r).map_err(|_| Error::Precondition("r is too large".into()))?;
    Ok(BigUint::from(n + 1) * (Pow::pow(&base, r - 1) + Pow::pow(&base, r - 2)))
}

/// `p` is the least prime `≥ r + 2`; residues are `M·0, …, M·(p−1)` with `M`
/// the product of the primes below `p`.
pub fn choose_parameters(r: u64, n: u64) -> Result<RealizationSpec> {
    let expected = expected_s(r, n)?;
    let p = next_prime(r + 2);
    let primorial: BigInt = primes_up_to(p - 1).into_iter().map(BigInt::from).product();
    let residues: Vec<BigInt> = (0..p).map(|i| &primorial * i).collect();
    let r_us = r as usize;
    let w = residues[..r_us].to_vec();
    let a = residues[r_us..r_us + 2].to_vec();
    let z = residues[r_us + 2..].to_vec();
    let pb = BigInt::from(p);
    Ok(RealizationSpec {
        r,
        n,
        p,
        primorial,
        b: w.iter().map(|x| x + &pb).collect(),
        c: a.iter().map(|x| x + &pb).collect(),
        w,
        a,
        z,
        h_family: Vec::new(),
        g_family: Vec::new(),
        crt: None,
        expected_s: expected,
    })
}

/// The `r + 1` products `h_1, …, h_{r+1}`; for `r = 2` the middle member is
/// `(x−b_1)^{n−1}(x−c_2)^{n+1}`.
pub fn build_h_family(spec: &RealizationSpec) -> Vec<LinearProduct> {
    let (r, n) = (spec.r as usize, spec.n as u32);
    let (b, c) = (&spec.b, &spec.c);
    let mut out = Vec::with_capacity(r + 1);
    out.push(LinearProduct::new(&[(&b[0], 1), (&c[0], n + 1)]));
    if r == 2 {
        out.push(LinearProduct::new(&[(&b[0], n - 1), (&c[1], n + 1)]));
    } else {
        out.push(LinearProduct::new(&[(&b[0], n - 1), (&b[1], 1), (&c[1], n + 1)]));
        for j in 3..r {
            out.push(LinearProduct::new(&[(&b[j - 2], n - 1), (&b[j - 1], 1)]));
        }
        out.push(LinearProduct::new(&[(&b[r - 2], n - 1)]));
    }
    let mut last = vec![(&b[r - 1], n)];
    last.extend(spec.z.iter().map(|z| (z, n + 1)));
    out.push(LinearProduct::new(&last));
    out
}

fn mod_inverse(a: &BigInt, q: &BigInt) -> BigInt {
    a.mod_floor(q).modpow(&(q - 2u8), q)
}

/// Eisenstein replacements `g_j = h_j + Σ c_{j,i} x^i` with every
/// `c_{j,i} ≡ 0` modulo `ℓ^{e_ℓ+n+2}` for the small primes.
pub fn crt_irreducible_replacement(
    h_family: &[LinearProduct],
    p: u64,
    n: u64,
) -> Result<(Vec<Polynomial>, CrtData)> {
    let d: u64 = h_family.iter().map(LinearProduct::degree).sum();
    let mut weights: BTreeMap<BigInt, u64> = BTreeMap::new();
    for h in h_family {
        for f in &h.factors {
            *weights.entry(f.root.clone()).or_default() += f.exponent as u64;
        }
    }
    let linear: Vec<Polynomial> = weights.keys().map(|r| Polynomial::linear(r.clone())).collect();
    let k: Vec<u64> = weights.values().copied().collect();
    let mut small_primes = Vec::new();
    let mut modulus = BigInt::one();
    for l in primes_up_to(d.max(p)) {
        let ctx = PadicContext::new(l)?;
        let e = Engine::new(&linear, &ctx)?.fixed_divisor_valuation(&k, DEFAULT_DEPTH_CAP)?;
        modulus *= Pow::pow(BigInt::from(l), (e + n + 2) as u32);
        small_primes.push((l, e));
    }
    let q = next_prime(d.max(p) + 1);
    let qb = BigInt::from(q);
    let q2 = &qb * &qb;
    let inverse = mod_inverse(&modulus, &qb);
    let step = &q2 * &modulus;
    let mut constants = BTreeSet::new();
    let mut g_family = Vec::with_capacity(h_family.len());
    for h in h_family {
        let hp = h.expand();
        let (coeffs, _) = hp.clear_denominators();
        let deg = coeffs.len() - 1;
        let mut g = coeffs.clone();
        for (i, hc) in coeffs.iter().enumerate().take(deg) {
            let t0 = (-hc * &inverse).mod_floor(&qb);
            let mut value = hc + &modulus * &t0;
            if i == 0 {
                while (&value % &q2).is_zero() {
                    value += &modulus * &qb;
                }
                while !constants.insert(value.clone()) {
                    value += &step;
                }
            }
            g[i] = value;
        }
        g_family.push(Polynomial::from_integers_big(g));
    }
    let crt = CrtData {
        d,
        small_primes,
        modulus,
        eisenstein_prime: q,
        congruence_exponent: (n + 2) as u32,
    };
    Ok((g_family, crt))
}

/// Eisenstein at `q`: monic, lower coefficients divisible by `q`, constant
/// term not divisible by `q²`.
pub fn is_eisenstein(g: &Polynomial, q: u64) -> bool {
    let (coeffs, den) = g.clear_denominators();
    if !den.is_one() || !g.is_monic() || coeffs.len() < 2 {
        return false;
    }
    let lower = &coeffs[..coeffs.len() - 1];
    lower.iter().all(|c| int_valuation(c, q).is_none_or(|v| v >= 1))
        && int_valuation(&coeffs[0], q) == Some(1)
}

/// The bidiagonal reduced fdp matrix the family is built to realise.
pub fn target_rows(r: u64, n: u64) -> Vec<Vec<u64>> {
    let cols = r as usize + 1;
    let mut rows = Vec::new();
    for i in 0..r as usize - 1 {
        let mut row = vec![0; cols];
        row[i] = 1;
        row[i + 1] = n - 1;
        rows.push(row);
    }
    let mut last = vec![0; cols];
    last[r as usize] = n;
    rows.push(last);
    rows
}

/// `v_i = (−1)^{r−i}(n−1)^{r−i}` for `i ≤ r`, `v_{r+1} = 0`.
pub fn target_kernel(r: u64, n: u64) -> Vec<BigInt> {
    let mut v: Vec<BigInt> = (1..=r)
        .map(|i| {
            let e = (r - i) as u32;
            let mag: BigInt = Pow::pow(BigInt::from(n - 1), e);
            if e % 2 == 1 {
                -mag
            } else {
                mag
            }
        })
        .collect();
    v.push(BigInt::zero());
    v
}

fn proportional(x: &[ExactRational], y: &[BigInt]) -> bool {
    let Some(i) = y.iter().position(|c| !c.is_zero()) else {
        return false;
    };
    if x[i].is_zero() {
        return false;
    }
    let ratio = &x[i] * &ExactRational::from(y[i].clone()).recip().unwrap();
    x.iter().zip(y).all(|(a, b)| *a == &ratio * &ExactRational::from(b.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub j_max: u64,
    pub result: Option<OracleResult>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationReport {
    pub spec: RealizationSpec,
    pub analysis: Analysis,
    /// Every verified hypothesis, by name.
    pub checks: Vec<String>,
    pub oracle: Option<OracleOutcome>,
}

impl RealizationSpec {
    pub fn factored(&self) -> Result<FactoredPolynomial> {
        FactoredPolynomial::new(
            PadicContext::new(self.p)?,
            self.g_family.iter().map(|g| (g.clone(), 1)).collect(),
        )
    }
}

pub fn generate(r: u64, n: u64) -> Result<RealizationSpec> {
    let mut spec = choose_parameters(r, n)?;
    spec.h_family = build_h_family(&spec);
    let (g, crt) = crt_irreducible_replacement(&spec.h_family, spec.p, n)?;
    spec.g_family = g;
    spec.crt = Some(crt);
    Ok(spec)
}

pub fn generate_and_verify(r: u64, n: u64, j_max: Option<u64>) -> Result<RealizationReport> {
    verify_family(generate(r, n)?, j_max)
}

/// Re-checks every hypothesis of the construction on `spec.g_family`.
pub fn verify_family(spec: RealizationSpec, j_max: Option<u64>) -> Result<RealizationReport> {
    let fail = |what: String| Error::verification("realization", what);
    let (r, n, p) = (spec.r, spec.n, spec.p);
    let mut checks = Vec::new();
    if expected_s(r, n)? != spec.expected_s {
        return Err(fail(format!("recorded expected S {} is wrong", spec.expected_s)));
    }
    if spec.g_family.len() != r as usize + 1 || spec.w.len() != r as usize || spec.a.len() != 2 {
        return Err(fail("family shape does not match r".into()));
    }
    let ctx = PadicContext::new(p)?;
    let residues: BTreeSet<BigInt> = spec
        .w
        .iter()
        .chain(&spec.a)
        .chain(&spec.z)
        .map(|x| x.mod_floor(&BigInt::from(p)))
        .collect();
    if residues.len() != p as usize || spec.w.len() + spec.a.len() + spec.z.len() != p as usize {
        return Err(fail(format!("the residues are not a complete system modulo {p}")));
    }
    for l in primes_up_to(p - 1) {
        let lb = BigInt::from(l);
        let classes: BTreeSet<BigInt> = spec.w.iter().chain(&spec.a).chain(&spec.z).map(|x| x.mod_floor(&lb)).collect();
        if classes.len() == l as usize {
            return Err(fail(format!("the residues are complete modulo the smaller prime {l}")));
        }
    }
    checks.push("residue system".to_string());

    if let Some(crt) = &spec.crt {
        if spec.h_family.len() != spec.g_family.len() {
            return Err(fail("h and g families differ in length".into()));
        }
        for (j, (g, h)) in spec.g_family.iter().zip(&spec.h_family).enumerate() {
            let hp = h.expand();
            if !g.is_monic() || g.degree() != hp.degree() {
                return Err(fail(format!("g_{} is not monic of degree {}", j + 1, h.degree())));
            }
            if !is_eisenstein(g, crt.eisenstein_prime) {
                return Err(fail(format!("g_{} is not Eisenstein at {}", j + 1, crt.eisenstein_prime)));
            }
            if !congruent_mod_power(g, &hp, (n + 2) as u32, &ctx) {
                return Err(fail(format!("g_{} is not congruent to h_{} modulo {p}^{}", j + 1, j + 1, n + 2)));
            }
        }
        checks.push("monic Eisenstein replacements congruent to the h family".to_string());
    }

    let fp = spec.factored()?;
    for (i, a) in spec.a.iter().enumerate() {
        let at = ExactRational::from(a.clone());
        for (j, g) in spec.g_family.iter().enumerate() {
            let v = crate::exact::valuation(&g.evaluate(&at), &ctx);
            let want = if i == j { n + 1 } else { 0 };
            if v != crate::exact::ExtValuation::Finite(want as i64) {
                return Err(fail(format!("v(g_{}(a_{})) = {v}, expected {want}", j + 1, i + 1)));
            }
        }
    }
    checks.push("valuations at a_1 and a_2".to_string());

    let analysis = analyze(&fp)?;
    if analysis.verdict.n != n {
        return Err(fail(format!("fixed divisor valuation is {}, expected {n}", analysis.verdict.n)));
    }
    let got: BTreeSet<Vec<u64>> = analysis.reduced.rows.iter().cloned().collect();
    let want: BTreeSet<Vec<u64>> = target_rows(r, n).into_iter().collect();
    if got != want {
        return Err(fail(format!("reduced fdp matrix is {:?}, expected {:?}", analysis.reduced.rows, target_rows(r, n))));
    }
    checks.push("bidiagonal reduced fdp matrix".to_string());

    let kernel = &analysis.kernel;
    let target = target_kernel(r, n);
    if kernel.dimension != 1 || !proportional(&kernel.rational_basis[0], &target) {
        return Err(fail(format!("kernel is not spanned by {target:?}")));
    }
    checks.push("kernel generator".to_string());

    if !analysis.verdict.irreducible {
        return Err(fail("F is reducible".into()));
    }
    checks.push("F irreducible".to_string());

    if let Some((k, _)) = &analysis.minimal_k {
        if BigUint::from((n + 1) * k) != spec.expected_s {
            return Err(fail(format!("(n+1)*K = {} differs from the expected S {}", (n + 1) * k, spec.expected_s)));
        }
        checks.push("(n+1)*K equals the expected S".to_string());
    }

    let oracle = match j_max {
        None => None,
        Some(j_max) => {
            let result = min_nonunique_power(&fp, j_max, OracleMode::Pruned)?;
            let expected = spec.expected_s.clone();
            let ok = match &result {
                Some(res) => BigUint::from(res.s) == expected,
                None => BigUint::from(j_max) < expected,
            };
            if !ok {
                return Err(fail(format!(
                    "oracle found S = {:?} up to j_max = {j_max}, expected {expected}",
                    result.as_ref().map(|r| r.s)
                )));
            }
            checks.push("oracle minimal S".to_string());
            Some(OracleOutcome { j_max, result })
        }
    };

    Ok(RealizationReport {
        spec,
        analysis,
        checks,
        oracle,
    })
}

/// The valuation pattern `v(h_j(w_i))` of the family, rows indexed by `i`.
pub fn valuation_table(spec: &RealizationSpec) -> Vec<Vec<Option<u64>>> {
    spec.w
        .iter()
        .map(|w| {
            spec.h_family
                .iter()
                .map(|h| {
                    let value = h.expand().evaluate(&ExactRational::from(w.clone()));
                    int_valuation(value.numerator(), spec.p)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixdiv::factored_fixed_divisor_valuation;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn expected_s_examples() {
        assert_eq!(expected_s(2, 2).unwrap(), BigUint::from(6u8));
        assert_eq!(expected_s(2, 3).unwrap(), BigUint::from(12u8));
        assert_eq!(expected_s(3, 3).unwrap(), BigUint::from(24u8));
        assert!(expected_s(1, 3).is_err());
    }

    #[test]
    fn parameter_examples() {
        let s = choose_parameters(2, 2).unwrap();
        assert_eq!((s.p, s.primorial.clone()), (5, BigInt::from(6)));
        assert_eq!(s.w, big(&[0, 6]));
        assert_eq!(s.a, big(&[12, 18]));
        assert_eq!(s.z, big(&[24]));
        assert_eq!(s.b, big(&[5, 11]));
        assert_eq!(s.c, big(&[17, 23]));

        let s = choose_parameters(3, 2).unwrap();
        assert_eq!(s.p, 5);
        assert_eq!(s.w, big(&[0, 6, 12]));
        assert_eq!(s.a, big(&[18, 24]));
        assert!(s.z.is_empty());

        assert_eq!(choose_parameters(4, 2).unwrap().p, 7);
    }

    #[test]
    fn h_family_for_r2_n2() {
        let s = choose_parameters(2, 2).unwrap();
        let h = build_h_family(&s);
        let shown: Vec<String> = h.iter().map(|x| x.to_string()).collect();
        assert_eq!(shown, vec!["(x - 5)*(x - 17)^3", "(x - 5)*(x - 23)^3", "(x - 11)^2*(x - 24)^3"]);
        let mut spec = s;
        spec.h_family = h;
        assert_eq!(
            valuation_table(&spec),
            vec![vec![Some(1), Some(1), Some(0)], vec![Some(0), Some(0), Some(2)]]
        );
        let fp = FactoredPolynomial::new_unchecked(
            PadicContext::new(5).unwrap(),
            spec.h_family.iter().map(|h| (h.expand(), 1)).collect(),
        );
        assert_eq!(factored_fixed_divisor_valuation(&fp).unwrap(), 2);
    }

    #[test]
    fn valuation_table_is_bidiagonal() {
        for (r, n) in [(3, 2), (3, 3), (4, 2)] {
            let mut spec = choose_parameters(r, n).unwrap();
            spec.h_family = build_h_family(&spec);
            let table = valuation_table(&spec);
            for (i, row) in table.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    let (i1, j1) = (i as u64 + 1, j as u64 + 1);
                    let want = if i1 == j1 && j1 < r {
                        1
                    } else if i1 + 1 == j1 && j1 >= 2 && j1 <= r {
                        n - 1
                    } else if i1 == r && j1 == r + 1 {
                        n
                    } else {
                        0
                    };
                    assert_eq!(*v, Some(want), "r = {r}, n = {n}, i = {i1}, j = {j1}");
                }
            }
        }
    }

    #[test]
    fn replacements_are_eisenstein_and_congruent() {
        let spec = generate(2, 2).unwrap();
        let crt = spec.crt.as_ref().unwrap();
        assert_eq!(crt.d, 13);
        assert_eq!(crt.eisenstein_prime, 17);
        let ctx = PadicContext::new(5).unwrap();
        let mut constants = BTreeSet::new();
        for (g, h) in spec.g_family.iter().zip(&spec.h_family) {
            let hp = h.expand();
            assert!(g.is_monic());
            assert_eq!(g.degree(), hp.degree());
            assert!(is_eisenstein(g, 17));
            assert!(congruent_mod_power(g, &hp, 4, &ctx));
            assert!(constants.insert(g.coefficient(0)));
        }
    }

    #[test]
    fn targets() {
        assert_eq!(target_rows(2, 2), vec![vec![1, 1, 0], vec![0, 0, 2]]);
        assert_eq!(target_rows(3, 2), vec![vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 0, 2]]);
        assert_eq!(target_kernel(2, 3), big(&[-2, 1, 0]));
        assert_eq!(target_kernel(3, 2), big(&[1, -1, 1, 0]));
    }

    #[test]
    fn generate_and_verify_r2_n2() {
        let report = generate_and_verify(2, 2, Some(8)).unwrap();
        assert_eq!(report.analysis.reduced.rows.len(), 2);
        assert_eq!(report.analysis.verdict.nonunique_bound, Some(6));
        assert_eq!(report.analysis.verdict.absolutely_irreducible, Some(false));
        assert_eq!(report.oracle.unwrap().result.unwrap().s, 6);
    }

    #[test]
    fn generate_and_verify_r3_n2() {
        let report = generate_and_verify(3, 2, Some(6)).unwrap();
        let v = &report.analysis.kernel.sample_integer_vectors[0];
        assert_eq!(v.v, vec![1, -1, 1, 0]);
        assert_eq!(report.oracle.unwrap().result.unwrap().s, 6);
    }

    #[test]
    fn tampered_family_fails_verification() {
        let mut spec = generate(2, 2).unwrap();
        spec.g_family.swap(0, 2);
        spec.h_family.swap(0, 2);
        let err = verify_family(spec, None).unwrap_err();
        assert!(matches!(err, Error::Verification { module: "realization", .. }), "{err:?}");
    }
}
