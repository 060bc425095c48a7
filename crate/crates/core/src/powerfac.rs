//! Elements `∏ g^{k_g} / p^ℓ` of `Int(Z_(p))`, factorizations of powers of
//! `F = f / p^n` built from kernel vectors, and an exhaustive oracle for the
//! least power of `F` that factors non-uniquely.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classify::ceiling_norms;
use crate::error::{Error, Result};
use crate::fdkernel::{build_fdp_matrix, reduce_fdp_matrix, FdpMatrix, KernelVector};
use crate::fixdiv::{witness_classes, Engine, ValuationProfile, DEFAULT_DEPTH_CAP};
use crate::poly::FactoredPolynomial;

pub const DEFAULT_ORACLE_LIMIT: u128 = 100_000_000;

/// `∏ g^{k_g} / p^ℓ` over the divisors of a fixed factored polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IvpElement {
    pub exponents: Vec<u64>,
    pub denominator_exponent: u64,
}

impl IvpElement {
    pub fn new(exponents: Vec<u64>, denominator_exponent: u64) -> Self {
        IvpElement {
            exponents,
            denominator_exponent,
        }
    }

    /// `F^t`.
    pub fn power_of_f(m: &[u64], n: u64, t: u64) -> Self {
        IvpElement::new(m.iter().map(|&x| x * t).collect(), n * t)
    }

    pub fn display<'a>(&'a self, fp: &'a FactoredPolynomial) -> impl fmt::Display + 'a {
        ElementDisplay { e: self, fp }
    }
}

struct ElementDisplay<'a> {
    e: &'a IvpElement,
    fp: &'a FactoredPolynomial,
}

impl fmt::Display for ElementDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (g, &k) in self.fp.polys().zip(&self.e.exponents) {
            if k == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "({g})")?;
            if k > 1 {
                write!(f, "^{k}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        if self.e.denominator_exponent > 0 {
            write!(f, " / {}^{}", self.fp.ctx().p(), self.e.denominator_exponent)?;
        }
        Ok(())
    }
}

/// `F^j = left · right` with neither side a power of `F`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationPair {
    pub j: u64,
    pub left: IvpElement,
    pub right: IvpElement,
}

pub fn is_integer_valued(fp: &FactoredPolynomial, e: &IvpElement) -> Result<bool> {
    if e.exponents.len() != fp.len() {
        return Err(Error::Precondition(format!(
            "exponent vector has {} entries for {} divisors",
            e.exponents.len(),
            fp.len()
        )));
    }
    Engine::from_factored(fp)?.bounded_below(&e.exponents, e.denominator_exponent, DEFAULT_DEPTH_CAP)
}

/// Whether `e = F^t` for some `t ≥ 0`.
pub fn is_power_of_f(e: &IvpElement, m: &[u64], n: u64) -> bool {
    let Some((&k0, &m0)) = e.exponents.first().zip(m.first()) else {
        return e.denominator_exponent == 0;
    };
    if k0 % m0 != 0 {
        return false;
    }
    let t = k0 / m0;
    e.exponents.len() == m.len()
        && e.exponents.iter().zip(m).all(|(&k, &mg)| k == t * mg)
        && e.denominator_exponent == t * n
}

/// The least exponents `(k, ℓ)` for which the kernel construction applies:
/// `k = max(1, (n+1)⌈‖v⁺/m‖∞⌉)`, `ℓ = max(1, (n+1)⌈‖v⁻/m‖∞⌉)`.
pub fn minimal_admissible(v: &KernelVector, m: &[u64], n: u64) -> (u64, u64) {
    let (sp, sm) = ceiling_norms(v, m);
    (((n + 1) * sp).max(1), ((n + 1) * sm).max(1))
}

fn shifted(m: &[u64], scale: u64, v: &[i64], sign: i64) -> Option<Vec<u64>> {
    m.iter()
        .zip(v)
        .map(|(&mg, &vg)| u64::try_from((mg * scale) as i64 + sign * vg).ok())
        .collect()
}

fn check_vector(fp: &FactoredPolynomial, v: &KernelVector) -> Result<()> {
    if v.v.len() != fp.len() {
        return Err(Error::Precondition(format!(
            "kernel vector has {} entries for {} divisors",
            v.v.len(),
            fp.len()
        )));
    }
    if v.is_zero() {
        return Err(Error::Precondition("kernel vector is zero".into()));
    }
    Ok(())
}

fn verify_side(fp: &FactoredPolynomial, e: &IvpElement, n: u64, name: &str) -> Result<()> {
    let m = fp.multiplicities();
    if !is_integer_valued(fp, e)? {
        return Err(Error::verification("powerfac", format!("{name} is not integer-valued")));
    }
    if is_power_of_f(e, &m, n) {
        return Err(Error::verification("powerfac", format!("{name} is a power of F")));
    }
    Ok(())
}

/// `H = ∏ g^{k·m_g − v_g} / p^{kn}`, checked to be integer-valued and not a
/// power of `F`.
pub fn construct_h(fp: &FactoredPolynomial, n: u64, v: &KernelVector, k: u64) -> Result<IvpElement> {
    check_vector(fp, v)?;
    let m = fp.multiplicities();
    let (k_min, _) = minimal_admissible(v, &m, n);
    if k < k_min {
        return Err(Error::Precondition(format!("k = {k} is below the admissible minimum {k_min}")));
    }
    let exponents = shifted(&m, k, &v.v, -1)
        .ok_or_else(|| Error::Precondition(format!("k*m - v has a negative entry for k = {k}")))?;
    let h = IvpElement::new(exponents, k * n);
    verify_side(fp, &h, n, "H")?;
    Ok(h)
}

/// `F^{k+ℓ} = ∏ g^{k·m − v}/p^{kn} · ∏ g^{ℓ·m + v}/p^{ℓn}`.
pub fn construct_factorization_pair(
    fp: &FactoredPolynomial,
    n: u64,
    v: &KernelVector,
    k: u64,
    l: u64,
) -> Result<FactorizationPair> {
    check_vector(fp, v)?;
    let m = fp.multiplicities();
    let (_, l_min) = minimal_admissible(v, &m, n);
    if l < l_min {
        return Err(Error::Precondition(format!("l = {l} is below the admissible minimum {l_min}")));
    }
    let left = construct_h(fp, n, v, k)?;
    let right_exponents = shifted(&m, l, &v.v, 1)
        .ok_or_else(|| Error::Precondition(format!("l*m + v has a negative entry for l = {l}")))?;
    let right = IvpElement::new(right_exponents, l * n);
    verify_side(fp, &right, n, "right factor")?;
    let pair = FactorizationPair { j: k + l, left, right };
    if !is_factorization_of_power(&pair, &m, n) {
        return Err(Error::verification("powerfac", "exponents do not add up to F^(k+l)"));
    }
    Ok(pair)
}

/// Exponent and denominator bookkeeping: `left · right = F^j`.
pub fn is_factorization_of_power(pair: &FactorizationPair, m: &[u64], n: u64) -> bool {
    let target = IvpElement::power_of_f(m, n, pair.j);
    pair.left.exponents.len() == m.len()
        && pair.right.exponents.len() == m.len()
        && pair
            .left
            .exponents
            .iter()
            .zip(&pair.right.exponents)
            .map(|(a, b)| a + b)
            .eq(target.exponents.iter().copied())
        && pair.left.denominator_exponent + pair.right.denominator_exponent == target.denominator_exponent
}

/// Mixed-radix odometer over `0 ≤ k ≤ bound`, in lexicographic order.
struct BoxIter {
    bound: Vec<u64>,
    current: Option<Vec<u64>>,
}

impl BoxIter {
    fn new(bound: Vec<u64>) -> Self {
        let start = vec![0; bound.len()];
        BoxIter {
            bound,
            current: Some(start),
        }
    }
}

impl Iterator for BoxIter {
    type Item = Vec<u64>;
    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.bound[i] {
                next[i] += 1;
                self.current = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(out)
    }
}

fn box_size(bound: &[u64]) -> u128 {
    bound
        .iter()
        .fold(1u128, |acc, &b| acc.saturating_mul(b as u128 + 1))
}

fn check_limit(bound: &[u64], limit: u128, hint: &'static str) -> Result<()> {
    let size = box_size(bound);
    if size > limit {
        return Err(Error::SearchTooLarge {
            module: "powerfac",
            candidates: size.to_string(),
            limit,
            hint,
        });
    }
    Ok(())
}

pub fn is_irreducible_element(fp: &FactoredPolynomial) -> Result<bool> {
    let n = Engine::from_factored(fp)?.fixed_divisor_valuation(&fp.multiplicities(), DEFAULT_DEPTH_CAP)?;
    is_irreducible_element_with_n(fp, n)
}

/// `F` is irreducible iff no `(k, ℓ) ∉ {(0,0), (m,n)}` with `k ≤ m`, `ℓ ≤ n`
/// makes both `∏g^k/p^ℓ` and `∏g^{m−k}/p^{n−ℓ}` integer-valued.
pub fn is_irreducible_element_with_n(fp: &FactoredPolynomial, n: u64) -> Result<bool> {
    let m = fp.multiplicities();
    check_limit(&m, DEFAULT_ORACLE_LIMIT, "F has too many divisor exponent vectors")?;
    let profile = ValuationProfile::build(fp, n.max(1) as u32)?;
    for k in BoxIter::new(m.clone()) {
        let rest: Vec<u64> = m.iter().zip(&k).map(|(a, b)| a - b).collect();
        let a = profile.capped_valuation(&k);
        let b = profile.capped_valuation(&rest);
        let lo = n.saturating_sub(b);
        let hi = a.min(n);
        for l in lo..=hi {
            let trivial = (l == 0 && k.iter().all(|&x| x == 0)) || (l == n && rest.iter().all(|&x| x == 0));
            if !trivial {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMode {
    /// Every exponent vector `k ≤ j·m` and every admissible `ℓ`.
    Full,
    /// Only `k` with `A·k = ℓ·𝟙` for the reduced fdp matrix `A`.
    Pruned,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub s: u64,
    pub mode: OracleMode,
    pub witness: FactorizationPair,
}

/// Precomputed data shared by every exponent `j` of one oracle run.
pub struct Oracle<'a> {
    fp: &'a FactoredPolynomial,
    m: Vec<u64>,
    n: u64,
    reduced: FdpMatrix,
    profile: ValuationProfile,
    limit: u128,
}

impl<'a> Oracle<'a> {
    /// Builds the valuation profile up to `F^{j_max}`. Fails when `F` is
    /// reducible.
    pub fn new(fp: &'a FactoredPolynomial, j_max: u64, limit: u128) -> Result<Self> {
        let report = witness_classes(fp)?;
        let n = report.n;
        if !is_irreducible_element_with_n(fp, n)? {
            return Err(Error::Reducible);
        }
        let reduced = reduce_fdp_matrix(&build_fdp_matrix(&report)?);
        let cap = u32::try_from((j_max * n).max(1))
            .map_err(|_| Error::Precondition(format!("j_max * n = {} is too large", j_max * n)))?;
        let profile = ValuationProfile::build(fp, cap)?;
        Ok(Oracle {
            fp,
            m: fp.multiplicities(),
            n,
            reduced,
            profile,
            limit,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    fn row_value(&self, k: &[u64]) -> Option<u64> {
        let mut values = self
            .reduced
            .rows
            .iter()
            .map(|row| row.iter().zip(k).map(|(a, b)| a * b).sum::<u64>());
        let first = values.next()?;
        values.all(|v| v == first).then_some(first)
    }

    /// Calls `visit(k, ℓ)` for every integer-valued `∏g^k/p^ℓ` dividing
    /// `F^j` in `Int(Z_(p))` that is not a power of `F`, in ascending
    /// lexicographic `k`.
    fn scan(&self, j: u64, mode: OracleMode, mut visit: impl FnMut(&[u64], u64)) -> Result<()> {
        let bound: Vec<u64> = self.m.iter().map(|&x| x * j).collect();
        let hint = match mode {
            OracleMode::Full => "use the pruned mode or a smaller j_max",
            OracleMode::Pruned => "use a smaller j_max",
        };
        check_limit(&bound, self.limit, hint)?;
        let jn = j * self.n;
        for k in BoxIter::new(bound.clone()) {
            let forced = match mode {
                OracleMode::Pruned if !self.reduced.rows.is_empty() => match self.row_value(&k) {
                    Some(l) if l <= jn => Some(l),
                    _ => continue,
                },
                _ => None,
            };
            let rest: Vec<u64> = bound.iter().zip(&k).map(|(a, b)| a - b).collect();
            let a = self.profile.capped_valuation(&k);
            let b = self.profile.capped_valuation(&rest);
            let lo = jn.saturating_sub(b);
            let hi = a.min(jn);
            let range = match forced {
                Some(l) => l..=l,
                None => lo..=hi,
            };
            for l in range {
                if l < lo || l > hi {
                    continue;
                }
                if !is_power_of_f(&IvpElement::new(k.clone(), l), &self.m, self.n) {
                    visit(&k, l);
                }
            }
        }
        Ok(())
    }

    /// The least non-trivial split of `F^j` in the order (ℓ, lexicographic k).
    pub fn split(&self, j: u64, mode: OracleMode) -> Result<Option<FactorizationPair>> {
        let mut best: Option<(u64, Vec<u64>)> = None;
        self.scan(j, mode, |k, l| {
            if best.as_ref().is_none_or(|(bl, _)| l < *bl) {
                best = Some((l, k.to_vec()));
            }
        })?;
        Ok(best.map(|(l, k)| {
            let right = self.m.iter().zip(&k).map(|(&mg, &kg)| mg * j - kg).collect();
            FactorizationPair {
                j,
                left: IvpElement::new(k, l),
                right: IvpElement::new(right, j * self.n - l),
            }
        }))
    }

    /// Every non-trivial integer-valued divisor of `F^j` seen by `mode`.
    pub fn divisors(&self, j: u64, mode: OracleMode) -> Result<Vec<IvpElement>> {
        let mut out = Vec::new();
        self.scan(j, mode, |k, l| out.push(IvpElement::new(k.to_vec(), l)))?;
        Ok(out)
    }

    pub fn min_nonunique_power(&self, j_max: u64, mode: OracleMode) -> Result<Option<OracleResult>> {
        for j in 2..=j_max {
            if let Some(witness) = self.split(j, mode)? {
                return Ok(Some(OracleResult { s: j, mode, witness }));
            }
        }
        Ok(None)
    }

    pub fn factored(&self) -> &FactoredPolynomial {
        self.fp
    }
}

/// The least `j ≤ j_max` such that `F^j` factors non-uniquely.
pub fn min_nonunique_power(
    fp: &FactoredPolynomial,
    j_max: u64,
    mode: OracleMode,
) -> Result<Option<OracleResult>> {
    min_nonunique_power_with_limit(fp, j_max, mode, DEFAULT_ORACLE_LIMIT)
}

pub fn min_nonunique_power_with_limit(
    fp: &FactoredPolynomial,
    j_max: u64,
    mode: OracleMode,
    limit: u128,
) -> Result<Option<OracleResult>> {
    if j_max < 2 {
        return Err(Error::Precondition(format!("j_max = {j_max} must be at least 2")));
    }
    Oracle::new(fp, j_max, limit)?.min_nonunique_power(j_max, mode)
}
