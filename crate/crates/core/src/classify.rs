//! The absolute irreducibility decision and the exponent bounds.

use num_bigint::BigUint;
use num_traits::{One, Pow, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fdkernel::{
    build_fdp_matrix, enumerate_integer_kernel_with_limit, rational_kernel_basis,
    reduce_fdp_matrix, siegel_bound, FdpMatrix, KernelDescription, KernelVector,
    DEFAULT_ENUMERATION_LIMIT,
};
use crate::fixdiv::{witness_classes_with_cap, WitnessReport, DEFAULT_DEPTH_CAP};
use crate::poly::FactoredPolynomial;
use crate::powerfac::is_irreducible_element_with_n;

/// Bit length above which `2(n+1)n^{q^⌈n/2⌉}` is reported but not expanded.
pub const MAX_BOUND_BITS: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniquenessBounds {
    /// `2(n+1)n^{r−u}`.
    #[serde(with = "crate::json::string")]
    pub bound_rank: BigUint,
    /// `2(n+1)n^{q^⌈n/2⌉}`, absent when it has more than [`MAX_BOUND_BITS`] bits.
    #[serde(with = "crate::json::string_opt")]
    pub bound_q: Option<BigUint>,
    /// Symbolic form of `bound_q`, always present.
    pub bound_q_expression: String,
    /// For `n = 1` squares already decide the question.
    pub sharper_bound: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub n: u64,
    pub irreducible: bool,
    pub multiplicity_gcd: u64,
    pub proper_power: bool,
    pub fdk_trivial: bool,
    pub kernel_dimension: usize,
    /// `None` when the hypotheses of the decision do not apply.
    pub absolutely_irreducible: Option<bool>,
    pub nonunique_bound: Option<u64>,
    pub nonunique_vector: Option<KernelVector>,
    /// Set when `F` is reducible: the exponent bounds then carry no claim.
    pub bounds_informational: bool,
    pub uniqueness: Option<UniquenessBounds>,
}

/// Every intermediate object of one analysis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub witnesses: WitnessReport,
    pub matrix: FdpMatrix,
    pub reduced: FdpMatrix,
    pub kernel: KernelDescription,
    pub siegel_bound: Option<u64>,
    pub minimal_k: Option<(u64, KernelVector)>,
    pub verdict: Verdict,
}

fn ceil_ratio_max(parts: &[u64], m: &[u64]) -> u64 {
    parts
        .iter()
        .zip(m)
        .map(|(&a, &b)| a.div_ceil(b))
        .max()
        .unwrap_or(0)
}

/// `⌈max_g v⁺_g/m_g⌉` and `⌈max_g v⁻_g/m_g⌉`.
pub fn ceiling_norms(v: &KernelVector, m: &[u64]) -> (u64, u64) {
    (ceil_ratio_max(&v.plus(), m), ceil_ratio_max(&v.minus(), m))
}

/// `max((n+1)(⌈‖v⁺/m‖∞⌉ + ⌈‖v⁻/m‖∞⌉), 2)`; the floor of 2 reflects that
/// both exponents of the constructed factorization are at least 1.
pub fn nonunique_exponent_bound(v: &KernelVector, m: &[u64], n: u64) -> u64 {
    let (sp, sm) = ceiling_norms(v, m);
    ((n + 1) * (sp + sm)).max(2)
}

pub fn uniqueness_bounds(n: u64, q: u64, r: usize, u: usize) -> Result<UniquenessBounds> {
    if n == 0 {
        return Err(Error::Bound("the bounds need n >= 1".into()));
    }
    if u > r {
        return Err(Error::Bound(format!("u = {u} exceeds the rank {r}")));
    }
    let factor = BigUint::from(2 * (n + 1));
    let bound_rank = &factor * Pow::pow(BigUint::from(n), (r - u) as u32);
    let half = n.div_ceil(2);
    let exponent: BigUint = Pow::pow(BigUint::from(q), half as u32);
    let bits = exponent.to_f64().unwrap_or(f64::INFINITY) * (n as f64).log2();
    let bound_q = if bits <= MAX_BOUND_BITS as f64 {
        let e = exponent.to_u32().expect("exponent below the bit cap");
        Some(&factor * Pow::pow(BigUint::from(n), e))
    } else {
        None
    };
    Ok(UniquenessBounds {
        bound_rank,
        bound_q,
        bound_q_expression: format!("2*{}*{n}^({q}^{half})", n + 1),
        sharper_bound: (n == 1).then_some(2),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub depth_cap: u32,
    pub enumeration_limit: u128,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            depth_cap: DEFAULT_DEPTH_CAP,
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

pub fn analyze(fp: &FactoredPolynomial) -> Result<Analysis> {
    analyze_with(fp, &AnalysisOptions::default())
}

pub fn analyze_with(fp: &FactoredPolynomial, options: &AnalysisOptions) -> Result<Analysis> {
    let witnesses = witness_classes_with_cap(fp, options.depth_cap)?;
    let n = witnesses.n;
    let matrix = build_fdp_matrix(&witnesses)?;
    let reduced = reduce_fdp_matrix(&matrix);
    let kernel = rational_kernel_basis(&reduced);
    let m = fp.multiplicities();
    let multiplicity_gcd = fp.multiplicity_gcd();
    let proper_power = multiplicity_gcd > 1;
    let fdk_trivial = kernel.dimension == 0;
    let irreducible = is_irreducible_element_with_n(fp, n)?;

    let mut siegel = None;
    let mut minimal = None;
    let mut nonunique: Option<(u64, KernelVector)> = None;
    // With n = 0 the matrix is zero and there are no exponent bounds.
    if !fdk_trivial && n >= 1 {
        let bound = siegel_bound(n, reduced.r, reduced.u, kernel.dimension)?;
        let radius = (&bound * 2u8).to_u64().ok_or_else(|| Error::Bound(format!("Siegel bound {bound} too large")))?;
        siegel = bound.to_u64();
        let vectors = enumerate_integer_kernel_with_limit(&reduced, radius, options.enumeration_limit)?;
        minimal = vectors.first().map(|v| (v.k_value(), v.clone()));
        for v in vectors {
            let b = nonunique_exponent_bound(&v, &m, n);
            if nonunique.as_ref().is_none_or(|(best, _)| b < *best) {
                nonunique = Some((b, v));
            }
        }
    }

    let absolutely_irreducible = if !irreducible {
        Some(false)
    } else if n == 0 {
        Some(true)
    } else if !fdk_trivial {
        Some(false)
    } else if proper_power {
        None
    } else {
        Some(true)
    };

    let uniqueness = if n >= 1 {
        Some(uniqueness_bounds(n, fp.ctx().q(), reduced.r, reduced.u)?)
    } else {
        None
    };

    let verdict = Verdict {
        n,
        irreducible,
        multiplicity_gcd,
        proper_power,
        fdk_trivial,
        kernel_dimension: kernel.dimension,
        absolutely_irreducible,
        nonunique_bound: nonunique.as_ref().map(|t| t.0),
        nonunique_vector: nonunique.map(|t| t.1),
        bounds_informational: !irreducible,
        uniqueness,
    };
    Ok(Analysis {
        witnesses,
        matrix,
        reduced,
        kernel,
        siegel_bound: siegel,
        minimal_k: minimal,
        verdict,
    })
}

pub fn is_absolutely_irreducible(fp: &FactoredPolynomial) -> Result<Verdict> {
    Ok(analyze(fp)?.verdict)
}

impl UniquenessBounds {
    pub fn rank_bound_u64(&self) -> Option<u64> {
        self.bound_rank.to_u64()
    }

    /// `bound_rank ≤ bound_q` whenever the latter was materialised.
    pub fn ordered(&self) -> bool {
        self.bound_q.as_ref().is_none_or(|q| &self.bound_rank <= q)
            && self.bound_rank >= BigUint::one()
    }
}
