//! Valuation of the fixed divisor and the fixed divisor witnesses, by
//! refinement of residue classes `a + p^d Z_(p)`.
//!
//! All searches run on a product `∏ g^{k_g}` of integer-scaled factors.
//! A class with representative `a` at depth `d` is settled once
//! `v(g(a)) < d` for every factor in play: then `v(g(x)) = v(g(a))` on the
//! whole class. Otherwise `Σ k_g·min(v(g(a)), d)` bounds the class from
//! below and decides whether it is worth splitting.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{int_valuation, ExtValuation, PadicContext};
use crate::poly::{is_primitive_at, FactoredPolynomial, Polynomial};

pub const DEFAULT_DEPTH_CAP: u32 = 64;

/// The residue class `representative + p^depth Z_(p)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassId {
    #[serde(with = "crate::json::string")]
    pub representative: BigInt,
    pub depth: u32,
}

impl ClassId {
    pub fn new(representative: impl Into<BigInt>, depth: u32, ctx: &PadicContext) -> Result<Self> {
        let representative = representative.into();
        if depth == 0 {
            return Err(Error::Consistency("class depth must be positive".into()));
        }
        if representative.is_negative() || representative >= ctx.power(depth) {
            return Err(Error::Consistency(format!(
                "representative {representative} is not in [0, {}^{depth})",
                ctx.p()
            )));
        }
        Ok(ClassId {
            representative,
            depth,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessClass {
    pub class: ClassId,
    #[serde(with = "crate::json::string")]
    pub witness: BigInt,
    pub vector: Vec<u64>,
}

/// The witness classes of `f` modulo `p^depth`, `depth = max(⌈n/2⌉, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub n: u64,
    pub depth: u32,
    pub classes: Vec<WitnessClass>,
}

/// Integer-scaled factors. Scaling by the lcm of the denominators, a unit
/// at `p`, leaves every valuation unchanged.
#[derive(Clone, Debug)]
pub(crate) struct Engine {
    p: u64,
    polys: Vec<Vec<BigInt>>,
    powers: Vec<BigInt>,
}

type Vals = Vec<Option<u64>>;

struct Best {
    value: u64,
    point: BigInt,
}

impl Engine {
    pub(crate) fn new<'a>(
        polys: impl IntoIterator<Item = &'a Polynomial>,
        ctx: &PadicContext,
    ) -> Result<Self> {
        let mut scaled = Vec::new();
        for g in polys {
            if g.is_zero() {
                return Err(Error::Consistency("zero polynomial has no fixed divisor".into()));
            }
            if !g.is_p_integral(ctx) {
                return Err(Error::Consistency(format!("{g} is not p-integral")));
            }
            scaled.push(g.clear_denominators().0);
        }
        Ok(Engine {
            p: ctx.p(),
            polys: scaled,
            powers: vec![BigInt::from(1u8)],
        })
    }

    pub(crate) fn from_factored(fp: &FactoredPolynomial) -> Result<Self> {
        Engine::new(fp.polys(), fp.ctx())
    }

    pub(crate) fn len(&self) -> usize {
        self.polys.len()
    }

    fn power(&mut self, d: u32) -> BigInt {
        while self.powers.len() <= d as usize {
            let next = self.powers.last().unwrap() * self.p;
            self.powers.push(next);
        }
        self.powers[d as usize].clone()
    }

    /// `v(g(a))` for every factor; `None` stands for `∞`.
    pub(crate) fn vals(&self, a: &BigInt) -> Vals {
        self.polys
            .iter()
            .map(|c| {
                let value = c.iter().rev().fold(BigInt::zero(), |acc, x| acc * a + x);
                int_valuation(&value, self.p)
            })
            .collect()
    }

    fn value(weights: &[u64], vals: &Vals) -> Option<u64> {
        weights.iter().zip(vals).try_fold(0u64, |acc, (&k, v)| match (k, v) {
            (0, _) => Some(acc),
            (k, Some(v)) => Some(acc + k * v),
            (_, None) => None,
        })
    }

    fn settled(weights: &[u64], vals: &Vals, depth: u32) -> bool {
        weights
            .iter()
            .zip(vals)
            .all(|(&k, v)| k == 0 || v.is_some_and(|v| v < depth as u64))
    }

    fn lower_bound(weights: &[u64], vals: &Vals, depth: u32) -> u64 {
        weights
            .iter()
            .zip(vals)
            .map(|(&k, v)| k * v.map_or(depth as u64, |v| v.min(depth as u64)))
            .sum()
    }

    fn cap_error(&self, rep: &BigInt, depth: u32, cap: u32) -> Error {
        Error::DepthCapExceeded {
            cap,
            class: format!("{rep} mod {}^{depth}", self.p),
        }
    }

    /// Breadth-first search for the minimum of `Σ k_g v(g(x))` over the
    /// union of the starting classes. Classes that cannot go below `bound`
    /// are pruned, and the search stops as soon as a value `≤ floor` is seen.
    fn search(
        &mut self,
        weights: &[u64],
        start: Vec<(BigInt, u32)>,
        bound: Option<u64>,
        floor: u64,
        cap: u32,
    ) -> Result<Option<Best>> {
        let mut best: Option<Best> = None;
        let mut queue: VecDeque<(BigInt, u32)> = start.into();
        while let Some((rep, depth)) = queue.pop_front() {
            let vals = self.vals(&rep);
            if let Some(value) = Engine::value(weights, &vals) {
                let better = match &best {
                    None => bound.is_none_or(|b| value < b),
                    Some(b) => value < b.value || (value == b.value && rep < b.point),
                };
                if better {
                    best = Some(Best {
                        value,
                        point: rep.clone(),
                    });
                    if value <= floor {
                        return Ok(best);
                    }
                }
            }
            if Engine::settled(weights, &vals, depth) {
                continue;
            }
            let limit = best.as_ref().map(|b| b.value).or(bound);
            if limit.is_some_and(|l| Engine::lower_bound(weights, &vals, depth) >= l) {
                continue;
            }
            if depth >= cap {
                return Err(self.cap_error(&rep, depth, cap));
            }
            let step = self.power(depth);
            for i in 0..self.p {
                queue.push_back((&rep + &step * i, depth + 1));
            }
        }
        Ok(best)
    }

    fn depth_one(&self) -> Vec<(BigInt, u32)> {
        (0..self.p).map(|a| (BigInt::from(a), 1)).collect()
    }

    /// `v(fixdiv(∏ g^{k_g}))`.
    pub(crate) fn fixed_divisor_valuation(&mut self, weights: &[u64], cap: u32) -> Result<u64> {
        let start = self.depth_one();
        let best = self.search(weights, start, None, 0, cap)?;
        Ok(best.expect("an unbounded search always records a value").value)
    }

    /// Whether `Σ k_g v(g(x)) ≥ bound` for every `x ∈ Z_(p)`.
    pub(crate) fn bounded_below(&mut self, weights: &[u64], bound: u64, cap: u32) -> Result<bool> {
        if bound == 0 {
            return Ok(true);
        }
        let start = self.depth_one();
        Ok(self.search(weights, start, Some(bound), bound - 1, cap)?.is_none())
    }

    fn class_min(
        &mut self,
        weights: &[u64],
        class: &ClassId,
        floor: u64,
        bound: Option<u64>,
        cap: u32,
    ) -> Result<Option<Best>> {
        let start = vec![(class.representative.clone(), class.depth)];
        self.search(weights, start, bound, floor, cap)
    }

    /// Classes modulo `p^depth` on which the minimum equals `n`, each with
    /// its smallest witness found and the witness's valuation vector.
    fn witnesses(
        &mut self,
        weights: &[u64],
        n: u64,
        depth: u32,
        cap: u32,
    ) -> Result<Vec<WitnessClass>> {
        let mut out = Vec::new();
        let mut stack = self.depth_one();
        stack.reverse();
        while let Some((rep, d)) = stack.pop() {
            if d == depth {
                let class = ClassId {
                    representative: rep,
                    depth,
                };
                if let Some(best) = self.class_min(weights, &class, n, Some(n + 1), cap)? {
                    debug_assert_eq!(best.value, n);
                    let vector = self.vals(&best.point).into_iter().map(Option::unwrap).collect();
                    out.push(WitnessClass {
                        class,
                        witness: best.point,
                        vector,
                    });
                }
                continue;
            }
            let vals = self.vals(&rep);
            if Engine::settled(weights, &vals, d) {
                if Engine::value(weights, &vals) == Some(n) {
                    let vector: Vec<u64> = vals.into_iter().map(Option::unwrap).collect();
                    let step = self.power(d);
                    let count = self.power(depth - d);
                    let mut i = BigInt::zero();
                    while i < count {
                        let r = &rep + &step * &i;
                        out.push(WitnessClass {
                            class: ClassId {
                                representative: r.clone(),
                                depth,
                            },
                            witness: r,
                            vector: vector.clone(),
                        });
                        i += 1u8;
                    }
                }
                continue;
            }
            if Engine::lower_bound(weights, &vals, d) > n {
                continue;
            }
            let step = self.power(d);
            for i in (0..self.p).rev() {
                stack.push((&rep + &step * i, d + 1));
            }
        }
        out.sort_by(|a, b| a.class.representative.cmp(&b.class.representative));
        Ok(out)
    }
}

fn check_single(f: &Polynomial, ctx: &PadicContext) -> Result<()> {
    if f.is_zero() || !f.is_p_integral(ctx) || !is_primitive_at(f, ctx) {
        return Err(Error::Validation(format!(
            "{f} must be nonzero, p-integral and primitive at {}",
            ctx.p()
        )));
    }
    Ok(())
}

/// Minimum of `v(f(a))` over the class, with the smallest attaining integer
/// found by the breadth-first refinement.
pub fn class_min_valuation(
    f: &Polynomial,
    class: &ClassId,
    ctx: &PadicContext,
) -> Result<(ExtValuation, Option<BigInt>)> {
    class_min_valuation_with_cap(f, class, ctx, DEFAULT_DEPTH_CAP)
}

pub fn class_min_valuation_with_cap(
    f: &Polynomial,
    class: &ClassId,
    ctx: &PadicContext,
    cap: u32,
) -> Result<(ExtValuation, Option<BigInt>)> {
    check_single(f, ctx)?;
    let mut engine = Engine::new([f], ctx)?;
    Ok(match engine.class_min(&[1], class, 0, None, cap)? {
        Some(best) => (ExtValuation::Finite(best.value as i64), Some(best.point)),
        None => (ExtValuation::Infinite, None),
    })
}

/// `n = v(fixdiv(f))`.
pub fn fixed_divisor_valuation(f: &Polynomial, ctx: &PadicContext) -> Result<u64> {
    fixed_divisor_valuation_with_cap(f, ctx, DEFAULT_DEPTH_CAP)
}

pub fn fixed_divisor_valuation_with_cap(f: &Polynomial, ctx: &PadicContext, cap: u32) -> Result<u64> {
    check_single(f, ctx)?;
    Engine::new([f], ctx)?.fixed_divisor_valuation(&[1], cap)
}

/// `v(fixdiv(f))` computed factorwise on the product form.
pub fn factored_fixed_divisor_valuation(fp: &FactoredPolynomial) -> Result<u64> {
    Engine::from_factored(fp)?.fixed_divisor_valuation(&fp.multiplicities(), DEFAULT_DEPTH_CAP)
}

pub fn witness_classes(fp: &FactoredPolynomial) -> Result<WitnessReport> {
    witness_classes_with_cap(fp, DEFAULT_DEPTH_CAP)
}

pub fn witness_classes_with_cap(fp: &FactoredPolynomial, cap: u32) -> Result<WitnessReport> {
    let mut engine = Engine::from_factored(fp)?;
    let m = fp.multiplicities();
    let n = engine.fixed_divisor_valuation(&m, cap)?;
    let depth = n.div_ceil(2).max(1) as u32;
    if depth > cap {
        return Err(engine.cap_error(&BigInt::zero(), depth, cap));
    }
    let classes = engine.witnesses(&m, n, depth, cap)?;
    for c in &classes {
        let dot: u64 = c.vector.iter().zip(&m).map(|(v, k)| v * k).sum();
        if dot != n {
            return Err(Error::Consistency(format!(
                "witness {} has <m, v> = {dot}, expected {n}",
                c.witness
            )));
        }
    }
    Ok(WitnessReport { n, depth, classes })
}

/// The exact valuation vectors `(v(g(x)))_g` that occur on `Z_(p)`, each
/// entry capped: `None` means `≥ cap`. From it `min(v(fixdiv(∏ g^{k_g})), cap)`
/// is a minimum of linear forms, so many exponent vectors can be tested
/// without refining again.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationProfile {
    cap: u64,
    cells: Vec<Vec<Option<u64>>>,
}

impl ValuationProfile {
    pub fn build(fp: &FactoredPolynomial, cap: u32) -> Result<Self> {
        let cap = cap.max(1);
        let mut engine = Engine::from_factored(fp)?;
        let all = vec![1u64; engine.len()];
        let mut cells = BTreeSet::new();
        let mut queue: VecDeque<(BigInt, u32)> = engine.depth_one().into();
        while let Some((rep, depth)) = queue.pop_front() {
            let vals = engine.vals(&rep);
            if Engine::settled(&all, &vals, depth) {
                cells.insert(vals);
                continue;
            }
            if depth >= cap {
                cells.insert(
                    vals.into_iter()
                        .map(|v| v.filter(|&v| v < cap as u64))
                        .collect(),
                );
                continue;
            }
            let step = engine.power(depth);
            for i in 0..engine.p {
                queue.push_back((&rep + &step * i, depth + 1));
            }
        }
        let cells: Vec<_> = cells.into_iter().collect();
        let dominated = |a: &Vec<Option<u64>>, b: &Vec<Option<u64>>| {
            a != b
                && a.iter().zip(b).all(|(x, y)| match (x, y) {
                    (_, None) => true,
                    (None, Some(_)) => false,
                    (Some(x), Some(y)) => x <= y,
                })
        };
        let kept = cells
            .iter()
            .filter(|b| !cells.iter().any(|a| dominated(a, b)))
            .cloned()
            .collect();
        Ok(ValuationProfile {
            cap: cap as u64,
            cells: kept,
        })
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn cells(&self) -> &[Vec<Option<u64>>] {
        &self.cells
    }

    /// `min(v(fixdiv(∏ g^{k_g})), cap)`.
    pub fn capped_valuation(&self, k: &[u64]) -> u64 {
        self.cells
            .iter()
            .map(|cell| {
                let mut total = 0u64;
                for (&e, v) in k.iter().zip(cell) {
                    if e == 0 {
                        continue;
                    }
                    match v {
                        None => return self.cap,
                        Some(v) => total += e * v,
                    }
                }
                total.min(self.cap)
            })
            .min()
            .unwrap_or(self.cap)
    }
}
