//! The fdp matrix of a witness report, its reduction to independent rows,
//! the rational kernel, and the search for short integer kernel vectors.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactRational;
use crate::fixdiv::WitnessReport;

pub const DEFAULT_ENUMERATION_LIMIT: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FdpMatrix {
    pub n: u64,
    pub columns: usize,
    pub rows: Vec<Vec<u64>>,
    #[serde(with = "crate::json::string_vec")]
    pub row_labels: Vec<BigInt>,
    pub reduced: bool,
    /// Rank over `Q`.
    pub r: usize,
    /// Rows of the reduced matrix with exactly one nonzero entry.
    pub u: usize,
}

impl FdpMatrix {
    /// A matrix given directly by its rows; labels are the row indices.
    pub fn from_rows(n: u64, rows: Vec<Vec<u64>>) -> Self {
        let labels = (0..rows.len()).map(BigInt::from).collect();
        let columns = rows.first().map_or(0, Vec::len);
        FdpMatrix::with_labels(n, columns, rows, labels)
    }

    fn with_labels(n: u64, columns: usize, rows: Vec<Vec<u64>>, row_labels: Vec<BigInt>) -> Self {
        let kept = independent_rows(&rows);
        let u = kept
            .iter()
            .filter(|&&i| rows[i].iter().filter(|&&x| x != 0).count() == 1)
            .count();
        FdpMatrix {
            n,
            columns,
            r: kept.len(),
            u,
            rows,
            row_labels,
            reduced: false,
        }
    }

    pub fn cols(&self) -> usize {
        self.columns
    }

    /// `A·v` exactly.
    pub fn apply(&self, v: &[i64]) -> Vec<i128> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(v).map(|(&a, &x)| a as i128 * x as i128).sum())
            .collect()
    }

    pub fn annihilates(&self, v: &[i64]) -> bool {
        self.apply(v).iter().all(|&x| x == 0)
    }

    pub fn annihilates_rational(&self, v: &[ExactRational]) -> bool {
        self.rows.iter().all(|row| {
            row.iter()
                .zip(v)
                .fold(ExactRational::zero(), |acc, (&a, x)| {
                    &acc + &(&ExactRational::from(BigInt::from(a)) * x)
                })
                .is_zero()
        })
    }
}

/// Indices of a maximal independent subset of the rows, keeping first
/// occurrences, by fraction-free echelon insertion.
fn independent_rows(rows: &[Vec<u64>]) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<BigInt>)> = Vec::new();
    let mut kept = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut x: Vec<BigInt> = row.iter().map(|&a| BigInt::from(a)).collect();
        for (pivot, b) in &basis {
            if x[*pivot].is_zero() {
                continue;
            }
            let (xa, ba) = (x[*pivot].clone(), b[*pivot].clone());
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi = &*xi * &ba - bi * &xa;
            }
            primitive_in_place(&mut x);
        }
        if let Some(pivot) = x.iter().position(|a| !a.is_zero()) {
            basis.push((pivot, x));
            kept.push(i);
        }
    }
    kept
}

fn primitive_in_place(x: &mut [BigInt]) {
    let g = x.iter().fold(BigInt::zero(), |acc, a| acc.gcd(a));
    if !g.is_zero() && !g.is_one() {
        for a in x.iter_mut() {
            *a = &*a / &g;
        }
    }
}

pub fn build_fdp_matrix(report: &WitnessReport) -> Result<FdpMatrix> {
    if report.classes.is_empty() {
        return Err(Error::EmptyWitnessReport);
    }
    let rows = report.classes.iter().map(|c| c.vector.clone()).collect();
    let labels = report.classes.iter().map(|c| c.class.representative.clone()).collect();
    let columns = report.classes[0].vector.len();
    Ok(FdpMatrix::with_labels(report.n, columns, rows, labels))
}

/// Drops duplicate rows, then keeps a maximal independent subset.
pub fn reduce_fdp_matrix(a: &FdpMatrix) -> FdpMatrix {
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut labels = Vec::new();
    for (row, label) in a.rows.iter().zip(&a.row_labels) {
        if !rows.contains(row) {
            rows.push(row.clone());
            labels.push(label.clone());
        }
    }
    let kept = independent_rows(&rows);
    let mut out = FdpMatrix::with_labels(
        a.n,
        a.columns,
        kept.iter().map(|&i| rows[i].clone()).collect(),
        kept.iter().map(|&i| labels[i].clone()).collect(),
    );
    out.reduced = true;
    out
}

/// `v = v⁺ − v⁻` with the norms used by the bounds.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KernelVector {
    pub v: Vec<i64>,
}

impl KernelVector {
    pub fn new(v: Vec<i64>) -> Self {
        KernelVector { v }
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|&x| x == 0)
    }

    pub fn plus(&self) -> Vec<u64> {
        self.v.iter().map(|&x| x.max(0) as u64).collect()
    }

    pub fn minus(&self) -> Vec<u64> {
        self.v.iter().map(|&x| (-x).max(0) as u64).collect()
    }

    pub fn plus_norm(&self) -> u64 {
        self.plus().into_iter().max().unwrap_or(0)
    }

    pub fn minus_norm(&self) -> u64 {
        self.minus().into_iter().max().unwrap_or(0)
    }

    pub fn sup_norm(&self) -> u64 {
        self.plus_norm().max(self.minus_norm())
    }

    /// `‖v⁺‖∞ + ‖v⁻‖∞`.
    pub fn k_value(&self) -> u64 {
        self.plus_norm() + self.minus_norm()
    }

    pub fn negated(&self) -> Self {
        KernelVector::new(self.v.iter().map(|&x| -x).collect())
    }

    fn sort_key(&self) -> (u64, &[i64]) {
        (self.k_value(), &self.v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelDescription {
    pub dimension: usize,
    pub rational_basis: Vec<Vec<ExactRational>>,
    pub sample_integer_vectors: Vec<KernelVector>,
}

/// Fraction-free reduced row echelon form: the rows and the pivot columns.
fn echelon(a: &FdpMatrix) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut m: Vec<Vec<BigInt>> = a
        .rows
        .iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..a.cols() {
        let Some(sel) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, sel);
        for i in 0..m.len() {
            if i == rank || m[i][col].is_zero() {
                continue;
            }
            let (f, g) = (m[rank][col].clone(), m[i][col].clone());
            let pivot_row = m[rank].clone();
            for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                *x = &*x * &f - y * &g;
            }
            primitive_in_place(&mut m[i]);
        }
        pivots.push(col);
        rank += 1;
    }
    m.truncate(rank);
    (m, pivots)
}

/// Kernel basis from the fraction-free reduced row echelon form: one
/// primitive integer vector per free column, first nonzero entry positive.
pub fn rational_kernel_basis(a: &FdpMatrix) -> KernelDescription {
    let cols = a.cols();
    let (m, pivots) = echelon(a);
    let lcm = pivots
        .iter()
        .enumerate()
        .fold(BigInt::one(), |acc, (i, &c)| acc.lcm(&m[i][c]));
    let mut integer_basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![BigInt::zero(); cols];
        x[free] = lcm.clone();
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = -(&m[i][free] * &lcm) / &m[i][c];
        }
        primitive_in_place(&mut x);
        if x.iter().find(|e| !e.is_zero()).is_some_and(Signed::is_negative) {
            x.iter_mut().for_each(|e| *e = -&*e);
        }
        integer_basis.push(x);
    }
    KernelDescription {
        dimension: integer_basis.len(),
        rational_basis: integer_basis
            .iter()
            .map(|x| x.iter().cloned().map(ExactRational::from).collect())
            .collect(),
        sample_integer_vectors: integer_basis
            .iter()
            .filter_map(|x| x.iter().map(ToPrimitive::to_i64).collect::<Option<Vec<_>>>())
            .map(KernelVector::new)
            .collect(),
    }
}

/// `⌊n^{(r−u)/s}⌋` exactly.
pub fn siegel_bound(n: u64, r: usize, u: usize, s: usize) -> Result<BigUint> {
    if s == 0 {
        return Err(Error::TrivialKernel);
    }
    if u > r {
        return Err(Error::Consistency(format!("u = {u} exceeds the rank {r}")));
    }
    let base: BigUint = Pow::pow(BigUint::from(n), (r - u) as u32);
    Ok(base.nth_root(s as u32))
}

/// All nonzero `v` with `‖v‖∞ ≤ radius` and `A·v = 0`, one per sign pair
/// (first nonzero entry positive), sorted by `(K, v)`.
///
/// Only the free coordinates of the echelon form are enumerated; the pivot
/// coordinates are solved for, so `limit` bounds `(2·radius + 1)^s`.
pub fn enumerate_integer_kernel(a: &FdpMatrix, radius: u64) -> Result<Vec<KernelVector>> {
    enumerate_integer_kernel_with_limit(a, radius, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_integer_kernel_with_limit(
    a: &FdpMatrix,
    radius: u64,
    limit: u128,
) -> Result<Vec<KernelVector>> {
    let cols = a.cols();
    let (m, pivots) = echelon(a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    if free.is_empty() || radius == 0 {
        return Ok(Vec::new());
    }
    let size: BigUint = Pow::pow(BigUint::from(2 * radius as u128 + 1), free.len() as u32);
    if size > BigUint::from(limit) {
        return Err(Error::SearchTooLarge {
            module: "fdkernel",
            candidates: size.to_string(),
            limit,
            hint: "lower the radius or raise the enumeration limit",
        });
    }
    let radius = i64::try_from(radius)
        .map_err(|_| Error::Consistency(format!("radius {radius} does not fit in 64 bits")))?;
    let small = |x: &BigInt| {
        x.to_i128()
            .ok_or_else(|| Error::Consistency(format!("echelon entry {x} does not fit in 128 bits")))
    };
    // Row i reads d_i·x_{pivot_i} + Σ_f c_{i,f}·x_f = 0.
    let mut solve: Vec<(usize, i128, Vec<i128>)> = Vec::with_capacity(pivots.len());
    for (row, &p) in m.iter().zip(&pivots) {
        let c = free.iter().map(|&f| small(&row[f])).collect::<Result<Vec<_>>>()?;
        solve.push((p, small(&row[p])?, c));
    }
    let mut out = Vec::new();
    let mut t = vec![-radius; free.len()];
    let mut x = vec![0i64; cols];
    'odometer: loop {
        if t.iter().any(|&v| v != 0) && fill_pivots(&solve, &t, radius, &mut x) {
            for (&f, &v) in free.iter().zip(&t) {
                x[f] = v;
            }
            if x.iter().find(|&&e| e != 0).is_some_and(|&e| e > 0) {
                out.push(KernelVector::new(x.clone()));
            }
        }
        for d in (0..t.len()).rev() {
            if t[d] < radius {
                t[d] += 1;
                continue 'odometer;
            }
            t[d] = -radius;
        }
        break;
    }
    out.sort_by(|p, q| p.sort_key().cmp(&q.sort_key()));
    Ok(out)
}

/// Solves for the pivot coordinates; false when one is fractional or
/// outside the box.
fn fill_pivots(solve: &[(usize, i128, Vec<i128>)], t: &[i64], radius: i64, x: &mut [i64]) -> bool {
    for (p, d, c) in solve {
        let s: i128 = c.iter().zip(t).map(|(a, &b)| a * b as i128).sum();
        if s % d != 0 {
            return false;
        }
        let v = -s / d;
        if v.abs() > radius as i128 {
            return false;
        }
        x[*p] = v as i64;
    }
    true
}

/// Minimum of `‖v⁺‖∞ + ‖v⁻‖∞` over nonzero integer kernel vectors, ties
/// broken lexicographically; `None` for a trivial kernel.
pub fn minimal_k(a: &FdpMatrix) -> Result<Option<(u64, KernelVector)>> {
    let s = a.cols() - a.r;
    if s == 0 {
        return Ok(None);
    }
    let bound = siegel_bound(a.n, a.r, a.u, s)?;
    let radius = (bound * 2u8).to_u64().ok_or_else(|| Error::SearchTooLarge {
        module: "fdkernel",
        candidates: "more than 2^64".into(),
        limit: DEFAULT_ENUMERATION_LIMIT,
        hint: "the Siegel radius does not fit in 64 bits",
    })?;
    let found = enumerate_integer_kernel(a, radius)?;
    let best = found.into_iter().next().ok_or_else(|| {
        Error::verification("fdkernel", format!("no kernel vector within radius {radius}"))
    })?;
    Ok(Some((best.k_value(), best)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3_matrix() -> FdpMatrix {
        FdpMatrix::from_rows(2, vec![vec![2, 0, 0, 0], vec![0, 0, 1, 1]])
    }

    fn realization_matrix() -> FdpMatrix {
        FdpMatrix::from_rows(2, vec![vec![1, 1, 0], vec![0, 0, 2]])
    }

    fn kv(v: &[i64]) -> KernelVector {
        KernelVector::new(v.to_vec())
    }

    #[test]
    fn reduction_examples() {
        let a = reduce_fdp_matrix(&z3_matrix());
        assert_eq!(a.rows, z3_matrix().rows);
        assert_eq!((a.r, a.u, a.reduced), (2, 1, true));

        let b = reduce_fdp_matrix(&FdpMatrix::from_rows(2, vec![vec![1, 1], vec![2, 2]]));
        assert_eq!(b.rows, vec![vec![1, 1]]);
        assert_eq!((b.r, b.u), (1, 0));

        let c = reduce_fdp_matrix(&realization_matrix());
        assert_eq!(c.rows, realization_matrix().rows);
        assert_eq!((c.r, c.u), (2, 1));
    }

    #[test]
    fn reduction_drops_duplicates_and_dependents_in_label_order() {
        let a = FdpMatrix::from_rows(3, vec![vec![1, 2, 0], vec![1, 2, 0], vec![0, 1, 1], vec![1, 3, 1], vec![3, 0, 0]]);
        let b = reduce_fdp_matrix(&a);
        assert_eq!(b.rows, vec![vec![1, 2, 0], vec![0, 1, 1], vec![3, 0, 0]]);
        assert_eq!(b.row_labels, [0, 2, 4].map(BigInt::from).to_vec());
        assert_eq!(a.r, 3);
    }

    #[test]
    fn kernel_examples() {
        let k = rational_kernel_basis(&reduce_fdp_matrix(&z3_matrix()));
        assert_eq!(k.dimension, 2);
        assert_eq!(k.sample_integer_vectors, vec![kv(&[0, 1, 0, 0]), kv(&[0, 0, 1, -1])]);

        let k = rational_kernel_basis(&FdpMatrix::from_rows(1, vec![vec![1, 0], vec![0, 1]]));
        assert_eq!(k.dimension, 0);

        let k = rational_kernel_basis(&realization_matrix());
        assert_eq!(k.sample_integer_vectors, vec![kv(&[1, -1, 0])]);
    }

    #[test]
    fn siegel_examples() {
        assert_eq!(siegel_bound(2, 2, 1, 2).unwrap(), BigUint::from(1u8));
        assert_eq!(siegel_bound(2, 2, 2, 1).unwrap(), BigUint::from(1u8));
        assert_eq!(siegel_bound(3, 3, 1, 1).unwrap(), BigUint::from(9u8));
        assert_eq!(siegel_bound(2, 1, 0, 0), Err(Error::TrivialKernel));
    }

    #[test]
    fn enumeration_examples() {
        let found = enumerate_integer_kernel(&z3_matrix(), 1).unwrap();
        assert!(found.contains(&kv(&[0, 1, 0, 0])));
        assert!(found.contains(&kv(&[0, 0, 1, -1])));
        assert!(enumerate_integer_kernel(&FdpMatrix::from_rows(1, vec![vec![1, 0], vec![0, 1]]), 5)
            .unwrap()
            .is_empty());
        assert_eq!(enumerate_integer_kernel(&realization_matrix(), 1).unwrap(), vec![kv(&[1, -1, 0])]);
    }

    #[test]
    fn enumeration_limit_is_enforced() {
        let err = enumerate_integer_kernel_with_limit(&z3_matrix(), 100, 1000).unwrap_err();
        assert!(matches!(err, Error::SearchTooLarge { module: "fdkernel", .. }));
    }

    #[test]
    fn minimal_k_examples() {
        assert_eq!(minimal_k(&reduce_fdp_matrix(&z3_matrix())).unwrap(), Some((1, kv(&[0, 1, 0, 0]))));
        assert_eq!(minimal_k(&realization_matrix()).unwrap(), Some((2, kv(&[1, -1, 0]))));
        assert_eq!(minimal_k(&FdpMatrix::from_rows(1, vec![vec![1, 0], vec![0, 1]])).unwrap(), None);
    }

    #[test]
    fn norms() {
        let v = kv(&[-2, 1, 0, 3]);
        assert_eq!(v.plus(), vec![0, 1, 0, 3]);
        assert_eq!(v.minus(), vec![2, 0, 0, 0]);
        assert_eq!((v.plus_norm(), v.minus_norm(), v.sup_norm(), v.k_value()), (3, 2, 3, 5));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix() -> impl Strategy<Value = FdpMatrix> {
            (2u64..6, 1usize..4, 2usize..5).prop_flat_map(|(n, rows, cols)| {
                prop::collection::vec(prop::collection::vec(0..=n, cols), rows)
                    .prop_map(move |rows| FdpMatrix::from_rows(n, rows))
            })
        }

        proptest! {
            #[test]
            fn reduction_preserves_kernel(a in matrix()) {
                let b = reduce_fdp_matrix(&a);
                prop_assert_eq!(a.r, b.r);
                let kb = rational_kernel_basis(&b);
                prop_assert_eq!(kb.dimension, a.cols() - b.r);
                for v in &kb.rational_basis {
                    prop_assert!(a.annihilates_rational(v));
                }
                let ka = rational_kernel_basis(&a);
                for v in &ka.rational_basis {
                    prop_assert!(b.annihilates_rational(v));
                }
            }

            #[test]
            fn enumerated_vectors_are_kernel_vectors(a in matrix(), radius in 1u64..3) {
                let b = reduce_fdp_matrix(&a);
                for v in enumerate_integer_kernel(&b, radius).unwrap() {
                    prop_assert!(a.annihilates(&v.v));
                    prop_assert!(v.sup_norm() <= radius);
                    prop_assert!(v.v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0));
                }
            }

            #[test]
            fn minimal_k_is_minimal(a in matrix()) {
                let b = reduce_fdp_matrix(&a);
                if let Some((k, v)) = minimal_k(&b).unwrap() {
                    prop_assert!(k >= v.sup_norm());
                    let radius = 2 * siegel_bound(b.n, b.r, b.u, b.cols() - b.r).unwrap().to_u64().unwrap();
                    for w in enumerate_integer_kernel(&b, radius).unwrap() {
                        prop_assert!(w.k_value() >= k);
                    }
                }
            }
        }
    }
}
