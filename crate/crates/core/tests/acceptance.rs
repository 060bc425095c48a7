//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ivp_core::classify::{analyze, Analysis};
use ivp_core::exact::{ExactRational, PadicContext};
use ivp_core::fdkernel::{enumerate_integer_kernel, reduce_fdp_matrix, siegel_bound, FdpMatrix, KernelVector};
use ivp_core::fixdiv::{fixed_divisor_valuation, witness_classes};
use ivp_core::poly::{validate_factored, CheckStatus, FactoredPolynomial, Polynomial};
use ivp_core::powerfac::{
    construct_factorization_pair, is_factorization_of_power, is_integer_valued, is_power_of_f, minimal_admissible,
    Oracle, OracleMode, DEFAULT_ORACLE_LIMIT,
};
use ivp_core::realization::{expected_s, generate_and_verify, RealizationReport};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn lib<T>(r: ivp_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn z3_example() -> FactoredPolynomial {
    let ctx = PadicContext::new(3).unwrap();
    FactoredPolynomial::new(
        ctx,
        vec![
            (Polynomial::from_integers(&[9, 0, 1]), 1),
            (Polynomial::linear(5), 3),
            (Polynomial::linear(1), 1),
            (Polynomial::linear(7), 1),
        ],
    )
    .unwrap()
}

fn row_set(a: &FdpMatrix) -> BTreeSet<Vec<u64>> {
    a.rows.iter().cloned().collect()
}

fn proportional_to(v: &[ExactRational], target: &[i64]) -> bool {
    let neg: Vec<i64> = target.iter().map(|x| -x).collect();
    let as_ints: Option<Vec<i64>> = v
        .iter()
        .map(|x| x.is_integer().then(|| x.numerator().to_i64()).flatten())
        .collect();
    as_ints.is_some_and(|w| w == target || w == neg)
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure!(elapsed < limit, "took {elapsed:.2?}, limit {limit:?}");
    Ok(())
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let fp = z3_example();
    let report = lib(witness_classes(&fp))?;
    let analysis = lib(analyze(&fp))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    ensure!(report.n == 2, "n = {}", report.n);
    ensure!(report.depth == 1, "witness classes taken modulo 3^{}", report.depth);
    let classes: Vec<i64> = report.classes.iter().map(|c| c.class.representative.to_i64().unwrap()).collect();
    let witnesses: Vec<i64> = report.classes.iter().map(|c| c.witness.to_i64().unwrap()).collect();
    ensure!(classes == [0, 1], "classes {classes:?}");
    ensure!(witnesses == [0, 4], "witnesses {witnesses:?}");
    ensure!(!classes.contains(&2), "class 2 has a witness");
    ensure!(
        analysis.matrix.rows == vec![vec![2, 0, 0, 0], vec![0, 0, 1, 1]],
        "rows {:?}",
        analysis.matrix.rows
    );
    Ok(format!("n = 2, W = {{0, 4}}, rows (2,0,0,0), (0,0,1,1) in {:.2?}", start.elapsed()))
}

fn check_family(report: &RealizationReport, rows: &[Vec<u64>], kernel: &[i64]) -> Result<(), String> {
    let a = &report.analysis;
    ensure!(
        row_set(&a.reduced) == rows.iter().cloned().collect(),
        "reduced rows {:?}",
        a.reduced.rows
    );
    ensure!(a.kernel.dimension == 1, "kernel dimension {}", a.kernel.dimension);
    ensure!(
        proportional_to(&a.kernel.rational_basis[0], kernel),
        "kernel generator {:?}",
        a.kernel.rational_basis[0].iter().map(ToString::to_string).collect::<Vec<_>>()
    );
    ensure!(a.verdict.irreducible, "F is reducible");
    Ok(())
}

fn family_two_two() -> Outcome {
    let start = Instant::now();
    let report = lib(generate_and_verify(2, 2, Some(8)))?;
    check_family(&report, &[vec![1, 1, 0], vec![0, 0, 2]], &[1, -1, 0])?;
    let s = report.oracle.as_ref().and_then(|o| o.result.as_ref()).map(|r| r.s);
    let formula = 3u32 * (1 + 1);
    ensure!(s == Some(6), "pruned oracle S = {s:?}");
    ensure!(lib(expected_s(2, 2))? == formula.into(), "expected S formula");
    let fp = lib(report.spec.factored())?;
    let oracle = lib(Oracle::new(&fp, 6, DEFAULT_ORACLE_LIMIT))?;
    let full5 = lib(oracle.split(5, OracleMode::Full))?;
    let full6 = lib(oracle.split(6, OracleMode::Full))?;
    ensure!(full5.is_none(), "full mode splits F^5: {full5:?}");
    ensure!(full6.is_some(), "full mode finds no split of F^6");
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("S = 6 in both modes, kernel ±(1,-1,0), {:.2?}", start.elapsed()))
}

fn family_two_three() -> Outcome {
    let start = Instant::now();
    let report = lib(generate_and_verify(2, 3, Some(12)))?;
    ensure!(report.analysis.verdict.irreducible, "F is reducible");
    let result = report.oracle.as_ref().and_then(|o| o.result.as_ref());
    ensure!(result.map(|r| r.s) == Some(12), "pruned oracle S = {:?}", result.map(|r| r.s));
    // The oracle scans j = 2, 3, … in order, so S = 12 means every smaller
    // power factors uniquely.
    ensure!(lib(expected_s(2, 3))? == 12u8.into(), "expected S formula");
    within(start.elapsed(), Duration::from_secs(600))?;
    Ok(format!("unique up to F^11, non-unique at F^12, {:.2?}", start.elapsed()))
}

struct Instance {
    fp: FactoredPolynomial,
    analysis: Analysis,
}

fn random_factor(rng: &mut ChaCha8Rng) -> Polynomial {
    loop {
        let degree = [1, 1, 1, 2, 2, 3][rng.gen_range(0..6)];
        if degree == 1 {
            return Polynomial::linear(rng.gen_range(-4i64..=4));
        }
        let mut c: Vec<i64> = (0..degree).map(|_| rng.gen_range(-5i64..=5)).collect();
        c.push(1);
        let g = Polynomial::from_integers(&c);
        if ivp_core::poly::irreducibility_over_q(&g).0 == CheckStatus::Pass {
            return g;
        }
    }
}

/// Small factored polynomials with `n ≥ 1`, multiplicity gcd 1 and `F`
/// irreducible, so that every instance exercises the oracle.
fn random_instances(count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1f0d_2024);
    let mut out = Vec::new();
    while out.len() < count {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let ctx = PadicContext::new(p).unwrap();
        let size = rng.gen_range(1..=4);
        let mut factors: Vec<(Polynomial, u32)> = Vec::new();
        while factors.len() < size {
            let g = random_factor(&mut rng);
            if factors.iter().all(|(h, _)| *h != g) {
                factors.push((g, rng.gen_range(1..=2)));
            }
        }
        factors[0].1 = 1;
        let Ok(fp) = FactoredPolynomial::new(ctx, factors) else { continue };
        let Ok(validation) = validate_factored(&fp) else { continue };
        if validation.checks.iter().any(|c| c.status != CheckStatus::Pass) {
            continue;
        }
        let analysis = analyze(&fp).expect("analysis of a small instance");
        if analysis.verdict.n >= 1 && analysis.verdict.irreducible {
            out.push(Instance { fp, analysis });
        }
    }
    out
}

fn soundness(instances: &[Instance]) -> Outcome {
    let start = Instant::now();
    let (mut trivial, mut nontrivial, mut skipped) = (0, 0, 0);
    for inst in instances {
        let v = &inst.analysis.verdict;
        if !v.irreducible {
            skipped += 1;
            continue;
        }
        if v.fdk_trivial {
            let rank_bound = v.uniqueness.as_ref().and_then(|u| u.rank_bound_u64()).unwrap_or(u64::MAX);
            let j_max = rank_bound.min(12);
            if j_max < 2 {
                continue;
            }
            let oracle = lib(Oracle::new(&inst.fp, j_max, DEFAULT_ORACLE_LIMIT))?;
            if let Some(r) = lib(oracle.min_nonunique_power(j_max, OracleMode::Full))? {
                return Err(format!("{}: trivial kernel but F^{} splits as {:?}", inst.fp, r.s, r.witness));
            }
            trivial += 1;
        } else {
            let bound = v.nonunique_bound.ok_or_else(|| format!("{}: no exponent bound", inst.fp))?;
            let oracle = lib(Oracle::new(&inst.fp, bound, DEFAULT_ORACLE_LIMIT))?;
            let found = lib(oracle.min_nonunique_power(bound, OracleMode::Full))?;
            ensure!(found.is_some(), "{}: no split of F^j for j <= {bound}", inst.fp);
            nontrivial += 1;
        }
    }
    Ok(format!(
        "{trivial} trivial-kernel and {nontrivial} nontrivial-kernel irreducible instances, {skipped} reducible skipped, {:.2?}",
        start.elapsed()
    ))
}

fn constructive(instances: &[Instance]) -> Outcome {
    let mut checked = 0;
    for inst in instances.iter().filter(|i| !i.analysis.verdict.fdk_trivial) {
        let fp = &inst.fp;
        let n = inst.analysis.verdict.n;
        let m = fp.multiplicities();
        let mut vectors: Vec<KernelVector> = inst.analysis.verdict.nonunique_vector.iter().cloned().collect();
        vectors.extend(inst.analysis.minimal_k.iter().map(|(_, v)| v.clone()));
        ensure!(!vectors.is_empty(), "{fp}: nontrivial kernel but no integer kernel vector");
        for v in vectors {
            let (k, l) = minimal_admissible(&v, &m, n);
            let pair = lib(construct_factorization_pair(fp, n, &v, k, l))?;
            ensure!(is_factorization_of_power(&pair, &m, n), "{fp}: product is not F^{}", k + l);
            for side in [&pair.left, &pair.right] {
                ensure!(lib(is_integer_valued(fp, side))?, "{fp}: {side:?} is not integer-valued");
                ensure!(!is_power_of_f(side, &m, n), "{fp}: {side:?} is a power of F");
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} factorizations verified"))
}

fn siegel_property() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e9e1);
    let mut tested = 0;
    while tested < 200 {
        let n = rng.gen_range(2u64..=6);
        let cols = rng.gen_range(2..=6);
        let rows = rng.gen_range(1..cols);
        let matrix: Vec<Vec<u64>> = (0..rows)
            .map(|_| {
                let mut row = vec![0u64; cols];
                let mut budget = rng.gen_range(1..=n);
                while budget > 0 {
                    row[rng.gen_range(0..cols)] += 1;
                    budget -= 1;
                }
                row
            })
            .collect();
        let reduced = reduce_fdp_matrix(&FdpMatrix::from_rows(n, matrix));
        let s = reduced.cols() - reduced.r;
        if s == 0 {
            continue;
        }
        let radius = lib(siegel_bound(n, reduced.r, reduced.u, s))?
            .to_u64()
            .ok_or("Siegel bound overflow")?;
        let found = lib(enumerate_integer_kernel(&reduced, radius))?;
        ensure!(
            !found.is_empty(),
            "no kernel vector within radius {radius} for rows {:?} (n = {n})",
            reduced.rows
        );
        tested += 1;
    }
    Ok(format!("{tested} matrices"))
}

fn linearity(instances: &[Instance]) -> Outcome {
    for inst in instances {
        let f = inst.fp.expand();
        let n = inst.analysis.verdict.n;
        let mut power = Polynomial::one();
        for j in 1..=3u64 {
            power = power.mul(&f);
            let got = lib(fixed_divisor_valuation(&power, inst.fp.ctx()))?;
            ensure!(got == j * n, "{}: fixdiv valuation of f^{j} is {got}, expected {}", inst.fp, j * n);
        }
    }
    Ok(format!("{} instances, j = 1, 2, 3", instances.len()))
}

fn coset_law() -> Outcome {
    let mut divisors = 0usize;
    for (r, n, j_max) in [(2u64, 2u64, 8u64), (2, 3, 12)] {
        let report = lib(generate_and_verify(r, n, None))?;
        let fp = lib(report.spec.factored())?;
        let a = &report.analysis.reduced;
        let m = fp.multiplicities();
        let oracle = lib(Oracle::new(&fp, j_max, DEFAULT_ORACLE_LIMIT))?;
        let full = lib(oracle.min_nonunique_power(j_max, OracleMode::Full))?.map(|r| r.s);
        let pruned = lib(oracle.min_nonunique_power(j_max, OracleMode::Pruned))?.map(|r| r.s);
        ensure!(full == pruned, "(r, n) = ({r}, {n}): full S = {full:?}, pruned S = {pruned:?}");
        ensure!(full.is_some(), "(r, n) = ({r}, {n}): no S up to {j_max}");
        for j in 2..=j_max {
            for d in lib(oracle.divisors(j, OracleMode::Full))? {
                // n·k − ℓ·m ∈ ker A is the coset law scaled by n.
                let w: Vec<i64> = d
                    .exponents
                    .iter()
                    .zip(&m)
                    .map(|(&k, &mg)| (n * k) as i64 - (d.denominator_exponent * mg) as i64)
                    .collect();
                ensure!(a.annihilates(&w), "(r, n) = ({r}, {n}), j = {j}: divisor {d:?} violates the coset law");
                divisors += 1;
            }
        }
    }
    Ok(format!("{divisors} divisors, full and pruned S agree"))
}

fn main() {
    let total = Instant::now();
    let instances = random_instances(50);
    let results: Vec<(&str, Outcome)> = vec![
        ("1 worked example over Z_(3)", worked_example()),
        ("2 extremal family (r, n) = (2, 2)", family_two_two()),
        ("3 extremal family (r, n) = (2, 3)", family_two_three()),
        ("4 trivial kernel soundness on 50 random instances", soundness(&instances)),
        ("5 constructive factorizations from kernel vectors", constructive(&instances)),
        ("6 Siegel radius contains a kernel vector", siegel_property()),
        ("7 fixed divisor valuation is linear in powers", linearity(&instances)),
        ("8 divisor coset law and mode agreement", coset_law()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed in {:.2?}", results.len() - failed, results.len(), total.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
