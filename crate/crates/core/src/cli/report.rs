//! Report records written as JSON, and their plain-text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classify::{Analysis, UniquenessBounds, Verdict};
use crate::fdkernel::{FdpMatrix, KernelVector};
use crate::fixdiv::WitnessReport;
use crate::poly::{FactoredPolynomial, ValidationReport};
use crate::powerfac::{FactorizationPair, IvpElement, OracleMode, OracleResult};
use crate::realization::RealizationReport;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputEcho {
    pub text: String,
    pub p: u64,
    pub factors: Vec<String>,
    pub multiplicities: Vec<u64>,
    pub declared_denominator: Option<String>,
    pub warnings: Vec<String>,
}

/// A factorization `F^j = left · right` with both sides spelled out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub pair: FactorizationPair,
    pub left: String,
    pub right: String,
}

impl Certificate {
    pub fn new(fp: &FactoredPolynomial, pair: FactorizationPair) -> Self {
        let left = pair.left.display(fp).to_string();
        let right = pair.right.display(fp).to_string();
        Certificate { pair, left, right }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: InputEcho,
    pub validation: ValidationReport,
    pub analysis: Analysis,
    pub certificate: Option<Certificate>,
    pub oracle: Option<OracleReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    pub input: InputEcho,
    pub witnesses: WitnessReport,
    pub matrix: FdpMatrix,
    pub reduced: FdpMatrix,
    pub dimension: usize,
    pub basis: Vec<Vec<String>>,
    pub siegel_bound: Option<u64>,
    pub minimal_k: Option<(u64, KernelVector)>,
    pub short_vectors: Vec<KernelVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub input: InputEcho,
    pub n: u64,
    pub r: usize,
    pub u: usize,
    pub s: usize,
    pub siegel_bound: Option<u64>,
    pub minimal_k: Option<(u64, KernelVector)>,
    pub nonunique_bound: Option<u64>,
    pub nonunique_vector: Option<KernelVector>,
    pub uniqueness: Option<UniquenessBounds>,
    pub bounds_informational: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub input: InputEcho,
    pub n: u64,
    pub vector: KernelVector,
    pub k: u64,
    pub l: u64,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub j_max: u64,
    pub mode: OracleMode,
    pub result: Option<OracleResult>,
    pub certificate: Option<Certificate>,
}

impl OracleReport {
    pub fn new(fp: &FactoredPolynomial, j_max: u64, mode: OracleMode, result: Option<OracleResult>) -> Self {
        OracleReport {
            certificate: result.as_ref().map(|r| Certificate::new(fp, r.witness.clone())),
            j_max,
            mode,
            result,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCommandReport {
    pub input: InputEcho,
    pub n: u64,
    pub oracle: OracleReport,
}

fn vec_str<T: std::fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".to_string(), ToString::to_string)
}

fn render_input(out: &mut String, input: &InputEcho) {
    let _ = writeln!(out, "input: {}", input.text);
    let _ = writeln!(out, "p = {}", input.p);
    for (i, (g, m)) in input.factors.iter().zip(&input.multiplicities).enumerate() {
        let _ = writeln!(out, "  g{} = {g}   multiplicity {m}", i + 1);
    }
    if let Some(d) = &input.declared_denominator {
        let _ = writeln!(out, "declared denominator: {d}");
    }
    for w in &input.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
}

fn render_witnesses(out: &mut String, w: &WitnessReport, p: u64) {
    let _ = writeln!(out, "n = v(fixdiv(f)) = {}", w.n);
    let _ = writeln!(out, "witness classes modulo {p}^{}:", w.depth);
    for c in &w.classes {
        let _ = writeln!(
            out,
            "  class {:>6}   witness {:>6}   vector {}",
            c.class.representative,
            c.witness,
            vec_str(&c.vector)
        );
    }
}

fn render_matrix(out: &mut String, name: &str, a: &FdpMatrix) {
    let _ = writeln!(out, "{name} ({} rows, r = {}, u = {}):", a.rows.len(), a.r, a.u);
    for (row, label) in a.rows.iter().zip(&a.row_labels) {
        let _ = writeln!(out, "  [{label}] {}", vec_str(row));
    }
}

fn render_kernel_summary(out: &mut String, analysis: &Analysis) {
    let _ = writeln!(out, "kernel dimension: {}", analysis.kernel.dimension);
    for v in &analysis.kernel.rational_basis {
        let _ = writeln!(out, "  basis vector {}", vec_str(v));
    }
    let _ = writeln!(out, "Siegel bound: {}", opt(&analysis.siegel_bound));
    match &analysis.minimal_k {
        Some((k, v)) => {
            let _ = writeln!(out, "minimal K: {k} at {}", vec_str(&v.v));
        }
        None => {
            let _ = writeln!(out, "minimal K: none");
        }
    }
}

fn render_uniqueness(out: &mut String, u: &Option<UniquenessBounds>) {
    match u {
        Some(b) => {
            let _ = writeln!(out, "uniqueness bound from the rank: {}", b.bound_rank);
            let _ = writeln!(
                out,
                "uniqueness bound from the residue field: {} = {}",
                b.bound_q_expression,
                b.bound_q
                    .as_ref()
                    .map_or_else(|| "(too large to expand)".to_string(), ToString::to_string)
            );
            if let Some(s) = b.sharper_bound {
                let _ = writeln!(out, "sharper bound for n = 1: {s}");
            }
        }
        None => {
            let _ = writeln!(out, "uniqueness bounds: not applicable (n = 0)");
        }
    }
}

fn render_verdict(out: &mut String, v: &Verdict) {
    let _ = writeln!(out, "irreducible: {}", v.irreducible);
    let _ = writeln!(out, "multiplicity gcd: {} (proper power: {})", v.multiplicity_gcd, v.proper_power);
    let _ = writeln!(out, "kernel trivial: {}", v.fdk_trivial);
    let verdict = match v.absolutely_irreducible {
        Some(true) => "yes",
        Some(false) => "no",
        None => "not decided (proper power with trivial kernel)",
    };
    let _ = writeln!(out, "absolutely irreducible: {verdict}");
    if let (Some(b), Some(vec)) = (v.nonunique_bound, &v.nonunique_vector) {
        let note = if v.bounds_informational { " (informational: F is reducible)" } else { "" };
        let _ = writeln!(out, "non-unique factorization for every exponent >= {b}, from {}{note}", vec_str(&vec.v));
    }
    render_uniqueness(out, &v.uniqueness);
}

fn render_certificate(out: &mut String, c: &Certificate) {
    let _ = writeln!(out, "F^{} = [{}] * [{}]", c.pair.j, c.left, c.right);
    render_element(out, "  left ", &c.pair.left);
    render_element(out, "  right", &c.pair.right);
}

fn render_element(out: &mut String, name: &str, e: &IvpElement) {
    let _ = writeln!(out, "{name}: exponents {} over p^{}", vec_str(&e.exponents), e.denominator_exponent);
}

fn render_oracle(out: &mut String, o: &OracleReport) {
    let mode = match o.mode {
        OracleMode::Full => "full",
        OracleMode::Pruned => "pruned",
    };
    match (&o.result, &o.certificate) {
        (Some(r), Some(c)) => {
            let _ = writeln!(out, "oracle ({mode}, j_max = {}): least non-unique power S = {}", o.j_max, r.s);
            render_certificate(out, c);
        }
        _ => {
            let _ = writeln!(
                out,
                "oracle ({mode}, j_max = {}): no non-unique factorization of F^j for j <= {}",
                o.j_max, o.j_max
            );
        }
    }
}

impl AnalysisReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        render_input(&mut out, &self.input);
        render_witnesses(&mut out, &self.analysis.witnesses, self.input.p);
        render_matrix(&mut out, "fdp matrix", &self.analysis.matrix);
        render_matrix(&mut out, "reduced fdp matrix", &self.analysis.reduced);
        render_kernel_summary(&mut out, &self.analysis);
        render_verdict(&mut out, &self.analysis.verdict);
        if let Some(c) = &self.certificate {
            let _ = writeln!(out, "certificate:");
            render_certificate(&mut out, c);
        }
        if let Some(o) = &self.oracle {
            render_oracle(&mut out, o);
        }
        out
    }
}

impl KernelReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        render_input(&mut out, &self.input);
        render_witnesses(&mut out, &self.witnesses, self.input.p);
        render_matrix(&mut out, "fdp matrix", &self.matrix);
        render_matrix(&mut out, "reduced fdp matrix", &self.reduced);
        let _ = writeln!(out, "kernel dimension: {}", self.dimension);
        for v in &self.basis {
            let _ = writeln!(out, "  basis vector {}", vec_str(v));
        }
        let _ = writeln!(out, "Siegel bound: {}", opt(&self.siegel_bound));
        if let Some((k, v)) = &self.minimal_k {
            let _ = writeln!(out, "minimal K: {k} at {}", vec_str(&v.v));
        }
        let _ = writeln!(out, "kernel vectors within twice the Siegel bound: {}", self.short_vectors.len());
        for v in &self.short_vectors {
            let _ = writeln!(out, "  {}   K = {}", vec_str(&v.v), v.k_value());
        }
        out
    }
}

impl BoundsReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        render_input(&mut out, &self.input);
        let _ = writeln!(out, "n = {}, r = {}, u = {}, s = {}", self.n, self.r, self.u, self.s);
        let _ = writeln!(out, "Siegel bound: {}", opt(&self.siegel_bound));
        if let Some((k, v)) = &self.minimal_k {
            let _ = writeln!(out, "minimal K: {k} at {}", vec_str(&v.v));
        }
        match (&self.nonunique_bound, &self.nonunique_vector) {
            (Some(b), Some(v)) => {
                let note = if self.bounds_informational { " (informational: F is reducible)" } else { "" };
                let _ = writeln!(out, "non-unique factorization for every exponent >= {b}, from {}{note}", vec_str(&v.v));
            }
            _ => {
                let _ = writeln!(out, "non-unique factorization bound: none (trivial kernel)");
            }
        }
        render_uniqueness(&mut out, &self.uniqueness);
        out
    }
}

impl FactorizationReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        render_input(&mut out, &self.input);
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "kernel vector {}, k = {}, l = {}", vec_str(&self.vector.v), self.k, self.l);
        render_certificate(&mut out, &self.certificate);
        out
    }
}

impl OracleCommandReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        render_input(&mut out, &self.input);
        let _ = writeln!(out, "n = {}", self.n);
        render_oracle(&mut out, &self.oracle);
        out
    }
}

pub fn render_realization(report: &RealizationReport) -> String {
    let mut out = String::new();
    let s = &report.spec;
    let _ = writeln!(out, "family r = {}, n = {}, p = {}", s.r, s.n, s.p);
    let _ = writeln!(out, "residues: w = {}, a = {}, z = {}", vec_str(&s.w), vec_str(&s.a), vec_str(&s.z));
    let _ = writeln!(out, "shifts: b = {}, c = {}", vec_str(&s.b), vec_str(&s.c));
    for (j, h) in s.h_family.iter().enumerate() {
        let _ = writeln!(out, "  h{} = {h}", j + 1);
    }
    if let Some(crt) = &s.crt {
        let _ = writeln!(
            out,
            "replacements: Eisenstein at {}, congruent modulo {} (total degree {})",
            crt.eisenstein_prime, crt.modulus, crt.d
        );
    }
    for (j, g) in s.g_family.iter().enumerate() {
        let _ = writeln!(out, "  g{} = {g}", j + 1);
    }
    let factors: Vec<String> = s.g_family.iter().map(|g| format!("({g})")).collect();
    let _ = writeln!(out, "F = {} / {}^{}", factors.join("*"), s.p, s.n);
    render_matrix(&mut out, "reduced fdp matrix", &report.analysis.reduced);
    render_kernel_summary(&mut out, &report.analysis);
    render_verdict(&mut out, &report.analysis.verdict);
    let _ = writeln!(out, "expected S = {}", s.expected_s);
    if let Some(o) = &report.oracle {
        match &o.result {
            Some(r) => {
                let _ = writeln!(out, "oracle (pruned, j_max = {}): S = {}", o.j_max, r.s);
            }
            None => {
                let _ = writeln!(out, "oracle (pruned, j_max = {}): no non-unique power found", o.j_max);
            }
        }
    }
    for c in &report.checks {
        let _ = writeln!(out, "verified: {c}");
    }
    out
}
