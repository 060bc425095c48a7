//! The `ivp` command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage and syntax errors, 2 for
//! computation errors and 3 when a verification step fails.

pub mod parse;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classify::{analyze_with, Analysis, AnalysisOptions};
use crate::error::{Error, Result};
use crate::exact::PadicContext;
use crate::fdkernel::{enumerate_integer_kernel_with_limit, KernelVector, DEFAULT_ENUMERATION_LIMIT};
use crate::fixdiv::DEFAULT_DEPTH_CAP;
use crate::poly::{validate_factored, FactoredPolynomial, ValidationReport};
use crate::powerfac::{construct_factorization_pair, minimal_admissible, Oracle, OracleMode, DEFAULT_ORACLE_LIMIT};
use crate::realization::{generate_and_verify, verify_family, RealizationReport, RealizationSpec};

use report::{
    AnalysisReport, BoundsReport, Certificate, FactorizationReport, InputEcho, KernelReport, OracleCommandReport,
    OracleReport,
};

/// Largest `--jmax` accepted without `--allow-large`.
pub const JMAX_GUARD: u64 = 64;

#[derive(Debug, Parser)]
#[command(name = "ivp", version, about = "Factorization of powers of integer-valued polynomials over Z_(p)")]
pub struct Cli {
    /// The prime p.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Also write the report as JSON to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub json: Option<PathBuf>,
    /// Refinement depth cap for the fixed-divisor search.
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH_CAP)]
    pub depth_cap: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full analysis: witnesses, fdp matrix, kernel, verdict and bounds.
    Analyze {
        /// Factored numerator such as "(x^2+9)*(x-5)^3", optionally "/ p^n".
        expr: String,
        /// Also run the pruned oracle up to this exponent.
        #[arg(long)]
        jmax: Option<u64>,
    },
    /// The fdp matrix, its kernel and the short kernel vectors.
    Kernel {
        /// Factored numerator such as "(x^2+9)*(x-5)^3", optionally "/ p^n".
        expr: String,
    },
    /// Exponent bounds for non-unique and unique factorization.
    Bounds {
        /// Factored numerator such as "(x^2+9)*(x-5)^3", optionally "/ p^n".
        expr: String,
    },
    /// Builds `F^(k+l) = H * H'` from a kernel vector.
    FactorizePower {
        /// Factored numerator such as "(x^2+9)*(x-5)^3", optionally "/ p^n".
        expr: String,
        /// Comma-separated kernel vector, in factor order.
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
        /// Exponent of the left factor's F-part; defaults to the least admissible.
        #[arg(long)]
        k: Option<u64>,
        /// Exponent of the right factor's F-part; defaults to the least admissible.
        #[arg(long)]
        l: Option<u64>,
    },
    /// Exhaustive search for the least non-unique power of F.
    Oracle {
        /// Factored numerator such as "(x^2+9)*(x-5)^3", optionally "/ p^n".
        expr: String,
        /// Largest power of F to examine.
        #[arg(long, default_value_t = 12)]
        jmax: u64,
        /// `full` scans every divisor; `pruned` only those allowed by the fdp matrix.
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        /// Largest number of exponent vectors scanned per power.
        #[arg(long)]
        limit: Option<u128>,
        /// Permit `--jmax` above 64.
        #[arg(long)]
        allow_large: bool,
    },
    /// Generates and verifies the extremal family for (r, n).
    Generate {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        n: u64,
        /// Confirm the least non-unique power with the pruned oracle.
        #[arg(long)]
        jmax: Option<u64>,
    },
    /// Re-verifies a family written by `generate --json`.
    VerifyGenerated {
        /// A report from `generate --json`, or a bare family description.
        file: PathBuf,
        #[arg(long)]
        jmax: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Full,
    Pruned,
}

impl From<ModeArg> for OracleMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => OracleMode::Full,
            ModeArg::Pruned => OracleMode::Pruned,
        }
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    match execute(&cli) {
        Ok((text, json)) => {
            let _ = write!(out, "{text}");
            if let Some(path) = &cli.json {
                if let Err(e) = std::fs::write(path, json + "\n") {
                    let _ = writeln!(err, "cli: cannot write {}: {e}", path.display());
                    return 2;
                }
            }
            0
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "cli: {msg}");
            1
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "cli: {msg}");
            2
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "{e}");
            match e {
                Error::Syntax { .. } => 1,
                Error::Verification { .. } => 3,
                _ => 2,
            }
        }
    }
}

type Output = std::result::Result<(String, String), Failure>;

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

struct Input {
    fp: FactoredPolynomial,
    echo: InputEcho,
    validation: ValidationReport,
}

fn prime(cli: &Cli) -> std::result::Result<u64, Failure> {
    cli.p.ok_or_else(|| Failure::Usage("--p is required for this command".into()))
}

fn load(cli: &Cli, expr: &str) -> std::result::Result<Input, Failure> {
    let p = prime(cli)?;
    let ctx = PadicContext::new(p)?;
    let parsed = parse::parse_factored_poly(expr, &ctx)?;
    let fp = parsed.factored;
    let validation = validate_factored(&fp)?;
    let mut warnings: Vec<String> = validation
        .warnings()
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    let declared = parsed.declared_denominator;
    if let Some(d) = &declared {
        let n = crate::fixdiv::witness_classes_with_cap(&fp, cli.depth_cap)?.n;
        if !parse::denominator_matches(d, p, n) {
            warnings.push(format!(
                "declared denominator {}^{} disagrees with the computed p^n = {p}^{n}; using the computed value",
                d.0, d.1
            ));
        }
    }
    let echo = InputEcho {
        text: expr.to_string(),
        p,
        factors: fp.polys().map(ToString::to_string).collect(),
        multiplicities: fp.multiplicities(),
        declared_denominator: declared.map(|(b, e)| format!("{b}^{e}")),
        warnings,
    };
    Ok(Input { fp, echo, validation })
}

fn options(cli: &Cli) -> AnalysisOptions {
    AnalysisOptions {
        depth_cap: cli.depth_cap,
        enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
    }
}

fn check_jmax(jmax: u64, allow_large: bool) -> std::result::Result<(), Failure> {
    if jmax < 2 {
        return Err(Failure::Usage(format!("--jmax must be at least 2, got {jmax}")));
    }
    if jmax > JMAX_GUARD && !allow_large {
        return Err(Failure::Usage(format!(
            "--jmax {jmax} exceeds {JMAX_GUARD}; pass --allow-large to run it anyway"
        )));
    }
    Ok(())
}

/// The pair from the best kernel vector at its least admissible exponents.
fn certificate_for(fp: &FactoredPolynomial, analysis: &Analysis) -> Result<Option<Certificate>> {
    let Some(v) = &analysis.verdict.nonunique_vector else {
        return Ok(None);
    };
    let n = analysis.verdict.n;
    let (k, l) = minimal_admissible(v, &fp.multiplicities(), n);
    let pair = construct_factorization_pair(fp, n, v, k, l)?;
    Ok(Some(Certificate::new(fp, pair)))
}

fn run_oracle(fp: &FactoredPolynomial, jmax: u64, mode: OracleMode, limit: u128) -> Result<OracleReport> {
    let oracle = Oracle::new(fp, jmax, limit)?;
    let result = oracle.min_nonunique_power(jmax, mode)?;
    Ok(OracleReport::new(fp, jmax, mode, result))
}

fn execute(cli: &Cli) -> Output {
    match &cli.command {
        Command::Analyze { expr, jmax } => {
            let input = load(cli, expr)?;
            let analysis = analyze_with(&input.fp, &options(cli))?;
            let certificate = if analysis.verdict.irreducible { certificate_for(&input.fp, &analysis)? } else { None };
            let oracle = match jmax {
                Some(j) => {
                    check_jmax(*j, false)?;
                    if analysis.verdict.irreducible && analysis.verdict.n >= 1 {
                        Some(run_oracle(&input.fp, *j, OracleMode::Pruned, DEFAULT_ORACLE_LIMIT)?)
                    } else {
                        None
                    }
                }
                None => None,
            };
            let mut echo = input.echo;
            if jmax.is_some() && oracle.is_none() {
                echo.warnings.push("oracle skipped: F is reducible or n = 0".into());
            }
            let report = AnalysisReport {
                input: echo,
                validation: input.validation,
                analysis,
                certificate,
                oracle,
            };
            Ok((report.render(), to_json(&report)))
        }
        Command::Kernel { expr } => {
            let input = load(cli, expr)?;
            let analysis = analyze_with(&input.fp, &options(cli))?;
            let short_vectors = match analysis.siegel_bound {
                Some(b) => enumerate_integer_kernel_with_limit(
                    &analysis.reduced,
                    b.saturating_mul(2),
                    DEFAULT_ENUMERATION_LIMIT,
                )?,
                None => Vec::new(),
            };
            let report = KernelReport {
                input: input.echo,
                dimension: analysis.kernel.dimension,
                basis: analysis
                    .kernel
                    .rational_basis
                    .iter()
                    .map(|v| v.iter().map(ToString::to_string).collect())
                    .collect(),
                siegel_bound: analysis.siegel_bound,
                minimal_k: analysis.minimal_k,
                short_vectors,
                witnesses: analysis.witnesses,
                matrix: analysis.matrix,
                reduced: analysis.reduced,
            };
            Ok((report.render(), to_json(&report)))
        }
        Command::Bounds { expr } => {
            let input = load(cli, expr)?;
            let a = analyze_with(&input.fp, &options(cli))?;
            let report = BoundsReport {
                input: input.echo,
                n: a.verdict.n,
                r: a.reduced.r,
                u: a.reduced.u,
                s: a.kernel.dimension,
                siegel_bound: a.siegel_bound,
                minimal_k: a.minimal_k,
                nonunique_bound: a.verdict.nonunique_bound,
                nonunique_vector: a.verdict.nonunique_vector,
                uniqueness: a.verdict.uniqueness,
                bounds_informational: a.verdict.bounds_informational,
            };
            Ok((report.render(), to_json(&report)))
        }
        Command::FactorizePower { expr, vector, k, l } => {
            let input = load(cli, expr)?;
            let v = KernelVector::new(parse::parse_vector(vector)?);
            let a = analyze_with(&input.fp, &options(cli))?;
            let n = a.verdict.n;
            if v.v.len() != input.fp.len() {
                return Err(Failure::Usage(format!(
                    "--vector has {} entries but F has {} factors",
                    v.v.len(),
                    input.fp.len()
                )));
            }
            if !a.reduced.annihilates(&v.v) {
                return Err(Error::Precondition("the vector is not in the fixed divisor kernel".into()).into());
            }
            let (k_min, l_min) = minimal_admissible(&v, &input.fp.multiplicities(), n);
            let (k, l) = (k.unwrap_or(k_min), l.unwrap_or(l_min));
            let pair = construct_factorization_pair(&input.fp, n, &v, k, l)?;
            let report = FactorizationReport {
                input: input.echo,
                n,
                vector: v,
                k,
                l,
                certificate: Certificate::new(&input.fp, pair),
            };
            Ok((report.render(), to_json(&report)))
        }
        Command::Oracle {
            expr,
            jmax,
            mode,
            limit,
            allow_large,
        } => {
            check_jmax(*jmax, *allow_large)?;
            let input = load(cli, expr)?;
            let oracle = Oracle::new(&input.fp, *jmax, limit.unwrap_or(DEFAULT_ORACLE_LIMIT))?;
            let n = oracle.n();
            let mode = OracleMode::from(*mode);
            let result = oracle.min_nonunique_power(*jmax, mode)?;
            let report = OracleCommandReport {
                n,
                oracle: OracleReport::new(&input.fp, *jmax, mode, result),
                input: input.echo,
            };
            Ok((report.render(), to_json(&report)))
        }
        Command::Generate { r, n, jmax } => {
            if let Some(j) = jmax {
                check_jmax(*j, false)?;
            }
            let report = generate_and_verify(*r, *n, *jmax)?;
            Ok((report::render_realization(&report), to_json(&report)))
        }
        Command::VerifyGenerated { file, jmax } => {
            if let Some(j) = jmax {
                check_jmax(*j, false)?;
            }
            let report = reverify(file, *jmax)?;
            Ok((report::render_realization(&report), to_json(&report)))
        }
    }
}

/// Accepts a full report or a bare family description. A report's recorded
/// analysis and oracle outcome must match the recomputation exactly.
fn reverify(path: &Path, jmax: Option<u64>) -> std::result::Result<RealizationReport, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    if let Ok(recorded) = serde_json::from_str::<RealizationReport>(&text) {
        let jmax = jmax.or(recorded.oracle.as_ref().map(|o| o.j_max));
        let fresh = verify_family(recorded.spec.clone(), jmax)?;
        if fresh.analysis != recorded.analysis {
            return Err(Error::verification("realization", "recorded analysis differs from the recomputation").into());
        }
        if recorded.oracle.is_some() && fresh.oracle != recorded.oracle {
            return Err(Error::verification("realization", "recorded oracle outcome differs from the recomputation").into());
        }
        return Ok(fresh);
    }
    let spec: RealizationSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{} is neither a family report nor a family: {e}", path.display())))?;
    Ok(verify_family(spec, jmax)?)
}
