//! Exact arithmetic for integer-valued polynomials over `Z_(p)`: fixed
//! divisors, fixed divisor kernels, absolute irreducibility, explicit
//! factorizations of powers and extremal example families.
//!
//! ```
//! use ivp_core::{classify, cli::parse::parse_factored_poly, exact::PadicContext};
//!
//! let ctx = PadicContext::new(3).unwrap();
//! let f = parse_factored_poly("(x^2+9)*(x-5)^3*(x-1)*(x-7)", &ctx).unwrap().factored;
//! let analysis = classify::analyze(&f).unwrap();
//! assert_eq!(analysis.verdict.n, 2);
//! assert_eq!(analysis.verdict.absolutely_irreducible, Some(false));
//! ```

pub mod classify;
pub mod cli;
pub mod error;
pub mod exact;
pub mod fdkernel;
pub mod fixdiv;
mod json;
pub mod poly;
pub mod powerfac;
pub mod realization;

pub use error::{Error, Result};
