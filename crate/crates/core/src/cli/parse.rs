//! Grammar for factored input:
//!
//! ```text
//! input   := factor ('*' factor)* ['/' integer ['^' integer]]
//! factor  := '(' poly ')' ['^' integer]
//! poly    := ['+' | '-'] term (('+' | '-') term)*
//! term    := coeff ['*'] 'x' ['^' integer] | coeff | 'x' ['^' integer]
//! coeff   := integer ['/' integer]
//! ```

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::exact::{ExactRational, PadicContext};
use crate::poly::{FactoredPolynomial, Polynomial};

/// A parsed factored polynomial and the denominator written after it, if any.
#[derive(Clone, Debug)]
pub struct ParsedInput {
    pub factored: FactoredPolynomial,
    /// `(base, exponent)` of a trailing `/ base^exponent`.
    pub declared_denominator: Option<(BigInt, u64)>,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ASCII digits");
        Ok(digits.parse().expect("nonempty digit string"))
    }

    fn small(&mut self, what: &str) -> Result<u32> {
        let start = self.pos;
        let value = self.integer()?;
        value.to_u32().ok_or_else(|| Error::Syntax {
            position: start,
            message: format!("{what} {value} is too large"),
        })
    }

    fn term(&mut self) -> Result<(ExactRational, u32)> {
        let mut coeff = ExactRational::one();
        let mut explicit = false;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let num = self.integer()?;
            coeff = if self.peek() == Some(b'/') && self.src.get(self.pos + 1).is_some_and(|c| c.is_ascii_digit() || c.is_ascii_whitespace()) {
                self.pos += 1;
                let at = self.pos;
                let den = self.integer()?;
                ExactRational::new(num, den).map_err(|_| Error::Syntax {
                    position: at,
                    message: "zero denominator".into(),
                })?
            } else {
                ExactRational::from(num)
            };
            explicit = true;
            if self.eat(b'*') && self.peek() != Some(b'x') {
                return Err(self.error("expected `x` after `*`"));
            }
        }
        if self.eat(b'x') {
            let degree = if self.eat(b'^') { self.small("degree")? } else { 1 };
            return Ok((coeff, degree));
        }
        if !explicit {
            return Err(self.error("expected a coefficient or `x`"));
        }
        Ok((coeff, 0))
    }

    fn poly(&mut self) -> Result<Polynomial> {
        let mut coeffs: Vec<ExactRational> = Vec::new();
        let mut first = true;
        loop {
            let negative = match self.peek() {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ if first => false,
                _ => break,
            };
            first = false;
            let (c, d) = self.term()?;
            let c = if negative { -c } else { c };
            let d = d as usize;
            if coeffs.len() <= d {
                coeffs.resize(d + 1, ExactRational::zero());
            }
            coeffs[d] = &coeffs[d] + &c;
        }
        Ok(Polynomial::new(coeffs))
    }

    fn factor(&mut self) -> Result<(Polynomial, u32)> {
        let open = self.pos;
        self.expect(b'(')?;
        let g = self.poly()?;
        self.expect(b')')?;
        if g.is_zero() {
            return Err(Error::Syntax {
                position: open,
                message: "zero factor".into(),
            });
        }
        let m = if self.eat(b'^') {
            let at = self.pos;
            let m = self.small("multiplicity")?;
            if m == 0 {
                return Err(Error::Syntax {
                    position: at,
                    message: "multiplicity must be positive".into(),
                });
            }
            m
        } else {
            1
        };
        Ok((g, m))
    }

    fn end(&mut self) -> Result<()> {
        if self.peek().is_some() {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(())
    }
}

/// Factors with multiplicities, and the trailing `/ base^exponent` if any.
pub type RawFactors = (Vec<(Polynomial, u32)>, Option<(BigInt, u64)>);

/// Parses without validating the factored form.
pub fn parse_factors(text: &str) -> Result<RawFactors> {
    let mut p = Parser::new(text);
    let mut factors = vec![p.factor()?];
    while p.eat(b'*') {
        factors.push(p.factor()?);
    }
    let mut denominator = None;
    if p.eat(b'/') {
        let base = p.integer()?;
        let exp = if p.eat(b'^') { p.small("exponent")? as u64 } else { 1 };
        denominator = Some((base, exp));
    }
    p.end()?;
    Ok((factors, denominator))
}

pub fn parse_factored_poly(text: &str, ctx: &PadicContext) -> Result<ParsedInput> {
    let (factors, declared_denominator) = parse_factors(text)?;
    let factored = FactoredPolynomial::new(ctx.clone(), factors)?;
    Ok(ParsedInput {
        factored,
        declared_denominator,
    })
}

/// A single polynomial in `x`, without parentheses.
pub fn parse_polynomial(text: &str) -> Result<Polynomial> {
    let mut p = Parser::new(text);
    let g = p.poly()?;
    p.end()?;
    Ok(g)
}

/// A comma-separated integer vector such as `0,1,-1`.
pub fn parse_vector(text: &str) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in text.split(',') {
        let trimmed = part.trim();
        out.push(trimmed.parse().map_err(|_| Error::Syntax {
            position: offset,
            message: format!("`{trimmed}` is not an integer"),
        })?);
        offset += part.len() + 1;
    }
    Ok(out)
}

/// Whether the written denominator agrees with the computed `p^n`.
pub fn denominator_matches(declared: &(BigInt, u64), p: u64, n: u64) -> bool {
    let (base, exp) = declared;
    if *exp == 0 || base.is_one() {
        return n == 0;
    }
    *base == BigInt::from(p) && *exp == n
}
