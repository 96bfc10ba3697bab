//! Text grammar for coefficients and phase polynomials, and the canonical printer.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' integer)?
//! atom  := number | identifier | '(' expr ')'
//! ```
//!
//! Numbers are integers or decimals (read exactly). Identifiers may carry
//! trailing primes (`a'`). The printer emits the same grammar.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::mpoly::{MPoly, Monomial};
use super::phase::PhasePoly;
use super::symbols::{SymbolTable, PHASE_SYMBOLS};
use super::{FieldElem, FieldError, Rat};

/// Result of [`parse`]: a coefficient when no phase variable occurs.
#[derive(Clone, Debug, PartialEq)]
pub enum Parsed {
    Field(FieldElem),
    Phase(PhasePoly),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn lex(text: &str) -> Result<Lexer, FieldError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            let mut int_part = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                int_part.push(chars[i]);
                i += 1;
            }
            let mut frac = String::new();
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    frac.push(chars[i]);
                    i += 1;
                }
            }
            let digits = format!("{int_part}{frac}");
            let n: BigInt = if digits.is_empty() {
                BigInt::zero()
            } else {
                digits.parse().map_err(|_| FieldError::Syntax {
                    offset: start,
                    message: "bad number".into(),
                })?
            };
            let d = num_traits::pow(BigInt::from(10), frac.len());
            toks.push((Tok::Num(Rat::new(n, d)), start));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            let mut name = String::new();
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                name.push(chars[i]);
                i += 1;
            }
            while i < chars.len() && chars[i] == '\'' {
                name.push('\'');
                i += 1;
            }
            toks.push((Tok::Ident(name), start));
        } else if "+-*/^()".contains(c) {
            toks.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(FieldError::Syntax {
                offset: i,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    toks.push((Tok::End, chars.len()));
    Ok(Lexer { toks })
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    table: &'a Arc<SymbolTable>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: &str) -> Result<T, FieldError> {
        Err(FieldError::Syntax {
            offset: self.offset(),
            message: message.to_string(),
        })
    }

    fn expr(&mut self) -> Result<FieldElem, FieldError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<FieldElem, FieldError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Op('/') => {
                    let offset = self.offset();
                    self.bump();
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(FieldError::ParseDivisionByZero { offset });
                    }
                    acc = acc
                        .checked_div(&d)
                        .map_err(|_| FieldError::ParseDivisionByZero { offset })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<FieldElem, FieldError> {
        if self.peek() == &Tok::Op('-') {
            self.bump();
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<FieldElem, FieldError> {
        let base = self.atom()?;
        if self.peek() == &Tok::Op('^') {
            self.bump();
            let e = match self.peek() {
                Tok::Num(n) if n.is_integer() && !n.is_negative() => n.to_integer(),
                _ => return self.error("expected a nonnegative integer exponent"),
            };
            let e: u32 = match e.try_into() {
                Ok(e) if e <= 1000 => e,
                _ => return self.error("exponent too large"),
            };
            self.bump();
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<FieldElem, FieldError> {
        let offset = self.offset();
        match self.bump() {
            Tok::Num(n) => Ok(FieldElem::from_rat(self.table, n)),
            Tok::Ident(name) => match self.table.lookup(&name) {
                Some(i) => Ok(FieldElem::symbol_index(self.table, i)),
                None => Err(FieldError::UnknownSymbol(name)),
            },
            Tok::Op('(') => {
                let v = self.expr()?;
                if self.peek() != &Tok::Op(')') {
                    return self.error("expected ')'");
                }
                self.bump();
                Ok(v)
            }
            Tok::End => Err(FieldError::Syntax {
                offset,
                message: "unexpected end of input".into(),
            }),
            Tok::Op(c) => Err(FieldError::Syntax {
                offset,
                message: format!("unexpected '{c}'"),
            }),
        }
    }
}

/// Parses an element of the coefficient field; every identifier, including
/// the reserved coordinates, is read as a symbol of `table`.
pub fn parse_field(text: &str, table: &Arc<SymbolTable>) -> Result<FieldElem, FieldError> {
    let lexer = lex(text)?;
    let mut p = Parser {
        toks: lexer.toks,
        pos: 0,
        table,
    };
    let v = p.expr()?;
    if p.peek() != &Tok::End {
        return p.error("unexpected trailing input");
    }
    Ok(v)
}

/// Parses a phase polynomial in `x`, `y`, `u1`, `u2`; division is only
/// accepted when the quotient is again a polynomial in the phase variables.
pub fn parse_phase(text: &str, table: &Arc<SymbolTable>) -> Result<PhasePoly, FieldError> {
    let v = parse_field(text, table)?;
    PhasePoly::from_field(&v)
}

/// Parses `text`, returning a [`PhasePoly`] when a phase variable occurs.
pub fn parse(text: &str, table: &Arc<SymbolTable>) -> Result<Parsed, FieldError> {
    let v = parse_field(text, table)?;
    if PHASE_SYMBOLS.iter().any(|&s| v.contains_symbol(s)) {
        Ok(Parsed::Phase(PhasePoly::from_field(&v)?))
    } else {
        Ok(Parsed::Field(v))
    }
}

pub(crate) fn format_rat(c: &Rat) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub(crate) fn format_monomial(m: &Monomial, name: &dyn Fn(usize) -> String) -> String {
    m.vars()
        .map(|(i, e)| {
            if e == 1 {
                name(i)
            } else {
                format!("{}^{}", name(i), e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn format_terms<'a>(
    terms: impl Iterator<Item = (&'a Monomial, &'a Rat)>,
    name: &dyn Fn(usize) -> String,
) -> String {
    let mut out = String::new();
    for (k, (m, c)) in terms.enumerate() {
        let neg = c.is_negative();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        if m.is_one() {
            out.push_str(&format_rat(&a));
        } else if a.is_one() {
            out.push_str(&format_monomial(m, name));
        } else {
            out.push_str(&format_rat(&a));
            out.push('*');
            out.push_str(&format_monomial(m, name));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub(crate) fn format_poly(p: &MPoly, table: &SymbolTable) -> String {
    format_terms(p.terms().rev(), &|i| table.name(i).to_string())
}

pub(crate) fn format_fraction(num: &MPoly, den: &MPoly, table: &SymbolTable) -> String {
    let n = format_poly(num, table);
    if den.is_one() {
        return n;
    }
    let d = format_poly(den, table);
    let simple_num = num.is_monomial() && num.leading_coeff().is_integer();
    let simple_den = den.is_monomial() && den.leading().unwrap().0.vars().count() == 1;
    let n = if simple_num { n } else { format!("({n})") };
    let d = if simple_den { d } else { format!("({d})") };
    format!("{n}/{d}")
}

/// Formats a sum of `coefficient * phase-monomial` terms.
pub(crate) fn format_phase_terms<'a>(
    terms: impl Iterator<Item = (String, &'a FieldElem)>,
) -> String {
    let mut out = String::new();
    for (k, (mono, c)) in terms.enumerate() {
        let neg = c.numer().leading_coeff().is_negative();
        let body = if neg { -c } else { c.clone() };
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let bs = body.to_string();
        if mono.is_empty() {
            let sum = body.is_polynomial() && body.numer().num_terms() > 1;
            out.push_str(&if sum && neg { format!("({bs})") } else { bs });
        } else if body.is_one() {
            out.push_str(&mono);
        } else {
            let sum = body.is_polynomial() && body.numer().num_terms() > 1;
            if sum {
                out.push_str(&format!("({bs})*{mono}"));
            } else {
                out.push_str(&format!("{bs}*{mono}"));
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_phase_polynomial() {
        let tb = SymbolTable::plain();
        let p = match parse("2*x*y + 1/2", &tb).unwrap() {
            Parsed::Phase(p) => p,
            other => panic!("expected phase polynomial, got {other:?}"),
        };
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.to_string(), "2*x*y + 1/2");
    }

    #[test]
    fn reports_offset_of_syntax_error() {
        let tb = SymbolTable::plain();
        match parse("2*x*(y", &tb) {
            Err(FieldError::Syntax { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_symbol_and_zero_division() {
        let tb = SymbolTable::plain();
        assert_eq!(
            parse("alpha + 1", &tb),
            Err(FieldError::UnknownSymbol("alpha".into()))
        );
        assert_eq!(
            parse("x/(t - t)", &tb),
            Err(FieldError::ParseDivisionByZero { offset: 1 })
        );
    }

    #[test]
    fn inexact_phase_division_is_rejected() {
        let tb = SymbolTable::plain();
        assert!(parse_phase("(x^2 - 1)/(x - 1)", &tb).is_ok());
        assert_eq!(parse_phase("y/x", &tb), Err(FieldError::InexactDivision));
    }

    #[test]
    fn decimals_are_exact() {
        let tb = SymbolTable::plain();
        assert_eq!(
            parse_field("0.25", &tb).unwrap(),
            FieldElem::from_ratio(&tb, 1, 4)
        );
    }

    #[test]
    fn printer_output_reparses() {
        let tb = SymbolTable::builder().transcendental("alpha").build().unwrap();
        for text in [
            "(t^2 + 1)/t*x - alpha*y^2",
            "-(t + alpha)*x*y + 3/2",
            "x/(t*(t - 1)) - 1/t",
            "-(t^2 + 1)/(3*t)",
        ] {
            let v = parse(text, &tb).unwrap();
            let printed = match &v {
                Parsed::Phase(p) => p.to_string(),
                Parsed::Field(f) => f.to_string(),
            };
            assert_eq!(parse(&printed, &tb).unwrap(), v, "{text} -> {printed}");
        }
    }
}
