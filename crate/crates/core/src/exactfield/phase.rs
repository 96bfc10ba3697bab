//! Polynomials in the phase variables x, y (and lift variables u1, u2) with
//! coefficients in K.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::mpoly::{MPoly, Monomial};
use super::symbols::{SymbolTable, PHASE_SYMBOLS};
use super::{FieldElem, FieldError, Rat};

/// Phase variable positions in a [`PhaseMono`].
pub const PX: usize = 0;
pub const PY: usize = 1;
pub const PU1: usize = 2;
pub const PU2: usize = 3;

const PHASE_NAMES: [&str; 4] = ["x", "y", "u1", "u2"];

/// Exponents of (x, y, u1, u2); graded lexicographic with x highest.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Debug)]
pub struct PhaseMono(pub [u16; 4]);

impl PhaseMono {
    pub const ONE: PhaseMono = PhaseMono([0; 4]);

    pub fn x(e: u16) -> Self {
        PhaseMono([e, 0, 0, 0])
    }

    pub fn xy(ex: u16, ey: u16) -> Self {
        PhaseMono([ex, ey, 0, 0])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; 4]
    }

    pub fn mul(&self, other: &PhaseMono) -> PhaseMono {
        let mut r = self.0;
        for (a, b) in r.iter_mut().zip(other.0) {
            *a += b;
        }
        PhaseMono(r)
    }

    pub fn div(&self, other: &PhaseMono) -> Option<PhaseMono> {
        let mut r = self.0;
        for (a, b) in r.iter_mut().zip(other.0) {
            *a = a.checked_sub(b)?;
        }
        Some(PhaseMono(r))
    }

    fn format(&self) -> String {
        let mut parts = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(PHASE_NAMES[i].to_string()),
                _ => parts.push(format!("{}^{}", PHASE_NAMES[i], e)),
            }
        }
        parts.join("*")
    }
}

impl Ord for PhaseMono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for PhaseMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in x, y, u1, u2 over the coefficient field.
#[derive(Clone)]
pub struct PhasePoly {
    table: Arc<SymbolTable>,
    terms: BTreeMap<PhaseMono, FieldElem>,
}

impl PartialEq for PhasePoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl fmt::Debug for PhasePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhasePoly({})", self)
    }
}

impl fmt::Display for PhasePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = super::parse::format_phase_terms(
            self.terms.iter().rev().map(|(m, c)| (m.format(), c)),
        );
        f.write_str(&s)
    }
}

impl PhasePoly {
    pub fn zero(table: &Arc<SymbolTable>) -> Self {
        PhasePoly {
            table: table.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: FieldElem) -> Self {
        PhasePoly::term(PhaseMono::ONE, c)
    }

    pub fn term(m: PhaseMono, c: FieldElem) -> Self {
        let mut p = PhasePoly::zero(c.table());
        p.add_term(m, c);
        p
    }

    pub fn var(table: &Arc<SymbolTable>, which: usize) -> Self {
        let mut e = [0; 4];
        e[which] = 1;
        PhasePoly::term(PhaseMono(e), FieldElem::one(table))
    }

    pub fn x(table: &Arc<SymbolTable>) -> Self {
        PhasePoly::var(table, PX)
    }

    pub fn y(table: &Arc<SymbolTable>) -> Self {
        PhasePoly::var(table, PY)
    }

    pub fn add_term(&mut self, m: PhaseMono, c: FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&PhaseMono, &FieldElem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &PhaseMono) -> FieldElem {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| FieldElem::zero(&self.table))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no phase variable occurs (zero included).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn as_constant(&self) -> Option<FieldElem> {
        if self.is_constant() {
            Some(self.coeff(&PhaseMono::ONE))
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&PhaseMono, &FieldElem)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, which: usize) -> u16 {
        self.terms.keys().map(|m| m.0[which]).max().unwrap_or(0)
    }

    pub fn uses_lift_variables(&self) -> bool {
        self.degree_in(PU1) > 0 || self.degree_in(PU2) > 0
    }

    pub fn scale(&self, c: &FieldElem) -> PhasePoly {
        let mut r = PhasePoly::zero(&self.table);
        for (m, k) in &self.terms {
            r.add_term(*m, k * c);
        }
        r
    }

    pub fn scale_rat(&self, c: &Rat) -> PhasePoly {
        let mut r = PhasePoly::zero(&self.table);
        for (m, k) in &self.terms {
            r.add_term(*m, k.scale(c));
        }
        r
    }

    pub fn mul_term(&self, m: &PhaseMono, c: &FieldElem) -> PhasePoly {
        let mut r = PhasePoly::zero(&self.table);
        for (k, v) in &self.terms {
            r.add_term(k.mul(m), v * c);
        }
        r
    }

    /// ∂/∂ of one phase variable.
    pub fn partial(&self, which: usize) -> PhasePoly {
        let mut r = PhasePoly::zero(&self.table);
        for (m, c) in &self.terms {
            let e = m.0[which];
            if e > 0 {
                let mut n = *m;
                n.0[which] -= 1;
                r.add_term(n, c.scale(&Rat::from_integer(e.into())));
            }
        }
        r
    }

    /// `P^∂`: the coefficient derivation applied to every coefficient.
    pub fn coeff_derive(&self) -> PhasePoly {
        let mut r = PhasePoly::zero(&self.table);
        for (m, c) in &self.terms {
            r.add_term(*m, c.derive());
        }
        r
    }

    pub fn map_coeffs(&self, f: impl Fn(&FieldElem) -> FieldElem) -> PhasePoly {
        let mut r = PhasePoly::zero(&self.table);
        for (m, c) in &self.terms {
            r.add_term(*m, f(c));
        }
        r
    }

    /// Exact quotient `self / d`, or [`FieldError::InexactDivision`].
    pub fn exact_divide(&self, d: &PhasePoly) -> Result<PhasePoly, FieldError> {
        let (dm, dc) = d.leading().ok_or(FieldError::DivisionByZero)?;
        let dc_inv = dc.inv()?;
        let mut q = PhasePoly::zero(&self.table);
        let mut r = self.clone();
        while let Some((rm, rc)) = r.leading() {
            let qm = rm.div(dm).ok_or(FieldError::InexactDivision)?;
            let qc = rc * &dc_inv;
            r = &r - &d.mul_term(&qm, &qc);
            q.add_term(qm, qc);
        }
        Ok(q)
    }

    /// The same polynomial as a single element of the coefficient table,
    /// with phase variables read as the reserved coordinate symbols.
    pub fn to_field(&self) -> FieldElem {
        let mut acc = FieldElem::zero(&self.table);
        for (m, c) in &self.terms {
            let mut mono = Monomial::one();
            for (k, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    mono = mono.mul(&Monomial::var(PHASE_SYMBOLS[k], e));
                }
            }
            let factor = FieldElem::from_poly(&self.table, MPoly::term(mono, Rat::from_integer(1.into())));
            acc = &acc + &(c * &factor);
        }
        acc
    }

    /// Splits a field element into phase monomials; fails when a phase
    /// variable occurs in the denominator.
    pub fn from_field(v: &FieldElem) -> Result<PhasePoly, FieldError> {
        let table = v.table();
        if PHASE_SYMBOLS.iter().any(|&s| v.denom().contains_var(s)) {
            return Err(FieldError::InexactDivision);
        }
        let mut parts: BTreeMap<PhaseMono, MPoly> = BTreeMap::new();
        for (m, c) in v.numer().terms() {
            let mut pm = [0u16; 4];
            let mut rest = m.clone();
            for (k, &s) in PHASE_SYMBOLS.iter().enumerate() {
                pm[k] = m.exp(s);
                rest = rest.with_exp(s, 0);
            }
            parts
                .entry(PhaseMono(pm))
                .or_default()
                .add_term(rest, c.clone());
        }
        let mut p = PhasePoly::zero(table);
        for (m, n) in parts {
            p.add_term(m, FieldElem::from_parts(table, n, v.denom().clone())?);
        }
        Ok(p)
    }

    pub fn embed(&self, target: &Arc<SymbolTable>) -> Result<PhasePoly, FieldError> {
        let mut p = PhasePoly::zero(target);
        for (m, c) in &self.terms {
            p.add_term(*m, c.embed(target)?);
        }
        Ok(p)
    }
}

impl<'a> Add<&'a PhasePoly> for &'a PhasePoly {
    type Output = PhasePoly;
    fn add(self, rhs: &'a PhasePoly) -> PhasePoly {
        let mut r = self.clone();
        for (m, c) in &rhs.terms {
            r.add_term(*m, c.clone());
        }
        r
    }
}

impl<'a> Sub<&'a PhasePoly> for &'a PhasePoly {
    type Output = PhasePoly;
    fn sub(self, rhs: &'a PhasePoly) -> PhasePoly {
        let mut r = self.clone();
        for (m, c) in &rhs.terms {
            r.add_term(*m, -c);
        }
        r
    }
}

impl<'a> Mul<&'a PhasePoly> for &'a PhasePoly {
    type Output = PhasePoly;
    fn mul(self, rhs: &'a PhasePoly) -> PhasePoly {
        let mut r = PhasePoly::zero(&self.table);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }
}

impl Neg for &PhasePoly {
    type Output = PhasePoly;
    fn neg(self) -> PhasePoly {
        self.map_coeffs(|c| -c)
    }
}

impl Add for PhasePoly {
    type Output = PhasePoly;
    fn add(self, rhs: PhasePoly) -> PhasePoly {
        &self + &rhs
    }
}

impl Sub for PhasePoly {
    type Output = PhasePoly;
    fn sub(self, rhs: PhasePoly) -> PhasePoly {
        &self - &rhs
    }
}

impl Mul for PhasePoly {
    type Output = PhasePoly;
    fn mul(self, rhs: PhasePoly) -> PhasePoly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::parse::parse_phase;

    #[test]
    fn product_of_linear_factors() {
        let tb = SymbolTable::plain();
        let a = parse_phase("x - 1", &tb).unwrap();
        let b = parse_phase("x + 1", &tb).unwrap();
        assert_eq!(&a * &b, parse_phase("x^2 - 1", &tb).unwrap());
    }

    #[test]
    fn exact_divide_cases() {
        let tb = SymbolTable::plain();
        let x = PhasePoly::x(&tb);
        let p = parse_phase("2*x^2*y", &tb).unwrap();
        assert_eq!(p.exact_divide(&x).unwrap(), parse_phase("2*x*y", &tb).unwrap());
        let q = parse_phase("2*x*y + 1/2", &tb).unwrap();
        assert_eq!(q.exact_divide(&x), Err(FieldError::InexactDivision));
        assert!(PhasePoly::zero(&tb).exact_divide(&x).unwrap().is_zero());
        assert_eq!(x.exact_divide(&PhasePoly::zero(&tb)), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn exact_divide_with_field_coefficients() {
        let tb = SymbolTable::builder().transcendental("alpha").build().unwrap();
        let d = parse_phase("t*x - alpha", &tb).unwrap();
        let q = parse_phase("y/t + alpha*x", &tb).unwrap();
        assert_eq!((&d * &q).exact_divide(&d).unwrap(), q);
    }
}
