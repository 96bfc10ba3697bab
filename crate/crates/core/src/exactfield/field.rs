//! Elements of K = ℚ(t, parameters)[radicals] in canonical form.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use super::mpoly::{gcd, MPoly, Monomial};
use super::symbols::{SymbolKind, SymbolTable, SYM_T};
use super::{FieldError, Rat};

/// A rational function `num/den` over ℚ in the symbols of a table.
///
/// Canonical form: `den` is nonzero, monic (grlex) and free of radical
/// symbols; every radical occurs in `num` with exponent at most one; and
/// `gcd(num, den) = 1`. Two elements over the same table are equal iff their
/// canonical forms are identical.
#[derive(Clone)]
pub struct FieldElem {
    table: Arc<SymbolTable>,
    num: MPoly,
    den: MPoly,
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num
            && self.den == other.den
            && (Arc::ptr_eq(&self.table, &other.table) || self.table == other.table)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElem({})", self)
    }
}

fn same_table(a: &Arc<SymbolTable>, b: &Arc<SymbolTable>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl FieldElem {
    pub fn zero(table: &Arc<SymbolTable>) -> Self {
        FieldElem {
            table: table.clone(),
            num: MPoly::zero(),
            den: MPoly::one(),
        }
    }

    pub fn one(table: &Arc<SymbolTable>) -> Self {
        FieldElem::from_rat(table, Rat::one())
    }

    pub fn from_rat(table: &Arc<SymbolTable>, c: Rat) -> Self {
        FieldElem {
            table: table.clone(),
            num: MPoly::constant(c),
            den: MPoly::one(),
        }
    }

    pub fn from_int(table: &Arc<SymbolTable>, n: i64) -> Self {
        FieldElem::from_rat(table, Rat::from_integer(n.into()))
    }

    pub fn from_ratio(table: &Arc<SymbolTable>, n: i64, d: i64) -> Self {
        FieldElem::from_rat(table, Rat::new(n.into(), d.into()))
    }

    pub fn symbol_index(table: &Arc<SymbolTable>, index: usize) -> Self {
        FieldElem {
            table: table.clone(),
            num: MPoly::var(index),
            den: MPoly::one(),
        }
    }

    pub fn symbol(table: &Arc<SymbolTable>, name: &str) -> Result<Self, FieldError> {
        let i = table
            .lookup(name)
            .ok_or_else(|| FieldError::UnknownSymbol(name.to_string()))?;
        Ok(FieldElem::symbol_index(table, i))
    }

    pub fn t(table: &Arc<SymbolTable>) -> Self {
        FieldElem::symbol_index(table, SYM_T)
    }

    /// Builds `num/den` and brings it to canonical form.
    pub fn from_parts(
        table: &Arc<SymbolTable>,
        num: MPoly,
        den: MPoly,
    ) -> Result<Self, FieldError> {
        normalize(table, num, den)
    }

    pub fn from_poly(table: &Arc<SymbolTable>, num: MPoly) -> Self {
        normalize(table, num, MPoly::one()).expect("nonzero denominator")
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    pub fn numer(&self) -> &MPoly {
        &self.num
    }

    pub fn denom(&self) -> &MPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The value when this is a rational constant.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn contains_symbol(&self, index: usize) -> bool {
        self.num.contains_var(index) || self.den.contains_var(index)
    }

    /// Symbol indices occurring in the canonical form.
    pub fn symbols(&self) -> Vec<usize> {
        let mut v = self.num.vars();
        for s in self.den.vars() {
            if !v.contains(&s) {
                v.push(s);
            }
        }
        v.sort_unstable();
        v
    }

    fn check(&self, other: &FieldElem) {
        assert!(
            same_table(&self.table, &other.table),
            "field elements over different symbol tables"
        );
    }

    pub fn try_add(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        if !same_table(&self.table, &other.table) {
            return Err(FieldError::TableMismatch);
        }
        Ok(self.add_impl(other, false))
    }

    fn add_impl(&self, other: &FieldElem, negate: bool) -> FieldElem {
        let on = if negate { other.num.neg() } else { other.num.clone() };
        if self.den == other.den {
            let num = self.num.add(&on);
            if self.den.is_one() {
                return FieldElem {
                    table: self.table.clone(),
                    num,
                    den: MPoly::one(),
                };
            }
            return cancel(&self.table, num, self.den.clone());
        }
        let g = gcd(&self.den, &other.den);
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = other.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&d1).add(&on.mul(&b1));
        let den = self.den.mul(&d1);
        cancel(&self.table, num, den)
    }

    pub fn try_mul(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        if !same_table(&self.table, &other.table) {
            return Err(FieldError::TableMismatch);
        }
        Ok(self.mul_impl(other))
    }

    fn mul_impl(&self, other: &FieldElem) -> FieldElem {
        if self.is_zero() || other.is_zero() {
            return FieldElem::zero(&self.table);
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let a = self.num.div_exact(&g1).expect("gcd divides");
        let d = other.den.div_exact(&g1).expect("gcd divides");
        let c = other.num.div_exact(&g2).expect("gcd divides");
        let b = self.den.div_exact(&g2).expect("gcd divides");
        let num = a.mul(&c);
        let den = b.mul(&d);
        if self.table.has_radicals() {
            normalize(&self.table, num, den).expect("product of units is a unit")
        } else {
            let lc = den.leading_coeff();
            if lc.is_one() {
                FieldElem {
                    table: self.table.clone(),
                    num,
                    den,
                }
            } else {
                let inv = lc.recip();
                FieldElem {
                    table: self.table.clone(),
                    num: num.scale(&inv),
                    den: den.scale(&inv),
                }
            }
        }
    }

    pub fn inv(&self) -> Result<FieldElem, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        normalize(&self.table, self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        if !same_table(&self.table, &other.table) {
            return Err(FieldError::TableMismatch);
        }
        Ok(self.mul_impl(&other.inv()?))
    }

    pub fn pow(&self, e: u32) -> FieldElem {
        let mut result = FieldElem::one(&self.table);
        for _ in 0..e {
            result = result.mul_impl(self);
        }
        result
    }

    pub fn scale(&self, c: &Rat) -> FieldElem {
        if c.is_zero() {
            return FieldElem::zero(&self.table);
        }
        FieldElem {
            table: self.table.clone(),
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// The coefficient derivation ∂: ∂t = 1, transcendentals and coordinates
    /// constant, radicals by ∂s = s·∂r/(2r), varying symbols as declared.
    pub fn derive(&self) -> FieldElem {
        let dn = poly_derive(&self.table, &self.num);
        if self.den.is_one() {
            return dn;
        }
        let dd = poly_derive(&self.table, &self.den);
        let n = self.poly_elem(&self.num);
        let d = self.poly_elem(&self.den);
        let top = &(&dn * &d) - &(&n * &dd);
        top.checked_div(&(&d * &d)).expect("nonzero denominator")
    }

    /// Partial derivative with respect to a symbol, with radicals
    /// differentiated through their defining relations.
    pub fn partial(&self, var: usize) -> FieldElem {
        let dn = poly_partial(&self.table, &self.num, var);
        if self.den.is_one() {
            return dn;
        }
        let dd = poly_partial(&self.table, &self.den, var);
        let n = self.poly_elem(&self.num);
        let d = self.poly_elem(&self.den);
        let top = &(&dn * &d) - &(&n * &dd);
        top.checked_div(&(&d * &d)).expect("nonzero denominator")
    }

    fn poly_elem(&self, p: &MPoly) -> FieldElem {
        FieldElem {
            table: self.table.clone(),
            num: p.clone(),
            den: MPoly::one(),
        }
    }

    /// Simultaneous substitution of symbols by field elements.
    pub fn substitute(&self, subs: &[(usize, FieldElem)]) -> Result<FieldElem, FieldError> {
        for (_, v) in subs {
            if !same_table(&self.table, &v.table) {
                return Err(FieldError::TableMismatch);
            }
        }
        let (n1, d1) = substitute_poly(&self.num, subs);
        let (n2, d2) = substitute_poly(&self.den, subs);
        // (n1/d1) / (n2/d2)
        if n2.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        normalize(&self.table, n1.mul(&d2), d1.mul(&n2))
    }

    /// Re-expresses this element over another table, matching symbols by name.
    pub fn embed(&self, target: &Arc<SymbolTable>) -> Result<FieldElem, FieldError> {
        if same_table(&self.table, target) {
            return Ok(self.clone());
        }
        if target.extends(&self.table) {
            return Ok(FieldElem {
                table: target.clone(),
                num: self.num.clone(),
                den: self.den.clone(),
            });
        }
        let mut map = HashMap::new();
        for i in self.symbols() {
            let name = self.table.name(i);
            let j = target
                .lookup(name)
                .ok_or_else(|| FieldError::UnknownSymbol(name.to_string()))?;
            if self.table.kind(i) != target.kind(j)
                && !matches!(self.table.kind(i), SymbolKind::Radical { .. })
            {
                return Err(FieldError::TableMismatch);
            }
            map.insert(i, j);
        }
        let remap = |p: &MPoly| {
            MPoly::from_terms(p.terms().map(|(m, c)| {
                let mut e = vec![0u16; target.len()];
                for (i, k) in m.vars() {
                    e[map[&i]] = k;
                }
                (Monomial::from_exponents(e), c.clone())
            }))
        };
        normalize(target, remap(&self.num), remap(&self.den))
    }

    /// Numeric value with the given symbol values; radicals may be supplied
    /// directly like any other symbol.
    pub fn eval(&self, values: &dyn Fn(usize) -> Option<Complex64>) -> Option<Complex64> {
        let n = eval_poly(&self.num, values)?;
        let d = eval_poly(&self.den, values)?;
        Some(n / d)
    }
}

pub(crate) fn eval_poly(p: &MPoly, values: &dyn Fn(usize) -> Option<Complex64>) -> Option<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, c) in p.terms() {
        let mut term = Complex64::new(c.to_f64()?, 0.0);
        for (i, e) in m.vars() {
            term *= values(i)?.powu(e as u32);
        }
        acc += term;
    }
    Some(acc)
}

/// Substitutes into a polynomial, returning `(numerator, denominator)`.
fn substitute_poly(p: &MPoly, subs: &[(usize, FieldElem)]) -> (MPoly, MPoly) {
    let max_exp: Vec<u16> = subs.iter().map(|(i, _)| p.degree_in(*i)).collect();
    let mut den = MPoly::one();
    for ((_, v), &e) in subs.iter().zip(&max_exp) {
        den = den.mul(&v.den.pow(e as u32));
    }
    // powers[k][e] = num_k^e * den_k^(E_k - e)
    let powers: Vec<Vec<MPoly>> = subs
        .iter()
        .zip(&max_exp)
        .map(|((_, v), &e_max)| {
            let mut np = vec![MPoly::one()];
            for _ in 0..e_max {
                let next = np.last().unwrap().mul(&v.num);
                np.push(next);
            }
            let mut dp = vec![MPoly::one()];
            for _ in 0..e_max {
                let next = dp.last().unwrap().mul(&v.den);
                dp.push(next);
            }
            (0..=e_max as usize)
                .map(|e| np[e].mul(&dp[e_max as usize - e]))
                .collect()
        })
        .collect();
    let mut num = MPoly::zero();
    for (m, c) in p.terms() {
        let mut rest = m.clone();
        let mut factor = MPoly::one();
        for (k, (i, _)) in subs.iter().enumerate() {
            let e = m.exp(*i);
            rest = rest.with_exp(*i, 0);
            factor = factor.mul(&powers[k][e as usize]);
        }
        num = num.add(&factor.mul_monomial(&rest, c));
    }
    (num, den)
}

fn poly_partial(table: &Arc<SymbolTable>, p: &MPoly, var: usize) -> FieldElem {
    let mut acc = FieldElem::from_poly(table, p.partial(var));
    for s in table.radicals_desc() {
        if !p.contains_var(s) {
            continue;
        }
        if let SymbolKind::Radical { num, den } = table.kind(s) {
            let r = FieldElem::from_parts(table, num.clone(), den.clone()).expect("valid relation");
            let dr = r.partial(var);
            if dr.is_zero() {
                continue;
            }
            let ds = (&FieldElem::symbol_index(table, s) * &dr)
                .checked_div(&r.scale(&Rat::from_integer(2.into())))
                .expect("nonzero radicand");
            acc = &acc + &(&FieldElem::from_poly(table, p.partial(s)) * &ds);
        }
    }
    acc
}

fn poly_derive(table: &Arc<SymbolTable>, p: &MPoly) -> FieldElem {
    let mut acc = FieldElem::zero(table);
    for v in p.vars() {
        let dv = match table.kind(v) {
            SymbolKind::IndependentVariable => FieldElem::one(table),
            SymbolKind::Coordinate | SymbolKind::Transcendental => continue,
            SymbolKind::Varying { num, den } => {
                FieldElem::from_parts(table, num.clone(), den.clone()).expect("valid derivative")
            }
            SymbolKind::Radical { num, den } => {
                let r = FieldElem::from_parts(table, num.clone(), den.clone()).expect("valid relation");
                let dr = r.derive();
                if dr.is_zero() {
                    continue;
                }
                (&FieldElem::symbol_index(table, v) * &dr)
                    .checked_div(&r.scale(&Rat::from_integer(2.into())))
                    .expect("nonzero radicand")
            }
        };
        acc = &acc + &(&FieldElem::from_poly(table, p.partial(v)) * &dv);
    }
    acc
}

/// Applies `s² → r` for every radical, returning `(num, den)` with every
/// radical exponent at most one.
fn reduce_radicals(table: &SymbolTable, p: &MPoly) -> (MPoly, MPoly) {
    let mut num = p.clone();
    let mut den = MPoly::one();
    for s in table.radicals_desc() {
        if num.degree_in(s) < 2 {
            continue;
        }
        let (rn, rd) = match table.kind(s) {
            SymbolKind::Radical { num, den } => (num, den),
            _ => unreachable!(),
        };
        let coeffs = num.coeffs_in(s);
        let k_max = (coeffs.len() - 1) / 2;
        let mut reduced = [MPoly::zero(), MPoly::zero()];
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let h = k / 2;
            let part = c.mul(&rn.pow(h as u32)).mul(&rd.pow((k_max - h) as u32));
            reduced[k % 2] = reduced[k % 2].add(&part);
        }
        num = MPoly::from_coeffs_in(s, &reduced);
        den = den.mul(&rd.pow(k_max as u32));
    }
    (num, den)
}

fn normalize(table: &Arc<SymbolTable>, num: MPoly, den: MPoly) -> Result<FieldElem, FieldError> {
    if den.is_zero() {
        return Err(FieldError::DivisionByZero);
    }
    let (mut num, mut den) = (num, den);
    if table.has_radicals() {
        let (n1, d1) = reduce_radicals(table, &num);
        let (n2, d2) = reduce_radicals(table, &den);
        num = n1.mul(&d2);
        den = d1.mul(&n2);
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        for s in table.radicals_desc() {
            if !den.contains_var(s) {
                continue;
            }
            let (rn, rd) = match table.kind(s) {
                SymbolKind::Radical { num, den } => (num, den),
                _ => unreachable!(),
            };
            let c = den.coeffs_in(s);
            let (d0, d1) = (c[0].clone(), c.get(1).cloned().unwrap_or_default());
            let conj = d0.sub(&d1.mul(&MPoly::var(s)));
            // den * conj = d0² - d1² s² = (d0² rd - d1² rn) / rd
            let new_den = d0.mul(&d0).mul(rd).sub(&d1.mul(&d1).mul(rn));
            if new_den.is_zero() {
                return Err(FieldError::DivisionByZero);
            }
            let (nn, nd) = reduce_radicals(table, &num.mul(&conj).mul(rd));
            num = nn;
            den = new_den.mul(&nd);
        }
    }
    Ok(cancel(table, num, den))
}

/// Removes the gcd and makes the denominator monic.
fn cancel(table: &Arc<SymbolTable>, num: MPoly, den: MPoly) -> FieldElem {
    if num.is_zero() {
        return FieldElem::zero(table);
    }
    let (num, den) = if den.is_constant() {
        (num, den)
    } else {
        let g = gcd(&num, &den);
        if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        }
    };
    let lc = den.leading_coeff();
    let inv = lc.recip();
    FieldElem {
        table: table.clone(),
        num: num.scale(&inv),
        den: den.scale(&inv),
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &'a FieldElem) -> FieldElem {
        self.check(rhs);
        self.add_impl(rhs, false)
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &'a FieldElem) -> FieldElem {
        self.check(rhs);
        self.add_impl(rhs, true)
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &'a FieldElem) -> FieldElem {
        self.check(rhs);
        self.mul_impl(rhs)
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            table: self.table.clone(),
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: FieldElem) -> FieldElem {
        &self + &rhs
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: FieldElem) -> FieldElem {
        &self - &rhs
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: FieldElem) -> FieldElem {
        &self * &rhs
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::parse::format_fraction(&self.num, &self.den, &self.table))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::parse::parse_field;

    fn table() -> Arc<SymbolTable> {
        SymbolTable::builder()
            .transcendental("alpha")
            .transcendental("gamma")
            .radical("lambda", "4/gamma")
            .build()
            .unwrap()
    }

    #[test]
    fn rational_addition() {
        let tb = SymbolTable::plain();
        let a = FieldElem::from_ratio(&tb, 1, 2);
        let b = FieldElem::from_ratio(&tb, 1, 3);
        assert_eq!(&a + &b, FieldElem::from_ratio(&tb, 5, 6));
    }

    #[test]
    fn radical_square_reduces() {
        let tb = table();
        let l = FieldElem::symbol(&tb, "lambda").unwrap();
        let expected = parse_field("4/gamma", &tb).unwrap();
        assert_eq!(&l * &l, expected);
    }

    #[test]
    fn radical_denominator_is_rationalized() {
        let tb = table();
        let l = FieldElem::symbol(&tb, "lambda").unwrap();
        let inv = l.inv().unwrap();
        // 1/lambda = lambda*gamma/4
        assert_eq!(inv, parse_field("lambda*gamma/4", &tb).unwrap());
        assert!(!inv.denom().contains_var(tb.lookup("lambda").unwrap()));
        let one = &inv * &l;
        assert!(one.is_one());
    }

    #[test]
    fn rational_function_cancels() {
        let tb = SymbolTable::plain();
        let v = parse_field("(t^2-1)/(t-1)", &tb).unwrap();
        assert_eq!(v, parse_field("t+1", &tb).unwrap());
        assert!(v.is_polynomial());
    }

    #[test]
    fn derivative_quotient_rule() {
        let tb = table();
        let v = parse_field("alpha/t", &tb).unwrap();
        assert_eq!(v.derive(), parse_field("-alpha/t^2", &tb).unwrap());
        let l = FieldElem::symbol(&tb, "lambda").unwrap();
        assert!(l.derive().is_zero());
    }

    #[test]
    fn radical_with_time_dependent_radicand() {
        let tb = SymbolTable::builder().radical("r", "t").build().unwrap();
        let r = FieldElem::symbol(&tb, "r").unwrap();
        // d/dt sqrt(t) = 1/(2 sqrt(t)) = r/(2t)
        assert_eq!(r.derive(), parse_field("r/(2*t)", &tb).unwrap());
    }

    #[test]
    fn zero_divisor_is_rejected() {
        let tb = SymbolTable::builder().radical("w", "4").build().unwrap();
        let v = parse_field("w - 2", &tb).unwrap();
        assert_eq!(v.inv(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn substitution() {
        let tb = table();
        let v = parse_field("alpha^2 + t", &tb).unwrap();
        let r = v
            .substitute(&[(tb.lookup("alpha").unwrap(), parse_field("1/t", &tb).unwrap())])
            .unwrap();
        assert_eq!(r, parse_field("(t^3 + 1)/t^2", &tb).unwrap());
    }
}
