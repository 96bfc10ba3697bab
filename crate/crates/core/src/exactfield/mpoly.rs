//! Sparse multivariate polynomials over ℚ.
//!
//! Variables are indices into a [`SymbolTable`](super::SymbolTable). Exponent
//! vectors are stored with trailing zeros trimmed, so a polynomial built
//! against a table stays valid after the table grows.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{heu, Rat};

/// Exponent vector, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(index: usize, exp: u16) -> Self {
        let mut m = Monomial(vec![0; index + 1]);
        m.0[index] = exp;
        m.trim();
        m
    }

    pub fn from_exponents(exps: Vec<u16>) -> Self {
        let mut m = Monomial(exps);
        m.trim();
        m
    }

    fn trim(&mut self) {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    pub fn exp(&self, index: usize) -> u16 {
        self.0.get(index).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let v = (0..n).map(|i| self.exp(i) + other.exp(i)).collect();
        Monomial(v)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut v = self.0.clone();
        for (i, &e) in other.0.iter().enumerate() {
            if v[i] < e {
                return None;
            }
            v[i] -= e;
        }
        Some(Monomial::from_exponents(v))
    }

    pub fn with_exp(&self, index: usize, exp: u16) -> Monomial {
        let mut v = self.0.clone();
        if v.len() <= index {
            v.resize(index + 1, 0);
        }
        v[index] = exp;
        Monomial::from_exponents(v)
    }

    pub fn vars(&self) -> impl Iterator<Item = (usize, u16)> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e))
    }

    fn gcd(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().min(other.0.len());
        Monomial::from_exponents((0..n).map(|i| self.0[i].min(other.0[i])).collect())
    }
}

/// Graded lexicographic order: total degree first, then the earlier variable wins.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in 0..n {
                match self.exp(i).cmp(&other.exp(i)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Polynomial with rational coefficients; no zero coefficients are stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Rat>,
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().rev()).finish()
    }
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn one() -> Self {
        MPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = MPoly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(index: usize) -> Self {
        MPoly::term(Monomial::var(index, 1), Rat::one())
    }

    pub fn term(m: Monomial, c: Rat) -> Self {
        let mut p = MPoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = MPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// The value of a constant polynomial (zero included).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rat {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rat::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.keys().map(|m| m.exp(var)).max().unwrap_or(0)
    }

    pub fn contains_var(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.exp(var) > 0)
    }

    /// Sorted list of variable indices that occur.
    pub fn vars(&self) -> Vec<usize> {
        let n = self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0);
        (0..n).filter(|&i| self.contains_var(i)).collect()
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), -c);
        }
        r
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        if self.is_zero() || other.is_zero() {
            return MPoly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut r = MPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut result = MPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(k, x)| (k.mul(m), x * c)).collect(),
        }
    }

    /// Leading coefficient scaled to one; zero stays zero.
    pub fn monic(&self) -> MPoly {
        match self.leading() {
            None => MPoly::zero(),
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
        }
    }

    pub fn partial(&self, var: usize) -> MPoly {
        let mut r = MPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(var);
            if e > 0 {
                r.add_term(m.with_exp(var, e - 1), c * Rat::from_integer(e.into()));
            }
        }
        r
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `var`.
    pub fn coeffs_in(&self, var: usize) -> Vec<MPoly> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![MPoly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exp(var) as usize;
            out[e].add_term(m.with_exp(var, 0), c.clone());
        }
        out
    }

    pub fn from_coeffs_in(var: usize, coeffs: &[MPoly]) -> MPoly {
        let mut r = MPoly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let m = Monomial::var(var, e as u16);
            for (k, x) in &c.terms {
                r.add_term(k.mul(&m), x.clone());
            }
        }
        r
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    ///
    /// A single divisor is a Gröbner basis of the ideal it generates, so a
    /// nonzero remainder at any leading-term step proves non-divisibility.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        let (dm, dc) = d.leading()?;
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let dc_inv = dc.recip();
        let mut q = MPoly::zero();
        let mut r = self.clone();
        while let Some((rm, rc)) = r.leading() {
            let qm = rm.div(dm)?;
            let qc = rc * &dc_inv;
            r = r.sub(&d.mul_monomial(&qm, &qc));
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// Pseudo-remainder `lc(g)^(deg f - deg g + 1) * self mod g` in `var`.
    fn prem(&self, g: &MPoly, var: usize) -> MPoly {
        let dg = g.degree_in(var);
        let lc = g.coeffs_in(var).pop().expect("nonzero");
        let mut steps = (self.degree_in(var) + 1 - dg) as u32;
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(var) >= dg {
            let dr = r.degree_in(var);
            let lr = r.coeffs_in(var).pop().expect("nonzero");
            let shift = Monomial::var(var, dr - dg);
            let sub = g.mul(&lr).mul_monomial(&shift, &Rat::one());
            r = r.mul(&lc).sub(&sub);
            steps -= 1;
        }
        r.mul(&lc.pow(steps))
    }

    /// Scales to integer coefficients with no common factor and a positive
    /// leading coefficient. Keeps remainder sequences from swelling.
    pub(super) fn integer_primitive(&self) -> MPoly {
        let Some((_, lc)) = self.leading() else {
            return MPoly::zero();
        };
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
        let mut k = Rat::new(den, num);
        if lc.is_negative() {
            k = -k;
        }
        self.scale(&k)
    }

    /// Univariate image in `var` modulo `MODULUS` after substituting the
    /// point `pt` for every other variable. `None` if a denominator vanishes.
    fn image_mod(&self, var: usize, pt: &[u64]) -> Option<Vec<u64>> {
        let mut out = vec![0u64; self.degree_in(var) as usize + 1];
        for (m, c) in &self.terms {
            let mut v = rat_mod(c)?;
            for (i, e) in m.vars() {
                if i != var {
                    v = v * pow_mod(pt[i % pt.len()], e as u64) % MODULUS;
                }
            }
            let e = m.exp(var) as usize;
            out[e] = (out[e] + v) % MODULUS;
        }
        Some(out)
    }

    /// Monic gcd of the coefficients in `var` (the content).
    fn content_in(&self, var: usize) -> MPoly {
        let mut g = MPoly::zero();
        for c in self.coeffs_in(var).into_iter().rev() {
            if c.is_zero() {
                continue;
            }
            g = gcd(&g, &c);
            if g.is_one() {
                break;
            }
        }
        g
    }
}

/// Monic greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one();
    }
    if a == b {
        return a.monic();
    }
    if a.is_monomial() || b.is_monomial() {
        let (mono, other) = if a.is_monomial() { (a, b) } else { (b, a) };
        let mut g = mono.leading().unwrap().0.clone();
        for m in other.terms.keys() {
            g = g.gcd(m);
            if g.is_one() {
                break;
            }
        }
        return MPoly::term(g, Rat::one());
    }
    let va = a.vars();
    let vb = b.vars();
    // A variable present in only one argument is a "constant" for the other.
    if let Some(&v) = va.iter().find(|v| !vb.contains(v)) {
        return gcd(&a.content_in(v), b);
    }
    if let Some(&v) = vb.iter().find(|v| !va.contains(v)) {
        return gcd(a, &b.content_in(v));
    }
    // Cheap exact case: one argument divides the other.
    let (small, big) = if a.terms.len() <= b.terms.len() { (a, b) } else { (b, a) };
    if big.div_exact(small).is_some() {
        return small.monic();
    }

    // If some variable provably does not occur in the gcd, only the
    // contents with respect to it can share factors.
    if let Some(&v) = va.iter().find(|&&v| coprime_in(a, b, v)) {
        return gcd(&a.content_in(v), &b.content_in(v));
    }

    if let Some(g) = heu::heuristic_gcd(a, b) {
        return g.monic();
    }

    let var = *va
        .iter()
        .min_by_key(|&&v| a.degree_in(v).max(b.degree_in(v)))
        .unwrap();
    let ca = a.content_in(var);
    let cb = b.content_in(var);
    let content = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides").integer_primitive();
    let pb = b.div_exact(&cb).expect("content divides").integer_primitive();
    let g = subresultant_gcd(pa, pb, var);
    let gc = g.content_in(var);
    let g = g.div_exact(&gc).expect("content divides");
    content.mul(&g).monic()
}

/// Last nonzero subresultant of two polynomials of positive degree in
/// `var`; its primitive part is their primitive gcd. Coefficient growth stays
/// polynomial without taking contents along the way.
fn subresultant_gcd(a: MPoly, b: MPoly, var: usize) -> MPoly {
    let (mut f, mut g) = if a.degree_in(var) >= b.degree_in(var) { (a, b) } else { (b, a) };
    let mut lc_g = MPoly::one();
    let mut h = MPoly::one();
    loop {
        let delta = (f.degree_in(var) - g.degree_in(var)) as u32;
        let r = f.prem(&g, var);
        if r.is_zero() {
            return g;
        }
        if r.degree_in(var) == 0 {
            return MPoly::one();
        }
        let divisor = lc_g.mul(&h.pow(delta));
        f = g;
        g = r.div_exact(&divisor).expect("subresultant division is exact");
        lc_g = f.coeffs_in(var).pop().expect("nonzero");
        h = match delta {
            0 => h,
            1 => lc_g.clone(),
            _ => lc_g.pow(delta).div_exact(&h.pow(delta - 1)).expect("subresultant division is exact"),
        };
    }
}

const MODULUS: u64 = (1 << 31) - 1;

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    b %= MODULUS;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % MODULUS;
        }
        b = b * b % MODULUS;
        e >>= 1;
    }
    r
}

fn rat_mod(c: &Rat) -> Option<u64> {
    let m = BigInt::from(MODULUS);
    let n = c.numer().mod_floor(&m).to_u64()?;
    let d = c.denom().mod_floor(&m).to_u64()?;
    if d == 0 {
        return None;
    }
    Some(n * pow_mod(d, MODULUS - 2) % MODULUS)
}

fn trim_mod(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Degree of the gcd of two univariate polynomials over GF(p).
fn gcd_degree_mod(mut f: Vec<u64>, mut g: Vec<u64>) -> usize {
    trim_mod(&mut f);
    trim_mod(&mut g);
    while !g.is_empty() {
        let inv = pow_mod(*g.last().unwrap(), MODULUS - 2);
        while f.len() >= g.len() {
            let k = f.last().unwrap() * inv % MODULUS;
            let shift = f.len() - g.len();
            for (i, &gc) in g.iter().enumerate() {
                f[shift + i] = (f[shift + i] + MODULUS - k * gc % MODULUS) % MODULUS;
            }
            trim_mod(&mut f);
        }
        std::mem::swap(&mut f, &mut g);
    }
    f.len().saturating_sub(1)
}

/// Upper bound on the degree in `var` of `gcd(a, b)`. Any common factor
/// survives evaluation at a point where both leading coefficients in `var`
/// stay nonzero, with its degree intact.
pub(super) fn gcd_degree_bound(a: &MPoly, b: &MPoly, var: usize) -> Option<usize> {
    const POINTS: [[u64; 12]; 2] = [
        [1_000_003, 7_919, 104_729, 15_485_863, 2_750_159, 611_953, 3_571, 49_979_687, 86_028_121, 122_949_829, 179_424_673, 32_452_843],
        [982_451_653, 373_587_883, 533_000_389, 694_847_533, 817_504_253, 920_419_823, 67_867_967, 256_203_221, 452_930_477, 633_910_099, 776_531_401, 899_809_343],
    ];
    let (da, db) = (a.degree_in(var) as usize, b.degree_in(var) as usize);
    for pt in &POINTS {
        let (Some(fa), Some(fb)) = (a.image_mod(var, pt), b.image_mod(var, pt)) else {
            continue;
        };
        if fa[da] == 0 || fb[db] == 0 {
            continue;
        }
        return Some(gcd_degree_mod(fa, fb));
    }
    None
}

fn coprime_in(a: &MPoly, b: &MPoly, var: usize) -> bool {
    gcd_degree_bound(a, b, var) == Some(0)
}

pub fn lcm(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() || b.is_zero() {
        return MPoly::zero();
    }
    let g = gcd(a, b);
    a.div_exact(&g).expect("gcd divides").mul(b).monic()
}

/// Sign of the leading coefficient (+1, -1 or 0).
pub fn leading_sign(p: &MPoly) -> i32 {
    match p.leading() {
        None => 0,
        Some((_, c)) if c.is_negative() => -1,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    // x0 = index 0, x1 = index 1, x2 = index 2
    fn p(terms: &[(&[u16], i64)]) -> MPoly {
        MPoly::from_terms(
            terms
                .iter()
                .map(|(e, c)| (Monomial::from_exponents(e.to_vec()), r(*c))),
        )
    }

    #[test]
    fn grlex_orders_by_degree_then_lex() {
        let a = Monomial::from_exponents(vec![1, 0]);
        let b = Monomial::from_exponents(vec![0, 1]);
        let c = Monomial::from_exponents(vec![0, 0, 2]);
        assert!(a > b);
        assert!(c > a);
        assert_eq!(Monomial::from_exponents(vec![0, 0]), Monomial::one());
    }

    #[test]
    fn exact_division() {
        // (x0 - 1)(x0 + 1) / (x0 - 1)
        let a = p(&[(&[1], 1), (&[], -1)]);
        let b = p(&[(&[1], 1), (&[], 1)]);
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(p(&[(&[2], 1), (&[], 1)]).div_exact(&a), None);
    }

    #[test]
    fn gcd_of_multivariate_products() {
        // g = x0*x1 + 2, a = g*(x0 + x2), b = g*(x1 - 3)
        let g = p(&[(&[1, 1], 1), (&[], 2)]);
        let a = g.mul(&p(&[(&[1], 1), (&[0, 0, 1], 1)]));
        let b = g.mul(&p(&[(&[0, 1], 1), (&[], -3)]));
        assert_eq!(gcd(&a, &b), g.monic());
        assert_eq!(gcd(&a, &MPoly::one()), MPoly::one());
    }

    #[test]
    fn gcd_with_monomials() {
        let a = p(&[(&[2, 1], 3), (&[1, 2], 1)]);
        let b = p(&[(&[1, 3], 5)]);
        assert_eq!(gcd(&a, &b), p(&[(&[1, 1], 1)]));
    }

    #[test]
    fn gcd_coprime_is_one() {
        let a = p(&[(&[2], 1), (&[0, 1], 1)]);
        let b = p(&[(&[1], 1), (&[0, 2], 1), (&[], 1)]);
        assert!(gcd(&a, &b).is_one());
    }

    fn small_poly() -> impl proptest::strategy::Strategy<Value = MPoly> {
        use proptest::prelude::*;
        proptest::collection::vec((0u16..3, 0u16..3, 0u16..2, -5i64..=5), 1..5)
            .prop_map(|ts| MPoly::from_terms(ts.into_iter().map(|(i, j, k, c)| (Monomial::from_exponents(vec![i, j, k]), r(c)))))
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn gcd_has_coprime_cofactors(a in small_poly(), b in small_poly(), c in small_poly()) {
            let (ac, bc) = (a.mul(&c), b.mul(&c));
            let g = gcd(&ac, &bc);
            if ac.is_zero() || bc.is_zero() {
                return Ok(());
            }
            let qa = ac.div_exact(&g).expect("gcd divides");
            let qb = bc.div_exact(&g).expect("gcd divides");
            proptest::prop_assert!(g.div_exact(&c).is_some());
            proptest::prop_assert!(gcd(&qa, &qb).is_one());
        }
    }
}
