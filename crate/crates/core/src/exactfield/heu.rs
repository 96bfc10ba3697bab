//! Heuristic gcd: evaluate one variable at a large integer, recurse, and
//! lift the result back by balanced ξ-adic expansion.
//!
//! A candidate is accepted only if it divides both inputs and its degree in
//! every variable reaches the modular upper bound, which pins it to the true
//! gcd up to a constant. Anything else falls back to the caller.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::mpoly::{gcd_degree_bound, MPoly, Monomial};
use super::Rat;

const ATTEMPTS: usize = 6;

pub(super) fn heuristic_gcd(a: &MPoly, b: &MPoly) -> Option<MPoly> {
    let f = a.integer_primitive();
    let g = b.integer_primitive();
    let h = heu(&f, &g, 0)?;
    let mut vars = f.vars();
    vars.extend(g.vars());
    vars.sort_unstable();
    vars.dedup();
    for v in vars {
        if gcd_degree_bound(&f, &g, v)? != h.degree_in(v) as usize {
            return None;
        }
    }
    Some(h)
}

fn int_coeff(c: &Rat) -> &BigInt {
    debug_assert!(c.is_integer());
    c.numer()
}

fn max_norm(p: &MPoly) -> BigInt {
    p.terms().map(|(_, c)| int_coeff(c).abs()).max().unwrap_or_default()
}

fn content(p: &MPoly) -> BigInt {
    p.terms().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(int_coeff(c)))
}

fn divide_ground(p: &MPoly, k: &BigInt) -> MPoly {
    p.scale(&Rat::from_integer(k.clone()).recip())
}

/// Substitutes `x = xi`; the result no longer involves `x`.
fn evaluate(p: &MPoly, x: usize, xi: &BigInt) -> MPoly {
    let mut pows: Vec<BigInt> = vec![BigInt::one()];
    MPoly::from_terms(p.terms().map(|(m, c)| {
        let e = m.exp(x) as usize;
        while pows.len() <= e {
            let next = pows.last().unwrap() * xi;
            pows.push(next);
        }
        (m.with_exp(x, 0), c * Rat::from_integer(pows[e].clone()))
    }))
}

/// Balanced residue in `(-xi/2, xi/2]`.
fn balanced(c: &BigInt, xi: &BigInt) -> BigInt {
    let r = c.mod_floor(xi);
    if &r * 2 > *xi {
        r - xi
    } else {
        r
    }
}

fn lift(h: &MPoly, x: usize, xi: &BigInt) -> MPoly {
    let mut out = MPoly::zero();
    let mut rest = h.clone();
    let mut i: u16 = 0;
    let inv = Rat::from_integer(xi.clone()).recip();
    while !rest.is_zero() {
        let digit = MPoly::from_terms(
            rest.terms()
                .map(|(m, c)| (m.clone(), Rat::from_integer(balanced(int_coeff(c), xi)))),
        );
        for (m, c) in digit.terms() {
            out.add_term(m.mul(&Monomial::var(x, i)), c.clone());
        }
        rest = rest.sub(&digit).scale(&inv);
        i += 1;
    }
    out
}

fn heu(f: &MPoly, g: &MPoly, depth: usize) -> Option<MPoly> {
    if f.is_zero() || g.is_zero() || depth > 16 {
        return None;
    }
    let common = content(f).gcd(&content(g));
    let f = divide_ground(f, &common);
    let g = divide_ground(g, &common);
    let scale_back = |p: MPoly| p.scale(&Rat::from_integer(common.clone()));

    let mut vars = f.vars();
    vars.extend(g.vars());
    let Some(&x) = vars.iter().max() else {
        let (a, b) = (int_coeff(&f.leading_coeff()).clone(), int_coeff(&g.leading_coeff()).clone());
        return Some(scale_back(MPoly::constant(Rat::from_integer(a.gcd(&b)))));
    };

    let (nf, ng) = (max_norm(&f), max_norm(&g));
    let bound: BigInt = nf.clone().min(ng.clone()) * 2 + 29;
    let lf = int_coeff(&f.leading_coeff()).abs();
    let lg = int_coeff(&g.leading_coeff()).abs();
    let floor: BigInt = (nf / lf).min(ng / lg) * 2 + 2;
    let mut xi = bound.clone().min(bound.sqrt() * 99).max(floor);

    for _ in 0..ATTEMPTS {
        let ff = evaluate(&f, x, &xi);
        let gg = evaluate(&g, x, &xi);
        if let Some(h) = heu(&ff, &gg, depth + 1) {
            let cand = lift(&h, x, &xi);
            if !cand.is_zero() {
                let cand = divide_ground(&cand, &content(&cand));
                let cand = if cand.leading_coeff().is_negative() { cand.neg() } else { cand };
                if f.div_exact(&cand).is_some() && g.div_exact(&cand).is_some() {
                    return Some(scale_back(cand));
                }
            }
            // The cofactor of f can lift cleanly when the gcd does not.
            if let Some(cf) = ff.div_exact(&h) {
                let cf = lift(&cf, x, &xi);
                if !cf.is_zero() {
                    if let Some(cand) = f.div_exact(&cf) {
                        if g.div_exact(&cand).is_some() && cand.terms().all(|(_, c)| c.is_integer()) {
                            let cand = divide_ground(&cand, &content(&cand));
                            let cand = if cand.leading_coeff().is_negative() { cand.neg() } else { cand };
                            return Some(scale_back(cand));
                        }
                    }
                }
            }
        }
        let s = xi.sqrt().sqrt();
        xi = (&xi * 73794 * s) / 27011;
        if xi.sign() != Sign::Plus {
            return None;
        }
    }
    None
}
