//! Arithmetic membership tests for the exceptional parameter sets.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::Serialize;

use super::symbols::SymbolKind;
use super::{FieldElem, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IntegerSet {
    /// ℤ
    Integers,
    /// 2ℤ
    EvenIntegers,
    /// ½ + ℤ
    HalfPlusIntegers,
}

impl IntegerSet {
    pub fn contains(&self, r: &Rat) -> bool {
        match self {
            IntegerSet::Integers => r.is_integer(),
            IntegerSet::EvenIntegers => r.is_integer() && r.to_integer().is_even(),
            IntegerSet::HalfPlusIntegers => {
                let twice = r * Rat::from_integer(2.into());
                twice.is_integer() && !r.is_integer()
            }
        }
    }

    pub fn notation(&self) -> &'static str {
        match self {
            IntegerSet::Integers => "Z",
            IntegerSet::EvenIntegers => "2Z",
            IntegerSet::HalfPlusIntegers => "1/2+Z",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Membership {
    In,
    NotIn,
    /// Depends on an independent transcendental parameter, hence not in the set.
    GenericNotIn,
    /// Could not be decided (e.g. depends on `t`, or on radicals whose
    /// relations are not arithmetically independent).
    Undecided,
}

fn rational_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let root = |n: &BigInt| {
        let s = n.sqrt();
        (&s * &s == *n).then_some(s)
    };
    Some(Rat::new(root(r.numer())?, root(r.denom())?))
}

/// Decides whether `v` lies in `set`.
///
/// Rational constants are decided exactly. Anything depending on a
/// transcendental parameter is reported as [`Membership::GenericNotIn`].
/// For radicals of rational constants: `v²` rational decides through the
/// square root (the sets are symmetric under negation); a single
/// non-square radical with nonzero coefficient gives an irrational number.
pub fn membership_test(v: &FieldElem, set: IntegerSet) -> Membership {
    if let Some(r) = v.as_rat() {
        return if set.contains(&r) {
            Membership::In
        } else {
            Membership::NotIn
        };
    }
    let table = v.table();
    let syms = v.symbols();
    let mut depends_on_transcendental = false;
    let mut radicals = Vec::new();
    for &s in &syms {
        match table.kind(s) {
            SymbolKind::Transcendental => depends_on_transcendental = true,
            SymbolKind::Radical { num, den } => {
                let transcendental_radicand = num
                    .vars()
                    .into_iter()
                    .chain(den.vars())
                    .any(|i| matches!(table.kind(i), SymbolKind::Transcendental));
                if transcendental_radicand {
                    depends_on_transcendental = true;
                }
                radicals.push(s);
            }
            _ => return Membership::Undecided,
        }
    }
    if depends_on_transcendental {
        return Membership::GenericNotIn;
    }
    let square = v * v;
    if let Some(r2) = square.as_rat() {
        return match rational_sqrt(&r2) {
            Some(root) if set.contains(&root) => Membership::In,
            _ => Membership::NotIn,
        };
    }
    if radicals.len() == 1 && v.is_polynomial() {
        let s = radicals[0];
        if let SymbolKind::Radical { num, den } = table.kind(s) {
            let radicand = num.as_constant().zip(den.as_constant()).map(|(n, d)| n / d);
            if let Some(r) = radicand {
                let coeffs = v.numer().coeffs_in(s);
                let linear = coeffs.get(1).is_some_and(|c| !c.is_zero());
                if rational_sqrt(&r).is_none() && linear && coeffs.iter().all(|c| c.is_constant()) {
                    return Membership::NotIn;
                }
            }
        }
    }
    Membership::Undecided
}
