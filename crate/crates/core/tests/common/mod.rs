//! Shared helpers for integration tests: an independent small-integer
//! fraction oracle for the arithmetic criteria, parameter grids and random
//! generators.

#![allow(dead_code)]

use std::sync::Arc;

use painleve_core::catalog::{FamilyTag, ParamAssignment};
use painleve_core::exactfield::{FieldElem, PhaseMono, PhasePoly, SymbolTable};
use proptest::prelude::*;

/// A reduced fraction with positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Q(pub i64, pub i64);

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Q {
    pub fn new(n: i64, d: i64) -> Q {
        assert!(d != 0);
        let g = gcd(n, d).max(1);
        let s = if d < 0 { -1 } else { 1 };
        Q(s * n / g, s * d / g)
    }

    pub fn int(n: i64) -> Q {
        Q(n, 1)
    }

    pub fn add(self, o: Q) -> Q {
        Q::new(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
    }

    pub fn neg(self) -> Q {
        Q(-self.0, self.1)
    }

    pub fn sub(self, o: Q) -> Q {
        self.add(o.neg())
    }

    pub fn scale(self, k: i64) -> Q {
        Q::new(self.0 * k, self.1)
    }

    pub fn is_int(self) -> bool {
        self.1 == 1
    }

    pub fn is_even(self) -> bool {
        self.1 == 1 && self.0 % 2 == 0
    }

    pub fn is_half_odd(self) -> bool {
        self.1 == 2
    }

    pub fn text(self) -> String {
        if self.1 == 1 {
            format!("{}", self.0)
        } else {
            format!("{}/{}", self.0, self.1)
        }
    }
}

/// True when the oracle says the instance is NOT strongly minimal.
pub fn exceptional(family: FamilyTag, v: &[Q]) -> bool {
    use FamilyTag::*;
    let pairs = |n: usize| (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)));
    match family {
        P1 => false,
        P2 | S2 => v[0].is_half_odd(),
        P3 | P3prime | S3prime => v[0].add(v[1]).is_even() || v[0].sub(v[1]).is_even(),
        P4 | S4 => pairs(3).any(|(i, j)| v[i].sub(v[j]).is_int()),
        P5 | S5 => pairs(4).any(|(i, j)| v[i].sub(v[j]).is_int()),
        P6 | S6 => pairs(4).any(|(i, j)| v[i].sub(v[j]).is_int() || v[i].add(v[j]).is_int()),
    }
}

/// Natural parameter names of a family.
pub fn natural_names(family: FamilyTag) -> &'static [&'static str] {
    use FamilyTag::*;
    match family {
        P1 => &[],
        P2 | S2 => &["alpha"],
        P3 | P3prime | S3prime => &["v1", "v2"],
        P4 | S4 => &["v1", "v2", "v3"],
        P5 | S5 => &["v1", "v2", "v3", "v4"],
        P6 | S6 => &["a1", "a2", "a3", "a4"],
    }
}

const VALUES: [Q; 8] = [Q(0, 1), Q(1, 2), Q(1, 3), Q(1, 1), Q(-3, 2), Q(2, 5), Q(-7, 3), Q(5, 4)];

/// A deterministic grid of at least 24 points in natural coordinates.
/// Families with a sum constraint get the last coordinate solved for.
pub fn grid(family: FamilyTag) -> Vec<Vec<Q>> {
    use FamilyTag::*;
    let n = natural_names(family).len();
    match family {
        P1 => vec![vec![]],
        P2 | S2 => (-8..=8)
            .map(|k| Q::new(k, 2))
            .chain([Q::new(1, 3), Q::new(-2, 3), Q::new(5, 4), Q::new(7, 6), Q::new(49, 100), Q::new(51, 100)])
            .map(|q| vec![q])
            .collect(),
        _ => {
            let free = match family {
                P4 | S4 => 2,
                P5 | S5 => 3,
                _ => n,
            };
            let mut out = Vec::new();
            let mut k: usize = 0;
            while out.len() < 28 {
                let mut p: Vec<Q> = (0..free).map(|i| VALUES[(k / 8usize.pow(i as u32)) % 8]).collect();
                // shift some points by integers so that integrality comes from differences
                if k % 3 == 1 {
                    p[0] = p[0].add(Q::int(2));
                }
                if free < n {
                    let s = p.iter().fold(Q::int(0), |a, b| a.add(*b));
                    p.push(s.neg());
                }
                out.push(p);
                k = k * 5 + 7;
                k %= 8usize.pow(free as u32);
                k += out.len();
            }
            out
        }
    }
}

/// P3 parameters (alpha, beta, gamma, delta) = (4 v2, 4 (1 - v1), 4, -4),
/// for which the reduction gives back (v1, v2) on the all-plus branch.
pub fn p3_abcd(v: &[Q]) -> [Q; 4] {
    [v[1].scale(4), Q::int(1).sub(v[0]).scale(4), Q::int(4), Q::int(-4)]
}

/// Parameters for `family` at a point in natural coordinates; P3 goes
/// through [`p3_abcd`].
pub fn assignment(family: FamilyTag, point: &[Q]) -> ParamAssignment {
    let specs: Vec<(String, String)> = if family == FamilyTag::P3 {
        let abcd = p3_abcd(point);
        ["alpha", "beta", "gamma", "delta"]
            .iter()
            .zip(abcd)
            .map(|(n, q)| (n.to_string(), q.text()))
            .collect()
    } else {
        natural_names(family)
            .iter()
            .zip(point)
            .map(|(n, q)| (n.to_string(), q.text()))
            .collect()
    };
    ParamAssignment::from_specs(&specs).unwrap()
}

/// Random point in natural coordinates with small denominators, the last
/// coordinate solved for when the family has a sum constraint.
pub fn random_point(family: FamilyTag) -> impl Strategy<Value = Vec<Q>> {
    use FamilyTag::*;
    let n = natural_names(family).len();
    let free = match family {
        P4 | S4 | P5 | S5 => n - 1,
        _ => n,
    };
    let q = (-12i64..=12, prop::sample::select(vec![1i64, 2, 3, 4, 6])).prop_map(|(a, b)| Q::new(a, b));
    proptest::collection::vec(q, free).prop_map(move |mut p| {
        if free < n {
            let s = p.iter().fold(Q::int(0), |a, b| a.add(*b));
            p.push(s.neg());
        }
        p
    })
}

/// Table with one transcendental `a` and a radical `r` with r^2 = 2.
pub fn small_table() -> Arc<SymbolTable> {
    SymbolTable::builder().transcendental("a").radical("r", "2").build().unwrap()
}

fn rat(tb: &Arc<SymbolTable>, n: i64, d: i64) -> FieldElem {
    FieldElem::from_ratio(tb, n, d)
}

/// Random polynomial in t, a and r with small coefficients (up to 4 terms).
/// Symbols missing from the table are replaced by 1.
pub fn small_coeff_poly(tb: Arc<SymbolTable>) -> impl Strategy<Value = FieldElem> {
    proptest::collection::vec((-4i64..=4, 1i64..=3, 0u32..=2, 0u32..=1, 0u32..=1), 1..4).prop_map(move |terms| {
        let t = FieldElem::t(&tb);
        let a = FieldElem::symbol(&tb, "a").unwrap_or_else(|_| FieldElem::one(&tb));
        let r = FieldElem::symbol(&tb, "r").unwrap_or_else(|_| FieldElem::one(&tb));
        terms.iter().fold(FieldElem::zero(&tb), |acc, &(n, d, et, ea, er)| {
            let term = &(&rat(&tb, n, d) * &t.pow(et)) * &(&a.pow(ea) * &r.pow(er));
            &acc + &term
        })
    })
}

/// Random element of the coefficient field: ratio of small polynomials
/// with a nonzero denominator.
pub fn small_field_elem(tb: Arc<SymbolTable>) -> impl Strategy<Value = FieldElem> {
    (small_coeff_poly(tb.clone()), small_coeff_poly(tb))
        .prop_filter("nonzero denominator", |(_, d)| !d.is_zero())
        .prop_map(|(n, d)| n.checked_div(&d).unwrap())
}

/// Random phase polynomial of total degree <= 3 with polynomial coefficients.
pub fn small_phase_poly(tb: Arc<SymbolTable>) -> impl Strategy<Value = PhasePoly> {
    proptest::collection::vec((0u16..=2, 0u16..=2, small_coeff_poly(tb.clone())), 0..4).prop_map(move |terms| {
        let mut p = PhasePoly::zero(&tb);
        for (ex, ey, c) in terms {
            p = &p + &PhasePoly::term(PhaseMono::xy(ex, ey), c);
        }
        p
    })
}

/// True when `a` is a nonzero multiple of `b` by an element of the field.
pub fn proportional(a: &PhasePoly, b: &PhasePoly) -> bool {
    match (a.leading(), b.leading()) {
        (Some((ma, ca)), Some((mb, cb))) if ma == mb => {
            let k = cb.checked_div(ca).unwrap();
            &a.scale(&k) == b
        }
        _ => false,
    }
}
