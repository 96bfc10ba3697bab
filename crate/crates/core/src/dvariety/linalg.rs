//! Dense linear algebra used by the bounded searches: a modular rank test
//! and exact rational kernels.

use num_traits::{One, Signed, Zero};

use crate::exactfield::Rat;

/// A Mersenne prime small enough for `u64` products.
pub const PRIME: u64 = (1 << 31) - 1;

/// Reduces a rational modulo [`PRIME`]; `None` when the denominator vanishes.
pub fn rat_mod_p(r: &Rat) -> Option<u64> {
    let p = num_bigint::BigInt::from(PRIME);
    let reduce = |n: &num_bigint::BigInt| -> u64 {
        let m = n % &p;
        let m = if m.is_negative() { m + &p } else { m };
        u64::try_from(m).expect("reduced value fits")
    };
    let d = reduce(r.denom());
    if d == 0 {
        return None;
    }
    Some(mul_mod(reduce(r.numer()), inv_mod(d)))
}

#[inline]
pub fn mul_mod(a: u64, b: u64) -> u64 {
    (a * b) % PRIME
}

pub fn inv_mod(a: u64) -> u64 {
    let mut result = 1u64;
    let mut base = a % PRIME;
    let mut e = PRIME - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(result, base);
        }
        base = mul_mod(base, base);
        e >>= 1;
    }
    result
}

/// Whether the `rows × cols` row-major matrix has full column rank mod p.
/// Destroys `m`.
pub fn full_column_rank_mod_p(m: &mut [u64], rows: usize, cols: usize) -> bool {
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| m[r * cols + c] != 0) else {
            return false;
        };
        if pivot != rank {
            for k in c..cols {
                m.swap(pivot * cols + k, rank * cols + k);
            }
        }
        let inv = inv_mod(m[rank * cols + c]);
        for r in rank + 1..rows {
            let f = m[r * cols + c];
            if f == 0 {
                continue;
            }
            let f = mul_mod(f, inv);
            for k in c..cols {
                let sub = mul_mod(f, m[rank * cols + k]);
                m[r * cols + k] = (m[r * cols + k] + PRIME - sub) % PRIME;
            }
        }
        rank += 1;
    }
    true
}

/// Basis of the right kernel of a rational matrix (rows of `m`), one vector
/// per free column of the reduced row echelon form.
pub fn rational_kernel(m: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let mut a: Vec<Vec<Rat>> = m.iter().filter(|r| r.iter().any(|v| !v.is_zero())).cloned().collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..a.len()).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = Rat::one() / &a[row][c];
        for v in a[row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..a.len() {
            if r != row && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in 0..cols {
                    if !a[row][k].is_zero() {
                        let d = &f * &a[row][k];
                        a[r][k] -= d;
                    }
                }
            }
        }
        pivots.push(c);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = vec![vec![r(1), r(2), r(3)], vec![r(2), r(4), r(6)]];
        let k = rational_kernel(&m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            for row in &m {
                let dot: Rat = row.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn modular_rank() {
        let mut full = vec![1, 2, 3, 4];
        assert!(full_column_rank_mod_p(&mut full, 2, 2));
        let mut deficient = vec![1, 2, 2, 4];
        assert!(!full_column_rank_mod_p(&mut deficient, 2, 2));
        assert_eq!(rat_mod_p(&Rat::new(1.into(), 2.into())).map(|h| mul_mod(h, 2)), Some(1));
        assert_eq!(rat_mod_p(&r(-1)), Some(PRIME - 1));
    }
}
