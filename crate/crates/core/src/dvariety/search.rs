//! Bounded searches for Darboux polynomials and polynomial first integrals.
//!
//! For each enumerated integer cofactor G the condition D(P) = G·P is linear
//! in the coefficients of P, so P ranges over a kernel. Candidates are first
//! screened by a rank test modulo a prime (rank can only drop modulo p), and
//! the exact rational kernel is computed only when the screen is inconclusive.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::linalg::{full_column_rank_mod_p, rat_mod_p, rational_kernel, PRIME};
use super::{verify_darboux, DVarietyError, DVectorField, DarbouxCertificate};
use crate::exactfield::{FieldElem, MPoly, Monomial, PhaseMono, PhasePoly, Rat, SYM_T};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchBounds {
    /// Total degree of P in x, y.
    pub deg_xy: u32,
    /// Degree in t of the coefficients of P.
    pub deg_t: u32,
    /// Cofactor coefficients range over -box..=box.
    pub cofactor_box: u32,
    /// Total degree of G in x, y, t; `None` keeps only the per-variable defaults.
    pub cofactor_deg: Option<u32>,
    pub max_matrix_cells: usize,
    pub max_candidates: u64,
}

impl SearchBounds {
    pub fn new(deg_xy: u32, deg_t: u32, cofactor_box: u32) -> Self {
        SearchBounds {
            deg_xy,
            deg_t,
            cofactor_box,
            cofactor_deg: None,
            max_matrix_cells: 250_000,
            max_candidates: 20_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub certificates: Vec<DarbouxCertificate>,
    pub bounds: SearchBounds,
    /// Monomials x^a y^b t^c allowed in the cofactor.
    pub cofactor_monomials: Vec<String>,
    pub candidates_examined: u64,
    pub exact_solves: u64,
}

impl SearchReport {
    pub fn summary(&self) -> String {
        let found = if self.certificates.is_empty() {
            "no invariant found within bounds".to_string()
        } else {
            format!("{} invariant(s) found within bounds", self.certificates.len())
        };
        format!(
            "{found} (deg_xy <= {}, deg_t <= {}, cofactor box {} over [{}], {} candidates)",
            self.bounds.deg_xy,
            self.bounds.deg_t,
            self.bounds.cofactor_box,
            self.cofactor_monomials.join(", "),
            self.candidates_examined
        )
    }
}

/// Exponents of x, y, t.
type Xyt = [u16; 3];
type TPoly = HashMap<Xyt, Rat>;

fn xyt_cmp(a: &Xyt, b: &Xyt) -> Ordering {
    let deg = |m: &Xyt| m.iter().map(|&e| e as u32).sum::<u32>();
    deg(a).cmp(&deg(b)).then_with(|| a.cmp(b))
}

fn add_to(p: &mut TPoly, m: Xyt, c: Rat) {
    if c.is_zero() {
        return;
    }
    let entry = p.entry(m).or_insert_with(Rat::zero);
    *entry += c;
    if entry.is_zero() {
        p.remove(&m);
    }
}

fn to_tpoly(p: &PhasePoly, what: &str) -> Result<TPoly, DVarietyError> {
    let mut out = TPoly::new();
    for (m, c) in p.terms() {
        if m.0[2] != 0 || m.0[3] != 0 {
            return Err(DVarietyError::LiftVariables);
        }
        let den = c.denom().as_constant().ok_or_else(|| {
            DVarietyError::UnsupportedCoefficients(format!("{what} has coefficient {c}; clear denominators first"))
        })?;
        for (mono, r) in c.numer().terms() {
            if mono.vars().any(|(v, _)| v != SYM_T) {
                return Err(DVarietyError::UnsupportedCoefficients(format!(
                    "{what} has non-rational coefficient {c}"
                )));
            }
            add_to(&mut out, [m.0[0], m.0[1], mono.exp(SYM_T)], r / &den);
        }
    }
    Ok(out)
}

fn mul(a: &TPoly, b: &TPoly) -> TPoly {
    let mut out = TPoly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            add_to(&mut out, [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]], ca * cb);
        }
    }
    out
}

fn partial(p: &TPoly, k: usize) -> TPoly {
    let mut out = TPoly::new();
    for (m, c) in p {
        if m[k] > 0 {
            let mut n = *m;
            n[k] -= 1;
            add_to(&mut out, n, c * Rat::from_integer(m[k].into()));
        }
    }
    out
}

fn deg_xy(p: &TPoly) -> u32 {
    p.keys().map(|m| m[0] as u32 + m[1] as u32).max().unwrap_or(0)
}

fn deg_t(p: &TPoly) -> u32 {
    p.keys().map(|m| m[2] as u32).max().unwrap_or(0)
}

fn monomials(deg_xy: u32, deg_t: u32, total: Option<u32>) -> Vec<Xyt> {
    let mut out = Vec::new();
    for a in 0..=deg_xy {
        for b in 0..=deg_xy - a {
            for c in 0..=deg_t {
                if total.is_none_or(|d| a + b + c <= d) {
                    out.push([a as u16, b as u16, c as u16]);
                }
            }
        }
    }
    out.sort_by(xyt_cmp);
    out
}

fn format_xyt(m: &Xyt) -> String {
    let mut parts = Vec::new();
    for (name, e) in ["x", "y", "t"].iter().zip(m) {
        match e {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn to_phase(d: &DVectorField, p: &TPoly) -> PhasePoly {
    let table = d.table();
    let mut grouped: BTreeMap<PhaseMono, MPoly> = BTreeMap::new();
    for (m, c) in p {
        grouped
            .entry(PhaseMono::xy(m[0], m[1]))
            .or_default()
            .add_term(Monomial::var(SYM_T, m[2]), c.clone());
    }
    let mut out = PhasePoly::zero(table);
    for (m, c) in grouped {
        out.add_term(m, FieldElem::from_poly(table, c));
    }
    out
}

struct System {
    basis: Vec<Xyt>,
    cofactor_basis: Vec<Xyt>,
    rows: usize,
    /// Column j: D(m_j) as (row, value) pairs.
    image: Vec<Vec<(usize, Rat)>>,
    /// shift[k][j]: row of g_k·m_j.
    shift: Vec<Vec<usize>>,
    image_mod: Vec<u64>,
}

impl System {
    fn build(d: &DVectorField, bounds: &SearchBounds, cofactor_basis: Vec<Xyt>) -> Result<System, DVarietyError> {
        let e = to_tpoly(d.e(), "e")?;
        let f = to_tpoly(d.f(), "f")?;
        let g = to_tpoly(d.g(), "g")?;
        let basis = monomials(bounds.deg_xy, bounds.deg_t, None);
        let mut row_of: HashMap<Xyt, usize> = HashMap::new();
        let mut row = |m: Xyt| {
            let n = row_of.len();
            *row_of.entry(m).or_insert(n)
        };
        let mut image = Vec::with_capacity(basis.len());
        for m in &basis {
            let mono: TPoly = [(*m, Rat::one())].into_iter().collect();
            let mut im = mul(&e, &partial(&mono, 2));
            for (k, c) in mul(&f, &partial(&mono, 1)).into_iter().chain(mul(&g, &partial(&mono, 0))) {
                add_to(&mut im, k, c);
            }
            let mut col: Vec<(usize, Rat)> = im.into_iter().map(|(k, c)| (row(k), c)).collect();
            col.sort_by_key(|(r, _)| *r);
            image.push(col);
        }
        let shift: Vec<Vec<usize>> = cofactor_basis
            .iter()
            .map(|gk| {
                basis
                    .iter()
                    .map(|m| row([gk[0] + m[0], gk[1] + m[1], gk[2] + m[2]]))
                    .collect()
            })
            .collect();
        let rows = row_of.len();
        let cols = basis.len();
        if rows.saturating_mul(cols) > bounds.max_matrix_cells {
            return Err(DVarietyError::BoundsTooLarge(format!(
                "linear system of {rows} x {cols} exceeds {} cells",
                bounds.max_matrix_cells
            )));
        }
        let mut image_mod = vec![0u64; rows * cols];
        for (j, col) in image.iter().enumerate() {
            for (r, c) in col {
                image_mod[r * cols + j] = rat_mod_p(c).ok_or_else(|| {
                    DVarietyError::UnsupportedCoefficients("coefficient denominator divisible by the screening prime".into())
                })?;
            }
        }
        Ok(System {
            basis,
            cofactor_basis,
            rows,
            image,
            shift,
            image_mod,
        })
    }

    fn singular_mod_p(&self, coeffs: &[i64], scratch: &mut Vec<u64>) -> bool {
        let cols = self.basis.len();
        scratch.clear();
        scratch.extend_from_slice(&self.image_mod);
        for (k, &gk) in coeffs.iter().enumerate() {
            if gk == 0 {
                continue;
            }
            let sub = gk.rem_euclid(PRIME as i64) as u64;
            for (j, &r) in self.shift[k].iter().enumerate() {
                let cell = &mut scratch[r * cols + j];
                *cell = (*cell + PRIME - sub) % PRIME;
            }
        }
        !full_column_rank_mod_p(scratch, self.rows, cols)
    }

    fn kernel(&self, coeffs: &[i64]) -> Vec<TPoly> {
        let cols = self.basis.len();
        let mut m = vec![vec![Rat::zero(); cols]; self.rows];
        for (j, col) in self.image.iter().enumerate() {
            for (r, c) in col {
                m[*r][j] = c.clone();
            }
        }
        for (k, &gk) in coeffs.iter().enumerate() {
            for (j, &r) in self.shift[k].iter().enumerate() {
                m[r][j] -= Rat::from_integer(gk.into());
            }
        }
        rational_kernel(&m, cols)
            .into_iter()
            .filter(|v| v.iter().zip(&self.basis).any(|(c, b)| !c.is_zero() && b[0] + b[1] > 0))
            .map(|v| normalize(self.basis.iter().copied().zip(v).filter(|(_, c)| !c.is_zero()).collect()))
            .collect()
    }

    fn cofactor(&self, coeffs: &[i64]) -> TPoly {
        self.cofactor_basis
            .iter()
            .zip(coeffs)
            .filter(|(_, &c)| c != 0)
            .map(|(m, &c)| (*m, Rat::from_integer(c.into())))
            .collect()
    }
}

/// Scales so the grlex-leading coefficient in (x, y, t) is 1.
fn normalize(p: TPoly) -> TPoly {
    let lead = p
        .iter()
        .max_by(|a, b| xyt_cmp(a.0, b.0))
        .map(|(_, c)| c.clone())
        .unwrap_or_else(Rat::one);
    p.into_iter().map(|(m, c)| (m, c / &lead)).collect()
}

fn sort_key(p: &TPoly) -> Vec<(u32, Xyt, Rat)> {
    let mut v: Vec<(u32, Xyt, Rat)> = p
        .iter()
        .map(|(m, c)| (m.iter().map(|&e| e as u32).sum(), *m, c.clone()))
        .collect();
    v.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| b.1.cmp(&a.1)));
    v
}

fn decode(index: u64, width: usize, bx: u32) -> Vec<i64> {
    let base = 2 * bx as u64 + 1;
    let mut rest = index;
    (0..width)
        .map(|_| {
            let digit = rest % base;
            rest /= base;
            digit as i64 - bx as i64
        })
        .collect()
}

fn run(
    d: &DVectorField,
    bounds: &SearchBounds,
    cofactor_basis: Vec<Xyt>,
    cofactor_box: u32,
) -> Result<SearchReport, DVarietyError> {
    let width = cofactor_basis.len();
    let base = 2 * cofactor_box as u64 + 1;
    let candidates = (0..width).try_fold(1u64, |acc, _| acc.checked_mul(base));
    let candidates = match candidates {
        Some(n) if n <= bounds.max_candidates => n,
        _ => {
            return Err(DVarietyError::BoundsTooLarge(format!(
                "{base}^{width} cofactor candidates exceed {}",
                bounds.max_candidates
            )))
        }
    };
    let system = System::build(d, bounds, cofactor_basis)?;
    let hits: Vec<(Vec<i64>, Vec<TPoly>)> = (0..candidates)
        .into_par_iter()
        .map_init(Vec::new, |scratch, i| {
            let coeffs = decode(i, width, cofactor_box);
            if !system.singular_mod_p(&coeffs, scratch) {
                return None;
            }
            let kernel = system.kernel(&coeffs);
            Some((coeffs, kernel))
        })
        .flatten()
        .collect();
    let exact_solves = hits.len() as u64;
    let mut found: Vec<(Vec<(u32, Xyt, Rat)>, TPoly, TPoly)> = Vec::new();
    for (coeffs, kernel) in hits {
        for p in kernel {
            found.push((sort_key(&p), p, system.cofactor(&coeffs)));
        }
    }
    found.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    found.dedup_by(|a, b| a.0 == b.0);
    let mut certificates = Vec::with_capacity(found.len());
    for (_, p, g) in found {
        let p = to_phase(d, &p);
        let cert = verify_darboux(d, &p)?;
        debug_assert_eq!(cert.cofactor(), &to_phase(d, &g));
        certificates.push(cert);
    }
    Ok(SearchReport {
        certificates,
        bounds: bounds.clone(),
        cofactor_monomials: system.cofactor_basis.iter().map(format_xyt).collect(),
        candidates_examined: candidates,
        exact_solves,
    })
}

/// Darboux polynomials of bounded degree whose cofactors have integer
/// coefficients in the box. An empty result means only that no invariant
/// was found within the bounds.
pub fn darboux_search(d: &DVectorField, bounds: &SearchBounds) -> Result<SearchReport, DVarietyError> {
    let comps = [to_tpoly(d.e(), "e")?, to_tpoly(d.f(), "f")?, to_tpoly(d.g(), "g")?];
    let cxy = deg_xy(&comps[1]).max(deg_xy(&comps[2])).saturating_sub(1);
    let ct = comps.iter().map(deg_t).max().unwrap_or(0);
    let cofactor_basis = monomials(cxy, ct, bounds.cofactor_deg);
    run(d, bounds, cofactor_basis, bounds.cofactor_box)
}

/// Polynomial first integrals (cofactor 0) within the degree bounds.
pub fn first_integral_search(d: &DVectorField, bounds: &SearchBounds) -> Result<Vec<PhasePoly>, DVarietyError> {
    let report = run(d, bounds, Vec::new(), 0)?;
    Ok(report.certificates.into_iter().map(|c| c.p().clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{parse_phase, SymbolTable};

    fn s2(alpha: &str) -> DVectorField {
        let tb = SymbolTable::plain();
        DVectorField::from_system(
            parse_phase("x - y^2 - t/2", &tb).unwrap(),
            parse_phase(&format!("2*x*y + ({alpha}) + 1/2"), &tb).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn finds_x_for_minus_half() {
        let report = darboux_search(&s2("-1/2"), &SearchBounds::new(1, 0, 3)).unwrap();
        let ps: Vec<String> = report.certificates.iter().map(|c| c.p().to_string()).collect();
        assert_eq!(ps, vec!["x"]);
        assert_eq!(report.certificates[0].cofactor().to_string(), "2*y");
    }

    #[test]
    fn first_integrals_of_pure_time_flow() {
        let tb = SymbolTable::plain();
        let zero = PhasePoly::zero(&tb);
        let d = DVectorField::from_system(zero.clone(), zero).unwrap();
        let found: Vec<String> = first_integral_search(&d, &SearchBounds::new(1, 0, 0))
            .unwrap()
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(found, vec!["y", "x"]);
        assert!(first_integral_search(&d, &SearchBounds::new(0, 0, 0)).unwrap().is_empty());
    }

    #[test]
    fn rejects_rational_time_coefficients() {
        let tb = SymbolTable::plain();
        let d = DVectorField::from_system(parse_phase("x/t", &tb).unwrap(), parse_phase("y", &tb).unwrap()).unwrap();
        assert!(matches!(
            darboux_search(&d, &SearchBounds::new(1, 0, 1)),
            Err(DVarietyError::UnsupportedCoefficients(_))
        ));
    }

    #[test]
    fn caps_are_enforced() {
        let mut b = SearchBounds::new(2, 1, 3);
        b.max_candidates = 10;
        assert!(matches!(darboux_search(&s2("0"), &b), Err(DVarietyError::BoundsTooLarge(_))));
    }
}
