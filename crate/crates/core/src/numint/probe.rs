//! Singular-value probe for polynomial relations among sampled values.
//!
//! This is falsification-style evidence only. A small singular value says
//! the samples are close to a relation at this resolution; a large one says
//! no relation of the tested shape fits them. Neither proves anything about
//! algebraic (in)dependence.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{NumintError, Sample, Trajectory};

/// Default smallest-singular-value threshold.
pub const DEFAULT_THRESHOLD: f64 = 1e-6;

/// Monomials over the probe variables `t, y1, yp1, y2, yp2, ...` (for one
/// trajectory the names are `t, y, yp`).
#[derive(Clone, Debug, PartialEq)]
pub enum ProbeBasis {
    TotalDegree(u32),
    /// Exponent vectors in variable order.
    Explicit(Vec<Vec<u16>>),
}

impl ProbeBasis {
    /// Parses monomials such as `"1, t, y, y^2, yp"`.
    pub fn parse(text: &str, trajectories: usize) -> Result<ProbeBasis, NumintError> {
        let names = variable_names(trajectories);
        let mut out = Vec::new();
        for mono in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let mut e = vec![0u16; names.len()];
            for factor in mono.split('*').map(str::trim) {
                if factor == "1" {
                    continue;
                }
                let (name, pow) = match factor.split_once('^') {
                    Some((n, p)) => (
                        n.trim(),
                        p.trim()
                            .parse::<u16>()
                            .map_err(|_| NumintError::Probe(format!("bad exponent in {factor:?}")))?,
                    ),
                    None => (factor, 1),
                };
                let i = names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| NumintError::Probe(format!("unknown probe variable {name:?}")))?;
                e[i] += pow;
            }
            out.push(e);
        }
        if out.is_empty() {
            return Err(NumintError::Probe("empty monomial basis".into()));
        }
        Ok(ProbeBasis::Explicit(out))
    }

    fn monomials(&self, nvars: usize) -> Result<Vec<Vec<u16>>, NumintError> {
        match self {
            ProbeBasis::TotalDegree(d) => {
                if *d == 0 {
                    return Err(NumintError::Probe("degree must be at least 1".into()));
                }
                let mut out = Vec::new();
                for total in 0..=*d {
                    exponents_of_degree(nvars, total as u16, &mut vec![0; nvars], 0, &mut out);
                }
                Ok(out)
            }
            ProbeBasis::Explicit(v) => {
                if v.iter().any(|e| e.len() != nvars) {
                    return Err(NumintError::Probe("monomial length does not match the variables".into()));
                }
                Ok(v.clone())
            }
        }
    }
}

fn exponents_of_degree(n: usize, left: u16, cur: &mut Vec<u16>, i: usize, out: &mut Vec<Vec<u16>>) {
    if i + 1 == n {
        cur[i] = left;
        out.push(cur.clone());
        cur[i] = 0;
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e;
        exponents_of_degree(n, left - e, cur, i + 1, out);
    }
    cur[i] = 0;
}

fn variable_names(trajectories: usize) -> Vec<String> {
    let mut v = vec!["t".to_string()];
    if trajectories == 1 {
        v.push("y".into());
        v.push("yp".into());
    } else {
        for i in 1..=trajectories {
            v.push(format!("y{i}"));
            v.push(format!("yp{i}"));
        }
    }
    v
}

fn monomial_name(names: &[String], e: &[u16]) -> String {
    let parts: Vec<String> = names
        .iter()
        .zip(e)
        .filter(|(_, &k)| k > 0)
        .map(|(n, &k)| if k == 1 { n.clone() } else { format!("{n}^{k}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProbeVerdict {
    NoRelationFound,
    CandidateRelation,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationProbeResult {
    pub variables: Vec<String>,
    pub basis: Vec<String>,
    pub rows: usize,
    /// With unit-norm columns; NaN when degenerate.
    pub smallest_singular_value: f64,
    pub threshold: f64,
    /// Relation coefficients in the original (unscaled) basis, largest
    /// entry normalized to 1; present only for CandidateRelation.
    pub coefficients: Option<Vec<Complex64>>,
    pub verdict: ProbeVerdict,
}

/// Cubic Hermite interpolation of (y, x) at path length `arc`, with y′
/// taken from the interpolant's derivative.
fn interpolate(tr: &Trajectory, arc: f64) -> Option<Sample> {
    let s = &tr.samples;
    let k = s.windows(2).position(|w| w[0].arc <= arc && arc <= w[1].arc)?;
    let (a, b) = (&s[k], &s[k + 1]);
    let span = b.arc - a.arc;
    if span == 0.0 {
        return Some(*a);
    }
    let u = (arc - a.arc) / span;
    let h = b.t - a.t;
    let (h00, h10, h01, h11) = (
        2.0 * u.powi(3) - 3.0 * u * u + 1.0,
        u.powi(3) - 2.0 * u * u + u,
        -2.0 * u.powi(3) + 3.0 * u * u,
        u.powi(3) - u * u,
    );
    let (d00, d10, d01, d11) = (6.0 * u * u - 6.0 * u, 3.0 * u * u - 4.0 * u + 1.0, -6.0 * u * u + 6.0 * u, 3.0 * u * u - 2.0 * u);
    let y = a.y * h00 + h * a.dy * h10 + b.y * h01 + h * b.dy * h11;
    let x = a.x * h00 + h * a.dx * h10 + b.x * h01 + h * b.dx * h11;
    let dy = (a.y * d00 + h * a.dy * d10 + b.y * d01 + h * b.dy * d11) / h;
    let dx = (a.x * d00 + h * a.dx * d10 + b.x * d01 + h * b.dx * d11) / h;
    Some(Sample {
        t: a.t + h * u,
        y,
        x,
        dy,
        dx,
        arc,
    })
}

/// Rows of (t, y_i, y_i′) on a shared grid: the first trajectory's samples
/// inside every trajectory's range.
fn shared_rows(trajectories: &[Trajectory]) -> Vec<Vec<Complex64>> {
    let first = &trajectories[0];
    let mut rows = Vec::new();
    'grid: for s in &first.samples {
        let mut row = vec![s.t, s.y, s.dy];
        for other in &trajectories[1..] {
            match interpolate(other, s.arc) {
                Some(o) => {
                    row.push(o.y);
                    row.push(o.dy);
                }
                None => continue 'grid,
            }
        }
        rows.push(row);
    }
    rows
}

/// Tests whether the samples satisfy a polynomial relation in the basis.
pub fn relation_probe(
    trajectories: &[Trajectory],
    basis: &ProbeBasis,
    threshold: f64,
) -> Result<RelationProbeResult, NumintError> {
    if trajectories.is_empty() {
        return Err(NumintError::Probe("no trajectories".into()));
    }
    let names = variable_names(trajectories.len());
    let monos = basis.monomials(names.len())?;
    let rows = shared_rows(trajectories);
    let mut result = RelationProbeResult {
        variables: names.clone(),
        basis: monos.iter().map(|e| monomial_name(&names, e)).collect(),
        rows: rows.len(),
        smallest_singular_value: f64::NAN,
        threshold,
        coefficients: None,
        verdict: ProbeVerdict::Degenerate,
    };
    let constant = (0..names.len()).all(|v| {
        rows.iter().all(|r| {
            let r0 = rows[0][v];
            (r[v] - r0).norm() <= 1e-12 * (1.0 + r0.norm())
        })
    });
    if rows.is_empty() || constant {
        return Ok(result);
    }
    if rows.len() < 2 * monos.len() {
        return Err(NumintError::Probe(format!(
            "{} samples for {} monomials; need at least twice as many",
            rows.len(),
            monos.len()
        )));
    }
    let mut m = DMatrix::<Complex64>::from_fn(rows.len(), monos.len(), |i, j| {
        rows[i]
            .iter()
            .zip(&monos[j])
            .fold(Complex64::new(1.0, 0.0), |acc, (v, &e)| acc * v.powu(e as u32))
    });
    let mut norms = Vec::with_capacity(monos.len());
    for j in 0..monos.len() {
        let n = m.column(j).norm();
        let n = if n > 0.0 { n } else { 1.0 };
        m.column_mut(j).unscale_mut(n);
        norms.push(n);
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^H");
    let (imin, smin) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, s)| if s < best.1 { (i, s) } else { best });
    result.smallest_singular_value = smin;
    if smin < threshold {
        let mut c: Vec<Complex64> = (0..monos.len()).map(|j| v_t[(imin, j)].conj() / norms[j]).collect();
        let lead = c.iter().copied().fold(Complex64::new(0.0, 0.0), |a, b| if b.norm() > a.norm() { b } else { a });
        for z in &mut c {
            *z /= lead;
        }
        result.coefficients = Some(c);
        result.verdict = ProbeVerdict::CandidateRelation;
    } else {
        result.verdict = ProbeVerdict::NoRelationFound;
    }
    Ok(result)
}
