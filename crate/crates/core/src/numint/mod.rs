//! Numerical integration of the catalog systems along polylines in the
//! complex t-plane, drift of candidate invariant curves along trajectories,
//! and a singular-value probe for polynomial relations among samples.
//!
//! Everything here is floating point and heuristic. Exact statements live in
//! the other modules.

mod probe;

use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::catalog::{FamilyTag, PainleveInstance};
use crate::exactfield::{FieldElem, MPoly, PhasePoly, SymbolKind, SymbolTable, SYM_T, SYM_X, SYM_Y, SYM_YP};

pub use probe::{relation_probe, ProbeBasis, ProbeVerdict, RelationProbeResult, DEFAULT_THRESHOLD};

/// Default blow-up threshold on |y| or |x| for pole detection.
pub const BLOW_UP: f64 = 1e8;
/// Default step floor in path-length units for pole detection.
pub const STEP_FLOOR: f64 = 1e-12;
const MAX_STEPS: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum NumintError {
    #[error("path passes through the fixed singularity t = {0}")]
    FixedSingularity(f64),
    #[error("consecutive waypoints {0} and {1} coincide")]
    RepeatedWaypoint(usize, usize),
    #[error("path is empty")]
    EmptyPath,
    #[error("initial time {0} is not the first waypoint {1}")]
    InitialTimeMismatch(Complex64, Complex64),
    #[error("symbol {0} has no numeric value")]
    NonNumeric(String),
    #[error("expression uses coordinate {0}, which is not a phase variable here")]
    UnexpectedCoordinate(String),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("instance {0} has no equation to integrate")]
    NoEquation(FamilyTag),
    #[error("step limit of {0} reached")]
    StepLimit(usize),
    #[error("cannot parse complex number {0:?}")]
    BadComplex(String),
    #[error("{0}")]
    Probe(String),
}

/// Parses `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(text: &str) -> Result<Complex64, NumintError> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    Complex64::from_str(&cleaned).map_err(|_| NumintError::BadComplex(text.to_string()))
}

/// A polyline through complex waypoints.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    waypoints: Vec<Complex64>,
}

impl PathSpec {
    pub fn new(waypoints: Vec<Complex64>) -> Result<PathSpec, NumintError> {
        if waypoints.is_empty() {
            return Err(NumintError::EmptyPath);
        }
        for (i, w) in waypoints.windows(2).enumerate() {
            if w[0] == w[1] {
                return Err(NumintError::RepeatedWaypoint(i, i + 1));
            }
        }
        Ok(PathSpec { waypoints })
    }

    /// Comma-separated complex waypoints, e.g. `"1, 2+0.5i, 3"`.
    pub fn parse(text: &str) -> Result<PathSpec, NumintError> {
        let pts = text
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(parse_complex)
            .collect::<Result<Vec<_>, _>>()?;
        PathSpec::new(pts)
    }

    pub fn real(points: &[f64]) -> Result<PathSpec, NumintError> {
        PathSpec::new(points.iter().map(|&p| Complex64::new(p, 0.0)).collect())
    }

    pub fn waypoints(&self) -> &[Complex64] {
        &self.waypoints
    }

    /// Rejects paths that meet any of the given singular points.
    pub fn check_avoids(&self, singular: &[f64]) -> Result<(), NumintError> {
        for &s in singular {
            let p = Complex64::new(s, 0.0);
            let hit = self.waypoints.iter().any(|w| (w - p).norm() < 1e-14)
                || self.waypoints.windows(2).any(|w| distance_to_segment(p, w[0], w[1]) < 1e-14);
            if hit {
                return Err(NumintError::FixedSingularity(s));
            }
        }
        Ok(())
    }
}

fn distance_to_segment(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let u = ((p - a) * d.conj()).re / d.norm_sqr();
    (a + d * u.clamp(0.0, 1.0) - p).norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub t: Complex64,
    pub y: Complex64,
    pub x: Complex64,
    /// y′ from the right-hand side at this sample.
    pub dy: Complex64,
    /// x′ from the right-hand side at this sample.
    pub dx: Complex64,
    /// Path length from the start.
    pub arc: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TrajectoryStatus {
    Completed,
    PoleDetected { t_estimate: Complex64 },
    /// The right-hand side stopped being finite away from a blow-up.
    SingularityAborted { t: Complex64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub status: TrajectoryStatus,
    pub tol: f64,
}

impl Trajectory {
    /// A trajectory assembled from given samples, e.g. synthetic data.
    pub fn from_samples(samples: Vec<Sample>, tol: f64) -> Trajectory {
        Trajectory {
            samples,
            status: TrajectoryStatus::Completed,
            tol,
        }
    }

    pub fn is_completed(&self) -> bool {
        self.status == TrajectoryStatus::Completed
    }

    /// CSV with header `t_re,t_im,y_re,y_im,x_re,x_im`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t_re,t_im,y_re,y_im,x_re,x_im")?;
        for s in &self.samples {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.t.re, s.t.im, s.y.re, s.y.im, s.x.re, s.x.im
            )?;
        }
        Ok(())
    }
}

/// A rational function of (t, y, w) with parameters evaluated numerically.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    num: Vec<(Complex64, [u16; 3])>,
    den: Vec<(Complex64, [u16; 3])>,
}

fn param_value(table: &Arc<SymbolTable>, i: usize, cache: &mut Vec<Option<Complex64>>) -> Result<Complex64, NumintError> {
    if let Some(v) = cache[i] {
        return Ok(v);
    }
    let v = match table.kind(i) {
        SymbolKind::Radical { num, den } => {
            let n = eval_constant(table, num, cache)?;
            let d = eval_constant(table, den, cache)?;
            (n / d).sqrt()
        }
        SymbolKind::IndependentVariable | SymbolKind::Coordinate => {
            return Err(NumintError::UnexpectedCoordinate(table.name(i).to_string()))
        }
        _ => return Err(NumintError::NonNumeric(table.name(i).to_string())),
    };
    cache[i] = Some(v);
    Ok(v)
}

fn eval_constant(table: &Arc<SymbolTable>, p: &MPoly, cache: &mut Vec<Option<Complex64>>) -> Result<Complex64, NumintError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, c) in p.terms() {
        let mut term = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
        for (i, e) in m.vars() {
            term *= param_value(table, i, cache)?.powu(e as u32);
        }
        acc += term;
    }
    Ok(acc)
}

fn compile_poly(
    table: &Arc<SymbolTable>,
    p: &MPoly,
    w: usize,
    cache: &mut Vec<Option<Complex64>>,
) -> Result<Vec<(Complex64, [u16; 3])>, NumintError> {
    let mut out = Vec::with_capacity(p.num_terms());
    for (m, c) in p.terms() {
        let mut coeff = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
        let mut exps = [0u16; 3];
        for (i, e) in m.vars() {
            match i {
                SYM_T => exps[0] = e,
                SYM_Y => exps[1] = e,
                _ if i == w => exps[2] = e,
                _ => coeff *= param_value(table, i, cache)?.powu(e as u32),
            }
        }
        out.push((coeff, exps));
    }
    Ok(out)
}

impl Compiled {
    /// `w` is the symbol playing the second phase variable (x or yp).
    pub(crate) fn new(f: &FieldElem, w: usize) -> Result<Compiled, NumintError> {
        let table = f.table();
        let mut cache = vec![None; table.len()];
        Ok(Compiled {
            num: compile_poly(table, f.numer(), w, &mut cache)?,
            den: compile_poly(table, f.denom(), w, &mut cache)?,
        })
    }

    pub(crate) fn from_phase(p: &PhasePoly) -> Result<Compiled, NumintError> {
        Compiled::new(&p.to_field(), SYM_X)
    }

    fn eval_terms(terms: &[(Complex64, [u16; 3])], v: [Complex64; 3]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, e) in terms {
            let mut term = *c;
            for k in 0..3 {
                if e[k] > 0 {
                    term *= v[k].powu(e[k] as u32);
                }
            }
            acc += term;
        }
        acc
    }

    pub(crate) fn eval(&self, t: Complex64, y: Complex64, w: Complex64) -> Complex64 {
        let v = [t, y, w];
        Self::eval_terms(&self.num, v) / Self::eval_terms(&self.den, v)
    }
}

/// The numeric vector field (y′, w′) of an instance.
#[derive(Clone, Debug)]
pub(crate) struct NumericField {
    fy: Compiled,
    fw: Compiled,
}

impl NumericField {
    pub(crate) fn of(instance: &PainleveInstance) -> Result<NumericField, NumintError> {
        if let Some((f, g)) = &instance.system {
            return Ok(NumericField {
                fy: Compiled::from_phase(f)?,
                fw: Compiled::from_phase(g)?,
            });
        }
        if let Some(r) = &instance.second_order {
            let yp = FieldElem::symbol_index(instance.table(), SYM_YP);
            return Ok(NumericField {
                fy: Compiled::new(&yp, SYM_YP)?,
                fw: Compiled::new(r, SYM_YP)?,
            });
        }
        Err(NumintError::NoEquation(instance.family))
    }

    fn eval(&self, t: Complex64, z: [Complex64; 2]) -> [Complex64; 2] {
        [self.fy.eval(t, z[0], z[1]), self.fw.eval(t, z[0], z[1])]
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn finite(z: &[Complex64; 2]) -> bool {
    z.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// One DP5(4) step of real length `h` along unit direction `dir`.
/// Returns (5th-order state, error estimate).
fn dp_step(field: &NumericField, t: Complex64, z: [Complex64; 2], h: f64, dir: Complex64) -> ([Complex64; 2], f64) {
    let mut k = [[Complex64::new(0.0, 0.0); 2]; 7];
    for s in 0..7 {
        let mut zs = z;
        for (j, kj) in k.iter().enumerate().take(s) {
            for c in 0..2 {
                zs[c] += kj[c] * (A[s][j] * h);
            }
        }
        let f = field.eval(t + dir * (C[s] * h), zs);
        k[s] = [f[0] * dir, f[1] * dir];
    }
    let mut z5 = z;
    let mut err = 0.0f64;
    for c in 0..2 {
        let mut e = Complex64::new(0.0, 0.0);
        for s in 0..7 {
            z5[c] += k[s][c] * (B5[s] * h);
            e += k[s][c] * ((B5[s] - B4[s]) * h);
        }
        err = err.max(e.norm());
    }
    (z5, err)
}

fn sample(field: &NumericField, t: Complex64, z: [Complex64; 2], arc: f64) -> Sample {
    let d = field.eval(t, z);
    Sample {
        t,
        y: z[0],
        x: z[1],
        dy: d[0],
        dx: d[1],
        arc,
    }
}

/// Integrates along the path with an embedded Dormand–Prince 5(4) pair.
///
/// A step is accepted when its error estimate is at most
/// `tol · (1 + |state|)`. For second-order-only instances the second
/// coordinate is y′. Deterministic: no randomness, fixed operation order.
pub fn integrate(
    instance: &PainleveInstance,
    initial: (Complex64, Complex64, Complex64),
    path: &PathSpec,
    tol: f64,
) -> Result<Trajectory, NumintError> {
    if !(tol > 0.0) {
        return Err(NumintError::BadTolerance(tol));
    }
    path.check_avoids(instance.family.fixed_singularities())?;
    let (t0, y0, x0) = initial;
    let first = path.waypoints[0];
    if (t0 - first).norm() > 1e-14 {
        return Err(NumintError::InitialTimeMismatch(t0, first));
    }
    let field = NumericField::of(instance)?;
    let mut z = [y0, x0];
    let mut samples = vec![sample(&field, first, z, 0.0)];
    let mut arc_base = 0.0;
    let mut h = f64::NAN;
    let mut steps = 0usize;
    for seg in path.waypoints.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let len = (b - a).norm();
        let dir = (b - a) / len;
        if h.is_nan() {
            h = (len * 1e-2).min(1e-2);
        }
        let mut pos = 0.0;
        while pos < len {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(NumintError::StepLimit(MAX_STEPS));
            }
            let last = pos + h >= len;
            let step = if last { len - pos } else { h };
            let t = a + dir * pos;
            let (z_new, err) = dp_step(&field, t, z, step, dir);
            let size = z[0].norm().max(z[1].norm());
            let scale = tol * (1.0 + size.max(z_new[0].norm().max(z_new[1].norm())));
            let ok = finite(&z_new) && err.is_finite();
            if ok && err <= scale {
                pos = if last { len } else { pos + step };
                z = z_new;
                let t_here = if last { b } else { a + dir * pos };
                let s = sample(&field, t_here, z, arc_base + pos);
                samples.push(s);
                if !finite(&[s.dy, s.dx]) {
                    return Ok(finish(samples, TrajectoryStatus::SingularityAborted { t: t_here }, tol));
                }
            }
            let factor = if ok && err > 0.0 {
                (0.9 * (scale / err).powf(0.2)).clamp(0.2, 5.0)
            } else if ok {
                5.0
            } else {
                0.2
            };
            if !(ok && err <= scale && last) {
                h = step * factor;
            }
            if h < STEP_FLOOR {
                let t_here = a + dir * pos;
                let status = if size > BLOW_UP || !ok {
                    TrajectoryStatus::PoleDetected { t_estimate: t_here }
                } else {
                    TrajectoryStatus::SingularityAborted { t: t_here }
                };
                return Ok(finish(samples, status, tol));
            }
        }
        arc_base += len;
    }
    Ok(finish(samples, TrajectoryStatus::Completed, tol))
}

fn finish(samples: Vec<Sample>, status: TrajectoryStatus, tol: f64) -> Trajectory {
    Trajectory { samples, status, tol }
}

/// Largest |P(t, y, x)| over the samples.
pub fn invariant_drift(traj: &Trajectory, p: &PhasePoly) -> Result<f64, NumintError> {
    let c = Compiled::from_phase(p)?;
    Ok(traj
        .samples
        .iter()
        .map(|s| c.eval(s.t, s.y, s.x).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{instantiate, ParamAssignment};
    use crate::exactfield::parse_phase;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn s2(alpha: &str) -> PainleveInstance {
        instantiate(FamilyTag::S2, &ParamAssignment::from_specs(&[("alpha", alpha)]).unwrap()).unwrap()
    }

    #[test]
    fn parses_paths() {
        let p = PathSpec::parse("1, 2+0.5i,-1-2i, 3i").unwrap();
        assert_eq!(p.waypoints()[1], Complex64::new(2.0, 0.5));
        assert_eq!(p.waypoints()[2], Complex64::new(-1.0, -2.0));
        assert_eq!(p.waypoints()[3], Complex64::new(0.0, 3.0));
        assert!(PathSpec::parse("1,1").is_err());
        assert!(PathSpec::parse("1,zz").is_err());
    }

    #[test]
    fn on_curve_trajectory_stays_on_curve() {
        let inst = s2("-1/2");
        let path = PathSpec::real(&[1.0, 2.0]).unwrap();
        let tr = integrate(&inst, (c(1.0), c(0.3), c(0.0)), &path, 1e-10).unwrap();
        assert!(tr.is_completed());
        assert_eq!(tr.samples.last().unwrap().t, c(2.0));
        let x = parse_phase("x", inst.table()).unwrap();
        assert!(invariant_drift(&tr, &x).unwrap() < 1e-8);
        let y = parse_phase("y", inst.table()).unwrap();
        assert!(invariant_drift(&tr, &y).unwrap() > 0.1);
    }

    #[test]
    fn riccati_solution_is_accurate() {
        // coarse against fine run
        let inst = s2("-1/2");
        let path = PathSpec::real(&[1.0, 2.0]).unwrap();
        let coarse = integrate(&inst, (c(1.0), c(0.3), c(0.0)), &path, 1e-8).unwrap();
        let fine = integrate(&inst, (c(1.0), c(0.3), c(0.0)), &path, 1e-13).unwrap();
        let a = coarse.samples.last().unwrap().y;
        let b = fine.samples.last().unwrap().y;
        assert!((a - b).norm() < 1e-6);
    }

    #[test]
    fn p1_reaches_a_pole() {
        let inst = instantiate(FamilyTag::P1, &ParamAssignment::from_specs::<&str>(&[]).unwrap()).unwrap();
        let path = PathSpec::real(&[0.0, 5.0]).unwrap();
        let tr = integrate(&inst, (c(0.0), c(1.0), c(1.0)), &path, 1e-10).unwrap();
        assert!(matches!(tr.status, TrajectoryStatus::PoleDetected { .. }), "{:?}", tr.status);
    }

    #[test]
    fn zero_length_path() {
        let inst = s2("0");
        let path = PathSpec::real(&[1.0]).unwrap();
        let tr = integrate(&inst, (c(1.0), c(0.5), c(0.25)), &path, 1e-8).unwrap();
        assert!(tr.is_completed());
        assert_eq!(tr.samples.len(), 1);
        let p = parse_phase("x + 1", inst.table()).unwrap();
        assert_eq!(invariant_drift(&tr, &p).unwrap(), 1.25);
    }

    #[test]
    fn rejects_fixed_singularity_and_symbols() {
        let inst = instantiate(
            FamilyTag::S3prime,
            &ParamAssignment::from_specs(&[("v1", "1/3"), ("v2", "1/5")]).unwrap(),
        )
        .unwrap();
        let path = PathSpec::real(&[-1.0, 1.0]).unwrap();
        assert_eq!(
            integrate(&inst, (c(-1.0), c(1.0), c(1.0)), &path, 1e-8).unwrap_err(),
            NumintError::FixedSingularity(0.0)
        );
        let sym = s2("sym:a");
        let path = PathSpec::real(&[1.0, 2.0]).unwrap();
        assert!(matches!(
            integrate(&sym, (c(1.0), c(1.0), c(1.0)), &path, 1e-8),
            Err(NumintError::NonNumeric(_))
        ));
    }

    #[test]
    fn deterministic_and_csv() {
        let inst = s2("1/3");
        let path = PathSpec::parse("1, 1.5+0.5i, 2").unwrap();
        let a = integrate(&inst, (c(1.0), c(0.2), c(0.1)), &path, 1e-9).unwrap();
        let b = integrate(&inst, (c(1.0), c(0.2), c(0.1)), &path, 1e-9).unwrap();
        assert_eq!(a, b);
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t_re,t_im,y_re,y_im,x_re,x_im");
        assert_eq!(lines.count(), a.samples.len());
    }

    #[test]
    fn probe_on_integrated_trajectories() {
        let inst = s2("-1/2");
        let path = PathSpec::real(&[1.0, 2.0]).unwrap();
        let tr = integrate(&inst, (c(1.0), c(0.3), c(0.0)), &path, 1e-10).unwrap();
        let basis = ProbeBasis::parse("1, t, y, y^2, yp", 1).unwrap();
        let r = relation_probe(&[tr], &basis, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(r.verdict, ProbeVerdict::CandidateRelation);
        let coeffs = r.coefficients.unwrap();
        for (a, b) in coeffs.iter().zip([0.0, 0.5, 0.0, 1.0, 1.0]) {
            assert!((a - b).norm() < 1e-8);
        }

        let p1 = instantiate(FamilyTag::P1, &ParamAssignment::from_specs::<&str>(&[]).unwrap()).unwrap();
        let path = PathSpec::parse("0, 1, 1+1i, -1+1i, -1-1i, 1-1i").unwrap();
        let tr = integrate(&p1, (c(0.0), c(1.0), c(1.0)), &path, 1e-10).unwrap();
        assert!(tr.is_completed());
        let r = relation_probe(&[tr], &ProbeBasis::TotalDegree(2), DEFAULT_THRESHOLD).unwrap();
        assert_eq!(r.verdict, ProbeVerdict::NoRelationFound);
    }
}
