//! Acceptance checks 1-10, one PASS/FAIL line each with the elapsed time
//! against its budget. Runs without the libtest harness so the lines are
//! always printed.
//!
//! Criterion 5 asks for a Match under μ² = 1/(γδ). That relation yields
//! δ′ = 1/4 rather than −4, so the check is run as stated and is expected
//! to FAIL; the run reports an error only if it unexpectedly passes or if
//! any other criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{assignment, exceptional, grid, proportional, small_field_elem, small_phase_poly, small_table};
use num_complex::Complex64;
use painleve_core::catalog::{classify, instantiate, FamilyTag, ParamAssignment, Verdict};
use painleve_core::dvariety::{darboux_search, tangent_lift, verify_darboux, DVectorField, DarbouxCertificate, SearchBounds};
use painleve_core::exactfield::{parse_field, parse_phase, PhasePoly, SymbolTable};
use painleve_core::numint::{
    integrate, invariant_drift, relation_probe, PathSpec, ProbeBasis, ProbeVerdict, Sample, Trajectory,
};
use painleve_core::transforms::{hamiltonian_check, maps, verify_transform, Convention};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Criteria that cannot hold as stated; see the module comment.
const UNATTAINABLE: &[u32] = &[5];

type Check = Result<String, String>;

fn params(specs: &[(&str, &str)]) -> ParamAssignment {
    ParamAssignment::from_specs(specs).unwrap()
}

fn s2_field(alpha: &str) -> DVectorField {
    instantiate(FamilyTag::S2, &params(&[("alpha", alpha)]))
        .unwrap()
        .derivation
        .unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn criterion1() -> Check {
    let p = params(&[("alpha", "sym:alpha")]);
    let src = instantiate(FamilyTag::P2, &p).map_err(|e| e.to_string())?;
    let dst = instantiate(FamilyTag::S2, &p).map_err(|e| e.to_string())?;
    let map = maps::p2_to_s2(p.table()).map_err(|e| e.to_string())?;
    let r = verify_transform(&src, &map, &dst).map_err(|e| e.to_string())?;
    ensure(r.is_match() && r.residuals.iter().all(|x| x.value.is_zero()), format!("{r:?}"))?;
    Ok("P2(alpha) -> S2(alpha) via x = y' + y^2 + t/2: Match, residuals 0".into())
}

fn criterion2() -> Check {
    let start = Instant::now();
    let d = s2_field("-1/2");
    let c = verify_darboux(&d, &parse_phase("x", d.table()).unwrap()).map_err(|e| e.to_string())?;
    ensure(c.cofactor() == &parse_phase("2*y", d.table()).unwrap(), format!("cofactor {}", c.cofactor()))?;
    let first = start.elapsed();
    let start = Instant::now();
    let d = s2_field("1/2");
    let c = verify_darboux(&d, &parse_phase("x - 2*y^2 - t", d.table()).unwrap()).map_err(|e| e.to_string())?;
    ensure(c.cofactor() == &parse_phase("-2*y", d.table()).unwrap(), format!("cofactor {}", c.cofactor()))?;
    let second = start.elapsed();
    ensure(first < Duration::from_secs(1) && second < Duration::from_secs(1), "over 1 s")?;
    Ok(format!(
        "x | 2*y at alpha=-1/2 ({:.3}s); x - 2y^2 - t | -2*y at alpha=1/2 ({:.3}s)",
        first.as_secs_f64(),
        second.as_secs_f64()
    ))
}

fn criterion3(found: &mut Vec<(DVectorField, DarbouxCertificate)>) -> Check {
    let bounds = SearchBounds::new(2, 1, 3);
    let cases = [("-1/2", Some(("x", "2*y"))), ("1/2", Some(("x - 2*y^2 - t", "-2*y"))), ("1/3", None)];
    let mut notes = Vec::new();
    for (alpha, expect) in cases {
        let d = s2_field(alpha);
        let report = darboux_search(&d, &bounds).map_err(|e| e.to_string())?;
        match expect {
            Some((p, g)) => {
                let p = parse_phase(p, d.table()).unwrap();
                let g = parse_phase(g, d.table()).unwrap();
                let hit = report
                    .certificates
                    .iter()
                    .any(|c| proportional(c.p(), &p) && c.cofactor() == &g);
                ensure(hit, format!("alpha={alpha}: {}", report.summary()))?;
            }
            None => ensure(report.certificates.is_empty(), format!("alpha={alpha}: {}", report.summary()))?,
        }
        notes.push(format!("alpha={alpha}: {}", report.certificates.len()));
        for c in report.certificates {
            found.push((d.clone(), c));
        }
    }
    Ok(format!("certificates found per case [{}]", notes.join(", ")))
}

fn criterion4() -> Check {
    let mut total = 0;
    let mut exceptional_points = 0;
    for family in FamilyTag::ALL {
        let pts = grid(family);
        ensure(family == FamilyTag::P1 || pts.len() >= 20, format!("{family}: grid too small"))?;
        for p in &pts {
            let expect_special = exceptional(family, p);
            let r = classify(family, &assignment(family, p)).map_err(|e| format!("{family} {p:?}: {e}"))?;
            let want = if expect_special {
                Verdict::NotStronglyMinimal
            } else {
                Verdict::StronglyMinimal
            };
            ensure(r.verdict == want, format!("{family} at {p:?}: got {:?}, oracle {want:?}", r.verdict))?;
            ensure(expect_special == !r.witnesses.is_empty(), format!("{family} at {p:?}: witnesses"))?;
            total += 1;
            exceptional_points += expect_special as usize;
        }
    }
    Ok(format!(
        "{total} points over {} families agree with the oracle ({exceptional_points} exceptional)",
        FamilyTag::ALL.len()
    ))
}

fn criterion5() -> Check {
    let p = params(&[("alpha", "sym:a"), ("beta", "sym:b"), ("gamma", "sym:c"), ("delta", "sym:d")]);
    let setup = maps::p3prime_scaling_setup(&p, maps::MuRelation::Printed).map_err(|e| e.to_string())?;
    let src = instantiate(FamilyTag::P3prime, &setup.source_params).map_err(|e| e.to_string())?;
    let dst = instantiate(FamilyTag::P3prime, &setup.target_params).map_err(|e| e.to_string())?;
    let r = verify_transform(&src, &setup.map, &dst).map_err(|e| e.to_string())?;
    let rels: Vec<String> = setup.relations.iter().map(|r| r.to_string()).collect();
    if r.is_match() {
        return Ok(format!("Match with {}", rels.join(", ")));
    }
    let res: Vec<String> = r.residuals.iter().map(|x| format!("{}: {}", x.component, x.value)).collect();
    let fixed = maps::p3prime_scaling_setup(&p, maps::MuRelation::Normalizing).map_err(|e| e.to_string())?;
    let src = instantiate(FamilyTag::P3prime, &fixed.source_params).unwrap();
    let dst = instantiate(FamilyTag::P3prime, &fixed.target_params).unwrap();
    let alt = verify_transform(&src, &fixed.map, &dst).map_err(|e| e.to_string())?;
    Err(format!(
        "Mismatch with {} (residuals {}); the printed relation gives delta' = 1/4. With mu^2 = -16/(gamma*delta): {:?}",
        rels.join(", "),
        res.join("; "),
        alt.verdict
    ))
}

fn criterion6() -> Check {
    let tb = SymbolTable::plain();
    for gens in [&["y^2 - x^3 + 2*x - 1"][..], &["x*y - 3", "x^2 + y^2 - 1"], &["7/2*x - y"]] {
        let polys: Vec<PhasePoly> = gens.iter().map(|g| parse_phase(g, &tb).unwrap()).collect();
        let lift = tangent_lift(&polys).map_err(|e| e.to_string())?;
        ensure(lift.is_ordinary_tangent(), format!("{gens:?}: nonzero inhomogeneous part"))?;
    }
    let tb = SymbolTable::builder().transcendental("da").varying("a", "da").build().unwrap();
    let curve = parse_phase("y^2 - x^3 + (1 + a)*x^2 - a*x", &tb).unwrap();
    let lift = tangent_lift(&[curve]).map_err(|e| e.to_string())?;
    let want = parse_phase("da*(x^2 - x)", &tb).unwrap();
    ensure(lift.inhomogeneous(0) == want, format!("inhomogeneous part {}", lift.inhomogeneous(0)))?;
    Ok("constant generators give ordinary tangents; Legendre curve gives a'(x^2 - x)".into())
}

fn criterion7() -> Check {
    let s3 = instantiate(FamilyTag::S3prime, &params(&[("v1", "sym:v1"), ("v2", "sym:v2")])).map_err(|e| e.to_string())?;
    let h = s3.hamiltonian.as_ref().ok_or("S3' has no Hamiltonian")?;
    let r = hamiltonian_check(&h.h, s3.system.as_ref().unwrap(), Convention::Minus);
    ensure(r.is_match(), format!("H_III' residuals {:?}", r.residuals))?;
    let p1 = instantiate(FamilyTag::P1, &params(&[])).map_err(|e| e.to_string())?;
    let hi = parse_phase("x^2/2 - 2*y^3 + t*y", p1.table()).unwrap();
    let r = hamiltonian_check(&hi, p1.system.as_ref().unwrap(), Convention::Minus);
    let two_t = parse_field("2*t", p1.table()).unwrap();
    ensure(r.residuals[0].value.is_zero(), "H_I y'-residual nonzero")?;
    ensure(r.residuals[1].value == two_t, format!("H_I x'-residual {}", r.residuals[1].value))?;
    Ok("H_III' matches S3' (minus); H_I leaves x'-residual 2*t".into())
}

fn s2_trajectory(tol: f64) -> Trajectory {
    let inst = instantiate(FamilyTag::S2, &params(&[("alpha", "-1/2")])).unwrap();
    let path = PathSpec::real(&[1.0, 2.0]).unwrap();
    let c = |v: f64| Complex64::new(v, 0.0);
    integrate(&inst, (c(1.0), c(0.3), c(0.0)), &path, tol).unwrap()
}

fn criterion8() -> Check {
    let tb = instantiate(FamilyTag::S2, &params(&[("alpha", "-1/2")])).unwrap().params.table().clone();
    let x = parse_phase("x", &tb).unwrap();
    let mut drifts = Vec::new();
    for tol in [1e-6, 1e-8, 1e-10] {
        let tr = s2_trajectory(tol);
        ensure(tr.is_completed(), format!("tol {tol:e}: {:?}", tr.status))?;
        drifts.push(invariant_drift(&tr, &x).map_err(|e| e.to_string())?);
    }
    ensure(drifts[2] < 1e-8, format!("drift {:e} at tol 1e-10", drifts[2]))?;
    ensure(drifts.windows(2).all(|w| w[1] <= w[0]), format!("drifts {drifts:?} not monotone"))?;
    Ok(format!("drift(x) at tol 1e-6, 1e-8, 1e-10 = {drifts:?} (non-increasing, < 1e-8)"))
}

fn criterion9() -> Check {
    let tr = s2_trajectory(1e-10);
    let basis = ProbeBasis::parse("1, t, y, y^2, yp", 1).map_err(|e| e.to_string())?;
    let r = relation_probe(&[tr], &basis, 1e-6).map_err(|e| e.to_string())?;
    ensure(r.verdict == ProbeVerdict::CandidateRelation, format!("{:?}", r.verdict))?;
    ensure(r.smallest_singular_value < 1e-6, format!("residual {:e}", r.smallest_singular_value))?;
    let c = r.coefficients.as_ref().unwrap();
    let riccati = [0.0, 0.5, 0.0, 1.0, 1.0];
    let k = c[4];
    ensure(
        c.iter().zip(riccati).all(|(a, b)| (a - k * b).norm() < 1e-6 * k.norm()),
        format!("coefficients {c:?}"),
    )?;
    let samples = (0..60)
        .map(|i| {
            let t = Complex64::new(0.05 * i as f64, 0.1 * ((i * 7) % 5) as f64);
            let y = Complex64::new((0.3 * i as f64).cos(), (0.11 * i as f64).sin());
            Sample {
                t,
                y,
                x: Complex64::new(0.0, 0.0),
                dy: y * y * 2.0 - t * y + 0.75,
                dx: Complex64::new(0.0, 0.0),
                arc: i as f64,
            }
        })
        .collect();
    let synthetic = Trajectory::from_samples(samples, 0.0);
    let basis = ProbeBasis::parse("1, t*y, y^2, yp, t", 1).map_err(|e| e.to_string())?;
    let s = relation_probe(&[synthetic], &basis, 1e-6).map_err(|e| e.to_string())?;
    ensure(s.smallest_singular_value < 1e-10, format!("synthetic residual {:e}", s.smallest_singular_value))?;
    let c = s.coefficients.unwrap();
    let want = [0.75, -1.0, 2.0, -1.0, 0.0];
    let k = c[3] / want[3];
    ensure(
        c.iter().zip(want).all(|(a, b)| (a - k * b).norm() < 1e-9 * k.norm()),
        format!("synthetic coefficients {c:?}"),
    )?;
    Ok(format!(
        "Riccati relation recovered (residual {:e}); synthetic residual {:e}",
        r.smallest_singular_value, s.smallest_singular_value
    ))
}

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases: 200,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn criterion10(found: &[(DVectorField, DarbouxCertificate)]) -> Check {
    use proptest::prelude::*;
    let tb = small_table();
    let d = DVectorField::from_system(
        parse_phase("x - y^2 - t/2", &tb).unwrap(),
        parse_phase("2*x*y + a + 1/2", &tb).unwrap(),
    )
    .unwrap();
    let strategy = (small_phase_poly(tb.clone()), small_phase_poly(tb.clone()), -3i64..=3);
    runner()
        .run(&strategy, |(p, q, k)| {
            let lhs = d.apply(&(&p * &q));
            prop_assert_eq!(lhs, &(&d.apply(&p) * &q) + &(&p * &d.apply(&q)));
            let kq = q.scale_rat(&painleve_core::exactfield::Rat::from_integer(k.into()));
            prop_assert_eq!(
                d.apply(&(&p + &kq)),
                &d.apply(&p) + &d.apply(&q).scale_rat(&painleve_core::exactfield::Rat::from_integer(k.into()))
            );
            Ok(())
        })
        .map_err(|e| format!("Leibniz/linearity: {e}"))?;
    let fe = (small_field_elem(tb.clone()), small_field_elem(tb.clone()));
    runner()
        .run(&fe, |(u, v)| {
            prop_assert_eq!((&u * &v).derive(), &(&u.derive() * &v) + &(&u * &v.derive()));
            Ok(())
        })
        .map_err(|e| format!("Leibniz on coefficients: {e}"))?;

    ensure(!found.is_empty(), "no certificates to test")?;
    for (field, cert) in found {
        let ftb = field.table().clone();
        runner()
            .run(&(small_phase_poly(ftb.clone()), 1u32..=3), |(c, k)| {
                let mut pk = cert.p().clone();
                for _ in 1..k {
                    pk = &pk * cert.p();
                }
                let gk = cert.cofactor().scale_rat(&painleve_core::exactfield::Rat::from_integer(k.into()));
                let prod = verify_darboux(field, &pk).map_err(|e| TestCaseError::fail(e.to_string()))?;
                prop_assert_eq!(prod.cofactor(), &gk);
                if !c.is_zero() {
                    let scaled = field.rescale(&c).map_err(|e| TestCaseError::fail(e.to_string()))?;
                    let moved = verify_darboux(&scaled, cert.p()).map_err(|e| TestCaseError::fail(e.to_string()))?;
                    prop_assert_eq!(moved.cofactor(), &(&c * cert.cofactor()));
                }
                Ok(())
            })
            .map_err(|e| format!("certificate {}: {e}", cert.p()))?;
    }
    runner()
        .run(&small_field_elem(tb.clone()), |v| {
            let back = parse_field(&v.to_string(), &tb).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(back, v);
            Ok(())
        })
        .map_err(|e| format!("field round trip: {e}"))?;
    runner()
        .run(&small_phase_poly(tb.clone()), |p| {
            let back = parse_phase(&p.to_string(), &tb).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(back, p);
            Ok(())
        })
        .map_err(|e| format!("phase round trip: {e}"))?;
    Ok(format!(
        "200 cases each: Leibniz/linearity, coefficient Leibniz, products and rescaling on {} certificates, round trips",
        found.len()
    ))
}

fn main() -> ExitCode {
    let mut found = Vec::new();
    let mut unexpected = Vec::new();
    let mut run = |n: u32, budget: u64, check: &mut dyn FnMut() -> Check| {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let pass = result.is_ok() && in_time;
        let detail = match &result {
            Ok(s) => s.clone(),
            Err(s) => s.clone(),
        };
        let timing = if in_time { String::new() } else { " [over budget]".into() };
        println!(
            "criterion {n}: {} ({:.3}s / {budget}s){timing}: {detail}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        if pass == UNATTAINABLE.contains(&n) {
            unexpected.push(n);
        }
    };
    run(1, 1, &mut criterion1);
    run(2, 2, &mut criterion2);
    run(3, 30, &mut || criterion3(&mut found));
    run(4, 1, &mut criterion4);
    run(5, 5, &mut criterion5);
    run(6, 1, &mut criterion6);
    run(7, 1, &mut criterion7);
    run(8, 5, &mut criterion8);
    run(9, 5, &mut criterion9);
    run(10, 30, &mut || criterion10(&found));
    if unexpected.is_empty() {
        println!("acceptance: all criteria as expected; unattainable as stated: {UNATTAINABLE:?}");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
