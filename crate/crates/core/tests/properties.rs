mod common;

use common::{assignment, exceptional, random_point, Q};
use num_complex::Complex64;
use painleve_core::catalog::{classify, instantiate, FamilyTag, ParamAssignment, Verdict};
use painleve_core::numint::{integrate, PathSpec};
use painleve_core::transforms::{maps, verify_transform, VariableMap};
use proptest::prelude::*;

fn params(specs: &[(&str, String)]) -> ParamAssignment {
    let owned: Vec<(String, String)> = specs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    ParamAssignment::from_specs(&owned).unwrap()
}

fn rational() -> impl Strategy<Value = Q> {
    (-9i64..=9, 1i64..=5).prop_map(|(a, b)| Q::new(a, b))
}

fn nonzero_rational() -> impl Strategy<Value = Q> {
    rational().prop_filter("nonzero", |q| q.0 != 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn classification_agrees_with_oracle(
        (family, point) in prop::sample::select(FamilyTag::ALL.to_vec())
            .prop_flat_map(|f| (Just(f), random_point(f)))
    ) {
        let r = classify(family, &assignment(family, &point)).unwrap();
        let special = exceptional(family, &point);
        let want = if special { Verdict::NotStronglyMinimal } else { Verdict::StronglyMinimal };
        prop_assert_eq!(r.verdict, want, "{} at {:?}", family, point);
        prop_assert_eq!(r.witnesses.is_empty(), !special);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// P2(α) → S2(α) followed by the symmetry Y = -y, X = 2y² + t - x of S2,
    /// which flips the sign of α.
    #[test]
    fn composed_maps_verify(alpha in rational()) {
        let src = instantiate(FamilyTag::P2, &params(&[("alpha", alpha.text())])).unwrap();
        let flipped = instantiate(FamilyTag::S2, &params(&[("alpha", alpha.neg().text())])).unwrap();
        let first = maps::p2_to_s2(src.table()).unwrap();
        let symmetry = VariableMap::point(src.table(), ["-y", "2*y^2 + t - x"], ["-y", "2*y^2 + t - x"]).unwrap();
        let composite = first.then(&symmetry).unwrap();
        prop_assert!(verify_transform(&src, &composite, &flipped).unwrap().is_match());

        let same = instantiate(FamilyTag::S2, &params(&[("alpha", alpha.text())])).unwrap();
        let report = verify_transform(&src, &composite, &same).unwrap();
        prop_assert_eq!(report.is_match(), alpha.0 == 0);

        let back = composite.inverse().unwrap();
        prop_assert!(verify_transform(&flipped, &back, &src).unwrap().is_match());
    }

    /// The P3' scaling with the normalizing relation lands on the (4, -4)
    /// normal form for any nonzero rational parameters, and its inverse
    /// maps back.
    #[test]
    fn scaling_and_inverse_match(a in rational(), b in rational(), c in nonzero_rational(), d in nonzero_rational()) {
        let p = params(&[("alpha", a.text()), ("beta", b.text()), ("gamma", c.text()), ("delta", d.text())]);
        let setup = maps::p3prime_scaling_setup(&p, maps::MuRelation::Normalizing).unwrap();
        let src = instantiate(FamilyTag::P3prime, &setup.source_params).unwrap();
        let dst = instantiate(FamilyTag::P3prime, &setup.target_params).unwrap();
        prop_assert!(verify_transform(&src, &setup.map, &dst).unwrap().is_match());
        let back = setup.map.inverse().unwrap();
        prop_assert!(verify_transform(&dst, &back, &src).unwrap().is_match());
    }

    #[test]
    fn integration_is_deterministic(
        alpha in rational(),
        y0 in -1.0f64..1.0,
        x0 in -1.0f64..1.0,
        end in 0.1f64..1.0,
    ) {
        let inst = instantiate(FamilyTag::S2, &params(&[("alpha", alpha.text())])).unwrap();
        let path = PathSpec::real(&[0.0, end]).unwrap();
        let init = (Complex64::new(0.0, 0.0), Complex64::new(y0, 0.0), Complex64::new(x0, 0.0));
        let a = integrate(&inst, init, &path, 1e-9).unwrap();
        let b = integrate(&inst, init, &path, 1e-9).unwrap();
        prop_assert_eq!(a, b);
    }
}
