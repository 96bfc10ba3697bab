use serde::Serialize;

use super::{notes, reduce_parameters, CatalogError, FamilyTag, ParamAssignment};
use crate::exactfield::{membership_test, FieldElem, IntegerSet, Membership};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    StronglyMinimal,
    NotStronglyMinimal,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionOutcome {
    /// e.g. "v1 - v2 ∈ Z"
    pub condition: String,
    /// The tested value in canonical form.
    pub value: String,
    pub membership: Membership,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub family: FamilyTag,
    pub verdict: Verdict,
    /// Conditions that fired; nonempty exactly for NotStronglyMinimal.
    pub witnesses: Vec<String>,
    pub conditions: Vec<ConditionOutcome>,
    pub citation: &'static str,
    pub notes: Vec<String>,
}

/// Source labels for the arithmetic criteria, reported alongside verdicts.
pub(super) fn citation(family: FamilyTag) -> &'static str {
    match family {
        FamilyTag::P1 => "Prop 3.1",
        FamilyTag::P2 | FamilyTag::S2 => "Fact 3.4; Cor 3.5",
        FamilyTag::P3 | FamilyTag::P3prime | FamilyTag::S3prime => "Fact 3.7; Cor 3.8",
        FamilyTag::P4 | FamilyTag::S4 => "Fact 3.10; Cor 3.11",
        FamilyTag::P5 | FamilyTag::S5 => "Fact 3.13; Cor 3.14",
        FamilyTag::P6 | FamilyTag::S6 => "Fact 3.16; Cor 3.17",
    }
}

fn condition(label: String, value: FieldElem, set: IntegerSet) -> ConditionOutcome {
    ConditionOutcome {
        condition: format!("{label} ∈ {}", set.notation()),
        value: value.to_string(),
        membership: membership_test(&value, set),
    }
}

fn differences(params: &ParamAssignment, names: &[&str], pairs: &[(usize, usize)], with_sums: bool) -> Vec<ConditionOutcome> {
    let mut out = Vec::new();
    for &(i, j) in pairs {
        let (a, b) = (params.value(names[i]), params.value(names[j]));
        if with_sums {
            out.push(condition(format!("{} + {}", names[i], names[j]), &a + &b, IntegerSet::Integers));
        }
        out.push(condition(format!("{} - {}", names[i], names[j]), &a - &b, IntegerSet::Integers));
    }
    out
}

/// Evaluates the arithmetic conditions on parameters already in the
/// family's natural coordinates.
pub(super) fn classify_natural(family: FamilyTag, params: &ParamAssignment) -> ClassificationResult {
    use FamilyTag::*;
    let mut extra_notes = Vec::new();
    let conditions = match family {
        P1 => Vec::new(),
        P2 | S2 => vec![condition("alpha".into(), params.value("alpha"), IntegerSet::HalfPlusIntegers)],
        P3 | P3prime | S3prime => {
            let (v1, v2) = (params.value("v1"), params.value("v2"));
            vec![
                condition("v1 + v2".into(), &v1 + &v2, IntegerSet::EvenIntegers),
                condition("v1 - v2".into(), &v1 - &v2, IntegerSet::EvenIntegers),
            ]
        }
        P4 | S4 => differences(params, &["v1", "v2", "v3"], &[(0, 1), (1, 2), (2, 0)], false),
        P5 | S5 => {
            extra_notes.push(notes::P5_W.to_string());
            let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            differences(params, &["v1", "v2", "v3", "v4"], &pairs, false)
        }
        P6 | S6 => {
            let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            differences(params, &["a1", "a2", "a3", "a4"], &pairs, true)
        }
    };
    let witnesses: Vec<String> = conditions
        .iter()
        .filter(|c| c.membership == Membership::In)
        .map(|c| c.condition.clone())
        .collect();
    let verdict = if !witnesses.is_empty() {
        Verdict::NotStronglyMinimal
    } else if conditions
        .iter()
        .all(|c| matches!(c.membership, Membership::NotIn | Membership::GenericNotIn))
    {
        Verdict::StronglyMinimal
    } else {
        Verdict::Unknown
    };
    ClassificationResult {
        family,
        verdict,
        witnesses,
        conditions,
        citation: citation(family),
        notes: extra_notes,
    }
}

/// Strong-minimality verdict from the arithmetic criteria. Parameters in
/// (alpha, beta, ...) form are first reduced to the natural coordinates,
/// and every sign branch of the reduction must agree.
pub fn classify(family: FamilyTag, params: &ParamAssignment) -> Result<ClassificationResult, CatalogError> {
    let coords = params.coordinates_for(family)?;
    let natural = coords == 0 && family != FamilyTag::P3;
    if natural {
        super::instantiate(family, params)?;
        return Ok(classify_natural(family, params));
    }
    Ok(reduce_parameters(family, params)?.classification)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(family: FamilyTag, specs: &[(&str, &str)]) -> ClassificationResult {
        classify(family, &ParamAssignment::from_specs(specs).unwrap()).unwrap()
    }

    #[test]
    fn p2_examples() {
        let r = run(FamilyTag::P2, &[("alpha", "3/2")]);
        assert_eq!(r.verdict, Verdict::NotStronglyMinimal);
        assert_eq!(r.witnesses, vec!["alpha ∈ 1/2+Z"]);
        assert_eq!(run(FamilyTag::P2, &[("alpha", "1/3")]).verdict, Verdict::StronglyMinimal);
        let generic = run(FamilyTag::P2, &[("alpha", "sym:a")]);
        assert_eq!(generic.verdict, Verdict::StronglyMinimal);
        assert!(generic.witnesses.is_empty());
    }

    #[test]
    fn s4_and_s6_examples() {
        let r = run(FamilyTag::S4, &[("v1", "1/4"), ("v2", "1/4"), ("v3", "-1/2")]);
        assert_eq!(r.verdict, Verdict::NotStronglyMinimal);
        assert_eq!(r.witnesses, vec!["v1 - v2 ∈ Z"]);
        let r = run(
            FamilyTag::S6,
            &[("a1", "sym:a1"), ("a2", "sym:a2"), ("a3", "sym:a3"), ("a4", "sym:a4")],
        );
        assert_eq!(r.verdict, Verdict::StronglyMinimal);
    }

    #[test]
    fn time_dependent_parameters_are_rejected() {
        let err = ParamAssignment::from_specs(&[("alpha", "t")]).unwrap_err();
        assert!(matches!(err, CatalogError::InvalidParameter(_)));
    }
}
