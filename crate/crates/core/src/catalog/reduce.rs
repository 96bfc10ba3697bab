use std::fmt;
use std::sync::Arc;

use num_traits::Signed;

use super::classify::{classify_natural, ClassificationResult};
use super::{instantiate, CatalogError, FamilyTag, PainleveInstance, ParamAssignment};
use crate::exactfield::{FieldElem, Rat, SymbolTable};

/// A square root adjoined by a reduction: `root² = rhs`. When `rhs` is the
/// square of a rational the root is that rational and no symbol is added.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareRelation {
    pub name: String,
    pub rhs: FieldElem,
    pub root: FieldElem,
}

impl fmt::Display for SquareRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.root.as_rat().is_some() {
            write!(f, "{} = {}", self.name, self.root)
        } else {
            write!(f, "{}^2 = {}", self.name, self.rhs)
        }
    }
}

#[derive(Clone, Debug)]
pub struct BranchOutcome {
    /// One sign per square relation, in order.
    pub signs: Vec<i8>,
    pub params: ParamAssignment,
    pub classification: ClassificationResult,
}

#[derive(Clone, Debug)]
pub struct Reduction {
    /// Instance in reduced form for the all-plus branch.
    pub instance: PainleveInstance,
    /// Natural coordinates (v or a) for the all-plus branch.
    pub params: ParamAssignment,
    pub relations: Vec<SquareRelation>,
    pub branches: Vec<BranchOutcome>,
    /// Common verdict of all branches.
    pub classification: ClassificationResult,
}

fn rational_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rat::new(n, d))
}

fn fresh_name(table: &SymbolTable, builder_names: &[String], base: &str) -> String {
    let taken = |n: &str| table.lookup(n).is_some() || builder_names.iter().any(|b| b == n);
    if !taken(base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}_{i}")).find(|n| !taken(n)).expect("unbounded")
}

/// Adjoins the requested square roots to the parameter table.
pub(crate) fn adjoin_roots(
    params: &ParamAssignment,
    requests: &[(&str, FieldElem)],
) -> Result<(ParamAssignment, Vec<SquareRelation>), CatalogError> {
    let old = params.table();
    let mut builder = old.extend();
    let mut names = Vec::new();
    let mut plan = Vec::new();
    for (base, rhs) in requests {
        match rhs.as_rat().and_then(|r| rational_sqrt(&r)) {
            Some(root) => plan.push((base.to_string(), Err(root))),
            None => {
                let name = fresh_name(old, &names, base);
                builder = builder.radical_elem(&name, rhs);
                names.push(name.clone());
                plan.push((name.clone(), Ok(name)));
            }
        }
    }
    let table: Arc<SymbolTable> = builder.build()?;
    let embedded = params.embed(&table)?;
    let mut relations = Vec::new();
    for ((label, kind), (_, rhs)) in plan.into_iter().zip(requests) {
        let root = match kind {
            Ok(sym) => FieldElem::symbol(&table, &sym)?,
            Err(r) => FieldElem::from_rat(&table, r),
        };
        relations.push(SquareRelation {
            name: label,
            rhs: rhs.embed(&table)?,
            root,
        });
    }
    Ok((embedded, relations))
}

type Coordinates = Box<dyn Fn(&ParamAssignment, &[FieldElem]) -> Result<ParamAssignment, CatalogError>>;

fn int(tb: &Arc<SymbolTable>, n: i64) -> FieldElem {
    FieldElem::from_int(tb, n)
}

fn half(tb: &Arc<SymbolTable>) -> FieldElem {
    FieldElem::from_ratio(tb, 1, 2)
}

fn assignment(tb: &Arc<SymbolTable>, pairs: Vec<(&str, FieldElem)>) -> Result<ParamAssignment, CatalogError> {
    let mut out = ParamAssignment::new(tb);
    for (k, v) in pairs {
        out.insert(k, v)?;
    }
    Ok(out)
}

fn p3_plan(p: &ParamAssignment) -> Result<(Vec<(&'static str, FieldElem)>, Coordinates), CatalogError> {
    let tb = p.table();
    let (gamma, delta) = (p.value("gamma"), p.value("delta"));
    let gd = &gamma * &delta;
    if gd.is_zero() {
        return Err(CatalogError::NotReducible("gamma*delta = 0".into()));
    }
    let requests = vec![
        ("lambda", int(tb, 4).checked_div(&gamma)?),
        ("mu", int(tb, -16).checked_div(&gd)?),
    ];
    // y -> lambda*y, t -> mu*t sends (alpha, beta) to (lambda*alpha, mu*beta/lambda).
    let f: Coordinates = Box::new(|p, r| {
        let tb = p.table();
        let quarter = FieldElem::from_ratio(tb, 1, 4);
        let v2 = &(&r[0] * &p.value("alpha")) * &quarter;
        let beta2 = (&r[1] * &p.value("beta")).checked_div(&r[0])?;
        let v1 = &int(tb, 1) - &(&beta2 * &quarter);
        assignment(tb, vec![("v1", v1), ("v2", v2)])
    });
    Ok((requests, f))
}

fn p4_plan(p: &ParamAssignment) -> Result<(Vec<(&'static str, FieldElem)>, Coordinates), CatalogError> {
    let tb = p.table();
    let requests = vec![("sigma", &p.value("beta") * &FieldElem::from_ratio(tb, -1, 2))];
    // alpha = 3 v3 + 1, beta = -2 (v2 - v1)^2, v1 + v2 + v3 = 0.
    let f: Coordinates = Box::new(|p, r| {
        let tb = p.table();
        let v3 = &(&p.value("alpha") - &int(tb, 1)) * &FieldElem::from_ratio(tb, 1, 3);
        let v1 = &(&(-&v3) - &r[0]) * &half(tb);
        let v2 = &(&(-&v3) + &r[0]) * &half(tb);
        assignment(tb, vec![("v1", v1), ("v2", v2), ("v3", v3)])
    });
    Ok((requests, f))
}

fn p5_plan(p: &ParamAssignment) -> Result<(Vec<(&'static str, FieldElem)>, Coordinates), CatalogError> {
    let tb = p.table();
    let delta = p.value("delta");
    if delta.is_zero() {
        return Err(CatalogError::NotReducible("delta = 0".into()));
    }
    let requests = vec![
        ("eta", &int(tb, -2) * &delta),
        ("kappa1", &int(tb, 2) * &p.value("alpha")),
        ("kappa0", &int(tb, -2) * &p.value("beta")),
    ];
    // Rescaling by lambda = eta sends eta to 1 and gamma to gamma/eta; then
    // gamma = -(theta + 1).
    let f: Coordinates = Box::new(|p, r| {
        let tb = p.table();
        let (eta, k1, k0) = (&r[0], &r[1], &r[2]);
        let gamma = p.value("gamma").checked_div(eta)?;
        let theta = &(-&gamma) - &int(tb, 1);
        let quarter = FieldElem::from_ratio(tb, 1, 4);
        let two = int(tb, 2);
        let v1 = &(-&(&(&two * k0) + &theta)) * &quarter;
        let v2 = &(&(&two * k0) - &theta) * &quarter;
        let v3 = &(&(&two * k1) + &theta) * &quarter;
        let v4 = &(-&(&(&two * k1) - &theta)) * &quarter;
        assignment(tb, vec![("v1", v1), ("v2", v2), ("v3", v3), ("v4", v4)])
    });
    Ok((requests, f))
}

fn p6_plan(p: &ParamAssignment) -> Result<(Vec<(&'static str, FieldElem)>, Coordinates), CatalogError> {
    let tb = p.table();
    let requests = vec![
        ("p", &int(tb, 2) * &p.value("alpha")),
        ("q", &int(tb, -2) * &p.value("beta")),
        ("r", &int(tb, 2) * &p.value("gamma")),
        ("w", &int(tb, 1) + &(&int(tb, 2) * &p.value("delta"))),
    ];
    // a1 - a2 = p, a3 + a4 = q, a3 - a4 = r, 1 - a1 - a2 = w.
    let f: Coordinates = Box::new(|p, r| {
        let tb = p.table();
        let h = half(tb);
        let s = &int(tb, 1) - &r[3];
        let a1 = &(&s + &r[0]) * &h;
        let a2 = &(&s - &r[0]) * &h;
        let a3 = &(&r[1] + &r[2]) * &h;
        let a4 = &(&r[1] - &r[2]) * &h;
        assignment(tb, vec![("a1", a1), ("a2", a2), ("a3", a3), ("a4", a4)])
    });
    Ok((requests, f))
}

/// Brings parameters to the family's natural coordinates, adjoining the
/// square roots the inverse maps need and classifying every sign branch.
pub fn reduce_parameters(family: FamilyTag, params: &ParamAssignment) -> Result<Reduction, CatalogError> {
    use FamilyTag::*;
    let coords = params.coordinates_for(family)?;
    if coords == 0 && family != P3 {
        let instance = instantiate(family, params)?;
        let classification = classify_natural(family, params);
        return Ok(Reduction {
            instance,
            params: params.clone(),
            relations: Vec::new(),
            branches: vec![BranchOutcome {
                signs: Vec::new(),
                params: params.clone(),
                classification: classification.clone(),
            }],
            classification,
        });
    }
    let (requests, coordinates) = match family {
        P3 | P3prime | S3prime => p3_plan(params)?,
        P4 | S4 => p4_plan(params)?,
        P5 | S5 => p5_plan(params)?,
        P6 | S6 => p6_plan(params)?,
        P1 | P2 | S2 => unreachable!("single coordinate system"),
    };
    let target = if family == P3 { P3prime } else { family };
    let (embedded, relations) = adjoin_roots(params, &requests)?;
    let mut branches = Vec::new();
    for mask in 0..(1u32 << relations.len()) {
        let signs: Vec<i8> = (0..relations.len()).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
        let roots: Vec<FieldElem> = relations
            .iter()
            .zip(&signs)
            .map(|(rel, &s)| if s < 0 { -&rel.root } else { rel.root.clone() })
            .collect();
        let natural = coordinates(&embedded, &roots)?;
        let classification = classify_natural(target, &natural);
        branches.push(BranchOutcome {
            signs,
            params: natural,
            classification,
        });
    }
    let first = &branches[0];
    if let Some(other) = branches
        .iter()
        .find(|b| b.classification.verdict != first.classification.verdict)
    {
        return Err(CatalogError::BranchDisagreement(format!(
            "signs {:?} give {:?} but signs {:?} give {:?}",
            first.signs, first.classification.verdict, other.signs, other.classification.verdict
        )));
    }
    let natural = first.params.clone();
    let mut classification = first.classification.clone();
    classification.family = family;
    let mut instance = instantiate(target, &natural)?;
    instance
        .notes
        .push(format!("reduced from {family} ({params})"));
    Ok(Reduction {
        instance,
        params: natural,
        relations,
        branches,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Verdict;

    fn p(specs: &[(&str, &str)]) -> ParamAssignment {
        ParamAssignment::from_specs(specs).unwrap()
    }

    #[test]
    fn p3prime_at_standard_scaling() {
        let r = reduce_parameters(
            FamilyTag::P3prime,
            &p(&[("alpha", "sym:a"), ("beta", "sym:b"), ("gamma", "4"), ("delta", "-4")]),
        )
        .unwrap();
        assert_eq!(r.params.get("v2").unwrap().to_string(), "1/4*a");
        assert_eq!(r.params.get("v1").unwrap().to_string(), "-1/4*b + 1");
        assert!(r.relations.iter().all(|rel| rel.root.as_rat().is_some()));
        assert_eq!(r.branches.len(), 4);
    }

    #[test]
    fn p5_eta_is_one_at_minus_half() {
        let r = reduce_parameters(
            FamilyTag::P5,
            &p(&[("alpha", "1/2"), ("beta", "-1/2"), ("gamma", "1/3"), ("delta", "-1/2")]),
        )
        .unwrap();
        assert_eq!(r.relations[0].name, "eta");
        assert!(r.relations[0].root.is_one());
    }

    #[test]
    fn not_reducible() {
        let err = reduce_parameters(
            FamilyTag::P3,
            &p(&[("alpha", "1"), ("beta", "1"), ("gamma", "0"), ("delta", "1")]),
        )
        .unwrap_err();
        assert!(matches!(err, CatalogError::NotReducible(_)));
        let err = reduce_parameters(
            FamilyTag::P5,
            &p(&[("alpha", "1"), ("beta", "1"), ("gamma", "1"), ("delta", "0")]),
        )
        .unwrap_err();
        assert!(matches!(err, CatalogError::NotReducible(_)));
    }

    #[test]
    fn p4_symbolic_root() {
        let r = reduce_parameters(FamilyTag::P4, &p(&[("alpha", "sym:a"), ("beta", "sym:b")])).unwrap();
        assert_eq!(r.relations[0].to_string(), "sigma^2 = -1/2*b");
        assert_eq!(r.classification.verdict, Verdict::StronglyMinimal);
        let (f, _) = r.instance.system.as_ref().unwrap();
        assert!(f.to_string().contains("sigma"));
    }

    #[test]
    fn p6_irrational_roots_classify() {
        // alpha = 1 gives a1 - a2 = sqrt(2), which is not an integer.
        let r = reduce_parameters(
            FamilyTag::P6,
            &p(&[("alpha", "1"), ("beta", "-1/2"), ("gamma", "1/2"), ("delta", "0")]),
        )
        .unwrap();
        assert_eq!(r.relations.iter().filter(|rel| rel.root.as_rat().is_none()).count(), 1);
        // q = r = 1 gives a3 = 1, a4 = 0, so a3 - a4 is an integer.
        assert_eq!(r.classification.verdict, Verdict::NotStronglyMinimal);
    }
}
