//! The Painlevé families: second-order equations, polynomial system forms,
//! Hamiltonians, parameter reductions and the strong-minimality classifier.

mod classify;
mod reduce;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::dvariety::{DVarietyError, DVectorField};
use crate::exactfield::{parse_field, parse_phase, FieldElem, FieldError, PhasePoly, SymbolTable};
use crate::transforms::{hamiltonian_check, Convention, TransformReport};

pub use classify::{classify, ClassificationResult, ConditionOutcome, Verdict};
pub use reduce::{reduce_parameters, BranchOutcome, Reduction, SquareRelation};
pub(crate) use reduce::adjoin_roots;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown family '{0}'")]
    UnknownFamily(String),
    #[error("{family} needs parameters {expected}")]
    MissingParameter { family: FamilyTag, expected: String },
    #[error("{family} does not take parameter '{name}'")]
    UnexpectedParameter { family: FamilyTag, name: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("not reducible: {0}")]
    NotReducible(String),
    #[error("sign branches disagree: {0}")]
    BranchDisagreement(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    DVariety(#[from] DVarietyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FamilyTag {
    P1,
    P2,
    P3,
    P3prime,
    P4,
    P5,
    P6,
    S2,
    S3prime,
    S4,
    S5,
    S6,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 12] = [
        FamilyTag::P1,
        FamilyTag::P2,
        FamilyTag::P3,
        FamilyTag::P3prime,
        FamilyTag::P4,
        FamilyTag::P5,
        FamilyTag::P6,
        FamilyTag::S2,
        FamilyTag::S3prime,
        FamilyTag::S4,
        FamilyTag::S5,
        FamilyTag::S6,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyTag::P1 => "P1",
            FamilyTag::P2 => "P2",
            FamilyTag::P3 => "P3",
            FamilyTag::P3prime => "P3prime",
            FamilyTag::P4 => "P4",
            FamilyTag::P5 => "P5",
            FamilyTag::P6 => "P6",
            FamilyTag::S2 => "S2",
            FamilyTag::S3prime => "S3prime",
            FamilyTag::S4 => "S4",
            FamilyTag::S5 => "S5",
            FamilyTag::S6 => "S6",
        }
    }

    /// True for the variants given only as first-order systems.
    pub fn is_system_only(&self) -> bool {
        matches!(
            self,
            FamilyTag::S2 | FamilyTag::S3prime | FamilyTag::S4 | FamilyTag::S5 | FamilyTag::S6
        )
    }

    /// Accepted parameter coordinates; the first entry is the natural one
    /// used by the classifier.
    pub fn coordinate_sets(&self) -> &'static [&'static [&'static str]] {
        const ABCD: &[&str] = &["alpha", "beta", "gamma", "delta"];
        match self {
            FamilyTag::P1 => &[&[]],
            FamilyTag::P2 | FamilyTag::S2 => &[&["alpha"]],
            FamilyTag::P3 => &[ABCD],
            FamilyTag::P3prime | FamilyTag::S3prime => &[&["v1", "v2"], ABCD],
            FamilyTag::P4 | FamilyTag::S4 => &[&["v1", "v2", "v3"], &["alpha", "beta"]],
            FamilyTag::P5 | FamilyTag::S5 => &[&["v1", "v2", "v3", "v4"], ABCD],
            FamilyTag::P6 | FamilyTag::S6 => &[&["a1", "a2", "a3", "a4"], ABCD],
        }
    }

    /// Points in the complex t-plane where the equation is singular.
    pub fn fixed_singularities(&self) -> &'static [f64] {
        match self {
            FamilyTag::P3 | FamilyTag::P3prime | FamilyTag::S3prime | FamilyTag::P5 | FamilyTag::S5 => &[0.0],
            FamilyTag::P6 | FamilyTag::S6 => &[0.0, 1.0],
            _ => &[],
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyTag {
    type Err = CatalogError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().replace(['\'', '′'], "prime").to_ascii_uppercase();
        let key = key.strip_prefix("PAINLEVE").unwrap_or(&key).to_string();
        let roman = [("VI", "6"), ("V", "5"), ("IV", "4"), ("III", "3"), ("II", "2"), ("I", "1")];
        let mut normalized = key.clone();
        for (prefix, rest) in ["P_", "S_", "P", "S"].iter().map(|p| (*p, key.strip_prefix(p))) {
            if let Some(rest) = rest {
                let lead = &prefix[..1];
                let rest = roman
                    .iter()
                    .find_map(|(r, d)| rest.strip_prefix(r).map(|tail| format!("{d}{tail}")))
                    .unwrap_or_else(|| rest.to_string());
                normalized = format!("{lead}{rest}");
                break;
            }
        }
        FamilyTag::ALL
            .iter()
            .copied()
            .find(|f| f.name().to_ascii_uppercase() == normalized)
            .ok_or_else(|| CatalogError::UnknownFamily(s.to_string()))
    }
}

fn canonical_param_name(name: &str) -> String {
    let mut out = String::new();
    for ch in name.trim().chars() {
        match ch {
            'α' => out.push_str("alpha"),
            'β' => out.push_str("beta"),
            'γ' => out.push_str("gamma"),
            'δ' => out.push_str("delta"),
            '₀'..='₉' => out.push(char::from(b'0' + (ch as u32 - '₀' as u32) as u8)),
            '_' => {}
            c => out.push(c),
        }
    }
    out
}

/// Named parameter values in a shared coefficient table.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamAssignment {
    table: Arc<SymbolTable>,
    values: BTreeMap<String, FieldElem>,
}

impl ParamAssignment {
    pub fn new(table: &Arc<SymbolTable>) -> Self {
        ParamAssignment {
            table: table.clone(),
            values: BTreeMap::new(),
        }
    }

    /// Builds an assignment from `name=value` pairs. A value `sym:NAME`
    /// declares a transcendental NAME; other values are expressions over the
    /// declared transcendentals (usually plain rationals like `3/2`).
    pub fn from_specs<S: AsRef<str>>(specs: &[(S, S)]) -> Result<Self, CatalogError> {
        ParamAssignment::from_specs_in(&Self::table_for_specs(specs)?, specs)
    }

    /// A table declaring every `sym:NAME` transcendental in the specs, once.
    pub fn table_for_specs<S: AsRef<str>>(specs: &[(S, S)]) -> Result<Arc<SymbolTable>, CatalogError> {
        let mut builder = SymbolTable::builder();
        let mut seen = Vec::new();
        for (_, value) in specs {
            if let Some(sym) = value.as_ref().trim().strip_prefix("sym:") {
                let sym = sym.trim().to_string();
                if !seen.contains(&sym) {
                    builder = builder.transcendental(&sym);
                    seen.push(sym);
                }
            }
        }
        Ok(builder.build()?)
    }

    /// Like [`from_specs`](Self::from_specs) in an existing table, where
    /// every `sym:NAME` must already be declared.
    pub fn from_specs_in<S: AsRef<str>>(table: &Arc<SymbolTable>, specs: &[(S, S)]) -> Result<Self, CatalogError> {
        let mut out = ParamAssignment::new(table);
        for (name, value) in specs {
            let value = value.as_ref().trim();
            let text = value.strip_prefix("sym:").unwrap_or(value);
            let v = parse_field(text, table)?;
            if v.symbols().iter().any(|&s| s < crate::exactfield::RESERVED.len()) {
                return Err(CatalogError::InvalidParameter(format!(
                    "{} = {value} depends on t or a coordinate",
                    name.as_ref()
                )));
            }
            let key = canonical_param_name(name.as_ref());
            if out.values.contains_key(&key) {
                return Err(CatalogError::InvalidParameter(format!("{key} given twice")));
            }
            out.values.insert(key, v);
        }
        Ok(out)
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    pub fn get(&self, name: &str) -> Option<&FieldElem> {
        self.values.get(name)
    }

    pub fn insert(&mut self, name: &str, value: FieldElem) -> Result<(), CatalogError> {
        if value.table() != &self.table {
            return Err(FieldError::TableMismatch.into());
        }
        self.values.insert(name.to_string(), value);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(|s| s.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &FieldElem)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Re-expresses every value in a larger table.
    pub fn embed(&self, table: &Arc<SymbolTable>) -> Result<ParamAssignment, CatalogError> {
        let mut out = ParamAssignment::new(table);
        for (k, v) in &self.values {
            out.values.insert(k.clone(), v.embed(table)?);
        }
        Ok(out)
    }

    fn value(&self, name: &str) -> FieldElem {
        self.values[name].clone()
    }

    /// Index into `family.coordinate_sets()` matching the given names.
    pub fn coordinates_for(&self, family: FamilyTag) -> Result<usize, CatalogError> {
        let sets = family.coordinate_sets();
        if let Some(i) = sets
            .iter()
            .position(|set| set.len() == self.values.len() && set.iter().all(|n| self.values.contains_key(*n)))
        {
            return Ok(i);
        }
        let known: Vec<&str> = sets.iter().flat_map(|s| s.iter().copied()).collect();
        if let Some(extra) = self.values.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(CatalogError::UnexpectedParameter {
                family,
                name: extra.clone(),
            });
        }
        let expected = sets
            .iter()
            .map(|s| if s.is_empty() { "none".to_string() } else { format!("({})", s.join(", ")) })
            .collect::<Vec<_>>()
            .join(" or ");
        Err(CatalogError::MissingParameter { family, expected })
    }
}

impl fmt::Display for ParamAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InstanceOptions {
    /// Use 1/(y-1) in place of the printed 1/(y+1) in the P6 equation.
    pub p6_standard_form: bool,
    /// Use H = x²/2 - 2y³ - t·y for P1 instead of the printed +t·y.
    pub p1_corrected_hamiltonian: bool,
}

#[derive(Clone, Debug)]
pub struct HamiltonianForm {
    pub h: PhasePoly,
    /// The sign convention under which H was stated.
    pub stated: Convention,
    /// y′ = ∂H/∂x and x′ = −∂H/∂y hold exactly.
    pub consistent: bool,
    pub minus: TransformReport,
    pub plus: TransformReport,
}

impl HamiltonianForm {
    fn check(h: PhasePoly, stated: Convention, system: &(PhasePoly, PhasePoly)) -> HamiltonianForm {
        let minus = hamiltonian_check(&h, system, Convention::Minus);
        let plus = hamiltonian_check(&h, system, Convention::Plus);
        HamiltonianForm {
            consistent: minus.is_match(),
            h,
            stated,
            minus,
            plus,
        }
    }

    pub fn holds_under(&self) -> Vec<Convention> {
        let mut v = Vec::new();
        if self.minus.is_match() {
            v.push(Convention::Minus);
        }
        if self.plus.is_match() {
            v.push(Convention::Plus);
        }
        v
    }
}

#[derive(Clone, Debug)]
pub struct PainleveInstance {
    pub family: FamilyTag,
    pub params: ParamAssignment,
    /// y″ = R(y, yp, t), absent for system-only variants.
    pub second_order: Option<FieldElem>,
    /// (y′, x′) components.
    pub system: Option<(PhasePoly, PhasePoly)>,
    pub derivation: Option<DVectorField>,
    pub hamiltonian: Option<HamiltonianForm>,
    pub notes: Vec<String>,
}

impl PainleveInstance {
    pub fn table(&self) -> &Arc<SymbolTable> {
        self.params.table()
    }
}

/// Replaces `{name}` placeholders by parenthesized values.
fn fill(template: &str, values: &[(&str, &FieldElem)]) -> String {
    let mut s = template.to_string();
    for (name, v) in values {
        s = s.replace(&format!("{{{name}}}"), &format!("({v})"));
    }
    s
}

fn rat(table: &Arc<SymbolTable>, n: i64, d: i64) -> FieldElem {
    FieldElem::from_ratio(table, n, d)
}

const P1_EQ: &str = "6*y^2 + t";
const P2_EQ: &str = "2*y^3 + t*y + {alpha}";
const P3_EQ: &str = "yp^2/y - yp/t + ({alpha}*y^2 + {beta})/t + {gamma}*y^3 + {delta}/y";
const P3P_EQ: &str = "yp^2/y - yp/t + y^2*({gamma}*y + {alpha})/(4*t^2) + {beta}/(4*t) + {delta}/(4*y)";
const P4_EQ: &str = "yp^2/(2*y) + 3/2*y^3 + 4*t*y^2 + 2*(t^2 - {alpha})*y + {beta}/y";
const P5_EQ: &str = "(1/(2*y) + 1/(y - 1))*yp^2 - yp/t + (y - 1)^2/t^2*({alpha}*y + {beta}/y) + {gamma}*y/t \
                     + {delta}*y*(y + 1)/(y - 1)";
const P6_EQ: &str = "1/2*(1/y + 1/(y {pm} 1) + 1/(y - t))*yp^2 - (1/t + 1/(t - 1) + 1/(y - t))*yp \
                     + y*(y - 1)*(y - t)/(t^2*(t - 1)^2)*({alpha} + {beta}*t/y^2 + {gamma}*(t - 1)/(y - 1)^2 \
                     + {delta}*t*(t - 1)/(y - t)^2)";

const S1_SYS: [&str; 2] = ["x", "6*y^2 + t"];
const S2_SYS: [&str; 2] = ["x - y^2 - t/2", "2*x*y + {alpha} + 1/2"];
const S3P_SYS: [&str; 2] = [
    "(2*y^2*x - y^2 + {v1}*y + t)/t",
    "(-2*y*x^2 + 2*y*x - {v1}*x + ({v1} + {v2})/2)/t",
];
const S4_SYS: [&str; 2] = [
    "2*x*y - y^2 - 2*t*y + 2*({v1} - {v2})",
    "2*x*y - x^2 + 2*t*x + 2*({v1} - {v3})",
];
const S5_SYS: [&str; 2] = [
    "(2*y^2*x - 2*y*x + t*y^2 - t*y + ({v1} - {v2} - {v3} + {v4})*y + {v2} - {v1})/t",
    "(-2*y*x^2 + x^2 - 2*t*x*y + t*x - ({v1} - {v2} - {v3} + {v4})*x + ({v3} - {v1})*t)/t",
];
const S6_SYS: [&str; 2] = [
    "(2*y*(y - 1)*(y - t)*x + ({a1} + {a2} - 2*{a3})*y^2 + (2*{a3}*t - {a1} - {a2} + {a3} + {a4})*y \
     - ({a3} + {a4})*t)/(t*(t - 1))",
    "(-3*y^2*x^2 + 2*(1 + t)*y*x^2 - t*x^2 - 2*({a1} + {a2} - 2*{a3})*y*x \
     - (2*{a3}*t - {a1} - {a2} + {a3} + {a4})*x - ({a3} - {a2})*({a3} - {a1}))/(t*(t - 1))",
];

const H1: &str = "x^2/2 - 2*y^3 + t*y";
const H1_CORRECTED: &str = "x^2/2 - 2*y^3 - t*y";
const H3P: &str = "(y^2*x^2 - (y^2 - {v1}*y - t)*x - ({v1} + {v2})*y/2)/t";
const H5: &str = "(y*(y - 1)^2*x^2 - ({k0}*(y - 1)^2 + {theta}*y*(y - 1) + {eta}*t*y)*x + {kappa}*(y - 1))/t";

/// Notes attached to instances and reports where the printed source
/// formulas needed interpretation.
pub mod notes {
    pub const P1_HAMILTONIAN: &str = "the printed P1 Hamiltonian x^2/2 - 2y^3 + ty gives x' = 6y^2 - t under \
        y' = dH/dx, x' = -dH/dy; the x'-residual is 2t (use the corrected -ty variant to remove it)";
    pub const P5_W: &str = "the exceptional set W for P5 is printed with v1 - v3 twice and without v2 - v3; \
        all six differences vi - vj are tested";
    pub const S5_FIRST_COMPONENT: &str = "the S5 y'-component is printed with 2x^2x; 2y^2x is used";
    pub const S5_HAMILTONIAN: &str = "H_V is stated in the variables before the substitution leading to S5 \
        and with x' = +dH/dy; both sign conventions are checked against S5";
    pub const P6_PRINTED: &str = "P6 uses the printed 1/(y+1) in the first bracket; the standard form has 1/(y-1)";
    pub const P2_SYSTEM: &str = "system obtained from x = y' + y^2 + t/2";
}

fn system_from(table: &Arc<SymbolTable>, tpl: [&str; 2], vals: &[(&str, &FieldElem)]) -> Result<(PhasePoly, PhasePoly), CatalogError> {
    Ok((parse_phase(&fill(tpl[0], vals), table)?, parse_phase(&fill(tpl[1], vals), table)?))
}

fn check_sum_zero(names: &[&str], params: &ParamAssignment) -> Result<(), CatalogError> {
    let mut sum = FieldElem::zero(params.table());
    for n in names {
        sum = &sum + &params.value(n);
    }
    if sum.is_zero() {
        Ok(())
    } else {
        Err(CatalogError::ConstraintViolation(format!("{} = {sum}, expected 0", names.join(" + "))))
    }
}

/// (alpha, beta, gamma, delta) of P4 from v: α = 3v3 + 1, β = -2(v2 - v1)².
fn p4_from_v(p: &ParamAssignment) -> [FieldElem; 2] {
    let tb = p.table();
    let d = &p.value("v2") - &p.value("v1");
    [&(&rat(tb, 3, 1) * &p.value("v3")) + &rat(tb, 1, 1), &rat(tb, -2, 1) * &(&d * &d)]
}

fn p5_from_v(p: &ParamAssignment) -> [FieldElem; 4] {
    let tb = p.table();
    let d34 = &p.value("v3") - &p.value("v4");
    let d21 = &p.value("v2") - &p.value("v1");
    [
        &rat(tb, 1, 2) * &(&d34 * &d34),
        &rat(tb, -1, 2) * &(&d21 * &d21),
        &(&rat(tb, 2, 1) * &(&p.value("v1") + &p.value("v2"))) - &rat(tb, 1, 1),
        rat(tb, -1, 2),
    ]
}

fn p6_from_a(p: &ParamAssignment) -> [FieldElem; 4] {
    let tb = p.table();
    let (a1, a2, a3, a4) = (p.value("a1"), p.value("a2"), p.value("a3"), p.value("a4"));
    let sq = |v: &FieldElem| v * v;
    let one = rat(tb, 1, 1);
    [
        &rat(tb, 1, 2) * &sq(&(&a1 - &a2)),
        &rat(tb, -1, 2) * &sq(&(&a3 + &a4)),
        &rat(tb, 1, 2) * &sq(&(&a3 - &a4)),
        &rat(tb, -1, 2) * &(&one - &sq(&(&(&one - &a1) - &a2))),
    ]
}

struct Builder {
    family: FamilyTag,
    params: ParamAssignment,
    second_order: Option<FieldElem>,
    system: Option<(PhasePoly, PhasePoly)>,
    hamiltonian: Option<(PhasePoly, Convention)>,
    notes: Vec<String>,
}

impl Builder {
    fn second(&mut self, tpl: &str, vals: &[(&str, &FieldElem)]) -> Result<(), CatalogError> {
        self.second_order = Some(parse_field(&fill(tpl, vals), self.params.table())?);
        Ok(())
    }

    fn finish(self) -> Result<PainleveInstance, CatalogError> {
        let derivation = match &self.system {
            Some((f, g)) => Some(DVectorField::from_system(f.clone(), g.clone())?),
            None => None,
        };
        let hamiltonian = match (&self.hamiltonian, &self.system) {
            (Some((h, stated)), Some(sys)) => Some(HamiltonianForm::check(h.clone(), *stated, sys)),
            _ => None,
        };
        Ok(PainleveInstance {
            family: self.family,
            params: self.params,
            second_order: self.second_order,
            system: self.system,
            derivation,
            hamiltonian,
            notes: self.notes,
        })
    }
}

fn abcd(a: &[FieldElem]) -> Vec<(&'static str, &FieldElem)> {
    ["alpha", "beta", "gamma", "delta"].into_iter().zip(a.iter()).collect()
}

/// Builds the equation, system, derivation and Hamiltonian of a family member.
pub fn instantiate(family: FamilyTag, params: &ParamAssignment) -> Result<PainleveInstance, CatalogError> {
    instantiate_with(family, params, InstanceOptions::default())
}

pub fn instantiate_with(
    family: FamilyTag,
    params: &ParamAssignment,
    options: InstanceOptions,
) -> Result<PainleveInstance, CatalogError> {
    use FamilyTag::*;
    let coords = params.coordinates_for(family)?;
    if family.is_system_only() && coords == 1 {
        let reduction = reduce_parameters(family, params)?;
        let mut inst = reduction.instance;
        inst.notes.push(format!(
            "parameters converted to ({}) with {}",
            family.coordinate_sets()[0].join(", "),
            reduction
                .relations
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ));
        return Ok(inst);
    }
    let tb = params.table().clone();
    let mut b = Builder {
        family,
        params: params.clone(),
        second_order: None,
        system: None,
        hamiltonian: None,
        notes: Vec::new(),
    };
    let v = |n: &str| params.value(n);
    match (family, coords) {
        (P1, _) => {
            b.second(P1_EQ, &[])?;
            b.system = Some(system_from(&tb, S1_SYS, &[])?);
            let h = if options.p1_corrected_hamiltonian { H1_CORRECTED } else { H1 };
            b.hamiltonian = Some((parse_phase(h, &tb)?, Convention::Minus));
            if !options.p1_corrected_hamiltonian {
                b.notes.push(notes::P1_HAMILTONIAN.into());
            }
        }
        (P2 | S2, _) => {
            let a = v("alpha");
            if family == P2 {
                b.second(P2_EQ, &[("alpha", &a)])?;
                b.notes.push(notes::P2_SYSTEM.into());
            }
            b.system = Some(system_from(&tb, S2_SYS, &[("alpha", &a)])?);
        }
        (P3, _) => {
            let vals: Vec<FieldElem> = ["alpha", "beta", "gamma", "delta"].iter().map(|n| v(n)).collect();
            b.second(P3_EQ, &abcd(&vals))?;
            b.notes.push("reduce_parameters gives the S3prime form".into());
        }
        (P3prime | S3prime, 0) => {
            let (v1, v2) = (v("v1"), v("v2"));
            if family == P3prime {
                let alpha = &rat(&tb, 4, 1) * &v2;
                let beta = &rat(&tb, -4, 1) * &(&v1 - &rat(&tb, 1, 1));
                let vals = [alpha, beta, rat(&tb, 4, 1), rat(&tb, -4, 1)];
                b.second(P3P_EQ, &abcd(&vals))?;
            }
            let vals = [("v1", &v1), ("v2", &v2)];
            b.system = Some(system_from(&tb, S3P_SYS, &vals)?);
            b.hamiltonian = Some((parse_phase(&fill(H3P, &vals), &tb)?, Convention::Minus));
        }
        (P3prime, _) => {
            let vals: Vec<FieldElem> = ["alpha", "beta", "gamma", "delta"].iter().map(|n| v(n)).collect();
            b.second(P3P_EQ, &abcd(&vals))?;
            if vals[2] == rat(&tb, 4, 1) && vals[3] == rat(&tb, -4, 1) {
                let v2 = &vals[0] * &rat(&tb, 1, 4);
                let v1 = &rat(&tb, 1, 1) - &(&vals[1] * &rat(&tb, 1, 4));
                let sv = [("v1", &v1), ("v2", &v2)];
                b.system = Some(system_from(&tb, S3P_SYS, &sv)?);
                b.hamiltonian = Some((parse_phase(&fill(H3P, &sv), &tb)?, Convention::Minus));
                b.notes.push(format!("system with v1 = {v1}, v2 = {v2}"));
            } else {
                b.notes.push("reduce_parameters rescales to (gamma, delta) = (4, -4)".into());
            }
        }
        (P4 | S4, 0) => {
            check_sum_zero(&["v1", "v2", "v3"], params)?;
            if family == P4 {
                let [alpha, beta] = p4_from_v(params);
                b.second(P4_EQ, &[("alpha", &alpha), ("beta", &beta)])?;
            }
            let (v1, v2, v3) = (v("v1"), v("v2"), v("v3"));
            b.system = Some(system_from(&tb, S4_SYS, &[("v1", &v1), ("v2", &v2), ("v3", &v3)])?);
        }
        (P4, _) => {
            b.second(P4_EQ, &[("alpha", &v("alpha")), ("beta", &v("beta"))])?;
            b.notes.push("reduce_parameters gives the S4 form".into());
        }
        (P5 | S5, 0) => {
            check_sum_zero(&["v1", "v2", "v3", "v4"], params)?;
            if family == P5 {
                b.second(P5_EQ, &abcd(&p5_from_v(params)))?;
            }
            let vs: Vec<FieldElem> = ["v1", "v2", "v3", "v4"].iter().map(|n| v(n)).collect();
            let vals: Vec<(&str, &FieldElem)> = ["v1", "v2", "v3", "v4"].into_iter().zip(vs.iter()).collect();
            b.system = Some(system_from(&tb, S5_SYS, &vals)?);
            b.notes.push(notes::S5_FIRST_COMPONENT.into());
            let k0 = &vs[1] - &vs[0];
            let k1 = &vs[2] - &vs[3];
            let theta = &rat(&tb, -2, 1) * &(&vs[0] + &vs[1]);
            let eta = rat(&tb, 1, 1);
            let s = &k0 + &theta;
            let kappa = &rat(&tb, 1, 4) * &(&(&s * &s) - &(&k1 * &k1));
            let hv = fill(H5, &[("k0", &k0), ("theta", &theta), ("eta", &eta), ("kappa", &kappa)]);
            b.hamiltonian = Some((parse_phase(&hv, &tb)?, Convention::Plus));
            b.notes.push(notes::S5_HAMILTONIAN.into());
        }
        (P5, _) => {
            let vals: Vec<FieldElem> = ["alpha", "beta", "gamma", "delta"].iter().map(|n| v(n)).collect();
            b.second(P5_EQ, &abcd(&vals))?;
            b.notes.push("reduce_parameters rescales to delta = -1/2 and gives the S5 form".into());
        }
        (P6 | S6, 0) => {
            if family == P6 {
                let pm = if options.p6_standard_form { "-" } else { "+" };
                let tpl = P6_EQ.replace("{pm}", pm);
                b.second(&tpl, &abcd(&p6_from_a(params)))?;
            }
            let vs: Vec<FieldElem> = ["a1", "a2", "a3", "a4"].iter().map(|n| v(n)).collect();
            let vals: Vec<(&str, &FieldElem)> = ["a1", "a2", "a3", "a4"].into_iter().zip(vs.iter()).collect();
            b.system = Some(system_from(&tb, S6_SYS, &vals)?);
        }
        (P6, _) => {
            let pm = if options.p6_standard_form { "-" } else { "+" };
            let tpl = P6_EQ.replace("{pm}", pm);
            let vals: Vec<FieldElem> = ["alpha", "beta", "gamma", "delta"].iter().map(|n| v(n)).collect();
            b.second(&tpl, &abcd(&vals))?;
            b.notes.push("reduce_parameters gives the S6 form".into());
        }
        _ => unreachable!("coordinate sets cover every family"),
    }
    if family == P6 && !options.p6_standard_form {
        b.notes.push(notes::P6_PRINTED.into());
    }
    b.finish()
}
