//! Command-line front end. `run` parses arguments, executes one subcommand
//! and returns the exit code with the text to print, so it is testable
//! without spawning processes.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{classify, instantiate_with, CatalogError, FamilyTag, InstanceOptions, PainleveInstance, ParamAssignment};
use crate::dvariety::{
    darboux_search, first_integral_search, tangent_lift, verify_darboux, DVarietyError, DVectorField, SearchBounds,
};
use crate::exactfield::{parse_phase, PhasePoly, SymbolTable};
use crate::numint::{self, integrate, invariant_drift, relation_probe, PathSpec, ProbeBasis, Trajectory};
use crate::transforms::{self, hamiltonian_check, maps, Convention, Form, TransformReport, VariableMap};

#[derive(Parser, Debug)]
#[command(name = "painleve", version, about = "Exact and numerical checks for Painlevé equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Strong-minimality verdict from the arithmetic criteria
    Classify(InstanceArgs),
    /// Print the equation, system and Hamiltonian of an instance
    Instantiate(InstanceArgs),
    /// Search for Darboux polynomials within degree and cofactor bounds
    Darboux(SearchArgs),
    /// Check D(P) = G·P for a given P
    VerifyInvariant(PolyArgs),
    /// Search for polynomial first integrals (cofactor 0) within bounds
    FirstIntegrals(SearchArgs),
    /// Shifted tangent equations of generators
    TangentLift(TangentArgs),
    /// Verify a named change of variables between two instances
    TransformCheck(TransformArgs),
    /// Compare a system with a Hamiltonian under a sign convention
    HamiltonianCheck(HamiltonianArgs),
    /// Integrate numerically along a polyline
    Integrate(IntegrateArgs),
    /// Largest |P| along a numerical trajectory
    Drift(DriftArgs),
    /// Singular-value probe for polynomial relations along trajectories
    Probe(ProbeArgs),
}

#[derive(Args, Debug, Clone)]
struct InstanceArgs {
    /// Family, e.g. P2, S3', P6
    #[arg(long)]
    family: String,
    /// Parameter NAME=VALUE; VALUE is a rational like 3/2 or sym:NAME
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Use the standard 1/(y-1) term in P6 instead of the printed 1/(y+1)
    #[arg(long)]
    p6_standard: bool,
    /// Use the sign-corrected P1 Hamiltonian
    #[arg(long)]
    p1_corrected: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 2)]
    deg_xy: u32,
    #[arg(long, default_value_t = 1)]
    deg_t: u32,
    #[arg(long, default_value_t = 3)]
    cofactor_box: u32,
    /// Optional cap on the total degree of the cofactor
    #[arg(long)]
    cofactor_deg: Option<u32>,
}

#[derive(Args, Debug)]
struct PolyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Polynomial in x, y with coefficients in t and the parameters
    #[arg(long)]
    poly: String,
}

#[derive(Args, Debug)]
struct TangentArgs {
    /// Generator (repeatable)
    #[arg(long = "poly", required = true)]
    polys: Vec<String>,
    /// Symbol declarations, e.g. a=sym:a
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MapName {
    Identity,
    /// x = y' + y^2 + t/2 from P2 to S2
    #[value(name = "p2-s2")]
    P2S2,
    /// P3 to P3' with new time t^2 and new y = t*y
    #[value(name = "p3-p3prime-ty")]
    P3P3primeTy,
    /// P3 to P3' with new time t^2 and y unchanged
    #[value(name = "p3-p3prime-time")]
    P3P3primeTime,
    /// y -> lambda*y, t -> mu*t on P3' with lambda^2 = 4/gamma
    P3primeScaling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MuChoice {
    /// mu^2 = 1/(gamma*delta)
    Printed,
    /// mu^2 = -16/(gamma*delta)
    Normalizing,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum)]
    map: MapName,
    /// Target family; defaults to the map's usual target
    #[arg(long)]
    target_family: Option<String>,
    /// Target parameters; default to the source parameters
    #[arg(long = "target-param", value_name = "NAME=VALUE")]
    target_params: Vec<String>,
    /// Relation for mu in the P3' scaling
    #[arg(long, value_enum, default_value = "printed")]
    mu: MuChoice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    Minus,
    Plus,
}

#[derive(Args, Debug)]
struct HamiltonianArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Hamiltonian to test; defaults to the instance's own
    #[arg(long)]
    poly: Option<String>,
    #[arg(long, value_enum, default_value = "minus")]
    convention: ConventionArg,
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Waypoints "t0,t1,..." with complex values written a+bi
    #[arg(long)]
    path: String,
    /// Initial values "y0,x0" at the first waypoint (repeatable for probe)
    #[arg(long = "initial", required = true)]
    initial: Vec<String>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Write the (first) trajectory as CSV
    #[arg(long)]
    csv: Option<String>,
}

#[derive(Args, Debug)]
struct DriftArgs {
    #[command(flatten)]
    run: IntegrateArgs,
    #[arg(long)]
    poly: String,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    #[command(flatten)]
    run: IntegrateArgs,
    /// Explicit monomials, e.g. "1, t, y, y^2, yp"
    #[arg(long)]
    basis: Option<String>,
    /// Total degree of the monomial basis when --basis is absent
    #[arg(long, default_value_t = 2)]
    degree: u32,
    #[arg(long, default_value_t = numint::DEFAULT_THRESHOLD)]
    threshold: f64,
}

/// Structured output of one command.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub verdict: Option<String>,
    pub witnesses: Vec<String>,
    pub certificates: Vec<CertificateOut>,
    pub residuals: Vec<ResidualOut>,
    pub citations: Vec<String>,
    pub warnings: Vec<String>,
    pub details: Value,
    #[serde(skip)]
    lines: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateOut {
    #[serde(rename = "P")]
    pub p: String,
    #[serde(rename = "G")]
    pub g: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualOut {
    pub component: String,
    pub value: String,
}

/// Result of a command-line invocation.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum CliError {
    Usage(String),
    Domain(String),
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn catalog_error(e: CatalogError) -> CliError {
    match e {
        CatalogError::UnknownFamily(_) | CatalogError::MissingParameter { .. } | CatalogError::UnexpectedParameter { .. } => {
            usage(format!("catalog: {e}"))
        }
        other => domain(format!("catalog: {other}")),
    }
}

fn dvariety_error(e: DVarietyError) -> CliError {
    domain(format!("dvariety: {e}"))
}

fn transform_error(e: transforms::TransformError) -> CliError {
    domain(format!("transforms: {e}"))
}

fn numint_error(e: numint::NumintError) -> CliError {
    match e {
        numint::NumintError::BadComplex(_) | numint::NumintError::EmptyPath | numint::NumintError::RepeatedWaypoint(..) => {
            usage(format!("numint: {e}"))
        }
        other => domain(format!("numint: {other}")),
    }
}

fn split_specs(specs: &[String]) -> Result<Vec<(String, String)>, CliError> {
    specs
        .iter()
        .map(|s| {
            s.split_once('=')
                .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                .ok_or_else(|| usage(format!("--param expects NAME=VALUE, got {s:?}")))
        })
        .collect()
}

fn family(text: &str) -> Result<FamilyTag, CliError> {
    FamilyTag::from_str(text).map_err(catalog_error)
}

impl InstanceArgs {
    fn options(&self) -> InstanceOptions {
        InstanceOptions {
            p6_standard_form: self.p6_standard,
            p1_corrected_hamiltonian: self.p1_corrected,
        }
    }

    fn params_in(&self, table: Option<&std::sync::Arc<SymbolTable>>) -> Result<ParamAssignment, CliError> {
        let specs = split_specs(&self.params)?;
        match table {
            Some(tb) => ParamAssignment::from_specs_in(tb, &specs),
            None => ParamAssignment::from_specs(&specs),
        }
        .map_err(|e| usage(format!("catalog: {e}")))
    }

    fn load(&self) -> Result<(FamilyTag, PainleveInstance), CliError> {
        let fam = family(&self.family)?;
        let params = self.params_in(None)?;
        let inst = instantiate_with(fam, &params, self.options()).map_err(catalog_error)?;
        Ok((fam, inst))
    }

    fn record(&self, report: &mut RunReport) {
        report.inputs.insert("family".into(), json!(self.family));
        report.inputs.insert("params".into(), json!(self.params));
    }
}

fn derivation(inst: &PainleveInstance) -> Result<&DVectorField, CliError> {
    inst.derivation
        .as_ref()
        .ok_or_else(|| domain(format!("catalog: {} has no polynomial vector field", inst.family)))
}

fn poly(text: &str, table: &std::sync::Arc<SymbolTable>) -> Result<PhasePoly, CliError> {
    parse_phase(text, table).map_err(|e| usage(format!("exactfield: {e} in {text:?}")))
}

fn push_residuals(report: &mut RunReport, r: &TransformReport) {
    for res in &r.residuals {
        report.residuals.push(ResidualOut {
            component: res.component.clone(),
            value: res.value.to_string(),
        });
        report.lines.push(format!("residual {}: {}", res.component, res.value));
    }
    report.warnings.extend(r.notes.iter().cloned());
}

fn set_verdict(report: &mut RunReport, verdict: impl Into<String>) {
    let v = verdict.into();
    report.lines.insert(0, format!("verdict: {v}"));
    report.verdict = Some(v);
}

fn cmd_classify(a: &InstanceArgs, report: &mut RunReport) -> Result<(), CliError> {
    a.record(report);
    let fam = family(&a.family)?;
    let params = a.params_in(None)?;
    let r = classify(fam, &params).map_err(catalog_error)?;
    set_verdict(report, format!("{:?}", r.verdict));
    for w in &r.witnesses {
        report.lines.push(format!("witness: {w}"));
    }
    for c in &r.conditions {
        report.lines.push(format!("  {} with value {}: {:?}", c.condition, c.value, c.membership));
    }
    report.lines.push(format!("citation: {}", r.citation));
    report.witnesses = r.witnesses.clone();
    report.citations.push(r.citation.to_string());
    report.warnings.extend(r.notes.iter().cloned());
    report.details = json!({ "conditions": r.conditions });
    Ok(())
}

fn cmd_instantiate(a: &InstanceArgs, report: &mut RunReport) -> Result<(), CliError> {
    a.record(report);
    let (_, inst) = a.load()?;
    let mut details = serde_json::Map::new();
    if let Some(r) = &inst.second_order {
        report.lines.push(format!("y'' = {r}"));
        details.insert("second_order".into(), json!(r.to_string()));
    }
    if let Some((f, g)) = &inst.system {
        report.lines.push(format!("y' = {f}"));
        report.lines.push(format!("x' = {g}"));
        details.insert("system".into(), json!([f.to_string(), g.to_string()]));
    }
    if let Some(h) = &inst.hamiltonian {
        let holds: Vec<String> = h.holds_under().iter().map(|c| c.to_string()).collect();
        report.lines.push(format!("H = {} (stated {}, holds under: {})", h.h, h.stated, holds.join(", ")));
        details.insert(
            "hamiltonian".into(),
            json!({ "H": h.h.to_string(), "stated": h.stated, "holds_under": holds }),
        );
    }
    report.warnings.extend(inst.notes.iter().cloned());
    report.details = Value::Object(details);
    Ok(())
}

fn bounds_of(a: &SearchArgs) -> SearchBounds {
    let mut b = SearchBounds::new(a.deg_xy, a.deg_t, a.cofactor_box);
    b.cofactor_deg = a.cofactor_deg;
    b
}

/// Clears coefficient denominators before searching: the searched field
/// is c·D, which has the same invariant curves and cofactors scaled by c.
fn cleared(d: &DVectorField, report: &mut RunReport) -> Result<DVectorField, CliError> {
    let (dc, c) = d.clear_denominators().map_err(dvariety_error)?;
    if !c.is_one() {
        report
            .warnings
            .push(format!("denominators cleared: searched ({c})·D; cofactors are reported for D"));
    }
    Ok(dc)
}

fn cmd_darboux(a: &SearchArgs, report: &mut RunReport) -> Result<(), CliError> {
    a.instance.record(report);
    let (_, inst) = a.instance.load()?;
    let d = derivation(&inst)?;
    let dc = cleared(d, report)?;
    let bounds = bounds_of(a);
    let sr = darboux_search(&dc, &bounds).map_err(dvariety_error)?;
    for cert in &sr.certificates {
        let own = verify_darboux(d, cert.p()).map_err(dvariety_error)?;
        report.lines.push(format!("P = {}  G = {}", own.p(), own.cofactor()));
        report.certificates.push(CertificateOut {
            p: own.p().to_string(),
            g: own.cofactor().to_string(),
        });
    }
    set_verdict(report, sr.summary());
    report.details = json!({
        "bounds": sr.bounds,
        "cofactor_monomials": sr.cofactor_monomials,
        "candidates_examined": sr.candidates_examined,
        "exact_solves": sr.exact_solves,
    });
    Ok(())
}

fn cmd_first_integrals(a: &SearchArgs, report: &mut RunReport) -> Result<(), CliError> {
    a.instance.record(report);
    let (_, inst) = a.instance.load()?;
    let dc = cleared(derivation(&inst)?, report)?;
    let found = first_integral_search(&dc, &bounds_of(a)).map_err(dvariety_error)?;
    let verdict = if found.is_empty() {
        "no first integral found within bounds".to_string()
    } else {
        format!("{} first integral(s) found within bounds", found.len())
    };
    for p in &found {
        report.lines.push(format!("P = {p}"));
        report.certificates.push(CertificateOut {
            p: p.to_string(),
            g: "0".into(),
        });
    }
    set_verdict(report, verdict);
    report.details = json!({ "bounds": bounds_of(a) });
    Ok(())
}

fn cmd_verify(a: &PolyArgs, report: &mut RunReport) -> Result<(), CliError> {
    a.instance.record(report);
    report.inputs.insert("poly".into(), json!(a.poly));
    let (_, inst) = a.instance.load()?;
    let d = derivation(&inst)?;
    let p = poly(&a.poly, inst.table())?;
    match verify_darboux(d, &p) {
        Ok(cert) => {
            set_verdict(report, "Invariant");
            report.lines.push(format!("P = {}  G = {}", cert.p(), cert.cofactor()));
            report.certificates.push(CertificateOut {
                p: cert.p().to_string(),
                g: cert.cofactor().to_string(),
            });
        }
        Err(DVarietyError::NotInvariant { image }) => {
            set_verdict(report, "NotInvariant");
            report.lines.push(format!("D(P) = {image}, not a multiple of P"));
            report.details = json!({ "D(P)": image.to_string() });
        }
        Err(e) => return Err(dvariety_error(e)),
    }
    Ok(())
}

fn cmd_tangent(a: &TangentArgs, report: &mut RunReport) -> Result<(), CliError> {
    report.inputs.insert("polys".into(), json!(a.polys));
    report.inputs.insert("params".into(), json!(a.params));
    let specs = split_specs(&a.params)?;
    let table = ParamAssignment::table_for_specs(&specs).map_err(|e| usage(format!("catalog: {e}")))?;
    let gens = a.polys.iter().map(|p| poly(p, &table)).collect::<Result<Vec<_>, _>>()?;
    let lift = tangent_lift(&gens).map_err(dvariety_error)?;
    let mut rows = Vec::new();
    for (i, (g, l)) in lift.generators.iter().zip(&lift.lifted).enumerate() {
        let inh = lift.inhomogeneous(i);
        report.lines.push(format!("{g}  ->  {l}   (inhomogeneous part {inh})"));
        rows.push(json!({ "generator": g.to_string(), "lifted": l.to_string(), "inhomogeneous": inh.to_string() }));
    }
    set_verdict(
        report,
        if lift.is_ordinary_tangent() {
            "OrdinaryTangent"
        } else {
            "ShiftedTangent"
        },
    );
    report.details = json!({ "equations": rows });
    Ok(())
}

fn default_target(map: MapName, source: FamilyTag) -> FamilyTag {
    match map {
        MapName::Identity => source,
        MapName::P2S2 => FamilyTag::S2,
        MapName::P3P3primeTy | MapName::P3P3primeTime | MapName::P3primeScaling => FamilyTag::P3prime,
    }
}

fn cmd_transform(a: &TransformArgs, report: &mut RunReport) -> Result<(), CliError> {
    a.instance.record(report);
    report.inputs.insert("map".into(), json!(format!("{:?}", a.map)));
    let src_fam = family(&a.instance.family)?;
    let tgt_fam = match &a.target_family {
        Some(t) => family(t)?,
        None => default_target(a.map, src_fam),
    };
    let src_specs = split_specs(&a.instance.params)?;
    let tgt_specs = split_specs(&a.target_params)?;
    let all: Vec<(String, String)> = src_specs.iter().chain(&tgt_specs).cloned().collect();
    let table = ParamAssignment::table_for_specs(&all).map_err(|e| usage(format!("catalog: {e}")))?;
    let src_params = a.instance.params_in(Some(&table))?;
    let opts = a.instance.options();
    let (src_params, tgt_params, map) = match a.map {
        MapName::P3primeScaling => {
            let mu = match a.mu {
                MuChoice::Printed => maps::MuRelation::Printed,
                MuChoice::Normalizing => maps::MuRelation::Normalizing,
            };
            let setup = maps::p3prime_scaling_setup(&src_params, mu).map_err(transform_error)?;
            for r in &setup.relations {
                report.lines.push(format!("relation: {r}"));
                report.warnings.push(format!("adjoined {r}"));
            }
            let target = if tgt_specs.is_empty() {
                setup.target_params.clone()
            } else {
                ParamAssignment::from_specs_in(&table, &tgt_specs)
                    .and_then(|p| p.embed(setup.source_params.table()))
                    .map_err(|e| usage(format!("catalog: {e}")))?
            };
            (setup.source_params.clone(), target, setup.map.clone())
        }
        other => {
            let tgt = if tgt_specs.is_empty() {
                src_params.clone()
            } else {
                ParamAssignment::from_specs_in(&table, &tgt_specs).map_err(|e| usage(format!("catalog: {e}")))?
            };
            let map = match other {
                MapName::Identity => {
                    let form = if src_fam.is_system_only() || instantiate_with(src_fam, &src_params, opts).map(|i| i.system.is_some()).unwrap_or(false)
                    {
                        Form::System
                    } else {
                        Form::SecondOrder
                    };
                    VariableMap::identity(&table, form)
                }
                MapName::P2S2 => maps::p2_to_s2(&table).map_err(transform_error)?,
                MapName::P3P3primeTy => maps::p3_to_p3prime_ty_as_y(&table).map_err(transform_error)?,
                MapName::P3P3primeTime => maps::p3_to_p3prime_time_only(&table).map_err(transform_error)?,
                MapName::P3primeScaling => unreachable!(),
            };
            (src_params, tgt, map)
        }
    };
    let source = instantiate_with(src_fam, &src_params, opts).map_err(catalog_error)?;
    let target = instantiate_with(tgt_fam, &tgt_params, opts).map_err(catalog_error)?;
    report.inputs.insert("target_family".into(), json!(tgt_fam.name()));
    report.inputs.insert(
        "target_params".into(),
        json!(tgt_params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>()),
    );
    let r = transforms::verify_transform(&source, &map, &target).map_err(transform_error)?;
    set_verdict(report, format!("{:?}", r.verdict));
    push_residuals(report, &r);
    Ok(())
}

fn cmd_hamiltonian(a: &HamiltonianArgs, report: &mut RunReport) -> Result<(), CliError> {
    a.instance.record(report);
    let (_, inst) = a.instance.load()?;
    let system = inst
        .system
        .as_ref()
        .ok_or_else(|| domain(format!("catalog: {} has no polynomial system", inst.family)))?;
    let h = match (&a.poly, &inst.hamiltonian) {
        (Some(text), _) => poly(text, inst.table())?,
        (None, Some(h)) => h.h.clone(),
        (None, None) => return Err(usage(format!("{} has no stored Hamiltonian; pass --poly", inst.family))),
    };
    if h.uses_lift_variables() {
        return Err(usage("the Hamiltonian must not use u1, u2"));
    }
    let conv = match a.convention {
        ConventionArg::Minus => Convention::Minus,
        ConventionArg::Plus => Convention::Plus,
    };
    report.inputs.insert("H".into(), json!(h.to_string()));
    report.inputs.insert("convention".into(), json!(conv));
    let r = hamiltonian_check(&h, system, conv);
    set_verdict(report, format!("{:?}", r.verdict));
    push_residuals(report, &r);
    report.warnings.extend(inst.notes.iter().cloned());
    Ok(())
}

fn run_trajectories(a: &IntegrateArgs, report: &mut RunReport) -> Result<(PainleveInstance, Vec<Trajectory>), CliError> {
    a.instance.record(report);
    report.inputs.insert("path".into(), json!(a.path));
    report.inputs.insert("initial".into(), json!(a.initial));
    report.inputs.insert("tol".into(), json!(a.tol));
    let (_, inst) = a.instance.load()?;
    let path = PathSpec::parse(&a.path).map_err(numint_error)?;
    let t0 = path.waypoints()[0];
    let mut out = Vec::new();
    for init in &a.initial {
        let parts: Vec<Complex64> = init
            .split(',')
            .map(numint::parse_complex)
            .collect::<Result<_, _>>()
            .map_err(numint_error)?;
        if parts.len() != 2 {
            return Err(usage(format!("--initial expects \"y0,x0\", got {init:?}")));
        }
        let tr = integrate(&inst, (t0, parts[0], parts[1]), &path, a.tol).map_err(numint_error)?;
        if !tr.is_completed() {
            report.warnings.push(format!("trajectory from {init}: {:?}", tr.status));
        }
        out.push(tr);
    }
    if let Some(file) = &a.csv {
        let f = File::create(file).map_err(|e| domain(format!("cannot write {file}: {e}")))?;
        out[0]
            .write_csv(BufWriter::new(f))
            .map_err(|e| domain(format!("cannot write {file}: {e}")))?;
        report.lines.push(format!("wrote {} samples to {file}", out[0].samples.len()));
    }
    Ok((inst, out))
}

fn trajectory_summary(tr: &Trajectory) -> Value {
    let last = tr.samples.last().expect("nonempty");
    json!({
        "status": tr.status,
        "samples": tr.samples.len(),
        "tol": tr.tol,
        "final": { "t": [last.t.re, last.t.im], "y": [last.y.re, last.y.im], "x": [last.x.re, last.x.im] },
    })
}

fn cmd_integrate(a: &IntegrateArgs, report: &mut RunReport) -> Result<(), CliError> {
    let (_, trs) = run_trajectories(a, report)?;
    let tr = &trs[0];
    set_verdict(report, format!("{:?}", tr.status));
    let last = tr.samples.last().expect("nonempty");
    report
        .lines
        .push(format!("{} samples; final t = {}, y = {}, x = {}", tr.samples.len(), last.t, last.y, last.x));
    report.details = json!({ "trajectories": trs.iter().map(trajectory_summary).collect::<Vec<_>>() });
    Ok(())
}

fn cmd_drift(a: &DriftArgs, report: &mut RunReport) -> Result<(), CliError> {
    report.inputs.insert("poly".into(), json!(a.poly));
    let (inst, trs) = run_trajectories(&a.run, report)?;
    let p = poly(&a.poly, inst.table())?;
    let mut drifts = Vec::new();
    for tr in &trs {
        let d = invariant_drift(tr, &p).map_err(numint_error)?;
        report.lines.push(format!("drift of {} along trajectory: {d:e}", a.poly));
        drifts.push(d);
    }
    report.details = json!({
        "drift": drifts,
        "trajectories": trs.iter().map(trajectory_summary).collect::<Vec<_>>(),
    });
    Ok(())
}

fn cmd_probe(a: &ProbeArgs, report: &mut RunReport) -> Result<(), CliError> {
    let (_, trs) = run_trajectories(&a.run, report)?;
    let basis = match &a.basis {
        Some(b) => ProbeBasis::parse(b, trs.len()).map_err(numint_error)?,
        None => ProbeBasis::TotalDegree(a.degree),
    };
    let r = relation_probe(&trs, &basis, a.threshold).map_err(numint_error)?;
    set_verdict(report, format!("{:?}", r.verdict));
    report.lines.push(format!(
        "smallest singular value {:e} (threshold {:e}) over {} rows, basis [{}]",
        r.smallest_singular_value,
        r.threshold,
        r.rows,
        r.basis.join(", ")
    ));
    if let Some(c) = &r.coefficients {
        let terms: Vec<String> = c.iter().zip(&r.basis).map(|(z, m)| format!("({})*{m}", complex_text(*z))).collect();
        report.lines.push(format!("candidate: {} = 0", terms.join(" + ")));
    }
    report.warnings.push(format!(
        "heuristic evidence only, not a proof; threshold {:e} on unit-norm columns",
        r.threshold
    ));
    report.details = serde_json::to_value(&r).unwrap_or(Value::Null);
    Ok(())
}

/// Six significant digits, dropping an imaginary part below 1e-12.
fn complex_text(z: num_complex::Complex64) -> String {
    if z.im.abs() < 1e-12 {
        format!("{:.6e}", z.re)
    } else {
        format!("{:.6e}{:+.6e}i", z.re, z.im)
    }
}

fn dispatch(cmd: &Command, report: &mut RunReport) -> Result<bool, CliError> {
    let json = match cmd {
        Command::Classify(a) => {
            cmd_classify(a, report)?;
            a.json
        }
        Command::Instantiate(a) => {
            cmd_instantiate(a, report)?;
            a.json
        }
        Command::Darboux(a) => {
            cmd_darboux(a, report)?;
            a.instance.json
        }
        Command::VerifyInvariant(a) => {
            cmd_verify(a, report)?;
            a.instance.json
        }
        Command::FirstIntegrals(a) => {
            cmd_first_integrals(a, report)?;
            a.instance.json
        }
        Command::TangentLift(a) => {
            cmd_tangent(a, report)?;
            a.json
        }
        Command::TransformCheck(a) => {
            cmd_transform(a, report)?;
            a.instance.json
        }
        Command::HamiltonianCheck(a) => {
            cmd_hamiltonian(a, report)?;
            a.instance.json
        }
        Command::Integrate(a) => {
            cmd_integrate(a, report)?;
            a.instance.json
        }
        Command::Drift(a) => {
            cmd_drift(a, report)?;
            a.run.instance.json
        }
        Command::Probe(a) => {
            cmd_probe(a, report)?;
            a.run.instance.json
        }
    };
    Ok(json)
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Classify(_) => "classify",
        Command::Instantiate(_) => "instantiate",
        Command::Darboux(_) => "darboux",
        Command::VerifyInvariant(_) => "verify-invariant",
        Command::FirstIntegrals(_) => "first-integrals",
        Command::TangentLift(_) => "tangent-lift",
        Command::TransformCheck(_) => "transform-check",
        Command::HamiltonianCheck(_) => "hamiltonian-check",
        Command::Integrate(_) => "integrate",
        Command::Drift(_) => "drift",
        Command::Probe(_) => "probe",
    }
}

fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    for l in &report.lines {
        out.push_str(l);
        out.push('\n');
    }
    for w in &report.warnings {
        out.push_str("note: ");
        out.push_str(w);
        out.push('\n');
    }
    out
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<String> = args
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let mut report = RunReport {
        command: command_name(&cli.command).to_string(),
        ..Default::default()
    };
    report.inputs.insert("argv".into(), json!(argv.get(1..).unwrap_or(&[])));
    match dispatch(&cli.command, &mut report) {
        Ok(as_json) => Outcome {
            code: 0,
            stdout: if as_json {
                serde_json::to_string_pretty(&report).expect("serializable") + "\n"
            } else {
                render_text(&report)
            },
            stderr: String::new(),
        },
        Err(CliError::Usage(msg)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("usage error: {msg}\nrun `painleve {} --help` for usage\n", report.command),
        },
        Err(CliError::Domain(msg)) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> Outcome {
        run(std::iter::once("painleve").chain(args.iter().copied()))
    }

    #[test]
    fn classify_json() {
        let o = call(&["classify", "--family", "P2", "--param", "alpha=3/2", "--json"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["verdict"], "NotStronglyMinimal");
        assert_eq!(v["witnesses"][0], "alpha ∈ 1/2+Z");
        assert!(v["citations"][0].as_str().unwrap().contains("Cor 3.5"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["classify", "--family", "P2"]).code, 2);
        assert_eq!(call(&["frobnicate"]).code, 2);
        assert_eq!(call(&["classify", "--family", "P2", "--bogus"]).code, 2);
        assert_eq!(call(&["classify", "--family", "P9", "--param", "alpha=1"]).code, 2);
        assert_eq!(call(&["classify", "--family", "P2", "--param", "alpha"]).code, 2);
        let o = call(&["hamiltonian-check", "--family", "P2", "--param", "alpha=0"]);
        assert_eq!(o.code, 2, "{}", o.stderr);
        let o = call(&["integrate", "--family", "P2", "--param", "alpha=sym:a", "--path", "0,1", "--initial", "0,0"]);
        assert_eq!(o.code, 1, "{}", o.stderr);
        assert!(o.stderr.contains("numint"));
        assert_eq!(call(&["--help"]).code, 0);
    }
}
