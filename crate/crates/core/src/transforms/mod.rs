//! Exact verification of changes of variables between equations and
//! systems, and of Hamiltonian forms.
//!
//! A map sends source coordinates (y, w, t), with w = y′ for a second-order
//! source and w = x for a system, to target coordinates Y = Φ₁(y, w, t),
//! W = Φ₂(y, w, t) and new time s = σ(t). With D the source vector field,
//! d/ds = D/σ′(t); the target equations are checked by substituting the
//! target right-hand sides at (Φ₁, Φ₂, σ) and comparing. Residuals are
//! exact functions of the source coordinates.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::catalog::PainleveInstance;
use crate::exactfield::{
    parse_field, FieldElem, FieldError, PhasePoly, SymbolTable, PX, PY, SYM_S, SYM_T, SYM_TARGET_X, SYM_TARGET_Y,
    SYM_TARGET_YP, SYM_X, SYM_Y, SYM_YP,
};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("inverse check failed: {0}")]
    InverseMismatch(String),
    #[error("instance has no {0} form")]
    MissingForm(Form),
    #[error("source, target and map use unrelated parameter tables")]
    IncompatibleTables,
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Convention {
    /// y′ = ∂H/∂x, x′ = −∂H/∂y
    Minus,
    /// y′ = ∂H/∂x, x′ = ∂H/∂y
    Plus,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Minus => "minus",
            Convention::Plus => "plus",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Form {
    SecondOrder,
    System,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::SecondOrder => "second-order",
            Form::System => "system",
        })
    }
}

impl Form {
    fn source_w(self) -> usize {
        match self {
            Form::SecondOrder => SYM_YP,
            Form::System => SYM_X,
        }
    }

    fn target_w(self) -> usize {
        match self {
            Form::SecondOrder => SYM_TARGET_YP,
            Form::System => SYM_TARGET_X,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TransformVerdict {
    Match,
    Mismatch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub component: String,
    pub value: FieldElem,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformReport {
    pub verdict: TransformVerdict,
    pub residuals: Vec<Residual>,
    pub notes: Vec<String>,
}

impl TransformReport {
    fn from_residuals(residuals: Vec<Residual>, notes: Vec<String>) -> Self {
        let verdict = if residuals.iter().all(|r| r.value.is_zero()) {
            TransformVerdict::Match
        } else {
            TransformVerdict::Mismatch
        };
        TransformReport {
            verdict,
            residuals,
            notes,
        }
    }

    pub fn is_match(&self) -> bool {
        self.verdict == TransformVerdict::Match
    }
}

/// Residuals of y′ = ∂H/∂x and x′ = ∓∂H/∂y.
pub fn hamiltonian_check(h: &PhasePoly, system: &(PhasePoly, PhasePoly), convention: Convention) -> TransformReport {
    let (f, g) = system;
    let hx = h.partial(PX);
    let hy = h.partial(PY);
    let second = match convention {
        Convention::Minus => g + &hy,
        Convention::Plus => g - &hy,
    };
    let residuals = vec![
        Residual {
            component: "y'".into(),
            value: (f - &hx).to_field(),
        },
        Residual {
            component: "x'".into(),
            value: second.to_field(),
        },
    ];
    TransformReport::from_residuals(residuals, Vec::new())
}

/// New time s = σ(t), with an optional rational inverse t = τ(s).
#[derive(Clone, Debug, PartialEq)]
pub struct TimeChange {
    pub sigma: FieldElem,
    pub tau: Option<FieldElem>,
}

/// A change of dependent (and optionally independent) variables.
#[derive(Clone, Debug, PartialEq)]
pub struct VariableMap {
    pub name: String,
    pub source_form: Form,
    pub target_form: Form,
    /// Y in terms of (y, w, t).
    pub forward_y: FieldElem,
    /// W in terms of (y, w, t); for second-order targets W = dY/ds is derived.
    pub forward_w: Option<FieldElem>,
    /// (y, w) in terms of (Y, W, t).
    pub inverse: (FieldElem, FieldElem),
    pub time: Option<TimeChange>,
}

fn sym(table: &Arc<SymbolTable>, i: usize) -> FieldElem {
    FieldElem::symbol_index(table, i)
}

/// Parses text written with the lower-case source names and renames y, x,
/// yp, t to the target symbols Y, X, Yp and keeps t.
fn parse_in_target(text: &str, table: &Arc<SymbolTable>) -> Result<FieldElem, FieldError> {
    parse_field(text, table)?.substitute(&[
        (SYM_Y, sym(table, SYM_TARGET_Y)),
        (SYM_X, sym(table, SYM_TARGET_X)),
        (SYM_YP, sym(table, SYM_TARGET_YP)),
    ])
}

impl VariableMap {
    pub fn table(&self) -> &Arc<SymbolTable> {
        self.forward_y.table()
    }

    pub fn identity(table: &Arc<SymbolTable>, form: Form) -> VariableMap {
        VariableMap {
            name: "identity".into(),
            source_form: form,
            target_form: form,
            forward_y: sym(table, SYM_Y),
            forward_w: Some(sym(table, form.source_w())),
            inverse: (sym(table, SYM_TARGET_Y), sym(table, form.target_w())),
            time: None,
        }
    }

    /// Second-order equation to system via x = φ(y, yp, t), with inverse
    /// yp = ψ(y, x, t) written in lower-case names.
    pub fn second_order_to_system(table: &Arc<SymbolTable>, phi: &str, psi: &str) -> Result<VariableMap, TransformError> {
        Ok(VariableMap {
            name: format!("x = {phi}"),
            source_form: Form::SecondOrder,
            target_form: Form::System,
            forward_y: sym(table, SYM_Y),
            forward_w: Some(parse_field(phi, table)?),
            inverse: (sym(table, SYM_TARGET_Y), parse_in_target(psi, table)?),
            time: None,
        })
    }

    /// System to second-order equation; `chi` gives x in terms of (y, yp, t).
    pub fn system_to_second_order(table: &Arc<SymbolTable>, chi: &str) -> Result<VariableMap, TransformError> {
        Ok(VariableMap {
            name: format!("x = {chi}"),
            source_form: Form::System,
            target_form: Form::SecondOrder,
            forward_y: sym(table, SYM_Y),
            forward_w: None,
            inverse: (sym(table, SYM_TARGET_Y), parse_in_target(chi, table)?),
            time: None,
        })
    }

    /// Point map of systems (y, x) ↦ (Y, X), inverse written in lower-case
    /// names (y, x standing for Y, X).
    pub fn point(table: &Arc<SymbolTable>, forward: [&str; 2], inverse: [&str; 2]) -> Result<VariableMap, TransformError> {
        Ok(VariableMap {
            name: format!("(y, x) -> ({}, {})", forward[0], forward[1]),
            source_form: Form::System,
            target_form: Form::System,
            forward_y: parse_field(forward[0], table)?,
            forward_w: Some(parse_field(forward[1], table)?),
            inverse: (parse_in_target(inverse[0], table)?, parse_in_target(inverse[1], table)?),
            time: None,
        })
    }

    /// Second-order to second-order with Y = φ(y, t) and inverse y = ψ(Y, t)
    /// (ψ written with y for Y). The inverse for y′ is derived.
    pub fn dependent_scaling(
        table: &Arc<SymbolTable>,
        phi: &str,
        psi: &str,
        time: Option<TimeChange>,
    ) -> Result<VariableMap, TransformError> {
        let forward_y = parse_field(phi, table)?;
        if forward_y.contains_symbol(SYM_YP) {
            return Err(TransformError::Unsupported("Y must not depend on y'".into()));
        }
        let psi = parse_in_target(psi, table)?;
        let k = time_factor(table, time.as_ref())?;
        // Yp = k (φ_t + φ_y yp)  =>  yp = (Yp/k - φ_t)/φ_y at y = ψ.
        let phi_t = forward_y.derive();
        let phi_y = forward_y.partial(SYM_Y);
        let yp = sym(table, SYM_TARGET_YP)
            .checked_div(&k)?
            .try_add(&-&phi_t)?
            .checked_div(&phi_y)?
            .substitute(&[(SYM_Y, psi.clone())])?;
        Ok(VariableMap {
            name: format!("Y = {phi}"),
            source_form: Form::SecondOrder,
            target_form: Form::SecondOrder,
            forward_y,
            forward_w: None,
            inverse: (psi, yp),
            time,
        })
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// The inverse transformation; needs a rational τ when time changes.
    pub fn inverse(&self) -> Result<VariableMap, TransformError> {
        let tb = self.table();
        let (tau_t, time) = match &self.time {
            None => (sym(tb, SYM_T), None),
            Some(tc) => {
                let tau = tc
                    .tau
                    .as_ref()
                    .ok_or_else(|| TransformError::Unsupported("time change has no rational inverse".into()))?;
                let tau_t = tau.substitute(&[(SYM_S, sym(tb, SYM_T))])?;
                let sigma_s = tc.sigma.substitute(&[(SYM_T, sym(tb, SYM_S))])?;
                (
                    tau_t.clone(),
                    Some(TimeChange {
                        sigma: tau_t,
                        tau: Some(sigma_s),
                    }),
                )
            }
        };
        let sw = self.source_form.source_w();
        let tw = self.target_form.target_w();
        let to_source = |e: &FieldElem| -> Result<FieldElem, FieldError> {
            // (Y, W, t_old) -> (y, w', τ(t'))
            e.substitute(&[
                (SYM_TARGET_Y, sym(tb, SYM_Y)),
                (tw, sym(tb, self.target_form.source_w())),
                (SYM_T, tau_t.clone()),
            ])
        };
        let to_target = |e: &FieldElem| -> Result<FieldElem, FieldError> {
            e.substitute(&[
                (SYM_Y, sym(tb, SYM_TARGET_Y)),
                (sw, sym(tb, self.source_form.target_w())),
                (SYM_T, tau_t.clone()),
            ])
        };
        let forward_w = match (&self.forward_w, self.source_form) {
            (_, Form::SecondOrder) => None,
            (_, Form::System) => Some(to_source(&self.inverse.1)?),
        };
        let inverse_w = match &self.forward_w {
            Some(w) => to_target(w)?,
            None => {
                let k = time_factor(tb, self.time.as_ref())?;
                let w = self.derived_w(&k)?;
                to_target(&w)?
            }
        };
        Ok(VariableMap {
            name: format!("inverse of {}", self.name),
            source_form: self.target_form,
            target_form: self.source_form,
            forward_y: to_source(&self.inverse.0)?,
            forward_w,
            inverse: (to_target(&self.forward_y)?, inverse_w),
            time,
        })
    }

    /// Applies `self`, then `next`.
    pub fn then(&self, next: &VariableMap) -> Result<VariableMap, TransformError> {
        if self.target_form != next.source_form {
            return Err(TransformError::Unsupported("forms of composed maps do not line up".into()));
        }
        if self.forward_w.is_none() || next.forward_w.is_none() {
            return Err(TransformError::Unsupported("composition needs explicit W maps".into()));
        }
        let tb = self.table();
        let sigma1 = self.time.as_ref().map(|t| t.sigma.clone()).unwrap_or_else(|| sym(tb, SYM_T));
        let mid_w = self.target_form.source_w();
        let y1 = self.forward_y.clone();
        let w1 = self.forward_w.clone().expect("checked");
        let fwd = |e: &FieldElem| e.substitute(&[(SYM_Y, y1.clone()), (mid_w, w1.clone()), (SYM_T, sigma1.clone())]);
        let time = match (&self.time, &next.time) {
            (None, None) => None,
            _ => {
                let sigma2 = next.time.as_ref().map(|t| t.sigma.clone()).unwrap_or_else(|| sym(tb, SYM_T));
                let tau = match (&self.time, &next.time) {
                    (a, b) => {
                        let tau1 = a.as_ref().map(|t| t.tau.clone()).unwrap_or(Some(sym(tb, SYM_S)));
                        let tau2 = b.as_ref().map(|t| t.tau.clone()).unwrap_or(Some(sym(tb, SYM_S)));
                        match (tau1, tau2) {
                            (Some(t1), Some(t2)) => Some(t1.substitute(&[(SYM_S, t2)])?),
                            _ => None,
                        }
                    }
                };
                Some(TimeChange {
                    sigma: sigma2.substitute(&[(SYM_T, sigma1.clone())])?,
                    tau,
                })
            }
        };
        // Inverse: (Y, W, t) -> next.inverse at t1 = σ1(t) -> self.inverse.
        let tw_mid = self.target_form.target_w();
        let (ny, nw) = (
            next.inverse.0.substitute(&[(SYM_T, sigma1.clone())])?,
            next.inverse.1.substitute(&[(SYM_T, sigma1.clone())])?,
        );
        let back = |e: &FieldElem| e.substitute(&[(SYM_TARGET_Y, ny.clone()), (tw_mid, nw.clone())]);
        Ok(VariableMap {
            name: format!("{} then {}", self.name, next.name),
            source_form: self.source_form,
            target_form: next.target_form,
            forward_y: fwd(&next.forward_y)?,
            forward_w: Some(fwd(next.forward_w.as_ref().expect("checked"))?),
            inverse: (back(&self.inverse.0)?, back(&self.inverse.1)?),
            time,
        })
    }

    fn derived_w(&self, k: &FieldElem) -> Result<FieldElem, FieldError> {
        // Used only for second-order sources: W = k (Y_t + Y_y yp + Y_yp yp')
        // needs yp' and is therefore only defined for maps free of yp.
        let y = &self.forward_y;
        let sw = self.source_form.source_w();
        let d = y.derive().try_add(&sym(y.table(), sw).try_mul(&y.partial(SYM_Y))?)?;
        k.try_mul(&d)
    }

    fn embed(&self, tb: &Arc<SymbolTable>) -> Result<VariableMap, FieldError> {
        Ok(VariableMap {
            name: self.name.clone(),
            source_form: self.source_form,
            target_form: self.target_form,
            forward_y: self.forward_y.embed(tb)?,
            forward_w: self.forward_w.as_ref().map(|w| w.embed(tb)).transpose()?,
            inverse: (self.inverse.0.embed(tb)?, self.inverse.1.embed(tb)?),
            time: self
                .time
                .as_ref()
                .map(|t| -> Result<TimeChange, FieldError> {
                    Ok(TimeChange {
                        sigma: t.sigma.embed(tb)?,
                        tau: t.tau.as_ref().map(|x| x.embed(tb)).transpose()?,
                    })
                })
                .transpose()?,
        })
    }
}

/// ds/dt inverted: d/ds = k·d/dt.
fn time_factor(table: &Arc<SymbolTable>, time: Option<&TimeChange>) -> Result<FieldElem, FieldError> {
    match time {
        None => Ok(FieldElem::one(table)),
        Some(tc) => tc.sigma.derive().inv(),
    }
}

fn common_table(tables: &[&Arc<SymbolTable>]) -> Result<Arc<SymbolTable>, TransformError> {
    tables
        .iter()
        .find(|cand| tables.iter().all(|t| cand.extends(t)))
        .map(|t| (*t).clone())
        .ok_or(TransformError::IncompatibleTables)
}

/// (y′, w′) of an instance in the given form, as field elements.
fn vector_field(inst: &PainleveInstance, form: Form, tb: &Arc<SymbolTable>) -> Result<(FieldElem, FieldElem), TransformError> {
    match form {
        Form::SecondOrder => {
            let r = inst.second_order.as_ref().ok_or(TransformError::MissingForm(form))?;
            Ok((sym(tb, SYM_YP), r.embed(tb)?))
        }
        Form::System => {
            let (f, g) = inst.system.as_ref().ok_or(TransformError::MissingForm(form))?;
            Ok((f.to_field().embed(tb)?, g.to_field().embed(tb)?))
        }
    }
}

fn check_inverse(map: &VariableMap, y: &FieldElem, w: &FieldElem) -> Result<(), TransformError> {
    let tb = map.table();
    let subs = [
        (SYM_Y, map.inverse.0.clone()),
        (map.source_form.source_w(), map.inverse.1.clone()),
    ];
    let back_y = y.substitute(&subs)?;
    let back_w = w.substitute(&subs)?;
    if back_y != sym(tb, SYM_TARGET_Y) {
        return Err(TransformError::InverseMismatch(format!("Y(inverse) = {back_y}")));
    }
    let tw = sym(tb, map.target_form.target_w());
    if back_w != tw {
        return Err(TransformError::InverseMismatch(format!("W(inverse) = {back_w}")));
    }
    if let Some(tc) = &map.time {
        if let Some(tau) = &tc.tau {
            let round = tau.substitute(&[(SYM_S, tc.sigma.clone())])?;
            if round != sym(tb, SYM_T) {
                return Err(TransformError::InverseMismatch(format!("tau(sigma(t)) = {round}")));
            }
        }
    }
    Ok(())
}

/// Pushes the source equation through the map and compares with the target.
pub fn verify_transform(
    source: &PainleveInstance,
    map: &VariableMap,
    target: &PainleveInstance,
) -> Result<TransformReport, TransformError> {
    let tb = common_table(&[source.table(), target.table(), map.table()])?;
    let map = map.embed(&tb)?;
    let (f, g) = vector_field(source, map.source_form, &tb)?;
    let (ft, gt) = vector_field(target, map.target_form, &tb)?;
    let sw = map.source_form.source_w();
    let k = time_factor(&tb, map.time.as_ref())?;
    let dd = |e: &FieldElem| -> Result<FieldElem, FieldError> {
        let a = e.derive();
        let b = f.try_mul(&e.partial(SYM_Y))?;
        let c = g.try_mul(&e.partial(sw))?;
        k.try_mul(&a.try_add(&b)?.try_add(&c)?)
    };
    let y_new = map.forward_y.clone();
    let w_new = match &map.forward_w {
        Some(w) => w.clone(),
        None => dd(&y_new)?,
    };
    check_inverse(&map, &y_new, &w_new)?;
    let sigma = map.time.as_ref().map(|t| t.sigma.clone()).unwrap_or_else(|| sym(&tb, SYM_T));
    let at_image = |e: &FieldElem| {
        e.substitute(&[
            (SYM_Y, y_new.clone()),
            (map.target_form.source_w(), w_new.clone()),
            (SYM_T, sigma.clone()),
        ])
    };
    let r1 = dd(&y_new)?.try_add(&-&at_image(&ft)?)?;
    let r2 = dd(&w_new)?.try_add(&-&at_image(&gt)?)?;
    let labels = match map.target_form {
        Form::System => ["y'", "x'"],
        Form::SecondOrder => ["y'", "y''"],
    };
    let residuals = vec![
        Residual {
            component: labels[0].into(),
            value: r1,
        },
        Residual {
            component: labels[1].into(),
            value: r2,
        },
    ];
    Ok(TransformReport::from_residuals(
        residuals,
        vec![format!("map: {}; residuals in source coordinates", map.name)],
    ))
}

/// Named maps between the families.
pub mod maps {
    use super::*;
    use crate::catalog::{adjoin_roots, ParamAssignment, SquareRelation};

    /// P2 to S2 through x = y′ + y² + t/2.
    pub fn p2_to_s2(table: &Arc<SymbolTable>) -> Result<VariableMap, TransformError> {
        VariableMap::second_order_to_system(table, "yp + y^2 + t/2", "x - y^2 - t/2")
    }

    /// The scaling y = λ·Y, t = μ·s of P3′ for given λ, μ.
    pub fn p3prime_scaling(lambda: &FieldElem, mu: &FieldElem) -> Result<VariableMap, TransformError> {
        let tb = lambda.table();
        let time = TimeChange {
            sigma: sym(tb, SYM_T).checked_div(mu)?,
            tau: Some(mu.try_mul(&sym(tb, SYM_S))?),
        };
        let phi = format!("y/({lambda})");
        let psi = format!("({lambda})*y");
        Ok(VariableMap::dependent_scaling(tb, &phi, &psi, Some(time))?.with_name("y -> lambda*y, t -> mu*t"))
    }

    /// Which relation fixes μ in the P3′ scaling.
    #[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
    pub enum MuRelation {
        /// μ² = 1/(γδ)
        Printed,
        /// μ² = −16/(γδ), the value that makes δ′ = −4
        Normalizing,
    }

    /// The P3′ scaling together with its target parameters
    /// (λα, μβ/λ, 4, −4), where λ² = 4/γ.
    #[derive(Clone, Debug)]
    pub struct ScalingSetup {
        pub map: VariableMap,
        pub source_params: ParamAssignment,
        pub target_params: ParamAssignment,
        pub relations: Vec<SquareRelation>,
    }

    pub fn p3prime_scaling_setup(params: &ParamAssignment, mu: MuRelation) -> Result<ScalingSetup, TransformError> {
        let get = |n: &str| {
            params
                .get(n)
                .cloned()
                .ok_or_else(|| TransformError::Unsupported(format!("P3' scaling needs parameter {n}")))
        };
        let (gamma, delta) = (get("gamma")?, get("delta")?);
        let tb = params.table();
        let gd = gamma.try_mul(&delta)?;
        let lambda_sq = FieldElem::from_int(tb, 4).checked_div(&gamma)?;
        let mu_sq = match mu {
            MuRelation::Printed => gd.inv()?,
            MuRelation::Normalizing => FieldElem::from_int(tb, -16).checked_div(&gd)?,
        };
        let (source, relations) = adjoin_roots(params, &[("lambda", lambda_sq), ("mu", mu_sq)])
            .map_err(|e| TransformError::Unsupported(e.to_string()))?;
        let ext = source.table().clone();
        let (lambda, mu) = (relations[0].root.clone(), relations[1].root.clone());
        let value = |n: &str| source.get(n).cloned().expect("checked above");
        let mut target = ParamAssignment::new(&ext);
        let ins = |t: &mut ParamAssignment, n: &str, v: FieldElem| {
            t.insert(n, v).map_err(|e| TransformError::Unsupported(e.to_string()))
        };
        ins(&mut target, "alpha", lambda.try_mul(&value("alpha"))?)?;
        ins(&mut target, "beta", mu.try_mul(&value("beta"))?.checked_div(&lambda)?)?;
        ins(&mut target, "gamma", FieldElem::from_int(&ext, 4))?;
        ins(&mut target, "delta", FieldElem::from_int(&ext, -4))?;
        Ok(ScalingSetup {
            map: p3prime_scaling(&lambda, &mu)?,
            source_params: source,
            target_params: target,
            relations,
        })
    }

    /// P3 to P3′ reading the substitution as new t = t², new y = t·y.
    pub fn p3_to_p3prime_ty_as_y(table: &Arc<SymbolTable>) -> Result<VariableMap, TransformError> {
        let time = TimeChange {
            sigma: parse_field("t^2", table)?,
            tau: None,
        };
        Ok(VariableMap::dependent_scaling(table, "t*y", "y/t", Some(time))?.with_name("t^2 -> t, t*y -> y"))
    }

    /// P3 to P3′ reading the substitution as only new t = t², y unchanged.
    pub fn p3_to_p3prime_time_only(table: &Arc<SymbolTable>) -> Result<VariableMap, TransformError> {
        let time = TimeChange {
            sigma: parse_field("t^2", table)?,
            tau: None,
        };
        Ok(VariableMap::dependent_scaling(table, "y", "y", Some(time))?.with_name("t^2 -> t, y unchanged"))
    }
}
