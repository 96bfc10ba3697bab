//! Algebraic ∂-varieties on the affine plane: polynomial vector fields over
//! the coefficient field, the shifted tangent bundle, and Darboux polynomials.

mod linalg;
mod search;

use std::sync::Arc;

use crate::exactfield::{FieldElem, FieldError, MPoly, PhasePoly, SymbolTable, PU1, PU2, PX, PY};

pub use search::{darboux_search, first_integral_search, SearchBounds, SearchReport};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DVarietyError {
    #[error("the ∂-coefficient e must be nonzero")]
    ZeroTimeComponent,
    #[error("vector field components and invariants must not involve u1, u2")]
    LiftVariables,
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("polynomial is constant in x and y")]
    ConstantPolynomial,
    #[error("not invariant: D(P) = {image} is not divisible by P")]
    NotInvariant { image: PhasePoly },
    #[error("rescaling factor is zero")]
    ZeroScale,
    #[error("search needs coefficients in Q[t]: {0}")]
    UnsupportedCoefficients(String),
    #[error("bounds too large: {0}")]
    BoundsTooLarge(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// D = e·∂ + f·∂/∂y + g·∂/∂x, with ∂ acting on coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct DVectorField {
    e: PhasePoly,
    f: PhasePoly,
    g: PhasePoly,
}

impl DVectorField {
    pub fn new(e: PhasePoly, f: PhasePoly, g: PhasePoly) -> Result<Self, DVarietyError> {
        if e.is_zero() {
            return Err(DVarietyError::ZeroTimeComponent);
        }
        if [&e, &f, &g].iter().any(|p| p.uses_lift_variables()) {
            return Err(DVarietyError::LiftVariables);
        }
        let table = e.table().clone();
        if f.table() != &table || g.table() != &table {
            return Err(FieldError::TableMismatch.into());
        }
        Ok(DVectorField { e, f, g })
    }

    /// The field of a first-order system y′ = f, x′ = g (e = 1).
    pub fn from_system(f: PhasePoly, g: PhasePoly) -> Result<Self, DVarietyError> {
        let one = PhasePoly::constant(FieldElem::one(f.table()));
        DVectorField::new(one, f, g)
    }

    pub fn e(&self) -> &PhasePoly {
        &self.e
    }

    pub fn f(&self) -> &PhasePoly {
        &self.f
    }

    pub fn g(&self) -> &PhasePoly {
        &self.g
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        self.e.table()
    }

    /// D(P) = e·P^∂ + f·∂P/∂y + g·∂P/∂x.
    pub fn apply(&self, p: &PhasePoly) -> PhasePoly {
        let a = &self.e * &p.coeff_derive();
        let b = &self.f * &p.partial(PY);
        let c = &self.g * &p.partial(PX);
        &(&a + &b) + &c
    }

    /// (c·e, c·f, c·g).
    pub fn rescale(&self, c: &PhasePoly) -> Result<DVectorField, DVarietyError> {
        if c.is_zero() {
            return Err(DVarietyError::ZeroScale);
        }
        DVectorField::new(&self.e * c, &self.f * c, &self.g * c)
    }

    pub fn rescale_field(&self, c: &FieldElem) -> Result<DVectorField, DVarietyError> {
        self.rescale(&PhasePoly::constant(c.clone()))
    }

    /// Multiplies through by the lcm of all coefficient denominators,
    /// returning the rescaled field and the factor used.
    pub fn clear_denominators(&self) -> Result<(DVectorField, FieldElem), DVarietyError> {
        let mut l = MPoly::one();
        for p in [&self.e, &self.f, &self.g] {
            for (_, c) in p.terms() {
                l = crate::exactfield::mpoly::lcm(&l, c.denom());
            }
        }
        let c = FieldElem::from_poly(self.table(), l);
        Ok((self.rescale_field(&c)?, c))
    }
}

/// Evidence that P cuts out a ∂-subvariety: D(P) = G·P.
#[derive(Clone, Debug, PartialEq)]
pub struct DarbouxCertificate {
    p: PhasePoly,
    g: PhasePoly,
}

impl DarbouxCertificate {
    /// Checks D(P) = G·P exactly.
    pub fn new(d: &DVectorField, p: PhasePoly, g: PhasePoly) -> Result<Self, DVarietyError> {
        let image = d.apply(&p);
        if image != &g * &p {
            return Err(DVarietyError::NotInvariant { image });
        }
        Ok(DarbouxCertificate { p, g })
    }

    pub fn p(&self) -> &PhasePoly {
        &self.p
    }

    pub fn cofactor(&self) -> &PhasePoly {
        &self.g
    }
}

pub fn apply_derivation(d: &DVectorField, p: &PhasePoly) -> Result<PhasePoly, DVarietyError> {
    if p.uses_lift_variables() {
        return Err(DVarietyError::LiftVariables);
    }
    Ok(d.apply(p))
}

/// Divides D(P) by P; succeeds exactly when P is a Darboux polynomial.
pub fn verify_darboux(d: &DVectorField, p: &PhasePoly) -> Result<DarbouxCertificate, DVarietyError> {
    if p.is_zero() {
        return Err(DVarietyError::ZeroPolynomial);
    }
    if p.is_constant() {
        return Err(DVarietyError::ConstantPolynomial);
    }
    if p.uses_lift_variables() {
        return Err(DVarietyError::LiftVariables);
    }
    let image = d.apply(p);
    match image.exact_divide(p) {
        Ok(g) => DarbouxCertificate::new(d, p.clone(), g),
        Err(FieldError::InexactDivision) => Err(DVarietyError::NotInvariant { image }),
        Err(e) => Err(e.into()),
    }
}

pub fn rescale(d: &DVectorField, c: &PhasePoly) -> Result<DVectorField, DVarietyError> {
    d.rescale(c)
}

/// Generators of a subvariety together with their shifted-tangent equations
/// (∂P/∂x)·u1 + (∂P/∂y)·u2 + P^∂.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentLift {
    pub generators: Vec<PhasePoly>,
    pub lifted: Vec<PhasePoly>,
}

impl TangentLift {
    /// The u-free part of the i-th lifted equation, i.e. P_i^∂.
    pub fn inhomogeneous(&self, i: usize) -> PhasePoly {
        let lifted = &self.lifted[i];
        let mut r = PhasePoly::zero(lifted.table());
        for (m, c) in lifted.terms() {
            if m.0[PU1] == 0 && m.0[PU2] == 0 {
                r.add_term(*m, c.clone());
            }
        }
        r
    }

    /// True when every lifted equation is an ordinary tangent equation.
    pub fn is_ordinary_tangent(&self) -> bool {
        (0..self.lifted.len()).all(|i| self.inhomogeneous(i).is_zero())
    }
}

pub fn tangent_lift(generators: &[PhasePoly]) -> Result<TangentLift, DVarietyError> {
    let mut lifted = Vec::with_capacity(generators.len());
    for p in generators {
        if p.uses_lift_variables() {
            return Err(DVarietyError::LiftVariables);
        }
        let table = p.table();
        let u1 = PhasePoly::var(table, PU1);
        let u2 = PhasePoly::var(table, PU2);
        let l = &(&(&p.partial(PX) * &u1) + &(&p.partial(PY) * &u2)) + &p.coeff_derive();
        lifted.push(l);
    }
    Ok(TangentLift {
        generators: generators.to_vec(),
        lifted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::parse_phase;

    fn s2(alpha: &str) -> DVectorField {
        let tb = SymbolTable::plain();
        DVectorField::from_system(
            parse_phase("x - y^2 - t/2", &tb).unwrap(),
            parse_phase(&format!("2*x*y + ({alpha}) + 1/2"), &tb).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn p1_applied_to_hamiltonian() {
        let tb = SymbolTable::plain();
        let d = DVectorField::from_system(
            parse_phase("x", &tb).unwrap(),
            parse_phase("6*y^2 + t", &tb).unwrap(),
        )
        .unwrap();
        let h = parse_phase("x^2/2 - 2*y^3 + t*y", &tb).unwrap();
        assert_eq!(d.apply(&h), parse_phase("y + 2*t*x", &tb).unwrap());
        let five = parse_phase("5", &tb).unwrap();
        assert!(d.apply(&five).is_zero());
    }

    #[test]
    fn riccati_curves() {
        let tb = SymbolTable::plain();
        let c = verify_darboux(&s2("-1/2"), &parse_phase("x", &tb).unwrap()).unwrap();
        assert_eq!(c.cofactor(), &parse_phase("2*y", &tb).unwrap());
        let c = verify_darboux(&s2("1/2"), &parse_phase("x - 2*y^2 - t", &tb).unwrap()).unwrap();
        assert_eq!(c.cofactor(), &parse_phase("-2*y", &tb).unwrap());
        let err = verify_darboux(&s2("0"), &parse_phase("x", &tb).unwrap()).unwrap_err();
        assert_eq!(
            err,
            DVarietyError::NotInvariant {
                image: parse_phase("2*x*y + 1/2", &tb).unwrap()
            }
        );
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let tb = SymbolTable::plain();
        let d = s2("0");
        assert_eq!(verify_darboux(&d, &PhasePoly::zero(&tb)), Err(DVarietyError::ZeroPolynomial));
        assert_eq!(
            verify_darboux(&d, &parse_phase("t", &tb).unwrap()),
            Err(DVarietyError::ConstantPolynomial)
        );
        assert_eq!(d.rescale(&PhasePoly::zero(&tb)), Err(DVarietyError::ZeroScale));
    }

    #[test]
    fn rescale_by_t() {
        let tb = SymbolTable::plain();
        let d = s2("-1/2").rescale_field(&FieldElem::t(&tb)).unwrap();
        let c = verify_darboux(&d, &parse_phase("x", &tb).unwrap()).unwrap();
        assert_eq!(c.cofactor(), &parse_phase("2*t*y", &tb).unwrap());
        assert_eq!(s2("0").rescale_field(&FieldElem::one(&tb)).unwrap(), s2("0"));
    }

    #[test]
    fn clears_time_denominators() {
        let tb = SymbolTable::plain();
        let d = DVectorField::from_system(
            parse_phase("x/t", &tb).unwrap(),
            parse_phase("y/(t^2 - t) + 1", &tb).unwrap(),
        )
        .unwrap();
        let (cleared, c) = d.clear_denominators().unwrap();
        assert_eq!(c.to_string(), "t^2 - t");
        assert_eq!(cleared.e(), &parse_phase("t^2 - t", &tb).unwrap());
        assert_eq!(cleared.f(), &parse_phase("t*x - x", &tb).unwrap());
    }

    #[test]
    fn tangent_lifts() {
        let tb = SymbolTable::plain();
        let circle = tangent_lift(&[parse_phase("x^2 + y^2 - 1", &tb).unwrap()]).unwrap();
        assert_eq!(circle.lifted[0], parse_phase("2*x*u1 + 2*y*u2", &tb).unwrap());
        assert!(circle.is_ordinary_tangent());

        let tb = SymbolTable::builder()
            .transcendental("da")
            .varying("a", "da")
            .build()
            .unwrap();
        let legendre = tangent_lift(&[parse_phase("y^2 - x^3 + (1 + a)*x^2 - a*x", &tb).unwrap()]).unwrap();
        let expected = parse_phase("(-3*x^2 + 2*(1 + a)*x - a)*u1 + 2*y*u2 + da*(x^2 - x)", &tb).unwrap();
        assert_eq!(legendre.lifted[0], expected);
        assert_eq!(legendre.inhomogeneous(0), parse_phase("da*(x^2 - x)", &tb).unwrap());
        assert!(tangent_lift(&[]).unwrap().lifted.is_empty());
    }
}
