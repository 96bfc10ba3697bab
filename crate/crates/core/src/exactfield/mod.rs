//! Exact coefficient fields ℚ(t, parameters) with square-root relations.

mod field;
mod heu;
mod membership;
pub mod mpoly;
mod parse;
mod phase;
mod symbols;

pub use field::FieldElem;
pub use membership::{membership_test, IntegerSet, Membership};
pub use mpoly::{MPoly, Monomial};
pub use parse::{parse, parse_field, parse_phase, Parsed};
pub use phase::{PhaseMono, PhasePoly, PU1, PU2, PX, PY};
pub use symbols::{
    Symbol, SymbolKind, SymbolTable, SymbolTableBuilder, PHASE_SYMBOLS, RESERVED, SYM_S, SYM_T,
    SYM_TARGET_X, SYM_TARGET_Y, SYM_TARGET_YP, SYM_U1, SYM_U2, SYM_X, SYM_Y, SYM_YP,
};

pub type Rat = num_rational::BigRational;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("values belong to different symbol tables")]
    TableMismatch,
    #[error("unknown symbol '{0}'")]
    UnknownSymbol(String),
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("division by zero at offset {offset}")]
    ParseDivisionByZero { offset: usize },
    #[error("division is not exact")]
    InexactDivision,
    #[error("invalid symbol name '{0}'")]
    InvalidSymbol(String),
    #[error("symbol '{0}' declared twice")]
    DuplicateSymbol(String),
    #[error("invalid relation: {0}")]
    InvalidRelation(String),
}
