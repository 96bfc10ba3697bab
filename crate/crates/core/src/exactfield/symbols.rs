use std::collections::HashMap;
use std::sync::Arc;

use super::mpoly::MPoly;
use super::{FieldElem, FieldError};

/// Index of the independent variable `t` in every table.
pub const SYM_T: usize = 0;
/// Phase and change-of-variable coordinates, present in every table.
pub const SYM_Y: usize = 1;
pub const SYM_X: usize = 2;
pub const SYM_YP: usize = 3;
pub const SYM_U1: usize = 4;
pub const SYM_U2: usize = 5;
pub const SYM_TARGET_Y: usize = 6;
pub const SYM_TARGET_X: usize = 7;
pub const SYM_TARGET_YP: usize = 8;
pub const SYM_S: usize = 9;

/// Names reserved for the independent variable and the coordinates.
pub const RESERVED: [&str; 10] = ["t", "y", "x", "yp", "u1", "u2", "Y", "X", "Yp", "s"];

/// Phase variables of a [`PhasePoly`](super::PhasePoly), in phase order.
pub const PHASE_SYMBOLS: [usize; 4] = [SYM_X, SYM_Y, SYM_U1, SYM_U2];

#[derive(Clone, Debug, PartialEq)]
pub enum SymbolKind {
    /// `t`, with ∂t = 1.
    IndependentVariable,
    /// Coordinates (phase variables, source/target variables of a map).
    /// Constant under ∂, which acts on coefficients only.
    Coordinate,
    /// A constant algebraically independent of everything declared before.
    Transcendental,
    /// `s` with `s² = num/den`; the right-hand side only uses earlier symbols.
    Radical { num: MPoly, den: MPoly },
    /// A non-constant coefficient with a declared derivative.
    Varying { num: MPoly, den: MPoly },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
}

/// Ordered symbols of a coefficient field ℚ(t, parameters)[radicals].
///
/// The first entries are always `t` followed by the reserved coordinates;
/// user symbols follow in declaration order. The order fixes the monomial
/// order used for canonical forms.
#[derive(Clone, Debug)]
pub struct SymbolTable {
    symbols: Vec<Symbol>,
    index: HashMap<String, usize>,
}

impl PartialEq for SymbolTable {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl SymbolTable {
    fn base() -> SymbolTable {
        let mut table = SymbolTable {
            symbols: Vec::new(),
            index: HashMap::new(),
        };
        for (i, name) in RESERVED.iter().enumerate() {
            let kind = if i == SYM_T {
                SymbolKind::IndependentVariable
            } else {
                SymbolKind::Coordinate
            };
            table.push(name, kind);
        }
        table
    }

    fn push(&mut self, name: &str, kind: SymbolKind) {
        self.index.insert(name.to_string(), self.symbols.len());
        self.symbols.push(Symbol {
            name: name.to_string(),
            kind,
        });
    }

    /// A table with only `t` and the coordinates.
    pub fn plain() -> Arc<SymbolTable> {
        Arc::new(SymbolTable::base())
    }

    pub fn builder() -> SymbolTableBuilder {
        SymbolTableBuilder {
            table: SymbolTable::base(),
            error: None,
        }
    }

    /// Builder seeded with this table's symbols; existing indices are kept,
    /// so values of `self` stay valid in the extended table.
    pub fn extend(&self) -> SymbolTableBuilder {
        SymbolTableBuilder {
            table: self.clone(),
            error: None,
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn symbol(&self, index: usize) -> &Symbol {
        &self.symbols[index]
    }

    pub fn name(&self, index: usize) -> &str {
        &self.symbols[index].name
    }

    pub fn kind(&self, index: usize) -> &SymbolKind {
        &self.symbols[index].kind
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn is_radical(&self, index: usize) -> bool {
        matches!(self.symbols.get(index).map(|s| &s.kind), Some(SymbolKind::Radical { .. }))
    }

    /// Radical indices, latest first.
    pub fn radicals_desc(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.symbols.len()).rev().filter(|&i| self.is_radical(i))
    }

    pub fn has_radicals(&self) -> bool {
        self.radicals_desc().next().is_some()
    }

    /// Whether `self` is `other` plus (possibly) extra trailing symbols.
    pub fn extends(&self, other: &SymbolTable) -> bool {
        self.symbols.len() >= other.symbols.len()
            && self.symbols[..other.symbols.len()] == other.symbols[..]
    }
}

pub struct SymbolTableBuilder {
    table: SymbolTable,
    error: Option<FieldError>,
}

impl SymbolTableBuilder {
    fn check_name(&mut self, name: &str) -> bool {
        if self.error.is_some() {
            return false;
        }
        let valid = name
            .chars()
            .next()
            .is_some_and(|c| c.is_alphabetic() || c == '_')
            && name
                .chars()
                .all(|c| c.is_alphanumeric() || c == '_' || c == '\'');
        if !valid {
            self.error = Some(FieldError::InvalidSymbol(name.to_string()));
            return false;
        }
        if self.table.index.contains_key(name) {
            self.error = Some(FieldError::DuplicateSymbol(name.to_string()));
            return false;
        }
        true
    }

    fn parse_rhs(&mut self, text: &str) -> Option<FieldElem> {
        let partial = Arc::new(self.table.clone());
        match super::parse::parse_field(text, &partial) {
            Ok(v) => Some(v),
            Err(e) => {
                self.error = Some(e);
                None
            }
        }
    }

    pub fn transcendental(mut self, name: &str) -> Self {
        if self.check_name(name) {
            self.table.push(name, SymbolKind::Transcendental);
        }
        self
    }

    /// Declares `name` with `name² = rhs`, `rhs` written over the symbols
    /// declared so far.
    pub fn radical(mut self, name: &str, rhs: &str) -> Self {
        if !self.check_name(name) {
            return self;
        }
        if let Some(v) = self.parse_rhs(rhs) {
            self = self.radical_elem(name, &v);
        }
        self
    }

    pub fn radical_elem(mut self, name: &str, rhs: &FieldElem) -> Self {
        if self.error.is_some() {
            return self;
        }
        if !self.table.index.contains_key(name) && !self.check_name(name) {
            return self;
        }
        if rhs.is_zero() {
            self.error = Some(FieldError::InvalidRelation(format!("{name}² = 0")));
            return self;
        }
        if !self.table.extends(rhs.table()) && !rhs.table().extends(&self.table) {
            self.error = Some(FieldError::TableMismatch);
            return self;
        }
        self.table.push(
            name,
            SymbolKind::Radical {
                num: rhs.numer().clone(),
                den: rhs.denom().clone(),
            },
        );
        self
    }

    /// Declares a non-constant coefficient `name` whose derivative is `derivative`.
    pub fn varying(mut self, name: &str, derivative: &str) -> Self {
        if !self.check_name(name) {
            return self;
        }
        if let Some(v) = self.parse_rhs(derivative) {
            self.table.push(
                name,
                SymbolKind::Varying {
                    num: v.numer().clone(),
                    den: v.denom().clone(),
                },
            );
        }
        self
    }

    pub fn build(self) -> Result<Arc<SymbolTable>, FieldError> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(Arc::new(self.table)),
        }
    }
}
