//! Exact and numerical tools for Painlevé equations: coefficient fields,
//! D-varieties and Darboux polynomials, the equation catalogue, variable
//! changes and numerical integration.

pub mod exactfield;
pub mod dvariety;
pub mod catalog;
pub mod transforms;
pub mod numint;
pub mod cli;
