//! Logarithmic obstruction groups, tropical feasibility and dimension
//! bookkeeping for maps from curves to P^n relative to hyperplane-type
//! divisors.

pub mod dimension;
pub mod document;
pub mod error;
pub mod examples;
pub mod gaussian;
pub mod graph;
pub mod lattice;
pub mod normal_form;
pub mod obstruction;
pub mod positivity;
pub mod report;
pub mod rt;
pub mod sections;
pub mod tropical;

pub use error::{Error, Result};
pub use gaussian::{GaussianRational, P1Point};
