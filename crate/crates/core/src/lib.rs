//! Algebra of preferences and utility inference.
//!
//! Preference expressions over attribute levels ([`expr`]) are
//! canonicalized symbolically, interpreted as sets of grid cells
//! ([`domain`]), and evaluated under an attribute-dominance utility model
//! ([`engine`]). The grid interpretation doubles as a brute-force oracle for
//! the evaluator.

pub mod axioms;
mod boxes;
pub mod cli;
pub mod curves;
pub mod domain;
pub mod engine;
pub mod error;
pub mod expr;
pub mod gen;
pub mod identities;
pub mod model_file;
pub mod syntax;

pub use curves::{npv_disjunction_check, product_model, CurveFamily, UtilityCurve};
pub use domain::{
    domains_equal, eval_domain, measure, mobius_masses, AttributeSpace, DomainSet, MassFunction,
};
pub use engine::{
    bayes_update, check_utility_independence, conditional_utility, disjunction_given, eval_utility,
    validate_model, JointUtility, UtilityModel,
};
pub use error::{Error, Result};
pub use expr::{canonical_equal, simplify, to_nnf, Atom, AttributeId, PreferenceExpr};
pub use model_file::load_model;
pub use syntax::{format, parse};
