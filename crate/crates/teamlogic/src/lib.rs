//! Toolkit for team-semantics modal logics: modal inclusion logic and the
//! two might-operator variants.
//!
//! The crate provides, module by module:
//!
//! * [`syntax`] — formula ASTs, an ASCII parser and printer, modal depth,
//!   classicality, classical substitution;
//! * [`kripke`] — finite Kripke models, teams, images, successor-team
//!   enumeration, disjoint unions, and the JSON model format;
//! * [`semantics`] — the team satisfaction relation, maximal satisfying
//!   subteams, a classical single-world evaluator, and a naive reference
//!   evaluator kept in-tree as an oracle;
//! * [`bisim`] — world and team bounded bisimulation, Hintikka formulas,
//!   and team characteristic formulas;
//! * [`normal_form`] — world-type enumeration, the stratified canonical
//!   model, team-type properties, and normal-form compilation;
//! * [`decision`] — entailment and equivalence via normal forms or
//!   bounded countermodel search;
//! * [`proof`] — a natural-deduction proof checker for the three systems,
//!   with a fixture library of checked derivations;
//! * [`fo`] — first-order inclusion logic, the standard translation, and
//!   its team-semantics evaluator;
//! * [`corpus`] — deterministic random formula generation for test
//!   corpora.

pub mod bisim;
pub mod corpus;
pub mod decision;
pub mod fo;
pub mod kripke;
pub mod normal_form;
pub mod proof;
pub mod semantics;
pub mod syntax;

pub use kripke::{KripkeModel, Team};
pub use syntax::{Formula, Logic, PropSet};
