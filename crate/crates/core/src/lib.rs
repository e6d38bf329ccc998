//! Inconsistency measurement for knowledge bases of linear temporal logic
//! formulas over fixed-length finite traces.
//!
//! The crate is layered bottom-up: [`formula`] (syntax), [`kb`] (knowledge
//! bases and the `.ltlkb` format), [`trace`] (two- and three-valued
//! evaluation), [`solver`] (search), [`measures`], [`declare`]
//! (process-model translation), [`postulates`] and [`report`].

pub mod declare;
pub mod formula;
pub mod kb;
pub mod measures;
pub mod postulates;
pub mod report;
pub mod solver;
pub mod trace;

pub use formula::{parse_formula, Formula, GMode};
pub use kb::KnowledgeBase;
pub use measures::MeasureId;
pub use solver::{CostMode, MeasureValue, SolverConfig};
pub use trace::{Interpretation3, TruthValue3};
