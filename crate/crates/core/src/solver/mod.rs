//! Classical satisfiability and B-cost minimization over fixed traces.
//!
//! [`sat2`], [`decide_upper`] and [`minimize`] run a propagating
//! branch-and-bound search. [`enumerate_models3`] is an independent
//! exhaustive scan over every assignment, kept for cross-checking on small
//! signatures.

mod engine;
mod oracle;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::kb::KnowledgeBase;
use crate::trace::{satisfies2, satisfies3, ConflictBase, EvalError, Interpretation3};

use engine::{Budget, Compiled, Search};

pub use oracle::{enumerate_models3, oracle_min_conflict_signatures, oracle_minimize, Models};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;
pub const DEFAULT_ORACLE_CAP: usize = 12;

/// Which count of `B` cells a three-valued model is charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CostMode {
    /// Number of states with at least one `B` atom.
    AffectedStates,
    /// Number of `(state, atom)` cells set to `B`.
    ConflictBase,
    /// Number of atoms that are `B` in at least one state.
    ConflictAtoms,
}

/// A non-negative integer or `∞`, ordered with `∞` above every integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeasureValue {
    Finite(u64),
    Infinite,
}

impl MeasureValue {
    pub fn is_zero(self) -> bool {
        self == MeasureValue::Finite(0)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            MeasureValue::Finite(v) => Some(v),
            MeasureValue::Infinite => None,
        }
    }
}

impl From<u64> for MeasureValue {
    fn from(v: u64) -> Self {
        MeasureValue::Finite(v)
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureValue::Finite(v) => write!(f, "{v}"),
            MeasureValue::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for MeasureValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "∞" => Ok(MeasureValue::Infinite),
            _ => s.parse().map(MeasureValue::Finite).map_err(|_| format!("invalid measure value `{s}`")),
        }
    }
}

/// Integers serialize as numbers, `∞` as the string `"inf"`.
impl Serialize for MeasureValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MeasureValue::Finite(v) => s.serialize_u64(*v),
            MeasureValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for MeasureValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(MeasureValue::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(MeasureValue::Infinite),
            Raw::Str(s) => Err(D::Error::custom(format!("invalid measure value `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("node budget of {budget} expansions exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("oracle limited to {cap} cells, instance has {cells}")]
    OracleCap { cells: usize, cap: usize },
    #[error("knowledge base is consistent")]
    NotInconsistent,
    #[error("knowledge base has no three-valued model")]
    NoThreeValuedModel,
    #[error("internal error: search produced a witness that fails re-evaluation")]
    WitnessRejected,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    /// Maximum search-node expansions per solve call.
    pub node_budget: u64,
    /// Maximum `(m+1)·|At|` accepted by the exhaustive oracle.
    pub oracle_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { node_budget: DEFAULT_NODE_BUDGET, oracle_cap: DEFAULT_ORACLE_CAP }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SolverStats {
    pub nodes: u64,
    pub probes: u64,
}

impl SolverStats {
    pub fn absorb(&mut self, other: SolverStats) {
        self.nodes += other.nodes;
        self.probes += other.probes;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub value: MeasureValue,
    /// Present iff `value` is finite; realizes `value`.
    pub witness: Option<Interpretation3>,
    pub stats: SolverStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sat2Result {
    pub satisfiable: bool,
    pub witness: Option<Interpretation3>,
    pub stats: SolverStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperResult {
    pub holds: bool,
    pub witness: Option<Interpretation3>,
    pub stats: SolverStats,
}

/// Distinct conflict bases among models with the minimum number of
/// affected states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinConflictSignatures {
    pub min_affected: u64,
    /// Sorted, duplicate-free.
    pub bases: Vec<ConflictBase>,
    /// Every minimal model over the KB's own atoms, without quotienting.
    pub raw_interpretations: u64,
    pub stats: SolverStats,
}

impl MinConflictSignatures {
    pub fn count(&self) -> usize {
        self.bases.len()
    }
}

/// `cost(ν, mode)`, recomputed from the interpretation.
pub fn cost(nu: &Interpretation3, mode: CostMode) -> u64 {
    (match mode {
        CostMode::AffectedStates => nu.affected_states().len(),
        CostMode::ConflictBase => nu.conflict_base().len(),
        CostMode::ConflictAtoms => nu.conflicting_atoms().len(),
    }) as u64
}

/// Largest cost any interpretation over the KB's atoms can have.
pub fn cost_upper_bound(kb: &KnowledgeBase, mode: CostMode) -> u64 {
    let atoms = kb.atoms().len() as u64;
    let states = kb.num_states() as u64;
    match mode {
        CostMode::AffectedStates => states,
        CostMode::ConflictBase => states * atoms,
        CostMode::ConflictAtoms => atoms,
    }
}

fn compile(kb: &KnowledgeBase) -> Compiled {
    let atoms: BTreeSet<String> = kb.atoms();
    Compiled::new(&kb.expanded(), atoms.into_iter().collect(), kb.m())
}

fn first_model(c: &Compiled, budget: Budget, config: &SolverConfig) -> Result<(Option<Interpretation3>, u64), SolverError> {
    let mut search = Search::new(c, budget, config.node_budget);
    let mut found = None;
    search.run(&mut |nu| {
        found = Some(nu);
        ControlFlow::Break(())
    })?;
    Ok((found, search.nodes))
}

/// Is there a two-valued model of the knowledge base?
pub fn sat2(kb: &KnowledgeBase, config: &SolverConfig) -> Result<Sat2Result, SolverError> {
    let c = compile(kb);
    let (witness, nodes) = first_model(&c, Budget::TwoValued, config)?;
    if let Some(w) = &witness {
        if !satisfies2(w, kb)? {
            return Err(SolverError::WitnessRejected);
        }
    }
    Ok(Sat2Result { satisfiable: witness.is_some(), witness, stats: SolverStats { nodes, probes: 1 } })
}

fn probe(
    c: &Compiled,
    kb: &KnowledgeBase,
    bound: u64,
    mode: CostMode,
    config: &SolverConfig,
) -> Result<(Option<Interpretation3>, u64), SolverError> {
    let (witness, nodes) = first_model(c, Budget::Cost { mode, bound }, config)?;
    if let Some(w) = &witness {
        if !satisfies3(w, kb)? || cost(w, mode) > bound {
            return Err(SolverError::WitnessRejected);
        }
    }
    Ok((witness, nodes))
}

/// Is there a three-valued model with `cost(ν, mode) ≤ x`?
pub fn decide_upper(
    kb: &KnowledgeBase,
    x: MeasureValue,
    mode: CostMode,
    config: &SolverConfig,
) -> Result<UpperResult, SolverError> {
    let upper = cost_upper_bound(kb, mode);
    let bound = x.finite().map_or(upper, |x| x.min(upper));
    let c = compile(kb);
    let (witness, nodes) = probe(&c, kb, bound, mode, config)?;
    Ok(UpperResult { holds: witness.is_some(), witness, stats: SolverStats { nodes, probes: 1 } })
}

/// Minimum cost over all three-valued models, or `∞` if there is none.
///
/// The first probe uses the trivial upper bound; later probes binary search
/// below the cost of the best witness seen so far.
pub fn minimize(kb: &KnowledgeBase, mode: CostMode, config: &SolverConfig) -> Result<SolveResult, SolverError> {
    let c = compile(kb);
    let mut stats = SolverStats::default();
    let run = |bound: u64, stats: &mut SolverStats| -> Result<Option<Interpretation3>, SolverError> {
        let (w, nodes) = probe(&c, kb, bound, mode, config)?;
        stats.nodes += nodes;
        stats.probes += 1;
        Ok(w)
    };
    let Some(mut best) = run(cost_upper_bound(kb, mode), &mut stats)? else {
        return Ok(SolveResult { value: MeasureValue::Infinite, witness: None, stats });
    };
    let mut lo = 0;
    let mut hi = cost(&best, mode);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match run(mid, &mut stats)? {
            Some(w) => {
                hi = cost(&w, mode);
                best = w;
            }
            None => lo = mid + 1,
        }
    }
    if cost(&best, mode) != hi || !satisfies3(&best, kb)? {
        return Err(SolverError::WitnessRejected);
    }
    Ok(SolveResult { value: MeasureValue::Finite(hi), witness: Some(best), stats })
}

/// Counts distinct conflict bases among the models that minimize the number
/// of affected states.
pub fn count_min_conflict_signatures(
    kb: &KnowledgeBase,
    config: &SolverConfig,
) -> Result<MinConflictSignatures, SolverError> {
    let minimum = minimize(kb, CostMode::AffectedStates, config)?;
    let mut stats = minimum.stats;
    let d = match minimum.value {
        MeasureValue::Infinite => return Err(SolverError::NoThreeValuedModel),
        MeasureValue::Finite(0) => return Err(SolverError::NotInconsistent),
        MeasureValue::Finite(d) => d,
    };
    let c = compile(kb);
    let mut search = Search::new(&c, Budget::Cost { mode: CostMode::AffectedStates, bound: d }, config.node_budget);
    let mut bases = BTreeSet::new();
    let mut raw = 0u64;
    let mut rejected = false;
    search.run(&mut |nu| {
        if cost(&nu, CostMode::AffectedStates) != d || !satisfies3(&nu, kb).unwrap_or(false) {
            rejected = true;
            return ControlFlow::Break(());
        }
        raw += 1;
        bases.insert(nu.conflict_base());
        ControlFlow::Continue(())
    })?;
    if rejected {
        return Err(SolverError::WitnessRejected);
    }
    stats.nodes += search.nodes;
    stats.probes += 1;
    Ok(MinConflictSignatures { min_affected: d, bases: bases.into_iter().collect(), raw_interpretations: raw, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, GMode};

    fn kb(src: &[&str], m: usize) -> KnowledgeBase {
        KnowledgeBase::new(src.iter().map(|s| parse_formula(s).unwrap()), m, GMode::Strict).unwrap()
    }

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn measure_value_order_and_json() {
        assert!(MeasureValue::Finite(u64::MAX) < MeasureValue::Infinite);
        assert_eq!(serde_json::to_string(&MeasureValue::Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&MeasureValue::Finite(3)).unwrap(), "3");
        let back: MeasureValue = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(back, MeasureValue::Infinite);
        assert_eq!("7".parse::<MeasureValue>().unwrap(), MeasureValue::Finite(7));
    }

    #[test]
    fn sat2_examples() {
        assert!(!sat2(&kb(&["X a", "X !a"], 2), &cfg()).unwrap().satisfiable);
        let r = sat2(&kb(&["a U b"], 2), &cfg()).unwrap();
        assert!(r.satisfiable);
        assert!(r.witness.unwrap().is_two_valued());
        assert!(sat2(&kb(&[], 2), &cfg()).unwrap().satisfiable);
    }

    #[test]
    fn decide_upper_examples() {
        let next_pair = kb(&["X a", "X !a"], 3);
        assert!(decide_upper(&next_pair, 1.into(), CostMode::AffectedStates, &cfg()).unwrap().holds);
        assert!(!decide_upper(&next_pair, 0.into(), CostMode::AffectedStates, &cfg()).unwrap().holds);
        let global_pair = kb(&["G a", "G !a"], 3);
        assert!(!decide_upper(&global_pair, 2.into(), CostMode::AffectedStates, &cfg()).unwrap().holds);
        assert!(decide_upper(&global_pair, MeasureValue::Infinite, CostMode::AffectedStates, &cfg()).unwrap().holds);
    }

    #[test]
    fn minimize_examples() {
        let r = minimize(&kb(&["G a", "G !a"], 3), CostMode::AffectedStates, &cfg()).unwrap();
        assert_eq!(r.value, MeasureValue::Finite(3));
        assert_eq!(cost(r.witness.as_ref().unwrap(), CostMode::AffectedStates), 3);
        for mode in [CostMode::AffectedStates, CostMode::ConflictBase, CostMode::ConflictAtoms] {
            let r = minimize(&kb(&["X X X a"], 2), mode, &cfg()).unwrap();
            assert_eq!(r.value, MeasureValue::Infinite);
            assert!(r.witness.is_none());
            let r = minimize(&kb(&[], 2), mode, &cfg()).unwrap();
            assert_eq!(r.value, MeasureValue::Finite(0));
        }
    }

    #[test]
    fn budget_is_reported() {
        let tiny = SolverConfig { node_budget: 3, ..cfg() };
        let err = minimize(&kb(&["G a", "G !a", "G b"], 4), CostMode::ConflictBase, &tiny).unwrap_err();
        assert_eq!(err, SolverError::BudgetExceeded { budget: 3 });
    }

    #[test]
    fn signatures_of_next_contradiction() {
        let r = count_min_conflict_signatures(&kb(&["X a", "X !a"], 2), &cfg()).unwrap();
        assert_eq!(r.min_affected, 1);
        assert_eq!(r.count(), 1);
        assert_eq!(r.bases[0].to_string(), "{(t1, a)}");
        // a classical but otherwise free at t0 and t2
        assert_eq!(r.raw_interpretations, 4);
    }

    #[test]
    fn signatures_errors() {
        assert_eq!(count_min_conflict_signatures(&kb(&["a"], 2), &cfg()).unwrap_err(), SolverError::NotInconsistent);
        assert_eq!(
            count_min_conflict_signatures(&kb(&["X X X a"], 2), &cfg()).unwrap_err(),
            SolverError::NoThreeValuedModel
        );
    }
}
