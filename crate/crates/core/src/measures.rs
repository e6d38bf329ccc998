//! Inconsistency measures: six subset- and contension-based baselines and the
//! two time-aware measures.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;
use crate::kb::KnowledgeBase;
use crate::solver::{minimize, oracle_minimize, sat2, CostMode, MeasureValue, SolveResult, SolverConfig, SolverError};

pub const DEFAULT_MIS_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasureId {
    #[serde(rename = "d")]
    Drastic,
    #[serde(rename = "MI")]
    MisCount,
    #[serde(rename = "p")]
    Problematic,
    #[serde(rename = "r")]
    Removal,
    #[serde(rename = "c")]
    Contension,
    #[serde(rename = "at")]
    Atoms,
    #[serde(rename = "LTL_d")]
    AffectedStates,
    #[serde(rename = "LTL_c")]
    ConflictCells,
}

impl MeasureId {
    pub const ALL: [MeasureId; 8] = [
        MeasureId::Drastic,
        MeasureId::MisCount,
        MeasureId::Problematic,
        MeasureId::Removal,
        MeasureId::Contension,
        MeasureId::Atoms,
        MeasureId::AffectedStates,
        MeasureId::ConflictCells,
    ];

    pub const BASELINES: [MeasureId; 6] = [
        MeasureId::Drastic,
        MeasureId::MisCount,
        MeasureId::Problematic,
        MeasureId::Removal,
        MeasureId::Contension,
        MeasureId::Atoms,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MeasureId::Drastic => "d",
            MeasureId::MisCount => "MI",
            MeasureId::Problematic => "p",
            MeasureId::Removal => "r",
            MeasureId::Contension => "c",
            MeasureId::Atoms => "at",
            MeasureId::AffectedStates => "LTL_d",
            MeasureId::ConflictCells => "LTL_c",
        }
    }

    fn needs_mis(self) -> bool {
        matches!(self, MeasureId::MisCount | MeasureId::Problematic | MeasureId::Removal | MeasureId::Atoms)
    }

    /// Cost mode for the measures computed by B-cost minimization.
    pub fn cost_mode(self) -> Option<CostMode> {
        match self {
            MeasureId::Contension => Some(CostMode::ConflictAtoms),
            MeasureId::AffectedStates => Some(CostMode::AffectedStates),
            MeasureId::ConflictCells => Some(CostMode::ConflictBase),
            _ => None,
        }
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MeasureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MeasureId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown measure `{s}` (expected one of d, MI, p, r, c, at, LTL_d, LTL_c)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("subset enumeration limited to {cap} formulas, knowledge base has {formulas}")]
    MisCap { formulas: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasureConfig {
    pub solver: SolverConfig,
    pub mis_cap: usize,
    /// Use exhaustive enumeration instead of search for minimization-based
    /// measures.
    pub use_oracle: bool,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig { solver: SolverConfig::default(), mis_cap: DEFAULT_MIS_CAP, use_oracle: false }
    }
}

/// Minimal inconsistent subsets, as sorted index lists into the KB.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MisFamily {
    members: Vec<Vec<usize>>,
}

impl MisFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn indices(&self) -> &[Vec<usize>] {
        &self.members
    }

    /// Members as formula sets of `kb`, the base they were computed from.
    pub fn subsets(&self, kb: &KnowledgeBase) -> Vec<Vec<Formula>> {
        self.members.iter().map(|m| m.iter().map(|&i| kb.formulas()[i].clone()).collect()).collect()
    }

    /// Indices of formulas occurring in some member.
    pub fn union(&self) -> BTreeSet<usize> {
        self.members.iter().flatten().copied().collect()
    }
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order; stops
/// early when `f` returns false.
fn for_each_combination(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> Result<bool, MeasureError>) -> Result<(), MeasureError> {
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx)? {
            return Ok(());
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return Ok(());
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn is_consistent(kb: &KnowledgeBase, config: &MeasureConfig) -> Result<bool, MeasureError> {
    Ok(sat2(kb, &config.solver)?.satisfiable)
}

/// All minimal inconsistent subsets, by ascending-cardinality scan.
///
/// A subset containing no smaller MIS has only consistent proper subsets,
/// so it is a MIS exactly when it is inconsistent.
pub fn mis_enumerate(kb: &KnowledgeBase, config: &MeasureConfig) -> Result<MisFamily, MeasureError> {
    let n = kb.len();
    if n > config.mis_cap {
        return Err(MeasureError::MisCap { formulas: n, cap: config.mis_cap });
    }
    let mut family = MisFamily::default();
    if is_consistent(kb, config)? {
        return Ok(family);
    }
    for size in 1..=n {
        let mut found = Vec::new();
        for_each_combination(n, size, &mut |subset| {
            let covers_known = family.members.iter().any(|m| m.iter().all(|i| subset.contains(i)));
            if !covers_known && !is_consistent(&kb.subset(subset), config)? {
                found.push(subset.to_vec());
            }
            Ok(true)
        })?;
        family.members.extend(found);
    }
    Ok(family)
}

/// Members of `kb` occurring in no minimal inconsistent subset.
pub fn free_formulas(kb: &KnowledgeBase, config: &MeasureConfig) -> Result<Vec<Formula>, MeasureError> {
    let union = mis_enumerate(kb, config)?.union();
    Ok(kb.iter().enumerate().filter(|(i, _)| !union.contains(i)).map(|(_, f)| f.clone()).collect())
}

/// Size of a smallest set of indices meeting every member.
pub fn min_hitting_set(family: &MisFamily) -> usize {
    let universe: Vec<usize> = family.union().into_iter().collect();
    for size in 0..=universe.len() {
        let mut hit = false;
        for_each_combination(universe.len(), size, &mut |pick| {
            let chosen: Vec<usize> = pick.iter().map(|&p| universe[p]).collect();
            hit = family.members.iter().all(|m| m.iter().any(|i| chosen.contains(i)));
            Ok(!hit)
        })
        .expect("infallible");
        if hit {
            return size;
        }
    }
    universe.len()
}

/// A measure value together with the solver run behind it, when there was one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measured {
    pub id: MeasureId,
    pub value: MeasureValue,
    pub solve: Option<SolveResult>,
}

fn run_minimize(kb: &KnowledgeBase, mode: CostMode, config: &MeasureConfig) -> Result<SolveResult, MeasureError> {
    Ok(if config.use_oracle {
        oracle_minimize(kb, mode, config.solver.oracle_cap)?
    } else {
        minimize(kb, mode, &config.solver)?
    })
}

fn measure_with(
    kb: &KnowledgeBase,
    id: MeasureId,
    mis: &mut Option<MisFamily>,
    config: &MeasureConfig,
) -> Result<Measured, MeasureError> {
    if let Some(mode) = id.cost_mode() {
        let solve = run_minimize(kb, mode, config)?;
        return Ok(Measured { id, value: solve.value, solve: Some(solve) });
    }
    if id == MeasureId::Drastic {
        let value = u64::from(!is_consistent(kb, config)?);
        return Ok(Measured { id, value: value.into(), solve: None });
    }
    debug_assert!(id.needs_mis());
    if mis.is_none() {
        *mis = Some(mis_enumerate(kb, config)?);
    }
    let family = mis.as_ref().expect("just computed");
    let value = match id {
        MeasureId::MisCount => family.len(),
        MeasureId::Problematic => family.union().len(),
        MeasureId::Removal => min_hitting_set(family),
        MeasureId::Atoms => {
            let mut atoms = BTreeSet::new();
            for i in family.union() {
                atoms.extend(kb.formulas()[i].atoms());
            }
            atoms.len()
        }
        _ => unreachable!(),
    };
    Ok(Measured { id, value: (value as u64).into(), solve: None })
}

pub fn measure(kb: &KnowledgeBase, id: MeasureId, config: &MeasureConfig) -> Result<MeasureValue, MeasureError> {
    Ok(measure_detailed(kb, id, config)?.value)
}

pub fn measure_detailed(kb: &KnowledgeBase, id: MeasureId, config: &MeasureConfig) -> Result<Measured, MeasureError> {
    measure_with(kb, id, &mut None, config)
}

/// Evaluates several measures, sharing one MIS enumeration.
pub fn measure_many(kb: &KnowledgeBase, ids: &[MeasureId], config: &MeasureConfig) -> Result<Vec<Measured>, MeasureError> {
    let mut mis = None;
    ids.iter().map(|&id| measure_with(kb, id, &mut mis, config)).collect()
}

pub fn measure_all(kb: &KnowledgeBase, config: &MeasureConfig) -> Result<Vec<Measured>, MeasureError> {
    measure_many(kb, &MeasureId::ALL, config)
}
