//! Exhaustive enumeration of three-valued models on tiny signatures.
//!
//! Shares nothing with the search engine: every assignment is generated and
//! checked with the reference evaluator.

use std::collections::BTreeSet;

use crate::kb::KnowledgeBase;
use crate::formula::Formula;
use crate::trace::{eval3, EvalError, Interpretation3, TruthValue3};

use super::{cost, CostMode, MeasureValue, MinConflictSignatures, SolveResult, SolverError, SolverStats};

/// Lexicographic digit order of the scan.
const DIGITS: [TruthValue3; 3] = [TruthValue3::False, TruthValue3::True, TruthValue3::Both];

/// Stream of all three-valued models of a knowledge base over a signature.
pub struct Models {
    expanded: Vec<Formula>,
    atoms: Vec<String>,
    nu: Interpretation3,
    digits: Vec<usize>,
    done: bool,
    scanned: u64,
}

impl Models {
    /// Assignments examined so far.
    pub fn scanned(&self) -> u64 {
        self.scanned
    }

    fn advance(&mut self) {
        let n = self.atoms.len();
        for k in (0..self.digits.len()).rev() {
            let d = &mut self.digits[k];
            *d = (*d + 1) % DIGITS.len();
            self.nu.set(k / n, &self.atoms[k % n], DIGITS[*d]);
            if *d != 0 {
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for Models {
    type Item = Interpretation3;

    fn next(&mut self) -> Option<Interpretation3> {
        while !self.done {
            self.scanned += 1;
            let designated = self.expanded.iter().all(|f| {
                eval3(&self.nu, 0, f).expect("signature checked at construction").is_designated()
            });
            let found = designated.then(|| self.nu.clone());
            self.advance();
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

/// Every `ν` over `signature` with `ν ⊨³ K`, in lexicographic cell order
/// (state-major) with value order `0 < 1 < B`.
pub fn enumerate_models3(
    kb: &KnowledgeBase,
    signature: &BTreeSet<String>,
    cap: usize,
) -> Result<Models, SolverError> {
    if let Some(missing) = kb.atoms().difference(signature).next() {
        return Err(EvalError::UnknownAtom(missing.clone()).into());
    }
    let cells = kb.num_states() * signature.len();
    if cells > cap {
        return Err(SolverError::OracleCap { cells, cap });
    }
    Ok(Models {
        expanded: kb.expanded(),
        atoms: signature.iter().cloned().collect(),
        nu: Interpretation3::uniform(kb.m(), signature.iter().cloned(), DIGITS[0]),
        digits: vec![0; cells],
        done: false,
        scanned: 0,
    })
}

/// Minimum cost by full enumeration; the witness is the first minimal model
/// in scan order.
pub fn oracle_minimize(kb: &KnowledgeBase, mode: CostMode, cap: usize) -> Result<SolveResult, SolverError> {
    let mut models = enumerate_models3(kb, &kb.atoms(), cap)?;
    let mut best: Option<(u64, Interpretation3)> = None;
    for nu in models.by_ref() {
        let c = cost(&nu, mode);
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, nu));
        }
    }
    let stats = SolverStats { nodes: models.scanned(), probes: 0 };
    Ok(match best {
        Some((c, nu)) => SolveResult { value: MeasureValue::Finite(c), witness: Some(nu), stats },
        None => SolveResult { value: MeasureValue::Infinite, witness: None, stats },
    })
}

/// [`super::count_min_conflict_signatures`] by full enumeration.
pub fn oracle_min_conflict_signatures(kb: &KnowledgeBase, cap: usize) -> Result<MinConflictSignatures, SolverError> {
    let mut models = enumerate_models3(kb, &kb.atoms(), cap)?;
    let all: Vec<Interpretation3> = models.by_ref().collect();
    let Some(d) = all.iter().map(|nu| cost(nu, CostMode::AffectedStates)).min() else {
        return Err(SolverError::NoThreeValuedModel);
    };
    if d == 0 {
        return Err(SolverError::NotInconsistent);
    }
    let minimal: Vec<&Interpretation3> = all.iter().filter(|nu| cost(nu, CostMode::AffectedStates) == d).collect();
    let bases: BTreeSet<_> = minimal.iter().map(|nu| nu.conflict_base()).collect();
    Ok(MinConflictSignatures {
        min_affected: d,
        bases: bases.into_iter().collect(),
        raw_interpretations: minimal.len() as u64,
        stats: SolverStats { nodes: models.scanned(), probes: 0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, GMode};

    fn kb(src: &[&str], m: usize) -> KnowledgeBase {
        KnowledgeBase::new(src.iter().map(|s| parse_formula(s).unwrap()), m, GMode::Strict).unwrap()
    }

    fn sig(atoms: &[&str]) -> BTreeSet<String> {
        atoms.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn model_counts() {
        assert_eq!(enumerate_models3(&kb(&["a"], 2), &sig(&["a"]), 12).unwrap().count(), 18);
        assert_eq!(enumerate_models3(&kb(&["a", "!a"], 2), &sig(&["a"]), 12).unwrap().count(), 9);
        assert_eq!(enumerate_models3(&kb(&["X X X a"], 2), &sig(&["a"]), 12).unwrap().count(), 0);
    }

    #[test]
    fn scan_order_is_lexicographic() {
        let first: Vec<_> = enumerate_models3(&kb(&["a"], 2), &sig(&["a"]), 12).unwrap().take(2).collect();
        use TruthValue3::*;
        assert_eq!(first[0].values(), [True, False, False]);
        assert_eq!(first[1].values(), [True, False, True]);
    }

    #[test]
    fn cap_and_signature_checks() {
        let k = kb(&["a & b"], 5);
        assert!(enumerate_models3(&k, &sig(&["a", "b"]), 12).is_ok());
        assert!(matches!(enumerate_models3(&k, &sig(&["a"]), 100), Err(SolverError::Eval(EvalError::UnknownAtom(_)))));
        let big = kb(&["a & b"], 6);
        assert_eq!(enumerate_models3(&big, &sig(&["a", "b"]), 12).err(), Some(SolverError::OracleCap { cells: 14, cap: 12 }));
    }

    #[test]
    fn oracle_values() {
        assert_eq!(oracle_minimize(&kb(&["G a", "G !a"], 3), CostMode::AffectedStates, 12).unwrap().value, 3.into());
        assert_eq!(oracle_minimize(&kb(&["X X X a"], 2), CostMode::ConflictBase, 12).unwrap().value, MeasureValue::Infinite);
        let s = oracle_min_conflict_signatures(&kb(&["X a", "X !a"], 2), 12).unwrap();
        assert_eq!((s.count(), s.raw_interpretations), (1, 4));
    }
}
