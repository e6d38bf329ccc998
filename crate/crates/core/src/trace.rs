//! Two-valued and three-valued satisfaction over fixed traces `t_0..t_m`.
//!
//! These evaluators follow the satisfaction clauses directly and serve as the
//! reference semantics. The solver compiles formulas separately and
//! re-checks every witness it returns against [`eval3`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::formula::Formula;
use crate::kb::KnowledgeBase;

/// Priest truth value. The derived order is the truth order `0 ≺ B ≺ 1`,
/// so `min`/`max` give conjunction/disjunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TruthValue3 {
    False,
    Both,
    True,
}

impl TruthValue3 {
    pub const ALL: [TruthValue3; 3] = [TruthValue3::False, TruthValue3::True, TruthValue3::Both];

    pub fn negate(self) -> Self {
        match self {
            TruthValue3::False => TruthValue3::True,
            TruthValue3::True => TruthValue3::False,
            TruthValue3::Both => TruthValue3::Both,
        }
    }

    /// Designated values `{1, B}`.
    pub fn is_designated(self) -> bool {
        self != TruthValue3::False
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            TruthValue3::True
        } else {
            TruthValue3::False
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TruthValue3::False => "0",
            TruthValue3::True => "1",
            TruthValue3::Both => "B",
        }
    }
}

impl fmt::Display for TruthValue3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TruthValue3 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0" => Ok(TruthValue3::False),
            "1" => Ok(TruthValue3::True),
            "B" => Ok(TruthValue3::Both),
            other => Err(format!("invalid truth value `{other}` (expected \"0\", \"1\" or \"B\")")),
        }
    }
}

impl Serialize for TruthValue3 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for TruthValue3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("state index {index} out of range 0..={m}")]
    StateOutOfRange { index: usize, m: usize },
    #[error("atom `{0}` is not in the interpretation's signature")]
    UnknownAtom(String),
    #[error("interpretation is not two-valued")]
    NotTwoValued,
    #[error("formula contains derived connective `{0}`; expand it first")]
    DerivedConnective(&'static str),
    #[error("trace length mismatch: interpretation has m = {interpretation}, knowledge base has m = {kb}")]
    TraceLengthMismatch { interpretation: usize, kb: usize },
}

/// A total map `{t_0..t_m} × At → {0, 1, B}`.
///
/// Cells are stored state-major: the value of atom `j` at state `t` lives
/// at `t * atoms.len() + j`. Two-valued interpretations are the B-free case.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interpretation3 {
    m: usize,
    atoms: Vec<String>,
    values: Vec<TruthValue3>,
}

impl Interpretation3 {
    /// Every cell set to `value`. Duplicate atom names are merged and the
    /// signature is sorted.
    pub fn uniform(m: usize, atoms: impl IntoIterator<Item = impl Into<String>>, value: TruthValue3) -> Self {
        let atoms: BTreeSet<String> = atoms.into_iter().map(Into::into).collect();
        let atoms: Vec<String> = atoms.into_iter().collect();
        let values = vec![value; (m + 1) * atoms.len()];
        Interpretation3 { m, atoms, values }
    }

    /// The all-`B` interpretation.
    pub fn all_both(m: usize, atoms: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self::uniform(m, atoms, TruthValue3::Both)
    }

    /// Builds from a sorted, duplicate-free signature and state-major values.
    pub(crate) fn from_parts(m: usize, atoms: Vec<String>, values: Vec<TruthValue3>) -> Self {
        debug_assert_eq!(values.len(), (m + 1) * atoms.len());
        debug_assert!(atoms.windows(2).all(|w| w[0] < w[1]));
        Interpretation3 { m, atoms, values }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn values(&self) -> &[TruthValue3] {
        &self.values
    }

    fn atom_index(&self, atom: &str) -> Option<usize> {
        self.atoms.binary_search_by(|a| a.as_str().cmp(atom)).ok()
    }

    pub fn get(&self, state: usize, atom: &str) -> Option<TruthValue3> {
        if state > self.m {
            return None;
        }
        self.atom_index(atom).map(|j| self.values[state * self.atoms.len() + j])
    }

    /// Sets one cell. Panics if the state or atom is outside the signature.
    pub fn set(&mut self, state: usize, atom: &str, value: TruthValue3) {
        assert!(state <= self.m, "state {state} out of range 0..={}", self.m);
        let j = self.atom_index(atom).unwrap_or_else(|| panic!("atom `{atom}` not in signature"));
        let n = self.atoms.len();
        self.values[state * n + j] = value;
    }

    /// Builder-style [`Interpretation3::set`].
    pub fn with(mut self, state: usize, atom: &str, value: TruthValue3) -> Self {
        self.set(state, atom, value);
        self
    }

    pub fn is_two_valued(&self) -> bool {
        !self.values.contains(&TruthValue3::Both)
    }

    pub fn affected_states(&self) -> StateSet {
        StateSet(self.conflict_base().0.iter().map(|c| c.state).collect())
    }

    pub fn conflict_base(&self) -> ConflictBase {
        let n = self.atoms.len();
        let cells = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == TruthValue3::Both)
            .map(|(i, _)| Cell { state: i / n, atom: self.atoms[i % n].clone() })
            .collect();
        ConflictBase(cells)
    }

    /// Atoms that are `B` in at least one state.
    pub fn conflicting_atoms(&self) -> BTreeSet<String> {
        self.conflict_base().0.into_iter().map(|c| c.atom).collect()
    }

    fn value_at(&self, state: usize, atom: &str) -> Result<TruthValue3, EvalError> {
        self.get(state, atom).ok_or_else(|| EvalError::UnknownAtom(atom.to_string()))
    }

    fn check_covers(&self, kb: &KnowledgeBase) -> Result<(), EvalError> {
        if kb.m() != self.m {
            return Err(EvalError::TraceLengthMismatch { interpretation: self.m, kb: kb.m() });
        }
        for atom in kb.atoms() {
            if self.atom_index(&atom).is_none() {
                return Err(EvalError::UnknownAtom(atom));
            }
        }
        Ok(())
    }
}

/// States assigning `B` to at least one atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateSet(pub BTreeSet<usize>);

impl StateSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub state: usize,
    pub atom: String,
}

/// The `(state, atom)` pairs assigned `B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConflictBase(pub BTreeSet<Cell>);

impl ConflictBase {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Cell> {
        self.0.iter()
    }
}

impl fmt::Display for ConflictBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "(t{}, {})", c.state, c.atom)?;
        }
        f.write_str("}")
    }
}

#[derive(Serialize, Deserialize)]
struct InterpretationRepr {
    m: usize,
    atoms: Vec<String>,
    states: Vec<BTreeMap<String, TruthValue3>>,
}

impl Serialize for Interpretation3 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = self.atoms.len();
        let states = (0..=self.m)
            .map(|t| self.atoms.iter().enumerate().map(|(j, a)| (a.clone(), self.values[t * n + j])).collect())
            .collect();
        InterpretationRepr { m: self.m, atoms: self.atoms.clone(), states }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interpretation3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = InterpretationRepr::deserialize(d)?;
        let mut atoms = repr.atoms.clone();
        atoms.sort();
        atoms.dedup();
        if atoms.len() != repr.atoms.len() {
            return Err(D::Error::custom("duplicate atom in signature"));
        }
        if repr.states.len() != repr.m + 1 {
            return Err(D::Error::custom(format!(
                "expected {} states for m = {}, found {}",
                repr.m + 1,
                repr.m,
                repr.states.len()
            )));
        }
        let mut values = Vec::with_capacity(atoms.len() * repr.states.len());
        for (t, state) in repr.states.iter().enumerate() {
            if state.len() != atoms.len() {
                return Err(D::Error::custom(format!("state {t} does not assign exactly the signature atoms")));
            }
            for a in &atoms {
                let v = state.get(a).ok_or_else(|| D::Error::custom(format!("state {t} is missing atom `{a}`")))?;
                values.push(*v);
            }
        }
        Ok(Interpretation3 { m: repr.m, atoms, values })
    }
}

/// Values of `phi` at every state `0..=m`.
fn column3(nu: &Interpretation3, phi: &Formula) -> Result<Vec<TruthValue3>, EvalError> {
    let states = nu.m + 1;
    Ok(match phi {
        Formula::Atom(a) => (0..states).map(|t| nu.value_at(t, a)).collect::<Result<_, _>>()?,
        Formula::True => vec![TruthValue3::True; states],
        Formula::False => vec![TruthValue3::False; states],
        Formula::Not(f) => column3(nu, f)?.into_iter().map(TruthValue3::negate).collect(),
        Formula::And(l, r) => {
            let (l, r) = (column3(nu, l)?, column3(nu, r)?);
            l.into_iter().zip(r).map(|(x, y)| x.min(y)).collect()
        }
        Formula::Or(l, r) => {
            let (l, r) = (column3(nu, l)?, column3(nu, r)?);
            l.into_iter().zip(r).map(|(x, y)| x.max(y)).collect()
        }
        Formula::Next(f) => {
            let inner = column3(nu, f)?;
            (0..states).map(|i| if i < nu.m { inner[i + 1] } else { TruthValue3::False }).collect()
        }
        Formula::Until(l, r) => {
            let (left, right) = (column3(nu, l)?, column3(nu, r)?);
            (0..states).map(|i| until_at(&left, &right, i)).collect()
        }
        Formula::Finally(_) => return Err(EvalError::DerivedConnective("F")),
        Formula::Globally(_) => return Err(EvalError::DerivedConnective("G")),
        Formula::Implies(_, _) => return Err(EvalError::DerivedConnective("->")),
    })
}

/// Three-valued until at state `i`: `1` if some witness `j > i` sees the
/// right operand and every intermediate left operand at `1`; otherwise `B`
/// if some `j` sees all of those values in `{1, B}`; otherwise `0`.
fn until_at(left: &[TruthValue3], right: &[TruthValue3], i: usize) -> TruthValue3 {
    let chain = |j: usize| std::iter::once(right[j]).chain(left[i..j].iter().copied());
    let m = right.len() - 1;
    if (i + 1..=m).any(|j| chain(j).all(|v| v == TruthValue3::True)) {
        TruthValue3::True
    } else if (i + 1..=m).any(|j| chain(j).all(TruthValue3::is_designated)) {
        TruthValue3::Both
    } else {
        TruthValue3::False
    }
}

/// `ν̂(t_i, φ)` under the paraconsistent semantics. `phi` must be in the
/// core fragment.
pub fn eval3(nu: &Interpretation3, i: usize, phi: &Formula) -> Result<TruthValue3, EvalError> {
    if i > nu.m {
        return Err(EvalError::StateOutOfRange { index: i, m: nu.m });
    }
    Ok(column3(nu, phi)?[i])
}

/// Classical satisfaction `ω̂, t_i ⊨ φ`. `phi` must be in the core fragment.
pub fn eval2(omega: &Interpretation3, i: usize, phi: &Formula) -> Result<bool, EvalError> {
    if !omega.is_two_valued() {
        return Err(EvalError::NotTwoValued);
    }
    if i > omega.m {
        return Err(EvalError::StateOutOfRange { index: i, m: omega.m });
    }
    holds2(omega, i, phi)
}

fn holds2(w: &Interpretation3, i: usize, phi: &Formula) -> Result<bool, EvalError> {
    Ok(match phi {
        Formula::Atom(a) => w.value_at(i, a)? == TruthValue3::True,
        Formula::True => true,
        Formula::False => false,
        Formula::Not(f) => !holds2(w, i, f)?,
        Formula::And(l, r) => holds2(w, i, l)? && holds2(w, i, r)?,
        Formula::Or(l, r) => holds2(w, i, l)? || holds2(w, i, r)?,
        Formula::Next(f) => i < w.m && holds2(w, i + 1, f)?,
        Formula::Until(l, r) => {
            let mut found = false;
            for j in i + 1..=w.m {
                if holds2(w, j, r)? {
                    let mut all = true;
                    for k in i..j {
                        if !holds2(w, k, l)? {
                            all = false;
                            break;
                        }
                    }
                    if all {
                        found = true;
                        break;
                    }
                }
            }
            found
        }
        Formula::Finally(_) => return Err(EvalError::DerivedConnective("F")),
        Formula::Globally(_) => return Err(EvalError::DerivedConnective("G")),
        Formula::Implies(_, _) => return Err(EvalError::DerivedConnective("->")),
    })
}

/// `ω̂ ⊨ K`: every member holds classically at `t_0`.
pub fn satisfies2(omega: &Interpretation3, kb: &KnowledgeBase) -> Result<bool, EvalError> {
    omega.check_covers(kb)?;
    for f in kb.expanded() {
        if !eval2(omega, 0, &f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `ν̂ ⊨³ K`: every member takes a designated value at `t_0`.
pub fn satisfies3(nu: &Interpretation3, kb: &KnowledgeBase) -> Result<bool, EvalError> {
    nu.check_covers(kb)?;
    for f in kb.expanded() {
        if !eval3(nu, 0, &f)?.is_designated() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, GMode};
    use TruthValue3::{Both as B, False as F0, True as T1};

    fn core(s: &str) -> Formula {
        parse_formula(s).unwrap().expand(GMode::Strict)
    }

    fn example_nu() -> Interpretation3 {
        // m = 2; a = (1, B, 0), b = (0, 0, 1)
        Interpretation3::uniform(2, ["a", "b"], F0).with(0, "a", T1).with(1, "a", B).with(2, "b", T1)
    }

    #[test]
    fn priest_connectives() {
        assert_eq!(T1.min(B), B);
        assert_eq!(F0.max(B), B);
        assert_eq!(B.negate(), B);
        assert_eq!(T1.negate(), F0);
    }

    #[test]
    fn until_with_conflict_in_between() {
        assert_eq!(eval3(&example_nu(), 0, &core("a U b")).unwrap(), B);
    }

    #[test]
    fn next_negation_on_conflict() {
        assert_eq!(eval3(&example_nu(), 0, &core("X !a")).unwrap(), B);
    }

    #[test]
    fn example_kb_is_three_valued_satisfied() {
        let kb = KnowledgeBase::new([parse_formula("X !a").unwrap(), parse_formula("a U b").unwrap()], 2, GMode::Strict)
            .unwrap();
        assert!(satisfies3(&example_nu(), &kb).unwrap());
    }

    #[test]
    fn all_both_chain_is_both() {
        // values all B: the "all in {1,B}" reading gives B, not 0
        let nu = Interpretation3::all_both(2, ["a", "b"]);
        assert_eq!(eval3(&nu, 0, &core("a U b")).unwrap(), B);
        assert_eq!(eval3(&nu, 0, &core("G a")).unwrap(), B);
    }

    #[test]
    fn until_prefers_one_over_both() {
        // j = 1 gives B (b = B), j = 2 gives 1
        let nu = Interpretation3::uniform(2, ["a", "b"], T1).with(1, "b", B).with(0, "b", F0);
        assert_eq!(eval3(&nu, 0, &core("a U b")).unwrap(), T1);
    }

    #[test]
    fn next_past_horizon_is_false() {
        let nu = Interpretation3::uniform(2, ["a"], T1);
        assert_eq!(eval3(&nu, 2, &core("X a")).unwrap(), F0);
        assert!(!eval2(&nu, 2, &core("X a")).unwrap());
        let nu_b = Interpretation3::all_both(2, ["a"]);
        assert_eq!(eval3(&nu_b, 0, &core("X X X a")).unwrap(), F0);
    }

    #[test]
    fn eval2_examples() {
        let w = Interpretation3::uniform(2, ["a"], F0).with(1, "a", T1);
        assert!(eval2(&w, 0, &core("X a")).unwrap());
        let w = Interpretation3::uniform(2, ["a", "b"], F0).with(0, "a", T1).with(1, "a", T1).with(2, "b", T1);
        assert!(eval2(&w, 0, &core("a U b")).unwrap());
        assert!(!eval2(&w, 1, &core("b U a")).unwrap());
    }

    #[test]
    fn eval2_rejects_b() {
        assert_eq!(eval2(&example_nu(), 0, &core("a")), Err(EvalError::NotTwoValued));
    }

    #[test]
    fn state_range_and_derived_checked() {
        let nu = example_nu();
        assert_eq!(eval3(&nu, 3, &core("a")), Err(EvalError::StateOutOfRange { index: 3, m: 2 }));
        assert_eq!(eval3(&nu, 0, &parse_formula("F a").unwrap()), Err(EvalError::DerivedConnective("F")));
        assert_eq!(eval3(&nu, 0, &core("c")), Err(EvalError::UnknownAtom("c".into())));
    }

    #[test]
    fn satisfies_examples() {
        let any = Interpretation3::uniform(2, ["a"], F0);
        let empty = KnowledgeBase::new([], 2, GMode::Strict).unwrap();
        assert!(satisfies2(&any, &empty).unwrap());
        assert!(satisfies3(&any, &empty).unwrap());

        let next_pair = KnowledgeBase::new([core("X a"), core("X !a")], 2, GMode::Strict).unwrap();
        for v0 in [F0, T1] {
            for v1 in [F0, T1] {
                for v2 in [F0, T1] {
                    let w = Interpretation3::uniform(2, ["a"], F0).with(0, "a", v0).with(1, "a", v1).with(2, "a", v2);
                    assert!(!satisfies2(&w, &next_pair).unwrap());
                }
            }
        }
        let nu = Interpretation3::uniform(2, ["a"], F0).with(1, "a", B);
        assert!(satisfies3(&nu, &next_pair).unwrap());

        let ka = KnowledgeBase::new([core("a")], 2, GMode::Strict).unwrap();
        assert!(satisfies2(&Interpretation3::uniform(2, ["a"], T1), &ka).unwrap());
        assert!(!satisfies3(&any, &ka).unwrap());
    }

    #[test]
    fn satisfies_checks_signature_and_length() {
        let kb = KnowledgeBase::new([core("b")], 2, GMode::Strict).unwrap();
        let nu = Interpretation3::uniform(2, ["a"], F0);
        assert_eq!(satisfies3(&nu, &kb), Err(EvalError::UnknownAtom("b".into())));
        let nu = Interpretation3::uniform(3, ["b"], F0);
        assert!(matches!(satisfies2(&nu, &kb), Err(EvalError::TraceLengthMismatch { .. })));
    }

    #[test]
    fn affected_and_conflict_base() {
        let w = Interpretation3::uniform(2, ["a", "b"], T1);
        assert!(w.affected_states().is_empty());
        assert!(w.conflict_base().is_empty());

        let nu = Interpretation3::uniform(2, ["a", "b"], F0).with(1, "a", B);
        assert_eq!(nu.affected_states().0.into_iter().collect::<Vec<_>>(), [1]);

        let nu = nu.with(1, "b", B);
        let cb: Vec<_> = nu.conflict_base().0.into_iter().map(|c| (c.state, c.atom)).collect();
        assert_eq!(cb, [(1, "a".to_string()), (1, "b".to_string())]);

        let nu_b = Interpretation3::all_both(2, ["a"]);
        assert_eq!(nu_b.affected_states().0.into_iter().collect::<Vec<_>>(), [0, 1, 2]);
        let cb: Vec<_> = nu_b.conflict_base().0.into_iter().map(|c| c.state).collect();
        assert_eq!(cb, [0, 1, 2]);
    }

    #[test]
    fn json_form() {
        let json = r#"{"m": 2, "atoms": ["a","b"], "states": [{"a":"1","b":"0"}, {"a":"B","b":"0"}, {"a":"0","b":"1"}]}"#;
        let nu: Interpretation3 = serde_json::from_str(json).unwrap();
        assert_eq!(nu, example_nu());
        let back: Interpretation3 = serde_json::from_str(&serde_json::to_string(&nu).unwrap()).unwrap();
        assert_eq!(back, nu);
    }

    #[test]
    fn json_rejects_malformed() {
        let missing_state = r#"{"m": 2, "atoms": ["a"], "states": [{"a":"1"}, {"a":"0"}]}"#;
        assert!(serde_json::from_str::<Interpretation3>(missing_state).is_err());
        let bad_value = r#"{"m": 0, "atoms": ["a"], "states": [{"a":"T"}]}"#;
        assert!(serde_json::from_str::<Interpretation3>(bad_value).is_err());
        let extra_atom = r#"{"m": 0, "atoms": ["a"], "states": [{"a":"1","b":"0"}]}"#;
        assert!(serde_json::from_str::<Interpretation3>(extra_atom).is_err());
    }
}
