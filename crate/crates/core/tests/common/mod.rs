#![allow(dead_code)]

use proptest::prelude::*;

use ltlff::trace::{Interpretation3, TruthValue3};
use ltlff::{Formula, GMode, KnowledgeBase};

pub const ATOMS: [&str; 3] = ["a", "b", "c"];

fn atom(pool: usize) -> impl Strategy<Value = Formula> {
    (0..pool).prop_map(|i| Formula::atom(ATOMS[i]))
}

/// Full surface syntax, constants and derived connectives included.
pub fn any_formula(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![4 => atom(3), 1 => Just(Formula::True), 1 => Just(Formula::False)];
    leaf.prop_recursive(depth, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::implies(l, r)),
            inner.clone().prop_map(Formula::next),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::until(l, r)),
            inner.clone().prop_map(Formula::finally),
            inner.prop_map(Formula::globally),
        ]
    })
}

/// Atoms and connectives only, over the first `pool` atoms.
pub fn atomic_formula(depth: u32, pool: usize) -> impl Strategy<Value = Formula> {
    atom(pool).prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            inner.clone().prop_map(Formula::next),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::until(l, r)),
            inner.clone().prop_map(Formula::finally),
            inner.prop_map(Formula::globally),
        ]
    })
}

pub fn g_mode() -> impl Strategy<Value = GMode> {
    prop_oneof![Just(GMode::Strict), Just(GMode::Reflexive)]
}

pub fn interpretation(m: usize, atoms: &[&str], values: &[TruthValue3]) -> Interpretation3 {
    let mut nu = Interpretation3::uniform(m, atoms.iter().copied(), TruthValue3::False);
    let n = atoms.len();
    for (k, v) in values.iter().enumerate() {
        nu.set(k / n, atoms[k % n], *v);
    }
    nu
}

pub fn two_valued(m: usize, atoms: &'static [&'static str]) -> impl Strategy<Value = Interpretation3> {
    proptest::collection::vec(any::<bool>(), (m + 1) * atoms.len())
        .prop_map(move |bits| interpretation(m, atoms, &bits.into_iter().map(TruthValue3::from_bool).collect::<Vec<_>>()))
}

pub fn three_valued(m: usize, atoms: &'static [&'static str]) -> impl Strategy<Value = Interpretation3> {
    proptest::collection::vec(0..3usize, (m + 1) * atoms.len())
        .prop_map(move |d| interpretation(m, atoms, &d.into_iter().map(|i| TruthValue3::ALL[i]).collect::<Vec<_>>()))
}

/// Knowledge bases whose signature has at most `cap` cells.
pub fn small_kb(max_formulas: usize, cap: usize) -> impl Strategy<Value = KnowledgeBase> {
    (proptest::collection::vec(atomic_formula(3, 3), 1..=max_formulas), any::<prop::sample::Index>(), g_mode()).prop_map(
        move |(fs, pick, g)| {
            let atoms = fs.iter().flat_map(|f| f.atoms()).collect::<std::collections::BTreeSet<_>>().len().max(1);
            let m = 1 + pick.index((cap / atoms - 1).max(1));
            KnowledgeBase::with_any_trace_length(fs, m, g)
        },
    )
}

pub fn kb(src: &[&str], m: usize, g: GMode) -> KnowledgeBase {
    KnowledgeBase::with_any_trace_length(src.iter().map(|s| ltlff::parse_formula(s).unwrap()), m, g)
}

/// Reference three-valued evaluator over ranks `0 < B < 1` (as 0, 1, 2),
/// with `U` in its existential form: some later `j` where the right side
/// holds and the left side holds from `i` up to `j - 1`.
pub fn reference_rank(nu: &Interpretation3, i: usize, f: &Formula) -> u8 {
    let rank = |v: TruthValue3| match v {
        TruthValue3::False => 0,
        TruthValue3::Both => 1,
        TruthValue3::True => 2,
    };
    match f {
        Formula::Atom(a) => rank(nu.get(i, a).expect("atom in signature")),
        Formula::True => 2,
        Formula::False => 0,
        Formula::Not(g) => 2 - reference_rank(nu, i, g),
        Formula::And(l, r) => reference_rank(nu, i, l).min(reference_rank(nu, i, r)),
        Formula::Or(l, r) => reference_rank(nu, i, l).max(reference_rank(nu, i, r)),
        Formula::Implies(l, r) => (2 - reference_rank(nu, i, l)).max(reference_rank(nu, i, r)),
        Formula::Next(g) => {
            if i < nu.m() {
                reference_rank(nu, i + 1, g)
            } else {
                0
            }
        }
        Formula::Until(l, r) => (i + 1..=nu.m())
            .map(|j| (i..j).map(|k| reference_rank(nu, k, l)).fold(reference_rank(nu, j, r), u8::min))
            .max()
            .unwrap_or(0),
        Formula::Finally(g) => reference_rank(nu, i, &Formula::until(Formula::True, (**g).clone())),
        Formula::Globally(g) => 2 - reference_rank(nu, i, &Formula::finally(Formula::not((**g).clone()))),
    }
}

pub fn rank_of(v: TruthValue3) -> u8 {
    match v {
        TruthValue3::False => 0,
        TruthValue3::Both => 1,
        TruthValue3::True => 2,
    }
}

/// The core grammar: atoms, `¬`, `∧`, `∨`, `X` and `U`, without constants.
pub fn core_formula(depth: u32, pool: usize) -> impl Strategy<Value = Formula> {
    atom(pool).prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            inner.clone().prop_map(Formula::next),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::until(l, r)),
        ]
    })
}
