//! Persisted postulate counterexamples and compliance evidence.

mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;

use common::*;
use ltlff::measures::{measure, MeasureConfig};
use ltlff::postulates::{
    check_do, check_in, check_mo, check_ts, expected_compliance, reverify, iceberg_kb, Outcome, PostulateId,
    PostulateVerdict,
};
use ltlff::{parse_formula, GMode, MeasureId, MeasureValue};
use proptest::prelude::*;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/counterexamples")
}

fn load_fixtures() -> Vec<(String, PostulateVerdict)> {
    let mut out: Vec<_> = std::fs::read_dir(fixture_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap())
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn values(v: &PostulateVerdict) -> Vec<MeasureValue> {
    v.certificate.kbs.iter().map(|e| e.value).collect()
}

#[test]
fn fixtures_reverify() {
    let cfg = MeasureConfig::default();
    let fixtures = load_fixtures();
    assert!(!fixtures.is_empty());
    for (name, v) in &fixtures {
        assert_eq!(name, &format!("{}_{}", v.measure, v.postulate));
        assert_eq!(v.outcome, Outcome::Violated, "{name}");
        assert!(!expected_compliance(v.measure, v.postulate), "{name} is a compliant cell");
        assert!(reverify(v, &cfg).unwrap(), "{name} no longer reproduces");
    }
}

/// Cells expected to fail that have no fixture. Both belong to the atom
/// count, which cannot shrink when formulas are added and ignores free
/// formulas by construction; see the properties below.
#[test]
fn only_atom_count_cells_lack_fixtures() {
    let have: BTreeSet<String> = load_fixtures().into_iter().map(|(n, _)| n).collect();
    let missing: BTreeSet<String> = MeasureId::ALL
        .iter()
        .flat_map(|&id| PostulateId::ALL.iter().map(move |&p| (id, p)))
        .filter(|&(id, p)| !expected_compliance(id, p))
        .map(|(id, p)| format!("{id}_{p}"))
        .filter(|n| !have.contains(n))
        .collect();
    assert_eq!(missing, ["at_IN".to_string(), "at_MO".to_string()].into_iter().collect());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn atom_count_is_monotone(kb in small_kb(3, 10), extra in small_kb(2, 10)) {
        let extra = ltlff::KnowledgeBase::with_any_trace_length(extra.formulas().to_vec(), kb.m(), kb.g_mode());
        let v = check_mo(MeasureId::Atoms, &kb, &extra, &MeasureConfig::default()).unwrap();
        prop_assert_eq!(v.outcome, Outcome::Holds);
    }

    #[test]
    fn atom_count_ignores_free_formulas(kb in small_kb(5, 10)) {
        let v = check_in(MeasureId::Atoms, &kb, &MeasureConfig::default()).unwrap();
        prop_assert_ne!(v.outcome, Outcome::Violated);
    }
}

#[test]
fn iceberg_defeats_free_formula_independence() {
    for id in [MeasureId::Contension, MeasureId::ConflictCells] {
        let v = check_in(id, &iceberg_kb(2), &MeasureConfig::default()).unwrap();
        assert_eq!((v.outcome, values(&v)), (Outcome::Violated, vec![2.into(), 1.into()]), "{id}");
    }
}

#[test]
fn time_sensitivity_on_a_single_atom() {
    let cfg = MeasureConfig::default();
    let a = parse_formula("a").unwrap();
    for id in MeasureId::BASELINES {
        assert_eq!(check_ts(id, &a, 3, &cfg).unwrap().outcome, Outcome::Violated, "{id}");
    }
    for id in [MeasureId::AffectedStates, MeasureId::ConflictCells] {
        let v = check_ts(id, &a, 3, &cfg).unwrap();
        assert_eq!((v.outcome, values(&v)), (Outcome::Holds, vec![3.into(), 1.into()]), "{id}");
    }
}

/// Conjunctions still separate, but `B` on one conjunct per state suffices.
#[test]
fn time_sensitivity_on_a_conjunction() {
    let v = check_ts(MeasureId::ConflictCells, &parse_formula("a & b").unwrap(), 3, &MeasureConfig::default()).unwrap();
    assert_eq!((v.outcome, values(&v)), (Outcome::Holds, vec![3.into(), 1.into()]));
}

/// Documented counterexample for a cell expected to hold: the free formula
/// `X !b` forces a second affected state.
#[test]
fn affected_states_depend_on_a_free_formula() {
    let kb = kb(&["a & !a & X b", "X !b"], 2, GMode::Strict);
    let v = check_in(MeasureId::AffectedStates, &kb, &MeasureConfig::default()).unwrap();
    assert_eq!(v.certificate.kbs[1].removed.as_deref(), Some("(X (! b))"));
    assert_eq!((v.outcome, values(&v)), (Outcome::Violated, vec![2.into(), 1.into()]));
    assert!(reverify(&v, &MeasureConfig::default()).unwrap());
}

/// Documented counterexample for cells expected to hold: `alpha` entails
/// `beta` classically, yet its three-valued models are not all models of
/// `beta`, so the stronger formula can be cheaper.
#[test]
fn dominance_fails_for_temporal_measures() {
    let cfg = MeasureConfig::default();
    let kb = kb(&["!b", "!X b"], 2, GMode::Strict);
    let alpha = parse_formula("a & (!a | (b & X b))").unwrap();
    let beta = parse_formula("b & X b").unwrap();
    for id in [MeasureId::AffectedStates, MeasureId::ConflictCells] {
        let v = check_do(id, &kb, &alpha, &beta, &cfg).unwrap();
        assert_eq!((v.outcome, values(&v)), (Outcome::Violated, vec![1.into(), 2.into()]), "{id}");
        assert!(reverify(&v, &cfg).unwrap());
    }
    assert_eq!(measure(&kb.with(alpha), MeasureId::Contension, &cfg).unwrap(), MeasureValue::Finite(1));
}
