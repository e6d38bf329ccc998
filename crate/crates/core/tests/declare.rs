//! Declare parsing and translation.

mod common;

use common::*;
use ltlff::declare::{parse_declare, translate_constraint, translate_model, Constraint, DeclareModel, Template};
use ltlff::measures::{measure, MeasureConfig};
use ltlff::solver::sat2;
use ltlff::trace::{satisfies2, TruthValue3};
use ltlff::{GMode, KnowledgeBase, MeasureId, MeasureValue};
use proptest::prelude::*;

fn constraint() -> impl Strategy<Value = Constraint> {
    (prop::sample::select(Template::ALL.to_vec()), 0..3usize, 0..3usize, 1..=4u32).prop_map(|(t, x, y, n)| {
        let acts: Vec<String> = [x, y][..t.activity_arity()].iter().map(|&i| ATOMS[i].to_string()).collect();
        Constraint::new(t, acts, t.takes_bound().then_some(n)).unwrap()
    })
}

/// Two-valued satisfiability of a single-atom base by listing every trace.
fn brute_sat(kb: &KnowledgeBase) -> bool {
    let states = kb.num_states();
    (0u32..1 << states).any(|bits| {
        let values: Vec<TruthValue3> = (0..states).map(|t| TruthValue3::from_bool(bits >> t & 1 == 1)).collect();
        satisfies2(&interpretation(kb.m(), &["a"], &values), kb).unwrap()
    })
}

proptest! {
    #[test]
    fn rendered_models_parse_back(cs in prop::collection::vec(constraint(), 0..6)) {
        let text: String = cs.iter().map(|c| format!("{c}\n")).collect();
        let model = parse_declare(&text).unwrap();
        prop_assert_eq!(&model.constraints, &cs);
        prop_assert_eq!(model, DeclareModel::from_constraints(cs));
    }

    #[test]
    fn translation_stays_within_the_activities(cs in prop::collection::vec(constraint(), 1..6), m in 2..5usize, g in g_mode()) {
        let model = DeclareModel::from_constraints(cs);
        let kb = translate_model(&model, m, g);
        prop_assert_eq!(kb.len(), model.constraints.iter().map(translate_constraint).collect::<std::collections::BTreeSet<_>>().len());
        prop_assert!(kb.atoms().is_subset(&model.activities));
        prop_assert_eq!((kb.m(), kb.g_mode()), (m, g));
    }
}

/// The recursion pins each further occurrence at least two states after
/// the previous one, so `n` occurrences need `2 (n - 1) ≤ m`.
#[test]
fn at_least_satisfiability_closed_form() {
    for m in 1..=6 {
        for n in 1..=4u32 {
            let c = Constraint::new(Template::AtLeast, vec!["a".into()], Some(n)).unwrap();
            let kb = KnowledgeBase::with_any_trace_length([translate_constraint(&c)], m, GMode::Reflexive);
            let sat = sat2(&kb, &Default::default()).unwrap().satisfiable;
            assert_eq!(sat, brute_sat(&kb), "n = {n}, m = {m}");
            assert_eq!(sat, 2 * (n as usize - 1) <= m, "n = {n}, m = {m}");
        }
    }
}

#[test]
fn at_most_is_always_satisfiable() {
    for m in 1..=5 {
        for n in 1..=3 {
            let c = Constraint::new(Template::AtMost, vec!["a".into()], Some(n)).unwrap();
            let kb = KnowledgeBase::with_any_trace_length([translate_constraint(&c)], m, GMode::Reflexive);
            assert!(brute_sat(&kb) && sat2(&kb, &Default::default()).unwrap().satisfiable);
        }
    }
}

/// The two-pair model costs a single cell as well: `B` on the initial
/// activity satisfies every implication at once.
#[test]
fn response_conflicts() {
    let cfg = MeasureConfig::default();
    let one = parse_declare("Init(a)\nResponse(a,b)\nNotResponse(a,b)").unwrap();
    let two = parse_declare("Init(a)\nResponse(a,b)\nNotResponse(a,b)\nResponse(a,c)\nNotResponse(a,c)").unwrap();
    for config in [cfg, MeasureConfig { use_oracle: true, ..cfg }] {
        let value = |m: &DeclareModel| measure(&translate_model(m, 3, GMode::Reflexive), MeasureId::ConflictCells, &config).unwrap();
        assert_eq!(value(&one), MeasureValue::Finite(1));
        assert_eq!(value(&two), MeasureValue::Finite(1));
    }
}

#[test]
fn cardinality_conflicts_grow_with_the_bound() {
    let cfg = MeasureConfig::default();
    let value = |n: u32| {
        let model = parse_declare(&format!("AtMost(a,1)\nAtLeast(a,{n})")).unwrap();
        measure(&translate_model(&model, 6, GMode::Reflexive), MeasureId::AffectedStates, &cfg).unwrap()
    };
    assert!(value(2) < value(4), "{} vs {}", value(2), value(4));
}
