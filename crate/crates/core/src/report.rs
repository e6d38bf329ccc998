//! Measurement reports with a stable JSON layout.

use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::Serialize;

use crate::formula::GMode;
use crate::kb::KnowledgeBase;
use crate::measures::{measure_many, MeasureConfig, MeasureError, MeasureId, Measured};
use crate::solver::{
    count_min_conflict_signatures, oracle_min_conflict_signatures, MeasureValue, MinConflictSignatures, SolverStats,
};
use crate::trace::{ConflictBase, Interpretation3, StateSet};

/// Measures whose witness is reported, in order of preference.
const WITNESS_PREFERENCE: [MeasureId; 3] = [MeasureId::AffectedStates, MeasureId::ConflictCells, MeasureId::Contension];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportOptions {
    pub measures: Vec<MeasureId>,
    pub min_interpretations: bool,
    /// Maximum number of conflict bases listed.
    pub display_cap: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { measures: MeasureId::ALL.to_vec(), min_interpretations: false, display_cap: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinInterpretations {
    pub count: usize,
    pub min_affected_states: u64,
    pub raw_interpretations: u64,
    pub conflict_bases: Vec<String>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub kb: String,
    pub m: usize,
    pub g_mode: GMode,
    pub measures: IndexMap<String, MeasureValue>,
    pub witness: Option<Interpretation3>,
    pub witness_measure: Option<MeasureId>,
    pub affected_states: Option<StateSet>,
    pub conflict_base: Option<ConflictBase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_interpretations: Option<MinInterpretations>,
    pub solver_stats: SolverStats,
    pub warnings: Vec<String>,
}

pub fn render_kb(kb: &KnowledgeBase) -> String {
    let parts: Vec<String> = kb.iter().map(|f| f.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Warning for witnesses whose conflicts all sit at the last state, where
/// an obligation reaching past the horizon can be absorbed by a single `B`.
pub fn horizon_warning(nu: &Interpretation3) -> Option<String> {
    let base = nu.conflict_base();
    if !base.is_empty() && base.iter().all(|c| c.state == nu.m()) {
        Some(format!(
            "witness assigns B only at the final state t{}; the conflict may concern states beyond the horizon",
            nu.m()
        ))
    } else {
        None
    }
}

fn summarize(sigs: &MinConflictSignatures, cap: usize) -> MinInterpretations {
    MinInterpretations {
        count: sigs.count(),
        min_affected_states: sigs.min_affected,
        raw_interpretations: sigs.raw_interpretations,
        conflict_bases: sigs.bases.iter().take(cap).map(|b| b.to_string()).collect(),
        truncated: sigs.count() > cap,
    }
}

pub fn build_report(kb: &KnowledgeBase, opts: &ReportOptions, config: &MeasureConfig) -> Result<Report, MeasureError> {
    let results: Vec<Measured> = measure_many(kb, &opts.measures, config)?;
    let mut stats = SolverStats::default();
    for r in &results {
        if let Some(solve) = &r.solve {
            stats.absorb(solve.stats);
        }
    }
    let chosen = WITNESS_PREFERENCE
        .iter()
        .find_map(|id| results.iter().find(|r| r.id == *id).and_then(|r| r.solve.as_ref().map(|s| (*id, s))))
        .and_then(|(id, s)| s.witness.clone().map(|w| (id, w)));
    let mut warnings = Vec::new();
    if let Some((_, w)) = &chosen {
        warnings.extend(horizon_warning(w));
    }
    let min_interpretations = if opts.min_interpretations {
        let sigs = if config.use_oracle {
            oracle_min_conflict_signatures(kb, config.solver.oracle_cap)?
        } else {
            count_min_conflict_signatures(kb, &config.solver)?
        };
        stats.absorb(sigs.stats);
        Some(summarize(&sigs, opts.display_cap))
    } else {
        None
    };
    Ok(Report {
        kb: render_kb(kb),
        m: kb.m(),
        g_mode: kb.g_mode(),
        measures: results.iter().map(|r| (r.id.to_string(), r.value)).collect(),
        affected_states: chosen.as_ref().map(|(_, w)| w.affected_states()),
        conflict_base: chosen.as_ref().map(|(_, w)| w.conflict_base()),
        witness_measure: chosen.as_ref().map(|(id, _)| *id),
        witness: chosen.map(|(_, w)| w),
        min_interpretations,
        solver_stats: stats,
        warnings,
    })
}

fn render_interpretation(nu: &Interpretation3) -> String {
    let mut out = String::new();
    let width = nu.atoms().iter().map(String::len).max().unwrap_or(0);
    for atom in nu.atoms() {
        let row: Vec<&str> = (0..=nu.m()).map(|t| nu.get(t, atom).expect("in signature").as_str()).collect();
        let _ = writeln!(out, "    {atom:<width$}  {}", row.join(" "));
    }
    out
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "kb: {}", self.kb);
        let _ = writeln!(out, "m = {}, G semantics: {}", self.m, self.g_mode);
        for (id, value) in &self.measures {
            let _ = writeln!(out, "  {id:<6} {value}");
        }
        if let (Some(w), Some(id)) = (&self.witness, self.witness_measure) {
            let _ = writeln!(out, "witness ({id}), states t0..t{}:", self.m);
            out.push_str(&render_interpretation(w));
            let states: Vec<String> = w.affected_states().0.iter().map(|t| format!("t{t}")).collect();
            let _ = writeln!(out, "affected states: {{{}}}", states.join(", "));
            let _ = writeln!(out, "conflict base: {}", w.conflict_base());
        }
        if let Some(mi) = &self.min_interpretations {
            let _ = writeln!(
                out,
                "#minInterpretations: {} (distinct conflict bases with {} affected state(s); {} raw interpretations)",
                mi.count, mi.min_affected_states, mi.raw_interpretations
            );
            for b in &mi.conflict_bases {
                let _ = writeln!(out, "  {b}");
            }
            if mi.truncated {
                let _ = writeln!(out, "  ...");
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        let _ = writeln!(out, "solver: {} nodes, {} probes", self.solver_stats.nodes, self.solver_stats.probes);
        out
    }
}
