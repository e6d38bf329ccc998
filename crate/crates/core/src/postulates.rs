//! Executable rationality postulates for inconsistency measures.
//!
//! Every check returns a [`PostulateVerdict`] whose certificate lists the
//! knowledge bases involved together with their measure values, so the
//! verdict can be recomputed independently with [`reverify`].
//! Randomized sweeps are evidence only: a clean sweep means no violation
//! was found among the instances drawn.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{parse_formula, Formula, GMode, ParseError};
use crate::kb::KnowledgeBase;
use crate::measures::{free_formulas, measure, MeasureConfig, MeasureError, MeasureId};
use crate::solver::{sat2, MeasureValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PostulateId {
    /// Consistency: zero exactly on consistent bases.
    #[serde(rename = "CO")]
    Consistency,
    /// Monotony under adding formulas.
    #[serde(rename = "MO")]
    Monotony,
    /// Independence of free formulas.
    #[serde(rename = "IN")]
    FreeFormulaIndependence,
    /// Dominance: replacing a formula by a weaker one cannot increase the value.
    #[serde(rename = "DO")]
    Dominance,
    /// `{Gφ, G¬φ}` scores strictly above `{Xφ, X¬φ}`.
    #[serde(rename = "TS")]
    TimeSensitivity,
}

impl PostulateId {
    pub const ALL: [PostulateId; 5] = [
        PostulateId::Consistency,
        PostulateId::Monotony,
        PostulateId::FreeFormulaIndependence,
        PostulateId::Dominance,
        PostulateId::TimeSensitivity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PostulateId::Consistency => "CO",
            PostulateId::Monotony => "MO",
            PostulateId::FreeFormulaIndependence => "IN",
            PostulateId::Dominance => "DO",
            PostulateId::TimeSensitivity => "TS",
        }
    }
}

impl fmt::Display for PostulateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PostulateId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PostulateId::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown postulate `{s}` (expected one of CO, MO, IN, DO, TS)"))
    }
}

/// Published compliance of each measure with each postulate.
pub fn expected_compliance(measure: MeasureId, postulate: PostulateId) -> bool {
    use MeasureId::*;
    use PostulateId::*;
    match postulate {
        Consistency => true,
        Monotony => measure != Atoms,
        FreeFormulaIndependence => !matches!(measure, Contension | Atoms | ConflictCells),
        Dominance => matches!(measure, Drastic | Contension | AffectedStates | ConflictCells),
        TimeSensitivity => matches!(measure, AffectedStates | ConflictCells),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Violated,
    /// The instance does not meet the postulate's precondition.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledKb {
    pub label: String,
    pub formulas: Vec<String>,
    pub value: MeasureValue,
    /// For free-formula checks: the formula removed from the first base.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub removed: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub m: usize,
    pub g_mode: GMode,
    pub kbs: Vec<LabeledKb>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    /// Classical satisfiability of the base, for consistency checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistent: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostulateVerdict {
    pub postulate: PostulateId,
    pub measure: MeasureId,
    pub outcome: Outcome,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PostulateError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("certificate formula: {0}")]
    Parse(#[from] ParseError),
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("time sensitivity needs a propositional formula, got `{0}`")]
    NotPropositional(String),
}

fn render_all(kb: &KnowledgeBase) -> Vec<String> {
    kb.iter().map(|f| f.to_string()).collect()
}

fn labeled(label: &str, kb: &KnowledgeBase, value: MeasureValue) -> LabeledKb {
    LabeledKb { label: label.to_string(), formulas: render_all(kb), value, removed: None }
}

fn certificate(kb: &KnowledgeBase, kbs: Vec<LabeledKb>) -> Certificate {
    Certificate { m: kb.m(), g_mode: kb.g_mode(), kbs, alpha: None, beta: None, phi: None, consistent: None }
}

fn verdict(postulate: PostulateId, measure: MeasureId, outcome: Outcome, certificate: Certificate) -> PostulateVerdict {
    PostulateVerdict { postulate, measure, outcome, certificate }
}

fn judge(ok: bool) -> Outcome {
    if ok {
        Outcome::Holds
    } else {
        Outcome::Violated
    }
}

fn is_sat(kb: &KnowledgeBase, config: &MeasureConfig) -> Result<bool, PostulateError> {
    Ok(sat2(kb, &config.solver).map_err(MeasureError::from)?.satisfiable)
}

pub fn check_co(id: MeasureId, kb: &KnowledgeBase, config: &MeasureConfig) -> Result<PostulateVerdict, PostulateError> {
    let value = measure(kb, id, config)?;
    let consistent = is_sat(kb, config)?;
    let mut cert = certificate(kb, vec![labeled("K", kb, value)]);
    cert.consistent = Some(consistent);
    Ok(verdict(PostulateId::Consistency, id, judge(value.is_zero() == consistent), cert))
}

/// Compares `kb` against `kb ∪ extra`.
pub fn check_mo(
    id: MeasureId,
    kb: &KnowledgeBase,
    extra: &KnowledgeBase,
    config: &MeasureConfig,
) -> Result<PostulateVerdict, PostulateError> {
    let bigger = kb.union(extra);
    let (small, large) = (measure(kb, id, config)?, measure(&bigger, id, config)?);
    let cert = certificate(kb, vec![labeled("K", kb, small), labeled("K ∪ K'", &bigger, large)]);
    Ok(verdict(PostulateId::Monotony, id, judge(small <= large), cert))
}

/// Removes each free formula in turn; not applicable when there is none.
pub fn check_in(id: MeasureId, kb: &KnowledgeBase, config: &MeasureConfig) -> Result<PostulateVerdict, PostulateError> {
    let free = free_formulas(kb, config)?;
    let full = measure(kb, id, config)?;
    let mut kbs = vec![labeled("K", kb, full)];
    let mut ok = true;
    for alpha in &free {
        let reduced = kb.without(alpha);
        let value = measure(&reduced, id, config)?;
        let mut entry = labeled("K \\ {alpha}", &reduced, value);
        entry.removed = Some(alpha.to_string());
        kbs.push(entry);
        if value != full {
            ok = false;
            break;
        }
    }
    let outcome = if free.is_empty() { Outcome::NotApplicable } else { judge(ok) };
    Ok(verdict(PostulateId::FreeFormulaIndependence, id, outcome, certificate(kb, kbs)))
}

/// Checks `I(K ∪ {α}) ≥ I(K ∪ {β})` when `α` is satisfiable and entails `β`.
pub fn check_do(
    id: MeasureId,
    kb: &KnowledgeBase,
    alpha: &Formula,
    beta: &Formula,
    config: &MeasureConfig,
) -> Result<PostulateVerdict, PostulateError> {
    let with_alpha = kb.with(alpha.clone());
    let with_beta = kb.with(beta.clone());
    let applicable = dominance_applies(kb, alpha, beta, config)?;
    let (va, vb) = if applicable {
        (measure(&with_alpha, id, config)?, measure(&with_beta, id, config)?)
    } else {
        (MeasureValue::Finite(0), MeasureValue::Finite(0))
    };
    let mut cert = certificate(kb, vec![labeled("K ∪ {alpha}", &with_alpha, va), labeled("K ∪ {beta}", &with_beta, vb)]);
    cert.alpha = Some(alpha.to_string());
    cert.beta = Some(beta.to_string());
    let outcome = if applicable { judge(va >= vb) } else { Outcome::NotApplicable };
    Ok(verdict(PostulateId::Dominance, id, outcome, cert))
}

fn dominance_applies(kb: &KnowledgeBase, alpha: &Formula, beta: &Formula, config: &MeasureConfig) -> Result<bool, PostulateError> {
    let alone = kb.empty_like().with(alpha.clone());
    if !is_sat(&alone, config)? {
        return Ok(false);
    }
    Ok(!is_sat(&alone.with(Formula::not(beta.clone())), config)?)
}

fn ts_pair(phi: &Formula, m: usize) -> (KnowledgeBase, KnowledgeBase) {
    let not_phi = Formula::not(phi.clone());
    let global = KnowledgeBase::with_any_trace_length(
        [Formula::globally(phi.clone()), Formula::globally(not_phi.clone())],
        m,
        GMode::Strict,
    );
    let next = KnowledgeBase::with_any_trace_length([Formula::next(phi.clone()), Formula::next(not_phi)], m, GMode::Strict);
    (global, next)
}

/// Compares `{Gφ, G¬φ}` with `{Xφ, X¬φ}` under strict `G` at horizon `m`.
pub fn check_ts(id: MeasureId, phi: &Formula, m: usize, config: &MeasureConfig) -> Result<PostulateVerdict, PostulateError> {
    if phi.temporal_depth() > 0 {
        return Err(PostulateError::NotPropositional(phi.to_string()));
    }
    let (global, next) = ts_pair(phi, m);
    let (vg, vx) = (measure(&global, id, config)?, measure(&next, id, config)?);
    let mut cert = certificate(&global, vec![labeled("{G phi, G !phi}", &global, vg), labeled("{X phi, X !phi}", &next, vx)]);
    cert.phi = Some(phi.to_string());
    Ok(verdict(PostulateId::TimeSensitivity, id, judge(vg > vx), cert))
}

fn parse_list(formulas: &[String]) -> Result<Vec<Formula>, PostulateError> {
    formulas.iter().map(|s| parse_formula(s).map_err(PostulateError::from)).collect()
}

fn rebuild(cert: &Certificate, entry: &LabeledKb) -> Result<KnowledgeBase, PostulateError> {
    Ok(KnowledgeBase::with_any_trace_length(parse_list(&entry.formulas)?, cert.m, cert.g_mode))
}

fn param(value: &Option<String>, name: &str) -> Result<Formula, PostulateError> {
    let text = value.as_ref().ok_or_else(|| PostulateError::Malformed(format!("missing `{name}`")))?;
    Ok(parse_formula(text)?)
}

fn expect(cond: bool, what: &str) -> Result<(), PostulateError> {
    if cond {
        Ok(())
    } else {
        Err(PostulateError::Malformed(what.to_string()))
    }
}

/// Recomputes every value in the certificate and re-derives the outcome.
///
/// Returns `Ok(true)` when values and outcome match the verdict. Structural
/// inconsistencies (wrong base shapes, unmet preconditions claimed as
/// applicable) are errors.
pub fn reverify(v: &PostulateVerdict, config: &MeasureConfig) -> Result<bool, PostulateError> {
    let cert = &v.certificate;
    let kbs: Vec<KnowledgeBase> = cert.kbs.iter().map(|e| rebuild(cert, e)).collect::<Result<_, _>>()?;
    let n = kbs.len();
    let shape = |want: usize| expect(n == want, &format!("expected {want} knowledge bases, found {n}"));
    let mut values = Vec::with_capacity(n);
    for (kb, entry) in kbs.iter().zip(&cert.kbs) {
        let value = if v.outcome == Outcome::NotApplicable && v.postulate == PostulateId::Dominance {
            entry.value
        } else {
            measure(kb, v.measure, config)?
        };
        if value != entry.value {
            return Ok(false);
        }
        values.push(value);
    }
    let outcome = match v.postulate {
        PostulateId::Consistency => {
            shape(1)?;
            let consistent = is_sat(&kbs[0], config)?;
            if cert.consistent != Some(consistent) {
                return Ok(false);
            }
            judge(values[0].is_zero() == consistent)
        }
        PostulateId::Monotony => {
            shape(2)?;
            expect(kbs[0].is_subset_of(&kbs[1]), "first base is not a subset of the second")?;
            judge(values[0] <= values[1])
        }
        PostulateId::FreeFormulaIndependence => {
            let free = free_formulas(&kbs[0], config)?;
            for (kb, entry) in kbs.iter().zip(&cert.kbs).skip(1) {
                let alpha = param(&entry.removed, "removed")?;
                expect(free.contains(&alpha), "removed formula is not free")?;
                expect(*kb == kbs[0].without(&alpha), "reduced base does not match removal")?;
            }
            if n == 1 {
                expect(free.is_empty(), "free formulas exist but none was checked")?;
                Outcome::NotApplicable
            } else {
                judge(values[1..].iter().all(|x| *x == values[0]))
            }
        }
        PostulateId::Dominance => {
            shape(2)?;
            let (alpha, beta) = (param(&cert.alpha, "alpha")?, param(&cert.beta, "beta")?);
            let base = kbs[0].without(&alpha);
            let base = if kbs[1].contains(&alpha) { kbs[0].clone() } else { base };
            expect(kbs[0] == base.with(alpha.clone()) && kbs[1] == base.with(beta.clone()), "bases are not K ∪ {alpha}, K ∪ {beta}")?;
            if dominance_applies(&base, &alpha, &beta, config)? {
                judge(values[0] >= values[1])
            } else {
                Outcome::NotApplicable
            }
        }
        PostulateId::TimeSensitivity => {
            shape(2)?;
            let phi = param(&cert.phi, "phi")?;
            let (global, next) = ts_pair(&phi, cert.m);
            expect(kbs[0] == global && kbs[1] == next, "bases are not the G/X pair for phi")?;
            judge(values[0] > values[1])
        }
    };
    Ok(outcome == v.outcome)
}

/// Small random formulas over a fixed alphabet. Leaves are atoms only: the
/// postulates quantify over formulas built from atoms and connectives, and
/// the constants would add trivially unsatisfiable members.
#[derive(Debug, Clone)]
pub struct FormulaGen {
    pub atoms: Vec<String>,
    pub max_depth: usize,
    pub max_size: usize,
}

impl Default for FormulaGen {
    fn default() -> Self {
        FormulaGen { atoms: vec!["a".into(), "b".into()], max_depth: 2, max_size: 7 }
    }
}

impl FormulaGen {
    pub fn formula(&self, rng: &mut impl Rng) -> Formula {
        loop {
            let f = self.grow(rng, self.max_depth, 3);
            if f.size() <= self.max_size {
                return f;
            }
        }
    }

    /// Atoms and boolean connectives only.
    pub fn propositional(&self, rng: &mut impl Rng) -> Formula {
        loop {
            let f = self.grow(rng, 0, 3);
            if f.size() <= self.max_size {
                return f;
            }
        }
    }

    fn leaf(&self, rng: &mut impl Rng) -> Formula {
        Formula::atom(self.atoms.choose(rng).expect("non-empty alphabet").clone())
    }

    fn grow(&self, rng: &mut impl Rng, depth: usize, height: usize) -> Formula {
        if height == 0 || rng.gen_ratio(1, 3) {
            return self.leaf(rng);
        }
        let temporal = depth > 0;
        let pick = rng.gen_range(0..if temporal { 10 } else { 5 });
        let sub = |rng: &mut _, d| self.grow(rng, d, height - 1);
        match pick {
            0 | 1 => Formula::not(sub(rng, depth)),
            2 => Formula::and(sub(rng, depth), sub(rng, depth)),
            3 => Formula::or(sub(rng, depth), sub(rng, depth)),
            4 => Formula::implies(sub(rng, depth), sub(rng, depth)),
            5 | 6 => Formula::next(sub(rng, depth - 1)),
            7 => Formula::finally(sub(rng, depth - 1)),
            8 => Formula::globally(sub(rng, depth - 1)),
            _ => Formula::until(sub(rng, depth - 1), sub(rng, depth - 1)),
        }
    }

    pub fn kb(&self, rng: &mut impl Rng, max_formulas: usize, m: usize, g_mode: GMode) -> KnowledgeBase {
        let n = rng.gen_range(1..=max_formulas);
        let mut formulas: Vec<Formula> = (0..n).map(|_| self.formula(rng)).collect();
        // seed a direct conflict now and then so inconsistent bases are common
        if rng.gen_bool(0.5) {
            let f = formulas[0].clone();
            formulas.push(Formula::not(f));
        }
        KnowledgeBase::with_any_trace_length(formulas, m, g_mode)
    }
}

/// One concrete postulate instance.
#[derive(Debug, Clone)]
pub enum Instance {
    Co { kb: KnowledgeBase },
    Mo { kb: KnowledgeBase, extra: KnowledgeBase },
    In { kb: KnowledgeBase },
    Do { kb: KnowledgeBase, alpha: Formula, beta: Formula },
    Ts { phi: Formula, m: usize },
}

impl Instance {
    pub fn check(&self, id: MeasureId, config: &MeasureConfig) -> Result<PostulateVerdict, PostulateError> {
        match self {
            Instance::Co { kb } => check_co(id, kb, config),
            Instance::Mo { kb, extra } => check_mo(id, kb, extra, config),
            Instance::In { kb } => check_in(id, kb, config),
            Instance::Do { kb, alpha, beta } => check_do(id, kb, alpha, beta, config),
            Instance::Ts { phi, m } => check_ts(id, phi, *m, config),
        }
    }
}

fn conjuncts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(l, r) => {
            conjuncts(l, out);
            conjuncts(r, out);
        }
        other => out.push(other.clone()),
    }
}

/// Draws a random instance for `postulate`: at most two atoms, `m ∈ {2, 3}`.
pub fn random_instance(postulate: PostulateId, gen: &FormulaGen, rng: &mut impl Rng) -> Instance {
    let m = rng.gen_range(2..=3);
    let g_mode = if rng.gen_bool(0.5) { GMode::Strict } else { GMode::Reflexive };
    match postulate {
        PostulateId::Consistency => Instance::Co { kb: gen.kb(rng, 3, m, g_mode) },
        PostulateId::Monotony => {
            let kb = gen.kb(rng, 3, m, g_mode);
            let extra = gen.kb(rng, 2, m, g_mode);
            Instance::Mo { kb, extra }
        }
        PostulateId::FreeFormulaIndependence => {
            let mut kb = gen.kb(rng, 3, m, g_mode);
            kb.insert(gen.formula(rng));
            Instance::In { kb }
        }
        PostulateId::Dominance => {
            let kb = gen.kb(rng, 3, m, g_mode);
            let alpha = match rng.gen_range(0..3) {
                0 => kb.formulas().choose(rng).expect("non-empty").clone(),
                1 => gen.formula(rng),
                _ => Formula::and(gen.formula(rng), gen.formula(rng)),
            };
            let beta = match rng.gen_range(0..3) {
                0 => Formula::or(alpha.clone(), gen.formula(rng)),
                1 => {
                    let mut parts = Vec::new();
                    conjuncts(&alpha, &mut parts);
                    parts.choose(rng).expect("non-empty").clone()
                }
                _ => gen.formula(rng),
            };
            Instance::Do { kb, alpha, beta }
        }
        PostulateId::TimeSensitivity => Instance::Ts { phi: gen.propositional(rng), m },
    }
}

/// Result of a randomized sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub postulate: PostulateId,
    pub measure: MeasureId,
    pub seed: u64,
    /// Applicable instances checked.
    pub instances: usize,
    pub not_applicable: usize,
    pub violations: Vec<PostulateVerdict>,
}

impl SweepReport {
    pub fn summary(&self) -> String {
        if self.violations.is_empty() {
            format!("no violation found ({} instances)", self.instances)
        } else {
            format!("{} violation(s) in {} instances", self.violations.len(), self.instances)
        }
    }
}

/// Checks `n` applicable random instances, drawing at most `20 n` in total.
pub fn sweep(
    id: MeasureId,
    postulate: PostulateId,
    n: usize,
    seed: u64,
    config: &MeasureConfig,
) -> Result<SweepReport, PostulateError> {
    let gen = FormulaGen::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SweepReport { postulate, measure: id, seed, instances: 0, not_applicable: 0, violations: Vec::new() };
    let mut drawn = 0;
    while report.instances < n && drawn < 20 * n.max(1) {
        drawn += 1;
        let v = random_instance(postulate, &gen, &mut rng).check(id, config)?;
        match v.outcome {
            Outcome::NotApplicable => report.not_applicable += 1,
            Outcome::Holds => report.instances += 1,
            Outcome::Violated => {
                report.instances += 1;
                report.violations.push(v);
            }
        }
    }
    Ok(report)
}

/// Draws up to `attempts` random instances and returns the first violation.
pub fn search_violation(
    id: MeasureId,
    postulate: PostulateId,
    attempts: usize,
    seed: u64,
    config: &MeasureConfig,
) -> Result<Option<PostulateVerdict>, PostulateError> {
    let gen = FormulaGen::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts {
        let v = random_instance(postulate, &gen, &mut rng).check(id, config)?;
        if v.outcome == Outcome::Violated {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// The iceberg base `{a ∧ ¬a ∧ b, ¬b}` whose free formula `¬b` still matters
/// to contension-style values.
pub fn iceberg_kb(m: usize) -> KnowledgeBase {
    let (a, b) = (Formula::atom("a"), Formula::atom("b"));
    KnowledgeBase::with_any_trace_length(
        [Formula::and(Formula::and(a.clone(), Formula::not(a)), b.clone()), Formula::not(b)],
        m,
        GMode::Strict,
    )
}

/// Seed and attempt budget used when searching for counterexamples to
/// persist.
pub const FIXTURE_SEED: u64 = 0x7AB1E1;
pub const FIXTURE_ATTEMPTS: usize = 20_000;

/// A certified violation for a cell expected not to comply: the curated
/// instance where one exists, otherwise the first one found by search.
pub fn counterexample(id: MeasureId, postulate: PostulateId, config: &MeasureConfig) -> Result<Option<PostulateVerdict>, PostulateError> {
    let curated = match postulate {
        PostulateId::TimeSensitivity => Some(check_ts(id, &Formula::atom("a"), 3, config)?),
        PostulateId::FreeFormulaIndependence => Some(check_in(id, &iceberg_kb(2), config)?),
        _ => None,
    };
    if let Some(v) = curated.filter(|v| v.outcome == Outcome::Violated) {
        return Ok(Some(v));
    }
    search_violation(id, postulate, FIXTURE_ATTEMPTS, FIXTURE_SEED ^ u64::from(id as u8) << 8 ^ postulate as u64, config)
}
