//! Knowledge bases over a fixed trace `t_0..t_m` and the `.ltlkb` file format.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::{parse_formula, Formula, GMode, ParseError};

/// Smallest horizon accepted without an explicit override.
pub const MIN_TRACE_LENGTH: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("trace length m = {0} is below {MIN_TRACE_LENGTH}; pass an explicit short-trace override to allow it")]
    ShortTrace(usize),
}

/// A finite set of formulas evaluated jointly at `t_0` of a trace with
/// `m + 1` states.
///
/// Formulas keep their insertion order; structurally identical formulas
/// collapse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    formulas: Vec<Formula>,
    m: usize,
    g_mode: GMode,
}

impl KnowledgeBase {
    pub fn new(formulas: impl IntoIterator<Item = Formula>, m: usize, g_mode: GMode) -> Result<Self, KbError> {
        if m < MIN_TRACE_LENGTH {
            return Err(KbError::ShortTrace(m));
        }
        Ok(Self::with_any_trace_length(formulas, m, g_mode))
    }

    /// Like [`KnowledgeBase::new`] but also accepts `m ∈ {0, 1}`.
    pub fn with_any_trace_length(formulas: impl IntoIterator<Item = Formula>, m: usize, g_mode: GMode) -> Self {
        let mut kb = KnowledgeBase { formulas: Vec::new(), m, g_mode };
        for f in formulas {
            kb.insert(f);
        }
        kb
    }

    /// Empty knowledge base sharing this one's horizon and G semantics.
    pub fn empty_like(&self) -> Self {
        KnowledgeBase { formulas: Vec::new(), m: self.m, g_mode: self.g_mode }
    }

    /// Inserts `f`; returns false if it was already present.
    pub fn insert(&mut self, f: Formula) -> bool {
        if self.formulas.contains(&f) {
            false
        } else {
            self.formulas.push(f);
            true
        }
    }

    /// `self ∪ {f}`.
    pub fn with(&self, f: Formula) -> Self {
        let mut kb = self.clone();
        kb.insert(f);
        kb
    }

    /// `self ∖ {f}`.
    pub fn without(&self, f: &Formula) -> Self {
        let mut kb = self.clone();
        kb.formulas.retain(|g| g != f);
        kb
    }

    /// The sub-base made of the formulas at `indices`.
    pub fn subset(&self, indices: &[usize]) -> Self {
        KnowledgeBase {
            formulas: indices.iter().map(|&i| self.formulas[i].clone()).collect(),
            m: self.m,
            g_mode: self.g_mode,
        }
    }

    pub fn union(&self, other: &KnowledgeBase) -> Self {
        let mut kb = self.clone();
        for f in &other.formulas {
            kb.insert(f.clone());
        }
        kb
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.formulas.contains(f)
    }

    pub fn is_subset_of(&self, other: &KnowledgeBase) -> bool {
        self.formulas.iter().all(|f| other.contains(f))
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Formula> {
        self.formulas.iter()
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    /// Trace length `m`; the trace has `m + 1` states.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn num_states(&self) -> usize {
        self.m + 1
    }

    pub fn g_mode(&self) -> GMode {
        self.g_mode
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for f in &self.formulas {
            f.collect_atoms(&mut out);
        }
        out
    }

    /// Members rewritten into the core fragment under this base's G semantics.
    pub fn expanded(&self) -> Vec<Formula> {
        self.formulas.iter().map(|f| f.expand(self.g_mode)).collect()
    }

    /// Renders as `.ltlkb` text with an `m` directive.
    pub fn to_ltlkb(&self) -> String {
        let mut out = format!("m = {}\n", self.m);
        for f in &self.formulas {
            out.push_str(&f.to_string());
            out.push('\n');
        }
        out
    }
}

impl<'a> IntoIterator for &'a KnowledgeBase {
    type Item = &'a Formula;
    type IntoIter = std::slice::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.formulas.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlkbError {
    #[error("line {line}, {source}")]
    Formula { line: usize, source: ParseError },
    #[error("line {line}: malformed `m = <int>` directive")]
    Directive { line: usize },
}

impl LtlkbError {
    pub fn line(&self) -> usize {
        match self {
            LtlkbError::Formula { line, .. } | LtlkbError::Directive { line } => *line,
        }
    }
}

/// Contents of a `.ltlkb` file before a horizon is fixed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LtlkbFile {
    pub m: Option<usize>,
    pub formulas: Vec<Formula>,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses `.ltlkb` text: one formula per line, `#` comments, blank lines
/// ignored, and an optional leading `m = <int>` directive.
pub fn parse_ltlkb(text: &str) -> Result<LtlkbFile, LtlkbError> {
    let mut file = LtlkbFile::default();
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if !seen_content {
            seen_content = true;
            if let Some(rest) = line.strip_prefix('m') {
                let rest = rest.trim_start();
                if let Some(value) = rest.strip_prefix('=') {
                    let m = value.trim().parse::<usize>().map_err(|_| LtlkbError::Directive { line: line_no })?;
                    file.m = Some(m);
                    continue;
                }
            }
        }
        let offset = raw.len() - raw.trim_start().len();
        let f = parse_formula(line).map_err(|mut source| {
            source.column += raw[..offset].chars().count();
            LtlkbError::Formula { line: line_no, source }
        })?;
        file.formulas.push(f);
    }
    Ok(file)
}
