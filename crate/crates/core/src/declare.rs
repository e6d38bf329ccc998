//! Declare process models and their translation into temporal formulas.
//!
//! The `.decl` format has one constraint per line, written
//! `Template(arg, ...)`, an optional leading `activities: a, b, c` header
//! and `#` comments.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::formula::{is_valid_atom_name, Formula, GMode};
use crate::kb::KnowledgeBase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Template {
    Init,
    End,
    Response,
    NotResponse,
    ChainResponse,
    NotChainResponse,
    AtLeast,
    AtMost,
}

impl Template {
    pub const ALL: [Template; 8] = [
        Template::Init,
        Template::End,
        Template::Response,
        Template::NotResponse,
        Template::ChainResponse,
        Template::NotChainResponse,
        Template::AtLeast,
        Template::AtMost,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Template::Init => "Init",
            Template::End => "End",
            Template::Response => "Response",
            Template::NotResponse => "NotResponse",
            Template::ChainResponse => "ChainResponse",
            Template::NotChainResponse => "NotChainResponse",
            Template::AtLeast => "AtLeast",
            Template::AtMost => "AtMost",
        }
    }

    /// Number of activity arguments.
    pub fn activity_arity(self) -> usize {
        match self {
            Template::Init | Template::End | Template::AtLeast | Template::AtMost => 1,
            _ => 2,
        }
    }

    /// Whether the template takes a trailing integer bound.
    pub fn takes_bound(self) -> bool {
        matches!(self, Template::AtLeast | Template::AtMost)
    }

    fn arity(self) -> usize {
        self.activity_arity() + usize::from(self.takes_bound())
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Template {
    type Err = DeclareErrorKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Template::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| DeclareErrorKind::UnknownTemplate(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeclareErrorKind {
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("`{template}` takes {expected} argument(s), got {got}")]
    Arity { template: Template, expected: usize, got: usize },
    #[error("bound must be a positive integer, got `{0}`")]
    NonPositiveBound(String),
    #[error("activity `{0}` is not declared in the header")]
    UndeclaredActivity(String),
    #[error("`{0}` is not a valid activity name")]
    InvalidActivity(String),
    #[error("expected `Template(arg, ...)`")]
    Syntax,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct DeclareError {
    pub line: usize,
    pub kind: DeclareErrorKind,
}

/// One template instantiated with activities and, for the cardinality
/// templates, a bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    template: Template,
    activities: Vec<String>,
    bound: Option<u32>,
}

impl Constraint {
    pub fn new(template: Template, activities: Vec<String>, bound: Option<u32>) -> Result<Self, DeclareErrorKind> {
        let got = activities.len() + usize::from(bound.is_some());
        if activities.len() != template.activity_arity() || bound.is_some() != template.takes_bound() {
            return Err(DeclareErrorKind::Arity { template, expected: template.arity(), got });
        }
        if let Some(bad) = activities.iter().find(|a| !is_valid_atom_name(a)) {
            return Err(DeclareErrorKind::InvalidActivity(bad.clone()));
        }
        if bound == Some(0) {
            return Err(DeclareErrorKind::NonPositiveBound("0".into()));
        }
        Ok(Constraint { template, activities, bound })
    }

    pub fn template(&self) -> Template {
        self.template
    }

    pub fn activities(&self) -> &[String] {
        &self.activities
    }

    pub fn bound(&self) -> Option<u32> {
        self.bound
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}", self.template, self.activities.join(", "))?;
        if let Some(n) = self.bound {
            write!(f, ", {n}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DeclareModel {
    pub activities: BTreeSet<String>,
    pub templates: BTreeSet<Template>,
    pub constraints: Vec<Constraint>,
}

impl DeclareModel {
    pub fn from_constraints(constraints: Vec<Constraint>) -> Self {
        let mut model = DeclareModel::default();
        for c in constraints {
            model.push(c);
        }
        model
    }

    fn push(&mut self, c: Constraint) {
        self.activities.extend(c.activities.iter().cloned());
        self.templates.insert(c.template);
        self.constraints.push(c);
    }
}

fn parse_constraint(text: &str, declared: Option<&BTreeSet<String>>) -> Result<Constraint, DeclareErrorKind> {
    let open = text.find('(').ok_or(DeclareErrorKind::Syntax)?;
    let inner = text[open + 1..].strip_suffix(')').ok_or(DeclareErrorKind::Syntax)?;
    let template: Template = text[..open].trim().parse()?;
    let args: Vec<&str> = inner.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if args.len() != template.arity() {
        return Err(DeclareErrorKind::Arity { template, expected: template.arity(), got: args.len() });
    }
    let (names, bound) = if template.takes_bound() {
        let raw = args[args.len() - 1];
        let n = raw.parse::<u32>().ok().filter(|&n| n > 0).ok_or_else(|| DeclareErrorKind::NonPositiveBound(raw.into()))?;
        (&args[..args.len() - 1], Some(n))
    } else {
        (&args[..], None)
    };
    if let Some(declared) = declared {
        if let Some(missing) = names.iter().find(|a| !declared.contains(**a)) {
            return Err(DeclareErrorKind::UndeclaredActivity(missing.to_string()));
        }
    }
    Constraint::new(template, names.iter().map(|s| s.to_string()).collect(), bound)
}

pub fn parse_declare(text: &str) -> Result<DeclareModel, DeclareError> {
    let mut model = DeclareModel::default();
    let mut declared: Option<BTreeSet<String>> = None;
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |kind| DeclareError { line, kind };
        if !seen_content {
            seen_content = true;
            if let Some(list) = content.strip_prefix("activities:") {
                let mut set = BTreeSet::new();
                for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    if !is_valid_atom_name(name) {
                        return Err(err(DeclareErrorKind::InvalidActivity(name.into())));
                    }
                    set.insert(name.to_string());
                }
                model.activities = set.clone();
                declared = Some(set);
                continue;
            }
        }
        let c = parse_constraint(content, declared.as_ref()).map_err(err)?;
        model.push(c);
    }
    Ok(model)
}

fn at_least(a: &Formula, n: u32) -> Formula {
    if n <= 1 {
        Formula::or(a.clone(), Formula::finally(a.clone()))
    } else {
        Formula::finally(Formula::and(a.clone(), Formula::next(at_least(a, n - 1))))
    }
}

fn at_most(a: &Formula, n: u32) -> Formula {
    let not_a = Formula::not(a.clone());
    if n == 0 {
        Formula::globally(not_a)
    } else {
        Formula::globally(Formula::or(not_a, Formula::next(at_most(a, n - 1))))
    }
}

/// The formula of a constraint. `G` stays symbolic; the knowledge base it
/// ends up in decides how it expands.
pub fn translate_constraint(c: &Constraint) -> Formula {
    let act = |i: usize| Formula::atom(c.activities[i].clone());
    match c.template {
        Template::Init => act(0),
        Template::End => Formula::globally(Formula::or(act(0), Formula::finally(act(0)))),
        Template::Response => Formula::globally(Formula::implies(act(0), Formula::finally(act(1)))),
        Template::NotResponse => {
            Formula::globally(Formula::implies(act(0), Formula::not(Formula::finally(act(1)))))
        }
        Template::ChainResponse => Formula::globally(Formula::implies(act(0), Formula::next(act(1)))),
        Template::NotChainResponse => {
            Formula::globally(Formula::implies(act(0), Formula::not(Formula::next(act(1)))))
        }
        Template::AtLeast => at_least(&act(0), c.bound.expect("validated")),
        Template::AtMost => at_most(&act(0), c.bound.expect("validated")),
    }
}

/// Translates every constraint. The trace length is not range-checked here.
pub fn translate_model(model: &DeclareModel, m: usize, g_mode: GMode) -> KnowledgeBase {
    KnowledgeBase::with_any_trace_length(model.constraints.iter().map(translate_constraint), m, g_mode)
}
