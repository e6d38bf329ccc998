//! LTL_ff abstract syntax.
//!
//! A [`Formula`] keeps the derived surface connectives (`F`, `G`, `->`,
//! `true`, `false`) so that parsing and rendering round-trip. Evaluators and
//! the solver only accept the core fragment produced by
//! [`Formula::expand`]: atoms, `!`, `&`, `|`, `X`, `U` and the two constant
//! leaves.

mod parser;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use parser::{parse_formula, ParseError, ParseErrorKind};

/// How `G φ` is rewritten into the core fragment.
///
/// `Strict` is the literal `¬F¬φ`, which only constrains states strictly
/// after the current one. `Reflexive` additionally constrains the current
/// state (`φ ∧ ¬F¬φ`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GMode {
    #[default]
    Strict,
    Reflexive,
}

impl fmt::Display for GMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GMode::Strict => "strict",
            GMode::Reflexive => "reflexive",
        })
    }
}

impl std::str::FromStr for GMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "strict" => Ok(GMode::Strict),
            "reflexive" => Ok(GMode::Reflexive),
            other => Err(format!("unknown G semantics `{other}` (expected strict|reflexive)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    True,
    False,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Finally(Box<Formula>),
    Globally(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

/// Lexical rule for atom names: `[a-z][a-zA-Z0-9_]*`, excluding keywords.
pub fn is_valid_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && name != "true" && name != "false"
}

impl Formula {
    /// Builds an atom. Panics if `name` violates the atom lexical rule; use
    /// [`parse_formula`] for untrusted input.
    pub fn atom(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(is_valid_atom_name(&name), "invalid atom name `{name}`");
        Formula::Atom(name)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn until(l: Formula, r: Formula) -> Self {
        Formula::Until(Box::new(l), Box::new(r))
    }

    pub fn finally(f: Formula) -> Self {
        Formula::Finally(Box::new(f))
    }

    pub fn globally(f: Formula) -> Self {
        Formula::Globally(Box::new(f))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    /// True when the tree only uses atoms, constants, `!`, `&`, `|`, `X`, `U`.
    pub fn is_core(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::True | Formula::False => true,
            Formula::Not(f) | Formula::Next(f) => f.is_core(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Until(l, r) => l.is_core() && r.is_core(),
            Formula::Finally(_) | Formula::Globally(_) | Formula::Implies(_, _) => false,
        }
    }

    /// Rewrites derived connectives into the core fragment.
    ///
    /// `F φ ↦ ⊤ U φ`, `φ → ψ ↦ ¬φ ∨ ψ`, and `G φ` per `g_mode`.
    pub fn expand(&self, g_mode: GMode) -> Formula {
        match self {
            Formula::Atom(_) | Formula::True | Formula::False => self.clone(),
            Formula::Not(f) => Formula::not(f.expand(g_mode)),
            Formula::And(l, r) => Formula::and(l.expand(g_mode), r.expand(g_mode)),
            Formula::Or(l, r) => Formula::or(l.expand(g_mode), r.expand(g_mode)),
            Formula::Next(f) => Formula::next(f.expand(g_mode)),
            Formula::Until(l, r) => Formula::until(l.expand(g_mode), r.expand(g_mode)),
            Formula::Finally(f) => Formula::until(Formula::True, f.expand(g_mode)),
            Formula::Globally(f) => {
                let body = f.expand(g_mode);
                let never_fails = Formula::not(Formula::until(Formula::True, Formula::not(body.clone())));
                match g_mode {
                    GMode::Strict => never_fails,
                    GMode::Reflexive => Formula::and(body, never_fails),
                }
            }
            Formula::Implies(l, r) => Formula::or(Formula::not(l.expand(g_mode)), r.expand(g_mode)),
        }
    }

    /// Maximal nesting of temporal operators. `F` and `G` count as one level,
    /// matching the depth of their strict expansion.
    pub fn temporal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::True | Formula::False => 0,
            Formula::Not(f) => f.temporal_depth(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.temporal_depth().max(r.temporal_depth())
            }
            Formula::Next(f) | Formula::Finally(f) | Formula::Globally(f) => 1 + f.temporal_depth(),
            Formula::Until(l, r) => 1 + l.temporal_depth().max(r.temporal_depth()),
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::True | Formula::False => {}
            Formula::Not(f) | Formula::Next(f) | Formula::Finally(f) | Formula::Globally(f) => {
                f.collect_atoms(out)
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Until(l, r) | Formula::Implies(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::True | Formula::False => 1,
            Formula::Not(f) | Formula::Next(f) | Formula::Finally(f) | Formula::Globally(f) => 1 + f.size(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Until(l, r) | Formula::Implies(l, r) => {
                1 + l.size() + r.size()
            }
        }
    }
}

/// Canonical, fully parenthesized rendering. `parse_formula` inverts it.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => f.write_str(a),
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Not(x) => write!(f, "(! {x})"),
            Formula::Next(x) => write!(f, "(X {x})"),
            Formula::Finally(x) => write!(f, "(F {x})"),
            Formula::Globally(x) => write!(f, "(G {x})"),
            Formula::And(l, r) => write!(f, "({l} & {r})"),
            Formula::Or(l, r) => write!(f, "({l} | {r})"),
            Formula::Implies(l, r) => write!(f, "({l} -> {r})"),
            Formula::Until(l, r) => write!(f, "({l} U {r})"),
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

pub fn render_formula(f: &Formula) -> String {
    f.to_string()
}
