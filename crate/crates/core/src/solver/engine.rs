//! Depth-first search over cell assignments with constraint propagation.
//!
//! Formulas are hash-consed into a DAG. During search every unassigned cell
//! is abstracted by the set of values it may still take, and every
//! subformula by an over-approximation of the values it can reach at each
//! state. A branch is cut as soon as some member of the knowledge base can
//! no longer be designated at `t_0`, or the running B-cost exceeds the bound.
//! Before branching, every value of every open cell is tried once; values
//! whose propagation fails are dropped from the cell's domain.

use std::collections::HashMap;
use std::ops::ControlFlow;

use crate::formula::Formula;
use crate::trace::{Interpretation3, TruthValue3};

use super::{CostMode, SolverError};

/// Bit `r` stands for the value of rank `r` in the truth order.
type Mask = u8;

const M0: Mask = 0b001;
const MB: Mask = 0b010;
const M1: Mask = 0b100;
const DESIGNATED: Mask = MB | M1;

fn rank(v: TruthValue3) -> usize {
    match v {
        TruthValue3::False => 0,
        TruthValue3::Both => 1,
        TruthValue3::True => 2,
    }
}

fn bit(v: TruthValue3) -> Mask {
    1 << rank(v)
}

fn from_rank(r: usize) -> TruthValue3 {
    [TruthValue3::False, TruthValue3::Both, TruthValue3::True][r]
}

struct Tables {
    not: [Mask; 8],
    and: [[Mask; 8]; 8],
    or: [[Mask; 8]; 8],
}

impl Tables {
    fn new() -> Self {
        let mut t = Tables { not: [0; 8], and: [[0; 8]; 8], or: [[0; 8]; 8] };
        for x in 0..8usize {
            for r in 0..3 {
                if x & (1 << r) != 0 {
                    t.not[x] |= 1 << (2 - r);
                }
            }
            for y in 0..8usize {
                for r in 0..3 {
                    for s in 0..3 {
                        if x & (1 << r) != 0 && y & (1 << s) != 0 {
                            t.and[x][y] |= 1 << r.min(s);
                            t.or[x][y] |= 1 << r.max(s);
                        }
                    }
                }
            }
        }
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Atom(usize),
    Const(Mask),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
}

/// A knowledge base compiled for search. Node ids are topologically sorted.
pub(crate) struct Compiled {
    nodes: Vec<Node>,
    roots: Vec<usize>,
    atoms: Vec<String>,
    states: usize,
}

impl Compiled {
    /// `formulas` must be in the core fragment; `atoms` sorted and covering them.
    pub(crate) fn new(formulas: &[Formula], atoms: Vec<String>, m: usize) -> Compiled {
        let mut c = Compiled { nodes: Vec::new(), roots: Vec::new(), atoms, states: m + 1 };
        let mut index = HashMap::new();
        for f in formulas {
            let id = c.intern(f, &mut index);
            c.roots.push(id);
        }
        c
    }

    fn push(&mut self, node: Node, index: &mut HashMap<Node, usize>) -> usize {
        *index.entry(node).or_insert_with(|| {
            self.nodes.push(node);
            self.nodes.len() - 1
        })
    }

    fn intern(&mut self, f: &Formula, index: &mut HashMap<Node, usize>) -> usize {
        let node = match f {
            Formula::Atom(a) => {
                let j = self.atoms.binary_search(a).expect("atom outside compiled signature");
                Node::Atom(j)
            }
            Formula::True => Node::Const(M1),
            Formula::False => Node::Const(M0),
            Formula::Not(x) => Node::Not(self.intern(x, index)),
            Formula::And(l, r) => Node::And(self.intern(l, index), self.intern(r, index)),
            Formula::Or(l, r) => Node::Or(self.intern(l, index), self.intern(r, index)),
            Formula::Next(x) => Node::Next(self.intern(x, index)),
            Formula::Until(l, r) => Node::Until(self.intern(l, index), self.intern(r, index)),
            Formula::Finally(_) | Formula::Globally(_) | Formula::Implies(_, _) => {
                panic!("derived connective reached the solver")
            }
        };
        self.push(node, index)
    }

    pub(crate) fn num_cells(&self) -> usize {
        self.states * self.atoms.len()
    }

    pub(crate) fn m(&self) -> usize {
        self.states - 1
    }
}

/// What the search may assign and how much B it may spend.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Budget {
    /// Classical search: `B` is never tried.
    TwoValued,
    /// Three-valued search with `cost(ν, mode) ≤ bound`.
    Cost { mode: CostMode, bound: u64 },
}

pub(crate) struct Search<'a> {
    c: &'a Compiled,
    tables: Tables,
    budget: Budget,
    cells: Vec<Mask>,
    domains: Vec<Mask>,
    trail: Vec<(usize, Mask)>,
    b_per_state: Vec<u32>,
    b_per_atom: Vec<u32>,
    b_total: u64,
    table: Vec<Mask>,
    pub(crate) nodes: u64,
    node_budget: u64,
}

impl<'a> Search<'a> {
    pub(crate) fn new(c: &'a Compiled, budget: Budget, node_budget: u64) -> Self {
        let n_cells = c.num_cells();
        Search {
            c,
            tables: Tables::new(),
            budget,
            cells: vec![0; n_cells],
            domains: vec![M0 | MB | M1; n_cells],
            trail: Vec::new(),
            b_per_state: vec![0; c.states],
            b_per_atom: vec![0; c.atoms.len()],
            b_total: 0,
            table: vec![0; c.nodes.len() * c.states],
            nodes: 0,
            node_budget,
        }
    }

    fn cost(&self) -> u64 {
        match self.budget {
            Budget::TwoValued => 0,
            Budget::Cost { mode, .. } => match mode {
                CostMode::AffectedStates => self.b_per_state.iter().filter(|&&n| n > 0).count() as u64,
                CostMode::ConflictBase => self.b_total,
                CostMode::ConflictAtoms => self.b_per_atom.iter().filter(|&&n| n > 0).count() as u64,
            },
        }
    }

    /// Can cell `k` take `B` without exceeding the bound?
    fn b_affordable(&self, k: usize) -> bool {
        match self.budget {
            Budget::TwoValued => false,
            Budget::Cost { mode, bound } => {
                let n = self.c.atoms.len();
                let extra = match mode {
                    CostMode::AffectedStates => u64::from(self.b_per_state[k / n] == 0),
                    CostMode::ConflictBase => 1,
                    CostMode::ConflictAtoms => u64::from(self.b_per_atom[k % n] == 0),
                };
                self.cost() + extra <= bound
            }
        }
    }

    fn cell_mask(&self, k: usize) -> Mask {
        match self.cells[k] {
            0 if self.b_affordable(k) => self.domains[k],
            0 => self.domains[k] & !MB,
            assigned => assigned,
        }
    }

    /// Recomputes the abstract value table; returns whether every root can
    /// still be designated at `t_0`.
    fn propagate(&mut self) -> bool {
        let s = self.c.states;
        let n = self.c.atoms.len();
        for (id, node) in self.c.nodes.iter().enumerate() {
            let base = id * s;
            match *node {
                Node::Atom(j) => {
                    for t in 0..s {
                        self.table[base + t] = self.cell_mask(t * n + j);
                    }
                }
                Node::Const(mask) => self.table[base..base + s].fill(mask),
                Node::Not(x) => {
                    for t in 0..s {
                        self.table[base + t] = self.tables.not[self.table[x * s + t] as usize];
                    }
                }
                Node::And(l, r) => {
                    for t in 0..s {
                        let (a, b) = (self.table[l * s + t], self.table[r * s + t]);
                        self.table[base + t] = self.tables.and[a as usize][b as usize];
                    }
                }
                Node::Or(l, r) => {
                    for t in 0..s {
                        let (a, b) = (self.table[l * s + t], self.table[r * s + t]);
                        self.table[base + t] = self.tables.or[a as usize][b as usize];
                    }
                }
                Node::Next(x) => {
                    for t in 0..s - 1 {
                        self.table[base + t] = self.table[x * s + t + 1];
                    }
                    self.table[base + s - 1] = M0;
                }
                Node::Until(l, r) => {
                    // U(m) = 0;  U(i) = min(l_i, max(r_{i+1}, U(i+1)))
                    self.table[base + s - 1] = M0;
                    for t in (0..s - 1).rev() {
                        let later = self.tables.or[self.table[r * s + t + 1] as usize][self.table[base + t + 1] as usize];
                        self.table[base + t] = self.tables.and[self.table[l * s + t] as usize][later as usize];
                    }
                }
            }
        }
        self.c.roots.iter().all(|&root| self.table[root * s] & DESIGNATED != 0)
    }

    fn assign(&mut self, k: usize, v: TruthValue3) {
        self.cells[k] = bit(v);
        if v == TruthValue3::Both {
            let n = self.c.atoms.len();
            self.b_per_state[k / n] += 1;
            self.b_per_atom[k % n] += 1;
            self.b_total += 1;
        }
    }

    fn unassign(&mut self, k: usize) {
        if self.cells[k] == MB {
            let n = self.c.atoms.len();
            self.b_per_state[k / n] -= 1;
            self.b_per_atom[k % n] -= 1;
            self.b_total -= 1;
        }
        self.cells[k] = 0;
    }

    fn tick(&mut self) -> Result<(), SolverError> {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            return Err(SolverError::BudgetExceeded { budget: self.node_budget });
        }
        Ok(())
    }

    /// Drops values of cells `from..` that fail propagation on their own,
    /// until nothing changes. Returns false if some domain empties.
    fn tighten(&mut self, from: usize) -> Result<bool, SolverError> {
        loop {
            let mut changed = false;
            for k in from..self.cells.len() {
                let mask = self.cell_mask(k);
                for r in 0..3 {
                    if mask & (1 << r) == 0 {
                        continue;
                    }
                    self.tick()?;
                    self.assign(k, from_rank(r));
                    let ok = self.propagate();
                    self.unassign(k);
                    if !ok {
                        self.trail.push((k, self.domains[k]));
                        self.domains[k] &= !(1 << r);
                        changed = true;
                    }
                }
                if self.cell_mask(k) == 0 {
                    return Ok(false);
                }
            }
            if !changed {
                return Ok(true);
            }
        }
    }

    fn restore(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (k, mask) = self.trail.pop().expect("trail above mark");
            self.domains[k] = mask;
        }
    }

    fn snapshot(&self) -> Interpretation3 {
        let values = self.cells.iter().map(|&mask| from_rank(mask.trailing_zeros() as usize)).collect();
        Interpretation3::from_parts(self.c.m(), self.c.atoms.clone(), values)
    }

    /// Visits every complete assignment satisfying the knowledge base within
    /// the budget, in state-major cell order with value order `1, 0, B`.
    pub(crate) fn run(
        &mut self,
        visit: &mut dyn FnMut(Interpretation3) -> ControlFlow<()>,
    ) -> Result<(), SolverError> {
        self.descend(0, visit).map(drop)
    }

    fn descend(
        &mut self,
        k: usize,
        visit: &mut dyn FnMut(Interpretation3) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>, SolverError> {
        self.tick()?;
        if !self.propagate() {
            return Ok(ControlFlow::Continue(()));
        }
        if k == self.cells.len() {
            return Ok(visit(self.snapshot()));
        }
        let mark = self.trail.len();
        let mut flow = Ok(ControlFlow::Continue(()));
        if self.tighten(k)? {
            for v in [TruthValue3::True, TruthValue3::False, TruthValue3::Both] {
                if self.cell_mask(k) & bit(v) == 0 {
                    continue;
                }
                self.assign(k, v);
                flow = self.descend(k + 1, visit);
                self.unassign(k);
                if !matches!(flow, Ok(ControlFlow::Continue(()))) {
                    break;
                }
            }
        }
        self.restore(mark);
        flow
    }
}
