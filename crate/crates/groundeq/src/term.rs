//! Ranked alphabets, terms, contexts, substitution, and syntactic matching.
//!
//! Terms are immutable trees with shared subtrees (`Arc`). The derived `Ord`
//! on [`Term`] coincides with the alphabetical order on ground terms over
//! `Σ ∪ A`: roots are compared first (symbols by declaration order, every
//! symbol before every automaton state), equal roots are decided by the
//! leftmost differing child.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Index of a symbol in its [`Signature`]; declaration order is the symbol
/// order `≺_Σ` (earlier = smaller).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

/// Index of a tree-automaton state; ids are assigned in state order `≺_A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub rank: usize,
}

/// A ranked alphabet with a total symbol order given by declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("signature has no symbol of rank 0")]
    NoConstants,
}

impl Signature {
    pub fn new(symbols: Vec<(String, usize)>) -> Result<Self, SignatureError> {
        let mut seen = BTreeSet::new();
        for (name, _) in &symbols {
            if !seen.insert(name.clone()) {
                return Err(SignatureError::DuplicateSymbol(name.clone()));
            }
        }
        if !symbols.iter().any(|(_, rank)| *rank == 0) {
            return Err(SignatureError::NoConstants);
        }
        Ok(Signature {
            symbols: symbols
                .into_iter()
                .map(|(name, rank)| Symbol { name, rank })
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (SymbolId, &Symbol)> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (SymbolId(i as u32), s))
    }

    pub fn rank(&self, id: SymbolId) -> usize {
        self.symbols[id.0 as usize].rank
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.0 as usize].name
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.symbols
            .iter()
            .position(|s| s.name == name)
            .map(|i| SymbolId(i as u32))
    }

    /// Symbols of rank 0, in `≺_Σ` order.
    pub fn constants(&self) -> Vec<SymbolId> {
        self.symbols()
            .filter(|(_, s)| s.rank == 0)
            .map(|(id, _)| id)
            .collect()
    }

    /// All ground terms of height at most `hbound`, in alphabetical order.
    pub fn ground_terms_up_to_height(&self, hbound: usize) -> Vec<Term> {
        let mut layer: BTreeSet<Term> =
            self.constants().into_iter().map(Term::constant).collect();
        for _ in 0..hbound {
            let prev: Vec<Term> = layer.iter().cloned().collect();
            for (id, sym) in self.symbols() {
                if sym.rank == 0 {
                    continue;
                }
                for args in tuples(&prev, sym.rank) {
                    layer.insert(Term::app(id, args));
                }
            }
        }
        layer.into_iter().collect()
    }
}

/// All `len`-tuples over `items`, in lexicographic order.
pub(crate) fn tuples<T: Clone>(items: &[T], len: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * items.len());
        for prefix in &out {
            for item in items {
                let mut tuple = prefix.clone();
                tuple.push(item.clone());
                next.push(tuple);
            }
        }
        out = next;
    }
    out
}

/// The variant order makes the derived `Ord` match the order on `Σ ∪ A`:
/// symbol applications sort before states.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermNode {
    /// Variable `x_i`, index `i ≥ 1`.
    Var(u32),
    App(SymbolId, Vec<Term>),
    /// Automaton state used as an extra constant in mixed terms.
    State(StateId),
}

/// A term over `Σ ∪ X ∪ A`. Ground terms contain neither variables nor
/// states; mixed terms (automaton normal forms) may contain states.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term(Arc<TermNode>);

impl Term {
    pub fn var(index: u32) -> Term {
        debug_assert!(index >= 1);
        Term(Arc::new(TermNode::Var(index)))
    }

    pub fn app(symbol: SymbolId, children: Vec<Term>) -> Term {
        Term(Arc::new(TermNode::App(symbol, children)))
    }

    pub fn constant(symbol: SymbolId) -> Term {
        Term::app(symbol, Vec::new())
    }

    pub fn state(id: StateId) -> Term {
        Term(Arc::new(TermNode::State(id)))
    }

    pub fn node(&self) -> &TermNode {
        &self.0
    }

    pub fn as_state(&self) -> Option<StateId> {
        match self.node() {
            TermNode::State(id) => Some(*id),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self.node() {
            TermNode::Var(_) | TermNode::State(_) => false,
            TermNode::App(_, children) => children.iter().all(Term::is_ground),
        }
    }

    /// Term over `Σ ∪ A` without variables.
    pub fn is_mixed(&self) -> bool {
        match self.node() {
            TermNode::Var(_) => false,
            TermNode::State(_) => true,
            TermNode::App(_, children) => children.iter().all(Term::is_mixed),
        }
    }

    /// Constants, variables, and states have height 0.
    pub fn height(&self) -> usize {
        match self.node() {
            TermNode::Var(_) | TermNode::State(_) => 0,
            TermNode::App(_, children) => children
                .iter()
                .map(|c| c.height() + 1)
                .max()
                .unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self.node() {
            TermNode::Var(_) | TermNode::State(_) => 1,
            TermNode::App(_, children) => 1 + children.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// The set `sub(t)` of subterms, including `t` itself.
    pub fn subterms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.collect_subterms(&mut out);
        out
    }

    fn collect_subterms(&self, out: &mut BTreeSet<Term>) {
        if out.insert(self.clone()) {
            if let TermNode::App(_, children) = self.node() {
                for child in children {
                    child.collect_subterms(out);
                }
            }
        }
    }

    /// Variable indices occurring in the term.
    pub fn variables(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<u32>) {
        match self.node() {
            TermNode::Var(i) => {
                out.insert(*i);
            }
            TermNode::App(_, children) => {
                for child in children {
                    child.collect_variables(out);
                }
            }
            TermNode::State(_) => {}
        }
    }

    /// Replaces every `x_i` by `assignment[i]`.
    pub fn substitute(&self, assignment: &Assignment) -> Result<Term, MissingBinding> {
        match self.node() {
            TermNode::Var(i) => assignment
                .get(*i)
                .cloned()
                .ok_or(MissingBinding(*i)),
            TermNode::App(symbol, children) => {
                let children = children
                    .iter()
                    .map(|c| c.substitute(assignment))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Term::app(*symbol, children))
            }
            TermNode::State(_) => Ok(self.clone()),
        }
    }

    /// Replaces bound variables and keeps unbound ones.
    pub fn substitute_partial(&self, assignment: &Assignment) -> Term {
        match self.node() {
            TermNode::Var(i) => assignment.get(*i).cloned().unwrap_or_else(|| self.clone()),
            TermNode::App(symbol, children) => Term::app(
                *symbol,
                children
                    .iter()
                    .map(|c| c.substitute_partial(assignment))
                    .collect(),
            ),
            TermNode::State(_) => self.clone(),
        }
    }

    /// Replaces every state occurrence using `witnesses`. Used to expand
    /// automaton normal forms into ground terms.
    pub fn expand_states(&self, witnesses: &BTreeMap<StateId, Term>) -> Term {
        match self.node() {
            TermNode::State(id) => witnesses[id].clone(),
            TermNode::App(symbol, children) => Term::app(
                *symbol,
                children.iter().map(|c| c.expand_states(witnesses)).collect(),
            ),
            TermNode::Var(_) => self.clone(),
        }
    }

    pub fn display<'a>(&'a self, signature: &'a Signature) -> TermDisplay<'a> {
        TermDisplay {
            term: self,
            signature,
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            TermNode::Var(i) => write!(f, "x{i}"),
            TermNode::State(id) => write!(f, "q{}", id.0),
            TermNode::App(symbol, children) => {
                write!(f, "s{}", symbol.0)?;
                if !children.is_empty() {
                    f.debug_list().entries(children).finish()?;
                }
                Ok(())
            }
        }
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    signature: &'a Signature,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term.node() {
            TermNode::Var(i) => write!(f, "x{i}"),
            TermNode::State(id) => write!(f, "[{}]", id.0),
            TermNode::App(symbol, children) => {
                write!(f, "{}", self.signature.name(*symbol))?;
                if !children.is_empty() {
                    write!(f, "(")?;
                    for (i, child) in children.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{}", child.display(self.signature))?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// The alphabetical order `≺_alph`, total on ground and mixed terms.
pub fn compare_alph(s: &Term, t: &Term) -> Ordering {
    s.cmp(t)
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("no binding for variable x{0}")]
pub struct MissingBinding(pub u32);

/// A total map from variable indices to terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Assignment {
    bindings: BTreeMap<u32, Term>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn bind(&mut self, index: u32, term: Term) {
        self.bindings.insert(index, term);
    }

    pub fn get(&self, index: u32) -> Option<&Term> {
        self.bindings.get(&index)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Term)> {
        self.bindings.iter().map(|(i, t)| (*i, t))
    }
}

impl FromIterator<(u32, Term)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (u32, Term)>>(iter: I) -> Self {
        Assignment {
            bindings: iter.into_iter().collect(),
        }
    }
}

/// A ground term over `Σ ∪ {x1}` in which `x1` occurs exactly once.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Context(Term);

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("term is not a context: x1 must occur exactly once")]
pub struct NotAContext;

impl Context {
    pub fn new(term: Term) -> Result<Self, NotAContext> {
        if count_hole(&term) == 1 {
            Ok(Context(term))
        } else {
            Err(NotAContext)
        }
    }

    /// The trivial context `x1`.
    pub fn hole() -> Self {
        Context(Term::var(1))
    }

    pub fn term(&self) -> &Term {
        &self.0
    }

    /// Plugs `t` into the hole.
    pub fn fill(&self, t: &Term) -> Term {
        fill_hole(&self.0, t)
    }
}

fn count_hole(t: &Term) -> usize {
    match t.node() {
        TermNode::Var(1) => 1,
        TermNode::Var(_) | TermNode::State(_) => 0,
        TermNode::App(_, children) => children.iter().map(count_hole).sum(),
    }
}

fn fill_hole(t: &Term, filler: &Term) -> Term {
    match t.node() {
        TermNode::Var(1) => filler.clone(),
        TermNode::Var(_) | TermNode::State(_) => t.clone(),
        TermNode::App(symbol, children) => Term::app(
            *symbol,
            children.iter().map(|c| fill_hole(c, filler)).collect(),
        ),
    }
}

/// All pairs `(u, σ)` with `u[lσ] = t`, scanning every position of `t` in
/// preorder. Non-linear patterns must bind each variable consistently.
pub fn match_instances(pattern: &Term, t: &Term) -> Vec<(Context, Assignment)> {
    let mut out = Vec::new();
    let positions = positions_of(t);
    for (context_term, subterm) in positions {
        let mut assignment = Assignment::new();
        if match_at(pattern, &subterm, &mut assignment) {
            let context = Context::new(context_term).expect("position yields a context");
            out.push((context, assignment));
        }
    }
    out
}

/// Matches `pattern` against the whole of `t` (no context).
pub fn match_root(pattern: &Term, t: &Term) -> Option<Assignment> {
    let mut assignment = Assignment::new();
    if match_at(pattern, t, &mut assignment) {
        Some(assignment)
    } else {
        None
    }
}

/// Every position of `t` as (context with x1 at the position, subterm there),
/// in preorder.
fn positions_of(t: &Term) -> Vec<(Term, Term)> {
    let mut out = Vec::new();
    walk_positions(t, &|hole| hole, &mut out);
    out
}

fn walk_positions(
    t: &Term,
    rebuild: &dyn Fn(Term) -> Term,
    out: &mut Vec<(Term, Term)>,
) {
    out.push((rebuild(Term::var(1)), t.clone()));
    if let TermNode::App(symbol, children) = t.node() {
        for (i, child) in children.iter().enumerate() {
            let symbol = *symbol;
            let children = children.clone();
            let rebuild_child = move |hole: Term| {
                let mut new_children = children.clone();
                new_children[i] = hole;
                Term::app(symbol, new_children)
            };
            let outer = |hole: Term| rebuild(rebuild_child(hole));
            walk_positions(child, &outer, out);
        }
    }
}

fn match_at(pattern: &Term, t: &Term, assignment: &mut Assignment) -> bool {
    match pattern.node() {
        TermNode::Var(i) => match assignment.get(*i) {
            Some(bound) => bound == t,
            None => {
                assignment.bind(*i, t.clone());
                true
            }
        },
        TermNode::App(symbol, pattern_children) => match t.node() {
            TermNode::App(t_symbol, t_children) if symbol == t_symbol => pattern_children
                .iter()
                .zip(t_children)
                .all(|(p, c)| match_at(p, c, assignment)),
            _ => false,
        },
        TermNode::State(id) => t.as_state() == Some(*id),
    }
}
