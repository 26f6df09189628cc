//! Bottom-up tree automata whose states are congruence classes of a ground
//! equation system restricted to a finite subterm-closed set.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::gtes::Gtes;
use crate::term::{Signature, StateId, SymbolId, Term, TermNode};

/// A transition `f(a_1,…,a_m) → a`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rule {
    pub symbol: SymbolId,
    pub args: Vec<StateId>,
    pub target: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateData {
    /// The alphabetically least member of the state's congruence class.
    pub representative: Term,
}

/// A deterministic bottom-up tree automaton. Rules are kept sorted by
/// `(symbol, args)`, which is the rule order induced by the alphabetical
/// order on flat left-hand sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeAutomaton {
    pub signature: Arc<Signature>,
    states: Vec<StateData>,
    rules: Vec<Rule>,
    index: BTreeMap<(SymbolId, Vec<StateId>), StateId>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("automaton is not connected: no tree reaches states {missing:?}")]
pub struct NotConnected {
    pub missing: Vec<StateId>,
}

impl TreeAutomaton {
    pub fn new(signature: Arc<Signature>, states: Vec<StateData>, mut rules: Vec<Rule>) -> Self {
        rules.sort();
        rules.dedup();
        let mut index = BTreeMap::new();
        for rule in &rules {
            index
                .entry((rule.symbol, rule.args.clone()))
                .or_insert(rule.target);
        }
        TreeAutomaton {
            signature,
            states,
            rules,
            index,
        }
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len() as u32).map(StateId)
    }

    pub fn representative(&self, id: StateId) -> &Term {
        &self.states[id.0 as usize].representative
    }

    /// Rules in rule order.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn transition(&self, symbol: SymbolId, args: &[StateId]) -> Option<StateId> {
        self.index.get(&(symbol, args.to_vec())).copied()
    }

    /// The innermost normal form of a term over `Σ ∪ A`: children are
    /// normalized first, then the whole flat redex is contracted if a rule
    /// applies. Deterministic automata have unique such normal forms.
    pub fn nf_mixed(&self, t: &Term) -> Term {
        match t.node() {
            TermNode::State(_) => t.clone(),
            TermNode::Var(_) => panic!("nf_mixed on a term with variables"),
            TermNode::App(symbol, children) => {
                let normal: Vec<Term> = children.iter().map(|c| self.nf_mixed(c)).collect();
                let args: Option<Vec<StateId>> =
                    normal.iter().map(Term::as_state).collect();
                match args.and_then(|a| self.transition(*symbol, &a)) {
                    Some(target) => Term::state(target),
                    None => Term::app(*symbol, normal),
                }
            }
        }
    }

    /// States reachable from `c` in zero or more rule applications, where a
    /// rule leads from each of its argument states to its target.
    pub fn reach_set(&self, c: StateId) -> BTreeSet<StateId> {
        let mut reached = BTreeSet::from([c]);
        loop {
            let mut changed = false;
            for rule in &self.rules {
                if rule.args.iter().any(|a| reached.contains(a))
                    && reached.insert(rule.target)
                {
                    changed = true;
                }
            }
            if !changed {
                return reached;
            }
        }
    }

    pub fn reaches(&self, c: StateId, b: StateId) -> bool {
        self.reach_set(c).contains(&b)
    }

    /// A ground witness tree for every state, built bottom-up taking rules in
    /// rule order. Fails iff some state is reached by no ground tree.
    pub fn trees_of_states(&self) -> Result<BTreeMap<StateId, Term>, NotConnected> {
        let mut trees: BTreeMap<StateId, Term> = BTreeMap::new();
        loop {
            let mut progress = false;
            for rule in &self.rules {
                if trees.contains_key(&rule.target) {
                    continue;
                }
                if let Some(children) = rule
                    .args
                    .iter()
                    .map(|a| trees.get(a).cloned())
                    .collect::<Option<Vec<_>>>()
                {
                    trees.insert(rule.target, Term::app(rule.symbol, children));
                    progress = true;
                }
            }
            if trees.len() == self.states.len() {
                return Ok(trees);
            }
            if !progress {
                let missing = self
                    .state_ids()
                    .filter(|id| !trees.contains_key(id))
                    .collect();
                return Err(NotConnected { missing });
            }
        }
    }

    pub fn is_connected(&self) -> bool {
        self.trees_of_states().is_ok()
    }

    /// No two rules share a left-hand side.
    pub fn is_deterministic(&self) -> bool {
        self.rules
            .windows(2)
            .all(|w| (w[0].symbol, &w[0].args) != (w[1].symbol, &w[1].args))
    }

    /// Every symbol has a rule for every argument tuple.
    pub fn is_totally_defined(&self) -> bool {
        let n = self.states.len() as u128;
        self.signature.symbols().all(|(id, sym)| {
            let expected = n.pow(sym.rank as u32);
            let actual = self.rules.iter().filter(|r| r.symbol == id).count() as u128;
            actual == expected
        })
    }
}

/// The outcome of the congruence-class construction for a ground equation
/// system and a set of ground target terms.
#[derive(Debug, Clone)]
pub struct CctaResult {
    pub automaton: TreeAutomaton,
    /// Class of every member of the subterm universe.
    pub class_of: BTreeMap<Term, StateId>,
    /// The targets paired with their classes, in input order.
    pub targets: Vec<(Term, StateId)>,
}

impl CctaResult {
    pub fn class(&self, t: &Term) -> Option<StateId> {
        self.class_of.get(t).copied()
    }
}

/// Builds the congruence-class automaton of `e` over the subterms of `e` and
/// of the (ground) `targets`. `targets` must be nonempty or `e` nonempty so
/// that the state set is nonempty.
pub fn build_ccta(signature: &Arc<Signature>, e: &Gtes, targets: &[Term]) -> CctaResult {
    assert!(
        !targets.is_empty(),
        "build_ccta requires at least one target term"
    );
    build_internal(signature, e, targets)
}

pub(crate) fn build_internal(
    signature: &Arc<Signature>,
    e: &Gtes,
    targets: &[Term],
) -> CctaResult {
    let mut universe = e.subterm_universe();
    for t in targets {
        debug_assert!(t.is_ground());
        universe.extend(t.subterms());
    }
    let terms: Vec<Term> = universe.into_iter().collect();
    let pos: BTreeMap<&Term, usize> = terms.iter().enumerate().map(|(i, t)| (t, i)).collect();

    // union-find over term indices; roots are the least index of the class so
    // the class representative is the alphabetically least member
    let mut parent: Vec<usize> = (0..terms.len()).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| -> bool {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        parent[hi] = lo;
        true
    };

    for (l, r) in e.iter() {
        union(&mut parent, pos[l], pos[r]);
    }

    // congruence propagation: merge terms whose roots and child classes agree
    loop {
        let mut changed = false;
        let mut table: BTreeMap<(SymbolId, Vec<usize>), usize> = BTreeMap::new();
        for (i, t) in terms.iter().enumerate() {
            if let TermNode::App(symbol, children) = t.node() {
                let key: Vec<usize> = children
                    .iter()
                    .map(|c| find(&mut parent, pos[c]))
                    .collect();
                match table.get(&(*symbol, key.clone())) {
                    Some(&j) => {
                        if union(&mut parent, i, j) {
                            changed = true;
                        }
                    }
                    None => {
                        table.insert((*symbol, key), i);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    // states ordered by their representative (= least member, ascending in
    // the alphabetical order because `terms` is sorted)
    let mut roots: Vec<usize> = (0..terms.len())
        .filter(|&i| find(&mut parent, i) == i)
        .collect();
    roots.sort();
    let state_of_root: BTreeMap<usize, StateId> = roots
        .iter()
        .enumerate()
        .map(|(s, &r)| (r, StateId(s as u32)))
        .collect();

    let class_of: BTreeMap<Term, StateId> = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), state_of_root[&find(&mut parent, i)]))
        .collect();

    let states: Vec<StateData> = roots
        .iter()
        .map(|&r| StateData {
            representative: terms[r].clone(),
        })
        .collect();

    let mut rules = Vec::new();
    for t in &terms {
        if let TermNode::App(symbol, children) = t.node() {
            rules.push(Rule {
                symbol: *symbol,
                args: children.iter().map(|c| class_of[c]).collect(),
                target: class_of[t],
            });
        }
    }

    let automaton = TreeAutomaton::new(signature.clone(), states, rules);
    debug_assert!(automaton.is_deterministic());
    let targets = targets
        .iter()
        .map(|t| (t.clone(), class_of[t]))
        .collect();
    CctaResult {
        automaton,
        class_of,
        targets,
    }
}
