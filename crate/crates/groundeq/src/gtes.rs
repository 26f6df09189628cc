//! Term equation systems, ground rewriting, and the reduction of a ground
//! equation system to an equivalent reduced (hence convergent) rewriting
//! system.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::automaton;
use crate::term::{Assignment, Signature, Term, TermNode};

/// An equation of a TES with variables renumbered so that shared variables
/// occupy indices `1..=shared`, variables occurring only on the left occupy
/// `shared+1..=shared+left_extra`, and variables occurring only on the right
/// occupy `shared+1..=shared+right_extra`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TesEquation {
    pub lhs: Term,
    pub rhs: Term,
    pub shared: usize,
    pub left_extra: usize,
    pub right_extra: usize,
}

impl TesEquation {
    /// Renumbers the variables of `lhs ≈ rhs` into the canonical layout.
    pub fn new(lhs: Term, rhs: Term) -> TesEquation {
        let left_order = occurrence_order(&lhs);
        let right_order = occurrence_order(&rhs);
        let right_set: BTreeSet<u32> = right_order.iter().copied().collect();
        let left_set: BTreeSet<u32> = left_order.iter().copied().collect();

        let shared: Vec<u32> = left_order
            .iter()
            .copied()
            .filter(|v| right_set.contains(v))
            .collect();
        let left_only: Vec<u32> = left_order
            .iter()
            .copied()
            .filter(|v| !right_set.contains(v))
            .collect();
        let right_only: Vec<u32> = right_order
            .iter()
            .copied()
            .filter(|v| !left_set.contains(v))
            .collect();

        let k = shared.len();
        let mut left_map = Assignment::new();
        let mut right_map = Assignment::new();
        for (i, v) in shared.iter().enumerate() {
            left_map.bind(*v, Term::var((i + 1) as u32));
            right_map.bind(*v, Term::var((i + 1) as u32));
        }
        for (i, v) in left_only.iter().enumerate() {
            left_map.bind(*v, Term::var((k + i + 1) as u32));
        }
        for (i, v) in right_only.iter().enumerate() {
            right_map.bind(*v, Term::var((k + i + 1) as u32));
        }

        TesEquation {
            lhs: lhs.substitute(&left_map).expect("all lhs variables mapped"),
            rhs: rhs.substitute(&right_map).expect("all rhs variables mapped"),
            shared: k,
            left_extra: left_only.len(),
            right_extra: right_only.len(),
        }
    }

    pub fn is_variable_preserving(&self) -> bool {
        self.left_extra == 0 && self.right_extra == 0
    }
}

/// Variable indices in order of first occurrence (preorder).
fn occurrence_order(t: &Term) -> Vec<u32> {
    let mut order = Vec::new();
    let mut seen = BTreeSet::new();
    fn walk(t: &Term, order: &mut Vec<u32>, seen: &mut BTreeSet<u32>) {
        match t.node() {
            TermNode::Var(i) => {
                if seen.insert(*i) {
                    order.push(*i);
                }
            }
            TermNode::App(_, children) => {
                for child in children {
                    walk(child, order, seen);
                }
            }
            TermNode::State(_) => {}
        }
    }
    walk(t, &mut order, &mut seen);
    order
}

/// A term equation system over a signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tes {
    pub signature: Arc<Signature>,
    pub equations: Vec<TesEquation>,
}

impl Tes {
    pub fn new(signature: Arc<Signature>, equations: Vec<(Term, Term)>) -> Tes {
        Tes {
            signature,
            equations: equations
                .into_iter()
                .map(|(l, r)| TesEquation::new(l, r))
                .collect(),
        }
    }

    /// True iff every equation has the same variables on both sides.
    pub fn is_variable_preserving(&self) -> bool {
        self.equations.iter().all(TesEquation::is_variable_preserving)
    }
}

/// Which side of an equation an applied rewrite step used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Direction {
    /// The left-hand side was matched (rewriting `l → r`).
    Forward,
    /// The right-hand side was matched (rewriting `r → l`).
    Backward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Forward => write!(f, "->"),
            Direction::Backward => write!(f, "<-"),
        }
    }
}

/// All one-step rewrites of `t` under `tes` with the applied equation and
/// direction. Variables occurring only on the substituted side range over all
/// ground terms of height at most `hbound`.
pub fn one_step_labeled(
    tes: &Tes,
    t: &Term,
    hbound: usize,
) -> Vec<(usize, Direction, Term)> {
    let fillers = tes.signature.ground_terms_up_to_height(hbound);
    let mut out = Vec::new();
    for (idx, eq) in tes.equations.iter().enumerate() {
        for direction in [Direction::Forward, Direction::Backward] {
            let (from, to, extras) = match direction {
                Direction::Forward => (&eq.lhs, &eq.rhs, eq.right_extra),
                Direction::Backward => (&eq.rhs, &eq.lhs, eq.left_extra),
            };
            for (context, matched) in crate::term::match_instances(from, t) {
                for extra_values in crate::term::tuples(&fillers, extras) {
                    let mut assignment = Assignment::new();
                    for i in 1..=eq.shared {
                        assignment
                            .bind(i as u32, matched.get(i as u32).cloned().expect("shared var"));
                    }
                    for (j, v) in extra_values.iter().enumerate() {
                        assignment.bind((eq.shared + j + 1) as u32, v.clone());
                    }
                    let instance = to.substitute(&assignment).expect("covered");
                    out.push((idx, direction, context.fill(&instance)));
                }
            }
        }
    }
    out
}

/// The set of one-step rewrites of `t` (both directions of every equation).
pub fn one_step(tes: &Tes, t: &Term, hbound: usize) -> BTreeSet<Term> {
    one_step_labeled(tes, t, hbound)
        .into_iter()
        .map(|(_, _, s)| s)
        .collect()
}

/// A finite set of ordered ground equations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Gtes {
    equations: BTreeSet<(Term, Term)>,
}

impl Gtes {
    pub fn new() -> Gtes {
        Gtes::default()
    }

    pub fn insert(&mut self, lhs: Term, rhs: Term) {
        debug_assert!(lhs.is_ground() && rhs.is_ground());
        self.equations.insert((lhs, rhs));
    }

    pub fn contains(&self, lhs: &Term, rhs: &Term) -> bool {
        self.equations.contains(&(lhs.clone(), rhs.clone()))
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Term, Term)> {
        self.equations.iter()
    }

    pub fn union(&self, other: &Gtes) -> Gtes {
        Gtes {
            equations: self.equations.union(&other.equations).cloned().collect(),
        }
    }

    pub fn is_subset(&self, other: &Gtes) -> bool {
        self.equations.is_subset(&other.equations)
    }

    /// All subterms of all equations.
    pub fn subterm_universe(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        for (l, r) in &self.equations {
            out.extend(l.subterms());
            out.extend(r.subterms());
        }
        out
    }
}

impl FromIterator<(Term, Term)> for Gtes {
    fn from_iter<I: IntoIterator<Item = (Term, Term)>>(iter: I) -> Self {
        Gtes {
            equations: iter.into_iter().collect(),
        }
    }
}

/// A confluent terminating ground rule set: every left-hand side is
/// irreducible with respect to the other rules and every right-hand side is
/// irreducible with respect to all rules.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReducedGtrs {
    rules: BTreeMap<Term, Term>,
}

impl ReducedGtrs {
    pub fn rules(&self) -> impl Iterator<Item = (&Term, &Term)> {
        self.rules.iter()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// The unique normal form of `t`. Children are normalized first; a term
    /// with irreducible children can only be rewritten by a rule whose
    /// left-hand side equals the whole term.
    pub fn normalize(&self, t: &Term) -> Term {
        match t.node() {
            TermNode::App(symbol, children) => {
                let reduced = Term::app(
                    *symbol,
                    children.iter().map(|c| self.normalize(c)).collect(),
                );
                match self.rules.get(&reduced) {
                    // right-hand sides are irreducible, so one step suffices
                    Some(rhs) => rhs.clone(),
                    None => reduced,
                }
            }
            _ => t.clone(),
        }
    }

    /// Equations `l ≈ r` for the rules `l → r`.
    pub fn to_gtes(&self) -> Gtes {
        self.rules
            .iter()
            .map(|(l, r)| (l.clone(), r.clone()))
            .collect()
    }
}

/// True iff for every rule `u → v`, `u` is irreducible with respect to the
/// other rules and `v` is irreducible with respect to all rules.
pub fn is_reduced<'a, I>(rules: I) -> bool
where
    I: IntoIterator<Item = (&'a Term, &'a Term)>,
{
    let rules: Vec<(&Term, &Term)> = rules.into_iter().collect();
    let reducible_by = |t: &Term, skip: Option<usize>| {
        let subs = t.subterms();
        rules
            .iter()
            .enumerate()
            .any(|(i, (lhs, _))| Some(i) != skip && subs.contains(lhs))
    };
    rules.iter().enumerate().all(|(i, (lhs, rhs))| {
        !reducible_by(lhs, Some(i)) && !reducible_by(rhs, None)
    })
}

/// All single-step reducts of `t` under a ground rule set, applying any rule
/// at any position.
pub fn rewrite_once<'a, I>(rules: I, t: &Term) -> BTreeSet<Term>
where
    I: IntoIterator<Item = (&'a Term, &'a Term)>,
{
    let mut out = BTreeSet::new();
    for (lhs, rhs) in rules {
        for (context, _) in crate::term::match_instances(lhs, t) {
            out.insert(context.fill(rhs));
        }
    }
    out
}

/// Constructs a reduced GTRS equivalent to the ground equation system `E`.
///
/// The congruence classes of the subterm universe are computed by union-find
/// with congruence propagation; every class gets a ground witness term built
/// bottom-up in rule order, and every non-witness member of the universe
/// contributes a rule rewriting it (with witness children) to the witness.
pub fn reduce_gtes(signature: &Arc<Signature>, e: &Gtes) -> ReducedGtrs {
    if e.is_empty() {
        return ReducedGtrs::default();
    }
    let ccta = automaton::build_internal(signature, e, &[]);
    let witnesses = ccta
        .automaton
        .trees_of_states()
        .expect("congruence-class automaton is connected");
    let mut rules = BTreeMap::new();
    for (t, class) in &ccta.class_of {
        if let TermNode::App(symbol, children) = t.node() {
            let lhs = Term::app(
                *symbol,
                children
                    .iter()
                    .map(|c| witnesses[&ccta.class_of[c]].clone())
                    .collect(),
            );
            let rhs = witnesses[class].clone();
            if lhs != rhs {
                let prev = rules.insert(lhs, rhs.clone());
                debug_assert!(prev.map_or(true, |p| p == rhs));
            }
        }
    }
    ReducedGtrs { rules }
}

/// Decides `s ⇔*_E t` by comparing normal forms under an equivalent reduced
/// GTRS.
pub fn gtes_equiv(signature: &Arc<Signature>, e: &Gtes, s: &Term, t: &Term) -> bool {
    let reduced = reduce_gtes(signature, e);
    reduced.normalize(s) == reduced.normalize(t)
}
