//! Independent reference procedures used for cross-checking: a frontier
//! saturation procedure for variable-preserving systems and a bounded
//! bidirectional search that returns a checkable rewrite chain.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::gtes::{one_step_labeled, Direction, Gtes, Tes};
use crate::term::{match_instances, match_root, Assignment, Term};
use crate::vp::NotVariablePreserving;
use crate::Verdict;

/// Saturates the sets of terms reachable from each goal term by single
/// equation steps, answering yes on intersection and no when a side
/// stabilizes. Sound and complete for variable-preserving systems because
/// every step preserves the multiset of ground subterm material only up to
/// the equations, and each frontier is finite per step.
pub fn trivial_vp(
    tes: &Tes,
    p: &Term,
    q: &Term,
    max_steps: usize,
) -> Result<Verdict, NotVariablePreserving> {
    if !tes.is_variable_preserving() {
        return Err(NotVariablePreserving);
    }
    if p == q {
        return Ok(Verdict::Yes(0));
    }
    let mut u: BTreeSet<Term> = BTreeSet::from([p.clone()]);
    let mut v: BTreeSet<Term> = BTreeSet::from([q.clone()]);
    for i in 1..=max_steps {
        let u_next = grow(tes, &u);
        let v_next = grow(tes, &v);
        let meet = u_next.intersection(&v_next).next().is_some();
        if meet {
            return Ok(Verdict::Yes(i));
        }
        if u_next == u || v_next == v {
            return Ok(Verdict::No(i));
        }
        u = u_next;
        v = v_next;
    }
    Ok(Verdict::Exhausted(max_steps))
}

fn grow(tes: &Tes, frontier: &BTreeSet<Term>) -> BTreeSet<Term> {
    let mut out = frontier.clone();
    for t in frontier {
        for (_, _, s) in one_step_labeled(tes, t, 0) {
            out.insert(s);
        }
    }
    out
}

/// A rewrite chain `terms[0] → … → terms[last]` where step `j` applies
/// equation `steps[j].0` in direction `steps[j].1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub terms: Vec<Term>,
    pub steps: Vec<(usize, Direction)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BfsOutcome {
    Connected(Chain),
    Unknown,
}

/// Bidirectional search over single equation steps. Extra variables on the
/// substituted side are instantiated with ground terms of height at most
/// `hbound`. Expansion stops after `depth` rounds or when a frontier exceeds
/// `frontier_cap` terms; the result is `Unknown` in both cases.
pub fn bounded_bfs(
    tes: &Tes,
    p: &Term,
    q: &Term,
    depth: usize,
    hbound: usize,
    frontier_cap: usize,
) -> BfsOutcome {
    // child -> (parent, equation index, direction of parent -> child)
    let mut from_p: BTreeMap<Term, Option<(Term, usize, Direction)>> =
        BTreeMap::from([(p.clone(), None)]);
    let mut from_q: BTreeMap<Term, Option<(Term, usize, Direction)>> =
        BTreeMap::from([(q.clone(), None)]);
    let mut frontier_p: BTreeSet<Term> = BTreeSet::from([p.clone()]);
    let mut frontier_q: BTreeSet<Term> = BTreeSet::from([q.clone()]);

    let meet = |from_p: &BTreeMap<_, _>, from_q: &BTreeMap<Term, Option<(Term, usize, Direction)>>| {
        from_p
            .keys()
            .find(|t: &&Term| from_q.contains_key(*t))
            .cloned()
    };

    if let Some(m) = meet(&from_p, &from_q) {
        return BfsOutcome::Connected(build_chain(&from_p, &from_q, &m));
    }

    for _ in 0..depth {
        // expand the smaller frontier
        let expand_p = frontier_p.len() <= frontier_q.len();
        let (visited, frontier) = if expand_p {
            (&mut from_p, &mut frontier_p)
        } else {
            (&mut from_q, &mut frontier_q)
        };
        if frontier.is_empty() {
            return BfsOutcome::Unknown;
        }
        let mut next_frontier = BTreeSet::new();
        for t in frontier.iter() {
            for (idx, dir, s) in one_step_labeled(tes, t, hbound) {
                if !visited.contains_key(&s) {
                    visited.insert(s.clone(), Some((t.clone(), idx, dir)));
                    next_frontier.insert(s);
                }
            }
            if visited.len() > frontier_cap {
                return BfsOutcome::Unknown;
            }
        }
        *frontier = next_frontier;
        if let Some(m) = meet(&from_p, &from_q) {
            return BfsOutcome::Connected(build_chain(&from_p, &from_q, &m));
        }
    }
    BfsOutcome::Unknown
}

fn build_chain(
    from_p: &BTreeMap<Term, Option<(Term, usize, Direction)>>,
    from_q: &BTreeMap<Term, Option<(Term, usize, Direction)>>,
    meet: &Term,
) -> Chain {
    // p side: walk meet -> p, then reverse
    let mut terms = vec![meet.clone()];
    let mut steps: Vec<(usize, Direction)> = Vec::new();
    let mut cur = meet.clone();
    while let Some(Some((parent, idx, dir))) = from_p.get(&cur) {
        // the recorded step goes parent -> cur; reversed it is cur -> parent
        steps.push((*idx, *dir));
        terms.push(parent.clone());
        cur = parent.clone();
    }
    terms.reverse();
    steps.reverse();

    // q side: walk meet -> q appending steps in flipped direction
    let mut cur = meet.clone();
    while let Some(Some((parent, idx, dir))) = from_q.get(&cur) {
        let flipped = match dir {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        };
        steps.push((*idx, flipped));
        terms.push(parent.clone());
        cur = parent.clone();
    }
    Chain { terms, steps }
}

/// Checks every link of a chain by re-deriving it: the matched side must
/// occur in the source and the target must be the corresponding replacement.
pub fn verify_chain(tes: &Tes, chain: &Chain) -> bool {
    if chain.terms.len() != chain.steps.len() + 1 {
        return false;
    }
    chain
        .steps
        .iter()
        .enumerate()
        .all(|(j, (idx, dir))| rewrites_to(tes, *idx, *dir, &chain.terms[j], &chain.terms[j + 1]))
}

fn rewrites_to(tes: &Tes, idx: usize, dir: Direction, s: &Term, t: &Term) -> bool {
    let Some(eq) = tes.equations.get(idx) else {
        return false;
    };
    let (from, to) = match dir {
        Direction::Forward => (&eq.lhs, &eq.rhs),
        Direction::Backward => (&eq.rhs, &eq.lhs),
    };
    for (context, sigma) in match_instances(from, s) {
        // keep only the shared bindings: the substituted side's own extra
        // variables overlap the matched side's extras in index space
        let shared: Assignment = (1..=eq.shared)
            .filter_map(|i| sigma.get(i as u32).map(|b| (i as u32, b.clone())))
            .collect();
        let pattern = context.fill(&to.substitute_partial(&shared));
        if match_root(&pattern, t).is_some() {
            return true;
        }
    }
    false
}

/// All ground instances of the equations obtained by substituting ground
/// terms of height at most `hbound` for every variable. Test support for
/// cross-checking congruences on bounded universes.
pub fn ground_instances(tes: &Tes, hbound: usize) -> Gtes {
    let fillers = tes.signature.ground_terms_up_to_height(hbound);
    let mut out = Gtes::new();
    for eq in &tes.equations {
        let left_vars = eq.shared + eq.left_extra;
        let right_vars = eq.shared + eq.right_extra;
        for shared in crate::term::tuples(&fillers, eq.shared) {
            for left_extras in crate::term::tuples(&fillers, eq.left_extra) {
                for right_extras in crate::term::tuples(&fillers, eq.right_extra) {
                    let mut left_assignment = Assignment::new();
                    let mut right_assignment = Assignment::new();
                    for (i, v) in shared.iter().enumerate() {
                        left_assignment.bind((i + 1) as u32, v.clone());
                        right_assignment.bind((i + 1) as u32, v.clone());
                    }
                    for (j, v) in left_extras.iter().enumerate() {
                        left_assignment.bind((eq.shared + j + 1) as u32, v.clone());
                    }
                    for (j, v) in right_extras.iter().enumerate() {
                        right_assignment.bind((eq.shared + j + 1) as u32, v.clone());
                    }
                    debug_assert!(left_vars >= eq.shared && right_vars >= eq.shared);
                    let l = eq.lhs.substitute(&left_assignment).expect("covered");
                    let r = eq.rhs.substitute(&right_assignment).expect("covered");
                    if l != r {
                        out.insert(l, r);
                    }
                }
            }
        }
    }
    out
}
