//! The semi-decision procedure for variable-preserving equation systems:
//! grow ground equation systems W (seeded from both goal terms), P (from the
//! first) and Q (from the second), answer yes when the goal terms become
//! equivalent in W, and no when any of the three systems stabilizes.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::automaton::{build_ccta, CctaResult, TreeAutomaton};
use crate::gtes::{gtes_equiv, reduce_gtes, Gtes, Tes};
use crate::term::{tuples, Assignment, Signature, StateId, Term};
use crate::Verdict;

/// Which sides of an equation are matched when seeding and when stepping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchSides {
    Both,
    LhsOnly,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("equation system is not variable-preserving")]
pub struct NotVariablePreserving;

/// Instances `lσ ≈ rσ` of equations whose matched side occurs somewhere in a
/// target, dropping trivial instances.
fn seed_system(tes: &Tes, targets: &[&Term], sides: MatchSides) -> Gtes {
    let mut out = Gtes::new();
    for eq in &tes.equations {
        let patterns: &[&Term] = match sides {
            MatchSides::Both => &[&eq.lhs, &eq.rhs],
            MatchSides::LhsOnly => &[&eq.lhs],
        };
        for target in targets {
            for pattern in patterns {
                for (_, assignment) in crate::term::match_instances(pattern, target) {
                    let l = eq.lhs.substitute(&assignment).expect("vp: all vars shared");
                    let r = eq.rhs.substitute(&assignment).expect("vp: all vars shared");
                    if l != r {
                        out.insert(l, r);
                    }
                }
            }
        }
    }
    out
}

/// The first systems `(W_1, P_1, Q_1)` for goal terms `p` and `q`.
pub fn seed_vp(
    tes: &Tes,
    p: &Term,
    q: &Term,
    sides: MatchSides,
) -> Result<(Gtes, Gtes, Gtes), NotVariablePreserving> {
    if !tes.is_variable_preserving() {
        return Err(NotVariablePreserving);
    }
    Ok((
        seed_system(tes, &[p, q], sides),
        seed_system(tes, &[p], sides),
        seed_system(tes, &[q], sides),
    ))
}

/// A ground equation system together with the congruence-class automaton of
/// `(system, p, q)` and ground witness trees for its states.
pub struct SysState {
    pub gtes: Gtes,
    pub ccta: CctaResult,
    pub witnesses: BTreeMap<StateId, Term>,
}

impl SysState {
    pub fn new(signature: &Arc<Signature>, gtes: Gtes, p: &Term, q: &Term) -> SysState {
        let ccta = build_ccta(signature, &gtes, &[p.clone(), q.clone()]);
        let witnesses = ccta
            .automaton
            .trees_of_states()
            .expect("congruence-class automaton is connected");
        SysState {
            gtes,
            ccta,
            witnesses,
        }
    }

    pub fn automaton(&self) -> &TreeAutomaton {
        &self.ccta.automaton
    }

    /// States from which some class of a `reach_targets` member is reachable.
    fn reach_filter(&self, reach_targets: &[&Term]) -> BTreeSet<StateId> {
        let goal: BTreeSet<StateId> = reach_targets
            .iter()
            .map(|t| self.ccta.class(t).expect("target in universe"))
            .collect();
        self.automaton()
            .state_ids()
            .filter(|&a| {
                let reach = self.automaton().reach_set(a);
                goal.iter().any(|g| reach.contains(g))
            })
            .collect()
    }
}

/// One expansion step: every equation side instantiated with state tuples
/// that normalize to a state reaching a target class contributes the ground
/// instance obtained by replacing states with their witness trees, unless the
/// instance's sides are already equivalent in the current system.
pub fn step_vp(
    tes: &Tes,
    cur: &SysState,
    reach_targets: &[&Term],
    sides: MatchSides,
) -> Gtes {
    let automaton = cur.automaton();
    let allowed = cur.reach_filter(reach_targets);
    let states: Vec<StateId> = automaton.state_ids().collect();
    let mut next = cur.gtes.clone();
    for eq in &tes.equations {
        let var_count = eq.shared;
        for args in tuples(&states, var_count) {
            let state_assignment: Assignment = args
                .iter()
                .enumerate()
                .map(|(i, a)| ((i + 1) as u32, Term::state(*a)))
                .collect();
            let patterns: &[&Term] = match sides {
                MatchSides::Both => &[&eq.lhs, &eq.rhs],
                MatchSides::LhsOnly => &[&eq.lhs],
            };
            let fires = patterns.iter().any(|pattern| {
                let instance = pattern
                    .substitute(&state_assignment)
                    .expect("vp: all vars shared");
                match automaton.nf_mixed(&instance).as_state() {
                    Some(a) => allowed.contains(&a),
                    None => false,
                }
            });
            if !fires {
                continue;
            }
            let witness_assignment: Assignment = args
                .iter()
                .enumerate()
                .map(|(i, a)| ((i + 1) as u32, cur.witnesses[a].clone()))
                .collect();
            let l = eq.lhs.substitute(&witness_assignment).expect("covered");
            let r = eq.rhs.substitute(&witness_assignment).expect("covered");
            if automaton.nf_mixed(&l) != automaton.nf_mixed(&r) {
                next.insert(l, r);
            }
        }
    }
    next
}

/// One step of a run: the systems after the step, the equations each gained,
/// and the automaton of the W system.
pub struct StepRecord {
    pub index: usize,
    pub w: Gtes,
    pub p_sys: Gtes,
    pub q_sys: Gtes,
    pub added_w: Vec<(Term, Term)>,
    pub added_p: Vec<(Term, Term)>,
    pub added_q: Vec<(Term, Term)>,
    pub w_automaton: TreeAutomaton,
}

pub struct RunTrace {
    pub steps: Vec<StepRecord>,
    pub verdict: Verdict,
}

fn diff(next: &Gtes, prev: &Gtes) -> Vec<(Term, Term)> {
    next.iter()
        .filter(|pair| !prev.contains(&pair.0, &pair.1))
        .cloned()
        .collect()
}

/// Runs the variable-preserving procedure for at most `max_steps` steps.
/// When `reduce` is set, every system is replaced by an equivalent reduced
/// rule system after each step.
pub fn run_vp(
    tes: &Tes,
    p: &Term,
    q: &Term,
    max_steps: usize,
    sides: MatchSides,
    reduce: bool,
) -> Result<(Verdict, RunTrace), NotVariablePreserving> {
    assert!(max_steps >= 1);
    let sig = &tes.signature;
    let canon = |g: Gtes| {
        if reduce {
            reduce_gtes(sig, &g).to_gtes()
        } else {
            g
        }
    };

    let (w1, p1, q1) = seed_vp(tes, p, q, sides)?;
    let mut w = SysState::new(sig, canon(w1), p, q);
    let mut ps = SysState::new(sig, canon(p1), p, q);
    let mut qs = SysState::new(sig, canon(q1), p, q);

    let mut steps = Vec::new();
    let empty = Gtes::new();
    steps.push(StepRecord {
        index: 1,
        w: w.gtes.clone(),
        p_sys: ps.gtes.clone(),
        q_sys: qs.gtes.clone(),
        added_w: diff(&w.gtes, &empty),
        added_p: diff(&ps.gtes, &empty),
        added_q: diff(&qs.gtes, &empty),
        w_automaton: w.automaton().clone(),
    });

    let equivalent = |sys: &SysState| {
        let same = sys.ccta.class(p) == sys.ccta.class(q);
        debug_assert_eq!(same, gtes_equiv(sig, &sys.gtes, p, q));
        same
    };

    if equivalent(&w) {
        let verdict = Verdict::Yes(1);
        return Ok((verdict, RunTrace { steps, verdict }));
    }

    for i in 2..=max_steps {
        let w_next = canon(step_vp(tes, &w, &[p, q], sides));
        let p_next = canon(step_vp(tes, &ps, &[p], sides));
        let q_next = canon(step_vp(tes, &qs, &[q], sides));

        let stabilized = w_next == w.gtes || p_next == ps.gtes || q_next == qs.gtes;
        let added_w = diff(&w_next, &w.gtes);
        let added_p = diff(&p_next, &ps.gtes);
        let added_q = diff(&q_next, &qs.gtes);

        let w_new = SysState::new(sig, w_next, p, q);
        let ps_new = SysState::new(sig, p_next, p, q);
        let qs_new = SysState::new(sig, q_next, p, q);

        steps.push(StepRecord {
            index: i,
            w: w_new.gtes.clone(),
            p_sys: ps_new.gtes.clone(),
            q_sys: qs_new.gtes.clone(),
            added_w,
            added_p,
            added_q,
            w_automaton: w_new.automaton().clone(),
        });

        if equivalent(&w_new) {
            let verdict = Verdict::Yes(i);
            return Ok((verdict, RunTrace { steps, verdict }));
        }
        if stabilized {
            let verdict = Verdict::No(i);
            return Ok((verdict, RunTrace { steps, verdict }));
        }

        w = w_new;
        ps = ps_new;
        qs = qs_new;
    }

    let verdict = Verdict::Exhausted(max_steps);
    Ok((verdict, RunTrace { steps, verdict }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Signature;

    fn unary_sig() -> Arc<Signature> {
        Arc::new(
            Signature::new(
                [("$", 0), ("h", 1), ("g", 1), ("f", 1), ("e", 1)]
                    .iter()
                    .map(|(n, r)| (n.to_string(), *r))
                    .collect(),
            )
            .unwrap(),
        )
    }

    fn c(sig: &Signature, name: &str) -> Term {
        Term::constant(sig.lookup(name).unwrap())
    }

    fn u1(sig: &Signature, name: &str, child: Term) -> Term {
        Term::app(sig.lookup(name).unwrap(), vec![child])
    }

    /// e(h(x1)) ≈ h(x1), f(h(x1)) ≈ h(x1), g(h(x1)) ≈ h(x1),
    /// f(f(x1)) ≈ g(g(x1)).
    fn unary_tes(sig: &Arc<Signature>) -> Tes {
        let h = |t| u1(sig, "h", t);
        Tes::new(
            sig.clone(),
            vec![
                (u1(sig, "e", h(Term::var(1))), h(Term::var(1))),
                (u1(sig, "f", h(Term::var(1))), h(Term::var(1))),
                (u1(sig, "g", h(Term::var(1))), h(Term::var(1))),
                (
                    u1(sig, "f", u1(sig, "f", Term::var(1))),
                    u1(sig, "g", u1(sig, "g", Term::var(1))),
                ),
            ],
        )
    }

    fn goal_terms(sig: &Signature) -> (Term, Term) {
        let h = |t| u1(sig, "h", t);
        let d = c(sig, "$");
        let p = u1(sig, "e", u1(sig, "f", u1(sig, "g", h(d.clone()))));
        let q = u1(sig, "e", h(d));
        (p, q)
    }

    #[test]
    fn seed_matches_known_first_systems() {
        let sig = unary_sig();
        let tes = unary_tes(&sig);
        let (p, q) = goal_terms(&sig);
        let h = |t| u1(&sig, "h", t);
        let d = c(&sig, "$");

        let (w1, p1, q1) = seed_vp(&tes, &p, &q, MatchSides::LhsOnly).unwrap();
        let expect_w1: Gtes = [
            (u1(&sig, "g", h(d.clone())), h(d.clone())),
            (u1(&sig, "e", h(d.clone())), h(d.clone())),
        ]
        .into_iter()
        .collect();
        assert_eq!(w1, expect_w1);
        let expect_p1: Gtes = [(u1(&sig, "g", h(d.clone())), h(d.clone()))]
            .into_iter()
            .collect();
        assert_eq!(p1, expect_p1);
        let expect_q1: Gtes = [(u1(&sig, "e", h(d.clone())), h(d.clone()))]
            .into_iter()
            .collect();
        assert_eq!(q1, expect_q1);
    }

    #[test]
    fn seed_rejects_extra_variables() {
        let sig = unary_sig();
        let tes = Tes::new(
            sig.clone(),
            vec![(u1(&sig, "h", Term::var(1)), Term::var(2))],
        );
        let (p, q) = goal_terms(&sig);
        assert_eq!(
            seed_vp(&tes, &p, &q, MatchSides::Both).unwrap_err(),
            NotVariablePreserving
        );
    }

    #[test]
    fn step_reproduces_known_w_sequence() {
        let sig = unary_sig();
        let tes = unary_tes(&sig);
        let (p, q) = goal_terms(&sig);
        let h = |t| u1(&sig, "h", t);
        let d = c(&sig, "$");

        let (w1, _, _) = seed_vp(&tes, &p, &q, MatchSides::LhsOnly).unwrap();
        let sys = SysState::new(&sig, w1.clone(), &p, &q);
        let w2 = step_vp(&tes, &sys, &[&p, &q], MatchSides::LhsOnly);
        let mut expect_w2 = w1.clone();
        expect_w2.insert(u1(&sig, "f", h(d.clone())), h(d.clone()));
        assert_eq!(w2, expect_w2);
    }

    #[test]
    fn step_reproduces_known_p_sequence() {
        let sig = unary_sig();
        let tes = unary_tes(&sig);
        let (p, q) = goal_terms(&sig);
        let h = |t| u1(&sig, "h", t);
        let d = c(&sig, "$");

        let (_, p1, _) = seed_vp(&tes, &p, &q, MatchSides::LhsOnly).unwrap();
        let sys1 = SysState::new(&sig, p1.clone(), &p, &q);
        let p2 = step_vp(&tes, &sys1, &[&p], MatchSides::LhsOnly);
        let mut expect_p2 = p1.clone();
        expect_p2.insert(u1(&sig, "f", h(d.clone())), h(d.clone()));
        assert_eq!(p2, expect_p2);

        let sys2 = SysState::new(&sig, p2.clone(), &p, &q);
        let p3 = step_vp(&tes, &sys2, &[&p], MatchSides::LhsOnly);
        let mut expect_p3 = p2.clone();
        expect_p3.insert(u1(&sig, "e", h(d.clone())), h(d.clone()));
        assert_eq!(p3, expect_p3);

        let sys3 = SysState::new(&sig, p3.clone(), &p, &q);
        let p4 = step_vp(&tes, &sys3, &[&p], MatchSides::LhsOnly);
        assert_eq!(p4, p3);
    }

    #[test]
    fn run_answers_yes_in_two_steps() {
        let sig = unary_sig();
        let tes = unary_tes(&sig);
        let (p, q) = goal_terms(&sig);
        let (verdict, trace) =
            run_vp(&tes, &p, &q, 10, MatchSides::LhsOnly, false).unwrap();
        assert_eq!(verdict, Verdict::Yes(2));
        assert_eq!(trace.steps.len(), 2);
        // both-sides matching may only speed things up
        let (verdict, _) = run_vp(&tes, &p, &q, 10, MatchSides::Both, false).unwrap();
        assert!(matches!(verdict, Verdict::Yes(i) if i <= 2));
        // reduction preserves the verdict
        let (verdict, _) = run_vp(&tes, &p, &q, 10, MatchSides::LhsOnly, true).unwrap();
        assert_eq!(verdict, Verdict::Yes(2));
    }

    #[test]
    fn run_answers_yes_immediately_for_equal_goals() {
        let sig = unary_sig();
        let tes = unary_tes(&sig);
        let (p, _) = goal_terms(&sig);
        let (verdict, trace) =
            run_vp(&tes, &p, &p, 5, MatchSides::Both, false).unwrap();
        assert_eq!(verdict, Verdict::Yes(1));
        assert_eq!(trace.steps.len(), 1);
    }

    #[test]
    fn run_answers_no_on_stabilization() {
        // h(x1) ≈ g(x1) cannot relate $ and h($): sides always have height
        // one more than the substituted term
        let sig = unary_sig();
        let tes = Tes::new(
            sig.clone(),
            vec![(u1(&sig, "h", Term::var(1)), u1(&sig, "g", Term::var(1)))],
        );
        let d = c(&sig, "$");
        let target = u1(&sig, "h", d.clone());
        let (verdict, _) = run_vp(&tes, &d, &target, 20, MatchSides::Both, false).unwrap();
        assert!(matches!(verdict, Verdict::No(_)));
    }

    #[test]
    fn run_exhausts_budget() {
        let sig = unary_sig();
        let tes = unary_tes(&sig);
        let (p, q) = goal_terms(&sig);
        let (verdict, trace) =
            run_vp(&tes, &p, &q, 1, MatchSides::LhsOnly, false).unwrap();
        assert_eq!(verdict, Verdict::Exhausted(1));
        assert_eq!(trace.steps.len(), 1);
    }
}
