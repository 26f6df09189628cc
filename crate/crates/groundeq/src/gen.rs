//! The semi-decision procedure for arbitrary equation systems, where an
//! equation may have variables on one side only. Unmatched extra variables
//! are instantiated from the constants when seeding and from representative
//! ground terms (expansions of bounded-height normal forms) when stepping.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::automaton::{build_ccta, CctaResult, TreeAutomaton};
use crate::gtes::{gtes_equiv, reduce_gtes, Gtes, Tes, TesEquation};
use crate::term::{tuples, Assignment, Signature, StateId, Term, TermNode};
use crate::Verdict;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("instantiation budget of {budget} candidates exceeded")]
pub struct BudgetExceeded {
    pub budget: usize,
}

pub struct BudgetCounter {
    spent: u128,
    budget: usize,
}

impl BudgetCounter {
    pub fn new(budget: usize) -> Self {
        BudgetCounter { spent: 0, budget }
    }

    pub fn charge(&mut self, amount: u128) -> Result<(), BudgetExceeded> {
        self.spent = self.spent.saturating_add(amount);
        if self.spent > self.budget as u128 {
            Err(BudgetExceeded {
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }
}

fn is_constant(t: &Term) -> bool {
    matches!(t.node(), TermNode::App(_, children) if children.is_empty())
}

/// Seed instances for one equation and one target: the left side matched
/// anywhere in the target with right extras drawn from the constants, and the
/// right side matched with constant bindings for its extras and left extras
/// drawn from the constants.
fn seed_equation(eq: &TesEquation, target: &Term, constants: &[Term], out: &mut Gtes) {
    let k = eq.shared;
    for (_, sigma) in crate::term::match_instances(&eq.lhs, target) {
        let l = eq.lhs.substitute(&sigma).expect("match binds lhs vars");
        for extras in tuples(constants, eq.right_extra) {
            let mut assignment: Assignment = (1..=k)
                .map(|i| (i as u32, sigma.get(i as u32).cloned().expect("shared")))
                .collect();
            for (j, v) in extras.iter().enumerate() {
                assignment.bind((k + j + 1) as u32, v.clone());
            }
            let r = eq.rhs.substitute(&assignment).expect("covered");
            if l != r {
                out.insert(l.clone(), r);
            }
        }
    }
    for (_, sigma) in crate::term::match_instances(&eq.rhs, target) {
        let extras_constant = (1..=eq.right_extra)
            .all(|j| sigma.get((k + j) as u32).is_some_and(is_constant));
        if !extras_constant {
            continue;
        }
        let r = eq.rhs.substitute(&sigma).expect("match binds rhs vars");
        for extras in tuples(constants, eq.left_extra) {
            let mut assignment: Assignment = (1..=k)
                .map(|i| (i as u32, sigma.get(i as u32).cloned().expect("shared")))
                .collect();
            for (j, v) in extras.iter().enumerate() {
                assignment.bind((k + j + 1) as u32, v.clone());
            }
            let l = eq.lhs.substitute(&assignment).expect("covered");
            if l != r {
                out.insert(l, r.clone());
            }
        }
    }
}

fn seed_system(tes: &Tes, targets: &[&Term]) -> Gtes {
    let constants: Vec<Term> = tes
        .signature
        .constants()
        .into_iter()
        .map(Term::constant)
        .collect();
    let mut out = Gtes::new();
    for eq in &tes.equations {
        for target in targets {
            seed_equation(eq, target, &constants, &mut out);
        }
    }
    out
}

/// The first systems `(W_1, P_1, Q_1)` for goal terms `p` and `q`.
pub fn seed_gen(tes: &Tes, p: &Term, q: &Term) -> (Gtes, Gtes, Gtes) {
    (
        seed_system(tes, &[p, q]),
        seed_system(tes, &[p]),
        seed_system(tes, &[q]),
    )
}

/// A ground equation system with its congruence-class automaton, witness
/// trees, the normal forms of all terms of height at most `depth`, and their
/// ground expansions.
pub struct GenSys {
    pub gtes: Gtes,
    pub ccta: CctaResult,
    pub witnesses: BTreeMap<StateId, Term>,
    /// `layers[j]` holds the automaton normal forms of all ground terms of
    /// height at most `j`, as terms over `Σ ∪ A`.
    pub norm_layers: Vec<BTreeSet<Term>>,
    /// Ground expansions of the top normal-form layer, sorted.
    pub rep: Vec<Term>,
    pub totally_defined: bool,
}

impl GenSys {
    pub fn new(
        signature: &Arc<Signature>,
        gtes: Gtes,
        p: &Term,
        q: &Term,
        depth: usize,
        counter: &mut BudgetCounter,
    ) -> Result<GenSys, BudgetExceeded> {
        let ccta = build_ccta(signature, &gtes, &[p.clone(), q.clone()]);
        let witnesses = ccta
            .automaton
            .trees_of_states()
            .expect("congruence-class automaton is connected");
        let norm_layers = norm_sets(&ccta.automaton, depth, counter)?;
        let rep: BTreeSet<Term> = norm_layers
            .last()
            .expect("at least the constant layer")
            .iter()
            .map(|w| w.expand_states(&witnesses))
            .collect();
        let totally_defined = ccta.automaton.is_totally_defined();
        Ok(GenSys {
            gtes,
            ccta,
            witnesses,
            norm_layers,
            rep: rep.into_iter().collect(),
            totally_defined,
        })
    }

    pub fn automaton(&self) -> &TreeAutomaton {
        &self.ccta.automaton
    }

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

/// Normal-form layers: `layers[0]` from the constants, `layers[j]` closing
/// `layers[j-1]` under one application of every non-constant symbol.
fn norm_sets(
    automaton: &TreeAutomaton,
    depth: usize,
    counter: &mut BudgetCounter,
) -> Result<Vec<BTreeSet<Term>>, BudgetExceeded> {
    let signature = &automaton.signature;
    let mut layers: Vec<BTreeSet<Term>> = Vec::with_capacity(depth + 1);
    let base: BTreeSet<Term> = signature
        .constants()
        .into_iter()
        .map(|c| automaton.nf_mixed(&Term::constant(c)))
        .collect();
    counter.charge(base.len() as u128)?;
    layers.push(base);
    for _ in 0..depth {
        let prev = layers.last().unwrap();
        let elems: Vec<Term> = prev.iter().cloned().collect();
        let mut next = prev.clone();
        for (id, sym) in signature.symbols() {
            if sym.rank == 0 {
                continue;
            }
            counter.charge((elems.len() as u128).pow(sym.rank as u32))?;
            for args in tuples(&elems, sym.rank) {
                next.insert(automaton.nf_mixed(&Term::app(id, args)));
            }
        }
        layers.push(next);
    }
    Ok(layers)
}

/// One expansion step: each side of each equation is instantiated with all
/// state tuples; instances normalizing to a state that reaches a target class
/// contribute ground equations whose unmatched extra variables range over the
/// representative terms.
pub fn step_gen(
    tes: &Tes,
    cur: &GenSys,
    reach_targets: &[&Term],
    counter: &mut BudgetCounter,
) -> Result<Gtes, BudgetExceeded> {
    let automaton = cur.automaton();
    let allowed = cur.reach_filter(reach_targets);
    let states: Vec<StateId> = automaton.state_ids().collect();
    let mut next = cur.gtes.clone();

    // (matched side, other side, matched-side var count, other-side extras)
    let mut expand = |matched: &Term,
                      other: &Term,
                      matched_vars: usize,
                      other_extras: usize,
                      shared: usize,
                      left_is_matched: bool|
     -> Result<(), BudgetExceeded> {
        counter.charge((states.len() as u128).pow(matched_vars as u32))?;
        for args in tuples(&states, matched_vars) {
            let state_assignment: Assignment = args
                .iter()
                .enumerate()
                .map(|(i, a)| ((i + 1) as u32, Term::state(*a)))
                .collect();
            let instance = matched.substitute(&state_assignment).expect("covered");
            let fires = match automaton.nf_mixed(&instance).as_state() {
                Some(a) => allowed.contains(&a),
                None => false,
            };
            if !fires {
                continue;
            }
            let witness_assignment: Assignment = args
                .iter()
                .enumerate()
                .map(|(i, a)| ((i + 1) as u32, cur.witnesses[a].clone()))
                .collect();
            let matched_inst = matched.substitute(&witness_assignment).expect("covered");
            counter.charge((cur.rep.len() as u128).pow(other_extras as u32))?;
            for extras in tuples(&cur.rep, other_extras) {
                let mut other_assignment: Assignment = (1..=shared)
                    .map(|i| (i as u32, cur.witnesses[&args[i - 1]].clone()))
                    .collect();
                for (j, v) in extras.iter().enumerate() {
                    other_assignment.bind((shared + j + 1) as u32, v.clone());
                }
                let other_inst = other.substitute(&other_assignment).expect("covered");
                if automaton.nf_mixed(&matched_inst) != automaton.nf_mixed(&other_inst) {
                    let (l, r) = if left_is_matched {
                        (matched_inst.clone(), other_inst)
                    } else {
                        (other_inst, matched_inst.clone())
                    };
                    next.insert(l, r);
                }
            }
        }
        Ok(())
    };

    for eq in &tes.equations {
        expand(
            &eq.lhs,
            &eq.rhs,
            eq.shared + eq.left_extra,
            eq.right_extra,
            eq.shared,
            true,
        )?;
        expand(
            &eq.rhs,
            &eq.lhs,
            eq.shared + eq.right_extra,
            eq.left_extra,
            eq.shared,
            false,
        )?;
    }
    Ok(next)
}

pub struct GenStepRecord {
    pub index: usize,
    pub w: Gtes,
    pub p_sys: Gtes,
    pub q_sys: Gtes,
    pub added_w: Vec<(Term, Term)>,
    pub added_p: Vec<(Term, Term)>,
    pub added_q: Vec<(Term, Term)>,
    pub w_automaton: TreeAutomaton,
    pub w_norm_layers: Vec<BTreeSet<Term>>,
    pub w_norm_sizes: Vec<usize>,
    pub w_rep: Vec<Term>,
    pub w_totally_defined: bool,
}

pub struct GenTrace {
    pub steps: Vec<GenStepRecord>,
    pub verdict: Verdict,
}

fn diff(next: &Gtes, prev: &Gtes) -> Vec<(Term, Term)> {
    next.iter()
        .filter(|pair| !prev.contains(&pair.0, &pair.1))
        .cloned()
        .collect()
}

/// Runs the general procedure for at most `max_steps` steps with a per-run
/// instantiation budget. A negative answer additionally requires the
/// stabilized system's automaton to be totally defined; otherwise unseen
/// ground terms could still connect the goal terms.
pub fn run_gen(
    tes: &Tes,
    p: &Term,
    q: &Term,
    max_steps: usize,
    reduce: bool,
    budget: usize,
) -> (Verdict, GenTrace) {
    assert!(max_steps >= 1);
    let sig = &tes.signature;
    let mut counter = BudgetCounter::new(budget);
    let canon = |g: Gtes| {
        if reduce {
            reduce_gtes(sig, &g).to_gtes()
        } else {
            g
        }
    };

    let (w1, p1, q1) = seed_gen(tes, p, q);
    let mut steps: Vec<GenStepRecord> = Vec::new();
    let exhaust = |steps: Vec<GenStepRecord>, i: usize| {
        let verdict = Verdict::Exhausted(i);
        (verdict, GenTrace { steps, verdict })
    };

    let sys = |gtes: Gtes, depth: usize, counter: &mut BudgetCounter| {
        GenSys::new(sig, gtes, p, q, depth, counter)
    };

    let (mut w, mut ps, mut qs) = match (
        sys(canon(w1), 1, &mut counter),
        sys(canon(p1), 1, &mut counter),
        sys(canon(q1), 1, &mut counter),
    ) {
        (Ok(w), Ok(ps), Ok(qs)) => (w, ps, qs),
        _ => return exhaust(steps, 1),
    };

    let empty = Gtes::new();
    let record = |sys_w: &GenSys, sys_p: &GenSys, sys_q: &GenSys, index: usize, prev: (&Gtes, &Gtes, &Gtes)| {
        GenStepRecord {
            index,
            w: sys_w.gtes.clone(),
            p_sys: sys_p.gtes.clone(),
            q_sys: sys_q.gtes.clone(),
            added_w: diff(&sys_w.gtes, prev.0),
            added_p: diff(&sys_p.gtes, prev.1),
            added_q: diff(&sys_q.gtes, prev.2),
            w_automaton: sys_w.automaton().clone(),
            w_norm_layers: sys_w.norm_layers.clone(),
            w_norm_sizes: sys_w.norm_layers.iter().map(BTreeSet::len).collect(),
            w_rep: sys_w.rep.clone(),
            w_totally_defined: sys_w.totally_defined,
        }
    };
    steps.push(record(&w, &ps, &qs, 1, (&empty, &empty, &empty)));

    let equivalent = |sys_w: &GenSys| {
        let same = sys_w.ccta.class(p) == sys_w.ccta.class(q);
        debug_assert_eq!(same, gtes_equiv(sig, &sys_w.gtes, p, q));
        same
    };

    if equivalent(&w) {
        let verdict = Verdict::Yes(1);
        return (verdict, GenTrace { steps, verdict });
    }

    for i in 2..=max_steps {
        let stepped = (
            step_gen(tes, &w, &[p, q], &mut counter),
            step_gen(tes, &ps, &[p], &mut counter),
            step_gen(tes, &qs, &[q], &mut counter),
        );
        let (w_next, p_next, q_next) = match stepped {
            (Ok(a), Ok(b), Ok(c)) => (canon(a), canon(b), canon(c)),
            _ => return exhaust(steps, i),
        };

        let stabilized = (w_next == w.gtes && w.totally_defined)
            || (p_next == ps.gtes && ps.totally_defined)
            || (q_next == qs.gtes && qs.totally_defined);
        let prev = (w.gtes.clone(), ps.gtes.clone(), qs.gtes.clone());

        let (w_new, ps_new, qs_new) = match (
            sys(w_next, i, &mut counter),
            sys(p_next, i, &mut counter),
            sys(q_next, i, &mut counter),
        ) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            _ => return exhaust(steps, i),
        };

        steps.push(record(&w_new, &ps_new, &qs_new, i, (&prev.0, &prev.1, &prev.2)));

        if equivalent(&w_new) {
            let verdict = Verdict::Yes(i);
            return (verdict, GenTrace { steps, verdict });
        }
        if stabilized {
            let verdict = Verdict::No(i);
            return (verdict, GenTrace { steps, verdict });
        }

        w = w_new;
        ps = ps_new;
        qs = qs_new;
    }

    let verdict = Verdict::Exhausted(max_steps);
    (verdict, GenTrace { steps, verdict })
}
