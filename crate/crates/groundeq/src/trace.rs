//! Deterministic text rendering of run traces. One block per step: added
//! equations per system (sorted), the automaton of the W system (states with
//! their class representatives, rules in rule order), and for the general
//! procedure the normal-form layer sizes and representative terms.

use std::fmt::Write;

use crate::automaton::TreeAutomaton;
use crate::gen::GenTrace;
use crate::term::{Signature, Term};
use crate::vp::RunTrace;
use crate::Verdict;

fn push_equations(out: &mut String, sig: &Signature, label: &str, eqs: &[(Term, Term)]) {
    writeln!(out, "{label} additions: {}", eqs.len()).unwrap();
    for (l, r) in eqs {
        writeln!(out, "  {} ~ {}", l.display(sig), r.display(sig)).unwrap();
    }
}

fn push_automaton(out: &mut String, sig: &Signature, automaton: &TreeAutomaton) {
    writeln!(out, "W automaton: {} state(s)", automaton.state_count()).unwrap();
    for id in automaton.state_ids() {
        writeln!(
            out,
            "  [{}] = class of {}",
            id.0,
            automaton.representative(id).display(sig)
        )
        .unwrap();
    }
    writeln!(out, "rules:").unwrap();
    for rule in automaton.rules() {
        let args = rule
            .args
            .iter()
            .map(|a| format!("[{}]", a.0))
            .collect::<Vec<_>>();
        if args.is_empty() {
            writeln!(out, "  {} -> [{}]", sig.name(rule.symbol), rule.target.0).unwrap();
        } else {
            writeln!(
                out,
                "  {}({}) -> [{}]",
                sig.name(rule.symbol),
                args.join(","),
                rule.target.0
            )
            .unwrap();
        }
    }
}

fn push_verdict(out: &mut String, verdict: Verdict, step: usize) {
    let word = match verdict {
        Verdict::Yes(i) if i == step => "yes",
        Verdict::No(i) if i == step => "no",
        Verdict::Exhausted(i) if i == step => "unknown",
        _ => "continue",
    };
    writeln!(out, "verdict: {word}").unwrap();
}

pub fn render_vp_trace(sig: &Signature, trace: &RunTrace) -> String {
    let mut out = String::new();
    for step in &trace.steps {
        writeln!(out, "== step {}", step.index).unwrap();
        push_equations(&mut out, sig, "W", &step.added_w);
        push_equations(&mut out, sig, "P", &step.added_p);
        push_equations(&mut out, sig, "Q", &step.added_q);
        push_automaton(&mut out, sig, &step.w_automaton);
        push_verdict(&mut out, trace.verdict, step.index);
    }
    out
}

pub fn render_gen_trace(sig: &Signature, trace: &GenTrace) -> String {
    let mut out = String::new();
    for step in &trace.steps {
        writeln!(out, "== step {}", step.index).unwrap();
        push_equations(&mut out, sig, "W", &step.added_w);
        push_equations(&mut out, sig, "P", &step.added_p);
        push_equations(&mut out, sig, "Q", &step.added_q);
        push_automaton(&mut out, sig, &step.w_automaton);
        writeln!(
            out,
            "totally defined: {}",
            if step.w_totally_defined { "yes" } else { "no" }
        )
        .unwrap();
        let sizes = step
            .w_norm_sizes
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>();
        writeln!(out, "NORM layer sizes: [{}]", sizes.join(", ")).unwrap();
        let reps = step
            .w_rep
            .iter()
            .map(|t| t.display(sig).to_string())
            .collect::<Vec<_>>();
        writeln!(out, "REP: {{{}}}", reps.join(", ")).unwrap();
        push_verdict(&mut out, trace.verdict, step.index);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::run_gen;
    use crate::gtes::Tes;
    use crate::problem::parse_problem;
    use crate::vp::{run_vp, MatchSides};

    const UNARY: &str = "\
sig $/0 h/1 g/1 f/1 e/1
eq e(h(x1)) = h(x1)
eq f(h(x1)) = h(x1)
eq g(h(x1)) = h(x1)
eq f(f(x1)) = g(g(x1))
pair e(f(g(h($)))) e(h($))
";

    const XOR: &str = "\
sig 0/0 1/0 f/2
eq f(x1,x1) = 0
eq f(0,x1) = x1
eq f(x1,0) = x1
pair 0 f(0,1)
";

    fn run(text: &str) -> (Tes, Term, Term) {
        let problem = parse_problem(text).unwrap();
        (problem.tes, problem.p, problem.q)
    }

    #[test]
    fn vp_trace_lists_seed_and_verdict() {
        let (tes, p, q) = run(UNARY);
        let (_, trace) = run_vp(&tes, &p, &q, 10, MatchSides::LhsOnly, false).unwrap();
        let text = render_vp_trace(&tes.signature, &trace);
        assert!(text.contains("== step 1"));
        assert!(text.contains("== step 2"));
        assert!(text.contains("g(h($)) ~ h($)"));
        assert!(text.contains("f(h($)) ~ h($)"));
        assert!(text.contains("verdict: continue"));
        assert!(text.contains("verdict: yes"));
        assert!(text.contains("W automaton:"));
    }

    #[test]
    fn gen_trace_lists_norm_and_rep() {
        let (tes, p, q) = run(XOR);
        let (_, trace) = run_gen(&tes, &p, &q, 10, false, 1_000_000);
        let text = render_gen_trace(&tes.signature, &trace);
        assert!(text.contains("NORM layer sizes: [2, 2]"));
        assert!(text.contains("REP: {0, 1}"));
        assert!(text.contains("totally defined: yes"));
        assert!(text.contains("verdict: no"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let (tes, p, q) = run(UNARY);
        let (_, t1) = run_vp(&tes, &p, &q, 10, MatchSides::Both, false).unwrap();
        let (_, t2) = run_vp(&tes, &p, &q, 10, MatchSides::Both, false).unwrap();
        assert_eq!(
            render_vp_trace(&tes.signature, &t1),
            render_vp_trace(&tes.signature, &t2)
        );
    }
}
