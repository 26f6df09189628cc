//! Semi-decision procedures for the ground word problem of term equation
//! systems: given a finite set of equations between terms with variables and
//! two ground terms, decide whether the ground terms are equivalent in the
//! induced congruence.

pub mod automaton;
pub mod gen;
pub mod gtes;
pub mod oracle;
pub mod problem;
pub mod term;
pub mod trace;
pub mod vp;

/// Outcome of a run, tagged with the step at which it was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes(usize),
    No(usize),
    Exhausted(usize),
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Yes(i) => write!(f, "yes (step {i})"),
            Verdict::No(i) => write!(f, "no (step {i})"),
            Verdict::Exhausted(i) => write!(f, "unknown (step {i})"),
        }
    }
}
