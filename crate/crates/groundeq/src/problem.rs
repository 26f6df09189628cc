//! Line-oriented problem files:
//!
//! ```text
//! # comment
//! sig $/0 h/1 g/1 f/1 e/1
//! eq e(h(x1)) = h(x1)
//! pair e(f(g(h($)))) e(h($))
//! ```
//!
//! `sig` declares symbols smallest-first; `eq` lines may be absent; exactly
//! one `pair` line with two ground terms is required.

use std::sync::Arc;

use crate::gtes::Tes;
use crate::term::{Signature, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemFile {
    pub signature: Arc<Signature>,
    pub tes: Tes,
    pub p: Term,
    pub q: Term,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("line {line}, col {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        message: message.into(),
    })
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let mut signature: Option<Arc<Signature>> = None;
    let mut equations: Vec<(Term, Term)> = Vec::new();
    let mut pair: Option<(Term, Term)> = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        let col_offset = raw.len() - raw.trim_start().len() + keyword.len() + 1;
        match keyword {
            "sig" => {
                if signature.is_some() {
                    return err(line_no, 1, "duplicate sig line");
                }
                let mut symbols = Vec::new();
                for decl in rest.split_whitespace() {
                    let Some((name, rank)) = decl.rsplit_once('/') else {
                        return err(line_no, col_offset, format!("expected NAME/RANK, got `{decl}`"));
                    };
                    let Ok(rank) = rank.parse::<usize>() else {
                        return err(line_no, col_offset, format!("bad rank in `{decl}`"));
                    };
                    if name.is_empty() || !name.chars().all(is_ident_char) || is_variable(name) {
                        return err(line_no, col_offset, format!("bad symbol name `{name}`"));
                    }
                    symbols.push((name.to_string(), rank));
                }
                match Signature::new(symbols) {
                    Ok(sig) => signature = Some(Arc::new(sig)),
                    Err(e) => return err(line_no, 1, e.to_string()),
                }
            }
            "eq" => {
                let Some(sig) = &signature else {
                    return err(line_no, 1, "eq before sig");
                };
                let Some((lhs_text, rhs_text)) = rest.split_once('=') else {
                    return err(line_no, col_offset, "expected `eq TERM = TERM`");
                };
                let lhs = parse_term(sig, lhs_text, line_no, col_offset)?;
                let rhs =
                    parse_term(sig, rhs_text, line_no, col_offset + lhs_text.len() + 1)?;
                equations.push((lhs, rhs));
            }
            "pair" => {
                let Some(sig) = &signature else {
                    return err(line_no, 1, "pair before sig");
                };
                if pair.is_some() {
                    return err(line_no, 1, "duplicate pair line");
                }
                let mut parser = TermParser::new(sig, rest, line_no, col_offset);
                let p = parser.term()?;
                parser.skip_spaces();
                let q = parser.term()?;
                parser.skip_spaces();
                if !parser.at_end() {
                    return err(line_no, parser.col(), "trailing input after pair terms");
                }
                for t in [&p, &q] {
                    if !t.is_ground() {
                        return err(line_no, col_offset, "pair terms must be ground");
                    }
                }
                pair = Some((p, q));
            }
            other => {
                return err(line_no, 1, format!("unknown directive `{other}`"));
            }
        }
    }

    let Some(signature) = signature else {
        return err(text.lines().count() + 1, 1, "missing sig line");
    };
    let Some((p, q)) = pair else {
        return err(text.lines().count() + 1, 1, "missing pair line");
    };
    let tes = Tes::new(signature.clone(), equations);
    Ok(ProblemFile {
        signature,
        tes,
        p,
        q,
    })
}

fn is_ident_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | ',' | '=' | '/' | '#')
}

fn is_variable(name: &str) -> bool {
    name.len() >= 2
        && name.starts_with('x')
        && name[1..].chars().all(|c| c.is_ascii_digit())
        && !name[1..].starts_with('0')
}

fn parse_term(
    signature: &Signature,
    text: &str,
    line: usize,
    col_offset: usize,
) -> Result<Term, ParseError> {
    let mut parser = TermParser::new(signature, text, line, col_offset);
    parser.skip_spaces();
    let t = parser.term()?;
    parser.skip_spaces();
    if !parser.at_end() {
        return err(line, parser.col(), "trailing input after term");
    }
    Ok(t)
}

struct TermParser<'a> {
    signature: &'a Signature,
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col_offset: usize,
}

impl<'a> TermParser<'a> {
    fn new(signature: &'a Signature, text: &'a str, line: usize, col_offset: usize) -> Self {
        TermParser {
            signature,
            chars: text.chars().collect(),
            pos: 0,
            line,
            col_offset,
        }
    }

    fn col(&self) -> usize {
        self.col_offset + self.pos + 1
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_spaces(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(is_ident_char) {
            self.pos += 1;
        }
        if self.pos == start {
            return err(self.line, self.col(), "expected a symbol or variable");
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        self.skip_spaces();
        let start_col = self.col();
        let name = self.ident()?;
        if is_variable(&name) {
            let index: u32 = name[1..].parse().map_err(|_| ParseError {
                line: self.line,
                col: start_col,
                message: format!("bad variable `{name}`"),
            })?;
            return Ok(Term::var(index));
        }
        let Some(symbol) = self.signature.lookup(&name) else {
            return err(self.line, start_col, format!("unknown symbol `{name}`"));
        };
        let rank = self.signature.rank(symbol);
        let mut children = Vec::new();
        if self.peek() == Some('(') {
            self.pos += 1;
            loop {
                children.push(self.term()?);
                self.skip_spaces();
                match self.peek() {
                    Some(',') => {
                        self.pos += 1;
                    }
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return err(self.line, self.col(), "expected `,` or `)`"),
                }
            }
        }
        if children.len() != rank {
            return err(
                self.line,
                start_col,
                format!(
                    "symbol `{name}` has rank {rank} but {} argument(s) given",
                    children.len()
                ),
            );
        }
        Ok(Term::app(symbol, children))
    }
}

/// Renders a problem in the input grammar; `parse_problem` of the result
/// reconstructs an identical structure.
pub fn print_problem(problem: &ProblemFile) -> String {
    let sig = &problem.signature;
    let mut out = String::from("sig");
    for (_, sym) in sig.symbols() {
        out.push_str(&format!(" {}/{}", sym.name, sym.rank));
    }
    out.push('\n');
    for eq in &problem.tes.equations {
        out.push_str(&format!(
            "eq {} = {}\n",
            eq.lhs.display(sig),
            eq.rhs.display(sig)
        ));
    }
    out.push_str(&format!(
        "pair {} {}\n",
        problem.p.display(sig),
        problem.q.display(sig)
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNARY: &str = "\
# equivalence of e(f(g(h($)))) and e(h($))
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

    #[test]
    fn parses_unary_example() {
        let problem = parse_problem(UNARY).unwrap();
        assert_eq!(problem.signature.len(), 5);
        assert_eq!(problem.tes.equations.len(), 4);
        assert!(problem.tes.is_variable_preserving());
        let sig = &problem.signature;
        assert_eq!(format!("{}", problem.p.display(sig)), "e(f(g(h($))))");
        assert_eq!(format!("{}", problem.q.display(sig)), "e(h($))");
    }

    #[test]
    fn parses_xor_example() {
        let problem = parse_problem(XOR).unwrap();
        assert_eq!(problem.tes.equations.len(), 3);
        assert!(!problem.tes.is_variable_preserving());
        let eq = &problem.tes.equations[0];
        assert_eq!(eq.shared, 0);
        assert_eq!(eq.left_extra, 1);
    }

    #[test]
    fn empty_equation_block_is_valid() {
        let problem = parse_problem("sig a/0\npair a a\n").unwrap();
        assert!(problem.tes.equations.is_empty());
    }

    #[test]
    fn arity_mismatch_is_reported_with_position() {
        let e = parse_problem("sig $/0 f/2\npair f($) $\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("rank 2"));
    }

    #[test]
    fn unknown_symbol_and_syntax_errors() {
        let e = parse_problem("sig $/0\npair z $\n").unwrap_err();
        assert!(e.message.contains("unknown symbol `z`"));

        let e = parse_problem("sig $/0\neq $ $\npair $ $\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("TERM = TERM"));

        let e = parse_problem("sig f/1\npair f f\n").unwrap_err();
        assert!(e.message.contains("no symbol of rank 0"));

        let e = parse_problem("sig $/0\npair x1 $\n").unwrap_err();
        assert!(e.message.contains("ground"));

        let e = parse_problem("sig $/0\n").unwrap_err();
        assert!(e.message.contains("missing pair"));
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [UNARY, XOR] {
            let problem = parse_problem(text).unwrap();
            let printed = print_problem(&problem);
            let reparsed = parse_problem(&printed).unwrap();
            assert_eq!(problem, reparsed);
            // printing is idempotent
            assert_eq!(printed, print_problem(&reparsed));
        }
    }
}
