//! Extended DIMACS: `p ecnf <n> <m>`, clauses terminated by `0`, `x` prefix
//! for parity clauses and `g <or-lits> x <xor-lits> 0` for generalized ones.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::{Clause, ClauseKind, Formula, Literal};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokens(text: &str) -> impl Iterator<Item = Token<'_>> {
    text.lines().enumerate().flat_map(|(i, line)| {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let trimmed = line.trim_start();
        let comment = trimmed == "c" || trimmed.starts_with("c ") || trimmed.starts_with("c\t");
        let iter = if comment { None } else { Some(words(line)) };
        iter.into_iter().flatten().map(move |(column, text)| Token {
            text,
            line: i + 1,
            column,
        })
    })
}

/// Whitespace-separated words with 1-based columns.
fn words(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let start = rest.find(|c: char| !c.is_whitespace())?;
        let after = &rest[start..];
        let len = after.find(char::is_whitespace).unwrap_or(after.len());
        let word = &after[..len];
        let column = offset + start + 1;
        offset += start + len;
        rest = &after[len..];
        Some((column, word))
    })
}

enum Part {
    Or,
    Xor,
    GenOr,
    GenXor,
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut toks = tokens(text).peekable();
    let header = toks
        .next()
        .ok_or_else(|| Error::syntax(1, 1, "missing `p ecnf` header"))?;
    if header.text != "p" {
        return Err(Error::syntax(
            header.line,
            header.column,
            "expected `p ecnf` header",
        ));
    }
    let mut field = |what: &str| {
        toks.next()
            .filter(|t| t.line == header.line)
            .ok_or_else(|| {
                Error::syntax(header.line, header.column, format!("header lacks {what}"))
            })
    };
    let fmt = field("format")?;
    if fmt.text != "ecnf" && fmt.text != "cnf" {
        return Err(Error::syntax(fmt.line, fmt.column, "format must be `ecnf`"));
    }
    let n_tok = field("variable count")?;
    let m_tok = field("clause count")?;
    let n: usize = number(n_tok)?;
    let m: usize = number(m_tok)?;
    if n == 0 {
        return Err(Error::syntax(
            n_tok.line,
            n_tok.column,
            "variable count must be positive",
        ));
    }

    let mut clauses = Vec::with_capacity(m);
    let mut part = Part::Or;
    let mut or_lits: Vec<Literal> = Vec::new();
    let mut xor_lits: Vec<Literal> = Vec::new();
    let mut seen: HashSet<u32> = HashSet::new();
    let mut start: Option<Token> = None;

    for tok in toks {
        let at_start = start.is_none();
        if at_start {
            start = Some(tok);
        }
        match tok.text {
            "p" => return Err(Error::syntax(tok.line, tok.column, "duplicate header")),
            "x" if at_start => part = Part::Xor,
            "g" if at_start => part = Part::GenOr,
            "x" if matches!(part, Part::GenOr) => {
                if or_lits.is_empty() {
                    return Err(Error::syntax(
                        tok.line,
                        tok.column,
                        "generalized clause has an empty or-part",
                    ));
                }
                part = Part::GenXor;
            }
            "0" => {
                let s = start.take().unwrap_or(tok);
                let kind = match part {
                    Part::Or => ClauseKind::Or,
                    Part::Xor => ClauseKind::Xor,
                    Part::GenXor => ClauseKind::Generalized,
                    Part::GenOr => {
                        return Err(Error::syntax(
                            tok.line,
                            tok.column,
                            "generalized clause lacks `x` separator",
                        ))
                    }
                };
                let ors = std::mem::take(&mut or_lits);
                let xors = std::mem::take(&mut xor_lits);
                if ors.is_empty() && xors.is_empty() {
                    return Err(Error::syntax(s.line, s.column, "empty clause"));
                }
                let clause = match kind {
                    ClauseKind::Or => Clause::or(ors),
                    ClauseKind::Xor => Clause::xor(xors),
                    ClauseKind::Generalized => Clause::generalized(ors, xors),
                }
                .map_err(|e| Error::syntax(s.line, s.column, e.to_string()))?;
                clauses.push(clause);
                part = Part::Or;
                seen.clear();
            }
            text => {
                let value: i64 = text.parse().map_err(|_| {
                    Error::syntax(tok.line, tok.column, format!("unexpected token `{text}`"))
                })?;
                let lit = Literal::from_dimacs(value)
                    .ok_or_else(|| Error::syntax(tok.line, tok.column, "literal out of range"))?;
                if lit.var as usize > n {
                    return Err(Error::VariableOutOfRange {
                        var: u64::from(lit.var),
                        n,
                    });
                }
                if !seen.insert(lit.var) {
                    return Err(Error::RepeatedVariable {
                        line: tok.line,
                        var: lit.var,
                    });
                }
                match part {
                    Part::Or | Part::GenOr => or_lits.push(lit),
                    Part::Xor | Part::GenXor => xor_lits.push(lit),
                }
            }
        }
    }
    if let Some(s) = start {
        return Err(Error::syntax(
            s.line,
            s.column,
            "clause not terminated by 0",
        ));
    }
    if clauses.len() != m {
        return Err(Error::ClauseCountMismatch {
            declared: m,
            found: clauses.len(),
        });
    }
    Formula::new(n, clauses)
}

fn number(tok: Token) -> Result<usize> {
    tok.text.parse().map_err(|_| {
        Error::syntax(
            tok.line,
            tok.column,
            format!("expected a count, found `{}`", tok.text),
        )
    })
}

pub fn render_formula(f: &Formula) -> String {
    let mut out = format!("p ecnf {} {}\n", f.n(), f.clauses().len());
    let lits = |out: &mut String, lits: &[Literal]| {
        for l in lits {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
    };
    for c in f.clauses() {
        match c.kind() {
            ClauseKind::Or => lits(&mut out, c.or_lits()),
            ClauseKind::Xor => {
                out.push_str("x ");
                lits(&mut out, c.xor_lits());
            }
            ClauseKind::Generalized => {
                out.push_str("g ");
                lits(&mut out, c.or_lits());
                out.push_str("x ");
                lits(&mut out, c.xor_lits());
            }
        }
        out.push_str("0\n");
    }
    out
}
