//! Formulas whose clauses are disjunctions, parity constraints, or a mix of
//! the two.

mod dimacs;

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::{DEFAULT_MODEL_CAP, MAX_ARITY};

pub use dimacs::{parse_formula, render_formula};

/// 1-based variable index.
pub type Var = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Literal {
    pub var: Var,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: Var) -> Self {
        Literal {
            var,
            positive: true,
        }
    }

    pub fn neg(var: Var) -> Self {
        Literal {
            var,
            positive: false,
        }
    }

    /// Signed DIMACS form.
    pub fn from_dimacs(lit: i64) -> Option<Self> {
        if lit == 0 || lit.unsigned_abs() > u64::from(Var::MAX) {
            return None;
        }
        Some(Literal {
            var: lit.unsigned_abs() as Var,
            positive: lit > 0,
        })
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            i64::from(self.var)
        } else {
            -i64::from(self.var)
        }
    }

    pub fn negate(self) -> Self {
        Literal {
            positive: !self.positive,
            ..self
        }
    }

    /// Whether the literal is true under a bit value for its variable.
    pub fn holds(self, value: bool) -> bool {
        value == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "x{}", self.var)
        } else {
            write!(f, "¬x{}", self.var)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClauseKind {
    Or,
    Xor,
    Generalized,
}

/// A clause. `Or` clauses use only `or_lits`, `Xor` clauses only `xor_lits`,
/// and `Generalized` clauses `(l1 ∨ … ∨ ls ∨ (ls+1 ⊕ … ⊕ lt))` use both.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Clause {
    kind: ClauseKind,
    or_lits: Vec<Literal>,
    xor_lits: Vec<Literal>,
}

impl Clause {
    pub fn or(lits: Vec<Literal>) -> Result<Self> {
        Self::build(ClauseKind::Or, lits, Vec::new())
    }

    pub fn xor(lits: Vec<Literal>) -> Result<Self> {
        Self::build(ClauseKind::Xor, Vec::new(), lits)
    }

    pub fn generalized(or_lits: Vec<Literal>, xor_lits: Vec<Literal>) -> Result<Self> {
        Self::build(ClauseKind::Generalized, or_lits, xor_lits)
    }

    /// Builds from DIMACS integers; convenient in tests.
    pub fn or_dimacs(lits: &[i64]) -> Result<Self> {
        Self::or(dimacs_lits(lits)?)
    }

    pub fn xor_dimacs(lits: &[i64]) -> Result<Self> {
        Self::xor(dimacs_lits(lits)?)
    }

    fn build(kind: ClauseKind, or_lits: Vec<Literal>, xor_lits: Vec<Literal>) -> Result<Self> {
        match kind {
            ClauseKind::Or if or_lits.is_empty() => {
                return Err(Error::InvalidClause("empty disjunction".into()))
            }
            ClauseKind::Xor if xor_lits.is_empty() => {
                return Err(Error::InvalidClause("empty parity constraint".into()))
            }
            ClauseKind::Generalized if or_lits.is_empty() || xor_lits.is_empty() => {
                return Err(Error::InvalidClause(
                    "generalized clause needs both an or-part and an xor-part".into(),
                ))
            }
            _ => {}
        }
        let mut seen = HashSet::new();
        for lit in or_lits.iter().chain(&xor_lits) {
            if lit.var == 0 {
                return Err(Error::InvalidClause("variable index 0".into()));
            }
            if !seen.insert(lit.var) {
                return Err(Error::InvalidClause(format!(
                    "variable x{} repeated",
                    lit.var
                )));
            }
        }
        Ok(Clause {
            kind,
            or_lits,
            xor_lits,
        })
    }

    pub fn kind(&self) -> ClauseKind {
        self.kind
    }

    pub fn or_lits(&self) -> &[Literal] {
        &self.or_lits
    }

    pub fn xor_lits(&self) -> &[Literal] {
        &self.xor_lits
    }

    /// All literals, or-part first.
    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.or_lits.iter().chain(&self.xor_lits).copied()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.literals().map(|l| l.var)
    }

    pub fn len(&self) -> usize {
        self.or_lits.len() + self.xor_lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_or(&self) -> bool {
        self.kind == ClauseKind::Or
    }

    /// OR clause with at most one positive literal.
    pub fn is_horn(&self) -> bool {
        self.is_or() && self.or_lits.iter().filter(|l| l.positive).count() <= 1
    }

    pub fn is_dual_horn(&self) -> bool {
        self.is_or() && self.or_lits.iter().filter(|l| !l.positive).count() <= 1
    }

    fn renamed(&self, flip: &dyn Fn(Var) -> bool) -> Clause {
        let map = |lits: &[Literal]| {
            lits.iter()
                .map(|&l| if flip(l.var) { l.negate() } else { l })
                .collect()
        };
        Clause {
            kind: self.kind,
            or_lits: map(&self.or_lits),
            xor_lits: map(&self.xor_lits),
        }
    }
}

fn dimacs_lits(lits: &[i64]) -> Result<Vec<Literal>> {
    lits.iter()
        .map(|&l| {
            Literal::from_dimacs(l).ok_or_else(|| Error::InvalidClause(format!("bad literal {l}")))
        })
        .collect()
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |lits: &[Literal], sep: &str| {
            lits.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(sep)
        };
        match self.kind {
            ClauseKind::Or => write!(f, "({})", join(&self.or_lits, " ∨ ")),
            ClauseKind::Xor => write!(f, "({})", join(&self.xor_lits, " ⊕ ")),
            ClauseKind::Generalized => write!(
                f,
                "({} ∨ ({}))",
                join(&self.or_lits, " ∨ "),
                join(&self.xor_lits, " ⊕ ")
            ),
        }
    }
}

/// A conjunction of clauses over variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Formula {
    n: usize,
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn new(n: usize, clauses: Vec<Clause>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidClause(
                "a formula needs at least one variable".into(),
            ));
        }
        for c in &clauses {
            for v in c.vars() {
                if v as usize > n {
                    return Err(Error::VariableOutOfRange {
                        var: u64::from(v),
                        n,
                    });
                }
            }
        }
        Ok(Formula { n, clauses })
    }

    /// Formula with no clauses; its models are the whole cube.
    pub fn tautology(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn into_clauses(self) -> Vec<Clause> {
        self.clauses
    }

    /// Total number of literal occurrences.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    pub fn has_parity_clauses(&self) -> bool {
        self.clauses.iter().any(|c| !c.is_or())
    }

    /// Flips the polarity of every literal over a variable in `vars`.
    pub fn rename(&self, vars: &[Var]) -> Result<Formula> {
        let mut flip = vec![false; self.n + 1];
        for &v in vars {
            if v == 0 || v as usize > self.n {
                return Err(Error::VariableOutOfRange {
                    var: u64::from(v),
                    n: self.n,
                });
            }
            flip[v as usize] = true;
        }
        let test = |v: Var| flip[v as usize];
        Ok(Formula {
            n: self.n,
            clauses: self.clauses.iter().map(|c| c.renamed(&test)).collect(),
        })
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<bool> {
        if a.n() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                found: a.n(),
            });
        }
        Ok(Compiled::new(self)?.eval(a.bits()))
    }

    /// All satisfying assignments, enumerating at most `2^24` candidates.
    pub fn models(&self) -> Result<Domain> {
        self.models_capped(DEFAULT_MODEL_CAP)
    }

    pub fn models_capped(&self, cap: usize) -> Result<Domain> {
        if self.n > cap {
            return Err(Error::CapExceeded {
                what: "model enumeration variables",
                requested: self.n as u128,
                limit: cap as u128,
            });
        }
        let compiled = Compiled::new(self)?;
        let members = (0..1u64 << self.n).filter(|&a| compiled.eval(a));
        Domain::from_bits(self.n, members)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return write!(f, "⊤");
        }
        let parts: Vec<String> = self.clauses.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" ∧ "))
    }
}

/// Clause masks for fast evaluation on packed assignments.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    n: usize,
    clauses: Vec<CompiledClause>,
}

#[derive(Debug, Clone, Copy)]
struct CompiledClause {
    or_pos: u64,
    or_neg: u64,
    xor_pos: u64,
    xor_neg: u64,
    has_or: bool,
    has_xor: bool,
}

impl Compiled {
    pub(crate) fn new(f: &Formula) -> Result<Self> {
        if f.n > MAX_ARITY {
            return Err(Error::CapExceeded {
                what: "evaluation arity",
                requested: f.n as u128,
                limit: MAX_ARITY as u128,
            });
        }
        let bit = |v: Var| 1u64 << (f.n - v as usize);
        let clauses = f
            .clauses
            .iter()
            .map(|c| {
                let mut cc = CompiledClause {
                    or_pos: 0,
                    or_neg: 0,
                    xor_pos: 0,
                    xor_neg: 0,
                    has_or: !c.or_lits.is_empty(),
                    has_xor: !c.xor_lits.is_empty(),
                };
                for l in &c.or_lits {
                    if l.positive {
                        cc.or_pos |= bit(l.var);
                    } else {
                        cc.or_neg |= bit(l.var);
                    }
                }
                for l in &c.xor_lits {
                    if l.positive {
                        cc.xor_pos |= bit(l.var);
                    } else {
                        cc.xor_neg |= bit(l.var);
                    }
                }
                cc
            })
            .collect();
        Ok(Compiled { n: f.n, clauses })
    }

    pub(crate) fn eval(&self, a: u64) -> bool {
        let na = !a;
        self.clauses.iter().all(|c| {
            (c.has_or && (a & c.or_pos) | (na & c.or_neg) != 0)
                || (c.has_xor
                    && ((a & c.xor_pos).count_ones() + (na & c.xor_neg).count_ones()) % 2 == 1)
        })
    }

    #[allow(dead_code)]
    pub(crate) fn n(&self) -> usize {
        self.n
    }
}

/// A point of `{0,1}^n`, n ≤ 64. Coordinate `j` (1-based) is stored at bit
/// `n - j`, so integer order agrees with lexicographic order of bit strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    bits: u64,
    n: usize,
}

impl Assignment {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > MAX_ARITY {
            return Err(Error::CapExceeded {
                what: "assignment arity",
                requested: n as u128,
                limit: MAX_ARITY as u128,
            });
        }
        Ok(Assignment {
            bits: bits & full_mask(n),
            n,
        })
    }

    pub fn from_bools(values: &[bool]) -> Result<Self> {
        let bits = values
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | u64::from(b));
        Self::new(values.len(), bits)
    }

    /// Parses a `0`/`1` string such as `"101"`.
    pub fn from_str_bits(s: &str) -> Option<Self> {
        let values: Option<Vec<bool>> = s
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        Self::from_bools(&values?).ok()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Value of coordinate `j`, 1-based.
    pub fn get(&self, j: usize) -> bool {
        assert!((1..=self.n).contains(&j), "coordinate {j} out of range");
        self.bits >> (self.n - j) & 1 == 1
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (1..=self.n).map(|j| self.get(j)).collect()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", bit_string(self.bits, self.n))
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn bit_string(bits: u64, n: usize) -> String {
    (1..=n)
        .map(|j| if bits >> (n - j) & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi7() -> Formula {
        Formula::new(
            3,
            vec![
                Clause::or_dimacs(&[-1, 2, 3]).unwrap(),
                Clause::or_dimacs(&[1, -2, -3]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn phi7_rejects_100() {
        let a = Assignment::from_str_bits("100").unwrap();
        assert!(!phi7().evaluate(&a).unwrap());
    }

    #[test]
    fn generalized_clause_semantics() {
        let c = Clause::generalized(
            vec![Literal::neg(1)],
            vec![Literal::pos(2), Literal::pos(3)],
        )
        .unwrap();
        let f = Formula::new(3, vec![c]).unwrap();
        let eval = |s| f.evaluate(&Assignment::from_str_bits(s).unwrap()).unwrap();
        assert!(!eval("111"));
        assert!(eval("110"));
        assert!(eval("011"));
        assert!(!eval("100"));
    }

    #[test]
    fn xor_true_on_all_ones() {
        let f = Formula::new(3, vec![Clause::xor_dimacs(&[1, 2, 3]).unwrap()]).unwrap();
        assert!(f
            .evaluate(&Assignment::from_str_bits("111").unwrap())
            .unwrap());
        assert!(!f
            .evaluate(&Assignment::from_str_bits("110").unwrap())
            .unwrap());
    }

    #[test]
    fn arity_mismatch() {
        let a = Assignment::from_str_bits("10").unwrap();
        assert!(matches!(
            phi7().evaluate(&a),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn tautology_models_full_cube() {
        let d = Formula::tautology(1).unwrap().models().unwrap();
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn rejects_bad_clauses() {
        assert!(Clause::or(vec![]).is_err());
        assert!(Clause::or_dimacs(&[1, -1]).is_err());
        assert!(Clause::generalized(vec![Literal::pos(1)], vec![]).is_err());
        assert!(Formula::new(2, vec![Clause::or_dimacs(&[3]).unwrap()]).is_err());
    }

    #[test]
    fn rename_is_involution() {
        let f = phi7();
        let g = f.rename(&[1, 3]).unwrap();
        assert_ne!(f, g);
        assert_eq!(g.rename(&[1, 3]).unwrap(), f);
        assert!(f.rename(&[4]).is_err());
    }

    #[test]
    fn model_cap() {
        let f = Formula::tautology(30).unwrap();
        assert!(f.models().unwrap_err().is_cap());
    }
}
