//! Constraints synthesized from explicit domains.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{Domain, Policy};
use crate::error::{Error, Result};
use crate::formula::{full_mask, Clause, ClauseKind, Formula, Literal, Var};
use crate::recognize::{
    check_lpic, check_pic, check_renamable_partially_horn, check_separable, check_syntactic_class,
    LpicWitness, RphWitness, SeparabilityWitness,
};
use crate::DEFAULT_MODEL_CAP;

/// A CNF whose clauses are all prime implicates of its model set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeFormula {
    pub formula: Formula,
    pub prime_certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthesisClass {
    Separable,
    RenamablePartiallyHorn,
    Affine,
    Lpic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SynthesisWitness {
    Separable(SeparabilityWitness),
    RenamablePartiallyHorn(RphWitness),
    Affine,
    Lpic(LpicWitness),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SynthesisResult {
    pub formula: Formula,
    pub class: SynthesisClass,
    pub witness: SynthesisWitness,
    /// Coordinates fixed by the domain, pinned with unit clauses (permissive
    /// policy only).
    pub fixed_coordinates: Vec<(usize, bool)>,
}

/// Clause as a literal mask `lits` and a sign mask `neg ⊆ lits` (bit set =
/// negative literal), in the packed coordinate layout. It is falsified by
/// exactly the points `p` with `p & lits == neg`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct PackedClause {
    lits: u64,
    neg: u64,
}

impl PackedClause {
    fn falsified_by(self, p: u64) -> bool {
        p & self.lits == self.neg
    }

    fn to_clause(self, n: usize) -> Clause {
        let lits = (1..=n)
            .filter(|&j| self.lits >> (n - j) & 1 == 1)
            .map(|j| {
                let v = j as Var;
                if self.neg >> (n - j) & 1 == 1 {
                    Literal::neg(v)
                } else {
                    Literal::pos(v)
                }
            })
            .collect();
        Clause::or(lits).expect("shrunk clauses are non-empty")
    }
}

/// Shrinks the maxterm of non-member `a`, trying coordinates in ascending
/// order. One pass suffices: a deletion that failed against a larger clause
/// also fails against any of its sub-clauses.
fn shrink(a: u64, members: &[u64], n: usize) -> PackedClause {
    let diffs: Vec<u64> = members.iter().map(|&m| m ^ a).collect();
    let mut lits = full_mask(n);
    for j in 1..=n {
        let b = 1u64 << (n - j);
        let trial = lits & !b;
        if diffs.iter().all(|&d| d & trial != 0) {
            lits = trial;
        }
    }
    PackedClause {
        lits,
        neg: a & lits,
    }
}

pub fn prime_cnf(d: &Domain) -> Result<PrimeFormula> {
    prime_cnf_capped(d, DEFAULT_MODEL_CAP)
}

pub fn prime_cnf_capped(d: &Domain, cap: usize) -> Result<PrimeFormula> {
    let n = d.n();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "prime CNF variables",
            requested: n as u128,
            limit: cap as u128,
        });
    }
    let members = d.members();
    let non_members: Vec<u64> = (0..1u64 << n).filter(|&p| !d.contains_bits(p)).collect();
    let shrunk: Vec<PackedClause> = non_members
        .par_iter()
        .map(|&a| shrink(a, members, n))
        .collect();
    let mut seen = HashSet::new();
    let mut clauses: Vec<PackedClause> = shrunk.into_iter().filter(|c| seen.insert(*c)).collect();

    // Greedy pruning, longest clauses first: drop a clause when every
    // non-member it excludes is excluded by another kept clause.
    let mut cover = vec![0u32; 1usize << n];
    let full = full_mask(n);
    let for_each_falsifier = |c: PackedClause, f: &mut dyn FnMut(usize) -> bool| {
        let free = full & !c.lits;
        let mut t = free;
        loop {
            if !f((c.neg | t) as usize) {
                return false;
            }
            if t == 0 {
                return true;
            }
            t = (t - 1) & free;
        }
    };
    for &c in &clauses {
        for_each_falsifier(c, &mut |p| {
            cover[p] += 1;
            true
        });
    }
    let mut order: Vec<usize> = (0..clauses.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(clauses[i].lits.count_ones()));
    let mut keep = vec![true; clauses.len()];
    for i in order {
        let c = clauses[i];
        if for_each_falsifier(c, &mut |p| cover[p] >= 2) {
            keep[i] = false;
            for_each_falsifier(c, &mut |p| {
                cover[p] -= 1;
                true
            });
        }
    }
    let mut k = keep.iter();
    clauses.retain(|_| *k.next().expect("same length"));

    let formula = Formula::new(n, clauses.iter().map(|c| c.to_clause(n)).collect())?;
    if formula.models_capped(cap)? != *d {
        return Err(Error::Internal(
            "prime CNF does not reproduce the domain".into(),
        ));
    }
    if let Some(c) = clauses.iter().find(|&&c| !is_prime_packed(c, members, n)) {
        return Err(Error::Internal(format!(
            "clause {} is not prime",
            c.to_clause(n)
        )));
    }
    Ok(PrimeFormula {
        formula,
        prime_certified: true,
    })
}

fn is_prime_packed(c: PackedClause, members: &[u64], n: usize) -> bool {
    let implied = members.iter().all(|&m| !c.falsified_by(m));
    implied
        && (1..=n).all(|j| {
            let b = 1u64 << (n - j);
            if c.lits & b == 0 {
                return true;
            }
            let smaller = PackedClause {
                lits: c.lits & !b,
                neg: c.neg & !b,
            };
            members.iter().any(|&m| smaller.falsified_by(m))
        })
}

/// Whether an OR clause is a prime implicate of `d`: every member satisfies
/// it and deleting any single literal lets some member falsify it.
pub fn is_prime_implicate(d: &Domain, clause: &Clause) -> bool {
    let n = d.n();
    if !clause.is_or() || clause.vars().any(|v| v as usize > n) {
        return false;
    }
    let mut c = PackedClause { lits: 0, neg: 0 };
    for l in clause.or_lits() {
        let b = 1u64 << (n - l.var as usize);
        c.lits |= b;
        if !l.positive {
            c.neg |= b;
        }
    }
    is_prime_packed(c, d.members(), n)
}

/// Whether `Mod(f) = d`; an unsatisfiable `f` defines nothing.
fn defines(f: &Formula, d: &Domain) -> Result<bool> {
    match f.models() {
        Ok(m) => Ok(m == *d),
        Err(Error::EmptyDomain) => Ok(false),
        Err(e) => Err(e),
    }
}

/// All-XOR formula for an affine domain: each prime clause `l1 ∨ … ∨ lt`
/// becomes `l1 ⊕ … ⊕ lt`, keeping only equations whose variable sets are
/// linearly independent of the ones already kept.
pub fn affine_formula(d: &Domain) -> Result<Option<Formula>> {
    if !d.is_affine()? {
        return Ok(None);
    }
    let prime = prime_cnf(d)?;
    // Echelon basis indexed by leading bit.
    let mut basis = [0u64; 64];
    let mut clauses = Vec::new();
    for c in prime.formula.clauses() {
        let mut mask = c.vars().fold(0u64, |m, v| m | 1 << (v - 1));
        while mask != 0 {
            let lead = 63 - mask.leading_zeros() as usize;
            if basis[lead] == 0 {
                basis[lead] = mask;
                break;
            }
            mask ^= basis[lead];
        }
        if mask != 0 {
            clauses.push(Clause::xor(c.or_lits().to_vec())?);
        }
    }
    let f = Formula::new(d.n(), clauses)?;
    if !defines(&f, d)? {
        return Err(Error::Internal(
            "parity formula does not reproduce the domain".into(),
        ));
    }
    Ok(Some(f))
}

/// Everything the possibility branch of classification needs.
#[derive(Debug, Clone)]
pub struct PicAnalysis {
    pub affine: bool,
    pub prime: PrimeFormula,
    pub separable: Option<SeparabilityWitness>,
    pub renamable_partially_horn: Option<RphWitness>,
}

pub fn analyze_pic(d: &Domain) -> Result<PicAnalysis> {
    let prime = prime_cnf(d)?;
    let separable = if d.n() >= 2 {
        check_separable(&prime.formula)?
    } else {
        None
    };
    Ok(PicAnalysis {
        affine: d.is_affine()?,
        separable,
        renamable_partially_horn: check_renamable_partially_horn(&prime.formula)?,
        prime,
    })
}

fn pic_core(d: &Domain) -> Result<Option<(Formula, SynthesisClass)>> {
    if let Some(f) = affine_formula(d)? {
        return Ok(Some((f, SynthesisClass::Affine)));
    }
    let a = analyze_pic(d)?;
    let class = if a.separable.is_some() {
        SynthesisClass::Separable
    } else if a.renamable_partially_horn.is_some() {
        SynthesisClass::RenamablePartiallyHorn
    } else {
        return Ok(None);
    };
    Ok(Some((a.prime.formula, class)))
}

/// Possibility integrity constraint for `d`, or `None` if `d` is not a
/// possibility domain.
pub fn pic_for(d: &Domain, policy: Policy) -> Result<Option<SynthesisResult>> {
    let Some((formula, class, fixed)) = with_policy(d, policy, pic_core)? else {
        return Ok(None);
    };
    let report = check_pic(&formula)?;
    let separable = report.separable.map(SynthesisWitness::Separable);
    let rph = report
        .renamable_partially_horn
        .map(SynthesisWitness::RenamablePartiallyHorn);
    let affine = report.affine.then_some(SynthesisWitness::Affine);
    // Unit clauses added under the permissive policy can change which branch
    // applies, so fall back to any branch the recognizer accepts.
    let witness = match class {
        SynthesisClass::Affine => affine.or(separable).or(rph),
        SynthesisClass::Separable => separable.or(rph).or(affine),
        _ => rph.or(separable).or(affine),
    }
    .ok_or_else(|| {
        Error::Internal(
            "synthesized formula is not recognized as a possibility integrity constraint".into(),
        )
    })?;
    let class = match witness {
        SynthesisWitness::Separable(_) => SynthesisClass::Separable,
        SynthesisWitness::RenamablePartiallyHorn(_) => SynthesisClass::RenamablePartiallyHorn,
        _ => SynthesisClass::Affine,
    };
    Ok(Some(SynthesisResult {
        formula,
        class,
        witness,
        fixed_coordinates: fixed,
    }))
}

fn lpic_core(d: &Domain) -> Result<Option<(Formula, SynthesisClass)>> {
    let n = d.n();
    let phi = prime_cnf(d)?.formula;
    let v0: Vec<Var> = check_renamable_partially_horn(&phi)?
        .map(|w| w.admissible)
        .unwrap_or_default();
    if v0.len() == n {
        return Ok(Some((phi, SynthesisClass::Lpic)));
    }
    let mut in_v0 = vec![false; n + 1];
    for &v in &v0 {
        in_v0[v as usize] = true;
    }
    // Components of the clauses that leave V0, with the V0 literals deleted.
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let outside = |c: &Clause| -> Vec<usize> {
        c.vars()
            .filter(|&v| !in_v0[v as usize])
            .map(|v| v as usize)
            .collect()
    };
    for c in phi.clauses() {
        let vars = outside(c);
        for w in vars.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut binary = vec![true; n + 1];
    for c in phi.clauses() {
        let vars = outside(c);
        if let Some(&first) = vars.first() {
            let root = find(&mut parent, first);
            binary[root] &= vars.len() <= 2;
        }
    }
    let mut clauses = Vec::with_capacity(phi.clauses().len());
    for c in phi.clauses() {
        let vars = outside(c);
        let parity = match vars.first() {
            Some(&first) => !binary[find(&mut parent, first)],
            None => false,
        };
        if !parity {
            clauses.push(c.clone());
            continue;
        }
        let (ors, xors): (Vec<Literal>, Vec<Literal>) =
            c.or_lits().iter().partition(|l| in_v0[l.var as usize]);
        clauses.push(if ors.is_empty() {
            Clause::xor(xors)?
        } else {
            Clause::generalized(ors, xors)?
        });
    }
    let candidate = Formula::new(n, clauses)?;
    if defines(&candidate, d)? && check_lpic(&candidate)?.is_some() {
        return Ok(Some((candidate, SynthesisClass::Lpic)));
    }
    Ok(affine_formula(d)?.map(|f| (f, SynthesisClass::Lpic)))
}

/// Local possibility integrity constraint for `d`, or `None` if `d` is not a
/// local possibility domain.
pub fn lpic_for(d: &Domain, policy: Policy) -> Result<Option<SynthesisResult>> {
    let Some((formula, _, fixed)) = with_policy(d, policy, lpic_core)? else {
        return Ok(None);
    };
    let witness = check_lpic(&formula)?.ok_or_else(|| {
        Error::Internal("synthesized formula is not recognized as an lpic".into())
    })?;
    Ok(Some(SynthesisResult {
        formula,
        class: SynthesisClass::Lpic,
        witness: SynthesisWitness::Lpic(witness),
        fixed_coordinates: fixed,
    }))
}

type Core = fn(&Domain) -> Result<Option<(Formula, SynthesisClass)>>;
type Pinned = (Formula, SynthesisClass, Vec<(usize, bool)>);

/// Runs `core` on `d`, or under the permissive policy on `d` with its fixed
/// coordinates dropped, then pins those coordinates with unit clauses. The
/// result is checked against `d`.
fn with_policy(d: &Domain, policy: Policy, core: Core) -> Result<Option<Pinned>> {
    let report = d.check_policy(policy)?;
    if report.non_degenerate {
        return Ok(core(d)?.map(|(f, c)| (f, c, Vec::new())));
    }
    let (reduced, free, fixed) = d.reduce();
    let (inner, class) = match reduced {
        Some(r) => match core(&r)? {
            Some(found) => found,
            None => return Ok(None),
        },
        None => (
            Formula::tautology(1)?,
            SynthesisClass::RenamablePartiallyHorn,
        ),
    };
    let parity = check_syntactic_class(&inner).affine && !inner.clauses().is_empty();
    let relabel = |lits: &[Literal]| -> Vec<Literal> {
        lits.iter()
            .map(|l| Literal {
                var: free[l.var as usize - 1] as Var,
                positive: l.positive,
            })
            .collect()
    };
    let mut clauses = Vec::new();
    for c in inner.clauses() {
        let (ors, xors) = (relabel(c.or_lits()), relabel(c.xor_lits()));
        clauses.push(match c.kind() {
            ClauseKind::Or => Clause::or(ors)?,
            ClauseKind::Xor => Clause::xor(xors)?,
            ClauseKind::Generalized => Clause::generalized(ors, xors)?,
        });
    }
    for &(j, bit) in &fixed {
        let lit = Literal {
            var: j as Var,
            positive: bit,
        };
        clauses.push(if parity {
            Clause::xor(vec![lit])?
        } else {
            Clause::or(vec![lit])?
        });
    }
    let lifted = Formula::new(d.n(), clauses)?;
    if !defines(&lifted, d)? {
        return Err(Error::Internal(
            "lifted formula does not reproduce the domain".into(),
        ));
    }
    Ok(Some((lifted, class, fixed)))
}
