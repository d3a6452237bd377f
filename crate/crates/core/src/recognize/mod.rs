//! Syntactic recognizers. Every accepting answer carries a witness that has
//! been re-checked by the matching `verify_*` function.
//!
//! Variables range over `1..=n` whether or not they occur in a clause; a
//! variable that occurs nowhere is unconstrained and behaves like an
//! isolated component.

mod implication;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{ClauseKind, Formula, Var};

pub(crate) use implication::ImplicationGraph;
use implication::{plain, primed};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparabilityWitness {
    pub part1: Vec<Var>,
    pub part2: Vec<Var>,
}

/// Renaming `renamed` turns the formula into a partially Horn one whose
/// admissible variables are `admissible`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RphWitness {
    pub renamed: Vec<Var>,
    pub admissible: Vec<Var>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct LpicWitness {
    pub renamed: Vec<Var>,
    pub v0: Vec<Var>,
    pub v1: Vec<Var>,
    pub v2: Vec<Var>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SyntacticClass {
    pub horn: bool,
    pub dual_horn: bool,
    pub bijunctive: bool,
    pub affine: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PicKind {
    Separable,
    RenamablePartiallyHorn,
    Affine,
}

/// Outcome of every possibility-integrity-constraint branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PicReport {
    pub separable: Option<SeparabilityWitness>,
    pub affine: bool,
    pub renamable_partially_horn: Option<RphWitness>,
}

impl PicReport {
    pub fn is_pic(&self) -> bool {
        !self.branches().is_empty()
    }

    pub fn branches(&self) -> Vec<PicKind> {
        let mut out = Vec::new();
        if self.separable.is_some() {
            out.push(PicKind::Separable);
        }
        if self.renamable_partially_horn.is_some() {
            out.push(PicKind::RenamablePartiallyHorn);
        }
        if self.affine {
            out.push(PicKind::Affine);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormulaClassReport {
    pub horn: bool,
    pub dual_horn: bool,
    pub bijunctive: bool,
    pub affine: bool,
    pub renamable_horn: Option<Vec<Var>>,
    pub separable: Option<SeparabilityWitness>,
    pub partially_horn: Option<Vec<Var>>,
    pub renamable_partially_horn: Option<RphWitness>,
    pub pic: bool,
    pub pic_branches: Vec<PicKind>,
    pub lpic: Option<LpicWitness>,
    /// Set when the formula has parity clauses, for which partial Hornness
    /// is extended by keeping xor-part variables out of `V0`.
    pub mixed_clause_extension: bool,
}

/// Runs every recognizer.
pub fn classify_formula(f: &Formula) -> Result<FormulaClassReport> {
    let syn = check_syntactic_class(f);
    let pic = check_pic(f)?;
    Ok(FormulaClassReport {
        horn: syn.horn,
        dual_horn: syn.dual_horn,
        bijunctive: syn.bijunctive,
        affine: syn.affine,
        renamable_horn: check_renamable_horn(f)?,
        separable: pic.separable.clone(),
        partially_horn: check_partially_horn(f)?,
        renamable_partially_horn: pic.renamable_partially_horn.clone(),
        pic: pic.is_pic(),
        pic_branches: pic.branches(),
        lpic: check_lpic(f)?,
        mixed_clause_extension: f.has_parity_clauses(),
    })
}

pub fn check_syntactic_class(f: &Formula) -> SyntacticClass {
    let mut s = SyntacticClass {
        horn: true,
        dual_horn: true,
        bijunctive: true,
        affine: true,
    };
    for c in f.clauses() {
        s.horn &= c.is_horn();
        s.dual_horn &= c.is_dual_horn();
        s.bijunctive &= c.is_or() && c.len() <= 2;
        s.affine &= c.kind() == ClauseKind::Xor;
    }
    s
}

/// Union-find over variables `1..=n`.
struct Components {
    parent: Vec<u32>,
}

impl Components {
    fn new(n: usize) -> Self {
        Components {
            parent: (0..=n as u32).collect(),
        }
    }

    fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let grand = self.parent[self.parent[v as usize] as usize];
            self.parent[v as usize] = grand;
            v = grand;
        }
        v
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb) as usize] = ra.min(rb);
        }
    }

    /// Joins consecutive variables of every clause.
    fn of(f: &Formula) -> Self {
        let mut comps = Components::new(f.n());
        for c in f.clauses() {
            let mut prev: Option<Var> = None;
            for v in c.vars() {
                if let Some(p) = prev {
                    comps.union(p, v);
                }
                prev = Some(v);
            }
        }
        comps
    }
}

pub fn check_separable(f: &Formula) -> Result<Option<SeparabilityWitness>> {
    if f.n() < 2 {
        return Err(Error::TooFewMembers {
            size: f.n(),
            needed: 2,
        });
    }
    let mut comps = Components::of(f);
    let root = comps.find(1);
    let (part1, part2): (Vec<Var>, Vec<Var>) =
        (1..=f.n() as Var).partition(|&v| comps.find(v) == root);
    if part2.is_empty() {
        return Ok(None);
    }
    Ok(Some(SeparabilityWitness { part1, part2 }))
}

/// Checks that `v0` is an admissible set: clauses inside `v0` are Horn and
/// `v0` variables occur only negatively in every other clause.
pub fn verify_partially_horn(f: &Formula, v0: &[Var]) -> Result<bool> {
    if v0.is_empty() {
        return Err(Error::BadPartition("admissible set is empty".into()));
    }
    let inside = membership(f.n(), v0)?;
    for c in f.clauses() {
        if c.xor_lits().iter().any(|l| inside[l.var as usize]) {
            return Ok(false);
        }
        let internal = c.is_or() && c.vars().all(|v| inside[v as usize]);
        if internal {
            if !c.is_horn() {
                return Ok(false);
            }
        } else if c
            .or_lits()
            .iter()
            .any(|l| l.positive && inside[l.var as usize])
        {
            return Ok(false);
        }
    }
    Ok(true)
}

fn membership(n: usize, vars: &[Var]) -> Result<Vec<bool>> {
    let mut inside = vec![false; n + 1];
    for &v in vars {
        if v == 0 || v as usize > n {
            return Err(Error::VariableOutOfRange {
                var: u64::from(v),
                n,
            });
        }
        inside[v as usize] = true;
    }
    Ok(inside)
}

/// Largest admissible set without renaming, found by propagating exclusions.
pub fn check_partially_horn(f: &Formula) -> Result<Option<Vec<Var>>> {
    let n = f.n();
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (i, c) in f.clauses().iter().enumerate() {
        for v in c.vars() {
            occurs[v as usize].push(i);
        }
    }
    let mut excluded = vec![false; n + 1];
    let mut tainted = vec![false; f.clauses().len()];
    let mut queue: Vec<Var> = Vec::new();
    let exclude = |v: Var, excluded: &mut Vec<bool>, queue: &mut Vec<Var>| {
        if !excluded[v as usize] {
            excluded[v as usize] = true;
            queue.push(v);
        }
    };
    for c in f.clauses() {
        let positives = c.or_lits().iter().filter(|l| l.positive).count();
        if !c.xor_lits().is_empty() || positives >= 2 {
            for l in c.or_lits().iter().filter(|l| l.positive) {
                exclude(l.var, &mut excluded, &mut queue);
            }
        }
        for l in c.xor_lits() {
            exclude(l.var, &mut excluded, &mut queue);
        }
    }
    while let Some(w) = queue.pop() {
        for &ci in &occurs[w as usize] {
            if tainted[ci] {
                continue;
            }
            tainted[ci] = true;
            for l in f.clauses()[ci].or_lits().iter().filter(|l| l.positive) {
                exclude(l.var, &mut excluded, &mut queue);
            }
        }
    }
    let v0: Vec<Var> = (1..=n as Var).filter(|&v| !excluded[v as usize]).collect();
    if v0.is_empty() {
        return Ok(None);
    }
    if !verify_partially_horn(f, &v0)? {
        return Err(Error::Internal(format!(
            "partially Horn witness {v0:?} failed verification"
        )));
    }
    Ok(Some(v0))
}

/// Implication-graph recognizer. The returned admissible set is the union of
/// all variables whose two vertices lie in different strongly connected
/// components, which is the largest possible one.
pub fn check_renamable_partially_horn(f: &Formula) -> Result<Option<RphWitness>> {
    let g = ImplicationGraph::build(f);
    let comp = g.scc();
    let mut renamed = Vec::new();
    let mut admissible = Vec::new();
    for v in 1..=f.n() as Var {
        let (x, xp) = (comp[plain(v) as usize], comp[primed(v) as usize]);
        if x == xp {
            continue;
        }
        // Walking components sinks-first and setting the first unassigned
        // vertex of each pair to 1 sets x_v to 1 exactly when its component
        // completes before x_v′'s.
        admissible.push(v);
        if x < xp {
            renamed.push(v);
        }
    }
    if admissible.is_empty() {
        return Ok(None);
    }
    let witness = RphWitness {
        renamed,
        admissible,
    };
    if !verify_rph(f, &witness)? {
        return Err(Error::Internal(format!(
            "renamable partially Horn witness {witness:?} failed verification"
        )));
    }
    Ok(Some(witness))
}

pub fn verify_rph(f: &Formula, w: &RphWitness) -> Result<bool> {
    let inside = membership(f.n(), &w.admissible)?;
    if w.renamed.iter().any(|&v| !inside[v as usize]) {
        return Ok(false);
    }
    verify_partially_horn(&f.rename(&w.renamed)?, &w.admissible)
}

/// Renaming that makes the formula Horn, if one exists.
pub fn check_renamable_horn(f: &Formula) -> Result<Option<Vec<Var>>> {
    Ok(check_renamable_partially_horn(f)?
        .filter(|w| w.admissible.len() == f.n())
        .map(|w| w.renamed))
}

pub fn check_pic(f: &Formula) -> Result<PicReport> {
    let separable = if f.n() >= 2 {
        check_separable(f)?
    } else {
        None
    };
    Ok(PicReport {
        separable,
        affine: check_syntactic_class(f).affine,
        renamable_partially_horn: check_renamable_partially_horn(f)?,
    })
}

pub fn check_lpic(f: &Formula) -> Result<Option<LpicWitness>> {
    let n = f.n();
    let all: Vec<Var> = (1..=n as Var).collect();
    let syn = check_syntactic_class(f);
    let candidate = if syn.bijunctive {
        LpicWitness {
            v1: all,
            ..Default::default()
        }
    } else if syn.affine {
        LpicWitness {
            v2: all,
            ..Default::default()
        }
    } else {
        match check_renamable_partially_horn(f)? {
            None => match split_components(f) {
                Some(w) => w,
                None => return Ok(None),
            },
            Some(r) if r.admissible.len() == n => LpicWitness {
                renamed: r.renamed,
                v0: r.admissible,
                ..Default::default()
            },
            Some(r) => {
                let in_v0 = membership(n, &r.admissible)?;
                let mut in_v2 = vec![false; n + 1];
                for c in f.clauses().iter().filter(|c| !c.is_or()) {
                    for v in c.vars().filter(|&v| !in_v0[v as usize]) {
                        in_v2[v as usize] = true;
                    }
                }
                let (v2, v1): (Vec<Var>, Vec<Var>) = all
                    .iter()
                    .filter(|&&v| !in_v0[v as usize])
                    .partition(|&&v| in_v2[v as usize]);
                LpicWitness {
                    renamed: r.renamed,
                    v0: r.admissible,
                    v1,
                    v2,
                }
            }
        }
    };
    Ok(verify_lpic(f, &candidate)?.then_some(candidate))
}

/// With no admissible variable every connected component must be
/// bijunctive (into V1) or made of parity clauses and unit clauses (V2).
fn split_components(f: &Formula) -> Option<LpicWitness> {
    let n = f.n();
    let mut comps = Components::of(f);
    let mut binary_ok = vec![true; n + 1];
    let mut parity_ok = vec![true; n + 1];
    for c in f.clauses() {
        let Some(first) = c.vars().next() else {
            continue;
        };
        let root = comps.find(first) as usize;
        binary_ok[root] &= c.is_or() && c.len() <= 2;
        parity_ok[root] &= c.kind() == ClauseKind::Xor || (c.is_or() && c.len() == 1);
    }
    let mut w = LpicWitness::default();
    for v in 1..=n as Var {
        let root = comps.find(v) as usize;
        if binary_ok[root] {
            w.v1.push(v);
        } else if parity_ok[root] {
            w.v2.push(v);
        } else {
            return None;
        }
    }
    Some(w)
}

/// Mechanical check of the three lpic conditions on the renamed formula,
/// requiring in addition that every xor-part lies inside `v2`.
pub fn verify_lpic(f: &Formula, w: &LpicWitness) -> Result<bool> {
    let n = f.n();
    let mut part = vec![0u8; n + 1];
    for (tag, set) in [(1u8, &w.v0), (2, &w.v1), (3, &w.v2)] {
        for &v in set {
            if v == 0 || v as usize > n {
                return Err(Error::VariableOutOfRange {
                    var: u64::from(v),
                    n,
                });
            }
            if part[v as usize] != 0 {
                return Err(Error::BadPartition(format!("x{v} is in two parts")));
            }
            part[v as usize] = tag;
        }
    }
    if let Some(v) = (1..=n).find(|&v| part[v] == 0) {
        return Err(Error::BadPartition(format!("x{v} is in no part")));
    }
    if let Some(&v) = w.renamed.iter().find(|&&v| part[v as usize] != 1) {
        return Err(Error::BadPartition(format!(
            "renamed x{v} is not admissible"
        )));
    }
    let g = f.rename(&w.renamed)?;
    if !w.v0.is_empty() && !verify_partially_horn(&g, &w.v0)? {
        return Ok(false);
    }
    let is = |v: Var, tag: u8| part[v as usize] == tag;
    for c in g.clauses() {
        let n1 = c.vars().filter(|&v| is(v, 2)).count();
        let n2 = c.vars().filter(|&v| is(v, 3)).count();
        if n1 > 2 || (n1 > 0 && n2 > 0) {
            return Ok(false);
        }
        if !c.xor_lits().is_empty() {
            if !c.xor_lits().iter().all(|l| is(l.var, 3))
                || !c.or_lits().iter().all(|l| is(l.var, 1))
            {
                return Ok(false);
            }
        } else if n2 > 0 && (n2 != 1 || c.vars().any(|v| !is(v, 1) && !is(v, 3))) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    #[test]
    fn syntactic_scan() {
        let s = check_syntactic_class(&f("p ecnf 2 2\n1 2 0\n-1 2 0\n"));
        assert!(s.bijunctive && s.dual_horn && !s.horn && !s.affine);
        assert!(check_syntactic_class(&f("p ecnf 3 1\nx 1 2 3 0\n")).affine);
    }

    #[test]
    fn separable_splits_components() {
        let w = check_separable(&f("p ecnf 4 2\n1 -2 0\n3 4 0\n"))
            .unwrap()
            .unwrap();
        assert_eq!(w.part1, vec![1, 2]);
        assert_eq!(w.part2, vec![3, 4]);
        assert!(check_separable(&f("p ecnf 3 1\n1 2 3 0\n"))
            .unwrap()
            .is_none());
        assert!(check_separable(&f("p ecnf 1 0\n")).is_err());
    }

    #[test]
    fn unused_variable_makes_separable() {
        let w = check_separable(&f("p ecnf 3 1\n1 2 0\n")).unwrap().unwrap();
        assert_eq!(w.part2, vec![3]);
    }

    #[test]
    fn partially_horn_propagation() {
        // x3 and x4 are excluded; x2 only appears negatively next to them.
        let v0 = check_partially_horn(&f("p ecnf 4 3\n-1 2 0\n-2 3 0\n3 4 0\n")).unwrap();
        assert_eq!(v0, Some(vec![1, 2]));
        assert!(check_partially_horn(&f("p ecnf 2 1\n1 2 0\n"))
            .unwrap()
            .is_none());
    }

    #[test]
    fn verify_partially_horn_rules() {
        let g = f("p ecnf 3 2\n-1 -2 0\n-1 2 3 0\n");
        assert!(verify_partially_horn(&g, &[1]).unwrap());
        assert!(!verify_partially_horn(&g, &[2]).unwrap());
        assert!(verify_partially_horn(&g, &[]).is_err());
    }

    #[test]
    fn parity_clause_keeps_xor_vars_out() {
        let g = f("p ecnf 3 1\ng -1 x 2 3 0\n");
        let w = check_renamable_partially_horn(&g).unwrap().unwrap();
        assert_eq!(w.admissible, vec![1]);
        assert!(w.renamed.is_empty());
        let l = check_lpic(&g).unwrap().unwrap();
        assert_eq!(l.v2, vec![2, 3]);
    }

    #[test]
    fn lpic_on_mixed_components() {
        let g = f("p ecnf 5 3\n1 2 3 0\n-1 -2 -3 0\nx 4 5 0\n");
        assert!(check_renamable_partially_horn(&g).unwrap().is_none());
        assert!(check_lpic(&g).unwrap().is_none());
        let h = f("p ecnf 5 3\n1 2 0\n-1 -2 0\nx 3 4 5 0\n");
        let w = check_lpic(&h).unwrap();
        assert!(w.is_some());
    }

    #[test]
    fn verify_lpic_rejects_bad_partitions() {
        let g = f("p ecnf 2 1\n1 2 0\n");
        let w = LpicWitness {
            v1: vec![1],
            ..Default::default()
        };
        assert!(matches!(verify_lpic(&g, &w), Err(Error::BadPartition(_))));
    }
}
