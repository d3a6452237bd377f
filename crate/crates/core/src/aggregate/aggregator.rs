use std::fmt;

use serde::{Serialize, Serializer};

use super::BoolFn;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::formula::Assignment;
use crate::DEFAULT_TUPLE_CAP;

/// Per-row coordinate masks: bit `n - j` of `masks[r]` is the value of
/// component `j` on row `r`. Applying the aggregator to packed rows is then
/// a handful of word operations.
#[derive(Debug, Clone)]
pub(crate) struct RowMasks {
    k: usize,
    masks: Vec<u64>,
    live: Vec<usize>,
}

impl RowMasks {
    pub(crate) fn new(components: &[BoolFn]) -> Self {
        let n = components.len();
        let k = components[0].arity();
        let mut masks = vec![0u64; 1 << k];
        for (j, f) in components.iter().enumerate() {
            for (r, m) in masks.iter_mut().enumerate() {
                if f.value(r) {
                    *m |= 1 << (n - 1 - j);
                }
            }
        }
        let live = (0..masks.len()).filter(|&r| masks[r] != 0).collect();
        RowMasks { k, masks, live }
    }

    pub(crate) fn uniform(f: &BoolFn, n: usize) -> Self {
        Self::new(&vec![*f; n])
    }

    pub(crate) fn arity(&self) -> usize {
        self.k
    }

    pub(crate) fn apply(&self, rows: &[u64]) -> u64 {
        let k = self.k;
        let mut out = 0u64;
        for &r in &self.live {
            let mut sel = self.masks[r];
            for (i, &row) in rows.iter().enumerate() {
                sel &= if r >> (k - 1 - i) & 1 == 1 { row } else { !row };
            }
            out |= sel;
        }
        out
    }
}

/// Input rows together with the output that left the domain (or, for
/// generalized dictatorships, that is none of the inputs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub inputs: Vec<Assignment>,
    pub output: Assignment,
}

impl Serialize for Counterexample {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            inputs: Vec<String>,
            output: String,
        }
        Repr {
            inputs: self.inputs.iter().map(ToString::to_string).collect(),
            output: self.output.to_string(),
        }
        .serialize(s)
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ins: Vec<String> = self.inputs.iter().map(ToString::to_string).collect();
        write!(f, "({}) ↦ {}", ins.join(", "), self.output)
    }
}

/// An n-tuple of k-ary Boolean functions applied issue by issue.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Aggregator {
    components: Vec<BoolFn>,
}

impl Aggregator {
    pub fn new(components: Vec<BoolFn>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::ShapeMismatch(
                "aggregator needs at least one component".into(),
            ));
        };
        if components.len() > crate::MAX_ARITY {
            return Err(Error::CapExceeded {
                what: "aggregator length",
                requested: components.len() as u128,
                limit: crate::MAX_ARITY as u128,
            });
        }
        let k = first.arity();
        if let Some(bad) = components.iter().find(|f| f.arity() != k) {
            return Err(Error::ArityMismatch {
                expected: k,
                found: bad.arity(),
            });
        }
        Ok(Aggregator { components })
    }

    /// `(f, …, f)` with `n` copies.
    pub fn uniform(f: BoolFn, n: usize) -> Result<Self> {
        Self::new(vec![f; n])
    }

    /// Builds from names such as `["and", "or", "pr1"]`.
    pub fn from_names(names: &[&str], k: usize) -> Result<Self> {
        Self::new(
            names
                .iter()
                .map(|name| BoolFn::named(name, k))
                .collect::<Result<_>>()?,
        )
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn arity(&self) -> usize {
        self.components[0].arity()
    }

    pub fn components(&self) -> &[BoolFn] {
        &self.components
    }

    pub(crate) fn row_masks(&self) -> RowMasks {
        RowMasks::new(&self.components)
    }

    pub fn apply(&self, rows: &[Assignment]) -> Result<Assignment> {
        if rows.len() != self.arity() {
            return Err(Error::ShapeMismatch(format!(
                "{} rows given to a {}-ary aggregator",
                rows.len(),
                self.arity()
            )));
        }
        if let Some(r) = rows.iter().find(|r| r.n() != self.n()) {
            return Err(Error::ShapeMismatch(format!(
                "row of length {} given to an aggregator with {} components",
                r.n(),
                self.n()
            )));
        }
        let packed: Vec<u64> = rows.iter().map(Assignment::bits).collect();
        Assignment::new(self.n(), self.row_masks().apply(&packed))
    }

    fn check_shape(&self, d: &Domain) -> Result<()> {
        if d.n() != self.n() {
            return Err(Error::ShapeMismatch(format!(
                "aggregator has {} components but the domain has arity {}",
                self.n(),
                d.n()
            )));
        }
        Ok(())
    }

    fn counterexample(&self, d: &Domain, rows: Vec<u64>, masks: &RowMasks) -> Counterexample {
        let out = masks.apply(&rows);
        Counterexample {
            inputs: rows
                .into_iter()
                .map(|r| Assignment::new(d.n(), r).expect("domain arity"))
                .collect(),
            output: Assignment::new(d.n(), out).expect("domain arity"),
        }
    }

    /// `None` if every k-tuple of members is mapped into `d`, otherwise the
    /// first failing tuple.
    pub fn check_aggregator(&self, d: &Domain) -> Result<Option<Counterexample>> {
        self.check_aggregator_capped(d, DEFAULT_TUPLE_CAP)
    }

    pub fn check_aggregator_capped(&self, d: &Domain, cap: u128) -> Result<Option<Counterexample>> {
        self.check_shape(d)?;
        if let Some(j) = self.components.iter().position(|f| !f.is_unanimous()) {
            return Err(Error::NonUnanimous { component: j + 1 });
        }
        let masks = self.row_masks();
        Ok(d.closure_counterexample(&masks, cap)?
            .map(|rows| self.counterexample(d, rows, &masks)))
    }

    pub fn is_aggregator(&self, d: &Domain) -> Result<bool> {
        Ok(self.check_aggregator(d)?.is_none())
    }

    /// All components equal the same projection.
    pub fn is_dictatorial(&self) -> bool {
        let first = self.components[0].projection_index();
        first.is_some()
            && self
                .components
                .iter()
                .all(|f| f.projection_index() == first)
    }

    pub fn is_projection_aggregator(&self) -> bool {
        self.components.iter().all(BoolFn::is_projection)
    }

    /// All components are the same function.
    pub fn is_systematic(&self) -> bool {
        self.components.iter().all(|f| *f == self.components[0])
    }

    pub fn is_anonymous(&self) -> bool {
        self.components.iter().all(BoolFn::is_anonymous)
    }

    pub fn is_monotone(&self) -> bool {
        self.components.iter().all(BoolFn::is_monotone)
    }

    pub fn is_strongdem(&self) -> bool {
        self.components.iter().all(BoolFn::is_one_immune)
    }

    /// No component is a projection.
    pub fn is_locally_nondictatorial(&self) -> bool {
        !self.components.iter().any(BoolFn::is_projection)
    }

    /// `None` if on every k-tuple of members the output equals one of the
    /// inputs; otherwise a tuple where it does not.
    pub fn generalized_dictatorship_violation(&self, d: &Domain) -> Result<Option<Counterexample>> {
        self.check_shape(d)?;
        let k = self.arity();
        let total = (d.len() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if total > DEFAULT_TUPLE_CAP {
            return Err(Error::CapExceeded {
                what: "closure tuples",
                requested: total,
                limit: DEFAULT_TUPLE_CAP,
            });
        }
        let masks = self.row_masks();
        let members = d.members();
        let mut idx = vec![0usize; k];
        let mut rows = vec![0u64; k];
        loop {
            for (r, &i) in rows.iter_mut().zip(&idx) {
                *r = members[i];
            }
            let out = masks.apply(&rows);
            if !rows.contains(&out) {
                return Ok(Some(self.counterexample(d, rows, &masks)));
            }
            let mut pos = k;
            loop {
                if pos == 0 {
                    return Ok(None);
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < members.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    pub fn is_generalized_dictatorship(&self, d: &Domain) -> Result<bool> {
        Ok(self.generalized_dictatorship_violation(d)?.is_none())
    }

    /// `h_j(x) = f_j(g_j^1(x), …, g_j^k(x))` where `self` is k-ary and every
    /// `inner[i]` is l-ary.
    pub fn superpose(&self, inner: &[Aggregator]) -> Result<Aggregator> {
        if inner.len() != self.arity() {
            return Err(Error::ShapeMismatch(format!(
                "{} inner aggregators for a {}-ary outer one",
                inner.len(),
                self.arity()
            )));
        }
        let l = inner[0].arity();
        if inner.iter().any(|g| g.n() != self.n() || g.arity() != l) {
            return Err(Error::ShapeMismatch(
                "inner aggregators disagree in shape".into(),
            ));
        }
        let components = (0..self.n())
            .map(|j| {
                let f = self.components[j];
                BoolFn::from_fn(l, |x| {
                    let mid: Vec<bool> = inner.iter().map(|g| g.components[j].eval(x)).collect();
                    f.eval(&mid)
                })
            })
            .collect::<Result<_>>()?;
        Aggregator::new(components)
    }

    fn require_ternary(&self, other: &Aggregator) -> Result<()> {
        if self.arity() != 3 || other.arity() != 3 {
            return Err(Error::ArityMismatch {
                expected: 3,
                found: if self.arity() != 3 {
                    self.arity()
                } else {
                    other.arity()
                },
            });
        }
        if self.n() != other.n() {
            return Err(Error::ShapeMismatch("aggregators differ in length".into()));
        }
        Ok(())
    }

    fn permuted(&self, p: &[usize]) -> Result<Aggregator> {
        Aggregator::new(
            self.components
                .iter()
                .map(|f| f.permute(p))
                .collect::<Result<_>>()?,
        )
    }

    /// `e_j(x,y,z) = f_j(g_j(x,y,z), g_j(y,z,x), g_j(z,x,y))`.
    pub fn diamond(&self, g: &Aggregator) -> Result<Aggregator> {
        self.require_ternary(g)?;
        self.superpose(&[g.clone(), g.permuted(&[1, 2, 0])?, g.permuted(&[2, 0, 1])?])
    }

    /// `h_j(x,y,z) = f_j(f_j(x,y,z), f_j(x,y,z), g_j(x,y,z))`.
    pub fn star(&self, g: &Aggregator) -> Result<Aggregator> {
        self.require_ternary(g)?;
        self.superpose(&[self.clone(), self.clone(), g.clone()])
    }

    /// Replaces each listed component (1-based) by its dual. Renaming a
    /// domain on those coordinates maps aggregators for it to aggregators
    /// for the renamed domain this way.
    pub fn dualize(&self, coords: &[usize]) -> Result<Aggregator> {
        let mut components = self.components.clone();
        for &j in coords {
            if j == 0 || j > components.len() {
                return Err(Error::BadIndex {
                    index: j,
                    n: components.len(),
                });
            }
            components[j - 1] = components[j - 1].dual();
        }
        Aggregator::new(components)
    }

    /// Component names, or `t <bits>` for unnamed tables.
    pub fn names(&self) -> Vec<String> {
        self.components.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Debug for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.names().join(","))
    }
}

impl Serialize for Aggregator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.names().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Assignment {
        Assignment::from_str_bits(s).unwrap()
    }

    fn dom(rows: &[&str]) -> Domain {
        Domain::from_rows(rows).unwrap()
    }

    #[test]
    fn apply_componentwise() {
        let f = Aggregator::from_names(&["and", "or", "and"], 2).unwrap();
        assert_eq!(f.apply(&[a("011"), a("110")]).unwrap(), a("010"));
        let pr1 = Aggregator::from_names(&["pr1", "pr1", "pr1"], 2).unwrap();
        assert_eq!(pr1.apply(&[a("011"), a("110")]).unwrap(), a("011"));
        let xor = Aggregator::uniform(BoolFn::xor3(), 3).unwrap();
        assert_eq!(
            xor.apply(&[a("001"), a("010"), a("100")]).unwrap(),
            a("111")
        );
        assert!(xor.apply(&[a("001")]).is_err());
    }

    #[test]
    fn closure_and_counterexample() {
        let phi10 = dom(&["000", "010", "011", "101", "110", "111"]);
        let f = Aggregator::from_names(&["and", "or", "and"], 2).unwrap();
        assert!(f.is_aggregator(&phi10).unwrap());
        let phi7 = dom(&["000", "001", "010", "101", "110", "111"]);
        let xor = Aggregator::uniform(BoolFn::xor3(), 3).unwrap();
        let cex = xor.check_aggregator(&phi7).unwrap().unwrap();
        assert!(!phi7.contains(&cex.output));
        let constant = Aggregator::uniform(BoolFn::from_table(2, 0).unwrap(), 3).unwrap();
        assert!(matches!(
            constant.check_aggregator(&phi7),
            Err(Error::NonUnanimous { component: 1 })
        ));
    }

    #[test]
    fn generalized_dictatorship() {
        let phi11 = dom(&["000", "001", "010", "100"]);
        let and = Aggregator::uniform(BoolFn::and(2), 3).unwrap();
        let v = and
            .generalized_dictatorship_violation(&phi11)
            .unwrap()
            .unwrap();
        assert_eq!(v.output, a("000"));
        let phi12 = dom(&["000", "010", "011", "111"]);
        assert!(and.is_generalized_dictatorship(&phi12).unwrap());
    }

    #[test]
    fn predicates() {
        let pr = Aggregator::from_names(&["pr2", "pr2"], 2).unwrap();
        assert!(pr.is_dictatorial() && pr.is_projection_aggregator() && pr.is_systematic());
        let mixed = Aggregator::from_names(&["pr1", "pr2"], 2).unwrap();
        assert!(!mixed.is_dictatorial() && mixed.is_projection_aggregator());
        let lpd = Aggregator::from_names(&["and3", "maj", "xor3"], 3).unwrap();
        assert!(lpd.is_locally_nondictatorial() && lpd.is_anonymous());
        assert!(!lpd.is_strongdem() && !lpd.is_monotone());
    }

    #[test]
    fn star_and_diamond_identities() {
        let xor = Aggregator::uniform(BoolFn::xor3(), 2).unwrap();
        let g = Aggregator::new(vec![
            BoolFn::from_bit_string("00101011").unwrap(),
            BoolFn::maj(),
        ])
        .unwrap();
        assert_eq!(xor.star(&g).unwrap(), g);
        let and = Aggregator::uniform(BoolFn::and(3), 2).unwrap();
        assert_eq!(and.star(&g).unwrap(), and);
        let comm = Aggregator::from_names(&["maj", "or3"], 3).unwrap();
        let f = Aggregator::from_names(&["pr1", "pr2"], 3).unwrap();
        assert_eq!(f.diamond(&comm).unwrap(), comm);
        let binary = Aggregator::from_names(&["and", "or"], 2).unwrap();
        assert!(binary.star(&binary).is_err());
    }

    #[test]
    fn superpose_with_projections_is_identity() {
        let f = Aggregator::from_names(&["maj", "xor3", "pr2"], 3).unwrap();
        let projections: Vec<Aggregator> = (1..=3)
            .map(|d| Aggregator::uniform(BoolFn::projection(d, 3).unwrap(), 3).unwrap())
            .collect();
        assert_eq!(f.superpose(&projections).unwrap(), f);
    }
}
