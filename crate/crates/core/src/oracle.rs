//! Brute-force search for aggregators, independent of the synthesis
//! machinery. Closure is checked by evaluating components one argument list
//! at a time, so it shares nothing with the packed row-mask evaluator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::aggregate::{classify_domain, Aggregator, BoolFn, Counterexample, DomainClass};
use crate::domain::{Domain, Policy};
use crate::error::{Error, Result};
use crate::formula::{bit_string, Assignment};
use crate::DEFAULT_TUPLE_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    NonDictatorial,
    LocallyNondictatorial,
    Anonymous,
    MonotoneNondictatorial,
    Strongdem,
    NonGeneralizedDictatorship,
}

/// Functions a component may take.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateSet {
    /// `∧, ∨, pr1, pr2`: every unanimous binary function.
    Binary,
    /// `∧3, ∨3, maj` and optionally `⊕`: every unanimous symmetric ternary
    /// function.
    TernaryCommutative {
        allow_xor: bool,
    },
    /// Every unanimous function of the given arity.
    AllUnanimous(usize),
    Explicit(Vec<BoolFn>),
}

impl CandidateSet {
    pub fn functions(&self) -> Result<Vec<BoolFn>> {
        Ok(match self {
            CandidateSet::Binary => vec![
                BoolFn::and(2),
                BoolFn::or(2),
                BoolFn::projection(1, 2)?,
                BoolFn::projection(2, 2)?,
            ],
            CandidateSet::TernaryCommutative { allow_xor } => {
                let mut fs = vec![BoolFn::and(3), BoolFn::or(3), BoolFn::maj()];
                if *allow_xor {
                    fs.push(BoolFn::xor3());
                }
                fs
            }
            CandidateSet::AllUnanimous(k) => {
                if *k == 0 || *k > 4 {
                    return Err(Error::CapExceeded {
                        what: "oracle candidate arity",
                        requested: *k as u128,
                        limit: 4,
                    });
                }
                let rows = 1u64 << k;
                let last = rows - 1;
                (0..1u64 << rows)
                    .filter(|t| t & 1 == 0 && t >> last & 1 == 1)
                    .map(|t| BoolFn::from_table(*k, t))
                    .collect::<Result<_>>()?
            }
            CandidateSet::Explicit(fs) => {
                if fs.is_empty() {
                    return Err(Error::ShapeMismatch("empty candidate set".into()));
                }
                if fs.iter().any(|f| f.arity() != fs[0].arity()) {
                    return Err(Error::ShapeMismatch("candidates of mixed arity".into()));
                }
                fs.clone()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpaceSpec {
    pub candidates: CandidateSet,
    /// Cap on the argument lists evaluated over the whole search.
    pub tuple_cap: u128,
}

/// Cap on `n · 2^(2^k)` for searches over every unanimous k-ary function.
pub const ALL_TABLE_CAP: u128 = 1_000_000;

/// Default budget of argument lists for one search.
pub const ORACLE_TUPLE_CAP: u128 = 1 << 34;

impl SearchSpaceSpec {
    pub fn new(candidates: CandidateSet) -> Self {
        SearchSpaceSpec {
            candidates,
            tuple_cap: ORACLE_TUPLE_CAP,
        }
    }
}

/// Evaluates `f` on every `k`-tuple of members, in lexicographic order.
pub fn naive_closure_counterexample(d: &Domain, f: &Aggregator) -> Result<Option<Counterexample>> {
    let mut budget = DEFAULT_TUPLE_CAP;
    naive_check(d, f.components(), &mut budget)
}

fn naive_check(d: &Domain, comps: &[BoolFn], budget: &mut u128) -> Result<Option<Counterexample>> {
    let n = d.n();
    if comps.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} components for a domain of arity {n}",
            comps.len()
        )));
    }
    let k = comps.first().map_or(1, |f| f.arity());
    let members = d.members();
    let total = (members.len() as u128)
        .checked_pow(k as u32)
        .unwrap_or(u128::MAX);
    if total > *budget {
        return Err(Error::CapExceeded {
            what: "oracle argument lists",
            requested: total,
            limit: *budget,
        });
    }
    *budget -= total;
    let mut idx = vec![0usize; k];
    let mut args = vec![false; k];
    loop {
        let mut out = 0u64;
        for (j, f) in comps.iter().enumerate() {
            let shift = n - 1 - j;
            for (a, &i) in args.iter_mut().zip(&idx) {
                *a = members[i] >> shift & 1 == 1;
            }
            if f.eval(&args) {
                out |= 1 << shift;
            }
        }
        if !d.contains_bits(out) {
            return Ok(Some(Counterexample {
                inputs: idx
                    .iter()
                    .map(|&i| Assignment::new(n, members[i]))
                    .collect::<Result<_>>()?,
                output: Assignment::new(n, out)?,
            }));
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

fn holds(d: &Domain, f: &Aggregator, property: Property) -> Result<bool> {
    Ok(match property {
        Property::NonDictatorial => !f.is_dictatorial(),
        Property::LocallyNondictatorial => f.is_locally_nondictatorial(),
        Property::Anonymous => f.is_anonymous(),
        Property::MonotoneNondictatorial => f.is_monotone() && !f.is_dictatorial(),
        Property::Strongdem => f.is_strongdem(),
        Property::NonGeneralizedDictatorship => {
            !f.is_dictatorial() && !f.is_generalized_dictatorship(d)?
        }
    })
}

/// Depth-first search over component tuples in lexicographic candidate
/// order. A prefix is abandoned as soon as it fails to aggregate the
/// projection of `d` onto the prefix coordinates.
pub fn brute_property(
    d: &Domain,
    property: Property,
    spec: &SearchSpaceSpec,
) -> Result<Option<Aggregator>> {
    let n = d.n();
    if let CandidateSet::AllUnanimous(k) = spec.candidates {
        let tables = (n as u128) << (1u32 << k.min(6));
        if tables > ALL_TABLE_CAP {
            return Err(Error::CapExceeded {
                what: "general table search",
                requested: tables,
                limit: ALL_TABLE_CAP,
            });
        }
    }
    let candidates = spec.candidates.functions()?;
    let prefixes = (1..=n)
        .map(|i| d.project(&(1..=i).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    let mut budget = spec.tuple_cap;
    let mut choice = vec![0usize; n];
    let mut depth = 0usize;
    loop {
        let comps: Vec<BoolFn> = choice[..=depth].iter().map(|&c| candidates[c]).collect();
        let ok = naive_check(&prefixes[depth], &comps, &mut budget)?.is_none();
        if ok && depth + 1 == n {
            let f = Aggregator::new(comps)?;
            if holds(d, &f, property)? {
                return Ok(Some(f));
            }
        }
        if ok && depth + 1 < n {
            depth += 1;
            choice[depth] = 0;
            continue;
        }
        loop {
            choice[depth] += 1;
            if choice[depth] < candidates.len() {
                break;
            }
            if depth == 0 {
                return Ok(None);
            }
            depth -= 1;
        }
    }
}

/// First non-dictatorial binary aggregator.
pub fn brute_binary(d: &Domain) -> Result<Option<Aggregator>> {
    brute_property(
        d,
        Property::NonDictatorial,
        &SearchSpaceSpec::new(CandidateSet::Binary),
    )
}

/// First ternary aggregator whose components are all symmetric.
pub fn brute_ternary_commutative(d: &Domain, allow_xor: bool) -> Result<Option<Aggregator>> {
    brute_property(
        d,
        Property::Anonymous,
        &SearchSpaceSpec::new(CandidateSet::TernaryCommutative { allow_xor }),
    )
}

/// Brute-force verdicts, in the order of [`crate::DomainClassification::verdicts`].
pub fn oracle_verdicts(d: &Domain) -> Result<Vec<(DomainClass, bool)>> {
    use DomainClass::*;
    let binary = SearchSpaceSpec::new(CandidateSet::Binary);
    let ternary = SearchSpaceSpec::new(CandidateSet::TernaryCommutative { allow_xor: true });
    let ternary_no_xor =
        SearchSpaceSpec::new(CandidateSet::TernaryCommutative { allow_xor: false });
    let closed = |f: BoolFn| -> Result<bool> {
        let agg = Aggregator::uniform(f, d.n())?;
        Ok(naive_closure_counterexample(d, &agg)?.is_none())
    };
    let xor_closed = closed(BoolFn::xor3())?;
    let possibility = xor_closed || brute_property(d, Property::NonDictatorial, &binary)?.is_some();
    let local = brute_property(d, Property::LocallyNondictatorial, &ternary)?.is_some();
    let anonymous = brute_property(d, Property::Anonymous, &ternary)?.is_some();
    let monotone = brute_property(d, Property::MonotoneNondictatorial, &binary)?.is_some();
    let strongdem = brute_property(d, Property::Strongdem, &ternary_no_xor)?.is_some();
    let non_gd = brute_property(d, Property::NonGeneralizedDictatorship, &binary)?.is_some()
        || brute_property(d, Property::NonGeneralizedDictatorship, &ternary)?.is_some();
    Ok(vec![
        (Possibility, possibility),
        (LocalPossibility, local),
        (Anonymous, anonymous),
        (MonotoneNondictatorial, monotone),
        (Strongdem, strongdem),
        (NonGeneralizedDictatorship, non_gd),
        (SystematicAnd, closed(BoolFn::and(2))?),
        (SystematicOr, closed(BoolFn::or(2))?),
        (SystematicMaj, closed(BoolFn::maj())?),
        (SystematicXor, xor_closed),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensusMode {
    /// Every non-degenerate subset of `{0,1}^n`.
    Exhaustive,
    /// `count` random subsets drawn with a seeded ChaCha generator;
    /// degenerate draws are discarded.
    Sample { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusEntry {
    pub domain_bits: Vec<String>,
    pub theory_verdicts: Vec<(DomainClass, bool)>,
    pub oracle_verdicts: Vec<(DomainClass, bool)>,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// Largest arity accepted by [`census`].
pub const CENSUS_MAX_ARITY: usize = 5;

/// Compares theory and oracle verdicts on non-degenerate domains of arity
/// `n`. Entries come back sorted by the domain's member list.
pub fn census(n: usize, mode: CensusMode) -> Result<Vec<CensusEntry>> {
    if n == 0 || n > CENSUS_MAX_ARITY {
        return Err(Error::CapExceeded {
            what: "census arity",
            requested: n as u128,
            limit: CENSUS_MAX_ARITY as u128,
        });
    }
    let points = 1u32 << n;
    let subsets: Vec<u64> = match mode {
        CensusMode::Exhaustive => {
            if n > 4 {
                return Err(Error::CapExceeded {
                    what: "exhaustive census arity",
                    requested: n as u128,
                    limit: 4,
                });
            }
            (1..1u64 << points).collect()
        }
        CensusMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out: Vec<u64> = (0..count)
                .map(|_| {
                    if points == 32 {
                        rng.gen::<u32>() as u64
                    } else {
                        rng.gen_range(1..1u64 << points)
                    }
                })
                .collect();
            out.sort_unstable();
            out.dedup();
            out
        }
    };
    let mut entries: Vec<CensusEntry> = subsets
        .par_iter()
        .filter_map(|&s| {
            let members = (0..points as u64).filter(|&p| s >> p & 1 == 1);
            let d = match Domain::from_bits(n, members) {
                Ok(d) => d,
                Err(e) => return Some(Err(e)),
            };
            if !d.is_non_degenerate() {
                return None;
            }
            Some(census_entry(&d))
        })
        .collect::<Result<_>>()?;
    entries.sort_by(|a, b| a.domain_bits.cmp(&b.domain_bits));
    Ok(entries)
}

pub fn census_entry(d: &Domain) -> Result<CensusEntry> {
    let theory: Vec<(DomainClass, bool)> = classify_domain(d, Policy::Strict)?
        .verdicts()
        .iter()
        .map(|v| (v.class, v.verdict))
        .collect();
    let oracle = oracle_verdicts(d)?;
    Ok(CensusEntry {
        domain_bits: d.members().iter().map(|&m| bit_string(m, d.n())).collect(),
        matches: theory == oracle,
        theory_verdicts: theory,
        oracle_verdicts: oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom(rows: &[&str]) -> Domain {
        Domain::from_rows(rows).unwrap()
    }

    #[test]
    fn all_unanimous_counts() {
        assert_eq!(CandidateSet::AllUnanimous(2).functions().unwrap().len(), 4);
        assert_eq!(CandidateSet::AllUnanimous(3).functions().unwrap().len(), 64);
    }

    #[test]
    fn binary_search_order() {
        let horn = dom(&["000", "010", "011", "111"]);
        let f = brute_binary(&horn).unwrap().unwrap();
        assert_eq!(f.names(), vec!["and", "and", "and"]);
        let one_hot = dom(&["100", "010", "001"]);
        assert!(brute_binary(&one_hot).unwrap().is_none());
        assert!(brute_ternary_commutative(&one_hot, true).unwrap().is_none());
    }

    #[test]
    fn naive_agrees_with_masks() {
        let d = dom(&["001", "010", "100", "111"]);
        for name in ["and", "or", "pr1"] {
            let f = Aggregator::uniform(BoolFn::named(name, 2).unwrap(), 3).unwrap();
            assert_eq!(
                naive_closure_counterexample(&d, &f).unwrap().is_none(),
                f.is_aggregator(&d).unwrap()
            );
        }
    }

    #[test]
    fn census_is_deterministic() {
        let a = census(3, CensusMode::Sample { count: 40, seed: 7 }).unwrap();
        let b = census(3, CensusMode::Sample { count: 40, seed: 7 }).unwrap();
        assert_eq!(a, b);
    }
}
