//! Classification against brute force, and aggregator algebra on census
//! domains.

use possdom::aggregate::{classify_domain, Aggregator, BoolFn, DomainClassification};
use possdom::oracle::{self, CandidateSet, CensusMode, Property, SearchSpaceSpec};
use possdom::{Domain, Policy};

fn non_degenerate(n: usize) -> Vec<Domain> {
    let points = 1u64 << n;
    (1u64..1 << points)
        .map(|s| Domain::from_bits(n, (0..points).filter(|&p| s >> p & 1 == 1)).unwrap())
        .filter(Domain::is_non_degenerate)
        .collect()
}

#[test]
fn census_n2_and_n3_match() {
    for n in [2, 3] {
        let entries = oracle::census(n, CensusMode::Exhaustive).unwrap();
        assert!(entries.iter().all(|e| e.matches), "n={n}");
    }
}

#[test]
fn census_n4_sample_matches() {
    let entries = oracle::census(
        4,
        CensusMode::Sample {
            count: 2000,
            seed: 1,
        },
    )
    .unwrap();
    assert!(entries.len() > 1500);
    let bad: Vec<_> = entries.iter().filter(|e| !e.matches).collect();
    assert!(bad.is_empty(), "{bad:?}");
}

fn coherent(d: &Domain, c: &DomainClassification) {
    let v = |x: &possdom::aggregate::ClassVerdict| x.verdict;
    assert_eq!(v(&c.local_possibility), v(&c.anonymous));
    if v(&c.local_possibility) || v(&c.monotone_nondictatorial) {
        assert!(v(&c.possibility));
    }
    if v(&c.strongdem) {
        assert!(v(&c.local_possibility));
    }
    assert_eq!(
        v(&c.non_generalized_dictatorship),
        v(&c.possibility) && d.len() >= 3
    );
    if c.systematic_family.iter().any(|s| s.verdict) {
        assert!(v(&c.possibility));
    }
    for verdict in c.verdicts() {
        assert_eq!(
            verdict.verdict,
            verdict.witness.is_some(),
            "{:?}",
            verdict.class
        );
        if let Some(w) = &verdict.witness {
            assert!(w.is_aggregator(d).unwrap());
        }
    }
}

#[test]
fn classifications_are_coherent_on_n3() {
    for d in non_degenerate(3) {
        let c = classify_domain(&d, Policy::Strict).unwrap();
        coherent(&d, &c);
    }
}

#[test]
fn minority_is_not_a_generalized_dictatorship_on_affine_domains() {
    let minority = Aggregator::uniform(BoolFn::xor3(), 3).unwrap();
    let mut seen = 0;
    for d in non_degenerate(3) {
        if d.is_affine().unwrap() && d.len() >= 3 {
            seen += 1;
            assert!(
                !minority.is_generalized_dictatorship(&d).unwrap(),
                "{:?}",
                d.members()
            );
        }
    }
    assert!(seen > 0);
}

#[test]
fn diamond_and_star_preserve_aggregation() {
    for d in non_degenerate(3) {
        let n = d.n();
        let mut ternary: Vec<Aggregator> = (1..=3)
            .map(|i| Aggregator::uniform(BoolFn::projection(i, 3).unwrap(), n).unwrap())
            .collect();
        let c = classify_domain(&d, Policy::Strict).unwrap();
        if let Some(w) = &c.local_possibility.witness {
            ternary.push(w.clone());
        }
        for f in ["and3", "or3", "maj", "xor3"] {
            let u = Aggregator::uniform(BoolFn::named(f, 3).unwrap(), n).unwrap();
            if u.is_aggregator(&d).unwrap() {
                ternary.push(u);
            }
        }
        for f in &ternary {
            for g in &ternary {
                assert!(f.diamond(g).unwrap().is_aggregator(&d).unwrap());
                assert!(f.star(g).unwrap().is_aggregator(&d).unwrap());
            }
        }
    }
}

#[test]
fn oracle_results_satisfy_their_property() {
    let cases = [
        (Property::NonDictatorial, CandidateSet::Binary),
        (Property::MonotoneNondictatorial, CandidateSet::Binary),
        (
            Property::Anonymous,
            CandidateSet::TernaryCommutative { allow_xor: true },
        ),
        (
            Property::Strongdem,
            CandidateSet::TernaryCommutative { allow_xor: false },
        ),
        (
            Property::LocallyNondictatorial,
            CandidateSet::AllUnanimous(3),
        ),
    ];
    for d in non_degenerate(3).into_iter().step_by(7) {
        for (property, candidates) in &cases {
            let spec = SearchSpaceSpec::new(candidates.clone());
            if let Some(f) = oracle::brute_property(&d, *property, &spec).unwrap() {
                assert!(f.is_aggregator(&d).unwrap());
                let holds = match property {
                    Property::NonDictatorial => !f.is_dictatorial(),
                    Property::MonotoneNondictatorial => f.is_monotone() && !f.is_dictatorial(),
                    Property::Anonymous => f.is_anonymous(),
                    Property::Strongdem => f.is_strongdem(),
                    Property::LocallyNondictatorial => f.is_locally_nondictatorial(),
                    Property::NonGeneralizedDictatorship => unreachable!(),
                };
                assert!(holds, "{property:?} {f}");
            }
        }
    }
}

#[test]
fn general_ternary_search_agrees_with_commutative_search() {
    // Any locally non-dictatorial ternary aggregator implies a commutative one.
    for d in non_degenerate(3) {
        let general = oracle::brute_property(
            &d,
            Property::LocallyNondictatorial,
            &SearchSpaceSpec::new(CandidateSet::AllUnanimous(3)),
        )
        .unwrap();
        let commutative = oracle::brute_ternary_commutative(&d, true).unwrap();
        assert_eq!(
            general.is_some(),
            commutative.is_some(),
            "{:?}",
            d.members()
        );
    }
}

#[test]
fn permissive_classification_lifts_to_degenerate_domains() {
    let points = 8u64;
    for s in 1u64..1 << points {
        let d = Domain::from_bits(3, (0..points).filter(|&p| s >> p & 1 == 1)).unwrap();
        if d.is_non_degenerate() || d.len() < 2 {
            continue;
        }
        assert!(classify_domain(&d, Policy::Strict).is_err());
        let c = classify_domain(&d, Policy::Permissive).unwrap();
        assert!(!c.fixed_coordinates.is_empty());
        coherent(&d, &c);
        if let Some(r) = &c.pic {
            assert_eq!(r.formula.models().unwrap(), d);
        }
    }
}
