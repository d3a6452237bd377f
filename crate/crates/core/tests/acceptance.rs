//! Acceptance suite, run without the libtest harness so that each criterion
//! prints one PASS/FAIL line even when everything passes. Exits non-zero if
//! any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use possdom::aggregate::{classify_domain, Aggregator, BoolFn};
use possdom::formula::parse_formula;
use possdom::oracle::{self, CensusMode};
use possdom::recognize::{
    check_lpic, check_partially_horn, check_pic, check_renamable_horn,
    check_renamable_partially_horn, check_separable, check_syntactic_class, classify_formula,
    verify_lpic, verify_rph,
};
use possdom::synthesize::{lpic_for, pic_for, prime_cnf, SynthesisWitness};
use possdom::{Clause, Domain, Formula, Literal, Policy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check, Duration);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

const PHI: [&str; 14] = [
    "p ecnf 5 3\n1 2 -3 0\n-1 3 4 0\n-2 3 -5 0\n",
    "p ecnf 5 3\n-1 2 3 4 0\n1 -2 -3 0\n4 5 0\n",
    "p ecnf 5 3\n-1 2 3 0\n1 -2 -3 0\n4 5 0\n",
    "p ecnf 4 4\n1 -2 0\n-1 2 0\n-2 -3 0\n-1 3 4 0\n",
    "p ecnf 4 3\n1 -2 0\n2 -3 0\n-1 3 4 0\n",
    "p ecnf 5 3\n-1 2 3 4 0\n1 -2 -3 0\n-4 5 0\n",
    "p ecnf 3 2\n-1 2 3 0\n1 -2 -3 0\n",
    "p ecnf 4 2\n-1 2 3 4 0\n-2 -3 -4 0\n",
    "p ecnf 6 4\n-1 2 3 0\n1 -2 -3 0\n-4 5 6 0\n4 -5 -6 0\n",
    "p ecnf 3 2\n-1 2 3 0\n1 2 -3 0\n",
    "p ecnf 3 4\n1 -2 -3 0\n-1 2 -3 0\n-1 -2 3 0\n-1 -2 -3 0\n",
    "p ecnf 3 3\n-1 2 0\n2 -3 0\n-1 -2 3 0\n",
    "p ecnf 4 2\n-1 2 0\n2 3 4 0\n",
    "p ecnf 3 1\nx 1 2 3 0\n",
];

fn phi(i: usize) -> Formula {
    parse_formula(PHI[i - 1]).unwrap()
}

fn model_set(i: usize) -> Domain {
    phi(i).models().unwrap()
}

fn agg(names: &[&str], k: usize) -> Aggregator {
    Aggregator::from_names(names, k).unwrap()
}

fn criterion_1() -> Check {
    for i in [1, 2, 3, 4, 5, 6, 7, 8, 14] {
        ok(classify_formula(&phi(i)))?;
    }
    ensure!(
        ok(check_renamable_horn(&phi(1)))?.is_some(),
        "φ1 should be renamable Horn"
    );
    for i in [2, 3] {
        ensure!(
            ok(check_partially_horn(&phi(i)))?.is_none(),
            "φ{i} should not be partially Horn"
        );
        let w = ok(check_renamable_partially_horn(&phi(i)))?;
        ensure!(
            w.as_ref().is_some_and(|w| w.admissible.contains(&4)),
            "φ{i} should be renamable partially Horn through x4, got {w:?}"
        );
    }
    let sep = ok(check_separable(&phi(3)))?;
    ensure!(
        sep.as_ref()
            .is_some_and(|w| w.part1 == [1, 2, 3] && w.part2 == [4, 5]),
        "φ3 parts: {sep:?}"
    );
    ensure!(
        ok(check_partially_horn(&phi(4)))?.is_some(),
        "φ4 should be partially Horn"
    );
    ensure!(
        ok(check_partially_horn(&phi(5)))?.is_none(),
        "φ5 should not be partially Horn"
    );
    let w6 = ok(check_renamable_partially_horn(&phi(6)))?;
    ensure!(
        w6.as_ref().is_some_and(|w| w.admissible == [4, 5]),
        "φ6 admissible set: {w6:?}"
    );
    ensure!(
        ok(check_renamable_partially_horn(&phi(7)))?.is_none(),
        "φ7 should not be rph"
    );
    ensure!(!ok(check_pic(&phi(7)))?.is_pic(), "φ7 should not be a pic");
    ensure!(ok(check_pic(&phi(8)))?.is_pic(), "φ8 should be a pic");
    ensure!(
        ok(check_lpic(&phi(8)))?.is_none(),
        "φ8 should not be an lpic"
    );
    ensure!(
        check_syntactic_class(&phi(14)).affine,
        "φ14 should be affine"
    );
    Ok(())
}

fn criterion_2() -> Check {
    let d7 = model_set(7);
    let c7 = ok(classify_domain(&d7, Policy::Strict))?;
    ensure!(
        !c7.possibility.verdict,
        "Mod(φ7) should be an impossibility domain"
    );
    let mut binary_tuples = 0;
    let fns = ["and", "or", "pr1", "pr2"];
    for a in fns {
        for b in fns {
            for c in fns {
                binary_tuples += 1;
                let f = agg(&[a, b, c], 2);
                if !f.is_dictatorial() {
                    ensure!(!ok(f.is_aggregator(&d7))?, "{f} aggregates Mod(φ7)");
                }
            }
        }
    }
    ensure!(binary_tuples == 64, "expected 4³ binary tuples");
    ensure!(!ok(d7.is_affine())?, "Mod(φ7) should not be closed under ⊕");
    ensure!(
        ok(oracle::brute_binary(&d7))?.is_none(),
        "oracle found a binary aggregator for Mod(φ7)"
    );

    let c9 = ok(classify_domain(&model_set(9), Policy::Strict))?;
    ensure!(
        c9.possibility.verdict && !c9.local_possibility.verdict,
        "Mod(φ9) verdicts"
    );

    let d10 = model_set(10);
    let mixed = agg(&["and", "or", "and"], 2);
    ensure!(
        ok(mixed.is_aggregator(&d10))?,
        "(∧,∨,∧) should aggregate Mod(φ10)"
    );
    let c10 = ok(classify_domain(&d10, Policy::Strict))?;
    ensure!(
        c10.local_possibility.verdict,
        "Mod(φ10) should be a local possibility domain"
    );

    let d11 = model_set(11);
    let and = Aggregator::uniform(BoolFn::and(2), 3).unwrap();
    ensure!(ok(and.is_aggregator(&d11))?, "∧̄ should aggregate Mod(φ11)");
    ensure!(
        !ok(and.is_generalized_dictatorship(&d11))?,
        "∧̄ is a generalized dictatorship on Mod(φ11)"
    );

    let d12 = model_set(12);
    let g = agg(&["and", "or", "or"], 2);
    ensure!(
        ok(g.is_aggregator(&d12))?,
        "(∧,∨,∨) should aggregate Mod(φ12)"
    );
    ensure!(
        !ok(g.is_generalized_dictatorship(&d12))?,
        "(∧,∨,∨) is a generalized dictatorship"
    );
    ensure!(ok(and.is_aggregator(&d12))?, "∧̄ should aggregate Mod(φ12)");
    ensure!(
        ok(and.is_generalized_dictatorship(&d12))?,
        "∧̄ should be a generalized dictatorship on Mod(φ12)"
    );
    let c12 = ok(classify_domain(&d12, Policy::Strict))?;
    ensure!(
        c12.non_generalized_dictatorship.verdict,
        "Mod(φ12) non-generalized-dictatorship verdict"
    );

    let d13 = model_set(13);
    let h = agg(&["and3", "or3", "maj", "maj"], 3);
    ensure!(
        ok(h.is_aggregator(&d13))?,
        "(∧3,∨3,maj,maj) should aggregate Mod(φ13)"
    );

    let c14 = ok(classify_domain(&model_set(14), Policy::Strict))?;
    ensure!(
        c14.anonymous.verdict && !c14.monotone_nondictatorial.verdict && !c14.strongdem.verdict,
        "Mod(φ14) verdicts"
    );
    Ok(())
}

fn criterion_3() -> Check {
    let entries = ok(oracle::census(3, CensusMode::Exhaustive))?;
    ensure!(
        entries.len() == 193,
        "expected 193 non-degenerate domains, got {}",
        entries.len()
    );
    let bad: Vec<_> = entries.iter().filter(|e| !e.matches).collect();
    ensure!(
        bad.is_empty(),
        "{} mismatches, first {:?}",
        bad.len(),
        bad.first()
    );
    Ok(())
}

fn all_domains(n: usize) -> impl Iterator<Item = Domain> {
    let points = 1u64 << n;
    (1u64..1 << points).filter_map(move |s| {
        let d = Domain::from_bits(n, (0..points).filter(|&p| s >> p & 1 == 1)).unwrap();
        d.is_non_degenerate().then_some(d)
    })
}

fn criterion_4() -> Check {
    let (mut pic_count, mut lpic_count) = (0, 0);
    for d in all_domains(3) {
        if let Some(r) = ok(pic_for(&d, Policy::Strict))? {
            pic_count += 1;
            ensure!(
                ok(r.formula.models())? == d,
                "pic models differ for {:?}",
                d.members()
            );
            let report = ok(check_pic(&r.formula))?;
            ensure!(
                report.is_pic(),
                "pic recognizer rejects output for {:?}",
                d.members()
            );
            match &r.witness {
                SynthesisWitness::RenamablePartiallyHorn(w) => {
                    ensure!(
                        ok(verify_rph(&r.formula, w))?,
                        "rph witness fails for {:?}",
                        d.members()
                    )
                }
                SynthesisWitness::Separable(_) => {
                    ensure!(
                        report.separable.is_some(),
                        "separable output not recognized"
                    )
                }
                SynthesisWitness::Affine => ensure!(report.affine, "affine output not recognized"),
                SynthesisWitness::Lpic(_) => return Err("pic_for returned an lpic witness".into()),
            }
        }
        if let Some(r) = ok(lpic_for(&d, Policy::Strict))? {
            lpic_count += 1;
            ensure!(
                ok(r.formula.models())? == d,
                "lpic models differ for {:?}",
                d.members()
            );
            let w = ok(check_lpic(&r.formula))?;
            ensure!(
                w.as_ref()
                    .is_some_and(|w| verify_lpic(&r.formula, w).unwrap_or(false)),
                "lpic recognizer rejects output for {:?}",
                d.members()
            );
        }
    }
    ensure!(pic_count > 0 && lpic_count > 0, "no synthesis accepted");
    Ok(())
}

fn criterion_5() -> Check {
    for k in 2..=4 {
        for table in 0..1u64 << (1 << k) {
            let f = ok(BoolFn::from_table(k, table))?;
            if f.is_anonymous() && f.is_monotone() {
                ensure!(f.is_one_immune(), "anonymous monotone {f} is not 1-immune");
            }
        }
    }
    for k in [3usize, 5] {
        for c0 in [false, true] {
            for mask in 0..1u32 << k {
                let coeffs: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
                let f = ok(BoolFn::linear(c0, &coeffs))?;
                let support = mask.count_ones();
                ensure!(
                    f.is_unanimous() == (!c0 && support % 2 == 1),
                    "unanimity of linear c0={c0} mask={mask:b}"
                );
                if f.is_unanimous() && support >= 3 {
                    ensure!(
                        !f.is_monotone() && !f.is_one_immune(),
                        "linear {f} is monotone or 1-immune"
                    );
                }
            }
        }
    }
    Ok(())
}

fn random_cnf(vars: u32, clauses: usize, seed: u64) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cs = (0..clauses)
        .map(|_| {
            let mut picked: Vec<u32> = Vec::with_capacity(3);
            while picked.len() < 3 {
                let v = rng.gen_range(1..=vars);
                if !picked.contains(&v) {
                    picked.push(v);
                }
            }
            let lits = picked
                .into_iter()
                .map(|v| {
                    if rng.gen() {
                        Literal::pos(v)
                    } else {
                        Literal::neg(v)
                    }
                })
                .collect();
            Clause::or(lits).unwrap()
        })
        .collect();
    Formula::new(vars as usize, cs).unwrap()
}

fn criterion_6() -> Check {
    let f = random_cnf(10_000, 100_000, 6);
    let limit = Duration::from_secs(2);
    let t = Instant::now();
    ok(check_separable(&f))?;
    let sep = t.elapsed();
    ensure!(sep < limit, "check_separable took {sep:?}");
    let t = Instant::now();
    ok(check_renamable_partially_horn(&f))?;
    let rph = t.elapsed();
    ensure!(rph < limit, "check_renamable_partially_horn took {rph:?}");

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut members = std::collections::BTreeSet::new();
    while members.len() < 200 {
        members.insert(rng.gen_range(0..1u64 << 10));
    }
    let d = ok(Domain::from_bits(10, members))?;
    let t = Instant::now();
    let p = ok(prime_cnf(&d))?;
    let prime = t.elapsed();
    ensure!(prime < Duration::from_secs(10), "prime_cnf took {prime:?}");
    ensure!(p.prime_certified, "prime_cnf output not certified prime");
    ensure!(
        ok(p.formula.models())? == d,
        "prime_cnf output has the wrong models"
    );
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("example formula suite", criterion_1, Duration::from_secs(1)),
        ("example domain suite", criterion_2, Duration::from_secs(5)),
        (
            "exhaustive n=3 census",
            criterion_3,
            Duration::from_secs(60),
        ),
        ("synthesis round-trip", criterion_4, Duration::from_secs(60)),
        (
            "function-predicate exhaustives",
            criterion_5,
            Duration::from_secs(30),
        ),
        ("performance", criterion_6, Duration::from_secs(20)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let mut result = run();
        let elapsed = t.elapsed();
        if result.is_ok() && elapsed > budget {
            result = Err(format!("took {elapsed:?}, budget {budget:?}"));
        }
        match result {
            Ok(()) => println!("criterion {}: PASS {name} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 6 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
