//! Domain classification. Witnesses are built from synthesized
//! constraints and then checked, never searched for.

use serde::Serialize;

use super::{Aggregator, BoolFn, Counterexample};
use crate::domain::{Domain, Policy};
use crate::error::{Error, Result};
use crate::formula::Assignment;
use crate::recognize::{LpicWitness, RphWitness, SeparabilityWitness};
use crate::synthesize::{
    analyze_pic, lpic_for, pic_for, SynthesisClass, SynthesisResult, SynthesisWitness,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainClass {
    Possibility,
    LocalPossibility,
    Anonymous,
    MonotoneNondictatorial,
    Strongdem,
    NonGeneralizedDictatorship,
    SystematicAnd,
    SystematicOr,
    SystematicMaj,
    SystematicXor,
}

impl DomainClass {
    pub fn label(self) -> &'static str {
        match self {
            DomainClass::Possibility => "possibility",
            DomainClass::LocalPossibility => "local-possibility",
            DomainClass::Anonymous => "anonymous",
            DomainClass::MonotoneNondictatorial => "monotone-nondictatorial",
            DomainClass::Strongdem => "strongdem",
            DomainClass::NonGeneralizedDictatorship => "non-generalized-dictatorship",
            DomainClass::SystematicAnd => "systematic-and",
            DomainClass::SystematicOr => "systematic-or",
            DomainClass::SystematicMaj => "systematic-maj",
            DomainClass::SystematicXor => "systematic-xor",
        }
    }
}

/// One verdict. `method` names the construction behind a positive verdict
/// or the refutation behind a negative one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassVerdict {
    pub class: DomainClass,
    pub verdict: bool,
    pub witness: Option<Aggregator>,
    pub method: &'static str,
    pub counterexample: Option<Counterexample>,
}

impl ClassVerdict {
    fn yes(class: DomainClass, witness: Aggregator, method: &'static str) -> Self {
        ClassVerdict {
            class,
            verdict: true,
            witness: Some(witness),
            method,
            counterexample: None,
        }
    }

    fn no(class: DomainClass, method: &'static str) -> Self {
        ClassVerdict {
            class,
            verdict: false,
            witness: None,
            method,
            counterexample: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DomainClassification {
    pub possibility: ClassVerdict,
    pub local_possibility: ClassVerdict,
    pub anonymous: ClassVerdict,
    pub monotone_nondictatorial: ClassVerdict,
    pub strongdem: ClassVerdict,
    pub non_generalized_dictatorship: ClassVerdict,
    /// Closure under ∧, ∨, maj and ⊕, in that order.
    pub systematic_family: Vec<ClassVerdict>,
    pub pic: Option<SynthesisResult>,
    pub lpic: Option<SynthesisResult>,
    pub fixed_coordinates: Vec<(usize, bool)>,
}

impl DomainClassification {
    pub fn verdicts(&self) -> Vec<&ClassVerdict> {
        let mut out = vec![
            &self.possibility,
            &self.local_possibility,
            &self.anonymous,
            &self.monotone_nondictatorial,
            &self.strongdem,
            &self.non_generalized_dictatorship,
        ];
        out.extend(&self.systematic_family);
        out
    }

    fn verdicts_mut(&mut self) -> Vec<&mut ClassVerdict> {
        let mut out = vec![
            &mut self.possibility,
            &mut self.local_possibility,
            &mut self.anonymous,
            &mut self.monotone_nondictatorial,
            &mut self.strongdem,
            &mut self.non_generalized_dictatorship,
        ];
        out.extend(&mut self.systematic_family);
        out
    }
}

/// `pr1` on the first part, `pr2` on the second.
pub fn binary_witness_from_separable(n: usize, w: &SeparabilityWitness) -> Result<Aggregator> {
    let pr1 = BoolFn::projection(1, 2)?;
    let pr2 = BoolFn::projection(2, 2)?;
    let mut comps = vec![pr1; n];
    for &v in &w.part2 {
        comps[v as usize - 1] = pr2;
    }
    Aggregator::new(comps)
}

/// `∨` on renamed variables, `∧` on the rest of the admissible set, `pr1`
/// elsewhere.
pub fn binary_witness_from_rph(n: usize, w: &RphWitness) -> Result<Aggregator> {
    let mut comps = vec![BoolFn::projection(1, 2)?; n];
    for &v in &w.admissible {
        comps[v as usize - 1] = BoolFn::and(2);
    }
    for &v in &w.renamed {
        comps[v as usize - 1] = BoolFn::or(2);
    }
    Aggregator::new(comps)
}

/// `∨3` on renamed variables, `∧3` on the rest of `V0`, `maj` on `V1` and
/// `⊕` on `V2`.
pub fn ternary_witness_from_lpic(n: usize, w: &LpicWitness) -> Result<Aggregator> {
    let mut comps = vec![BoolFn::maj(); n];
    for &v in &w.v0 {
        comps[v as usize - 1] = BoolFn::and(3);
    }
    for &v in &w.renamed {
        comps[v as usize - 1] = BoolFn::or(3);
    }
    for &v in &w.v2 {
        comps[v as usize - 1] = BoolFn::xor3();
    }
    Aggregator::new(comps)
}

fn ensure(d: &Domain, f: &Aggregator, property: bool, what: &str) -> Result<()> {
    if let Some(cex) = f.check_aggregator(d)? {
        return Err(Error::Internal(format!(
            "{what} witness {f} is not an aggregator: {cex}"
        )));
    }
    if !property {
        return Err(Error::Internal(format!(
            "{what} witness {f} lacks the property"
        )));
    }
    Ok(())
}

/// Classifies `d`. Under [`Policy::Permissive`] a degenerate domain is
/// classified on its free coordinates and the witnesses are lifted back with
/// `∧` components on the fixed ones.
pub fn classify_domain(d: &Domain, policy: Policy) -> Result<DomainClassification> {
    if d.len() < 2 {
        return Err(Error::TooFewMembers {
            size: d.len(),
            needed: 2,
        });
    }
    let report = d.check_policy(policy)?;
    if report.non_degenerate {
        return classify_core(d);
    }
    let (reduced, free, fixed) = d.reduce();
    let reduced = reduced.expect("distinct members differ on some coordinate");
    let mut c = classify_core(&reduced)?;
    for v in c.verdicts_mut() {
        if let Some(w) = &v.witness {
            v.witness = Some(lift_aggregator(w, d.n(), &free)?);
        }
        if let Some(cex) = &v.counterexample {
            v.counterexample = Some(lift_counterexample(cex, d.n(), &free, &fixed)?);
        }
    }
    c.pic = pic_for(d, Policy::Permissive)?;
    c.lpic = lpic_for(d, Policy::Permissive)?;
    c.fixed_coordinates = fixed;
    for v in c.verdicts() {
        if let Some(w) = &v.witness {
            ensure(d, w, true, v.class.label())?;
        }
    }
    Ok(c)
}

fn lift_aggregator(f: &Aggregator, n: usize, free: &[usize]) -> Result<Aggregator> {
    let mut comps = vec![BoolFn::and(f.arity()); n];
    for (i, &j) in free.iter().enumerate() {
        comps[j - 1] = f.components()[i];
    }
    Aggregator::new(comps)
}

fn lift_counterexample(
    c: &Counterexample,
    n: usize,
    free: &[usize],
    fixed: &[(usize, bool)],
) -> Result<Counterexample> {
    let lift = |a: &Assignment| {
        let mut values = vec![false; n];
        for &(j, b) in fixed {
            values[j - 1] = b;
        }
        for (i, &j) in free.iter().enumerate() {
            values[j - 1] = a.get(i + 1);
        }
        Assignment::from_bools(&values)
    };
    Ok(Counterexample {
        inputs: c.inputs.iter().map(lift).collect::<Result<_>>()?,
        output: lift(&c.output)?,
    })
}

fn classify_core(d: &Domain) -> Result<DomainClassification> {
    use DomainClass::*;
    let n = d.n();
    let analysis = analyze_pic(d)?;
    let pic = pic_for(d, Policy::Strict)?;
    let lpic = lpic_for(d, Policy::Strict)?;

    let binary = match (&analysis.separable, &analysis.renamable_partially_horn) {
        (Some(w), _) => Some((binary_witness_from_separable(n, w)?, "separable")),
        (None, Some(w)) => Some((binary_witness_from_rph(n, w)?, "renamable-partially-horn")),
        (None, None) => None,
    };
    if pic.is_some() != (analysis.affine || binary.is_some()) {
        return Err(Error::Internal(
            "possibility synthesis disagrees with the prime formula analysis".into(),
        ));
    }

    let possibility = match &pic {
        None => ClassVerdict::no(Possibility, "pic-synthesis-reject"),
        Some(r) => {
            let (w, method) = match &r.witness {
                SynthesisWitness::Separable(w) => {
                    (binary_witness_from_separable(n, w)?, "separable")
                }
                SynthesisWitness::RenamablePartiallyHorn(w) => {
                    (binary_witness_from_rph(n, w)?, "renamable-partially-horn")
                }
                _ => (Aggregator::uniform(BoolFn::xor3(), n)?, "affine"),
            };
            ensure(d, &w, !w.is_dictatorial(), "possibility")?;
            ClassVerdict::yes(Possibility, w, method)
        }
    };

    let monotone_nondictatorial = match &binary {
        Some((w, method)) => {
            ensure(d, w, w.is_monotone() && !w.is_dictatorial(), "monotone")?;
            ClassVerdict::yes(MonotoneNondictatorial, w.clone(), method)
        }
        None => ClassVerdict::no(MonotoneNondictatorial, "not-separable-or-rph"),
    };

    let lpic_witness = match &lpic {
        Some(SynthesisResult {
            witness: SynthesisWitness::Lpic(w),
            ..
        }) => Some(w),
        Some(_) => {
            return Err(Error::Internal(
                "lpic synthesis returned a non-lpic witness".into(),
            ))
        }
        None => None,
    };
    let ternary = lpic_witness
        .map(|w| ternary_witness_from_lpic(n, w))
        .transpose()?;
    let (local_possibility, anonymous, strongdem) = match (&ternary, lpic_witness) {
        (Some(t), Some(w)) => {
            ensure(d, t, t.is_locally_nondictatorial(), "local possibility")?;
            ensure(d, t, t.is_anonymous(), "anonymous")?;
            let strongdem = if w.v2.is_empty() {
                ensure(d, t, t.is_strongdem(), "strongdem")?;
                ClassVerdict::yes(Strongdem, t.clone(), "parity-free-lpic")
            } else {
                ClassVerdict::no(Strongdem, "lpic-needs-parity-part")
            };
            (
                ClassVerdict::yes(LocalPossibility, t.clone(), "lpic"),
                ClassVerdict::yes(Anonymous, t.clone(), "lpic"),
                strongdem,
            )
        }
        _ => (
            ClassVerdict::no(LocalPossibility, "lpic-synthesis-reject"),
            ClassVerdict::no(Anonymous, "lpic-synthesis-reject"),
            ClassVerdict::no(Strongdem, "lpic-synthesis-reject"),
        ),
    };

    let non_generalized_dictatorship = if !possibility.verdict {
        ClassVerdict::no(NonGeneralizedDictatorship, "not-a-possibility-domain")
    } else if d.len() < 3 {
        ClassVerdict::no(NonGeneralizedDictatorship, "two-member-domain")
    } else {
        let binary_witness = binary.as_ref().map(|(w, _)| w);
        let (w, method, cex) = non_gd_witness(d, binary_witness, analysis.affine)?;
        ensure(d, &w, true, "non-generalized-dictatorship")?;
        ClassVerdict {
            class: NonGeneralizedDictatorship,
            verdict: true,
            witness: Some(w),
            method,
            counterexample: Some(cex),
        }
    };

    let systematic_family = [
        (SystematicAnd, BoolFn::and(2)),
        (SystematicOr, BoolFn::or(2)),
        (SystematicMaj, BoolFn::maj()),
        (SystematicXor, BoolFn::xor3()),
    ]
    .into_iter()
    .map(|(class, f)| {
        let agg = Aggregator::uniform(f, n)?;
        Ok(match agg.check_aggregator(d)? {
            None => ClassVerdict::yes(class, agg, "closure"),
            Some(cex) => ClassVerdict {
                counterexample: Some(cex),
                ..ClassVerdict::no(class, "closure-counterexample")
            },
        })
    })
    .collect::<Result<Vec<_>>>()?;

    let c = DomainClassification {
        possibility,
        local_possibility,
        anonymous,
        monotone_nondictatorial,
        strongdem,
        non_generalized_dictatorship,
        systematic_family,
        pic,
        lpic,
        fixed_coordinates: Vec::new(),
    };
    debug_assert!(pic_lpic_consistent(&c));
    Ok(c)
}

fn pic_lpic_consistent(c: &DomainClassification) -> bool {
    let lpd_class = c.lpic.as_ref().map(|r| r.class);
    (lpd_class.is_none() || lpd_class == Some(SynthesisClass::Lpic))
        && (!c.local_possibility.verdict || c.possibility.verdict)
}

/// Aggregator for a possibility domain with at least three members whose
/// output is, on some input, none of its inputs.
fn non_gd_witness(
    d: &Domain,
    binary: Option<&Aggregator>,
    affine: bool,
) -> Result<(Aggregator, &'static str, Counterexample)> {
    let n = d.n();
    if affine {
        let minority = Aggregator::uniform(BoolFn::xor3(), n)?;
        if let Some(cex) = minority.generalized_dictatorship_violation(d)? {
            return Ok((minority, "affine-minority", cex));
        }
    }
    let Some(f) = binary else {
        return Err(Error::Internal(
            "possibility domain without a usable witness".into(),
        ));
    };
    if let Some(cex) = f.generalized_dictatorship_violation(d)? {
        let method = if f.components().iter().all(BoolFn::is_symmetric) {
            "symmetric-binary"
        } else {
            "non-symmetric-binary"
        };
        return Ok((f.clone(), method, cex));
    }
    if !f.components().iter().all(BoolFn::is_symmetric) {
        return Err(Error::Internal(format!(
            "non-symmetric binary aggregator {f} is a generalized dictatorship"
        )));
    }
    // f is a symmetric generalized dictatorship. Renaming the ∨ coordinates
    // turns it into ∧̄, under which the renamed members form a chain.
    let or = BoolFn::or(2);
    let j: Vec<usize> = (1..=n).filter(|&i| f.components()[i - 1] == or).collect();
    let renamed = d.rename(&j)?;
    let mut chain = renamed.members().to_vec();
    chain.sort_by_key(|m| m.count_ones());
    if chain.windows(2).any(|w| w[0] & !w[1] != 0) {
        return Err(Error::Internal("renamed members are not a chain".into()));
    }
    let top = chain[chain.len() - 1];
    let below = chain[chain.len() - 2];
    let only_top = top & !below;
    let comps = (1..=n)
        .map(|i| {
            if only_top >> (n - i) & 1 == 1 {
                BoolFn::and(2)
            } else {
                BoolFn::or(2)
            }
        })
        .collect();
    let g = Aggregator::new(comps)?.dualize(&j)?;
    match g.generalized_dictatorship_violation(d)? {
        Some(cex) => Ok((g, "total-order", cex)),
        None => Err(Error::Internal(format!(
            "total-order construction {g} is a generalized dictatorship"
        ))),
    }
}
