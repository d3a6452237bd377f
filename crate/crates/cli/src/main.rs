use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use possdom::aggregate::{classify_domain, parse_aggregator, ClassVerdict, Counterexample};
use possdom::domain::{parse_domain, render_domain};
use possdom::formula::{parse_formula, render_formula};
use possdom::oracle::{self, CandidateSet, CensusMode, Property, SearchSpaceSpec};
use possdom::recognize::classify_formula;
use possdom::synthesize::{lpic_for, pic_for};
use possdom::{Aggregator, Domain, Error, Policy, DEFAULT_MODEL_CAP, DEFAULT_TUPLE_CAP};

#[derive(Parser)]
#[command(
    name = "possdom",
    version,
    about = "Possibility domains and integrity constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every syntactic recognizer on an extended-DIMACS formula.
    ClassifyFormula {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Decide which kinds of non-dictatorial aggregators a domain admits.
    ClassifyDomain {
        file: PathBuf,
        /// Print witness aggregators and counterexamples.
        #[arg(long)]
        witness: bool,
        /// Drop fixed coordinates instead of rejecting degenerate domains.
        #[arg(long)]
        permissive: bool,
        #[arg(long)]
        json: bool,
    },
    /// Build an integrity constraint whose models are the domain.
    Synthesize {
        file: PathBuf,
        /// Build a local possibility integrity constraint.
        #[arg(long)]
        lpic: bool,
        #[arg(long)]
        permissive: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the models of a formula as a domain file.
    Models {
        file: PathBuf,
        /// Largest variable count to enumerate.
        #[arg(long, default_value_t = DEFAULT_MODEL_CAP)]
        cap: usize,
    },
    #[command(subcommand)]
    Aggregator(AggregatorCommand),
    /// Compare classification verdicts with brute-force search.
    Census {
        n: usize,
        /// Draw this many random subsets instead of enumerating all.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum AggregatorCommand {
    /// Check an aggregator file against a domain.
    Check {
        domain: PathBuf,
        aggregator: PathBuf,
        /// Largest number of argument tuples to visit.
        #[arg(long, default_value_t = DEFAULT_TUPLE_CAP)]
        cap: u128,
        #[arg(long)]
        json: bool,
    },
    /// Search for an aggregator by brute force.
    Find {
        domain: PathBuf,
        #[arg(long, value_enum)]
        kind: FindKind,
        #[arg(long, default_value_t = oracle::ORACLE_TUPLE_CAP)]
        cap: u128,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FindKind {
    Binary,
    TernaryCommutative,
    Strongdem,
    Anonymous,
}

#[derive(Debug)]
enum Failure {
    Io(PathBuf, std::io::Error),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<bool, Failure>;

/// One output row. The JSON keys are stable.
#[derive(Serialize)]
struct Row {
    class: String,
    verdict: bool,
    witness: Value,
    method: String,
    counterexample: Option<Counterexample>,
}

impl Row {
    fn new(class: &str, verdict: bool, witness: Value, method: &str) -> Self {
        Row {
            class: class.to_string(),
            verdict,
            witness,
            method: method.to_string(),
            counterexample: None,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_cap() { 3 } else { 2 })
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn read_domain(path: &Path) -> Result<Domain, Failure> {
    Ok(parse_domain(&read(path)?)?)
}

fn policy(permissive: bool) -> Policy {
    if permissive {
        Policy::Permissive
    } else {
        Policy::Strict
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::ClassifyFormula { file, json } => classify_formula_cmd(&file, json),
        Command::ClassifyDomain {
            file,
            witness,
            permissive,
            json,
        } => classify_domain_cmd(&file, witness, policy(permissive), json),
        Command::Synthesize {
            file,
            lpic,
            permissive,
            out,
        } => synthesize_cmd(&file, lpic, policy(permissive), out.as_deref()),
        Command::Models { file, cap } => {
            let f = parse_formula(&read(&file)?)?;
            match f.models_capped(cap) {
                Ok(d) => {
                    print!("{}", render_domain(&d));
                    Ok(true)
                }
                Err(Error::EmptyDomain) => {
                    println!("d {}", f.n());
                    Ok(false)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Aggregator(AggregatorCommand::Check {
            domain,
            aggregator,
            cap,
            json,
        }) => aggregator_check_cmd(&domain, &aggregator, cap, json),
        Command::Aggregator(AggregatorCommand::Find {
            domain,
            kind,
            cap,
            json,
        }) => aggregator_find_cmd(&domain, kind, cap, json),
        Command::Census {
            n,
            sample,
            seed,
            json,
        } => census_cmd(n, sample, seed, json),
    }
}

fn print_rows(rows: &[Row], json: bool) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(rows).expect("rows serialize")
        );
        return;
    }
    println!("{:<30} {:<7} {:<28} WITNESS", "CLASS", "VERDICT", "METHOD");
    for r in rows {
        let witness = match &r.witness {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        println!(
            "{:<30} {:<7} {:<28} {}",
            r.class,
            if r.verdict { "yes" } else { "no" },
            r.method,
            witness
        );
        if let Some(c) = &r.counterexample {
            println!("{:<30} counterexample: {c}", "");
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("witness serializes")
}

fn vars(v: &[u32]) -> String {
    let names: Vec<String> = v.iter().map(|x| format!("x{x}")).collect();
    format!("{{{}}}", names.join(","))
}

fn classify_formula_cmd(file: &Path, json: bool) -> Outcome {
    let f = parse_formula(&read(file)?)?;
    let r = classify_formula(&f)?;
    let text = |json_value: Value, human: String| {
        if json {
            json_value
        } else {
            Value::String(human)
        }
    };
    let syntactic = |name: &str, yes: bool| Row::new(name, yes, Value::Null, "clause-scan");
    let mut rows = vec![
        syntactic("horn", r.horn),
        syntactic("dual-horn", r.dual_horn),
        syntactic("bijunctive", r.bijunctive),
        syntactic("affine", r.affine),
    ];
    rows.push(match &r.renamable_horn {
        Some(v) => Row::new(
            "renamable-horn",
            true,
            text(to_value(v), format!("renamed={}", vars(v))),
            "implication-graph",
        ),
        None => Row::new("renamable-horn", false, Value::Null, "implication-graph"),
    });
    rows.push(match &r.separable {
        Some(w) => Row::new(
            "separable",
            true,
            text(
                to_value(w),
                format!("{} | {}", vars(&w.part1), vars(&w.part2)),
            ),
            "connected-components",
        ),
        None => Row::new("separable", false, Value::Null, "connected-components"),
    });
    rows.push(match &r.partially_horn {
        Some(v) => Row::new(
            "partially-horn",
            true,
            text(to_value(v), format!("V0={}", vars(v))),
            "exclusion-propagation",
        ),
        None => Row::new(
            "partially-horn",
            false,
            Value::Null,
            "exclusion-propagation",
        ),
    });
    rows.push(match &r.renamable_partially_horn {
        Some(w) => Row::new(
            "renamable-partially-horn",
            true,
            text(
                to_value(w),
                format!("V0={} renamed={}", vars(&w.admissible), vars(&w.renamed)),
            ),
            "implication-graph",
        ),
        None => Row::new(
            "renamable-partially-horn",
            false,
            Value::Null,
            "implication-graph",
        ),
    });
    let branches: Vec<&str> = r
        .pic_branches
        .iter()
        .map(|b| match b {
            possdom::recognize::PicKind::Separable => "separable",
            possdom::recognize::PicKind::RenamablePartiallyHorn => "renamable-partially-horn",
            possdom::recognize::PicKind::Affine => "affine",
        })
        .collect();
    rows.push(Row::new(
        "pic",
        r.pic,
        Value::Null,
        if r.pic {
            branches.first().copied().unwrap_or("")
        } else {
            "no-branch"
        },
    ));
    rows.push(match &r.lpic {
        Some(w) => Row::new(
            "lpic",
            true,
            text(
                to_value(w),
                format!(
                    "V0={} V1={} V2={} renamed={}",
                    vars(&w.v0),
                    vars(&w.v1),
                    vars(&w.v2),
                    vars(&w.renamed)
                ),
            ),
            "partition",
        ),
        None => Row::new("lpic", false, Value::Null, "partition"),
    });
    print_rows(&rows, json);
    Ok(r.pic)
}

fn verdict_row(v: &ClassVerdict, witness: bool) -> Row {
    Row {
        class: v.class.label().to_string(),
        verdict: v.verdict,
        witness: match (&v.witness, witness) {
            (Some(w), true) => Value::String(w.to_string()),
            _ => Value::Null,
        },
        method: v.method.to_string(),
        counterexample: if witness {
            v.counterexample.clone()
        } else {
            None
        },
    }
}

fn classify_domain_cmd(file: &Path, witness: bool, policy: Policy, json: bool) -> Outcome {
    let d = read_domain(file)?;
    let c = classify_domain(&d, policy)?;
    let rows: Vec<Row> = c
        .verdicts()
        .into_iter()
        .map(|v| verdict_row(v, witness))
        .collect();
    if json {
        let out = json!({
            "verdicts": rows,
            "fixed_coordinates": c.fixed_coordinates,
            "pic": c.pic.as_ref().map(|r| render_formula(&r.formula)),
            "lpic": c.lpic.as_ref().map(|r| render_formula(&r.formula)),
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("report serializes")
        );
    } else {
        print_rows(&rows, false);
        if !c.fixed_coordinates.is_empty() {
            let fixed: Vec<String> = c
                .fixed_coordinates
                .iter()
                .map(|&(j, b)| format!("x{j}={}", u8::from(b)))
                .collect();
            println!("fixed coordinates: {}", fixed.join(" "));
        }
    }
    Ok(c.possibility.verdict)
}

fn synthesize_cmd(file: &Path, lpic: bool, policy: Policy, out: Option<&Path>) -> Outcome {
    let d = read_domain(file)?;
    let result = if lpic {
        lpic_for(&d, policy)?
    } else {
        pic_for(&d, policy)?
    };
    let Some(result) = result else {
        eprintln!(
            "{} is not a {}possibility domain",
            file.display(),
            if lpic { "local " } else { "" }
        );
        return Ok(false);
    };
    let text = render_formula(&result.formula);
    let reparsed = parse_formula(&text)?;
    if reparsed.models()? != d {
        return Err(
            Error::Internal("synthesized formula does not reproduce the domain".into()).into(),
        );
    }
    match out {
        Some(path) => fs::write(path, &text).map_err(|e| Failure::Io(path.to_path_buf(), e))?,
        None => print!("{text}"),
    }
    Ok(true)
}

fn aggregator_check_cmd(domain: &Path, aggregator: &Path, cap: u128, json: bool) -> Outcome {
    let d = read_domain(domain)?;
    let f = parse_aggregator(&read(aggregator)?)?;
    let cex = f.check_aggregator_capped(&d, cap)?;
    let is_agg = cex.is_none();
    let mut rows = vec![Row {
        counterexample: cex,
        ..Row::new(
            "aggregator",
            is_agg,
            Value::String(f.to_string()),
            "closure",
        )
    }];
    let predicate = |name: &str, yes: bool| Row::new(name, yes, Value::Null, "components");
    rows.push(predicate("dictatorial", f.is_dictatorial()));
    rows.push(predicate(
        "locally-nondictatorial",
        f.is_locally_nondictatorial(),
    ));
    rows.push(predicate("anonymous", f.is_anonymous()));
    rows.push(predicate("monotone", f.is_monotone()));
    rows.push(predicate("strongdem", f.is_strongdem()));
    rows.push(predicate("systematic", f.is_systematic()));
    if is_agg {
        let violation = f.generalized_dictatorship_violation(&d)?;
        rows.push(Row {
            counterexample: violation.clone(),
            ..Row::new(
                "generalized-dictatorship",
                violation.is_none(),
                Value::Null,
                "outputs-among-inputs",
            )
        });
    }
    print_rows(&rows, json);
    Ok(is_agg)
}

fn aggregator_find_cmd(domain: &Path, kind: FindKind, cap: u128, json: bool) -> Outcome {
    let d = read_domain(domain)?;
    let (class, property, candidates) = match kind {
        FindKind::Binary => ("binary", Property::NonDictatorial, CandidateSet::Binary),
        FindKind::TernaryCommutative => (
            "ternary-commutative",
            Property::Anonymous,
            CandidateSet::TernaryCommutative { allow_xor: true },
        ),
        FindKind::Strongdem => (
            "strongdem",
            Property::Strongdem,
            CandidateSet::TernaryCommutative { allow_xor: false },
        ),
        FindKind::Anonymous => (
            "anonymous",
            Property::Anonymous,
            CandidateSet::TernaryCommutative { allow_xor: true },
        ),
    };
    let spec = SearchSpaceSpec {
        candidates,
        tuple_cap: cap,
    };
    let found: Option<Aggregator> = oracle::brute_property(&d, property, &spec)?;
    let row = Row::new(
        class,
        found.is_some(),
        found
            .as_ref()
            .map_or(Value::Null, |f| Value::String(f.to_string())),
        "exhaustive-search",
    );
    print_rows(&[row], json);
    Ok(found.is_some())
}

fn census_cmd(n: usize, sample: Option<usize>, seed: u64, json: bool) -> Outcome {
    let mode = match sample {
        Some(count) => CensusMode::Sample { count, seed },
        None => CensusMode::Exhaustive,
    };
    let entries = oracle::census(n, mode)?;
    let mismatches = entries.iter().filter(|e| !e.matches).count();
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&entries).expect("census serializes")
        );
    } else {
        for e in &entries {
            let flags: String = e
                .theory_verdicts
                .iter()
                .map(|&(_, v)| if v { '1' } else { '0' })
                .collect();
            println!(
                "{} {} {}",
                e.domain_bits.join(","),
                flags,
                if e.matches { "ok" } else { "MISMATCH" }
            );
        }
        println!("domains: {} mismatches: {mismatches}", entries.len());
    }
    Ok(mismatches == 0)
}
