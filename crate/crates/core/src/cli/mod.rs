//! Command-line front end.
//!
//! Exit codes: 0 success or valid, 1 mathematical failure (mismatch,
//! invalid certificate, no killing modulus), 2 input error, 3 degenerate
//! instance.

pub mod corpus;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::certificate::{
    builtin_certificates, verify_certificate, Certificate, ContradictionKind, Hypotheses, Node,
    Target, Verdict, FORMAT_VERSION,
};
use crate::expr::SignedSum;
use crate::search::{run_instance, EquationInstance, SearchError, SearchReport, DEFAULT_BOUND};
use crate::sieve::{find_killing_modulus, ConstraintSet, ResidueFact, Term, DEFAULT_PERIOD_CAP};

use corpus::{run_corpus, EntryStatus, FamilySpec, SHIPPED_CORPUS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "jesma",
    version,
    about = "Exponential Diophantine search, sieving and certificates"
)]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads; defaults to JESMA_THREADS, then to the core count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormArg {
    Pythag,
    General,
    Terai,
    Eisenstein,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Lu,
    Jesmanowicz,
    Fermat,
    Pq,
    Explicit,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bounded search over one equation instance.
    Search(SearchArgs),
    /// Runs a corpus of instances against their expected solution sets.
    Corpus {
        /// Corpus file; the shipped corpus when omitted.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Looks for a modulus at which a congruence has no solution and emits a certificate.
    Prove {
        /// Signed sum of exponential monomials that must vanish, e.g. "101^z - 1 - 99^y*2^a*5^b".
        #[arg(long)]
        terms: String,
        /// Hypotheses such as "z even", "x = 2", "y = 1 mod 4", "z >= 3".
        #[arg(long = "constraint")]
        constraints: Vec<String>,
        /// Largest modulus tried.
        #[arg(long, default_value_t = 100)]
        mmax: u64,
        /// Largest multiplicative period allowed per base.
        #[arg(long, default_value_t = DEFAULT_PERIOD_CAP)]
        period_cap: u64,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Checks a certificate file.
    Verify { file: PathBuf },
    /// Writes the built-in certificates as JSON files.
    Export {
        /// Export only this certificate.
        #[arg(long)]
        name: Option<String>,
        /// Target directory.
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

#[derive(Debug, clap::Args)]
struct SearchArgs {
    /// Equation shape.
    #[arg(long, value_enum)]
    form: FormArg,
    /// Triple family supplying the bases (U, V, W), scaled by --k.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Family parameter n.
    #[arg(long)]
    n: Option<BigUint>,
    /// Generator p of the pq family.
    #[arg(long)]
    p: Option<BigUint>,
    /// Generator q of the pq family.
    #[arg(long)]
    q: Option<BigUint>,
    /// Explicit first base.
    #[arg(long)]
    u: Option<BigUint>,
    /// Explicit second base.
    #[arg(long)]
    v: Option<BigUint>,
    /// Explicit third base.
    #[arg(long)]
    w: Option<BigUint>,
    /// Scale factor for family bases.
    #[arg(long, default_value = "1")]
    k: BigUint,
    /// First base, when no family is given.
    #[arg(long)]
    a: Option<BigUint>,
    /// Second base.
    #[arg(long)]
    b: Option<BigUint>,
    /// Third base.
    #[arg(long)]
    c: Option<BigUint>,
    /// Largest x searched.
    #[arg(long, default_value_t = DEFAULT_BOUND)]
    xmax: u64,
    /// Largest y searched.
    #[arg(long, default_value_t = DEFAULT_BOUND)]
    ymax: u64,
}

/// Failure with its exit code and message.
struct Exit {
    code: i32,
    message: String,
}

impl Exit {
    fn input(message: impl Into<String>) -> Exit {
        Exit {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

struct Io<'a> {
    out: &'a mut (dyn Write + Send),
    err: &'a mut (dyn Write + Send),
    json: bool,
}

fn report(command: &str, instances: Value, results: Value, elapsed: std::time::Duration) -> String {
    let v = json!({
        "tool-version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "instances": instances,
        "results": results,
        "timing": { "elapsed-us": elapsed.as_micros().to_string() },
    });
    serde_json::to_string_pretty(&v).expect("values serialize")
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let threads = match cli.threads {
        Some(n) => n,
        None => match std::env::var("JESMA_THREADS") {
            Ok(s) => match s.trim().parse() {
                Ok(n) => n,
                Err(_) => {
                    let _ = writeln!(err, "error: JESMA_THREADS={s:?} is not a thread count");
                    return EXIT_INPUT;
                }
            },
            Err(_) => 0,
        },
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let mut io = Io {
        out,
        err,
        json: cli.json,
    };
    let result = pool.install(|| dispatch(cli.command, &mut io));
    match result {
        Ok(code) => code,
        Err(Exit { code, message }) => {
            let _ = writeln!(io.err, "error: {message}");
            code
        }
    }
}

fn dispatch(command: Command, io: &mut Io) -> Result<i32, Exit> {
    match command {
        Command::Search(args) => cmd_search(args, io),
        Command::Corpus { file } => cmd_corpus(file.as_deref(), io),
        Command::Prove {
            terms,
            constraints,
            mmax,
            period_cap,
            output,
        } => cmd_prove(
            &terms,
            &constraints,
            mmax,
            period_cap,
            output.as_deref(),
            io,
        ),
        Command::Verify { file } => cmd_verify(&file, io),
        Command::Export { name, dir } => cmd_export(name.as_deref(), &dir, io),
    }
}

fn search_error(e: SearchError) -> Exit {
    let code = match e {
        SearchError::DegenerateBase { .. } => EXIT_DEGENERATE,
        _ => EXIT_INPUT,
    };
    Exit {
        code,
        message: e.to_string(),
    }
}

fn need(value: &Option<BigUint>, flag: &str) -> Result<BigUint, Exit> {
    value
        .clone()
        .ok_or_else(|| Exit::input(format!("--{flag} is required here")))
}

fn search_instance(args: &SearchArgs) -> Result<EquationInstance, Exit> {
    let inst = match args.form {
        FormArg::Pythag => {
            let family = match args.family {
                Some(f) => f,
                None if args.u.is_some() => FamilyArg::Explicit,
                None => return Err(Exit::input("--form pythag needs --family or --u/--v/--w")),
            };
            let spec = match family {
                FamilyArg::Lu => FamilySpec::Lu {
                    n: need(&args.n, "n")?,
                },
                FamilyArg::Jesmanowicz => FamilySpec::Jesmanowicz {
                    n: need(&args.n, "n")?,
                },
                FamilyArg::Fermat => FamilySpec::Fermat {
                    n: u64::try_from(&need(&args.n, "n")?)
                        .map_err(|_| Exit::input("--n is too large"))?,
                },
                FamilyArg::Pq => FamilySpec::Pq {
                    p: need(&args.p, "p")?,
                    q: need(&args.q, "q")?,
                },
                FamilyArg::Explicit => FamilySpec::Explicit {
                    u: need(&args.u, "u")?,
                    v: need(&args.v, "v")?,
                    w: need(&args.w, "w")?,
                },
            };
            let t = spec.triple().map_err(Exit::input)?;
            EquationInstance::scaled(&t, &args.k)
        }
        FormArg::General => EquationInstance::general(
            need(&args.a, "a")?,
            need(&args.b, "b")?,
            need(&args.c, "c")?,
        ),
        FormArg::Terai => EquationInstance::terai(need(&args.b, "b")?, need(&args.c, "c")?),
        FormArg::Eisenstein => EquationInstance::eisenstein(
            need(&args.a, "a")?,
            need(&args.b, "b")?,
            need(&args.c, "c")?,
        ),
    };
    inst.map_err(search_error)
        .map(|i| i.with_provenance("command line"))
}

fn cmd_search(args: SearchArgs, io: &mut Io) -> Result<i32, Exit> {
    let inst = search_instance(&args)?;
    let report: SearchReport = run_instance(inst, args.xmax, args.ymax).map_err(search_error)?;
    if io.json {
        let text = self::report(
            "search",
            json!([serde_json::to_value(&report.instance).expect("serializes")]),
            json!([serde_json::to_value(&report).expect("serializes")]),
            report.elapsed,
        );
        let _ = writeln!(io.out, "{text}");
    } else {
        let _ = writeln!(io.out, "{}", report.instance);
        let (first, second) = match report.instance.form {
            crate::search::Form::Terai => ("m", "n"),
            _ => ("x", "y"),
        };
        let _ = writeln!(
            io.out,
            "bounds: {first} <= {}, {second} <= {}; {} candidates in {:?}",
            report.x_max, report.y_max, report.candidates, report.elapsed
        );
        let _ = writeln!(io.out, "{} solution(s)", report.solutions.len());
        for s in &report.solutions {
            let _ = writeln!(io.out, "  {s}");
        }
    }
    Ok(EXIT_OK)
}

fn read(path: &Path) -> Result<String, Exit> {
    std::fs::read_to_string(path)
        .map_err(|e| Exit::input(format!("cannot read {}: {e}", path.display())))
}

fn cmd_corpus(file: Option<&Path>, io: &mut Io) -> Result<i32, Exit> {
    let text = match file {
        Some(p) => read(p)?,
        None => SHIPPED_CORPUS.to_string(),
    };
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Exit::input(format!("corpus is not JSON: {e}")))?;
    let entries = value
        .as_array()
        .ok_or_else(|| Exit::input("corpus must be a JSON array of entries"))?;
    if entries.is_empty() {
        let _ = writeln!(io.err, "warning: corpus is empty");
    }
    let start = Instant::now();
    let outcomes = run_corpus(entries);
    let elapsed = start.elapsed();
    let malformed = outcomes.iter().any(|o| o.status == EntryStatus::Malformed);
    let failed = outcomes.iter().any(|o| o.status == EntryStatus::Fail);
    if io.json {
        let names: Vec<&str> = outcomes.iter().map(|o| o.name.as_str()).collect();
        let text = report(
            "corpus",
            json!(names),
            serde_json::to_value(&outcomes).expect("serializes"),
            elapsed,
        );
        let _ = writeln!(io.out, "{text}");
    } else {
        for o in &outcomes {
            match o.status {
                EntryStatus::Pass => {
                    let _ = writeln!(
                        io.out,
                        "PASS {} ({} instance(s), {} us)",
                        o.name, o.instances, o.elapsed_us
                    );
                }
                EntryStatus::Fail => {
                    let _ = writeln!(io.out, "FAIL {}", o.name);
                    for m in &o.mismatches {
                        let found: Vec<String> = m.found.iter().map(ToString::to_string).collect();
                        let _ = writeln!(io.out, "  {} found {{{}}}", m.instance, found.join(", "));
                    }
                }
                EntryStatus::Malformed => {
                    let diag = o.diagnostic.as_deref().unwrap_or("");
                    let _ = writeln!(io.out, "MALFORMED #{} {}: {diag}", o.index, o.name);
                }
            }
        }
        let passed = outcomes
            .iter()
            .filter(|o| o.status == EntryStatus::Pass)
            .count();
        let _ = writeln!(
            io.out,
            "{passed}/{} entries pass in {elapsed:?}",
            outcomes.len()
        );
    }
    Ok(if malformed {
        EXIT_INPUT
    } else if failed {
        EXIT_FAILURE
    } else {
        EXIT_OK
    })
}

/// Single-branch certificate: one congruence with an empty projection.
fn killing_certificate(
    terms: &SignedSum,
    cs: &ConstraintSet,
    modulus: u64,
    title: String,
) -> Certificate {
    let hypotheses = Hypotheses {
        lower_bounds: cs.lower_bounds.clone(),
        fixed: cs
            .fixed
            .iter()
            .map(|(k, v)| (k.clone(), *v as i64))
            .collect(),
        facts: cs.residues.clone(),
        relations: cs.relations.clone(),
        chain: None,
    };
    Certificate {
        version: FORMAT_VERSION.into(),
        title,
        metadata: [("name".to_string(), "prove".to_string())]
            .into_iter()
            .collect(),
        equation: Target::Explicit {
            equation: terms.clone().into_equation(),
            hypotheses,
        },
        excluded: Vec::new(),
        tree: Node::Congruence {
            equations: vec![0],
            modulus,
            claim: ResidueFact::joint(Vec::new(), Vec::new(), Vec::<Vec<u64>>::new()),
            then: Box::new(Node::Contradiction {
                reason: ContradictionKind::EmptyCongruence,
            }),
        },
    }
}

fn cmd_prove(
    terms_text: &str,
    constraints: &[String],
    mmax: u64,
    period_cap: u64,
    output: Option<&Path>,
    io: &mut Io,
) -> Result<i32, Exit> {
    let sum: SignedSum = terms_text
        .parse()
        .map_err(|e| Exit::input(format!("cannot parse --terms: {e}")))?;
    if sum.terms.is_empty() {
        return Err(Exit::input("--terms is empty"));
    }
    let clauses: Vec<&str> = constraints.iter().map(String::as_str).collect();
    let cs = ConstraintSet::parse(&clauses).map_err(|e| Exit::input(e.to_string()))?;
    let terms: Vec<Term> = sum
        .terms
        .iter()
        .map(|(neg, m)| Term::new(if *neg { -1 } else { 1 }, m.clone()))
        .collect();
    let start = Instant::now();
    let Some(km) = find_killing_modulus(&terms, &cs, mmax, period_cap) else {
        let msg = format!("no modulus in 2..={mmax} rules out {sum} = 0");
        if io.json {
            let text = report(
                "prove",
                json!([sum.to_string()]),
                json!([{ "found": false, "scanned": {"from": "2", "to": mmax.to_string()} }]),
                start.elapsed(),
            );
            let _ = writeln!(io.out, "{text}");
        }
        let _ = writeln!(io.err, "{msg}");
        return Ok(EXIT_FAILURE);
    };
    let hyp = if clauses.is_empty() {
        String::new()
    } else {
        format!(" with {}", clauses.join(", "))
    };
    let title = format!(
        "{sum} = 0 has no solution{hyp}: impossible modulo {}",
        km.modulus
    );
    let cert = killing_certificate(&sum, &cs, km.modulus, title);
    let verdict = verify_certificate(&cert);
    if let Verdict::Invalid { .. } = verdict {
        let _ = writeln!(io.err, "generated certificate does not verify: {verdict}");
        return Ok(EXIT_FAILURE);
    }
    let text = cert.to_canonical_json();
    match output {
        Some(path) => {
            std::fs::write(path, format!("{text}\n"))
                .map_err(|e| Exit::input(format!("cannot write {}: {e}", path.display())))?;
            if io.json {
                let r = report(
                    "prove",
                    json!([sum.to_string()]),
                    json!([{ "found": true, "modulus": km.modulus.to_string(), "output": path.display().to_string() }]),
                    start.elapsed(),
                );
                let _ = writeln!(io.out, "{r}");
            } else {
                let _ = writeln!(
                    io.out,
                    "modulus {}: certificate written to {}",
                    km.modulus,
                    path.display()
                );
            }
        }
        None => {
            let _ = writeln!(io.out, "{text}");
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(file: &Path, io: &mut Io) -> Result<i32, Exit> {
    let text = read(file)?;
    let cert = Certificate::from_json(&text).map_err(|e| Exit::input(e.to_string()))?;
    let start = Instant::now();
    let verdict = verify_certificate(&cert);
    if io.json {
        let r = report(
            "verify",
            json!([file.display().to_string()]),
            json!([serde_json::to_value(&verdict).expect("serializes")]),
            start.elapsed(),
        );
        let _ = writeln!(io.out, "{r}");
    } else {
        match &verdict {
            Verdict::Valid => {
                let _ = writeln!(io.out, "valid: {}", cert.title);
            }
            Verdict::Invalid { .. } => {
                let _ = writeln!(io.out, "{verdict}");
            }
        }
    }
    Ok(if verdict.is_valid() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

fn cmd_export(name: Option<&str>, dir: &Path, io: &mut Io) -> Result<i32, Exit> {
    let certs: Vec<Certificate> = builtin_certificates()
        .into_iter()
        .filter(|c| name.is_none_or(|n| c.metadata.get("name").map(String::as_str) == Some(n)))
        .collect();
    if certs.is_empty() {
        return Err(Exit::input(format!(
            "no built-in certificate named {:?}",
            name.unwrap_or("")
        )));
    }
    std::fs::create_dir_all(dir)
        .map_err(|e| Exit::input(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for c in &certs {
        let file = dir.join(format!("{}.json", c.metadata["name"]));
        std::fs::write(&file, format!("{}\n", c.to_canonical_json()))
            .map_err(|e| Exit::input(format!("cannot write {}: {e}", file.display())))?;
        written.push(file.display().to_string());
    }
    if io.json {
        let _ = writeln!(
            io.out,
            "{}",
            serde_json::to_string_pretty(&json!(written)).expect("serializes")
        );
    } else {
        for w in &written {
            let _ = writeln!(io.out, "{w}");
        }
    }
    Ok(EXIT_OK)
}
