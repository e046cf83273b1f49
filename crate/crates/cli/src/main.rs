mod records;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use period_index::construct::search::PrimePairCertificate;
use period_index::construct::theorem2::SequenceCertificate;
use period_index::symbols::reciprocity_suite;
use period_index::{Error, Result};
use serde::de::DeserializeOwned;
use serde_json::Value;

use records::*;

const DEFAULT_CURVE: &str = "fermat-cubic";

/// Period-index certificates for genus one curves over Q(zeta3).
///
/// Every subcommand prints one JSON document on stdout; `verify` re-checks
/// any of them. Exit codes: 0 success, 1 verification failure, 2 usage
/// error, 3 exhausted search or inconclusive answer.
#[derive(Parser)]
#[command(name = "period-index", version)]
struct Cli {
    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value = DEFAULT_CURVE)]
    curve: String,
    #[arg(long = "p", default_value_t = 3)]
    p: u32,
    /// Norm bound for candidate generators.
    #[arg(long, default_value_t = 100_000)]
    bound: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PairSource {
    /// A prime-pair document; searched afresh when absent.
    #[arg(long)]
    pair: Option<PathBuf>,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long = "d", default_value_t = 3)]
    d: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Find a prime pair satisfying the splitting conditions.
    SearchPrimes(SearchArgs),
    /// Build the class Phi(pi^(P/D), pi') with its obstruction and period.
    BuildClass(PairSource),
    /// Certify period P and index P*D for the class of a prime pair.
    CertifyIndex(PairSource),
    /// Build a sequence of r prime pairs and their classes.
    Sequence {
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// Rational primes avoided by the sequence, comma separated.
        #[arg(long = "s-k", value_delimiter = ',', default_value = "2,3,5")]
        s_k: Vec<u64>,
    },
    /// Check that the difference of classes i and j has order P at one place.
    DifferenceCheck {
        #[arg(long)]
        sequence: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
    },
    /// Plan the splitting extension for the first r classes of a sequence.
    SplittingPlan {
        #[arg(long)]
        sequence: PathBuf,
        /// Defaults to the sequence length.
        #[arg(long)]
        r: Option<usize>,
    },
    /// Evaluate the symbol <a, b> of level n.
    Symbol {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// A single place; all places when absent.
        #[arg(long)]
        place: Option<String>,
        /// Largest norm factored when parsing elements.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        norm_cap: u64,
    },
    /// Check reciprocity on seeded random global symbols.
    ReciprocitySuite {
        #[arg(long, default_value_t = 3)]
        n: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide local solvability of a conic, a 2-covering or a versal pair.
    LocalSolve(LocalArgs),
    /// Re-check a document produced by any other subcommand.
    Verify { file: PathBuf },
}

#[derive(Args)]
#[command(group(ArgGroup::new("shape").required(true).args(["conic", "roots", "versal"])))]
struct LocalArgs {
    /// a,b for the conic a x^2 + b y^2 = z^2.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    conic: Option<Vec<String>>,
    /// e1,e2,e3 for the 2-covering of y^2 = (x-e1)(x-e2)(x-e3); needs --ta and --tb.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires_all = ["ta", "tb"])]
    roots: Option<Vec<String>>,
    #[arg(long, allow_hyphen_values = true)]
    ta: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    tb: Option<i64>,
    /// t1,...,t8 for the versal pair.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    versal: Option<Vec<i64>>,
    /// Places to test, like inf,2,3,(2+3w); overrides --prime-limit.
    #[arg(long)]
    places: Option<String>,
    /// Test the real place and every prime up to this limit.
    #[arg(long, default_value_t = 50)]
    prime_limit: u64,
}

enum Outcome {
    Done(Value),
    /// A valid document reporting exhaustion or an inconclusive answer.
    Partial(Value),
}

fn read_doc(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Verification(format!("{}: not JSON: {e}", path.display())))
}

fn load<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<T> {
    untag(&read_doc(path)?, kind)
}

fn pair_from(src: &PairSource) -> Result<std::result::Result<PrimePairCertificate, Value>> {
    if let Some(path) = &src.pair {
        return Ok(Ok(load(path, "prime-pair")?));
    }
    let s = &src.search;
    let req = SearchRequest::SearchPrimes { curve_id: s.curve.clone(), p: s.p, bound: s.bound, seed: s.seed };
    match run_search(&req)? {
        Searched::Pair(c) => Ok(Ok(c)),
        Searched::Exhausted(r) => Ok(Err(tagged("exhaustion-report", &r)?)),
        Searched::Sequence(_) => unreachable!("pair search returned a sequence"),
    }
}

fn searched(s: Searched) -> Result<Outcome> {
    Ok(match s {
        Searched::Pair(c) => Outcome::Done(tagged("prime-pair", &c)?),
        Searched::Sequence(c) => Outcome::Done(tagged("sequence", &c)?),
        Searched::Exhausted(r) => Outcome::Partial(tagged("exhaustion-report", &r)?),
    })
}

fn local_input(a: &LocalArgs) -> Result<LocalInput> {
    fn exactly<T: Clone, const N: usize>(flag: &str, v: &[T]) -> Result<[T; N]> {
        v.to_vec()
            .try_into()
            .map_err(|_| Error::Invalid(format!("--{flag} takes {N} comma-separated values, got {}", v.len())))
    }
    if let Some(c) = &a.conic {
        let [x, y] = exactly("conic", c)?;
        return Ok(LocalInput::Conic { a: x, b: y });
    }
    if let Some(r) = &a.roots {
        let (ta, tb) = (a.ta.expect("required by clap"), a.tb.expect("required by clap"));
        return Ok(LocalInput::Torsor { roots: exactly("roots", r)?, a: ta, b: tb });
    }
    let t = a.versal.as_ref().expect("one shape is required by clap");
    Ok(LocalInput::Versal { t: exactly("versal", t)? })
}

fn first_difference(given: &Value, rebuilt: &Value) -> String {
    if let (Value::Object(g), Value::Object(r)) = (given, rebuilt) {
        for (k, v) in r {
            if g.get(k) != Some(v) {
                return format!("field {k:?} differs from its recomputation");
            }
        }
        if let Some(k) = g.keys().find(|k| !r.contains_key(*k)) {
            return format!("unexpected field {k:?}");
        }
    }
    "document differs from its recomputation".into()
}

fn run(cmd: &Command) -> Result<Outcome> {
    Ok(match cmd {
        Command::SearchPrimes(s) => {
            searched(run_search(&SearchRequest::SearchPrimes { curve_id: s.curve.clone(), p: s.p, bound: s.bound, seed: s.seed })?)?
        }
        Command::BuildClass(src) => match pair_from(src)? {
            Ok(pair) => Outcome::Done(tagged("theorem1-class", &class_record(&pair, src.d)?)?),
            Err(report) => Outcome::Partial(report),
        },
        Command::CertifyIndex(src) => match pair_from(src)? {
            Ok(pair) => Outcome::Done(tagged("index-certificate", &index_certificate(&pair, src.d)?)?),
            Err(report) => Outcome::Partial(report),
        },
        Command::Sequence { search: s, r, s_k } => searched(run_search(&SearchRequest::Sequence {
            curve_id: s.curve.clone(),
            p: s.p,
            r: *r,
            s_k: s_k.clone(),
            bound: s.bound,
            seed: s.seed,
        })?)?,
        Command::DifferenceCheck { sequence, i, j } => {
            let seq: SequenceCertificate = load(sequence, "sequence")?;
            Outcome::Done(tagged("difference-certificate", &difference(&seq, *i, *j)?)?)
        }
        Command::SplittingPlan { sequence, r } => {
            let seq: SequenceCertificate = load(sequence, "sequence")?;
            let r = r.unwrap_or(seq.entries.len());
            Outcome::Done(tagged("splitting-plan", &plan(&seq, r)?)?)
        }
        Command::Symbol { n, a, b, place, norm_cap } => {
            Outcome::Done(tagged("symbol", &symbol_record(*n, a, b, place.as_deref(), *norm_cap)?)?)
        }
        Command::ReciprocitySuite { n, count, seed } => {
            let suite = reciprocity_suite(*n, *count, *seed)?;
            let doc = tagged("reciprocity-suite", &suite)?;
            if suite.failures > 0 {
                emit_stdout(&doc);
                return Err(Error::Verification(format!("{} of {count} samples break reciprocity", suite.failures)));
            }
            Outcome::Done(doc)
        }
        Command::LocalSolve(a) => {
            let places = match &a.places {
                Some(s) => parse_places(s)?,
                None => places_up_to(a.prime_limit),
            };
            let rec = local_solve(&local_input(a)?, &places)?;
            let doc = tagged("local-solve", &rec)?;
            if rec.everywhere_locally_solvable.is_none() {
                Outcome::Partial(doc)
            } else {
                Outcome::Done(doc)
            }
        }
        Command::Verify { file } => {
            let doc = read_doc(file)?;
            let rebuilt = recompute(&doc)?;
            if rebuilt != doc {
                return Err(Error::Verification(first_difference(&doc, &rebuilt)));
            }
            let kind = doc["kind"].as_str().unwrap_or_default().to_string();
            Outcome::Done(serde_json::json!({ "kind": "verification", "verified_kind": kind, "status": "ok" }))
        }
    })
}

fn emit_stdout(doc: &Value) {
    println!("{}", serde_json::to_string_pretty(doc).expect("JSON values serialize"));
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Verification(_) | Error::Condition { .. } | Error::Reciprocity(_) => 1,
        Error::Exhausted(_) | Error::Inconclusive(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(outcome) => {
            let (doc, code) = match outcome {
                Outcome::Done(d) => (d, 0),
                Outcome::Partial(d) => (d, 3),
            };
            match &cli.out {
                Some(path) => {
                    let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n";
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => emit_stdout(&doc),
            }
            if code == 3 {
                eprintln!("note: {} is partial (exhausted or inconclusive)", doc["kind"]);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
