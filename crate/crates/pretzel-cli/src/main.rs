//! `ptz` — command-line driver for the pretzel normal-form engine.
//!
//! Subcommands: `pretzel` (normal form of a term), `eq` (term equality),
//! `enum` (monoid enumeration and table export), `verify` (axiom and
//! property verification report). Every command needs an identity-word
//! oracle: either `--monoid FILE` with a JSON multiplication table or
//! `--free` for the free monoid.
//!
//! Exit codes: 0 success, 1 domain error (diagnostic on standard error),
//! 2 usage error. Data goes to standard output or `--out`; counts and
//! other diagnostics go to standard error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use pretzel_core::cancellative::{FiniteMonoid, IdentityWordOracle};
use pretzel_core::graphs::{export_dot, Label};
use pretzel_core::monoidlab::{
    enumerate, export_table, verify_identities, verify_left_adequate, verify_relations,
    EnumerateError, EnumeratedMonoid,
};
use pretzel_core::pretzel::{
    check_cayley_embedding, equal_in_presentation, pretzel_of_tree, write_pretzel, Pretzel,
};
use pretzel_core::terms::{parse_term, term_to_tree, XTree};
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ptz",
    version,
    about = "Normal forms, equality, enumeration and verification for pretzel monoids"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the normal form of a term and write it out
    Pretzel {
        /// Term over the alphabet, e.g. "x(x^2)^+x"
        term: String,
        #[command(flatten)]
        oracle: OracleArgs,
        /// Output format for the graph
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write data here instead of standard output
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Decide whether two terms name the same element
    Eq {
        term1: String,
        term2: String,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Enumerate the monoid of normal forms and export its tables
    Enum {
        #[command(flatten)]
        oracle: OracleArgs,
        /// Stop after this many elements
        #[arg(long, default_value_t = pretzel_core::monoidlab::DEFAULT_CAP)]
        cap: usize,
        /// Write data here instead of standard output
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Enumerate, then verify axioms, identities, relations and geometry
    Verify {
        #[command(flatten)]
        oracle: OracleArgs,
        /// Stop enumeration after this many elements
        #[arg(long, default_value_t = pretzel_core::monoidlab::DEFAULT_CAP)]
        cap: usize,
        /// Longest word checked against the defining relations
        #[arg(long = "max-word-len", default_value_t = 6)]
        max_word_len: usize,
        /// Seed for the randomized identity instantiations
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Write the report here instead of standard output
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct OracleSource {
    /// JSON monoid file providing the identity-word oracle
    #[arg(long, value_name = "PATH")]
    monoid: Option<PathBuf>,
    /// Use the free monoid: only the empty word is an identity word
    #[arg(long)]
    free: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    source: OracleSource,
    /// Alphabet letters; defaults to the monoid's generators, or "x" with --free
    #[arg(long, value_name = "LETTERS")]
    alphabet: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Dot,
}

/// A resolved oracle: the alphabet, the oracle itself, a display name for
/// serialized output, and the finite monoid when there is one.
struct Oracle {
    alphabet: Vec<Label>,
    oracle: IdentityWordOracle,
    name: String,
    finite: Option<FiniteMonoid>,
}

fn parse_alphabet(s: &str) -> Result<Vec<Label>, String> {
    let mut letters = Vec::new();
    for c in s.chars() {
        if !c.is_alphabetic() {
            return Err(format!("alphabet letter {c:?} is not a letter"));
        }
        if letters.contains(&Label(c)) {
            return Err(format!("alphabet letter {c:?} repeats"));
        }
        letters.push(Label(c));
    }
    letters.sort();
    Ok(letters)
}

fn resolve_oracle(args: &OracleArgs) -> Result<Oracle, String> {
    if args.source.free {
        let alphabet = parse_alphabet(args.alphabet.as_deref().unwrap_or("x"))?;
        return Ok(Oracle {
            alphabet,
            oracle: IdentityWordOracle::FreeMonoid,
            name: "free".to_string(),
            finite: None,
        });
    }
    let path = args.source.monoid.as_ref().expect("required by the flag group");
    let src = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let alphabet = match &args.alphabet {
        Some(s) => parse_alphabet(s)?,
        None => {
            // Default to the letters the file itself maps to generators.
            let value: serde_json::Value = serde_json::from_str(&src)
                .map_err(|e| format!("{}: not valid JSON: {e}", path.display()))?;
            let gens = value
                .get("generators")
                .and_then(|g| g.as_object())
                .ok_or_else(|| format!("{}: missing `generators` object", path.display()))?;
            let mut letters = String::new();
            for key in gens.keys() {
                letters.push_str(key);
            }
            parse_alphabet(&letters)?
        }
    };
    let monoid = FiniteMonoid::load(&src, &alphabet)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "monoid".to_string());
    Ok(Oracle {
        alphabet,
        oracle: IdentityWordOracle::Finite(monoid.clone()),
        name,
        finite: Some(monoid),
    })
}

fn emit(data: &str, out: &Option<PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, data)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{data}");
            Ok(())
        }
    }
}

fn normal_form_of(term_src: &str, o: &Oracle) -> Result<Pretzel, String> {
    let term = parse_term(term_src, &o.alphabet).map_err(|e| e.to_string())?;
    let tree = term_to_tree(&term, &o.alphabet).map_err(|e| e.to_string())?;
    pretzel_of_tree(&tree, &o.oracle).map_err(|e| e.to_string())
}

fn cmd_pretzel(
    term: &str,
    oracle: &OracleArgs,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<(), String> {
    let o = resolve_oracle(oracle)?;
    let p = normal_form_of(term, &o)?;
    let data = match format {
        Format::Text => write_pretzel(&p, &o.name),
        Format::Dot => export_dot(p.graph()),
    };
    emit(&data, out)?;
    eprintln!(
        "vertices: {} edges: {}",
        p.graph().n_vertices(),
        p.graph().n_edges()
    );
    Ok(())
}

fn cmd_eq(term1: &str, term2: &str, oracle: &OracleArgs) -> Result<(), String> {
    let o = resolve_oracle(oracle)?;
    let s = parse_term(term1, &o.alphabet).map_err(|e| e.to_string())?;
    let t = parse_term(term2, &o.alphabet).map_err(|e| e.to_string())?;
    let equal =
        equal_in_presentation(&s, &t, &o.alphabet, &o.oracle).map_err(|e| e.to_string())?;
    println!("{}", if equal { "equal" } else { "not-equal" });
    Ok(())
}

fn run_enumerate(o: &Oracle, cap: usize) -> Result<EnumeratedMonoid, String> {
    enumerate(&o.oracle, &o.alphabet, cap).map_err(|e| match e {
        EnumerateError::CapExceeded { partial, .. } => {
            format!("cap exceeded at {} elements; the monoid may be infinite", partial.len())
        }
        other => other.to_string(),
    })
}

fn cmd_enum(oracle: &OracleArgs, cap: usize, out: &Option<PathBuf>) -> Result<(), String> {
    let o = resolve_oracle(oracle)?;
    let m = run_enumerate(&o, cap)?;
    emit(&export_table(&m), out)?;
    eprintln!("{} elements", m.size());
    Ok(())
}

fn cmd_verify(
    oracle: &OracleArgs,
    cap: usize,
    max_word_len: usize,
    seed: u64,
    out: &Option<PathBuf>,
) -> Result<(), String> {
    let o = resolve_oracle(oracle)?;
    let c = o
        .finite
        .as_ref()
        .ok_or("verification needs a finite monoid file, not --free")?;
    let m = run_enumerate(&o, cap)?;
    let mut report = String::new();
    let mut all_pass = true;
    writeln!(report, "elements: {}", m.size()).unwrap();

    let adequacy = verify_left_adequate(&m);
    all_pass &= adequacy.passed();
    writeln!(report, "section: left adequacy").unwrap();
    report.push_str(&adequacy.render());

    let identities = verify_identities(&m, seed);
    all_pass &= identities.passed();
    writeln!(report, "section: derived identities").unwrap();
    report.push_str(&identities.render());

    let relations = verify_relations(&m, c, max_word_len);
    all_pass &= relations.passed();
    writeln!(report, "section: defining relations (words up to length {max_word_len})").unwrap();
    report.push_str(&relations.render());

    writeln!(report, "section: chunks embed in the Cayley graph").unwrap();
    let mut cayley_fail = None;
    for i in 0..m.size() {
        match check_cayley_embedding(m.element(i), c) {
            Ok(r) if r.passed() => {}
            Ok(r) => {
                cayley_fail = Some(format!(
                    "element {i} ({}): {}",
                    m.rep(i),
                    r.violations[0]
                ));
                break;
            }
            Err(e) => {
                cayley_fail = Some(format!("element {i} ({}): {e}", m.rep(i)));
                break;
            }
        }
    }
    match cayley_fail {
        None => writeln!(report, "  pass  all {} elements", m.size()).unwrap(),
        Some(msg) => {
            all_pass = false;
            writeln!(report, "  FAIL  {msg}").unwrap();
        }
    }

    writeln!(report, "section: condensations are trees").unwrap();
    let mut cond_fail = None;
    for i in 0..m.size() {
        let (cond, _) = m.element(i).graph().condensation();
        if let Err(e) = XTree::new(cond) {
            cond_fail = Some(format!("element {i} ({}): {e}", m.rep(i)));
            break;
        }
    }
    match cond_fail {
        None => writeln!(report, "  pass  all {} elements", m.size()).unwrap(),
        Some(msg) => {
            all_pass = false;
            writeln!(report, "  FAIL  {msg}").unwrap();
        }
    }

    writeln!(report, "result: {}", if all_pass { "pass" } else { "FAIL" }).unwrap();
    emit(&report, out)?;
    if all_pass {
        Ok(())
    } else {
        Err("verification failed; see the report".to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Pretzel {
            term,
            oracle,
            format,
            out,
        } => cmd_pretzel(term, oracle, *format, out),
        Cmd::Eq {
            term1,
            term2,
            oracle,
        } => cmd_eq(term1, term2, oracle),
        Cmd::Enum { oracle, cap, out } => cmd_enum(oracle, *cap, out),
        Cmd::Verify {
            oracle,
            cap,
            max_word_len,
            seed,
            out,
        } => cmd_verify(oracle, *cap, *max_word_len, *seed, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
