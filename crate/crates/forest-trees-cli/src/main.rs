//! Command-line front end: exact counts from JSON instances, phi evaluation,
//! identity suites, the tripartite bound scan, and the acceptance checks.
//!
//! Exit codes: 0 success, 1 validation or argument error, 2 internal
//! assertion (oracle mismatch, failed selftest), 3 counterexample found by a
//! suite. Big numbers are printed as decimal strings.

use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use forest_trees::closed_form::{phi_eval, tau_forest, ClosedFormError, PairVector};
use forest_trees::exact::{ExactInt, ExactRat};
use forest_trees::forest::ForestInstance;
use forest_trees::identities::{run_suite, IdentityId};
use forest_trees::kirchhoff::{count_forced_trees, tau_kirchhoff};
use forest_trees::selftest::{list_checks, run_all};
use forest_trees::tripartite::{scan_conjecture, tau_forest_tripartite, write_jsonl};
use forest_trees::weighted::contract_forest;

#[derive(Parser)]
#[command(name = "forest-trees", version, about = "Exact spanning-tree counts through a fixed forest")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count the spanning trees of the host containing the forest in a JSON
    /// instance file.
    Count {
        /// Instance file: {"parts":[m,n],"edges":[[[0,i],[1,j]],...]}
        instance: PathBuf,
        /// Independent oracle to compare against.
        #[arg(long, value_enum, default_value_t = OracleChoice::None)]
        oracle: OracleChoice,
    },
    /// Evaluate phi at the rational point x1 y1 x2 y2 ...
    Phi {
        /// Coordinates, each an integer or numerator/denominator pair.
        #[arg(allow_hyphen_values = true)]
        coordinates: Vec<String>,
    },
    /// Check algebraic identities at sampled rational points.
    Identities {
        /// Comma-separated identity names, or "all".
        #[arg(long, default_value = "all")]
        ids: String,
        /// Sizes to sample: a..b (inclusive) or a comma-separated list.
        #[arg(long, default_value = "1..6")]
        sizes: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Scan the tripartite lower-bound conjecture on random forests.
    Conjecture {
        #[arg(long = "max-n", default_value_t = 6)]
        max_n: usize,
        /// Random forests per host shape.
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write one JSON report per line to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance checks.
    Selftest {
        /// List the check names without running them.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleChoice {
    None,
    Kirchhoff,
    Enumerate,
}

/// A failed command: the message goes to stderr, the code to the shell.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn assertion(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

fn invalid<E: std::fmt::Display>(e: E) -> Failure {
    Failure::validation(e.to_string())
}

fn main() -> ExitCode {
    if let Err(message) = configure_threads() {
        eprintln!("{message}");
        return ExitCode::from(1);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if err.use_stderr() {
                eprint!("{err}");
                return ExitCode::from(1);
            }
            // --help and --version print to stdout and exit 0.
            print!("{err}");
            return ExitCode::SUCCESS;
        }
    };
    let result = match cli.command {
        Command::Count { instance, oracle } => cmd_count(&instance, oracle),
        Command::Phi { coordinates } => cmd_phi(&coordinates),
        Command::Identities {
            ids,
            sizes,
            trials,
            seed,
        } => cmd_identities(&ids, &sizes, trials, seed),
        Command::Conjecture {
            max_n,
            trials,
            seed,
            out,
        } => cmd_conjecture(max_n, trials, seed, out.as_deref()),
        Command::Selftest { list } => cmd_selftest(list),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("{}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let raw = match std::env::var("FOREST_TREES_THREADS") {
        Ok(raw) => raw,
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(e) => return Err(format!("FOREST_TREES_THREADS: {e}")),
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("FOREST_TREES_THREADS={raw:?} is not a positive thread count"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn cmd_count(path: &std::path::Path, oracle: OracleChoice) -> Result<u8, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    let instance: ForestInstance = serde_json::from_str(&text)
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    let profile = instance.validate().map_err(invalid)?;
    let tau = match instance.parts.len() {
        2 => tau_forest(instance.parts[0], instance.parts[1], &profile).map_err(|e| match e {
            ClosedFormError::DivisibilityViolation { .. } => Failure::assertion(e.to_string()),
            other => invalid(other),
        })?,
        3 => tau_forest_tripartite(&instance).map_err(invalid)?,
        parts => {
            return Err(Failure::validation(format!(
                "host has {parts} parts; expected a bipartite or tripartite instance"
            )))
        }
    };
    let oracle_result: Option<(&str, ExactInt)> = match oracle {
        OracleChoice::None => None,
        OracleChoice::Kirchhoff => Some((
            "kirchhoff",
            tau_kirchhoff(&contract_forest(&instance).map_err(invalid)?).map_err(invalid)?,
        )),
        OracleChoice::Enumerate => {
            Some(("enumerate", count_forced_trees(&instance).map_err(invalid)?))
        }
    };
    let verdict = oracle_result.as_ref().map(|(_, value)| *value == tau);
    let payload = json!({
        "tau": tau.to_string(),
        "profile": profile.components,
        "oracle": oracle_result.as_ref().map(|(name, value)| json!({
            "name": name,
            "tau": value.to_string(),
            "match": verdict.unwrap(),
        })),
    });
    println!("{payload}");
    if verdict == Some(false) {
        let (name, value) = oracle_result.unwrap();
        return Err(Failure::assertion(format!(
            "{name} oracle disagrees: closed form {tau}, oracle {value}"
        )));
    }
    Ok(0)
}

fn parse_rational(raw: &str) -> Result<ExactRat, Failure> {
    let bad = |detail: &str| Failure::validation(format!("coordinate {raw:?}: {detail}"));
    let (num, den) = match raw.split_once('/') {
        None => (raw, "1"),
        Some(parts) => parts,
    };
    let num: ExactInt = num.parse().map_err(|_| bad("numerator is not an integer"))?;
    let den: ExactInt = den.parse().map_err(|_| bad("denominator is not an integer"))?;
    if den == ExactInt::from(0) {
        return Err(bad("zero denominator"));
    }
    Ok(ExactRat::new(num, den))
}

fn cmd_phi(coordinates: &[String]) -> Result<u8, Failure> {
    if coordinates.is_empty() || coordinates.len() % 2 != 0 {
        return Err(Failure::validation(format!(
            "phi takes an even number of coordinates (x1 y1 x2 y2 ...), got {}",
            coordinates.len()
        )));
    }
    let values: Vec<ExactRat> = coordinates
        .iter()
        .map(|raw| parse_rational(raw))
        .collect::<Result<_, _>>()?;
    let pairs = values
        .chunks_exact(2)
        .map(|pair| (pair[0].clone(), pair[1].clone()))
        .collect();
    let phi = phi_eval(&PairVector::new(pairs)).map_err(invalid)?;
    println!("{}", json!(phi.to_string()));
    Ok(0)
}

fn parse_sizes(raw: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::validation(format!("sizes {raw:?}: expected a..b or a comma list"));
    let sizes = if let Some((lo, hi)) = raw.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        (lo..=hi).collect()
    } else {
        raw.split(',')
            .map(|part| part.trim().parse().map_err(|_| bad()))
            .collect::<Result<Vec<usize>, _>>()?
    };
    if sizes.is_empty() {
        return Err(bad());
    }
    Ok(sizes)
}

fn cmd_identities(ids: &str, sizes: &str, trials: usize, seed: u64) -> Result<u8, Failure> {
    let ids: Vec<IdentityId> = if ids.trim() == "all" {
        IdentityId::ALL.to_vec()
    } else {
        ids.split(',')
            .map(|name| name.trim().parse().map_err(invalid))
            .collect::<Result<_, _>>()?
    };
    let sizes = parse_sizes(sizes)?;
    let reports = ids
        .iter()
        .map(|&id| run_suite(id, &sizes, trials, seed).map_err(invalid))
        .collect::<Result<Vec<_>, _>>()?;
    let failures: u64 = reports.iter().map(|r| r.fail).sum();
    let payload = json!({
        "seed": seed,
        "trials": trials,
        "sizes": sizes,
        "reports": reports,
    });
    println!("{payload}");
    Ok(if failures > 0 { 3 } else { 0 })
}

fn cmd_conjecture(
    max_n: usize,
    trials: usize,
    seed: u64,
    out: Option<&std::path::Path>,
) -> Result<u8, Failure> {
    let reports = scan_conjecture(max_n, trials, seed).map_err(invalid)?;
    if let Some(path) = out {
        let file = fs::File::create(path)
            .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
        write_jsonl(&reports, BufWriter::new(file)).map_err(invalid)?;
    }
    let k_le_2 = reports.iter().filter(|r| r.k <= 2).count();
    let k_le_2_equality = reports.iter().filter(|r| r.k <= 2 && r.equality).count();
    let violations = reports.iter().filter(|r| !r.holds).count();
    let payload = json!({
        "seed": seed,
        "max_n": max_n,
        "trials_per_shape": trials,
        "reports": reports.len(),
        "k_le_2": k_le_2,
        "k_le_2_equality": k_le_2_equality,
        "violations": violations,
        "out": out.map(|p| p.display().to_string()),
    });
    println!("{payload}");
    Ok(if violations > 0 { 3 } else { 0 })
}

fn cmd_selftest(list: bool) -> Result<u8, Failure> {
    if list {
        println!("{}", json!(list_checks()));
        return Ok(0);
    }
    let outcomes = run_all();
    println!("{}", serde_json::to_string(&outcomes).map_err(invalid)?);
    Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { 2 })
}
