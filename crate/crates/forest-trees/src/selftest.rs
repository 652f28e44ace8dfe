//! The acceptance suite behind the `selftest` command: ten end-to-end
//! checks, each comparing an arithmetic path against an independent oracle
//! or pinning a contract (determinism, divisibility, runtime budgets).

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num::{Integer, Zero};
use serde::Serialize;
use thiserror::Error;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::closed_form::{
    tau_forest, tau_forest_numerator, tau_matching, tau_moon, tau_tree, ClosedFormError,
};
use crate::exact::{ExactInt, ExactRat};
use crate::forest::{enumerate_forests, random_forest, ComponentProfile};
use crate::identities::{evaluate_identity, run_suite, sample_point, IdentityId, IdentityPoint};
use crate::kirchhoff::{count_forced_trees, tau_kirchhoff};
use crate::rng::derive_seed;
use crate::tripartite::{check_conjecture, scan_conjecture, write_jsonl};
use crate::weighted::{
    contract_forest, tau_alt_recursion, tau_factored, tau_inclusion_exclusion, FactoredWeights,
    WeightedCompleteGraph,
};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub millis: u64,
    pub details: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelftestError {
    #[error("unknown check {name:?}")]
    UnknownCheck { name: String },
}

struct Check {
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Result<String, String>,
}

static CHECKS: &[Check] = &[
    Check {
        name: "closed-form-vs-enumeration",
        budget: Some(Duration::from_secs(60)),
        run: check_enumeration,
    },
    Check {
        name: "closed-form-vs-matrix-tree",
        budget: Some(Duration::from_secs(120)),
        run: check_matrix_tree,
    },
    Check {
        name: "specializations",
        budget: Some(Duration::from_secs(30)),
        run: check_specializations,
    },
    Check {
        name: "moon-complete-graph",
        budget: None,
        run: check_moon,
    },
    Check {
        name: "factored-weights",
        budget: None,
        run: check_factored,
    },
    Check {
        name: "recursions",
        budget: None,
        run: check_recursions,
    },
    Check {
        name: "identity-suites",
        budget: Some(Duration::from_secs(120)),
        run: check_identities,
    },
    Check {
        name: "divisibility",
        budget: None,
        run: check_divisibility,
    },
    Check {
        name: "conjecture-harness",
        budget: None,
        run: check_conjecture_harness,
    },
    Check {
        name: "determinism",
        budget: None,
        run: check_determinism,
    },
];

pub fn list_checks() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

pub fn run_check(name: &str) -> Result<CheckOutcome, SelftestError> {
    let check = CHECKS
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| SelftestError::UnknownCheck {
            name: name.to_owned(),
        })?;
    Ok(execute(check))
}

pub fn run_all() -> Vec<CheckOutcome> {
    CHECKS.iter().map(execute).collect()
}

fn execute(check: &Check) -> CheckOutcome {
    let start = Instant::now();
    let result = (check.run)();
    let elapsed = start.elapsed();
    let (mut passed, mut details) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(budget) = check.budget {
        if elapsed > budget {
            passed = false;
            details = format!("{details}; exceeded the {}s budget", budget.as_secs());
        }
    }
    CheckOutcome {
        name: check.name,
        passed,
        millis: elapsed.as_millis() as u64,
        details,
    }
}

fn err_str<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// The closed form against brute-force tree enumeration, on every forest of
/// every host with at most six vertices.
fn check_enumeration() -> Result<String, String> {
    let mut hosts = 0usize;
    let mut forests = 0usize;
    for m in 1..=5usize {
        for n in m..=5 {
            if m + n > 6 {
                continue;
            }
            hosts += 1;
            for forest in enumerate_forests(&[m, n], usize::MAX).map_err(err_str)? {
                let profile = forest.validate().map_err(err_str)?;
                let closed = tau_forest(m, n, &profile).map_err(err_str)?;
                let counted = count_forced_trees(&forest).map_err(err_str)?;
                if closed != counted {
                    return Err(format!(
                        "K_{{{m},{n}}}: closed form {closed} != enumeration {counted} on {forest:?}"
                    ));
                }
                forests += 1;
            }
        }
    }
    Ok(format!(
        "{forests} forests across {hosts} hosts agree with enumeration"
    ))
}

const MATRIX_TREE_HOST_MAX: usize = 30;
const MATRIX_TREE_TRIALS: usize = 200;
const MATRIX_TREE_BUDGET: Duration = Duration::from_secs(120);
const SEED_MATRIX_TREE: u64 = 2;

struct MatrixTreeScan {
    hosts: usize,
    forests: usize,
    mismatches: Vec<String>,
    indivisible: Vec<String>,
    elapsed: Duration,
}

/// One pass shared by the matrix-tree and divisibility checks: seeded random
/// forests on every host 1 <= m <= n <= 30, closed form against Kirchhoff,
/// with the pre-division numerator tracked separately.
fn matrix_tree_scan() -> &'static MatrixTreeScan {
    static SCAN: OnceLock<MatrixTreeScan> = OnceLock::new();
    SCAN.get_or_init(|| {
        let start = Instant::now();
        let hosts: Vec<(usize, usize)> = (1..=MATRIX_TREE_HOST_MAX)
            .flat_map(|m| (m..=MATRIX_TREE_HOST_MAX).map(move |n| (m, n)))
            .collect();
        let per_host: Vec<(usize, Vec<String>, Vec<String>)> = hosts
            .par_iter()
            .map(|&(m, n)| scan_host(m, n))
            .collect();
        let mut forests = 0;
        let mut mismatches = Vec::new();
        let mut indivisible = Vec::new();
        for (count, mut bad, mut odd) in per_host {
            forests += count;
            mismatches.append(&mut bad);
            indivisible.append(&mut odd);
        }
        MatrixTreeScan {
            hosts: hosts.len(),
            forests,
            mismatches,
            indivisible,
            elapsed: start.elapsed(),
        }
    })
}

fn scan_host(m: usize, n: usize) -> (usize, Vec<String>, Vec<String>) {
    let mut forests = 0;
    let mut mismatches = Vec::new();
    let mut indivisible = Vec::new();
    let lane = (m * 64 + n) as u64;
    let divisor = ExactInt::from(m as i64) * ExactInt::from(n as i64);
    for trial in 0..MATRIX_TREE_TRIALS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(SEED_MATRIX_TREE, lane, trial as u64));
        let target = rng.random_range(1..=m + n);
        let tag = || format!("K_{{{m},{n}}} trial {trial} (target {target})");
        let instance = match random_forest(&[m, n], target, rng.random()) {
            Ok(instance) => instance,
            Err(e) => {
                mismatches.push(format!("{}: {e}", tag()));
                continue;
            }
        };
        forests += 1;
        let outcome = (|| -> Result<(), String> {
            let profile = instance.validate().map_err(err_str)?;
            let numerator = tau_forest_numerator(m, n, &profile).map_err(err_str)?;
            if !numerator.mod_floor(&divisor).is_zero() {
                indivisible.push(format!("{}: numerator {numerator}", tag()));
            }
            let closed = match tau_forest(m, n, &profile) {
                Ok(v) => v,
                Err(ClosedFormError::DivisibilityViolation { numerator, divisor }) => {
                    indivisible.push(format!("{}: {numerator} vs {divisor}", tag()));
                    return Ok(());
                }
                Err(e) => return Err(e.to_string()),
            };
            let oracle =
                tau_kirchhoff(&contract_forest(&instance).map_err(err_str)?).map_err(err_str)?;
            if closed != oracle {
                return Err(format!("closed form {closed} != matrix-tree {oracle}"));
            }
            Ok(())
        })();
        if let Err(detail) = outcome {
            mismatches.push(format!("{}: {detail}", tag()));
        }
    }
    (forests, mismatches, indivisible)
}

fn head(list: &[String]) -> String {
    list.iter()
        .take(3)
        .cloned()
        .collect::<Vec<_>>()
        .join("; ")
}

fn check_matrix_tree() -> Result<String, String> {
    let scan = matrix_tree_scan();
    if !scan.mismatches.is_empty() {
        return Err(format!(
            "{} of {} forests disagree with the matrix-tree oracle: {}",
            scan.mismatches.len(),
            scan.forests,
            head(&scan.mismatches)
        ));
    }
    if scan.elapsed > MATRIX_TREE_BUDGET {
        return Err(format!(
            "scan took {}s, budget {}s",
            scan.elapsed.as_secs(),
            MATRIX_TREE_BUDGET.as_secs()
        ));
    }
    Ok(format!(
        "{} forests over {} hosts match the matrix-tree oracle ({} ms)",
        scan.forests,
        scan.hosts,
        scan.elapsed.as_millis()
    ))
}

fn check_divisibility() -> Result<String, String> {
    let scan = matrix_tree_scan();
    if scan.indivisible.is_empty() {
        Ok(format!(
            "pre-division numerator divisible by m*n in all {} evaluations",
            scan.forests
        ))
    } else {
        Err(format!(
            "{} numerators not divisible by m*n: {}",
            scan.indivisible.len(),
            head(&scan.indivisible)
        ))
    }
}

/// Matching and tree specializations against the general closed form over
/// their whole parameter range for m, n <= 12.
fn check_specializations() -> Result<String, String> {
    let mut cases = 0usize;
    for m in 1..=12usize {
        for n in 1..=12usize {
            for k in 0..=m.min(n) {
                let mut components: Vec<Vec<usize>> = Vec::new();
                components.extend(std::iter::repeat_n(vec![1, 1], k));
                components.extend(std::iter::repeat_n(vec![1, 0], m - k));
                components.extend(std::iter::repeat_n(vec![0, 1], n - k));
                let profile = ComponentProfile::from_components(components);
                let special = tau_matching(m, n, k).map_err(err_str)?;
                let general = tau_forest(m, n, &profile).map_err(err_str)?;
                if special != general {
                    return Err(format!(
                        "matching m={m} n={n} k={k}: {special} != {general}"
                    ));
                }
                cases += 1;
            }
            for s in 1..=m {
                for t in 1..=n {
                    let mut components: Vec<Vec<usize>> = vec![vec![s, t]];
                    components.extend(std::iter::repeat_n(vec![1, 0], m - s));
                    components.extend(std::iter::repeat_n(vec![0, 1], n - t));
                    let profile = ComponentProfile::from_components(components);
                    let special = tau_tree(m, n, s, t).map_err(err_str)?;
                    let general = tau_forest(m, n, &profile).map_err(err_str)?;
                    if special != general {
                        return Err(format!(
                            "tree m={m} n={n} s={s} t={t}: {special} != {general}"
                        ));
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!(
        "{cases} matching/tree specializations match the closed form"
    ))
}

/// Moon's complete-graph formula against forced-tree enumeration on every
/// forest of K_n, n <= 6 (K_n as the all-singleton multipartite host).
fn check_moon() -> Result<String, String> {
    let mut forests = 0usize;
    for n in 1..=6usize {
        let parts = vec![1usize; n];
        for forest in enumerate_forests(&parts, usize::MAX).map_err(err_str)? {
            let profile = forest.validate().map_err(err_str)?;
            let orders: Vec<usize> = profile
                .components
                .iter()
                .map(|c| c.iter().sum())
                .collect();
            let moon = tau_moon(n, &orders).map_err(err_str)?;
            let counted = count_forced_trees(&forest).map_err(err_str)?;
            if moon != counted {
                return Err(format!(
                    "K_{n} orders {orders:?}: Moon {moon} != enumeration {counted}"
                ));
            }
            forests += 1;
        }
    }
    Ok(format!(
        "Moon's formula matches enumeration on {forests} forests of K_1..K_6"
    ))
}

const SEED_FACTORED: u64 = 5;

/// The factored-weight evaluation against Kirchhoff on the induced graph,
/// for 500 random nonnegative integer points.
fn check_factored() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_FACTORED);
    let mut checked = 0usize;
    while checked < 500 {
        let k = rng.random_range(1..=8usize);
        let x: Vec<i64> = (0..k).map(|_| rng.random_range(0..=6)).collect();
        let y: Vec<i64> = (0..k).map(|_| rng.random_range(0..=6)).collect();
        // phi guards: positive coordinate sums and no all-zero pair.
        if x.iter().all(|&v| v == 0)
            || y.iter().all(|&v| v == 0)
            || x.iter().zip(&y).any(|(&a, &b)| a == 0 && b == 0)
        {
            continue;
        }
        let fw = FactoredWeights::from_integers(&x, &y).map_err(err_str)?;
        let factored = tau_factored(&fw).map_err(err_str)?;
        let oracle = tau_kirchhoff(&fw.induced_graph().map_err(err_str)?).map_err(err_str)?;
        if factored != ExactRat::from(oracle.clone()) {
            return Err(format!(
                "x={x:?} y={y:?}: factored {factored} != matrix-tree {oracle}"
            ));
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} factored-weight points match the matrix-tree oracle"
    ))
}

const SEED_RECURSIONS: u64 = 6;

/// Both subset recursions against Kirchhoff on 500 random integer-weighted
/// complete graphs with k <= 8.
fn check_recursions() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_RECURSIONS);
    for trial in 0..500usize {
        let k = rng.random_range(1..=8usize);
        let mut rows = vec![vec![0i64; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let w = rng.random_range(0..=6);
                rows[i][j] = w;
                rows[j][i] = w;
            }
        }
        let borrowed: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        let g = WeightedCompleteGraph::from_integers(&borrowed).map_err(err_str)?;
        let signed = tau_inclusion_exclusion(&g).map_err(err_str)?;
        let unsigned = tau_alt_recursion(&g).map_err(err_str)?;
        let oracle = ExactRat::from(tau_kirchhoff(&g).map_err(err_str)?);
        if signed != oracle || unsigned != oracle {
            return Err(format!(
                "trial {trial} (k={k}): recursion {signed} / {unsigned} vs matrix-tree {oracle}"
            ));
        }
    }
    Ok("500 weighted graphs: both recursions match the matrix-tree oracle".to_owned())
}

const SEED_IDENTITIES: u64 = 7;

fn check_identities() -> Result<String, String> {
    let sizes = [1, 2, 3, 4, 5, 6];
    let mut points = 0u64;
    for id in IdentityId::ALL {
        let report = run_suite(id, &sizes, 100, SEED_IDENTITIES).map_err(err_str)?;
        if report.fail > 0 {
            return Err(format!(
                "{id}: {} of {} points failed, first: {}",
                report.fail,
                report.pass + report.fail,
                serde_json::to_string(&report.counterexamples[0]).map_err(err_str)?
            ));
        }
        points += report.pass;
    }
    // Degenerate coordinate sums are allowed by the L21 guards; pin both.
    let rat = |v: i64| ExactRat::from(ExactInt::from(v));
    for (a, b) in [([1, -1], [1, 1]), ([1, 1], [1, -1])] {
        let point = IdentityPoint::pairs(a.map(rat).to_vec(), b.map(rat).to_vec());
        let (lhs, rhs) = evaluate_identity(IdentityId::L21, &point).map_err(err_str)?;
        if lhs != rhs {
            return Err(format!("L21 degenerate case {a:?}/{b:?}: {lhs} != {rhs}"));
        }
    }
    Ok(format!(
        "{points} guarded points across 10 identity suites, plus degenerate L21 cases"
    ))
}

const SEED_CONJECTURE: u64 = 9;

/// Exhaustive tripartite equality at k <= 2 on hosts with at most six
/// vertices, then a completeness scan to n <= 9. A failed bound is reported
/// in the details, never asserted.
fn check_conjecture_harness() -> Result<String, String> {
    let mut equality_cases = 0usize;
    let mut recorded = 0usize;
    let mut violations = Vec::new();
    for n1 in 1..=4usize {
        for n2 in 1..=4usize {
            for n3 in 1..=4usize {
                if n1 + n2 + n3 > 6 {
                    continue;
                }
                for forest in enumerate_forests(&[n1, n2, n3], usize::MAX).map_err(err_str)? {
                    let report = check_conjecture(&forest).map_err(err_str)?;
                    let witness = count_forced_trees(&forest).map_err(err_str)?;
                    if report.lhs != witness {
                        return Err(format!(
                            "K_{{{n1},{n2},{n3}}}: contraction count {} != enumeration {witness} on {forest:?}",
                            report.lhs
                        ));
                    }
                    if report.k <= 2 {
                        if !report.equality {
                            return Err(format!(
                                "k={} forest of K_{{{n1},{n2},{n3}}} misses equality: lhs {} rhs {} on {forest:?}",
                                report.k, report.lhs, report.rhs
                            ));
                        }
                        equality_cases += 1;
                    } else {
                        recorded += 1;
                        if !report.holds {
                            violations.push(format!("{report:?}"));
                        }
                    }
                }
            }
        }
    }
    let scanned = scan_conjecture(9, 20, SEED_CONJECTURE).map_err(err_str)?;
    for report in &scanned {
        if !report.holds {
            violations.push(format!("{report:?}"));
        }
    }
    let status = if violations.is_empty() {
        "bound held everywhere".to_owned()
    } else {
        format!(
            "BOUND FAILED on {} instances (finding, not a bug): {}",
            violations.len(),
            head(&violations)
        )
    };
    Ok(format!(
        "equality on all {equality_cases} forests with k <= 2; {} larger instances recorded; {status}",
        recorded + scanned.len()
    ))
}

const SEED_DETERMINISM: u64 = 10;

/// Every seeded artifact serialized twice must be byte-identical.
fn check_determinism() -> Result<String, String> {
    let suite = || -> Result<String, String> {
        serde_json::to_string(&run_suite(IdentityId::T31, &[2, 3, 4], 10, SEED_DETERMINISM).map_err(err_str)?)
            .map_err(err_str)
    };
    if suite()? != suite()? {
        return Err("identity suite reports differ between runs".to_owned());
    }
    let scan = || -> Result<Vec<u8>, String> {
        let mut buf = Vec::new();
        write_jsonl(&scan_conjecture(5, 4, SEED_DETERMINISM).map_err(err_str)?, &mut buf)
            .map_err(err_str)?;
        Ok(buf)
    };
    if scan()? != scan()? {
        return Err("conjecture scans differ between runs".to_owned());
    }
    let forest = || -> Result<String, String> {
        serde_json::to_string(&random_forest(&[4, 5], 3, SEED_DETERMINISM).map_err(err_str)?)
            .map_err(err_str)
    };
    if forest()? != forest()? {
        return Err("random forests differ between runs".to_owned());
    }
    let point = || -> Result<String, String> {
        serde_json::to_string(&sample_point(IdentityId::L25X, 5, SEED_DETERMINISM).map_err(err_str)?)
            .map_err(err_str)
    };
    if point()? != point()? {
        return Err("sampled identity points differ between runs".to_owned());
    }
    Ok("suite reports, scans, forests and sampled points are byte-identical across reruns".to_owned())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_suite_lists_ten_named_checks() {
        let names = list_checks();
        assert_eq!(names.len(), 10);
        assert!(names.contains(&"divisibility"));
        assert!(matches!(
            run_check("no-such-check"),
            Err(SelftestError::UnknownCheck { .. })
        ));
    }

    #[test]
    fn the_cheap_checks_pass() {
        for name in ["moon-complete-graph", "determinism"] {
            let outcome = run_check(name).unwrap();
            assert!(outcome.passed, "{name}: {}", outcome.details);
        }
    }
}
