//! Empirical probe of the conjectured lower bound for spanning trees of a
//! complete tripartite graph containing a prescribed forest. The exact count
//! comes from Kirchhoff on the contracted host; the conjectured bound is a
//! closed-form rational. Reports record whether the bound held; nothing here
//! asserts it.

use num::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{ExactInt, ExactRat};
use crate::forest::{Edge, ForestError, ForestInstance};
use crate::kirchhoff::{tau_kirchhoff, OracleError};
use crate::rng::derive_seed;
use crate::weighted::contract_forest;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Component profile of a forest inside a complete tripartite host: entry
/// `components[i][s]` counts the vertices of part `s` in component `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripartiteProfile {
    pub parts: [usize; 3],
    pub components: Vec<[usize; 3]>,
}

/// Kirchhoff on the contracted multigraph handles this many components
/// comfortably; beyond it the scan has no business going.
pub const CONTRACTION_CAP: usize = 64;

/// Shape enumeration bound for [`scan_conjecture`].
pub const SCAN_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripartiteError {
    #[error("expected a tripartite host, got {got} parts")]
    NotTripartite { got: usize },
    #[error("component counts do not sum to the part sizes")]
    PartSumMismatch,
    #[error("profile has no components")]
    NoComponents,
    #[error("degenerate conjecture denominator: {which}")]
    DegenerateDenominator { which: String },
    #[error("forest has {k} components, contraction capped at {cap}")]
    TooLarge { k: usize, cap: usize },
    #[error("scan bound {max_n} exceeds {cap}")]
    ScanTooLarge { max_n: usize, cap: usize },
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl TripartiteProfile {
    pub fn new(
        parts: [usize; 3],
        components: Vec<[usize; 3]>,
    ) -> Result<Self, TripartiteError> {
        if components.is_empty() {
            return Err(TripartiteError::NoComponents);
        }
        let mut sums = [0usize; 3];
        for c in &components {
            for s in 0..3 {
                sums[s] += c[s];
            }
        }
        if sums != parts {
            return Err(TripartiteError::PartSumMismatch);
        }
        Ok(TripartiteProfile { parts, components })
    }

    pub fn from_instance(instance: &ForestInstance) -> Result<Self, TripartiteError> {
        if instance.parts.len() != 3 {
            return Err(TripartiteError::NotTripartite {
                got: instance.parts.len(),
            });
        }
        let profile = instance.validate()?;
        let components = profile
            .components
            .iter()
            .map(|c| [c[0], c[1], c[2]])
            .collect();
        TripartiteProfile::new([instance.parts[0], instance.parts[1], instance.parts[2]], components)
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }
}

/// The conjectured lower bound: with n = n1+n2+n3 and per-component counts
/// (c1, c2, c3),
///
///   D_i = (n-n1) c1 + (n-n2) c2 + (n-n3) c3,
///   N_i = c1 c2 + c1 c3 + c2 c3,
///   RHS = (prod D_i) (1 - sum N_i / D_i) / (n1 n2 + n1 n3 + n2 n3).
pub fn conjecture_rhs(p: &TripartiteProfile) -> Result<ExactRat, TripartiteError> {
    let [n1, n2, n3] = p.parts.map(|v| v as i64);
    let n = n1 + n2 + n3;
    let pair_sum = n1 * n2 + n1 * n3 + n2 * n3;
    if pair_sum == 0 {
        return Err(TripartiteError::DegenerateDenominator {
            which: "n1*n2 + n1*n3 + n2*n3 = 0".to_owned(),
        });
    }
    let mut product = ExactRat::one();
    let mut deficit = ExactRat::zero();
    for (i, c) in p.components.iter().enumerate() {
        let [c1, c2, c3] = c.map(|v| v as i64);
        let d = (n - n1) * c1 + (n - n2) * c2 + (n - n3) * c3;
        if d == 0 {
            return Err(TripartiteError::DegenerateDenominator {
                which: format!("component {i}"),
            });
        }
        let numer = c1 * c2 + c1 * c3 + c2 * c3;
        product *= ExactRat::from(ExactInt::from(d));
        deficit += ExactRat::new(ExactInt::from(numer), ExactInt::from(d));
    }
    Ok(product * (ExactRat::one() - deficit) / ExactRat::from(ExactInt::from(pair_sum)))
}

/// Exact number of spanning trees of the tripartite host containing the
/// forest, via Kirchhoff on the contracted graph.
pub fn tau_forest_tripartite(instance: &ForestInstance) -> Result<ExactInt, TripartiteError> {
    let profile = TripartiteProfile::from_instance(instance)?;
    if profile.k() > CONTRACTION_CAP {
        return Err(TripartiteError::TooLarge {
            k: profile.k(),
            cap: CONTRACTION_CAP,
        });
    }
    Ok(tau_kirchhoff(&contract_forest(instance)?)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub parts: [usize; 3],
    pub edges: Vec<Edge>,
    pub k: usize,
    #[serde(with = "crate::exact::int_string")]
    pub lhs: ExactInt,
    #[serde(with = "crate::exact::rat_object")]
    pub rhs: ExactRat,
    pub holds: bool,
    pub equality: bool,
}

/// Compares the exact count against the conjectured bound. The outcome is
/// recorded, never asserted: a `holds: false` report is a finding to
/// surface, not an error.
pub fn check_conjecture(instance: &ForestInstance) -> Result<ConjectureReport, TripartiteError> {
    let profile = TripartiteProfile::from_instance(instance)?;
    let lhs = tau_forest_tripartite(instance)?;
    let rhs = conjecture_rhs(&profile)?;
    let lhs_rat = ExactRat::from(lhs.clone());
    Ok(ConjectureReport {
        parts: profile.parts,
        edges: instance.edges.clone(),
        k: profile.k(),
        holds: lhs_rat >= rhs,
        equality: lhs_rat == rhs,
        lhs,
        rhs,
    })
}

/// Checks `trials_per_shape` seeded random forests for every shape
/// 1 <= n1 <= n2 <= n3 with n1+n2+n3 <= max_n. The component-count target of
/// each trial is drawn uniformly from [1, n]. Shapes run in parallel;
/// per-trial seeds derive from (seed, shape, trial), so the report list is
/// deterministic in the inputs.
pub fn scan_conjecture(
    max_n: usize,
    trials_per_shape: usize,
    seed: u64,
) -> Result<Vec<ConjectureReport>, TripartiteError> {
    if max_n > SCAN_CAP {
        return Err(TripartiteError::ScanTooLarge {
            max_n,
            cap: SCAN_CAP,
        });
    }
    let mut shapes = Vec::new();
    for n1 in 1..=max_n {
        for n2 in n1..=max_n {
            for n3 in n2..=max_n {
                if n1 + n2 + n3 <= max_n {
                    shapes.push([n1, n2, n3]);
                }
            }
        }
    }
    let per_shape: Vec<Vec<ConjectureReport>> = shapes
        .par_iter()
        .map(|&shape| {
            let n = shape.iter().sum::<usize>();
            let lane = ((shape[0] * SCAN_CAP + shape[1]) * SCAN_CAP + shape[2]) as u64;
            (0..trials_per_shape)
                .map(|trial| {
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(derive_seed(seed, lane, trial as u64));
                    let target = rng.random_range(1..=n);
                    let instance = random_tripartite_forest(shape, target, rng.random())?;
                    check_conjecture(&instance)
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(per_shape.into_iter().flatten().collect())
}

fn random_tripartite_forest(
    shape: [usize; 3],
    target: usize,
    seed: u64,
) -> Result<ForestInstance, TripartiteError> {
    Ok(crate::forest::random_forest(&shape, target, seed)?)
}

/// One report per line, in scan order.
pub fn write_jsonl<W: std::io::Write>(
    reports: &[ConjectureReport],
    mut out: W,
) -> std::io::Result<()> {
    for report in reports {
        serde_json::to_writer(&mut out, report)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
