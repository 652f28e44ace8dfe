//! Weighted spanning-tree sums of complete graphs: forest contraction, the
//! factored-weight closed form, and two subset recursions that serve as
//! mutual cross-checks.

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::closed_form::{phi_eval, ClosedFormError, PairVector};
use crate::exact::{ExactInt, ExactRat};
use crate::forest::{ForestError, ForestInstance};

/// Symmetric nonnegative rational edge weights on the complete graph K_k,
/// zero diagonal. Integer weights encode parallel-edge multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedCompleteGraph {
    w: Vec<Vec<ExactRat>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightedError {
    #[error("weight matrix is empty")]
    Empty,
    #[error("weight row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("weights at ({i}, {j}) and ({j}, {i}) differ")]
    Asymmetric { i: usize, j: usize },
    #[error("diagonal weight at {i} is nonzero")]
    NonzeroDiagonal { i: usize },
    #[error("weight at ({i}, {j}) is negative")]
    NegativeWeight { i: usize, j: usize },
    #[error("vector lengths {x} and {y} differ")]
    LengthMismatch { x: usize, y: usize },
    #[error("k = {k} exceeds the recursion cap {cap}")]
    TooLarge { k: usize, cap: usize },
}

/// The subset recursions visit every ordered set partition of the vertex
/// set, so their cost explodes past this point.
const RECURSION_CAP: usize = 12;

impl WeightedCompleteGraph {
    pub fn new(w: Vec<Vec<ExactRat>>) -> Result<Self, WeightedError> {
        let k = w.len();
        if k == 0 {
            return Err(WeightedError::Empty);
        }
        for (row, r) in w.iter().enumerate() {
            if r.len() != k {
                return Err(WeightedError::NotSquare {
                    row,
                    len: r.len(),
                    expected: k,
                });
            }
        }
        for i in 0..k {
            if !w[i][i].is_zero() {
                return Err(WeightedError::NonzeroDiagonal { i });
            }
            for j in i + 1..k {
                if w[i][j] != w[j][i] {
                    return Err(WeightedError::Asymmetric { i, j });
                }
                if w[i][j].is_negative() {
                    return Err(WeightedError::NegativeWeight { i, j });
                }
            }
        }
        Ok(WeightedCompleteGraph { w })
    }

    pub fn from_integers(rows: &[&[i64]]) -> Result<Self, WeightedError> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| ExactRat::from(ExactInt::from(v))).collect())
                .collect(),
        )
    }

    pub fn k(&self) -> usize {
        self.w.len()
    }

    pub fn weight(&self, i: usize, j: usize) -> &ExactRat {
        &self.w[i][j]
    }

    pub fn row(&self, i: usize) -> &[ExactRat] {
        &self.w[i]
    }
}

/// Vectors x, y inducing the edge weights w(v_i v_j) = x_i y_j + x_j y_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredWeights {
    x: Vec<ExactRat>,
    y: Vec<ExactRat>,
}

impl FactoredWeights {
    pub fn new(x: Vec<ExactRat>, y: Vec<ExactRat>) -> Result<Self, WeightedError> {
        if x.len() != y.len() {
            return Err(WeightedError::LengthMismatch {
                x: x.len(),
                y: y.len(),
            });
        }
        if x.is_empty() {
            return Err(WeightedError::Empty);
        }
        Ok(FactoredWeights { x, y })
    }

    pub fn from_integers(x: &[i64], y: &[i64]) -> Result<Self, WeightedError> {
        let conv = |v: &[i64]| v.iter().map(|&a| ExactRat::from(ExactInt::from(a))).collect();
        Self::new(conv(x), conv(y))
    }

    pub fn k(&self) -> usize {
        self.x.len()
    }

    pub fn pair_vector(&self) -> PairVector {
        PairVector::new(
            self.x
                .iter()
                .cloned()
                .zip(self.y.iter().cloned())
                .collect(),
        )
    }

    /// The induced weight matrix; fails if some induced weight is negative.
    pub fn induced_graph(&self) -> Result<WeightedCompleteGraph, WeightedError> {
        let k = self.k();
        let mut w = vec![vec![ExactRat::zero(); k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let v = &self.x[i] * &self.y[j] + &self.x[j] * &self.y[i];
                w[i][j] = v.clone();
                w[j][i] = v;
            }
        }
        WeightedCompleteGraph::new(w)
    }
}

/// Contracts the forest inside its complete multipartite host: one vertex
/// per component (canonical profile order), the weight between two
/// components counting the host edges that run between them. Components of
/// total sizes c_i, c_j with a_{s,i} vertices in part s share
/// c_i c_j - sum_s a_{s,i} a_{s,j} edges; for a bipartite host this is
/// m_i n_j + m_j n_i.
pub fn contract_forest(instance: &ForestInstance) -> Result<WeightedCompleteGraph, ForestError> {
    let profile = instance.validate()?;
    let totals: Vec<usize> = profile.components.iter().map(|c| c.iter().sum()).collect();
    let k = profile.k;
    let mut w = vec![vec![ExactRat::zero(); k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let same_part: usize = profile.components[i]
                .iter()
                .zip(&profile.components[j])
                .map(|(a, b)| a * b)
                .sum();
            let v = ExactRat::from(ExactInt::from(totals[i] * totals[j] - same_part));
            w[i][j] = v.clone();
            w[j][i] = v;
        }
    }
    Ok(WeightedCompleteGraph { w })
}

/// Closed form for factored weights: tau(K_k, w) = phi(x_1, y_1, ..., x_k, y_k).
pub fn tau_factored(fw: &FactoredWeights) -> Result<ExactRat, ClosedFormError> {
    phi_eval(&fw.pair_vector())
}

/// Hub-merge recursion over nonempty subsets I of the non-hub vertices.
/// `include_hub` selects whether the merged vertex keeps the hub's weights
/// (the signed inclusion-exclusion form) or drops them (the unsigned form).
fn tau_subset_recursion(w: &[Vec<ExactRat>], include_hub: bool, signed: bool) -> ExactRat {
    let k = w.len();
    if k == 1 {
        return ExactRat::one();
    }
    let mut total = ExactRat::zero();
    for mask in 1u32..(1 << (k - 1)) {
        let merged: Vec<usize> = (1..k).filter(|&v| mask >> (v - 1) & 1 == 1).collect();
        let rest: Vec<usize> = (1..k).filter(|&v| mask >> (v - 1) & 1 == 0).collect();
        let mut coeff = ExactRat::one();
        for &i in &merged {
            coeff *= &w[0][i];
        }
        if coeff.is_zero() {
            continue;
        }
        // Vertex 0 of the subproblem is the merged vertex; its weight to a
        // kept vertex j sums the original weights from the merged set.
        let d = 1 + rest.len();
        let mut sub = vec![vec![ExactRat::zero(); d]; d];
        for (j, &vj) in rest.iter().enumerate() {
            let mut s = ExactRat::zero();
            for &r in &merged {
                s += &w[r][vj];
            }
            if include_hub {
                s += &w[0][vj];
            }
            sub[0][j + 1] = s.clone();
            sub[j + 1][0] = s;
        }
        for (a, &va) in rest.iter().enumerate() {
            for (b, &vb) in rest.iter().enumerate() {
                if a != b {
                    sub[a + 1][b + 1] = w[va][vb].clone();
                }
            }
        }
        let term = coeff * tau_subset_recursion(&sub, include_hub, signed);
        if signed && merged.len() % 2 == 0 {
            total -= term;
        } else {
            total += term;
        }
    }
    total
}

fn check_recursion_size(g: &WeightedCompleteGraph) -> Result<(), WeightedError> {
    if g.k() > RECURSION_CAP {
        return Err(WeightedError::TooLarge {
            k: g.k(),
            cap: RECURSION_CAP,
        });
    }
    Ok(())
}

/// tau(K_k, w) = sum over nonempty I not containing the hub of
/// (-1)^(|I|-1) tau(G_I, w_I) prod_{i in I} w(v_1 v_i), where G_I merges
/// I and the hub into one vertex carrying the summed weights.
pub fn tau_inclusion_exclusion(g: &WeightedCompleteGraph) -> Result<ExactRat, WeightedError> {
    check_recursion_size(g)?;
    Ok(tau_subset_recursion(&g.w, true, true))
}

/// The unsigned variant: the merged vertex keeps only the weights
/// contributed by I itself, and no alternating sign appears.
pub fn tau_alt_recursion(g: &WeightedCompleteGraph) -> Result<ExactRat, WeightedError> {
    check_recursion_size(g)?;
    Ok(tau_subset_recursion(&g.w, false, false))
}
