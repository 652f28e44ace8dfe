//! Independent ground truth for every spanning-tree count in this crate:
//! the Matrix-Tree determinant computed by fraction-free (Bareiss)
//! elimination, and literal enumeration for tiny instances.

use num::{One, Zero};
use thiserror::Error;

use crate::exact::ExactInt;
use crate::forest::{ForestError, ForestInstance};
use crate::weighted::WeightedCompleteGraph;

/// Square matrix of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: Vec<Vec<ExactInt>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("weight at ({i}, {j}) is not an integer")]
    NonIntegerWeights { i: usize, j: usize },
    #[error("vertex index {index} is out of range for k = {k}")]
    IndexOutOfRange { index: usize, k: usize },
    #[error("instance of size {size} exceeds the enumeration cap {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("matrix row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error(transparent)]
    Forest(#[from] ForestError),
}

const ENUMERATE_CAP: usize = 9;

impl IntegerMatrix {
    pub fn new(rows: Vec<Vec<ExactInt>>) -> Result<Self, OracleError> {
        let d = rows.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(OracleError::NotSquare {
                    row,
                    len: r.len(),
                    expected: d,
                });
            }
        }
        Ok(IntegerMatrix { rows })
    }

    pub fn from_integers(rows: &[&[i64]]) -> Result<Self, OracleError> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| ExactInt::from(v)).collect())
                .collect(),
        )
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &ExactInt {
        &self.rows[i][j]
    }
}

/// Weighted Laplacian L = D - W with row and column `drop` deleted.
pub fn laplacian_minor(
    g: &WeightedCompleteGraph,
    drop: usize,
) -> Result<IntegerMatrix, OracleError> {
    let k = g.k();
    if drop >= k {
        return Err(OracleError::IndexOutOfRange { index: drop, k });
    }
    let mut weights = vec![vec![ExactInt::zero(); k]; k];
    for i in 0..k {
        for j in 0..k {
            let w = g.weight(i, j);
            if !w.is_integer() {
                return Err(OracleError::NonIntegerWeights { i, j });
            }
            weights[i][j] = w.to_integer();
        }
    }
    let kept: Vec<usize> = (0..k).filter(|&i| i != drop).collect();
    let rows = kept
        .iter()
        .map(|&i| {
            kept.iter()
                .map(|&j| {
                    if i == j {
                        weights[i].iter().sum()
                    } else {
                        -&weights[i][j]
                    }
                })
                .collect()
        })
        .collect();
    Ok(IntegerMatrix { rows })
}

/// Fraction-free elimination: every division is exact, intermediates stay
/// integral, zero pivots are handled by row swaps (an all-zero column means
/// the determinant is zero). The empty matrix has determinant 1.
pub fn det_bareiss(matrix: &IntegerMatrix) -> ExactInt {
    let n = matrix.dimension();
    if n == 0 {
        return ExactInt::one();
    }
    let mut m = matrix.rows.clone();
    let mut sign = 1i32;
    let mut prev = ExactInt::one();
    for i in 0..n {
        if m[i][i].is_zero() {
            match (i + 1..n).find(|&r| !m[r][i].is_zero()) {
                Some(r) => {
                    m.swap(i, r);
                    sign = -sign;
                }
                None => return ExactInt::zero(),
            }
        }
        for r in i + 1..n {
            for c in i + 1..n {
                let t = &m[r][c] * &m[i][i] - &m[r][i] * &m[i][c];
                m[r][c] = t / &prev;
            }
            m[r][i] = ExactInt::zero();
        }
        prev = m[i][i].clone();
    }
    let det = std::mem::take(&mut m[n - 1][n - 1]);
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Matrix-Tree count: determinant of the Laplacian minor (vertex 0 dropped
/// by convention; the value is independent of that choice).
pub fn tau_kirchhoff(g: &WeightedCompleteGraph) -> Result<ExactInt, OracleError> {
    Ok(det_bareiss(&laplacian_minor(g, 0)?))
}

/// Backtracks over edges in index order, either skipping an edge or taking
/// it when it joins two distinct components; each spanning tree is reached
/// exactly once, contributing the product of its preset-excluded weights.
fn tree_sum(
    total: usize,
    preset: &[(usize, usize)],
    edges: &[(usize, usize, ExactInt)],
) -> ExactInt {
    struct State<'a> {
        edges: &'a [(usize, usize, ExactInt)],
        parent: Vec<usize>,
        sum: ExactInt,
    }

    fn find(parent: &[usize], mut v: usize) -> usize {
        while parent[v] != v {
            v = parent[v];
        }
        v
    }

    fn recurse(state: &mut State<'_>, pos: usize, components: usize, product: &ExactInt) {
        if components == 1 {
            state.sum += product;
            return;
        }
        if state.edges.len() - pos < components - 1 {
            return;
        }
        let (a, b, ref w) = state.edges[pos];
        let (ra, rb) = (find(&state.parent, a), find(&state.parent, b));
        if ra != rb {
            state.parent[ra] = rb;
            recurse(state, pos + 1, components - 1, &(product * w));
            state.parent[ra] = ra;
        }
        recurse(state, pos + 1, components, product);
    }

    let mut parent: Vec<usize> = (0..total).collect();
    let mut components = total;
    for &(a, b) in preset {
        let (ra, rb) = (find(&parent, a), find(&parent, b));
        debug_assert_ne!(ra, rb);
        parent[ra] = rb;
        components -= 1;
    }
    let mut state = State {
        edges,
        parent,
        sum: ExactInt::zero(),
    };
    recurse(&mut state, 0, components, &ExactInt::one());
    state.sum
}

/// Weighted spanning-tree sum by literal enumeration; k is capped at 9.
pub fn enumerate_tau(g: &WeightedCompleteGraph) -> Result<ExactInt, OracleError> {
    let k = g.k();
    if k > ENUMERATE_CAP {
        return Err(OracleError::TooLarge {
            size: k,
            cap: ENUMERATE_CAP,
        });
    }
    let mut edges = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let w = g.weight(i, j);
            if !w.is_integer() {
                return Err(OracleError::NonIntegerWeights { i, j });
            }
            if !w.is_zero() {
                edges.push((i, j, w.to_integer()));
            }
        }
    }
    Ok(tree_sum(k, &[], &edges))
}

/// Ground truth for the closed form: enumerates spanning trees of the host
/// and counts those containing every forest edge. Hosts are capped at 9
/// vertices.
pub fn count_forced_trees(instance: &ForestInstance) -> Result<ExactInt, OracleError> {
    instance.validate()?;
    let total = instance.total_vertices();
    if total > ENUMERATE_CAP {
        return Err(OracleError::TooLarge {
            size: total,
            cap: ENUMERATE_CAP,
        });
    }
    let parts = &instance.parts;
    let global = |v: crate::forest::Vertex| -> usize {
        parts[..v.part].iter().sum::<usize>() + v.offset
    };
    let mut forced: Vec<(usize, usize)> = instance
        .edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (global(a), global(b));
            (x.min(y), x.max(y))
        })
        .collect();
    forced.sort_unstable();
    let mut free = Vec::new();
    for p in 0..parts.len() {
        for q in p + 1..parts.len() {
            for i in 0..parts[p] {
                for j in 0..parts[q] {
                    let a = global(crate::forest::Vertex { part: p, offset: i });
                    let b = global(crate::forest::Vertex { part: q, offset: j });
                    let key = (a.min(b), a.max(b));
                    if forced.binary_search(&key).is_err() {
                        free.push((key.0, key.1, ExactInt::one()));
                    }
                }
            }
        }
    }
    Ok(tree_sum(total, &forced, &free))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::Vertex;
    use crate::weighted::contract_forest;

    fn int(v: i64) -> ExactInt {
        ExactInt::from(v)
    }

    fn v(part: usize, offset: usize) -> Vertex {
        Vertex { part, offset }
    }

    fn unit_k(k: usize) -> WeightedCompleteGraph {
        let rows: Vec<Vec<_>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| crate::exact::ExactRat::from(int((i != j) as i64)))
                    .collect()
            })
            .collect();
        WeightedCompleteGraph::new(rows).unwrap()
    }

    #[test]
    fn laplacian_minor_examples() {
        let m = laplacian_minor(&unit_k(3), 0).unwrap();
        assert_eq!(m, IntegerMatrix::from_integers(&[&[2, -1], &[-1, 2]]).unwrap());

        let k1 = WeightedCompleteGraph::from_integers(&[&[0]]).unwrap();
        assert_eq!(laplacian_minor(&k1, 0).unwrap().dimension(), 0);

        // Triangle with w01 = 1, w02 = 2, w12 = 3, dropping vertex 2.
        let g = WeightedCompleteGraph::from_integers(&[&[0, 1, 2], &[1, 0, 3], &[2, 3, 0]])
            .unwrap();
        let m = laplacian_minor(&g, 2).unwrap();
        assert_eq!(m, IntegerMatrix::from_integers(&[&[3, -1], &[-1, 4]]).unwrap());

        assert!(matches!(
            laplacian_minor(&k1, 1),
            Err(OracleError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn det_bareiss_examples() {
        let id3 = IntegerMatrix::from_integers(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        assert_eq!(det_bareiss(&id3), int(1));
        let m = IntegerMatrix::from_integers(&[&[2, 1], &[1, 2]]).unwrap();
        assert_eq!(det_bareiss(&m), int(3));
        let empty = IntegerMatrix::new(vec![]).unwrap();
        assert_eq!(det_bareiss(&empty), int(1));
        // Zero pivot forces a row swap; determinant is -2.
        let swap = IntegerMatrix::from_integers(&[&[0, 2], &[1, 1]]).unwrap();
        assert_eq!(det_bareiss(&swap), int(-2));
        let singular = IntegerMatrix::from_integers(&[&[0, 1], &[0, 2]]).unwrap();
        assert_eq!(det_bareiss(&singular), int(0));
    }

    #[test]
    fn tau_kirchhoff_examples() {
        assert_eq!(tau_kirchhoff(&unit_k(3)).unwrap(), int(3));
        let g = WeightedCompleteGraph::from_integers(&[&[0, 1, 2], &[1, 0, 3], &[2, 3, 0]])
            .unwrap();
        assert_eq!(tau_kirchhoff(&g).unwrap(), int(11));

        let inst = ForestInstance::new(vec![2, 2], vec![(v(0, 0), v(1, 0))]);
        let contracted = contract_forest(&inst).unwrap();
        assert_eq!(tau_kirchhoff(&contracted).unwrap(), int(3));
    }

    #[test]
    fn enumerate_tau_examples() {
        assert_eq!(enumerate_tau(&unit_k(4)).unwrap(), int(16));
        let single = WeightedCompleteGraph::from_integers(&[&[0, 7], &[7, 0]]).unwrap();
        assert_eq!(enumerate_tau(&single).unwrap(), int(7));
        // K_{2,2} encoded as a weighted K_4: x0 x1 | y0 y1.
        let k22 = WeightedCompleteGraph::from_integers(&[
            &[0, 0, 1, 1],
            &[0, 0, 1, 1],
            &[1, 1, 0, 0],
            &[1, 1, 0, 0],
        ])
        .unwrap();
        assert_eq!(enumerate_tau(&k22).unwrap(), int(4));
        assert!(matches!(
            enumerate_tau(&unit_k(10)),
            Err(OracleError::TooLarge { .. })
        ));
    }

    #[test]
    fn count_forced_trees_examples() {
        let one_edge = ForestInstance::new(vec![2, 2], vec![(v(0, 0), v(1, 0))]);
        assert_eq!(count_forced_trees(&one_edge).unwrap(), int(3));

        let spanning = ForestInstance::new(
            vec![2, 2],
            vec![(v(0, 0), v(1, 0)), (v(0, 1), v(1, 0)), (v(0, 1), v(1, 1))],
        );
        assert_eq!(count_forced_trees(&spanning).unwrap(), int(1));

        let tri = ForestInstance::new(vec![1, 1, 1], vec![(v(0, 0), v(1, 0))]);
        assert_eq!(count_forced_trees(&tri).unwrap(), int(2));

        let cyclic = ForestInstance::new(
            vec![2, 2],
            vec![
                (v(0, 0), v(1, 0)),
                (v(0, 0), v(1, 1)),
                (v(0, 1), v(1, 0)),
                (v(0, 1), v(1, 1)),
            ],
        );
        assert!(matches!(
            count_forced_trees(&cyclic),
            Err(OracleError::Forest(ForestError::CycleDetected(_)))
        ));
    }

    #[test]
    fn minor_choice_does_not_change_the_determinant() {
        let g = WeightedCompleteGraph::from_integers(&[
            &[0, 1, 2, 0],
            &[1, 0, 3, 4],
            &[2, 3, 0, 5],
            &[0, 4, 5, 0],
        ])
        .unwrap();
        let reference = det_bareiss(&laplacian_minor(&g, 0).unwrap());
        for drop in 1..4 {
            assert_eq!(det_bareiss(&laplacian_minor(&g, drop).unwrap()), reference);
        }
        assert_eq!(reference, enumerate_tau(&g).unwrap());
    }
}
