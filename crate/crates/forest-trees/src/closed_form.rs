//! Exact evaluation of the closed-form spanning-tree counts: the bipartite
//! forest formula, its matching/tree specializations, Moon's complete-graph
//! formula, and the underlying 2k-variable function phi.

use num::traits::Pow;
use num::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

use crate::exact::{ExactInt, ExactRat};
use crate::forest::ComponentProfile;

/// Point (x_1, y_1, ..., x_k, y_k) with derived sums X and Y.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairVector {
    pub pairs: Vec<(ExactRat, ExactRat)>,
}

impl PairVector {
    pub fn new(pairs: Vec<(ExactRat, ExactRat)>) -> Self {
        PairVector { pairs }
    }

    pub fn from_integers(pairs: &[(i64, i64)]) -> Self {
        PairVector {
            pairs: pairs
                .iter()
                .map(|&(x, y)| (ExactRat::from(ExactInt::from(x)), ExactRat::from(ExactInt::from(y))))
                .collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn x_sum(&self) -> ExactRat {
        self.pairs.iter().map(|(x, _)| x).sum()
    }

    pub fn y_sum(&self) -> ExactRat {
        self.pairs.iter().map(|(_, y)| y).sum()
    }
}

/// Which denominator of a direct phi evaluation vanished.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SingularGuard {
    ZeroXSum,
    ZeroYSum,
    ZeroPairTerm { index: usize },
}

impl fmt::Display for SingularGuard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularGuard::ZeroXSum => write!(f, "X = sum of x_i vanishes"),
            SingularGuard::ZeroYSum => write!(f, "Y = sum of y_i vanishes"),
            SingularGuard::ZeroPairTerm { index } => {
                write!(f, "x_i*Y + y_i*X vanishes at index {index}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosedFormError {
    #[error("profile part sums {got:?} do not match the host sides {expected:?}")]
    ProfileSumMismatch {
        expected: Vec<usize>,
        got: Vec<usize>,
    },
    #[error("profile component {index} is empty")]
    EmptyComponent { index: usize },
    #[error("host side of size zero is not supported")]
    EmptySide,
    #[error("{numerator} is not divisible by {divisor}; the formula guarantees divisibility, so this is a bug")]
    DivisibilityViolation {
        numerator: ExactInt,
        divisor: ExactInt,
    },
    #[error("singular point: {0}")]
    SingularPoint(SingularGuard),
    #[error("component orders sum to {got}, expected {expected}")]
    OrderSumMismatch { expected: usize, got: usize },
    #[error("matching of size {k} exceeds min(m, n) = {max}")]
    MatchingTooLarge { k: usize, max: usize },
    #[error("tree shape ({s}, {t}) is outside 1..=m x 1..=n = ({m}, {n})")]
    ShapeOutOfRange { s: usize, t: usize, m: usize, n: usize },
}

fn int(v: usize) -> ExactInt {
    ExactInt::from(v)
}

fn rat_pow(base: usize, exp: i64) -> ExactRat {
    let exp = i32::try_from(exp).expect("exponent fits i32");
    Pow::pow(ExactRat::from(int(base)), exp)
}

/// Converts an exact rational that the formulas guarantee to be integral;
/// a nonzero remainder signals an implementation bug, not bad input.
fn expect_integer(value: ExactRat) -> Result<ExactInt, ClosedFormError> {
    if value.is_integer() {
        Ok(value.to_integer())
    } else {
        Err(ClosedFormError::DivisibilityViolation {
            numerator: value.numer().clone(),
            divisor: value.denom().clone(),
        })
    }
}

/// Direct evaluation of
/// phi = (1/XY) (prod_i (x_i Y + y_i X)) (1 - sum_i x_i y_i / (x_i Y + y_i X)),
/// defined wherever X, Y and every pair term are nonzero. phi extends to a
/// polynomial, but this evaluator only takes the direct route.
pub fn phi_eval(v: &PairVector) -> Result<ExactRat, ClosedFormError> {
    let x_sum = v.x_sum();
    let y_sum = v.y_sum();
    if x_sum.is_zero() {
        return Err(ClosedFormError::SingularPoint(SingularGuard::ZeroXSum));
    }
    if y_sum.is_zero() {
        return Err(ClosedFormError::SingularPoint(SingularGuard::ZeroYSum));
    }
    let mut product = ExactRat::one();
    let mut deficit = ExactRat::zero();
    for (index, (x, y)) in v.pairs.iter().enumerate() {
        let w = x * &y_sum + y * &x_sum;
        if w.is_zero() {
            return Err(ClosedFormError::SingularPoint(SingularGuard::ZeroPairTerm {
                index,
            }));
        }
        deficit += x * y / &w;
        product *= w;
    }
    Ok(product * (ExactRat::one() - deficit) / (x_sum * y_sum))
}

fn bipartite_pairs(
    m: usize,
    n: usize,
    profile: &ComponentProfile,
) -> Result<Vec<(usize, usize)>, ClosedFormError> {
    if m == 0 || n == 0 {
        return Err(ClosedFormError::EmptySide);
    }
    let mut pairs = Vec::with_capacity(profile.components.len());
    for (index, c) in profile.components.iter().enumerate() {
        if c.len() != 2 {
            return Err(ClosedFormError::ProfileSumMismatch {
                expected: vec![m, n],
                got: profile.part_sums(),
            });
        }
        if c[0] + c[1] == 0 {
            return Err(ClosedFormError::EmptyComponent { index });
        }
        pairs.push((c[0], c[1]));
    }
    let (sm, sn) = pairs.iter().fold((0, 0), |(a, b), &(mi, ni)| (a + mi, b + ni));
    if sm != m || sn != n {
        return Err(ClosedFormError::ProfileSumMismatch {
            expected: vec![m, n],
            got: vec![sm, sn],
        });
    }
    Ok(pairs)
}

/// The pre-division integer of the main formula:
/// prod_i W_i - sum_i m_i n_i prod_{j != i} W_j with W_i = m_i n + n_i m.
/// Always divisible by m*n.
pub fn tau_forest_numerator(
    m: usize,
    n: usize,
    profile: &ComponentProfile,
) -> Result<ExactInt, ClosedFormError> {
    let pairs = bipartite_pairs(m, n, profile)?;
    let k = pairs.len();
    let weights: Vec<ExactInt> = pairs
        .iter()
        .map(|&(mi, ni)| int(mi) * int(n) + int(ni) * int(m))
        .collect();
    // prefix[i] = W_1..W_{i-1}, suffix[i] = W_{i+1}..W_k, so each term of the
    // subtracted sum reuses shared partial products.
    let mut prefix = vec![ExactInt::one(); k + 1];
    for i in 0..k {
        prefix[i + 1] = &prefix[i] * &weights[i];
    }
    let mut suffix = vec![ExactInt::one(); k + 1];
    for i in (0..k).rev() {
        suffix[i] = &suffix[i + 1] * &weights[i];
    }
    let mut numerator = prefix[k].clone();
    for (i, &(mi, ni)) in pairs.iter().enumerate() {
        numerator -= int(mi) * int(ni) * &prefix[i] * &suffix[i + 1];
    }
    Ok(numerator)
}

/// Number of spanning trees of K_{m,n} containing a spanning forest with the
/// given component profile:
/// (1/mn) (prod_i (m_i n + n_i m)) (1 - sum_i m_i n_i / (m_i n + n_i m)).
pub fn tau_forest(
    m: usize,
    n: usize,
    profile: &ComponentProfile,
) -> Result<ExactInt, ClosedFormError> {
    let numerator = tau_forest_numerator(m, n, profile)?;
    let divisor = int(m) * int(n);
    let (quotient, remainder) = num::Integer::div_rem(&numerator, &divisor);
    if !remainder.is_zero() {
        return Err(ClosedFormError::DivisibilityViolation { numerator, divisor });
    }
    debug_assert!(!quotient.is_negative());
    Ok(quotient)
}

/// Moon's formula n^(c-2) prod_i n_i for spanning trees of K_n containing a
/// forest with component orders `orders` (c components).
pub fn tau_moon(n: usize, orders: &[usize]) -> Result<ExactInt, ClosedFormError> {
    if n == 0 {
        return Err(ClosedFormError::EmptySide);
    }
    if let Some(index) = orders.iter().position(|&o| o == 0) {
        return Err(ClosedFormError::EmptyComponent { index });
    }
    let got: usize = orders.iter().sum();
    if got != n {
        return Err(ClosedFormError::OrderSumMismatch { expected: n, got });
    }
    let c = orders.len();
    // c = 1 makes the exponent negative; the product cancels it exactly.
    let mut value = rat_pow(n, c as i64 - 2);
    for &o in orders {
        value *= ExactRat::from(int(o));
    }
    expect_integer(value)
}

/// Spanning trees of K_{m,n} through a fixed matching of size k:
/// (m+n)^(k-1) (m+n-k) m^(n-k-1) n^(m-k-1).
pub fn tau_matching(m: usize, n: usize, k: usize) -> Result<ExactInt, ClosedFormError> {
    if m == 0 || n == 0 {
        return Err(ClosedFormError::EmptySide);
    }
    let max = m.min(n);
    if k > max {
        return Err(ClosedFormError::MatchingTooLarge { k, max });
    }
    // Boundary exponents (k = 0 or k = min(m, n)) go negative; the rational
    // value is still integral, so one path covers all cases.
    let value = rat_pow(m + n, k as i64 - 1)
        * ExactRat::from(int(m + n - k))
        * rat_pow(m, n as i64 - k as i64 - 1)
        * rat_pow(n, m as i64 - k as i64 - 1);
    expect_integer(value)
}

/// Spanning trees of K_{m,n} through a fixed subtree with s vertices in X
/// and t in Y: (sn + tm - st) m^(n-t-1) n^(m-s-1).
pub fn tau_tree(m: usize, n: usize, s: usize, t: usize) -> Result<ExactInt, ClosedFormError> {
    if m == 0 || n == 0 {
        return Err(ClosedFormError::EmptySide);
    }
    if s < 1 || s > m || t < 1 || t > n {
        return Err(ClosedFormError::ShapeOutOfRange { s, t, m, n });
    }
    let value = ExactRat::from(int(s * n + t * m - s * t))
        * rat_pow(m, n as i64 - t as i64 - 1)
        * rat_pow(n, m as i64 - s as i64 - 1);
    expect_integer(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(components: &[(usize, usize)]) -> ComponentProfile {
        let mut components: Vec<Vec<usize>> =
            components.iter().map(|&(a, b)| vec![a, b]).collect();
        components.sort_unstable_by(|a, b| b.cmp(a));
        let k = components.len();
        ComponentProfile { components, k }
    }

    fn tau(m: usize, n: usize, comps: &[(usize, usize)]) -> ExactInt {
        tau_forest(m, n, &profile(comps)).unwrap()
    }

    #[test]
    fn tau_forest_small_values() {
        assert_eq!(tau(2, 2, &[(2, 2)]), int(1));
        assert_eq!(tau(2, 2, &[(1, 0), (1, 0), (0, 1), (0, 1)]), int(4));
        assert_eq!(tau(2, 2, &[(1, 1), (1, 0), (0, 1)]), int(3));
        // tau(K_{m,n}) = m^(n-1) n^(m-1) on the all-singleton profile.
        assert_eq!(
            tau(3, 4, &[(1, 0), (1, 0), (1, 0), (0, 1), (0, 1), (0, 1), (0, 1)]),
            int(3usize.pow(3) * 4usize.pow(2))
        );
    }

    #[test]
    fn tau_forest_numerator_is_divisible() {
        let p = profile(&[(1, 1), (1, 0), (0, 1)]);
        let numerator = tau_forest_numerator(2, 2, &p).unwrap();
        assert_eq!(numerator, int(12));
    }

    #[test]
    fn tau_forest_rejects_bad_profiles() {
        assert!(matches!(
            tau_forest(2, 2, &profile(&[(1, 1)])),
            Err(ClosedFormError::ProfileSumMismatch { .. })
        ));
        assert!(matches!(
            tau_forest(0, 2, &profile(&[(0, 1), (0, 1)])),
            Err(ClosedFormError::EmptySide)
        ));
        let triple = ComponentProfile {
            components: vec![vec![1, 1, 0]],
            k: 1,
        };
        assert!(matches!(
            tau_forest(1, 1, &triple),
            Err(ClosedFormError::ProfileSumMismatch { .. })
        ));
    }

    #[test]
    fn phi_small_cases() {
        let one = phi_eval(&PairVector::from_integers(&[(5, 7)])).unwrap();
        assert_eq!(one, ExactRat::from(int(1)));
        // k = 2 collapses to z_{1,2} = x_1 y_2 + x_2 y_1.
        let two = phi_eval(&PairVector::from_integers(&[(1, 2), (3, 4)])).unwrap();
        assert_eq!(two, ExactRat::from(int(10)));
        // k = 3 with all pairs (1,1): z_{i,j} = 2, sum of pairwise products = 12.
        let three = phi_eval(&PairVector::from_integers(&[(1, 1), (1, 1), (1, 1)])).unwrap();
        assert_eq!(three, ExactRat::from(int(12)));
    }

    #[test]
    fn phi_guards() {
        assert_eq!(
            phi_eval(&PairVector::from_integers(&[(1, 2), (-1, 3)])),
            Err(ClosedFormError::SingularPoint(SingularGuard::ZeroXSum))
        );
        assert_eq!(
            phi_eval(&PairVector::from_integers(&[(1, -2), (1, 2)])),
            Err(ClosedFormError::SingularPoint(SingularGuard::ZeroYSum))
        );
        // X = Y = 3, so the first pair term is 3(x_1 + y_1) = 0.
        assert_eq!(
            phi_eval(&PairVector::from_integers(&[(2, -2), (1, 5)])),
            Err(ClosedFormError::SingularPoint(SingularGuard::ZeroPairTerm {
                index: 0
            }))
        );
    }

    #[test]
    fn moon_formula_values() {
        assert_eq!(tau_moon(4, &[1, 1, 1, 1]).unwrap(), int(16));
        assert_eq!(tau_moon(4, &[4]).unwrap(), int(1));
        assert_eq!(tau_moon(4, &[2, 1, 1]).unwrap(), int(8));
        assert!(matches!(
            tau_moon(4, &[2, 1]),
            Err(ClosedFormError::OrderSumMismatch { .. })
        ));
    }

    #[test]
    fn matching_formula_values() {
        assert_eq!(tau_matching(2, 2, 1).unwrap(), int(3));
        assert_eq!(tau_matching(3, 3, 3).unwrap(), int(12));
        assert_eq!(tau_matching(2, 3, 0).unwrap(), int(12));
        assert_eq!(tau_matching(1, 1, 1).unwrap(), int(1));
        assert!(matches!(
            tau_matching(2, 3, 3),
            Err(ClosedFormError::MatchingTooLarge { .. })
        ));
    }

    #[test]
    fn tree_formula_values() {
        assert_eq!(tau_tree(2, 2, 1, 1).unwrap(), int(3));
        assert_eq!(tau_tree(2, 2, 2, 2).unwrap(), int(1));
        assert_eq!(tau_tree(3, 2, 1, 1).unwrap(), int(8));
        assert!(matches!(
            tau_tree(3, 2, 4, 1),
            Err(ClosedFormError::ShapeOutOfRange { .. })
        ));
        assert!(matches!(
            tau_tree(3, 2, 1, 0),
            Err(ClosedFormError::ShapeOutOfRange { .. })
        ));
    }

    #[test]
    fn tau_forest_agrees_with_phi_on_profiles() {
        let p = profile(&[(2, 1), (1, 0), (0, 2)]);
        let pairs = PairVector::from_integers(&[(2, 1), (1, 0), (0, 2)]);
        let via_phi = phi_eval(&pairs).unwrap();
        assert_eq!(ExactRat::from(tau_forest(3, 3, &p).unwrap()), via_phi);
    }
}
