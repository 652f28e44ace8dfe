//! Numeric verification of the algebraic identities behind the closed form,
//! at exact random rational points with singularity-aware sampling. Both
//! sides of every identity are evaluated literally (subset sums included),
//! with no shared simplification between them.

use num::{One, Zero};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::closed_form::ClosedFormError;
use crate::exact::{ExactInt, ExactRat};
use crate::rng::derive_seed;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IdentityId {
    L21,
    L22,
    L23,
    L23X,
    L24,
    L25,
    L25X,
    T31,
    R63,
    #[serde(rename = "XYCANCEL")]
    XyCancel,
}

impl IdentityId {
    pub const ALL: [IdentityId; 10] = [
        IdentityId::L21,
        IdentityId::L22,
        IdentityId::L23,
        IdentityId::L23X,
        IdentityId::L24,
        IdentityId::L25,
        IdentityId::L25X,
        IdentityId::T31,
        IdentityId::R63,
        IdentityId::XyCancel,
    ];

    /// Smallest size the identity is stated for.
    pub fn min_size(self) -> usize {
        match self {
            IdentityId::T31 | IdentityId::R63 => 2,
            _ => 1,
        }
    }
}

/// Literal subset sums appear on at least one side of each identity, so
/// sizes are capped where 2^size stays trivial.
pub const SIZE_CAP: usize = 10;

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            IdentityId::L21 => "L21",
            IdentityId::L22 => "L22",
            IdentityId::L23 => "L23",
            IdentityId::L23X => "L23X",
            IdentityId::L24 => "L24",
            IdentityId::L25 => "L25",
            IdentityId::L25X => "L25X",
            IdentityId::T31 => "T31",
            IdentityId::R63 => "R63",
            IdentityId::XyCancel => "XYCANCEL",
        };
        f.write_str(name)
    }
}

impl FromStr for IdentityId {
    type Err = IdentityError;

    fn from_str(s: &str) -> Result<Self, IdentityError> {
        match s.to_ascii_uppercase().as_str() {
            "L21" => Ok(IdentityId::L21),
            "L22" => Ok(IdentityId::L22),
            "L23" => Ok(IdentityId::L23),
            "L23X" => Ok(IdentityId::L23X),
            "L24" => Ok(IdentityId::L24),
            "L25" => Ok(IdentityId::L25),
            "L25X" => Ok(IdentityId::L25X),
            "T31" => Ok(IdentityId::T31),
            "R63" => Ok(IdentityId::R63),
            "XYCANCEL" => Ok(IdentityId::XyCancel),
            _ => Err(IdentityError::UnknownIdentity { name: s.to_owned() }),
        }
    }
}

/// Exact rational point for one identity. The `a`/`b` vectors double as the
/// pair coordinates x/y for T31, R63 and XYCANCEL; `scalar` is the free
/// constant of the two extended identities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityPoint {
    #[serde(with = "rat_vec", skip_serializing_if = "Vec::is_empty")]
    pub a: Vec<ExactRat>,
    #[serde(with = "rat_vec", skip_serializing_if = "Vec::is_empty")]
    pub b: Vec<ExactRat>,
    #[serde(with = "rat_vec", skip_serializing_if = "Vec::is_empty")]
    pub c: Vec<ExactRat>,
    #[serde(with = "rat_vec", skip_serializing_if = "Vec::is_empty")]
    pub d: Vec<ExactRat>,
    #[serde(
        serialize_with = "rat_opt_serialize",
        skip_serializing_if = "Option::is_none"
    )]
    pub scalar: Option<ExactRat>,
}

mod rat_vec {
    use crate::exact::ExactRat;
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &[ExactRat], ser: S) -> Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&crate::exact::rat_object::Wrapper(r))?;
        }
        seq.end()
    }
}

fn rat_opt_serialize<S: serde::Serializer>(
    v: &Option<ExactRat>,
    ser: S,
) -> Result<S::Ok, S::Error> {
    crate::exact::rat_object::serialize(v.as_ref().expect("skipped when none"), ser)
}

impl IdentityPoint {
    fn empty() -> Self {
        IdentityPoint {
            a: Vec::new(),
            b: Vec::new(),
            c: Vec::new(),
            d: Vec::new(),
            scalar: None,
        }
    }

    pub fn pairs(a: Vec<ExactRat>, b: Vec<ExactRat>) -> Self {
        IdentityPoint {
            a,
            b,
            ..IdentityPoint::empty()
        }
    }

    pub fn from_integer_pairs(pairs: &[(i64, i64)]) -> Self {
        let a = pairs.iter().map(|&(x, _)| rat_int(x)).collect();
        let b = pairs.iter().map(|&(_, y)| rat_int(y)).collect();
        IdentityPoint::pairs(a, b)
    }

    pub fn size(&self) -> usize {
        self.a.len()
    }
}

fn rat_int(v: i64) -> ExactRat {
    ExactRat::from(ExactInt::from(v))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("{id}: guard violated: {guard}")]
    GuardViolated { id: IdentityId, guard: String },
    #[error("{id}: malformed point: {detail}")]
    WrongShape { id: IdentityId, detail: String },
    #[error("{id}: size {size} outside {min}..={max}")]
    SizeOutOfRange {
        id: IdentityId,
        size: usize,
        min: usize,
        max: usize,
    },
    #[error("{id}: no point satisfying the guards in {attempts} attempts at size {size}")]
    SamplingExhausted {
        id: IdentityId,
        size: usize,
        attempts: u32,
    },
    #[error("unknown identity {name:?}")]
    UnknownIdentity { name: String },
    #[error(transparent)]
    Singular(#[from] ClosedFormError),
}

/// Direct (guarded) evaluation of phi, kept local so the identity checks do
/// not share code with the closed-form evaluator they are compared against.
fn phi_direct(pairs: &[(ExactRat, ExactRat)]) -> ExactRat {
    let x_sum: ExactRat = pairs.iter().map(|(x, _)| x).sum();
    let y_sum: ExactRat = pairs.iter().map(|(_, y)| y).sum();
    let mut product = ExactRat::one();
    let mut deficit = ExactRat::zero();
    for (x, y) in pairs {
        let w = x * &y_sum + y * &x_sum;
        deficit += x * y / &w;
        product *= w;
    }
    product * (ExactRat::one() - deficit) / (x_sum * y_sum)
}

fn masks(size: usize) -> std::ops::Range<u32> {
    1..(1u32 << size)
}

fn in_mask(mask: u32, i: usize) -> bool {
    mask >> i & 1 == 1
}

/// prod over the mask of `v` times prod over the complement of `w`.
fn split_product(v: &[ExactRat], w: &[ExactRat], mask: u32) -> ExactRat {
    let mut p = ExactRat::one();
    for i in 0..v.len() {
        p *= if in_mask(mask, i) { &v[i] } else { &w[i] };
    }
    p
}

fn masked_sum(v: &[ExactRat], mask: u32) -> ExactRat {
    (0..v.len())
        .filter(|&i| in_mask(mask, i))
        .map(|i| &v[i])
        .sum()
}

struct Arity {
    c: bool,
    d: bool,
    scalar: bool,
}

fn arity(id: IdentityId) -> Arity {
    match id {
        IdentityId::L21 | IdentityId::L22 | IdentityId::T31 | IdentityId::R63
        | IdentityId::XyCancel => Arity {
            c: false,
            d: false,
            scalar: false,
        },
        IdentityId::L23 => Arity {
            c: true,
            d: false,
            scalar: false,
        },
        IdentityId::L23X => Arity {
            c: true,
            d: false,
            scalar: true,
        },
        IdentityId::L24 => Arity {
            c: false,
            d: true,
            scalar: false,
        },
        IdentityId::L25 => Arity {
            c: true,
            d: true,
            scalar: false,
        },
        IdentityId::L25X => Arity {
            c: true,
            d: true,
            scalar: true,
        },
    }
}

fn check_shape(id: IdentityId, p: &IdentityPoint) -> Result<(), IdentityError> {
    let size = p.a.len();
    let need = arity(id);
    let want = |present: bool| if present { size } else { 0 };
    let shape_error = |detail: String| Err(IdentityError::WrongShape { id, detail });
    if size < id.min_size() || size > SIZE_CAP {
        return Err(IdentityError::SizeOutOfRange {
            id,
            size,
            min: id.min_size(),
            max: SIZE_CAP,
        });
    }
    if p.b.len() != size {
        return shape_error(format!("b has length {}, expected {}", p.b.len(), size));
    }
    if p.c.len() != want(need.c) {
        return shape_error(format!("c has length {}, expected {}", p.c.len(), want(need.c)));
    }
    if p.d.len() != want(need.d) {
        return shape_error(format!("d has length {}, expected {}", p.d.len(), want(need.d)));
    }
    if p.scalar.is_some() != need.scalar {
        return shape_error(if need.scalar {
            "missing scalar".to_owned()
        } else {
            "unexpected scalar".to_owned()
        });
    }
    Ok(())
}

/// Checks the identity's guard predicates, returning a description of the
/// first violated one.
fn check_guards(id: IdentityId, p: &IdentityPoint) -> Result<(), String> {
    match id {
        IdentityId::L22 | IdentityId::XyCancel => Ok(()),
        IdentityId::L21 => {
            let a_sum: ExactRat = p.a.iter().sum();
            let b_sum: ExactRat = p.b.iter().sum();
            for i in 0..p.a.len() {
                if (&p.a[i] * &b_sum + &p.b[i] * &a_sum).is_zero() {
                    return Err(format!("a_{0}*B + b_{0}*A = 0", i + 1));
                }
            }
            Ok(())
        }
        IdentityId::L23 | IdentityId::L23X | IdentityId::L24 | IdentityId::L25
        | IdentityId::L25X => {
            for i in 0..p.a.len() {
                if (&p.a[i] + &p.b[i]).is_zero() {
                    return Err(format!("a_{0} + b_{0} = 0", i + 1));
                }
            }
            Ok(())
        }
        IdentityId::T31 | IdentityId::R63 => {
            let (x, y) = (&p.a, &p.b);
            let k = x.len();
            let x_sum: ExactRat = x.iter().sum();
            let y_sum: ExactRat = y.iter().sum();
            let x_rest = &x_sum - &x[0];
            let y_rest = &y_sum - &y[0];
            if x_sum.is_zero() {
                return Err("X = 0".to_owned());
            }
            if y_sum.is_zero() {
                return Err("Y = 0".to_owned());
            }
            if x_rest.is_zero() {
                return Err("X' = X - x_1 = 0".to_owned());
            }
            if y_rest.is_zero() {
                return Err("Y' = Y - y_1 = 0".to_owned());
            }
            for i in 0..k {
                if (&x[i] * &y_sum + &y[i] * &x_sum).is_zero() {
                    return Err(format!("x_{0}*Y + y_{0}*X = 0", i + 1));
                }
            }
            for i in 1..k {
                if (&x[i] * &y_rest + &y[i] * &x_rest).is_zero() {
                    return Err(format!("x_{0}*Y' + y_{0}*X' = 0", i + 1));
                }
            }
            // Subset guards over nonempty I inside {2, ..., k}.
            for mask in masks(k - 1) {
                let xi: ExactRat = masked_sum(&x[1..], mask);
                let yi: ExactRat = masked_sum(&y[1..], mask);
                let subset = || {
                    (1..k)
                        .filter(|&i| in_mask(mask, i - 1))
                        .map(|i| (i + 1).to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                };
                if ((&xi + &x[0]) * &y_sum + (&yi + &y[0]) * &x_sum).is_zero() {
                    return Err(format!("x_I*Y + y_I*X = 0 for I = {{{}}}", subset()));
                }
                if (&xi * &y_rest + &yi * &x_rest).is_zero() {
                    return Err(format!("x'_I*Y' + y'_I*X' = 0 for I = {{{}}}", subset()));
                }
            }
            Ok(())
        }
    }
}

fn eval_l21(p: &IdentityPoint) -> (ExactRat, ExactRat) {
    let a_sum: ExactRat = p.a.iter().sum();
    let b_sum: ExactRat = p.b.iter().sum();
    let w: Vec<ExactRat> = (0..p.a.len())
        .map(|i| &p.a[i] * &b_sum + &p.b[i] * &a_sum)
        .collect();
    let mixed: ExactRat = (0..p.a.len()).map(|i| &p.a[i] * &p.b[i] / &w[i]).sum();
    let lhs_root = ExactRat::one() - mixed;
    let lhs = &lhs_root * &lhs_root;
    let squares = |v: &[ExactRat]| -> ExactRat { (0..v.len()).map(|i| &v[i] * &v[i] / &w[i]).sum() };
    let rhs = squares(&p.a) * squares(&p.b);
    (lhs, rhs)
}

fn eval_l22(p: &IdentityPoint) -> (ExactRat, ExactRat) {
    let lhs: ExactRat = masks(p.size())
        .map(|mask| split_product(&p.a, &p.b, mask))
        .sum();
    let sum_product: ExactRat = (0..p.size()).map(|i| &p.a[i] + &p.b[i]).product();
    let b_product: ExactRat = p.b.iter().product();
    (lhs, sum_product - b_product)
}

fn eval_l23(p: &IdentityPoint, shift: Option<&ExactRat>) -> (ExactRat, ExactRat) {
    let lhs: ExactRat = masks(p.size())
        .map(|mask| {
            let mut coeff = masked_sum(&p.c, mask);
            if let Some(c) = shift {
                coeff += c;
            }
            coeff * split_product(&p.a, &p.b, mask)
        })
        .sum();
    let sum_product: ExactRat = (0..p.size()).map(|i| &p.a[i] + &p.b[i]).product();
    let weighted: ExactRat = (0..p.size())
        .map(|i| &p.c[i] * &p.a[i] / (&p.a[i] + &p.b[i]))
        .sum();
    let rhs = match shift {
        None => sum_product * weighted,
        Some(c) => {
            let b_product: ExactRat = p.b.iter().product();
            sum_product * (c + weighted) - c * b_product
        }
    };
    (lhs, rhs)
}

fn eval_l24(p: &IdentityPoint) -> (ExactRat, ExactRat) {
    let full = (1u32 << p.size()) - 1;
    let lhs: ExactRat = masks(p.size())
        .map(|mask| masked_sum(&p.d, full ^ mask) * split_product(&p.a, &p.b, mask))
        .sum();
    let sum_product: ExactRat = (0..p.size()).map(|i| &p.a[i] + &p.b[i]).product();
    let weighted: ExactRat = (0..p.size())
        .map(|i| &p.d[i] * &p.b[i] / (&p.a[i] + &p.b[i]))
        .sum();
    let b_product: ExactRat = p.b.iter().product();
    let d_sum: ExactRat = p.d.iter().sum();
    (lhs, sum_product * weighted - b_product * d_sum)
}

fn eval_l25(p: &IdentityPoint, shift: Option<&ExactRat>) -> (ExactRat, ExactRat) {
    let size = p.size();
    let full = (1u32 << size) - 1;
    // Without the scalar the sum runs over proper nonempty subsets; the
    // extended form includes I = S, whose complement term is an empty sum.
    let lhs: ExactRat = masks(size)
        .filter(|&mask| shift.is_some() || mask != full)
        .map(|mask| {
            let mut coeff = masked_sum(&p.c, mask);
            if let Some(c) = shift {
                coeff += c;
            }
            coeff * masked_sum(&p.d, full ^ mask) * split_product(&p.a, &p.b, mask)
        })
        .sum();
    let sum_product: ExactRat = (0..size).map(|i| &p.a[i] + &p.b[i]).product();
    let mut cross = ExactRat::zero();
    for i in 0..size {
        for j in 0..size {
            if i != j {
                cross += &p.c[i] * &p.a[i] * &p.d[j] * &p.b[j]
                    / ((&p.a[i] + &p.b[i]) * (&p.a[j] + &p.b[j]));
            }
        }
    }
    let rhs = match shift {
        None => sum_product * cross,
        Some(c) => {
            let weighted: ExactRat = (0..size)
                .map(|i| &p.d[i] * &p.b[i] / (&p.a[i] + &p.b[i]))
                .sum();
            let b_product: ExactRat = p.b.iter().product();
            let d_sum: ExactRat = p.d.iter().sum();
            sum_product * (cross + c * weighted) - c * b_product * d_sum
        }
    };
    (lhs, rhs)
}

/// Shared by T31 (signed, subset pairs keep the hub coordinates) and R63
/// (unsigned, subset pairs drop them).
fn eval_phi_recursion(p: &IdentityPoint, keep_hub: bool) -> (ExactRat, ExactRat) {
    let (x, y) = (&p.a, &p.b);
    let k = x.len();
    let pairs: Vec<(ExactRat, ExactRat)> = x.iter().cloned().zip(y.iter().cloned()).collect();
    let lhs = phi_direct(&pairs);
    let mut rhs = ExactRat::zero();
    for mask in masks(k - 1) {
        let members: Vec<usize> = (1..k).filter(|&i| in_mask(mask, i - 1)).collect();
        let mut coeff = ExactRat::one();
        for &i in &members {
            coeff *= &x[0] * &y[i] + &x[i] * &y[0];
        }
        let mut xi = masked_sum(&x[1..], mask);
        let mut yi = masked_sum(&y[1..], mask);
        if keep_hub {
            xi += &x[0];
            yi += &y[0];
        }
        let mut sub_pairs = vec![(xi, yi)];
        for i in 1..k {
            if !in_mask(mask, i - 1) {
                sub_pairs.push((x[i].clone(), y[i].clone()));
            }
        }
        let term = coeff * phi_direct(&sub_pairs);
        if keep_hub && members.len() % 2 == 0 {
            rhs -= term;
        } else {
            rhs += term;
        }
    }
    (lhs, rhs)
}

/// The monomials of the cleared-denominator phi numerator not divisible by
/// X*Y; the identity states they cancel to zero.
fn eval_xy_cancel(p: &IdentityPoint) -> (ExactRat, ExactRat) {
    let (x, y) = (&p.a, &p.b);
    let k = x.len() as i32;
    let x_sum: ExactRat = x.iter().sum();
    let y_sum: ExactRat = y.iter().sum();
    let x_product: ExactRat = x.iter().product();
    let y_product: ExactRat = y.iter().product();
    let pow = |base: &ExactRat, e: i32| num::traits::Pow::pow(base.clone(), e);
    let mut lhs = pow(&y_sum, k) * &x_product + pow(&x_sum, k) * &y_product;
    for i in 0..x.len() {
        lhs -= &y[i] * pow(&y_sum, k - 1) * &x_product;
        lhs -= &x[i] * pow(&x_sum, k - 1) * &y_product;
    }
    (lhs, ExactRat::zero())
}

/// Evaluates both sides of the identity literally; equality is for the
/// caller to assert.
pub fn evaluate_identity(
    id: IdentityId,
    p: &IdentityPoint,
) -> Result<(ExactRat, ExactRat), IdentityError> {
    check_shape(id, p)?;
    check_guards(id, p).map_err(|guard| IdentityError::GuardViolated { id, guard })?;
    Ok(match id {
        IdentityId::L21 => eval_l21(p),
        IdentityId::L22 => eval_l22(p),
        IdentityId::L23 => eval_l23(p, None),
        IdentityId::L23X => eval_l23(p, p.scalar.as_ref()),
        IdentityId::L24 => eval_l24(p),
        IdentityId::L25 => eval_l25(p, None),
        IdentityId::L25X => eval_l25(p, p.scalar.as_ref()),
        IdentityId::T31 => eval_phi_recursion(p, true),
        IdentityId::R63 => eval_phi_recursion(p, false),
        IdentityId::XyCancel => eval_xy_cancel(p),
    })
}

const SAMPLE_ATTEMPTS: u32 = 10_000;

/// Rejection-samples a point with numerators in [-20, 20] and denominators
/// in [1, 10] until every guard of the identity holds; deterministic per
/// seed.
pub fn sample_point(
    id: IdentityId,
    size: usize,
    seed: u64,
) -> Result<IdentityPoint, IdentityError> {
    if size < id.min_size() || size > SIZE_CAP {
        return Err(IdentityError::SizeOutOfRange {
            id,
            size,
            min: id.min_size(),
            max: SIZE_CAP,
        });
    }
    let need = arity(id);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        ExactRat::new(
            ExactInt::from(rng.random_range(-20i64..=20)),
            ExactInt::from(rng.random_range(1i64..=10)),
        )
    };
    for _ in 0..SAMPLE_ATTEMPTS {
        let vector =
            |rng: &mut ChaCha8Rng| -> Vec<ExactRat> { (0..size).map(|_| draw(rng)).collect() };
        let point = IdentityPoint {
            a: vector(&mut rng),
            b: vector(&mut rng),
            c: if need.c { vector(&mut rng) } else { Vec::new() },
            d: if need.d { vector(&mut rng) } else { Vec::new() },
            scalar: need.scalar.then(|| draw(&mut rng)),
        };
        if check_guards(id, &point).is_ok() {
            return Ok(point);
        }
    }
    Err(IdentityError::SamplingExhausted {
        id,
        size,
        attempts: SAMPLE_ATTEMPTS,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub size: usize,
    pub trial: usize,
    pub point: IdentityPoint,
    #[serde(with = "crate::exact::rat_object")]
    pub lhs: ExactRat,
    #[serde(with = "crate::exact::rat_object")]
    pub rhs: ExactRat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub id: IdentityId,
    pub pass: u64,
    pub fail: u64,
    pub counterexamples: Vec<Counterexample>,
}

/// Runs `trials` sampled points per requested size (sizes below the
/// identity's minimum are skipped) and records exact-equality outcomes.
pub fn run_suite(
    id: IdentityId,
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<SuiteReport, IdentityError> {
    let mut report = SuiteReport {
        id,
        pass: 0,
        fail: 0,
        counterexamples: Vec::new(),
    };
    let lane = IdentityId::ALL.iter().position(|&i| i == id).unwrap() as u64;
    for &size in sizes {
        if size > SIZE_CAP {
            return Err(IdentityError::SizeOutOfRange {
                id,
                size,
                min: id.min_size(),
                max: SIZE_CAP,
            });
        }
        if size < id.min_size() {
            continue;
        }
        for trial in 0..trials {
            let point = sample_point(id, size, derive_seed(seed, lane << 32 | size as u64, trial as u64))?;
            let (lhs, rhs) = evaluate_identity(id, &point)?;
            if lhs == rhs {
                report.pass += 1;
            } else {
                report.fail += 1;
                report.counterexamples.push(Counterexample {
                    size,
                    trial,
                    point,
                    lhs,
                    rhs,
                });
            }
        }
    }
    Ok(report)
}
