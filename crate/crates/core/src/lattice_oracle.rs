//! Brute-force lattice point enumeration, the ground truth for every closed form.
//!
//! A point `x ∈ Z^d` lies in `t·Δ(0,q)` iff, after scaling its barycentric
//! coordinates by `n`,
//!
//! ```text
//! μ_d = x_d >= 0,   μ_i = n·x_i − q_i·x_d >= 0 (i < d),   Σ μ_i <= t·n,
//! ```
//!
//! and lies in the interior iff all of these are strict. Everything is exact
//! integer arithmetic. The enumeration is deliberately naive: its only job is
//! to be trustworthy, so its size is capped.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::delta_simplex::{DeltaError, DeltaQ, HStar};
use crate::ehrhart_algebra::{Block, EhrhartError, EhrhartPoly, PolytopeExpr};
use crate::exactpoly::{binomial, IntPoly, RatPoly};

/// Environment variable overriding [`OracleLimits::max_nt`].
pub const MAX_POINTS_ENV: &str = "EHRHART_MAX_ORACLE_POINTS";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration too large: n·t = {estimate} exceeds the limit {limit} (raise {MAX_POINTS_ENV})")]
    TooLarge { estimate: BigInt, limit: u64 },
    #[error("dimension {dim} exceeds the oracle limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("lattice point identity failed: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Ehrhart(#[from] EhrhartError),
    #[error(transparent)]
    Delta(#[from] DeltaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Cap on `n·t` (for blocks: on the length of the enumerated range).
    pub max_nt: u64,
    pub max_dim: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_nt: 10_000, max_dim: 4 }
    }
}

impl OracleLimits {
    /// Defaults, with `max_nt` taken from the environment when set.
    pub fn from_env() -> Self {
        let mut limits = Self::default();
        if let Some(v) = std::env::var(MAX_POINTS_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            limits.max_nt = v;
        }
        limits
    }
}

/// Lattice points of `t·P` and of its interior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DilationCount {
    pub t: u64,
    pub count: u128,
    pub interior_count: u128,
}

fn guard(s: &DeltaQ, t: u64, limits: &OracleLimits) -> Result<(i128, Vec<i128>), OracleError> {
    if s.dim() > limits.max_dim {
        return Err(OracleError::DimensionTooLarge { dim: s.dim(), limit: limits.max_dim });
    }
    let estimate = s.n() * t;
    if estimate > BigInt::from(limits.max_nt) {
        return Err(OracleError::TooLarge { estimate, limit: limits.max_nt });
    }
    let too_large = || OracleError::TooLarge { estimate: s.n() * t, limit: limits.max_nt };
    let n = s.n().to_i128().ok_or_else(too_large)?;
    let q = s.q_head().iter().map(|q| q.to_i128().ok_or_else(too_large)).collect::<Result<_, _>>()?;
    Ok((n, q))
}

/// Counts points of `t·Δ(0,q)` by enumerating `x_d` and then each `x_i`
/// within the remaining budget.
pub fn count_points_with(s: &DeltaQ, t: u64, limits: &OracleLimits) -> Result<DilationCount, OracleError> {
    let (n, q) = guard(s, t, limits)?;
    let total = t as i128 * n;
    let mut count = 0u128;
    let mut interior = 0u128;
    for xd in 0..=total {
        count += closed_count(&q, n, xd, total - xd);
        if xd > 0 {
            interior += open_count(&q, n, xd, total - xd);
        }
    }
    Ok(DilationCount { t, count, interior_count: interior })
}

pub fn count_points(s: &DeltaQ, t: u64) -> Result<DilationCount, OracleError> {
    count_points_with(s, t, &OracleLimits::from_env())
}

/// `#{x_1..x_k : μ_i >= 0, Σ μ_i <= budget}`.
fn closed_count(q: &[i128], n: i128, xd: i128, budget: i128) -> u128 {
    let Some((&qi, rest)) = q.split_first() else { return 1 };
    let mut total = 0;
    // smallest x_i with n·x_i − q_i·x_d >= 0
    let mut xi = ceil_div(qi * xd, n);
    loop {
        let mu = n * xi - qi * xd;
        if mu > budget {
            return total;
        }
        total += closed_count(rest, n, xd, budget - mu);
        xi += 1;
    }
}

/// `#{x_1..x_k : μ_i > 0, Σ μ_i < budget}`.
fn open_count(q: &[i128], n: i128, xd: i128, budget: i128) -> u128 {
    let Some((&qi, rest)) = q.split_first() else { return u128::from(budget > 0) };
    let mut total = 0;
    let mut xi = Integer::div_floor(&(qi * xd), &n) + 1;
    loop {
        let mu = n * xi - qi * xd;
        if mu >= budget {
            return total;
        }
        total += open_count(rest, n, xd, budget - mu);
        xi += 1;
    }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -Integer::div_floor(&-a, &b)
}

/// The unique polynomial of degree `< values.len()` through `(t, values[t])`.
pub fn interpolate(values: &[BigInt]) -> RatPoly {
    let mut acc = RatPoly::zero();
    let k = values.len() as i64;
    for (j, v) in values.iter().enumerate() {
        let j = j as i64;
        let mut basis = RatPoly::one();
        let mut denom = BigInt::one();
        for m in 0..k {
            if m != j {
                basis = &basis * &RatPoly::new(vec![BigRational::from_integer((-m).into()), BigRational::one()]);
                denom *= j - m;
            }
        }
        acc = &acc + &basis.scale(&BigRational::new(v.clone(), denom));
    }
    acc
}

/// Lagrange interpolation of `t ↦ #(t·Δ(0,q) ∩ Z^d)` through `t = 0..d`.
pub fn interpolate_ehrhart_with(s: &DeltaQ, limits: &OracleLimits) -> Result<RatPoly, OracleError> {
    let values = (0..=s.dim() as u64)
        .map(|t| count_points_with(s, t, limits).map(|c| BigInt::from(c.count)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(interpolate(&values))
}

pub fn interpolate_ehrhart(s: &DeltaQ) -> Result<RatPoly, OracleError> {
    interpolate_ehrhart_with(s, &OracleLimits::from_env())
}

/// Recovers h* from `i(0), …, i(d)` through
/// `h_k = Σ_{j<=k} (−1)^j C(d+1, j)·i(k − j)`, then checks
/// `h_1 = i(1) − (d + 1)` and `h_d = #interior(P)`.
pub fn hstar_via_counts_with(s: &DeltaQ, limits: &OracleLimits) -> Result<HStar, OracleError> {
    let d = s.dim();
    let counts = (0..=d as u64).map(|t| count_points_with(s, t, limits)).collect::<Result<Vec<_>, _>>()?;
    let values: Vec<BigInt> = counts.iter().map(|c| BigInt::from(c.count)).collect();
    let coeffs: Vec<BigInt> = (0..=d)
        .map(|k| {
            (0..=k)
                .map(|j| {
                    let term = binomial(d as i64 + 1, j as i64) * &values[k - j];
                    if j % 2 == 0 {
                        term
                    } else {
                        -term
                    }
                })
                .sum()
        })
        .collect();
    let h1 = BigInt::from(counts[1].count) - (d as i64 + 1);
    if coeffs[1] != h1 {
        return Err(OracleError::Inconsistent(format!("h*_1 = {} but i(1) − (d+1) = {h1}", coeffs[1])));
    }
    let interior = BigInt::from(counts[1].interior_count);
    if coeffs[d] != interior {
        return Err(OracleError::Inconsistent(format!("h*_d = {} but the interior has {interior} points", coeffs[d])));
    }
    HStar::new(IntPoly::new(coeffs), d).map_err(|e| OracleError::Inconsistent(e.to_string()))
}

pub fn hstar_via_counts(s: &DeltaQ) -> Result<HStar, OracleError> {
    hstar_via_counts_with(s, &OracleLimits::from_env())
}

fn range_guard(len: &BigInt, limits: &OracleLimits) -> Result<i128, OracleError> {
    if len > &BigInt::from(limits.max_nt) {
        return Err(OracleError::TooLarge { estimate: len.clone(), limit: limits.max_nt });
    }
    Ok(len.to_i128().expect("guarded"))
}

/// Lattice points of `t·B`, counted directly from the block's geometry.
pub fn count_block_with(b: &Block, t: u64, limits: &OracleLimits) -> Result<u128, OracleError> {
    b.validate()?;
    let t128 = t as i128;
    Ok(match b {
        Block::Interval { m } => {
            let len = range_guard(&(m * t), limits)?;
            (0..=len).count() as u128
        }
        Block::Reeve { m } => count_points_with(&DeltaQ::new(vec![1.into(), 1.into()], m.clone())?, t, limits)?.count,
        Block::EulerianS { d, m } => match crate::eulerian::sdm(*d, m.clone()).expect("validated").delta() {
            Some(s) => count_points_with(&s, t, limits)?.count,
            None => count_block_with(&Block::Interval { m: m.clone() }, t, limits)?,
        },
        Block::Quad { a } => {
            // 0 <= y <= a·t and 0 <= a·x − y <= a·t
            let at = range_guard(&(a * t), limits)?;
            let a = a.to_i128().expect("guarded");
            let mut total = 0u128;
            for y in 0..=at {
                for x in 0..=(2 * t128) {
                    let v = a * x - y;
                    if (0..=at).contains(&v) {
                        total += 1;
                    }
                }
            }
            total
        }
        Block::StdSimplex { d } => {
            if *d > limits.max_dim {
                return Err(OracleError::DimensionTooLarge { dim: *d, limit: limits.max_dim });
            }
            simplex_points(*d, t128)
        }
        Block::Delta(s) => count_points_with(s, t, limits)?.count,
    })
}

fn simplex_points(d: usize, budget: i128) -> u128 {
    if d == 0 {
        return 1;
    }
    (0..=budget).map(|x| simplex_points(d - 1, budget - x)).sum()
}

/// `#(t·∏ r_i B_i) = ∏ #((r_i t)·B_i)`.
pub fn count_expr_with(e: &PolytopeExpr, t: u64, limits: &OracleLimits) -> Result<BigInt, OracleError> {
    e.validate()?;
    let mut acc = BigInt::one();
    for f in &e.factors {
        let rt =
            (&f.r * t).to_u64().ok_or_else(|| OracleError::TooLarge { estimate: &f.r * t, limit: limits.max_nt })?;
        acc *= count_block_with(&f.block, rt, limits)?;
    }
    Ok(acc)
}

/// Lagrange interpolation of a block's counts through `t = 0..dim`.
pub fn interpolate_block_with(b: &Block, limits: &OracleLimits) -> Result<RatPoly, OracleError> {
    let values = (0..=b.dim() as u64)
        .map(|t| count_block_with(b, t, limits).map(BigInt::from))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(interpolate(&values))
}

/// Compares a closed-form Ehrhart polynomial against oracle counts of `e` for
/// `t = 0..=t_max`, returning the first mismatch `(t, predicted, counted)`.
pub fn first_mismatch(
    e: &PolytopeExpr,
    ehr: &EhrhartPoly,
    t_max: u64,
    limits: &OracleLimits,
) -> Result<Option<(u64, BigRational, BigInt)>, OracleError> {
    for t in 0..=t_max {
        let counted = count_expr_with(e, t, limits)?;
        let predicted = ehr.eval(t as i64);
        if predicted != BigRational::from_integer(counted.clone()) {
            return Ok(Some((t, predicted, counted)));
        }
    }
    Ok(None)
}
