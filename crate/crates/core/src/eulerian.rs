//! Eulerian polynomials, permutation codes and the Eulerian simplices `S_d(m)`.
//!
//! `A_d(x) = Σ_π x^{1+des(π)}` is built two ways: by the classical recurrence
//! (the production path) and by summing over factorial-base ranks
//! `N ∈ [0, d!)`, where the descent count of the ranked permutation has the
//! closed form `N − Σ_{i=0}^{d−2} ⌊N / (i!(i+2))⌋`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::delta_simplex::{DeltaQ, HStar};
use crate::exactpoly::{binomial, factorial, IntPoly, RatPoly};

/// Default cap on `d` for [`eulerian_descent`]; `10! ≈ 3.6M` summands.
pub const DEFAULT_DESCENT_CAP: usize = 10;

/// Largest `d` whose `d!` fits in `u128`.
pub const MAX_RANK_DIM: usize = 34;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EulerianError {
    #[error("dimension {0} out of range")]
    Dimension(usize),
    #[error("{0:?} is not a permutation of 1..=n")]
    NotAPermutation(Vec<usize>),
    #[error("code entry c_{index} = {value} exceeds {bound}")]
    CodeOutOfRange { index: usize, value: usize, bound: usize },
    #[error("rank {n} outside [0, {d}!)")]
    RankOutOfRange { n: u128, d: usize },
    #[error("descent summation capped at d = {cap}, requested {d}")]
    DescentCap { d: usize, cap: usize },
    #[error("m must be at least 1")]
    NonPositiveM,
}

/// One-line notation `π_1 … π_d` of a permutation of `{1, …, d}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(entries: Vec<usize>) -> Result<Self, EulerianError> {
        let d = entries.len();
        let mut seen = vec![false; d + 1];
        for &e in &entries {
            if e == 0 || e > d || seen[e] {
                return Err(EulerianError::NotAPermutation(entries));
            }
            seen[e] = true;
        }
        Ok(Permutation(entries))
    }

    pub fn identity(d: usize) -> Self {
        Permutation((1..=d).collect())
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Inversion table `c_i = #{j > i : π_i > π_j}`, with `0 <= c_i <= d − i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LehmerCode(Vec<usize>);

impl LehmerCode {
    pub fn new(code: Vec<usize>) -> Result<Self, EulerianError> {
        let d = code.len();
        for (i, &c) in code.iter().enumerate() {
            let bound = d - 1 - i;
            if c > bound {
                return Err(EulerianError::CodeOutOfRange { index: i + 1, value: c, bound });
            }
        }
        Ok(LehmerCode(code))
    }

    pub fn digits(&self) -> &[usize] {
        &self.0
    }
}

pub fn lehmer_encode(p: &Permutation) -> LehmerCode {
    let e = &p.0;
    let code = (0..e.len()).map(|i| e[i + 1..].iter().filter(|&&x| x < e[i]).count()).collect();
    LehmerCode(code)
}

/// Picks the `(c_i + 1)`-th smallest remaining value at each step.
pub fn lehmer_decode(code: &LehmerCode) -> Permutation {
    let mut remaining: Vec<usize> = (1..=code.0.len()).collect();
    Permutation(code.0.iter().map(|&c| remaining.remove(c)).collect())
}

fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Factorial-base value `Σ c_i (d − i)!` (1-based `i`).
pub fn aleph(code: &LehmerCode) -> u128 {
    let d = code.0.len();
    assert!(d <= MAX_RANK_DIM, "rank of a {d}-permutation overflows u128");
    code.0.iter().enumerate().map(|(i, &c)| c as u128 * factorial_u128(d - 1 - i)).sum()
}

pub fn aleph_inv(n: u128, d: usize) -> Result<LehmerCode, EulerianError> {
    if d > MAX_RANK_DIM {
        return Err(EulerianError::Dimension(d));
    }
    if n >= factorial_u128(d) {
        return Err(EulerianError::RankOutOfRange { n, d });
    }
    let mut rest = n;
    let code = (0..d)
        .map(|i| {
            let f = factorial_u128(d - 1 - i);
            let (digit, r) = rest.div_rem(&f);
            rest = r;
            digit as usize
        })
        .collect();
    Ok(LehmerCode(code))
}

pub fn descents(p: &Permutation) -> usize {
    p.0.windows(2).filter(|w| w[0] > w[1]).count()
}

/// `N − Σ_{i=0}^{d−2} ⌊N / (i!(i+2))⌋`, the descent count of the
/// permutation of rank `N`.
pub fn descent_formula(n: u128, d: usize) -> Result<usize, EulerianError> {
    if !(1..=MAX_RANK_DIM).contains(&d) {
        return Err(EulerianError::Dimension(d));
    }
    if n >= factorial_u128(d) {
        return Err(EulerianError::RankOutOfRange { n, d });
    }
    let sub: u128 = (0..d - 1).map(|i| n / (factorial_u128(i) * (i as u128 + 2))).sum();
    Ok((n - sub) as usize)
}

/// `A(d,i) = i·A(d−1,i) + (d−i+1)·A(d−1,i−1)`, reported as a polynomial
/// with `A(d,i)` the coefficient of `x^i`.
pub fn eulerian_recurrence(d: usize) -> Result<IntPoly, EulerianError> {
    if d < 1 {
        return Err(EulerianError::Dimension(d));
    }
    let mut row = vec![BigInt::zero(), BigInt::one()];
    for k in 2..=d {
        let mut next = vec![BigInt::zero(); k + 1];
        for i in 1..=k {
            let stay = row.get(i).map_or_else(BigInt::zero, |a| a * i);
            let step = &row[i - 1] * (k - i + 1);
            next[i] = stay + step;
        }
        row = next;
    }
    Ok(IntPoly::new(row))
}

/// `A_d(x) = Σ_{N=0}^{d!−1} x^{1 + des(N)}` with the closed-form descent
/// count. Refuses `d` beyond `cap`.
pub fn eulerian_descent_capped(d: usize, cap: usize) -> Result<IntPoly, EulerianError> {
    if !(1..=MAX_RANK_DIM).contains(&d) {
        return Err(EulerianError::Dimension(d));
    }
    if d > cap {
        return Err(EulerianError::DescentCap { d, cap });
    }
    let divisors: Vec<u64> = (0..d - 1).map(|i| (factorial_u128(i) * (i as u128 + 2)) as u64).collect();
    let mut counts = vec![0u64; d + 1];
    for n in 0..factorial_u128(d) as u64 {
        let des = n - divisors.iter().map(|q| n / q).sum::<u64>();
        counts[des as usize + 1] += 1;
    }
    Ok(IntPoly::new(counts.into_iter().map(BigInt::from).collect()))
}

pub fn eulerian_descent(d: usize) -> Result<IntPoly, EulerianError> {
    eulerian_descent_capped(d, DEFAULT_DESCENT_CAP)
}

/// The Eulerian simplex `S_d(m)`.
///
/// For `d >= 2` this is `Δ(0,q)` with `q_i = −d!/(i! + (i−1)!)` and
/// `n = d!·m`; for `d = 1` it is the segment `[0, m]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SdmSimplex {
    pub d: usize,
    pub m: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SdmGeometry {
    Interval { m: BigInt },
    Simplex(DeltaQ),
}

/// `q_i(d) = −d! / (i! + (i−1)!)` as an exact quotient.
pub fn sdm_coordinate(d: usize, i: usize) -> BigInt {
    let den = factorial(i as u64) + factorial(i as u64 - 1);
    let num = factorial(d as u64);
    let (q, r) = num.div_rem(&den);
    assert!(r.is_zero(), "{i}! + {}! does not divide {d}!", i - 1);
    -q
}

pub fn sdm(d: usize, m: impl Into<BigInt>) -> Result<SdmSimplex, EulerianError> {
    let m = m.into();
    if d < 1 {
        return Err(EulerianError::Dimension(d));
    }
    if m < BigInt::one() {
        return Err(EulerianError::NonPositiveM);
    }
    Ok(SdmSimplex { d, m })
}

impl SdmSimplex {
    pub fn geometry(&self) -> SdmGeometry {
        if self.d == 1 {
            return SdmGeometry::Interval { m: self.m.clone() };
        }
        let q_head: Vec<BigInt> = (1..self.d).map(|i| sdm_coordinate(self.d, i)).collect();
        let n = factorial(self.d as u64) * &self.m;
        let s = DeltaQ::new(q_head, n).expect("S_d(m) is a valid Δ(0,q)");
        assert_eq!(s.q_last(), factorial(self.d as u64), "derived q_d of S_d(m) must be d!");
        SdmGeometry::Simplex(s)
    }

    pub fn delta(&self) -> Option<DeltaQ> {
        match self.geometry() {
            SdmGeometry::Simplex(s) => Some(s),
            SdmGeometry::Interval { .. } => None,
        }
    }
}

/// h* of `S_d(m)`: `A_d(x)·((m−1)x + 1) / x`; for `d = 1`, `(m−1)x + 1`.
pub fn sdm_hstar(d: usize, m: impl Into<BigInt>) -> Result<HStar, EulerianError> {
    let SdmSimplex { m, .. } = sdm(d, m)?;
    let factor = IntPoly::new(vec![BigInt::one(), m - 1u32]);
    let poly = if d == 1 {
        factor
    } else {
        let a = eulerian_recurrence(d)?;
        (&a * &factor).unshift(1).expect("A_d has no constant term")
    };
    Ok(HStar::new(poly, d).expect("Eulerian h* is valid"))
}

/// `i(S_d(m), t) = m·t^d + Σ_{i<d} C(d,i)·t^i`.
pub fn sdm_ehrhart(d: usize, m: impl Into<BigInt>) -> Result<RatPoly, EulerianError> {
    let SdmSimplex { m, .. } = sdm(d, m)?;
    let mut coeffs: Vec<BigRational> =
        (0..d).map(|i| BigRational::from_integer(binomial(d as i64, i as i64))).collect();
    coeffs.push(BigRational::from_integer(m));
    Ok(RatPoly::new(coeffs))
}
