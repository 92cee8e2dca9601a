//! The simplex family `Δ(0,q) = conv{0, e_1, …, e_{d-1}, (q_1, …, q_{d-1}, n)}`.
//!
//! Its h*-polynomial is `Σ_{j=0}^{n-1} x^{Σ_i ⌈q_i j / n⌉}` with the derived
//! coordinate `q_d = 1 − Σ_{i<d} q_i`. Besides that direct sum this module
//! implements the breakpoint algorithm, whose cost depends on `Σ|q_i|`
//! rather than on `n`: each coordinate contributes a sparse list of ±1 jumps
//! to the exponent function `Φ(j) = Σ_i ⌈q_i j / n⌉`, and h* is read off the
//! plateaus of `Φ`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactpoly::IntPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeltaError {
    #[error("n must be at least 1, got {0}")]
    NonPositiveN(BigInt),
    #[error("dimension must be at least 2 (q_head must be nonempty)")]
    DimensionTooSmall,
    #[error(
        "fast path requires n >= |q_i| for every coordinate including q_d; \
         coordinate {index} has q = {q} but n = {n} (use the naive method)"
    )]
    FastPathPrecondition { index: usize, q: BigInt, n: BigInt },
    #[error("characteristic polynomials require every q_i (including q_d) to be nonzero and divide n; coordinate {index} has q = {q}, n = {n}")]
    Divisibility { index: usize, q: BigInt, n: BigInt },
    #[error("m must be at least 1, got {0}")]
    NonPositiveM(BigInt),
    #[error("invalid h*-polynomial: {0}")]
    InvalidHStar(String),
    #[error("invalid family parameters: {0}")]
    FamilyParameters(String),
    #[error("n = {0} is too large for the direct summation")]
    TooLargeForNaive(BigInt),
}

/// `Δ(0,q)` given by `q_head = (q_1, …, q_{d-1})` and `n`.
///
/// `q_d` is never stored; [`DeltaQ::q_last`] recomputes it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DeltaQRaw", into = "DeltaQRaw")]
pub struct DeltaQ {
    q_head: Vec<BigInt>,
    n: BigInt,
}

#[derive(Serialize, Deserialize)]
struct DeltaQRaw {
    #[serde(with = "crate::json_int::vec")]
    q_head: Vec<BigInt>,
    #[serde(with = "crate::json_int")]
    n: BigInt,
}

impl TryFrom<DeltaQRaw> for DeltaQ {
    type Error = DeltaError;
    fn try_from(raw: DeltaQRaw) -> Result<Self, DeltaError> {
        DeltaQ::new(raw.q_head, raw.n)
    }
}

impl From<DeltaQ> for DeltaQRaw {
    fn from(s: DeltaQ) -> Self {
        DeltaQRaw { q_head: s.q_head, n: s.n }
    }
}

impl DeltaQ {
    pub fn new(q_head: Vec<BigInt>, n: BigInt) -> Result<Self, DeltaError> {
        if n < BigInt::one() {
            return Err(DeltaError::NonPositiveN(n));
        }
        if q_head.is_empty() {
            return Err(DeltaError::DimensionTooSmall);
        }
        Ok(DeltaQ { q_head, n })
    }

    pub fn from_i64(q_head: &[i64], n: i64) -> Result<Self, DeltaError> {
        Self::new(q_head.iter().map(|&q| BigInt::from(q)).collect(), BigInt::from(n))
    }

    pub fn q_head(&self) -> &[BigInt] {
        &self.q_head
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn dim(&self) -> usize {
        self.q_head.len() + 1
    }

    /// `q_d = 1 − Σ_{i<d} q_i`.
    pub fn q_last(&self) -> BigInt {
        BigInt::one() - self.q_head.iter().sum::<BigInt>()
    }

    /// All `d` coordinates `(q_1, …, q_d)`.
    pub fn q_full(&self) -> Vec<BigInt> {
        let mut q = self.q_head.clone();
        q.push(self.q_last());
        q
    }

    /// Same `q_head`, `n` replaced by `m·n`.
    pub fn scaled_n(&self, m: &BigInt) -> Result<Self, DeltaError> {
        if m < &BigInt::one() {
            return Err(DeltaError::NonPositiveM(m.clone()));
        }
        Ok(DeltaQ { q_head: self.q_head.clone(), n: &self.n * m })
    }

    /// Whether `n >= |q_i|` for every coordinate, `q_d` included.
    pub fn fast_path_ok(&self) -> bool {
        self.fast_path_violation().is_none()
    }

    fn fast_path_violation(&self) -> Option<DeltaError> {
        self.q_full().into_iter().enumerate().find_map(|(i, q)| {
            (q.abs() > self.n).then(|| DeltaError::FastPathPrecondition { index: i + 1, q, n: self.n.clone() })
        })
    }
}

impl fmt::Display for DeltaQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q: Vec<String> = self.q_head.iter().map(ToString::to_string).collect();
        write!(f, "Δ(0; q_head=({}), n={})", q.join(","), self.n)
    }
}

/// A polynomial certified to look like an h*-polynomial: constant term 1,
/// nonnegative coefficients, degree at most `dim`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HStar {
    poly: IntPoly,
    dim: usize,
}

impl HStar {
    pub fn new(poly: IntPoly, dim: usize) -> Result<Self, DeltaError> {
        if !poly.coeff(0).is_one() {
            return Err(DeltaError::InvalidHStar(format!("constant term of {poly} is not 1")));
        }
        if !poly.all_nonnegative() {
            return Err(DeltaError::InvalidHStar(format!("{poly} has a negative coefficient")));
        }
        if poly.degree().unwrap_or(0) > dim {
            return Err(DeltaError::InvalidHStar(format!("{poly} has degree above {dim}")));
        }
        Ok(HStar { poly, dim })
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn into_poly(self) -> IntPoly {
        self.poly
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `h*(1)`, the normalized volume.
    pub fn normalized_volume(&self) -> BigInt {
        self.poly.sum_coeffs()
    }
}

impl fmt::Display for HStar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

/// A jump of `delta` in the exponent function at index `position`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Breakpoint {
    pub position: BigInt,
    pub delta: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Auto,
    Fast,
    Naive,
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Jump positions of `j ↦ ⌈q j / n⌉` over `1 <= j <= n−1`.
///
/// For `q > 0` the value reaches `m` at `j = ⌊(m−1)n/q⌋ + 1`; for `q < 0` it
/// drops to `−m` at `j = ⌈m n/|q|⌉`. Positions landing on `j = n` are outside
/// the summation range and are dropped.
pub fn breakpoints_for(q: &BigInt, n: &BigInt) -> Result<Vec<Breakpoint>, DeltaError> {
    if q.is_zero() {
        return Ok(Vec::new());
    }
    if &q.abs() > n {
        return Err(DeltaError::FastPathPrecondition { index: 0, q: q.clone(), n: n.clone() });
    }
    let mut out = Vec::new();
    if q.is_positive() {
        let count = if q == n { q - 1u32 } else { q.clone() };
        let mut m = BigInt::one();
        while m <= count {
            let position = ((&m - 1u32) * n).div_floor(q) + 1u32;
            out.push(Breakpoint { position, delta: 1 });
            m += 1u32;
        }
    } else {
        let a = q.abs();
        let mut m = BigInt::one();
        while m < a {
            out.push(Breakpoint { position: ceil_div(&(&m * n), &a), delta: -1 });
            m += 1u32;
        }
    }
    Ok(out)
}

/// Aggregates jumps at equal positions, drops zero nets, sorts ascending.
fn merge(mut points: Vec<Breakpoint>) -> Vec<Breakpoint> {
    points.sort_unstable();
    let mut merged: Vec<Breakpoint> = Vec::with_capacity(points.len());
    for p in points {
        match merged.last_mut() {
            Some(last) if last.position == p.position => last.delta += p.delta,
            _ => merged.push(p),
        }
    }
    merged.retain(|p| p.delta != 0);
    merged
}

/// The merged jumps of `Φ` over all `d` coordinates: the sparse form of the
/// difference polynomial `F(x) = Σ_j (Φ(j) − Φ(j−1)) x^j`.
pub fn difference_breakpoints(s: &DeltaQ) -> Result<Vec<Breakpoint>, DeltaError> {
    if let Some(err) = s.fast_path_violation() {
        return Err(err);
    }
    let mut all = Vec::new();
    for q in s.q_full() {
        all.extend(breakpoints_for(&q, s.n())?);
    }
    Ok(merge(all))
}

/// Dense `F(x)` from its sparse breakpoints; only sensible for small `n`.
pub fn difference_poly(points: &[Breakpoint]) -> IntPoly {
    let Some(top) = points.last() else { return IntPoly::zero() };
    let top = top.position.to_usize().expect("difference polynomial degree fits in memory");
    let mut coeffs = vec![BigInt::zero(); top + 1];
    for p in points {
        let i = p.position.to_usize().expect("position fits");
        coeffs[i] += p.delta;
    }
    IntPoly::new(coeffs)
}

/// `Σ_j (i_{j+1} − i_j)·x^{h_j}`: the plateau between consecutive jumps,
/// starting at height `start` on `[0, i_1)` and ending at `n`.
fn plateau_sum(points: &[Breakpoint], n: &BigInt, start: i64, dim: usize) -> IntPoly {
    let mut coeffs = vec![BigInt::zero(); dim + 1];
    let mut height = start;
    let mut left = BigInt::zero();
    let mut emit = |height: i64, width: BigInt| {
        assert!(
            (0..=dim as i64).contains(&height),
            "plateau height {height} outside [0, {dim}]: breakpoint bookkeeping is inconsistent"
        );
        coeffs[height as usize] += width;
    };
    for p in points {
        emit(height, &p.position - &left);
        left = p.position.clone();
        height += p.delta;
    }
    emit(height, n - &left);
    IntPoly::new(coeffs)
}

/// h* by the breakpoint algorithm in `O(Σ|q_i|)` big-integer operations.
pub fn hstar_fast(s: &DeltaQ) -> Result<HStar, DeltaError> {
    let points = difference_breakpoints(s)?;
    let poly = plateau_sum(&points, s.n(), 0, s.dim());
    Ok(HStar::new(poly, s.dim()).expect("plateau reconstruction yields a valid h*"))
}

/// h* by the direct sum over `j = 0..n−1`. Linear in `n`.
pub fn hstar_naive(s: &DeltaQ) -> HStar {
    let poly = exponent_histogram(s, |q, j, n| ceil_i128(q * j, n), |q, j, n| ceil_div(&(q * j), n));
    HStar::new(poly, s.dim()).expect("direct sum yields a valid h*")
}

fn ceil_i128(a: i128, b: i128) -> i128 {
    -Integer::div_floor(&-a, &b)
}

/// Counts `Σ_{j=0}^{n-1} x^{Σ_i f(q_i, j, n)}` with `q` ranging over all `d`
/// coordinates. Uses `i128` when every input fits in `i64` (so products
/// `q·j` cannot overflow), and big integers otherwise.
fn exponent_histogram(
    s: &DeltaQ,
    small: impl Fn(i128, i128, i128) -> i128,
    big: impl Fn(&BigInt, &BigInt, &BigInt) -> BigInt,
) -> IntPoly {
    let d = s.dim();
    let q = s.q_full();
    let mut counts = vec![0u64; d + 2];
    let small_inputs: Option<Vec<i64>> = q.iter().map(ToPrimitive::to_i64).collect();
    match (small_inputs, s.n().to_i64()) {
        (Some(qs), Some(n)) => {
            let qs: Vec<i128> = qs.into_iter().map(i128::from).collect();
            let n = i128::from(n);
            for j in 0..n {
                let e: i128 = qs.iter().map(|&qi| small(qi, j, n)).sum();
                bump(&mut counts, e, d);
            }
        }
        _ => {
            let n = s.n();
            let mut j = BigInt::zero();
            while &j < n {
                let e: BigInt = q.iter().map(|qi| big(qi, &j, n)).sum();
                bump(&mut counts, e.to_i128().unwrap_or(i128::MAX), d);
                j += 1u32;
            }
        }
    }
    IntPoly::new(counts.into_iter().map(BigInt::from).collect())
}

fn bump(counts: &mut [u64], e: i128, d: usize) {
    assert!((0..=d as i128 + 1).contains(&e), "exponent {e} outside [0, {}]", d + 1);
    counts[e as usize] += 1;
}

/// Dispatches to the fast or naive path. `Auto` takes the fast path exactly
/// when its precondition holds.
pub fn hstar(s: &DeltaQ, method: Method) -> Result<HStar, DeltaError> {
    match method {
        Method::Fast => hstar_fast(s),
        Method::Naive => Ok(hstar_naive(s)),
        Method::Auto if s.fast_path_ok() => hstar_fast(s),
        Method::Auto => Ok(hstar_naive(s)),
    }
}

/// The factor `m` family: `h*` of `Δ(0,q)` with `n ↦ m·n` equals
/// `m·x·L_1(x) + L_2(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacteristicPolys {
    pub l1: IntPoly,
    pub l2: IntPoly,
}

impl CharacteristicPolys {
    /// `m·x·L_1 + L_2`
    pub fn combine(&self, m: &BigInt) -> IntPoly {
        &self.l1.shift(1).scale(m) + &self.l2
    }
}

/// Per-coordinate periods `a_i = n / q_i` when all are integral and nonzero.
fn periods(s: &DeltaQ) -> Result<Vec<BigInt>, DeltaError> {
    s.q_full()
        .into_iter()
        .enumerate()
        .map(|(i, q)| {
            if q.is_zero() || !s.n().is_multiple_of(&q) {
                Err(DeltaError::Divisibility { index: i + 1, q, n: s.n().clone() })
            } else {
                Ok(s.n() / q)
            }
        })
        .collect()
}

/// `L_1, L_2` by breakpoints at multiples of `|a_i|`.
///
/// With integral `a_i` the exponent of `x·L_1` at `j` is
/// `p + Σ_{q_i>0} ⌊j/a_i⌋ − Σ_{q_i<0} ⌊j/|a_i|⌋` where `p = #{q_i > 0}`.
pub fn l1_l2(s: &DeltaQ) -> Result<CharacteristicPolys, DeltaError> {
    let a = periods(s)?;
    let mut points = Vec::new();
    let mut p = 0i64;
    for ai in &a {
        let delta = if ai.is_positive() { 1 } else { -1 };
        if ai.is_positive() {
            p += 1;
        }
        let step = ai.abs();
        let mut pos = step.clone();
        while &pos < s.n() {
            points.push(Breakpoint { position: pos.clone(), delta });
            pos += &step;
        }
    }
    let x_l1 = plateau_sum(&merge(points), s.n(), p, s.dim());
    finish_l1_l2(s, x_l1)
}

/// `L_1, L_2` from the defining sum `Σ_j x^{Σ_i ⌈(q_i j + q_i⁺)/n⌉}`.
pub fn l1_l2_naive(s: &DeltaQ) -> Result<CharacteristicPolys, DeltaError> {
    periods(s)?;
    let x_l1 = exponent_histogram(
        s,
        |q, j, n| ceil_i128(q * j + q.max(0), n),
        |q, j, n| ceil_div(&(q * j + q.max(&BigInt::zero())), n),
    );
    finish_l1_l2(s, x_l1)
}

fn finish_l1_l2(s: &DeltaQ, x_l1: IntPoly) -> Result<CharacteristicPolys, DeltaError> {
    let l1 = x_l1.unshift(1).expect("x·L_1 has no constant term");
    let h = hstar(s, Method::Auto)?;
    let l2 = h.poly() - &x_l1;
    Ok(CharacteristicPolys { l1, l2 })
}

/// h* of `Δ(0,q)` with `n` replaced by `m·n`, via `m·x·L_1 + L_2`.
pub fn hstar_family(s: &DeltaQ, m: &BigInt) -> Result<HStar, DeltaError> {
    if m < &BigInt::one() {
        return Err(DeltaError::NonPositiveM(m.clone()));
    }
    let polys = l1_l2(s)?;
    HStar::new(polys.combine(m), s.dim())
}

/// Families with closed-form h*.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpecialFamily {
    /// `d = 2k−1`, last vertex `(a^{k−1}, (−a)^{k−1}, s+1)`.
    ROdd { s: u64, k: u64, a: u64 },
    /// `d = 2k`, last vertex `(1, a^{k−1}, (−a)^{k−1}, s+1)`.
    REven { s: u64, k: u64, a: u64 },
    /// Extended Reeve simplex `M_{s,d}`.
    ExtendedReeve { s: u64, d: u64 },
    /// `q = (−1, …, −1, d)` with `n = d·m`.
    AllMinusOnes { d: u64, m: u64 },
    /// `q = (−2^0, …, −2^{d−2}, 2^{d−1})` with `n = 2^{d−1}·m`.
    Pow2 { d: u64, m: u64 },
}

impl SpecialFamily {
    /// The simplex and its closed-form h*.
    pub fn build(self) -> Result<(DeltaQ, HStar), DeltaError> {
        let bad = |msg: &str| Err(DeltaError::FamilyParameters(msg.to_string()));
        let big = |v: u64| BigInt::from(v);
        let (q_head, n, closed): (Vec<BigInt>, BigInt, IntPoly) = match self {
            SpecialFamily::ROdd { s, k, a } | SpecialFamily::REven { s, k, a } => {
                if k < 2 {
                    return bad("k must be at least 2");
                }
                let b = a.gcd(&(s + 1));
                let k = k as usize;
                let mut q = Vec::new();
                if matches!(self, SpecialFamily::REven { .. }) {
                    q.push(BigInt::one());
                }
                q.extend(std::iter::repeat_n(big(a), k - 1));
                q.extend(std::iter::repeat_n(-big(a), k - 1));
                let poly =
                    &(&IntPoly::monomial(big(s + 1 - b), k) + &IntPoly::monomial(big(b - 1), 1)) + &IntPoly::one();
                (q, big(s + 1), poly)
            }
            SpecialFamily::ExtendedReeve { s, d } => {
                if d < 3 {
                    return bad("d must be at least 3");
                }
                let k = (d as usize).div_ceil(2);
                let ones = if d % 2 == 1 { k - 1 } else { k };
                let mut q = vec![BigInt::one(); ones];
                q.extend(std::iter::repeat_n(big(s), k - 1));
                (q, big(s + 1), &IntPoly::monomial(big(s), k) + &IntPoly::one())
            }
            SpecialFamily::AllMinusOnes { d, m } => {
                if d < 3 || m < 1 {
                    return bad("need d >= 3 and m >= 1");
                }
                let d = d as usize;
                let mut coeffs = vec![big(m); d + 1];
                coeffs[0] = BigInt::one();
                coeffs[d] -= 1u32;
                (vec![-BigInt::one(); d - 1], big(d as u64) * m, IntPoly::new(coeffs))
            }
            SpecialFamily::Pow2 { d, m } => {
                if d < 3 || m < 1 {
                    return bad("need d >= 3 and m >= 1");
                }
                let q = (0..d - 1).map(|i| -(BigInt::one() << i)).collect();
                let n = (BigInt::one() << (d - 1)) * m;
                let poly =
                    &IntPoly::new(vec![BigInt::one(), big(m - 1)]) * &IntPoly::from_i64s(&[1, 1]).pow(d as u32 - 1);
                (q, n, poly)
            }
        };
        let s = DeltaQ::new(q_head, n)?;
        let dim = s.dim();
        Ok((s, HStar::new(closed, dim)?))
    }
}
