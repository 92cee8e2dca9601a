//! Dense univariate polynomials over arbitrary-precision integers and rationals.
//!
//! Coefficient `i` of the backing vector is the coefficient of `x^i`. Trailing
//! zeros are always trimmed; the zero polynomial is stored as the single
//! coefficient `0`, so structural equality is polynomial equality.
//!
//! The text form lists terms in ascending degree, e.g. `1 + 7*x^3 + 9*x^4 + 3*x^5`,
//! with rational coefficients written `p/q`. The JSON form is
//! `{"var": "x", "coeffs": ["1", "0", "0", "7", "9", "3"]}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("invalid dimension {0}: must be nonnegative")]
    InvalidDimension(i64),
    #[error("invalid dilation factor {0}: must be at least 1")]
    InvalidDilation(BigInt),
    #[error("cannot parse polynomial term `{term}`: {reason}")]
    Parse { term: String, reason: String },
    #[error("expected variable `{expected}`, found `{found}`")]
    Variable { expected: String, found: String },
}

/// Coefficient ring for [`Poly`]; implemented for `BigInt` and `BigRational`.
pub trait Coefficient: Clone + PartialEq + Zero + One + Signed + fmt::Display + FromStr + fmt::Debug {}

impl Coefficient for BigInt {}
impl Coefficient for BigRational {}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<C> {
    coeffs: Vec<C>,
}

pub type IntPoly = Poly<BigInt>;
pub type RatPoly = Poly<BigRational>;

impl<C: Coefficient> Poly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(C::zero());
        }
        // a lone zero needs no trimming beyond the loop above
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![C::zero()] }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![C::one()] }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^degree`
    pub fn monomial(c: C, degree: usize) -> Self {
        let mut coeffs = vec![C::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::zero)
    }

    pub fn leading(&self) -> &C {
        self.coeffs.last().expect("poly storage is never empty")
    }

    pub fn eval(&self, v: &C) -> C {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * v.clone() + c.clone();
        }
        acc
    }

    pub fn scale(&self, k: &C) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * k.clone()).collect())
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![C::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    /// Divides by `x^k`; `None` unless the low `k` coefficients vanish.
    pub fn unshift(&self, k: usize) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if self.coeffs.iter().take(k).any(|c| !c.is_zero()) || k >= self.coeffs.len() {
            return None;
        }
        Some(Self::new(self.coeffs[k..].to_vec()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// True when `c_i = c_{span-i}` for all `0 <= i <= span`.
    pub fn is_palindromic_over(&self, span: usize) -> bool {
        (0..=span).all(|i| self.coeff(i) == self.coeff(span - i))
    }

    pub fn display_var<'a>(&'a self, var: &'a str) -> PolyDisplay<'a, C> {
        PolyDisplay { poly: self, var }
    }

    pub fn to_json(&self, var: &str) -> PolyJson {
        PolyJson { var: var.to_string(), coeffs: self.coeffs.iter().map(ToString::to_string).collect() }
    }

    pub fn from_json(json: &PolyJson) -> Result<Self, PolyError> {
        let coeffs = json
            .coeffs
            .iter()
            .map(|s| {
                s.trim().parse::<C>().map_err(|_| PolyError::Parse {
                    term: s.clone(),
                    reason: "not a decimal or p/q coefficient".into(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(coeffs))
    }

    /// Parses the ascending text form in variable `var`.
    pub fn parse(text: &str, var: &str) -> Result<Self, PolyError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(PolyError::Parse { term: text.into(), reason: "empty input".into() });
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut negative = false;
        let mut current = String::new();
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && !current.is_empty() {
                terms.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else if ch == '+' || ch == '-' {
                if ch == '-' {
                    negative = !negative;
                }
            } else {
                current.push(ch);
            }
        }
        if current.is_empty() {
            return Err(PolyError::Parse { term: text.into(), reason: "dangling sign".into() });
        }
        terms.push((negative, current));

        let mut coeffs: Vec<C> = Vec::new();
        for (neg, term) in terms {
            let (c, deg) = parse_term::<C>(&term, var)?;
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, C::zero());
            }
            let c = if neg { -c } else { c };
            coeffs[deg] = coeffs[deg].clone() + c;
        }
        Ok(Self::new(coeffs))
    }
}

fn parse_term<C: Coefficient>(term: &str, var: &str) -> Result<(C, usize), PolyError> {
    let bad = |reason: &str| PolyError::Parse { term: term.to_string(), reason: reason.to_string() };
    let (coef_part, var_part) = match term.find(|c: char| c.is_alphabetic()) {
        None => (term, None),
        Some(pos) => (term[..pos].trim_end_matches('*'), Some(&term[pos..])),
    };
    let coef =
        if coef_part.is_empty() { C::one() } else { coef_part.parse::<C>().map_err(|_| bad("bad coefficient"))? };
    let degree = match var_part {
        None => 0,
        Some(v) => {
            let (name, exp) = match v.split_once('^') {
                Some((name, exp)) => (name, Some(exp)),
                None => (v, None),
            };
            if name != var {
                return Err(PolyError::Variable { expected: var.to_string(), found: name.to_string() });
            }
            match exp {
                None => 1,
                Some(e) => e.parse::<usize>().map_err(|_| bad("bad exponent"))?,
            }
        }
    };
    Ok((coef, degree))
}

pub struct PolyDisplay<'a, C> {
    poly: &'a Poly<C>,
    var: &'a str,
}

impl<C: Coefficient> fmt::Display for PolyDisplay<'_, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (deg, c) in self.poly.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match deg {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if deg == 1 {
                        write!(f, "{}", self.var)?;
                    } else {
                        write!(f, "{}^{deg}", self.var)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_var("x").fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub var: String,
    pub coeffs: Vec<String>,
}

impl<'a, C: Coefficient> Add<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: &'a Poly<C>) -> Poly<C> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<'a, C: Coefficient> Sub<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: &'a Poly<C>) -> Poly<C> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<'a, C: Coefficient> Mul<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: &'a Poly<C>) -> Poly<C> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<C: Coefficient> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl<C: Coefficient> $tr<Poly<C>> for Poly<C> {
            type Output = Poly<C>;
            fn $method(self, rhs: Poly<C>) -> Poly<C> {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl IntPoly {
    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub fn eval_rat(&self, v: &BigRational) -> BigRational {
        self.to_rat().eval(v)
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn sum_coeffs(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    pub fn all_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }
}

impl RatPoly {
    /// `p(r * t)`: the coefficient of `t^i` is multiplied by `r^i`.
    pub fn compose_scale(&self, r: &BigInt) -> Result<RatPoly, PolyError> {
        if r < &BigInt::one() {
            return Err(PolyError::InvalidDilation(r.clone()));
        }
        let r = BigRational::from_integer(r.clone());
        let mut power = BigRational::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(c * &power);
            power *= &r;
        }
        Ok(RatPoly::new(coeffs))
    }

    /// Integer coefficients, if every coefficient is integral.
    pub fn to_int(&self) -> Option<IntPoly> {
        self.coeffs.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect::<Option<Vec<_>>>().map(IntPoly::new)
    }

    pub fn from_i64_ratios(pairs: &[(i64, i64)]) -> Self {
        RatPoly::new(pairs.iter().map(|&(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q))).collect())
    }

    /// Largest bit length among numerators and denominators.
    pub fn max_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.numer().bits().max(c.denom().bits())).max().unwrap_or(0)
    }
}

/// `binom(t + shift, d)` as a polynomial in `t`: the falling factorial
/// `(t+shift)(t+shift-1)...(t+shift-d+1) / d!`.
pub fn binom_poly(shift: i64, d: i64) -> Result<RatPoly, PolyError> {
    if d < 0 {
        return Err(PolyError::InvalidDimension(d));
    }
    let mut acc = RatPoly::one();
    let mut factorial = BigInt::one();
    for k in 0..d {
        let linear = RatPoly::new(vec![BigRational::from_integer(BigInt::from(shift - k)), BigRational::one()]);
        acc = &acc * &linear;
        factorial *= k + 1;
    }
    Ok(acc.scale(&BigRational::new(BigInt::one(), factorial)))
}

/// Integer binomial coefficient `C(n, k)` with `C(n, k) = 0` outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn lcm_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v))
}
