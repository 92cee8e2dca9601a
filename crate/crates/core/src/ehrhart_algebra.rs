//! Ehrhart polynomials of products of dilated building blocks.
//!
//! Two identities carry everything here: `i(P × Q, t) = i(P, t)·i(Q, t)` and
//! `i(rP, t) = i(P, rt)`. A [`PolytopeExpr`] is a product of dilated
//! [`Block`]s, each with a closed-form Ehrhart polynomial, so its Ehrhart
//! polynomial is exact and cheap no matter how large the parameters are.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delta_simplex::{hstar, DeltaError, DeltaQ, HStar, Method};
use crate::eulerian::sdm_ehrhart;
use crate::exactpoly::{binom_poly, PolyError, RatPoly};

/// Largest `n` for which a [`Block::Delta`] outside the fast-path
/// precondition is summed directly.
pub const DELTA_NAIVE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EhrhartError {
    #[error("h* of degree {degree} does not fit dimension {dim}")]
    Degree { degree: usize, dim: usize },
    #[error("not an Ehrhart polynomial: {0}")]
    Invalid(String),
    #[error("invalid block: {0}")]
    Block(String),
    #[error("a polytope expression needs at least one factor")]
    EmptyExpr,
    #[error("sign vectors need dimension at least 3, got {0}")]
    NoMiddleCoefficients(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Delta(#[from] DeltaError),
}

/// An Ehrhart polynomial `i(P,t)` of a `dim`-dimensional lattice polytope.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EhrhartPoly {
    poly: RatPoly,
    dim: usize,
}

impl EhrhartPoly {
    /// Checks constant term 1, degree `dim`, and positive top two coefficients.
    pub fn new(poly: RatPoly, dim: usize) -> Result<Self, EhrhartError> {
        let bad = |why: String| Err(EhrhartError::Invalid(why));
        if !poly.coeff(0).is_one() {
            return bad(format!("constant term of {} is not 1", poly.display_var("t")));
        }
        if poly.degree() != Some(dim) {
            return bad(format!("{} does not have degree {dim}", poly.display_var("t")));
        }
        if dim >= 1 && !(poly.coeff(dim).is_positive() && poly.coeff(dim - 1).is_positive()) {
            return bad(format!("{} lacks positive volume and boundary terms", poly.display_var("t")));
        }
        Ok(EhrhartPoly { poly, dim })
    }

    /// The Ehrhart polynomial of a point, `1`.
    pub fn point() -> Self {
        EhrhartPoly { poly: RatPoly::one(), dim: 0 }
    }

    pub fn poly(&self) -> &RatPoly {
        &self.poly
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.poly.coeff(i)
    }

    pub fn eval(&self, t: i64) -> BigRational {
        self.poly.eval(&BigRational::from_integer(t.into()))
    }
}

impl fmt::Display for EhrhartPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.display_var("t").fmt(f)
    }
}

/// `i(P,t) = Σ_i h_i·C(t + d − i, d)`.
pub fn from_hstar(h: &HStar, d: usize) -> Result<EhrhartPoly, EhrhartError> {
    let degree = h.poly().degree().unwrap_or(0);
    if degree > d {
        return Err(EhrhartError::Degree { degree, dim: d });
    }
    let mut acc = RatPoly::zero();
    for (i, c) in h.poly().coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let basis = binom_poly(d as i64 - i as i64, d as i64)?;
        acc = &acc + &basis.scale(&BigRational::from_integer(c.clone()));
    }
    EhrhartPoly::new(acc, d)
}

/// Building blocks with closed-form Ehrhart polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Block {
    /// The segment `[0, m]`.
    Interval {
        #[serde(with = "crate::json_int")]
        m: BigInt,
    },
    /// Reeve tetrahedron `conv{0, e_1, e_2, (1,1,m)}`.
    Reeve {
        #[serde(with = "crate::json_int")]
        m: BigInt,
    },
    /// Eulerian simplex `S_d(m)`.
    EulerianS {
        d: usize,
        #[serde(with = "crate::json_int")]
        m: BigInt,
    },
    /// `conv{(0,0), (1,0), (2,a), (1,a)}`.
    Quad {
        #[serde(with = "crate::json_int")]
        a: BigInt,
    },
    /// `conv{0, e_1, …, e_d}`.
    StdSimplex {
        d: usize,
    },
    Delta(DeltaQ),
}

impl Block {
    pub fn interval(m: impl Into<BigInt>) -> Self {
        Block::Interval { m: m.into() }
    }

    pub fn reeve(m: impl Into<BigInt>) -> Self {
        Block::Reeve { m: m.into() }
    }

    pub fn eulerian_s(d: usize, m: impl Into<BigInt>) -> Self {
        Block::EulerianS { d, m: m.into() }
    }

    pub fn quad(a: impl Into<BigInt>) -> Self {
        Block::Quad { a: a.into() }
    }

    pub fn dim(&self) -> usize {
        match self {
            Block::Interval { .. } => 1,
            Block::Reeve { .. } => 3,
            Block::EulerianS { d, .. } | Block::StdSimplex { d } => *d,
            Block::Quad { .. } => 2,
            Block::Delta(s) => s.dim(),
        }
    }

    pub fn validate(&self) -> Result<(), EhrhartError> {
        let positive = |v: &BigInt, what: &str| {
            if v.is_positive() {
                Ok(())
            } else {
                Err(EhrhartError::Block(format!("{what} must be at least 1, got {v}")))
            }
        };
        match self {
            Block::Interval { m } | Block::Reeve { m } => positive(m, "m"),
            Block::EulerianS { d, m } => {
                positive(&BigInt::from(*d), "d")?;
                positive(m, "m")
            }
            Block::Quad { a } => positive(a, "a"),
            Block::StdSimplex { d } => positive(&BigInt::from(*d), "d"),
            Block::Delta(_) => Ok(()),
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Block::Interval { m } => write!(f, "[0,{m}]"),
            Block::Reeve { m } => write!(f, "T_{m}"),
            Block::EulerianS { d, m } => write!(f, "S_{d}({m})"),
            Block::Quad { a } => write!(f, "Quad({a})"),
            Block::StdSimplex { d } => write!(f, "Std_{d}"),
            Block::Delta(s) => write!(f, "{s}"),
        }
    }
}

fn rat(p: BigInt, q: i64) -> BigRational {
    BigRational::new(p, BigInt::from(q))
}

pub fn block_ehrhart(b: &Block) -> Result<EhrhartPoly, EhrhartError> {
    b.validate()?;
    let int = |v: i64| BigRational::from_integer(v.into());
    let poly = match b {
        Block::Interval { m } => RatPoly::new(vec![int(1), BigRational::from_integer(m.clone())]),
        Block::Reeve { m } => RatPoly::new(vec![int(1), rat(BigInt::from(12) - m, 6), int(1), rat(m.clone(), 6)]),
        Block::EulerianS { d, m } => sdm_ehrhart(*d, m.clone()).expect("validated parameters"),
        Block::Quad { a } => RatPoly::new(vec![int(1), int(2), BigRational::from_integer(a.clone())]),
        Block::StdSimplex { d } => binom_poly(*d as i64, *d as i64)?,
        Block::Delta(s) => {
            if !s.fast_path_ok() && s.n() > &BigInt::from(DELTA_NAIVE_LIMIT) {
                return Err(EhrhartError::Block(format!(
                    "{s} violates the fast-path precondition and n exceeds {DELTA_NAIVE_LIMIT}"
                )));
            }
            return from_hstar(&hstar(s, Method::Auto)?, s.dim());
        }
    };
    EhrhartPoly::new(poly, b.dim())
}

pub fn ehr_product(a: &EhrhartPoly, b: &EhrhartPoly) -> EhrhartPoly {
    EhrhartPoly { poly: &a.poly * &b.poly, dim: a.dim + b.dim }
}

pub fn ehr_dilate(a: &EhrhartPoly, r: &BigInt) -> Result<EhrhartPoly, EhrhartError> {
    Ok(EhrhartPoly { poly: a.poly.compose_scale(r)?, dim: a.dim })
}

/// One dilated factor `r·B` of a product.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    #[serde(with = "crate::json_int")]
    pub r: BigInt,
    pub block: Block,
}

impl Factor {
    pub fn new(r: impl Into<BigInt>, block: Block) -> Self {
        Factor { r: r.into(), block }
    }
}

/// `∏ r_i·B_i`, a product of dilated blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolytopeExpr {
    pub factors: Vec<Factor>,
}

impl PolytopeExpr {
    pub fn new(factors: Vec<Factor>) -> Result<Self, EhrhartError> {
        let e = PolytopeExpr { factors };
        e.validate()?;
        Ok(e)
    }

    pub fn single(block: Block) -> Self {
        PolytopeExpr { factors: vec![Factor::new(1, block)] }
    }

    pub fn validate(&self) -> Result<(), EhrhartError> {
        if self.factors.is_empty() {
            return Err(EhrhartError::EmptyExpr);
        }
        for f in &self.factors {
            if !f.r.is_positive() {
                return Err(PolyError::InvalidDilation(f.r.clone()).into());
            }
            f.block.validate()?;
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.block.dim()).sum()
    }

    /// `r·P` distributes over products: every factor's dilation is multiplied.
    pub fn dilate(&self, r: &BigInt) -> Self {
        PolytopeExpr { factors: self.factors.iter().map(|f| Factor { r: &f.r * r, block: f.block.clone() }).collect() }
    }

    pub fn product(&self, other: &PolytopeExpr) -> Self {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        PolytopeExpr { factors }
    }

    /// Largest decimal length among the dilations and block parameters.
    pub fn max_param_digits(&self) -> usize {
        let digits = |v: &BigInt| v.to_string().trim_start_matches('-').len();
        self.factors
            .iter()
            .map(|f| {
                let p = match &f.block {
                    Block::Interval { m } | Block::Reeve { m } | Block::EulerianS { m, .. } => digits(m),
                    Block::Quad { a } => digits(a),
                    Block::StdSimplex { .. } => 1,
                    Block::Delta(s) => digits(s.n()),
                };
                p.max(digits(&f.r))
            })
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for PolytopeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " × ")?;
            }
            if factor.r.is_one() {
                write!(f, "{}", factor.block)?;
            } else {
                write!(f, "{}·{}", factor.r, factor.block)?;
            }
        }
        Ok(())
    }
}

pub fn expr_ehrhart(e: &PolytopeExpr) -> Result<EhrhartPoly, EhrhartError> {
    e.validate()?;
    let mut acc = EhrhartPoly::point();
    for f in &e.factors {
        let block = ehr_dilate(&block_ehrhart(&f.block)?, &f.r)?;
        acc = ehr_product(&acc, &block);
    }
    Ok(acc)
}

/// `(sgn c_{d−2}, …, sgn c_1)`, each entry in `{−1, 0, +1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignVector(pub Vec<i8>);

impl SignVector {
    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sign of `c_i` for `1 <= i <= d−2`.
    pub fn sign_of_degree(&self, i: usize) -> i8 {
        self.0[self.0.len() - i]
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                1 => "+",
                -1 => "-",
                _ => "0",
            })?;
        }
        Ok(())
    }
}

impl FromStr for SignVector {
    type Err = EhrhartError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                '0' => Ok(0),
                other => Err(EhrhartError::Invalid(format!("`{other}` is not a sign"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(SignVector)
    }
}

fn sgn(v: &BigRational) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Signs of a raw polynomial's middle coefficients, viewed in dimension `dim`.
pub fn middle_signs(poly: &RatPoly, dim: usize) -> Vec<i8> {
    (1..dim.saturating_sub(1)).rev().map(|i| sgn(&poly.coeff(i))).collect()
}

pub fn sign_vector(a: &EhrhartPoly) -> Result<SignVector, EhrhartError> {
    if a.dim < 3 {
        return Err(EhrhartError::NoMiddleCoefficients(a.dim));
    }
    Ok(SignVector(middle_signs(&a.poly, a.dim)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta_simplex::hstar_naive;
    use crate::eulerian::sdm_hstar;
    use crate::exactpoly::IntPoly;

    fn rp(pairs: &[(i64, i64)]) -> RatPoly {
        RatPoly::from_i64_ratios(pairs)
    }

    fn hs(c: &[i64], d: usize) -> HStar {
        HStar::new(IntPoly::from_i64s(c), d).unwrap()
    }

    #[test]
    fn from_hstar_examples() {
        let reeve = from_hstar(&hs(&[1, 0, 12], 3), 3).unwrap();
        assert_eq!(reeve.poly(), &rp(&[(1, 1), (-1, 6), (1, 1), (13, 6)]));
        let tri = from_hstar(&hs(&[1], 2), 2).unwrap();
        assert_eq!(tri.poly(), &rp(&[(1, 1), (3, 2), (1, 2)]));
        let s4 = from_hstar(&sdm_hstar(4, 3u32).unwrap(), 4).unwrap();
        assert_eq!(s4.poly(), &rp(&[(1, 1), (4, 1), (6, 1), (4, 1), (3, 1)]));
        assert!(matches!(from_hstar(&hs(&[1, 0, 12], 3), 1), Err(EhrhartError::Degree { .. })));
    }

    #[test]
    fn block_examples() {
        assert_eq!(block_ehrhart(&Block::reeve(13)).unwrap(), from_hstar(&hs(&[1, 0, 12], 3), 3).unwrap());
        assert_eq!(block_ehrhart(&Block::interval(5)).unwrap().poly(), &rp(&[(1, 1), (5, 1)]));
        assert_eq!(block_ehrhart(&Block::eulerian_s(3, 2)).unwrap().poly(), &rp(&[(1, 1), (3, 1), (3, 1), (2, 1)]));
        assert_eq!(block_ehrhart(&Block::quad(3)).unwrap().poly(), &rp(&[(1, 1), (2, 1), (3, 1)]));
        assert!(block_ehrhart(&Block::interval(0)).is_err());
        let s = DeltaQ::from_i64(&[-3, -2], 6).unwrap();
        assert_eq!(block_ehrhart(&Block::Delta(s.clone())).unwrap(), from_hstar(&hstar_naive(&s), 3).unwrap());
        assert_eq!(block_ehrhart(&Block::StdSimplex { d: 3 }).unwrap().poly(), &binom_poly(3, 3).unwrap());
    }

    #[test]
    fn product_and_dilation() {
        let a = block_ehrhart(&Block::interval(2)).unwrap();
        let b = block_ehrhart(&Block::interval(3)).unwrap();
        assert_eq!(ehr_product(&a, &b).poly(), &rp(&[(1, 1), (5, 1), (6, 1)]));
        assert_eq!(ehr_product(&a, &EhrhartPoly::point()), a);

        let t1 = block_ehrhart(&Block::reeve(1)).unwrap();
        let prod = ehr_product(&t1, &block_ehrhart(&Block::interval(1)).unwrap());
        assert_eq!(prod.dim(), 4);
        assert_eq!(prod.poly(), &(t1.poly() * &rp(&[(1, 1), (1, 1)])));

        let unit = block_ehrhart(&Block::interval(1)).unwrap();
        assert_eq!(ehr_dilate(&unit, &5.into()).unwrap().poly(), &rp(&[(1, 1), (5, 1)]));
        assert_eq!(ehr_dilate(&t1, &2.into()).unwrap().poly(), &rp(&[(1, 1), (22, 6), (4, 1), (8, 6)]));
        assert_eq!(ehr_dilate(&t1, &1.into()).unwrap(), t1);
        assert!(ehr_dilate(&t1, &0.into()).is_err());
    }

    #[test]
    fn expressions() {
        let e = PolytopeExpr::single(Block::reeve(13));
        assert_eq!(expr_ehrhart(&e).unwrap(), block_ehrhart(&Block::reeve(13)).unwrap());
        let e =
            PolytopeExpr::new(vec![Factor::new(1, Block::interval(2)), Factor::new(1, Block::interval(3))]).unwrap();
        assert_eq!(expr_ehrhart(&e).unwrap().poly(), &rp(&[(1, 1), (5, 1), (6, 1)]));

        let e =
            PolytopeExpr::new(vec![Factor::new(2, Block::eulerian_s(2, 1)), Factor::new(1, Block::reeve(1))]).unwrap();
        let p = expr_ehrhart(&e).unwrap();
        assert_eq!(p.dim(), 5);
        let expected = &rp(&[(1, 1), (4, 1), (4, 1)]) * &rp(&[(1, 1), (11, 6), (1, 1), (1, 6)]);
        assert_eq!(p.poly(), &expected);
        assert!(PolytopeExpr::new(vec![]).is_err());
        assert!(PolytopeExpr::new(vec![Factor::new(0, Block::interval(1))]).is_err());
    }

    #[test]
    fn expression_json_schema() {
        let json = r#"{"factors":[{"r":2,"block":{"kind":"eulerian_s","d":3,"m":4}},{"r":1,"block":{"kind":"reeve","m":13}}]}"#;
        let e: PolytopeExpr = serde_json::from_str(json).unwrap();
        assert_eq!(e.factors[0], Factor::new(2, Block::eulerian_s(3, 4)));
        assert_eq!(serde_json::to_string(&e).unwrap(), json);
        let delta = r#"{"factors":[{"r":1,"block":{"kind":"delta","q_head":[1,1],"n":13}}]}"#;
        let e: PolytopeExpr = serde_json::from_str(delta).unwrap();
        assert_eq!(serde_json::to_string(&e).unwrap(), delta);
        for kind in [r#"{"kind":"interval","m":3}"#, r#"{"kind":"quad","a":2}"#, r#"{"kind":"std_simplex","d":4}"#] {
            let b: Block = serde_json::from_str(kind).unwrap();
            assert_eq!(serde_json::to_string(&b).unwrap(), kind);
        }
    }

    #[test]
    fn sign_vectors() {
        let sv = |m: i64| sign_vector(&block_ehrhart(&Block::reeve(m)).unwrap()).unwrap();
        assert_eq!(sv(13).0, vec![-1]);
        assert_eq!(sv(1).0, vec![1]);
        assert_eq!(sv(12).0, vec![0]);
        assert_eq!(sv(12).to_string(), "0");
        let unit = block_ehrhart(&Block::interval(1)).unwrap();
        assert!(matches!(sign_vector(&unit), Err(EhrhartError::NoMiddleCoefficients(1))));
        assert_eq!("+-0".parse::<SignVector>().unwrap().0, vec![1, -1, 0]);
    }

    #[test]
    fn validation_rejects_non_ehrhart_polynomials() {
        assert!(EhrhartPoly::new(rp(&[(2, 1), (1, 1)]), 1).is_err());
        assert!(EhrhartPoly::new(rp(&[(1, 1), (1, 1)]), 2).is_err());
        assert!(EhrhartPoly::new(rp(&[(1, 1), (0, 1), (1, 1)]), 2).is_err());
    }
}
