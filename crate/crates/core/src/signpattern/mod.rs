//! Lattice polytopes with prescribed signs of their middle Ehrhart coefficients.
//!
//! A [`Pattern`] lists the target signs `(s_{d−2}, …, s_1)` of `c_{d−2}, …, c_1`
//! in `i(P,t) = 1 + Σ c_i t^i`. [`construct`] resolves any ± pattern by an
//! ordered case analysis that reduces to smaller patterns, to a base catalog
//! in dimensions 3 and 4, or to the greedy product family of
//! [`greedy::construct_case6`]. Every "sufficiently large" parameter is found
//! by exact search, so each returned witness is verified, not trusted.

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use thiserror::Error;

use crate::ehrhart_algebra::{expr_ehrhart, sign_vector, EhrhartError, EhrhartPoly, PolytopeExpr};

pub mod catalog;
pub mod construct;
pub mod greedy;

pub use construct::{construct, Construction, Limits, TraceStep};
pub use greedy::{
    brute_force_max_weight, construct_case6, greedy_params, instantiate, predict_signs, Case6Witness, GreedyParams,
    WeightTable,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("a sign pattern needs at least one sign (dimension 3 or more)")]
    Empty,
    #[error("`{0}` is not a sign; use '+' or '-'")]
    BadChar(char),
    #[error("every d_i must be at least 2, got {0:?}")]
    BadDList(Vec<usize>),
    #[error("base must be at least 2, got {0}")]
    BadBase(u64),
    #[error("expression has dimension {expr} but the pattern needs {pattern}")]
    DimensionMismatch { expr: usize, pattern: usize },
    #[error("search exhausted in {case} for pattern {pattern}: {detail}")]
    SearchExhausted { case: String, pattern: String, detail: String },
    #[error("no construction applies to pattern {0}")]
    NoApplicableCase(String),
    #[error("coefficient budget of {limit} bits exceeded ({bits} bits) in {case}")]
    Budget { case: String, bits: u64, limit: u64 },
    #[error(transparent)]
    Ehrhart(#[from] EhrhartError),
}

/// Strict target signs, leftmost = `sgn c_{d−2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern(Vec<i8>);

impl Pattern {
    pub fn new(signs: Vec<i8>) -> Result<Self, PatternError> {
        if signs.is_empty() {
            return Err(PatternError::Empty);
        }
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(PatternError::BadChar(if *bad == 0 { '0' } else { '?' }));
        }
        Ok(Pattern(signs))
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    /// Ambient dimension `len + 2`.
    pub fn dim(&self) -> usize {
        self.0.len() + 2
    }

    /// All `2^len` patterns of the given length, in lexicographic `+ < -` order.
    pub fn all(len: usize) -> Vec<Pattern> {
        (0..1u64 << len)
            .map(|bits| Pattern((0..len).rev().map(|i| if bits >> i & 1 == 0 { 1 } else { -1 }).collect()))
            .collect()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&signs_to_string(&self.0))
    }
}

impl FromStr for Pattern {
    type Err = PatternError;
    fn from_str(s: &str) -> Result<Self, PatternError> {
        let signs = s
            .trim()
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(PatternError::BadChar(other)),
            })
            .collect::<Result<Vec<i8>, _>>()?;
        Pattern::new(signs)
    }
}

pub(crate) fn signs_to_string(signs: &[i8]) -> String {
    signs
        .iter()
        .map(|&s| {
            if s > 0 {
                '+'
            } else if s < 0 {
                '-'
            } else {
                '0'
            }
        })
        .collect()
}

/// Reads `(−, [+, −^{d_1−1}], …, [+, −^{d_k−1}])` off a pattern, returning
/// `(d_1, …, d_k)`; every block has `d_i >= 2` and there is at least one.
pub fn decompose_pattern(p: &Pattern) -> Option<Vec<usize>> {
    let (first, rest) = p.0.split_first()?;
    if *first != -1 || rest.is_empty() {
        return None;
    }
    let mut d_list = Vec::new();
    for &s in rest {
        match (s, d_list.last_mut()) {
            (1, _) => d_list.push(1),
            (-1, Some(d)) => *d += 1,
            _ => return None,
        }
    }
    d_list.iter().all(|&d| d >= 2).then_some(d_list)
}

/// What a Case-6 witness of the given blocks must show: `(−, +, −^{d_1−1}, …)`.
pub fn case6_pattern(d_list: &[usize]) -> Pattern {
    let mut signs = vec![-1];
    for &d in d_list {
        signs.push(1);
        signs.extend(std::iter::repeat_n(-1, d - 1));
    }
    Pattern(signs)
}

/// Target signs match exactly and `c_d`, `c_{d−1}`, `c_0` are positive.
pub fn verify_ehrhart(ehr: &EhrhartPoly, p: &Pattern) -> bool {
    let d = ehr.dim();
    if d != p.dim() {
        return false;
    }
    let ends_positive = [0, d - 1, d].iter().all(|&i| ehr.coeff(i).is_positive());
    ends_positive && sign_vector(ehr).map(|sv| sv.0 == p.0).unwrap_or(false)
}

pub fn verify_expr(e: &PolytopeExpr, p: &Pattern) -> Result<bool, PatternError> {
    if e.dim() != p.dim() {
        return Err(PatternError::DimensionMismatch { expr: e.dim(), pattern: p.dim() });
    }
    Ok(verify_ehrhart(&expr_ehrhart(e)?, p))
}
