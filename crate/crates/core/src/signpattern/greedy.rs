//! The greedy product family `(∏ r_i S_{d_i}(m_i)) × r_0 T_{m_0}`.
//!
//! With `r_i = r^{α_i}` and `m_i = r^{β_i}`, the coefficient of `t^h` in the
//! product is a sum of terms of size `r^{w}`, where `w` is the total weight of
//! how `h` splits across the factors. The parameters make the heaviest split
//! unique for every `h`, so for large `r` the sign of `c_h` is the sign of that
//! split's Reeve coefficient — negative exactly when the Reeve factor
//! contributes its `t^1` term.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::{case6_pattern, signs_to_string, verify_ehrhart, PatternError};
use crate::ehrhart_algebra::{expr_ehrhart, sign_vector, Block, EhrhartPoly, Factor, PolytopeExpr, SignVector};

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

/// `ε`, `α_0..α_k`, `β_0..β_k` and the common denominator `L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedyParams {
    pub d_list: Vec<usize>,
    #[serde(serialize_with = "ser_rat")]
    pub epsilon: BigRational,
    #[serde(serialize_with = "ser_rats")]
    pub alpha: Vec<BigRational>,
    #[serde(serialize_with = "ser_rats")]
    pub beta: Vec<BigRational>,
    #[serde(with = "crate::json_int")]
    pub l: BigInt,
}

fn ser_rat<S: serde::Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_rats<S: serde::Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

fn check_d_list(d_list: &[usize]) -> Result<(), PatternError> {
    if d_list.is_empty() || d_list.iter().any(|&d| d < 2) {
        return Err(PatternError::BadDList(d_list.to_vec()));
    }
    Ok(())
}

/// `∏_{j<k} (1 − 1/d_j)`, which equals `β_k` and bounds the admissible `ε`.
pub fn headroom(d_list: &[usize]) -> BigRational {
    d_list[..d_list.len() - 1].iter().fold(BigRational::one(), |acc, &d| acc * q(d as i64 - 1, d as i64))
}

/// Parameters with `ε = ½·∏_{j<k}(1 − 1/d_j)`.
pub fn greedy_params(d_list: &[usize]) -> Result<GreedyParams, PatternError> {
    check_d_list(d_list)?;
    greedy_params_with_epsilon(d_list, headroom(d_list) * q(1, 2))
}

/// Parameters for an explicit `ε` with `0 < ε < ∏_{j<k}(1 − 1/d_j)`.
pub fn greedy_params_with_epsilon(d_list: &[usize], epsilon: BigRational) -> Result<GreedyParams, PatternError> {
    check_d_list(d_list)?;
    let k = d_list.len();
    let one = BigRational::one();
    let mut alpha = vec![&epsilon * q(1, 3), epsilon.clone()];
    let mut beta = vec![&one - &epsilon * q(1, 3), one.clone()];
    for i in 1..k {
        let next = &alpha[i] + &beta[i] / BigRational::from_integer(d_list[i - 1].into());
        beta.push(&one + &epsilon - &next);
        alpha.push(next);
    }
    let l = alpha.iter().chain(&beta).fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let params = GreedyParams { d_list: d_list.to_vec(), epsilon, alpha, beta, l };
    params.check_invariants().map_err(|_| PatternError::BadDList(d_list.to_vec()))?;
    Ok(params)
}

impl GreedyParams {
    pub fn k(&self) -> usize {
        self.d_list.len()
    }

    /// The chain `0 < α_0 < ε = α_1 < … < α_k < 1` and its companions.
    pub fn check_invariants(&self) -> Result<(), String> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        let eps = &self.epsilon;
        let fail = |what: &str| Err(format!("{what} fails for {:?} with ε = {eps}", self.d_list));
        if !(eps > &zero && self.alpha[0] > zero && &self.alpha[0] < eps && &self.alpha[1] == eps) {
            return fail("0 < α_0 < ε = α_1");
        }
        if self.alpha[1..].windows(2).any(|w| w[0] >= w[1]) || self.alpha[self.k()] >= one {
            return fail("α strictly increasing below 1");
        }
        if self.alpha[0] != eps * q(1, 3) || self.beta[0] != &one - eps * q(1, 3) {
            return fail("α_0 = ε/3, β_0 = 1 − ε/3");
        }
        for i in 1..=self.k() {
            if &self.alpha[i] + &self.beta[i] != &one + eps {
                return fail("α_i + β_i = 1 + ε");
            }
            if !(self.beta[i] <= one && &self.beta[i] > eps) {
                return fail("ε < β_i <= 1");
            }
        }
        for i in 1..self.k() {
            let d = BigRational::from_integer(self.d_list[i - 1].into());
            if self.alpha[i + 1] != &self.alpha[i] + &self.beta[i] / d {
                return fail("α_{i+1} = α_i + β_i/d_i");
            }
        }
        if &one - &self.alpha[self.k()] != headroom(&self.d_list) - eps {
            return fail("1 − α_k = ∏(1 − 1/d_j) − ε");
        }
        if self.alpha.iter().chain(&self.beta).any(|v| !(v * BigRational::from_integer(self.l.clone())).is_integer()) {
            return fail("L clears all denominators");
        }
        Ok(())
    }
}

/// Maximal split weights `W(x)` across the Eulerian factors.
///
/// Factor `i` contributes weight `w_i(ℓ) = ℓ·α_i` for `ℓ < d_i` and
/// `d_i·α_i + β_i` when taken whole; `W(x)` maximizes `Σ w_i(ℓ_i)` over
/// `Σ ℓ_i = x`, `0 <= ℓ_i <= d_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightTable {
    pub d_list: Vec<usize>,
    /// `E_j = Σ_{i>=j} d_i` for `j = 1..=k`, followed by `E_{k+1} = 0`.
    pub suffix: Vec<usize>,
    pub weights: Vec<BigRational>,
}

pub fn factor_weight(params: &GreedyParams, i: usize, ell: usize) -> BigRational {
    let d = params.d_list[i - 1];
    let base = &params.alpha[i] * BigRational::from_integer(ell.into());
    if ell == d {
        base + &params.beta[i]
    } else {
        base
    }
}

impl WeightTable {
    /// Greedy fill: the last factor first, each one completely before the next.
    pub fn greedy(params: &GreedyParams) -> Self {
        let d_list = params.d_list.clone();
        let k = d_list.len();
        let total: usize = d_list.iter().sum();
        let mut suffix = vec![0; k + 1];
        for j in (0..k).rev() {
            suffix[j] = suffix[j + 1] + d_list[j];
        }
        let weights = (0..=total)
            .map(|x| {
                let mut left = x;
                let mut w = BigRational::zero();
                for i in (1..=k).rev() {
                    let ell = left.min(d_list[i - 1]);
                    w += factor_weight(params, i, ell);
                    left -= ell;
                }
                w
            })
            .collect();
        WeightTable { d_list, suffix, weights }
    }

    pub fn total(&self) -> usize {
        self.suffix[0]
    }

    /// `E_j`, 1-based.
    pub fn e(&self, j: usize) -> usize {
        self.suffix[j - 1]
    }

    pub fn w(&self, x: usize) -> &BigRational {
        &self.weights[x]
    }

    /// `Δ(x) = W(x) − W(x−1)` for `x >= 1`.
    pub fn delta(&self, x: usize) -> BigRational {
        &self.weights[x] - &self.weights[x - 1]
    }
}

/// `max Σ w_i(ℓ_i)` over every split of `x`, by exhaustive search.
pub fn brute_force_max_weight(params: &GreedyParams, x: usize) -> Option<BigRational> {
    fn go(params: &GreedyParams, i: usize, left: usize) -> Option<BigRational> {
        if i > params.k() {
            return (left == 0).then(BigRational::zero);
        }
        (0..=params.d_list[i - 1].min(left))
            .filter_map(|ell| go(params, i + 1, left - ell).map(|rest| rest + factor_weight(params, i, ell)))
            .max()
    }
    go(params, 1, x)
}

/// Weights and signs of the Reeve factor `r_0 T_{m_0}` at `t^0..t^3`.
fn reeve_terms(params: &GreedyParams) -> [(BigRational, i8); 4] {
    let (a0, b0) = (&params.alpha[0], &params.beta[0]);
    [(BigRational::zero(), 1), (a0 + b0, -1), (a0 * q(2, 1), 1), (a0 * q(3, 1) + b0, 1)]
}

/// Asymptotic signs of `c_{D+1}, …, c_1` for the given parameters.
///
/// # Panics
/// On a tie for the heaviest split, which the parameter choice rules out.
pub fn predict_signs_with(params: &GreedyParams) -> SignVector {
    let table = WeightTable::greedy(params);
    let total = table.total();
    let reeve = reeve_terms(params);
    let signs = (1..=total + 1)
        .rev()
        .map(|h| {
            let mut best: Option<(BigRational, usize)> = None;
            let mut tied = false;
            for (l0, (w0, _)) in reeve.iter().enumerate() {
                if l0 > h || h - l0 > total {
                    continue;
                }
                let w = w0 + table.w(h - l0);
                match &best {
                    Some((bw, _)) if &w == bw => tied = true,
                    Some((bw, _)) if &w < bw => {}
                    _ => {
                        best = Some((w, l0));
                        tied = false;
                    }
                }
            }
            let (_, l0) = best.expect("some split exists");
            assert!(!tied, "tie for the heaviest split at degree {h} for {:?}", params.d_list);
            reeve[l0].1
        })
        .collect();
    SignVector(signs)
}

pub fn predict_signs(d_list: &[usize]) -> Result<SignVector, PatternError> {
    Ok(predict_signs_with(&greedy_params(d_list)?))
}

fn exact_div(value: &BigRational, l: &BigInt) -> u32 {
    let e = value * BigRational::from_integer(l.clone());
    assert!(e.is_integer(), "L·{value} is not an integer");
    e.to_integer().to_u32().expect("exponent fits in u32")
}

/// `[(b^{Lα_1}, S_{d_1}(b^{Lβ_1})), …, (b^{Lα_0}, T_{b^{Lβ_0}})]`.
pub fn instantiate(params: &GreedyParams, b: u64) -> Result<PolytopeExpr, PatternError> {
    if b < 2 {
        return Err(PatternError::BadBase(b));
    }
    let base = BigInt::from(b);
    let pow = |v: &BigRational| base.pow(exact_div(v, &params.l));
    let mut factors: Vec<Factor> = (1..=params.k())
        .map(|i| Factor::new(pow(&params.alpha[i]), Block::eulerian_s(params.d_list[i - 1], pow(&params.beta[i]))))
        .collect();
    factors.push(Factor::new(pow(&params.alpha[0]), Block::reeve(pow(&params.beta[0]))));
    Ok(PolytopeExpr::new(factors)?)
}

/// A verified member of the greedy family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Case6Witness {
    pub expr: PolytopeExpr,
    #[serde(skip)]
    pub ehrhart: EhrhartPoly,
    pub base: u64,
    pub params: GreedyParams,
}

/// Tries `b = 2, 3, …, max_b`; on exhaustion halves `ε` once and retries.
///
/// The error carries the last sign vector seen.
pub fn construct_case6(d_list: &[usize], max_b: u64) -> Result<Case6Witness, PatternError> {
    let first = greedy_params(d_list)?;
    let target = case6_pattern(d_list);
    let mut last = String::new();
    let halved = greedy_params_with_epsilon(d_list, &first.epsilon * q(1, 2))?;
    for params in [first, halved] {
        for b in 2..=max_b {
            let expr = instantiate(&params, b)?;
            let ehrhart = expr_ehrhart(&expr)?;
            if verify_ehrhart(&ehrhart, &target) {
                return Ok(Case6Witness { expr, ehrhart, base: b, params });
            }
            last = sign_vector(&ehrhart).map(|s| s.to_string()).unwrap_or_default();
        }
    }
    Err(PatternError::SearchExhausted {
        case: "case 6".into(),
        pattern: signs_to_string(target.signs()),
        detail: format!("bases 2..={max_b} (ε and ε/2) failed; last sign vector {last}"),
    })
}
