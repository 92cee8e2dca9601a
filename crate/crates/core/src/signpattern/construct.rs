//! The recursive constructor.
//!
//! Cases are tried in order on `Sgn = (s_{d−2}, …, s_1)`:
//!
//! 1. `s_{d−2} = +`: `r·Q × [0,1]`, `Sgn(Q) = (s_{d−3}, …, s_1)`.
//! 2. `s_1 = +`: `Q × [0,m]`, `Sgn(Q) = (s_{d−2}, …, s_2)`.
//! 3. `s_{d−2} = s_{d−3} = s_1 = −`: `r·Q × T_m`, `Sgn(Q) = (−s_{d−4}, …, −s_2)`.
//! 4. `s_1 = −, s_2 = +, s_3 = −`: `r·Q × Quad(a)`, `Sgn(Q) = (s_{d−2}, …, s_3)`.
//! 5. `s_k = s_{k−1} = +` for a split `d = d_1 + d_2`, `k ∈ {d_1, d_2}`:
//!    `r·Q_1 × Q_2` with `dim Q_1 = k`, `Sgn(Q_1) = (s_{k−2}, …, s_1)` and
//!    `Sgn(Q_2) = (s_{d−2}, …, s_{k+1})`.
//! 6. Otherwise the pattern has the greedy shape; see [`construct_case6`].
//!
//! Dimensions 3 and 4 come from the base catalog. Free parameters are powers
//! of two found by galloping on the exponent and then bisecting, with an exact
//! sign check at every probe; the result is re-verified from scratch.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::catalog::base_catalog;
use super::greedy::construct_case6;
use super::{decompose_pattern, signs_to_string, verify_ehrhart, Pattern, PatternError};
use crate::ehrhart_algebra::{
    block_ehrhart, ehr_dilate, ehr_product, expr_ehrhart, middle_signs, Block, EhrhartPoly, Factor, PolytopeExpr,
};
use crate::exactpoly::RatPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest base tried by the greedy family search.
    pub max_base: u64,
    /// Largest exponent `e` of a searched parameter `2^e`.
    pub max_param_bits: u32,
    /// Abort when any intermediate coefficient exceeds this many bits.
    pub max_coeff_bits: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_base: 64, max_param_bits: 8192, max_coeff_bits: 4_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub depth: usize,
    pub dim: usize,
    pub pattern: String,
    pub case: String,
    pub params: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub expr: PolytopeExpr,
    pub ehrhart: EhrhartPoly,
    pub trace: Vec<TraceStep>,
}

/// Builds and verifies a polytope whose sign vector is `p`.
pub fn construct(p: &Pattern, limits: &Limits) -> Result<Construction, PatternError> {
    let mut builder = Builder { limits: *limits, trace: Vec::new() };
    let (expr, _) = builder.build(p.signs(), p.dim(), 0)?;
    let ehrhart = expr_ehrhart(&expr)?;
    if !verify_ehrhart(&ehrhart, p) {
        return Err(PatternError::SearchExhausted {
            case: "final verification".into(),
            pattern: p.to_string(),
            detail: format!("assembled expression has Ehrhart polynomial {ehrhart}"),
        });
    }
    Ok(Construction { expr, ehrhart, trace: builder.trace })
}

type Built = (PolytopeExpr, EhrhartPoly);

struct Builder {
    limits: Limits,
    trace: Vec<TraceStep>,
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn unit_cube(dim: usize) -> Built {
    let expr = PolytopeExpr { factors: (0..dim).map(|_| Factor::new(1, Block::interval(1))).collect() };
    let ehr = expr_ehrhart(&expr).expect("unit cube");
    (expr, ehr)
}

/// Signs as `m → ∞` of `m·A + B` at the middle degrees of dimension `dim`.
fn asymptotic_signs(a: &RatPoly, b: &RatPoly, dim: usize) -> Vec<i8> {
    middle_signs(a, dim).into_iter().zip(middle_signs(b, dim)).map(|(sa, sb)| if sa != 0 { sa } else { sb }).collect()
}

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

impl Builder {
    fn record(&mut self, depth: usize, dim: usize, signs: &[i8], case: &str, params: &[(&str, String)]) {
        self.trace.push(TraceStep {
            depth,
            dim,
            pattern: signs_to_string(signs),
            case: case.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        });
    }

    fn budget(&self, case: &str, poly: &RatPoly) -> Result<(), PatternError> {
        let bits = poly.max_bits();
        if bits > self.limits.max_coeff_bits {
            return Err(PatternError::Budget { case: case.to_string(), bits, limit: self.limits.max_coeff_bits });
        }
        Ok(())
    }

    /// Smallest-found exponent `e` with `accept(2^e)`: gallop over
    /// `e = 1, 2, 4, …`, then bisect between the last failure and the first
    /// success.
    fn search(
        &self,
        mut accept: impl FnMut(&BigInt) -> Result<bool, PatternError>,
    ) -> Result<Option<u32>, PatternError> {
        let cap = self.limits.max_param_bits.max(1);
        let mut lo = 0u32;
        let mut e = 1u32;
        let hi = loop {
            if accept(&pow2(e))? {
                break e;
            }
            if e >= cap {
                return Ok(None);
            }
            lo = e;
            e = (e * 2).min(cap);
        };
        let mut hi = hi;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if accept(&pow2(mid))? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Some(hi))
    }

    fn exhausted(&self, case: &str, signs: &[i8], what: &str) -> PatternError {
        PatternError::SearchExhausted {
            case: case.to_string(),
            pattern: signs_to_string(signs),
            detail: format!("{what} up to 2^{} failed", self.limits.max_param_bits),
        }
    }

    fn build(&mut self, signs: &[i8], dim: usize, depth: usize) -> Result<Built, PatternError> {
        debug_assert_eq!(signs.len() + 2, dim.max(2));
        if dim <= 2 {
            return Ok(unit_cube(dim));
        }
        let target = Pattern::new(signs.to_vec())?;
        if dim <= 4 {
            let expr = base_catalog()
                .lookup(&target)
                .ok_or_else(|| PatternError::NoApplicableCase(target.to_string()))?
                .clone();
            let ehr = expr_ehrhart(&expr)?;
            self.record(depth, dim, signs, "catalog", &[("expr", expr.to_string())]);
            return Ok((expr, ehr));
        }
        let len = signs.len();
        let s = |i: usize| signs[len - i];

        if s(dim - 2) == 1 {
            return self.case1(&target, depth);
        }
        if s(1) == 1 {
            return self.case2(&target, depth);
        }
        if s(dim - 3) == -1 && s(1) == -1 {
            return self.case3(&target, depth);
        }
        if s(2) == 1 && s(3) == -1 {
            return self.case4(&target, depth);
        }
        if signs.windows(2).any(|w| w == [1, 1]) {
            if let Some(built) = self.case5(&target, depth)? {
                return Ok(built);
            }
        }
        if let Some(d_list) = decompose_pattern(&target) {
            let w = construct_case6(&d_list, self.limits.max_base)?;
            let params = [
                ("d_list", format!("{d_list:?}")),
                ("b", w.base.to_string()),
                ("epsilon", w.params.epsilon.to_string()),
                ("L", w.params.l.to_string()),
            ];
            self.record(depth, dim, signs, "case 6", &params);
            return Ok((w.expr, w.ehrhart));
        }
        self.fallback(&target, depth)
    }

    fn case1(&mut self, target: &Pattern, depth: usize) -> Result<Built, PatternError> {
        let (signs, dim) = (target.signs(), target.dim());
        let (q_expr, q) = self.build(&signs[1..], dim - 1, depth + 1)?;
        let unit = block_ehrhart(&Block::interval(1))?;
        let found = self.search(|r| {
            let p = ehr_product(&ehr_dilate(&q, r)?, &unit);
            self.budget("case 1", p.poly())?;
            Ok(verify_ehrhart(&p, target))
        })?;
        let e = found.ok_or_else(|| self.exhausted("case 1", signs, "dilation r"))?;
        let r = pow2(e);
        self.record(depth, dim, signs, "case 1", &[("r", format!("2^{e}"))]);
        let expr = q_expr.dilate(&r).product(&PolytopeExpr::single(Block::interval(1)));
        let ehr = ehr_product(&ehr_dilate(&q, &r)?, &unit);
        Ok((expr, ehr))
    }

    fn case2(&mut self, target: &Pattern, depth: usize) -> Result<Built, PatternError> {
        let (signs, dim) = (target.signs(), target.dim());
        let (q_expr, q) = self.build(&signs[..signs.len() - 1], dim - 1, depth + 1)?;
        let found = self.search(|m| {
            let p = ehr_product(&q, &block_ehrhart(&Block::interval(m.clone()))?);
            self.budget("case 2", p.poly())?;
            Ok(verify_ehrhart(&p, target))
        })?;
        let e = found.ok_or_else(|| self.exhausted("case 2", signs, "length m"))?;
        let m = pow2(e);
        self.record(depth, dim, signs, "case 2", &[("m", format!("2^{e}"))]);
        let interval = Block::interval(m);
        let ehr = ehr_product(&q, &block_ehrhart(&interval)?);
        Ok((q_expr.product(&PolytopeExpr::single(interval)), ehr))
    }

    /// `r·Q × B(m)` where `i(B(m), t) = m·A(t) + B(t)`: first `r` so that the
    /// `m → ∞` signs are right, then `m` for the exact signs. Retries with a
    /// larger `r` when no `m` works.
    fn two_stage(
        &mut self,
        name: &str,
        target: &Pattern,
        q: &EhrhartPoly,
        slope: &RatPoly,
        offset: &RatPoly,
        block: impl Fn(BigInt) -> Block,
    ) -> Result<(u32, u32, Block), PatternError> {
        let signs = target.signs();
        let dim = target.dim();
        let first = self.search(|r| {
            let qr = ehr_dilate(q, r)?;
            let (a, b) = (qr.poly() * slope, qr.poly() * offset);
            self.budget(name, &a)?;
            Ok(asymptotic_signs(&a, &b, dim) == signs)
        })?;
        let mut er = first.ok_or_else(|| self.exhausted(name, signs, "dilation r"))?;
        loop {
            let qr = ehr_dilate(q, &pow2(er))?;
            let found = self.search(|m| {
                let p = ehr_product(&qr, &block_ehrhart(&block(m.clone()))?);
                self.budget(name, p.poly())?;
                Ok(verify_ehrhart(&p, target))
            })?;
            if let Some(em) = found {
                return Ok((er, em, block(pow2(em))));
            }
            if er >= self.limits.max_param_bits {
                return Err(self.exhausted(name, signs, "parameter pair"));
            }
            er = (er * 2).min(self.limits.max_param_bits);
        }
    }

    fn case3(&mut self, target: &Pattern, depth: usize) -> Result<Built, PatternError> {
        let (signs, dim) = (target.signs(), target.dim());
        let inner: Vec<i8> = signs[2..signs.len() - 1].iter().map(|s| -s).collect();
        let (q_expr, q) = self.build(&inner, dim - 3, depth + 1)?;
        // i(T_m, t) = m·(t³ − t)/6 + (t + 1)²
        let slope = RatPoly::new(vec![
            int(0),
            BigRational::new((-1).into(), 6.into()),
            int(0),
            BigRational::new(1.into(), 6.into()),
        ]);
        let offset = RatPoly::new(vec![int(1), int(2), int(1)]);
        let (er, em, block) = self.two_stage("case 3", target, &q, &slope, &offset, Block::reeve)?;
        self.record(depth, dim, signs, "case 3", &[("r", format!("2^{er}")), ("m", format!("2^{em}"))]);
        self.assemble(q_expr, &q, er, block)
    }

    fn case4(&mut self, target: &Pattern, depth: usize) -> Result<Built, PatternError> {
        let (signs, dim) = (target.signs(), target.dim());
        let (q_expr, q) = self.build(&signs[..signs.len() - 2], dim - 2, depth + 1)?;
        // i(Quad(a), t) = a·t² + (2t + 1)
        let slope = RatPoly::new(vec![int(0), int(0), int(1)]);
        let offset = RatPoly::new(vec![int(1), int(2)]);
        let (er, ea, block) = self.two_stage("case 4", target, &q, &slope, &offset, Block::quad)?;
        self.record(depth, dim, signs, "case 4", &[("r", format!("2^{er}")), ("a", format!("2^{ea}"))]);
        self.assemble(q_expr, &q, er, block)
    }

    fn assemble(&self, q_expr: PolytopeExpr, q: &EhrhartPoly, er: u32, block: Block) -> Result<Built, PatternError> {
        let r = pow2(er);
        let ehr = ehr_product(&ehr_dilate(q, &r)?, &block_ehrhart(&block)?);
        Ok((q_expr.dilate(&r).product(&PolytopeExpr::single(block)), ehr))
    }

    /// Splits into a dilated lower factor of dimension `k` and an upper one.
    fn split(&mut self, case: &str, target: &Pattern, k: usize, depth: usize) -> Result<Option<Built>, PatternError> {
        let (signs, dim) = (target.signs(), target.dim());
        let (lower_expr, lower) = self.build(&signs[dim - k..], k, depth + 1)?;
        let (upper_expr, upper) = self.build(&signs[..dim - 2 - k], dim - k, depth + 1)?;
        let found = self.search(|r| {
            let p = ehr_product(&ehr_dilate(&lower, r)?, &upper);
            self.budget(case, p.poly())?;
            Ok(verify_ehrhart(&p, target))
        })?;
        let Some(e) = found else { return Ok(None) };
        let r = pow2(e);
        self.record(depth, dim, signs, case, &[("k", k.to_string()), ("r", format!("2^{e}"))]);
        let ehr = ehr_product(&ehr_dilate(&lower, &r)?, &upper);
        Ok(Some((lower_expr.dilate(&r).product(&upper_expr), ehr)))
    }

    fn case5(&mut self, target: &Pattern, depth: usize) -> Result<Option<Built>, PatternError> {
        let (signs, dim) = (target.signs(), target.dim());
        let s = |i: usize| signs[signs.len() - i];
        for d2 in 2..=dim / 2 {
            let d1 = dim - d2;
            let mut ks = vec![d1];
            if d2 != d1 {
                ks.push(d2);
            }
            for k in ks {
                if k <= dim - 2 && s(k) == 1 && s(k - 1) == 1 {
                    if let Some(built) = self.split("case 5", target, k, depth)? {
                        return Ok(Some(built));
                    }
                }
            }
        }
        Ok(None)
    }

    fn fallback(&mut self, target: &Pattern, depth: usize) -> Result<Built, PatternError> {
        for k in 2..=target.dim() - 2 {
            if let Some(built) = self.split("fallback split", target, k, depth)? {
                return Ok(built);
            }
        }
        Err(PatternError::NoApplicableCase(target.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ehrhart_algebra::sign_vector;

    fn run(p: &str) -> Construction {
        construct(&p.parse().unwrap(), &Limits::default()).unwrap()
    }

    #[test]
    fn base_cases() {
        let c = run("-");
        assert_eq!(c.expr, PolytopeExpr::single(Block::reeve(13)));
        assert_eq!(c.ehrhart.poly(), &RatPoly::from_i64_ratios(&[(1, 1), (-1, 6), (1, 1), (13, 6)]));
        assert_eq!(run("+").expr, PolytopeExpr::single(Block::reeve(1)));
    }

    #[test]
    fn each_case_is_reached() {
        let first_case = |p: &str| run(p).trace.last().unwrap().case.clone();
        assert_eq!(first_case("+--"), "case 1");
        assert_eq!(first_case("--+"), "case 2");
        assert_eq!(first_case("---"), "case 3");
        assert_eq!(first_case("-+-"), "case 4");
        assert_eq!(first_case("-+--"), "case 6");
        assert_eq!(first_case("-++-"), "case 5");
    }

    #[test]
    fn all_positive_patterns() {
        for len in 1..=6 {
            let p = "+".repeat(len);
            let c = run(&p);
            assert!(sign_vector(&c.ehrhart).unwrap().0.iter().all(|&s| s == 1));
            assert!(c.trace.iter().all(|step| step.case == "case 1" || step.case == "catalog"));
        }
    }

    #[test]
    fn limits_are_enforced() {
        let tight = Limits { max_param_bits: 1, ..Limits::default() };
        let err = construct(&"---".parse().unwrap(), &tight).unwrap_err();
        assert!(matches!(err, PatternError::SearchExhausted { .. }), "{err}");
        let tiny = Limits { max_coeff_bits: 4, ..Limits::default() };
        let err = construct(&"+--".parse().unwrap(), &tiny).unwrap_err();
        assert!(matches!(err, PatternError::Budget { .. }), "{err}");
    }
}
