//! Subcommand handlers.

use std::fmt::Display;
use std::io::Write;

use ehrhart_core::delta_simplex::{
    hstar as compute_hstar, hstar_family, hstar_naive, l1_l2, DeltaError, DeltaQ, Method, SpecialFamily,
};
use ehrhart_core::ehrhart_algebra::{expr_ehrhart, from_hstar, sign_vector, Block, EhrhartPoly, PolytopeExpr};
use ehrhart_core::eulerian::{
    eulerian_descent, eulerian_recurrence, sdm as sdm_simplex, sdm_ehrhart, sdm_hstar, SdmGeometry,
};
use ehrhart_core::exactpoly::{IntPoly, Poly};
use ehrhart_core::json_int;
use ehrhart_core::lattice_oracle::{first_mismatch, OracleLimits};
use ehrhart_core::signpattern::{construct, Construction, Limits, Pattern, PatternError};
use num_bigint::BigInt;
use serde_json::{json, Value};

use super::{
    CliError, EhrhartArgs, EulerianArgs, EulerianMethod, FamilyArgs, FamilyKind, HstarArgs, MethodArg, SdmArgs,
    SdmWhat, SignArgs, SimplexArgs, VerifyArgs,
};

type CmdResult = Result<(), CliError>;

/// Above this `n·d` the naive sum is not used to double-check a closed form.
const NAIVE_CHECK_LIMIT: u64 = 10_000_000;

fn precondition(e: impl Display) -> CliError {
    CliError::Precondition(e.to_string())
}

fn ints(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(json_int::to_value).collect())
}

fn poly_json<C: ehrhart_core::exactpoly::Coefficient>(p: &Poly<C>, var: &str) -> Value {
    serde_json::to_value(p.to_json(var)).expect("polynomial JSON")
}

fn simplex_json(s: &DeltaQ) -> Value {
    json!({ "q_head": ints(s.q_head()), "n": json_int::to_value(s.n()), "q_last": json_int::to_value(&s.q_last()) })
}

fn print_json(v: &Value) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("JSON output"));
}

fn simplex_from(q: Vec<BigInt>, n: BigInt) -> Result<DeltaQ, CliError> {
    DeltaQ::new(q, n).map_err(precondition)
}

fn simplex_args(a: SimplexArgs) -> Result<DeltaQ, CliError> {
    match (a.q, a.n) {
        (Some(q), Some(n)) => simplex_from(q.0, n),
        _ => Err(CliError::Usage("give both --q and --n".into())),
    }
}

fn naive_is_cheap(s: &DeltaQ) -> bool {
    s.n() * BigInt::from(s.dim()) <= BigInt::from(NAIVE_CHECK_LIMIT)
}

pub fn hstar(a: HstarArgs) -> CmdResult {
    let s = simplex_from(a.q.0, a.n)?;
    let method = match a.method {
        MethodArg::Auto => Method::Auto,
        MethodArg::Fast => Method::Fast,
        MethodArg::Naive => Method::Naive,
    };
    let used = match method {
        Method::Auto if s.fast_path_ok() => "fast",
        Method::Auto | Method::Naive => "naive",
        Method::Fast => "fast",
    };
    let h = compute_hstar(&s, method).map_err(|e| match e {
        DeltaError::FastPathPrecondition { .. } => {
            CliError::Precondition(format!("{e}; use --method auto or --method naive"))
        }
        other => precondition(other),
    })?;
    if a.json {
        print_json(&json!({
            "simplex": simplex_json(&s),
            "method": used,
            "hstar": poly_json(h.poly(), "x"),
            "normalized_volume": json_int::to_value(&h.normalized_volume()),
        }));
    } else {
        println!("{}", h.poly());
    }
    Ok(())
}

fn need(v: Option<u64>, flag: &str, kind: &str) -> Result<u64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--kind {kind} needs --{flag}")))
}

pub fn family(a: FamilyArgs) -> CmdResult {
    if let Some(kind) = a.kind {
        let m =
            a.m.as_ref()
                .map(|m| m.to_string().parse::<u64>())
                .transpose()
                .map_err(|_| CliError::Usage("--m must fit in 64 bits for a closed-form family".into()))?;
        let fam = match kind {
            FamilyKind::ROdd => SpecialFamily::ROdd {
                s: need(a.s, "s", "r-odd")?,
                k: need(a.k, "k", "r-odd")?,
                a: need(a.a, "a", "r-odd")?,
            },
            FamilyKind::REven => SpecialFamily::REven {
                s: need(a.s, "s", "r-even")?,
                k: need(a.k, "k", "r-even")?,
                a: need(a.a, "a", "r-even")?,
            },
            FamilyKind::ExtendedReeve => SpecialFamily::ExtendedReeve {
                s: need(a.s, "s", "extended-reeve")?,
                d: need(a.d, "d", "extended-reeve")?,
            },
            FamilyKind::AllMinusOnes => {
                SpecialFamily::AllMinusOnes { d: need(a.d, "d", "all-minus-ones")?, m: need(m, "m", "all-minus-ones")? }
            }
            FamilyKind::Pow2 => SpecialFamily::Pow2 { d: need(a.d, "d", "pow2")?, m: need(m, "m", "pow2")? },
        };
        let (s, closed) = fam.build().map_err(precondition)?;
        let check = naive_is_cheap(&s).then(|| hstar_naive(&s) == closed);
        if a.json {
            print_json(&json!({
                "family": serde_json::to_value(fam).expect("family JSON"),
                "simplex": simplex_json(&s),
                "hstar": poly_json(closed.poly(), "x"),
                "naive_agrees": check,
            }));
        } else {
            println!("simplex: {s}");
            println!("h* = {}", closed.poly());
            match check {
                Some(true) => println!("naive sum: agrees"),
                Some(false) => println!("naive sum: DISAGREES"),
                None => println!("naive sum: skipped (n too large)"),
            }
        }
        return match check {
            Some(false) => Err(CliError::Mismatch("closed form differs from the naive sum".into())),
            _ => Ok(()),
        };
    }

    let s = simplex_args(a.simplex)?;
    let p = l1_l2(&s).map_err(precondition)?;
    let scaled = a.m.as_ref().map(|m| hstar_family(&s, m).map_err(precondition)).transpose()?;
    if a.json {
        print_json(&json!({
            "simplex": simplex_json(&s),
            "l1": poly_json(&p.l1, "x"),
            "l2": poly_json(&p.l2, "x"),
            "m": a.m.as_ref().map(json_int::to_value),
            "hstar": scaled.as_ref().map(|h| poly_json(h.poly(), "x")),
        }));
    } else {
        println!("L1 = {}", p.l1);
        println!("L2 = {}", p.l2);
        if let (Some(m), Some(h)) = (&a.m, &scaled) {
            println!("h*(m = {m}) = {}", h.poly());
        }
    }
    Ok(())
}

pub fn eulerian(a: EulerianArgs) -> CmdResult {
    let (poly, name): (IntPoly, &str) = match a.method {
        EulerianMethod::Descent => (eulerian_descent(a.d).map_err(precondition)?, "descent"),
        EulerianMethod::Recurrence => (eulerian_recurrence(a.d).map_err(precondition)?, "recurrence"),
    };
    if a.json {
        print_json(&json!({ "d": a.d, "method": name, "eulerian": poly_json(&poly, "x") }));
    } else {
        println!("{poly}");
    }
    Ok(())
}

pub fn sdm(a: SdmArgs) -> CmdResult {
    let simplex = sdm_simplex(a.d, a.m.clone()).map_err(precondition)?;
    match a.what {
        SdmWhat::Vertices => {
            let vertices: Vec<Vec<BigInt>> = match simplex.geometry() {
                SdmGeometry::Interval { m } => vec![vec![BigInt::from(0)], vec![m]],
                SdmGeometry::Simplex(s) => {
                    let d = s.dim();
                    let mut rows = vec![vec![BigInt::from(0); d]];
                    for i in 0..d - 1 {
                        let mut e = vec![BigInt::from(0); d];
                        e[i] = BigInt::from(1);
                        rows.push(e);
                    }
                    let mut apex = s.q_head().to_vec();
                    apex.push(s.n().clone());
                    rows.push(apex);
                    rows
                }
            };
            if a.json {
                let rows: Vec<Value> = vertices.iter().map(|v| ints(v)).collect();
                let simplex = simplex.delta().map(|s| simplex_json(&s));
                print_json(&json!({ "d": a.d, "m": json_int::to_value(&a.m), "vertices": rows, "simplex": simplex }));
            } else {
                for v in vertices {
                    let coords: Vec<String> = v.iter().map(ToString::to_string).collect();
                    println!("({})", coords.join(", "));
                }
            }
        }
        SdmWhat::Hstar => {
            let h = sdm_hstar(a.d, a.m.clone()).map_err(precondition)?;
            if a.json {
                print_json(&json!({ "d": a.d, "m": json_int::to_value(&a.m), "hstar": poly_json(h.poly(), "x") }));
            } else {
                println!("{}", h.poly());
            }
        }
        SdmWhat::Ehrhart => {
            let e = sdm_ehrhart(a.d, a.m.clone()).map_err(precondition)?;
            if a.json {
                print_json(&json!({ "d": a.d, "m": json_int::to_value(&a.m), "ehrhart": poly_json(&e, "t") }));
            } else {
                println!("{}", e.display_var("t"));
            }
        }
    }
    Ok(())
}

fn read_expr(text: &str) -> Result<PolytopeExpr, CliError> {
    let body = match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?,
        None => text.to_string(),
    };
    let expr: PolytopeExpr =
        serde_json::from_str(&body).map_err(|e| CliError::Usage(format!("invalid PolytopeExpr JSON: {e}")))?;
    expr.validate().map_err(precondition)?;
    Ok(expr)
}

/// The expression and its closed-form Ehrhart polynomial.
fn target(simplex: SimplexArgs, expr: Option<String>) -> Result<(PolytopeExpr, EhrhartPoly), CliError> {
    let expr = match expr {
        Some(text) => read_expr(&text)?,
        None => PolytopeExpr::single(Block::Delta(simplex_args(simplex)?)),
    };
    let ehr = match &expr.factors[..] {
        [f] if f.r == BigInt::from(1) => match &f.block {
            Block::Delta(s) => {
                let h = compute_hstar(s, Method::Auto).map_err(precondition)?;
                from_hstar(&h, s.dim()).map_err(precondition)?
            }
            _ => expr_ehrhart(&expr).map_err(precondition)?,
        },
        _ => expr_ehrhart(&expr).map_err(precondition)?,
    };
    Ok((expr, ehr))
}

fn sign_string(e: &EhrhartPoly) -> Option<String> {
    sign_vector(e).ok().map(|s| s.to_string())
}

pub fn ehrhart(a: EhrhartArgs) -> CmdResult {
    let (expr, ehr) = target(a.simplex, a.expr)?;
    if a.json {
        print_json(&json!({
            "expr": serde_json::to_value(&expr).expect("expression JSON"),
            "dim": ehr.dim(),
            "ehrhart": { "text": ehr.to_string(), "poly": poly_json(ehr.poly(), "t") },
            "sign_vector": sign_string(&ehr),
        }));
    } else {
        println!("i(t) = {ehr}");
        if let Some(s) = sign_string(&ehr) {
            println!("sign vector: {s}");
        }
    }
    Ok(())
}

pub fn verify(a: VerifyArgs) -> CmdResult {
    let (expr, ehr) = target(a.simplex, a.expr)?;
    let t_max = a.tmax.unwrap_or(ehr.dim() as u64 + 1);
    let limits = OracleLimits::from_env();
    let mismatch = first_mismatch(&expr, &ehr, t_max, &limits).map_err(precondition)?;
    if a.json {
        let detail = mismatch.as_ref().map(|(t, predicted, counted)| {
            json!({ "t": t, "predicted": predicted.to_string(), "counted": json_int::to_value(counted) })
        });
        print_json(&json!({
            "expr": serde_json::to_value(&expr).expect("expression JSON"),
            "ehrhart": poly_json(ehr.poly(), "t"),
            "t_max": t_max,
            "agrees": mismatch.is_none(),
            "mismatch": detail,
        }));
    } else {
        println!("i(t) = {ehr}");
        match &mismatch {
            None => println!("lattice counts agree for t = 0..={t_max}"),
            Some((t, predicted, counted)) => println!("mismatch at t = {t}: predicted {predicted}, counted {counted}"),
        }
    }
    match mismatch {
        None => Ok(()),
        Some((t, _, _)) => Err(CliError::Mismatch(format!("closed form and lattice count differ at t = {t}"))),
    }
}

fn search_error(e: PatternError) -> CliError {
    match e {
        PatternError::SearchExhausted { .. } | PatternError::NoApplicableCase(_) | PatternError::Budget { .. } => {
            CliError::Exhausted(e.to_string())
        }
        PatternError::Empty | PatternError::BadChar(_) => CliError::Usage(e.to_string()),
        other => precondition(other),
    }
}

fn bases(c: &Construction) -> Vec<u64> {
    c.trace.iter().filter_map(|s| s.params.get("b").and_then(|b| b.parse().ok())).collect()
}

fn construction_json(p: &Pattern, c: &Construction) -> Value {
    json!({
        "pattern": p.to_string(),
        "dim": p.dim(),
        "expr": serde_json::to_value(&c.expr).expect("expression JSON"),
        "ehrhart": { "text": c.ehrhart.to_string(), "poly": poly_json(c.ehrhart.poly(), "t") },
        "sign_vector": sign_string(&c.ehrhart),
        "verified": true,
        "trace": serde_json::to_value(&c.trace).expect("trace JSON"),
        "bases": bases(c),
        "max_param_digits": c.expr.max_param_digits(),
    })
}

fn print_construction(p: &Pattern, c: &Construction) {
    println!("pattern: {p} (d = {})", p.dim());
    println!("expression: {}", c.expr);
    println!("expression JSON: {}", serde_json::to_string(&c.expr).expect("expression JSON"));
    println!("ehrhart: {}", c.ehrhart);
    println!("ehrhart JSON: {}", serde_json::to_string(&c.ehrhart.poly().to_json("t")).expect("polynomial JSON"));
    println!("sign vector: {} (verified)", sign_string(&c.ehrhart).unwrap_or_default());
    let b = bases(c);
    if !b.is_empty() {
        let b: Vec<String> = b.iter().map(ToString::to_string).collect();
        println!("case 6 base b: {}", b.join(", "));
    }
    println!("trace:");
    for step in &c.trace {
        let params: Vec<String> = step.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("  {}d={} {} {} {}", "  ".repeat(step.depth), step.dim, step.pattern, step.case, params.join(" "));
    }
}

pub fn sign_construct(a: SignArgs) -> CmdResult {
    let limits = Limits { max_base: a.max_base, max_param_bits: a.max_param_bits, max_coeff_bits: a.max_coeff_bits };
    if let Some(len) = a.all {
        return sweep(len, a.jobs, &limits, a.json);
    }
    let p = a.pattern.expect("clap requires --pattern or --all");
    let c = construct(&p, &limits).map_err(search_error)?;
    if a.json {
        print_json(&construction_json(&p, &c));
    } else {
        print_construction(&p, &c);
    }
    Ok(())
}

/// Case name and time in ms, or the failure message.
type SweepResult = Result<(String, f64), String>;

/// Resolves every pattern of one length on a pool of scoped workers.
fn sweep(len: usize, jobs: Option<usize>, limits: &Limits, json_out: bool) -> CmdResult {
    if !(1..=20).contains(&len) {
        return Err(CliError::Usage("--all takes a pattern length in 1..=20".into()));
    }
    let patterns = Pattern::all(len);
    let jobs =
        jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).clamp(1, patterns.len());
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut results: Vec<(usize, SweepResult)> = std::thread::scope(|scope| {
        let workers: Vec<_> = (0..jobs)
            .map(|_| {
                scope.spawn(|| {
                    let mut out = Vec::new();
                    loop {
                        let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        let Some(p) = patterns.get(i) else { break };
                        let start = std::time::Instant::now();
                        let r = construct(p, limits).map(|c| {
                            let case = c.trace.last().map(|s| s.case.clone()).unwrap_or_default();
                            (case, start.elapsed().as_secs_f64() * 1e3)
                        });
                        out.push((i, r.map_err(|e| e.to_string())));
                    }
                    out
                })
            })
            .collect();
        workers.into_iter().flat_map(|w| w.join().expect("worker panicked")).collect()
    });
    results.sort_by_key(|(i, _)| *i);
    let failures = results.iter().filter(|(_, r)| r.is_err()).count();
    if json_out {
        let rows: Vec<Value> = results
            .iter()
            .map(|(i, r)| match r {
                Ok((case, ms)) => json!({ "pattern": patterns[*i].to_string(), "ok": true, "case": case, "ms": ms }),
                Err(e) => json!({ "pattern": patterns[*i].to_string(), "ok": false, "error": e }),
            })
            .collect();
        print_json(&json!({ "length": len, "total": patterns.len(), "failures": failures, "results": rows }));
    } else {
        for (i, r) in &results {
            match r {
                Ok((case, ms)) => println!("{}\tok\t{case}\t{ms:.2} ms", patterns[*i]),
                Err(e) => println!("{}\tFAILED\t{e}", patterns[*i]),
            }
        }
        println!("{} of {} patterns resolved", patterns.len() - failures, patterns.len());
    }
    if failures > 0 {
        return Err(CliError::Exhausted(format!("{failures} patterns were not resolved")));
    }
    Ok(())
}
