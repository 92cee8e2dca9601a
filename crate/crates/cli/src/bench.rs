//! Timing of `hstar_fast` on random simplices, with the naive sum for contrast.

use std::time::{Duration, Instant};

use ehrhart_core::delta_simplex::{hstar_fast, hstar_naive, DeltaQ};
use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::{BenchArgs, CliError};

struct Trial {
    sum_q: u64,
    fast: Duration,
    naive: Option<(Duration, bool)>,
}

/// Random `q_head` of dimension `d` with `Σ|q_i| <= sum_q` (all `d`
/// coordinates) and every `|q_i| <= n`.
fn draw(rng: &mut StdRng, d: usize, sum_q: u64, n: &BigInt) -> Option<DeltaQ> {
    let n_cap = if n < &BigInt::from(u64::MAX) { n.to_string().parse::<u64>().ok()? } else { u64::MAX };
    let bound = (sum_q.saturating_sub(1) / (2 * (d as u64 - 1))).min(n_cap) as i64;
    for _ in 0..1000 {
        let q_head: Vec<i64> = (0..d - 1).map(|_| rng.gen_range(-bound..=bound)).collect();
        let s = DeltaQ::new(q_head.iter().map(|&v| BigInt::from(v)).collect(), n.clone()).ok()?;
        let total: BigInt = s.q_full().iter().map(|v| if v < &BigInt::from(0) { -v } else { v.clone() }).sum();
        if s.fast_path_ok() && total <= BigInt::from(sum_q) {
            return Some(s);
        }
    }
    None
}

fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

pub fn run(a: BenchArgs) -> Result<(), CliError> {
    if a.d < 2 {
        return Err(CliError::Usage("--d must be at least 2".into()));
    }
    if a.sum_q < 1 || a.n < BigInt::from(1) {
        return Err(CliError::Precondition("need --sum-q >= 1 and --n >= 1 (q_d = 1 when q_head = 0)".into()));
    }
    let mut rng = StdRng::seed_from_u64(a.seed);
    let naive_ok = &a.n * BigInt::from(a.d) <= BigInt::from(a.naive_limit);
    let mut trials = Vec::with_capacity(a.trials);
    for _ in 0..a.trials {
        let s = draw(&mut rng, a.d, a.sum_q, &a.n)
            .ok_or_else(|| CliError::Precondition("no simplex satisfies the --sum-q/--n constraints".into()))?;
        let sum_q = s.q_full().iter().map(|v| v.magnitude().to_string().parse::<u64>().unwrap_or(u64::MAX)).sum();
        let start = Instant::now();
        let fast = hstar_fast(&s).map_err(|e| CliError::Precondition(e.to_string()))?;
        let fast_time = start.elapsed();
        let naive = naive_ok.then(|| {
            let start = Instant::now();
            let h = hstar_naive(&s);
            (start.elapsed(), h == fast)
        });
        trials.push(Trial { sum_q, fast: fast_time, naive });
    }

    if a.csv {
        println!("trial,d,n,sum_q,fast_ms,naive_ms,equal");
        for (i, t) in trials.iter().enumerate() {
            let (naive_ms, equal) = match t.naive {
                Some((d, eq)) => (ms(d), eq.to_string()),
                None => (String::new(), String::new()),
            };
            println!("{i},{},{},{},{},{naive_ms},{equal}", a.d, a.n, t.sum_q, ms(t.fast));
        }
    } else if trials.is_empty() {
        println!("no trials");
    } else {
        let median = |mut v: Vec<Duration>| {
            v.sort();
            v[v.len() / 2]
        };
        println!("trials: {}  d: {}  n: {}  sum-q bound: {}", trials.len(), a.d, a.n, a.sum_q);
        println!("fast: median {} ms", ms(median(trials.iter().map(|t| t.fast).collect())));
        if naive_ok {
            let times: Vec<Duration> = trials.iter().filter_map(|t| t.naive.map(|n| n.0)).collect();
            let agree = trials.iter().all(|t| t.naive.is_some_and(|n| n.1));
            println!("naive: median {} ms, outputs {}", ms(median(times)), if agree { "equal" } else { "DIFFER" });
        } else {
            println!("naive: skipped (n too large)");
        }
    }
    if trials.iter().any(|t| t.naive.is_some_and(|n| !n.1)) {
        return Err(CliError::Mismatch("fast and naive h* differ".into()));
    }
    Ok(())
}
