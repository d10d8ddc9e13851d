//! Acceptance checks, one PASS/FAIL line each. Exits nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use gzlab_core::lfunc::{explicit_formula_residual, find_zeros, LFunction};
use gzlab_core::series::{self, decomposition_check, p_chi, s_direct};
use gzlab_core::sum::CompensatedSum;
use gzlab_core::{
    euler_phi, model_sum, ratio_scan, Character, CharacterGroup, SeriesParams, SieveTable,
    SingularSeriesCtx,
};
use num_complex::Complex64;
use serde_json::Value;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn fixture() -> Value {
    let text = include_str!("fixtures/acceptance_constants.json");
    serde_json::from_str(text).expect("fixture parses")
}

fn chi(q: u64, idx: Vec<u32>) -> Character {
    CharacterGroup::new(q).unwrap().character(idx).unwrap()
}

const GRID_Q: [u64; 6] = [1, 3, 4, 5, 8, 12];
const GRID_N: [f64; 2] = [100.0, 200.0];
const GRID_CUTOFF: u64 = 10_000;

fn brute_s(params: &SeriesParams, sieve: &SieveTable) -> f64 {
    let pp: Vec<(u64, f64)> = (1..=params.cutoff_m)
        .filter(|m| m % 2 == 1 && sieve.lambda(*m) != 0.0)
        .map(|m| (m, sieve.lambda(m) * (-(m as f64) / params.n_scale).exp()))
        .collect();
    let mut acc = CompensatedSum::new();
    for &(m1, w1) in &pp {
        for &(m2, w2) in &pp {
            if (m1 + m2) % params.q == 0 {
                acc.add(w1 * w2);
            }
        }
    }
    acc.value()
}

fn bucketing_vs_brute_force() -> Outcome {
    let sieve = SieveTable::new(GRID_CUTOFF).unwrap();
    let mut worst = 0.0f64;
    for q in GRID_Q {
        for n in GRID_N {
            let p = SeriesParams::with_cutoff(q, n, GRID_CUTOFF).unwrap();
            let fast = s_direct(&p, &sieve).unwrap();
            let slow = brute_s(&p, &sieve);
            worst = worst.max((fast - slow).abs() / slow);
        }
    }
    outcome(worst < 1e-10, format!("max relative difference {worst:.3e}"))
}

fn orthogonality_decomposition() -> Outcome {
    let sieve = SieveTable::new(GRID_CUTOFF).unwrap();
    let mut worst = 0.0f64;
    for q in GRID_Q {
        let group = CharacterGroup::new(q).unwrap();
        for n in GRID_N {
            let p = SeriesParams::with_cutoff(q, n, GRID_CUTOFF).unwrap();
            let d = decomposition_check(&p, &group, &sieve).unwrap();
            worst = worst.max(d.defect / (n * n));
        }
    }
    outcome(worst < 1e-8, format!("max defect/N^2 {worst:.3e}"))
}

fn residue_identity() -> Outcome {
    let ctx = SingularSeriesCtx::new(1_000_000).unwrap();
    let mut worst = (0.0f64, 0u64);
    for q in 1..=1000 {
        let r = ctx.residue_identity_check(q).unwrap();
        if r.rel_err > worst.0 {
            worst = (r.rel_err, q);
        }
    }
    outcome(worst.0 < 1e-10, format!("max rel_err {:.3e} at q={}", worst.0, worst.1))
}

fn model_sum_check(fx: &Value) -> Outcome {
    let ctx = SingularSeriesCtx::new(1_000_000).unwrap();
    let sieve = SieveTable::new(4_000_000).unwrap();
    let mut worst = (0.0f64, 0u64);
    for q in 1..=50u64 {
        let r = model_sum(q, 100.0 * q as f64, &ctx, &sieve).unwrap();
        let dev = (r.normalized() - 1.0).abs();
        if dev > worst.0 {
            worst = (dev, q);
        }
    }
    let in_band = worst.0 <= 0.1;
    let errs: Vec<f64> = [1e3, 1e4, 1e5]
        .iter()
        .map(|&n| model_sum(3, n, &ctx, &sieve).unwrap().rel_err)
        .collect();
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let q3 = &fx["model_q3"];
    let limit = q3["factor"].as_f64().unwrap() * q3["observed_lemma_ratio_n1e5"].as_f64().unwrap();
    let at_1e5 = model_sum(3, 1e5, &ctx, &sieve).unwrap().lemma_ratio;
    let q1 = model_sum(1, 1e4, &ctx, &sieve).unwrap();
    let q1_ok = q1.rel_err < fx["model_q1"]["constant"].as_f64().unwrap() * 1e-2;
    outcome(
        in_band && monotone && at_1e5 < limit && q1_ok,
        format!(
            "max |phi*model/N^2 - 1| {:.3e} at q={}; q=3 rel_err {:.3e} > {:.3e} > {:.3e}; lemma_ratio {:.3e} (limit {:.3e}); q=1 rel_err {:.3e}",
            worst.0, worst.1, errs[0], errs[1], errs[2], at_1e5, limit, q1.rel_err
        ),
    )
}

fn principal_asymptotic(fx: &Value) -> Outcome {
    let c = fx["principal_asymptotic"]["constant"].as_f64().unwrap();
    let sieve = SieveTable::new(4_000_000).unwrap();
    let mut worst = 0.0f64;
    let mut pass = true;
    for q in [3u64, 4, 5, 8] {
        let group = CharacterGroup::new(q).unwrap();
        let phi = euler_phi(q).unwrap() as f64;
        for n in [1e4, 1e5] {
            let params = SeriesParams::new(q, n, 40.0).unwrap();
            let p0 = p_chi(&group.principal(), &params, &sieve).unwrap();
            let s0 = p0.norm_sqr() / phi;
            let dev = (phi * s0 / (n * n) - 1.0).abs();
            pass &= dev <= c / n.ln();
            worst = worst.max(dev * n.ln());
        }
    }
    outcome(pass, format!("max |phi*S0/N^2 - 1| * log N = {worst:.4} (bound {c})"))
}

fn desk_window() -> Outcome {
    let sieve = SieveTable::new(4_000_000).unwrap();
    let ctx = SingularSeriesCtx::new(1_000_000).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for q in [3u64, 4, 5, 8] {
        let group = CharacterGroup::new(q).unwrap();
        let params = SeriesParams::new(q, 1e5, 40.0).unwrap();
        let cand = gzlab_core::exceptional_candidate(&group, &gzlab_core::lfunc::LfuncZeros::default()).unwrap();
        let chi1 = cand.character().unwrap();
        let c = series::components(&params, &group, &sieve, chi1).unwrap();
        let m = model_sum(q, 1e5, &ctx, &sieve).unwrap();
        let r = c.report.s_direct / m.model_sum;
        let eps = c.report.epsilon_obs;
        pass &= r > 0.5 && r < 1.5 && eps.abs() < 0.3;
        parts.push(format!("q={q} R={r:.5} eps={eps:.2e}"));
    }
    outcome(pass, parts.join("; "))
}

fn goldbach_scan() -> Outcome {
    let sieve = SieveTable::new(1_000_000).unwrap();
    let ctx = SingularSeriesCtx::new(1_000_000).unwrap();
    let scan = ratio_scan(10_000, 1_000_000, 0.5, &sieve, &ctx).unwrap();
    let mean = scan.mean_ratio(100_000, 1_000_000).unwrap();
    outcome(
        scan.violations.is_empty() && (0.98..=1.02).contains(&mean),
        format!(
            "{} violations, ratio range [{:.4}, {:.4}], mean over [1e5, 1e6] {mean:.5}",
            scan.violations.len(),
            scan.min_ratio,
            scan.max_ratio
        ),
    )
}

fn l_function_accuracy() -> Outcome {
    let pi = std::f64::consts::PI;
    let one = Complex64::new(1.0, 0.0);
    let l4 = LFunction::new(&chi(4, vec![1])).value(one);
    let l3 = LFunction::new(&chi(3, vec![1])).value(one);
    let e4 = (l4 - pi / 4.0).norm();
    let e3 = (l3 - pi / (3.0 * 3f64.sqrt())).norm();
    let zeros = find_zeros(&chi(4, vec![1]), 50.0, 1e-8);
    let (verified, first) = match &zeros {
        Ok(z) => (z.count_verified, z.zeros.first().map_or(f64::NAN, |z| z.gamma)),
        Err(_) => (false, f64::NAN),
    };
    outcome(
        e4 < 1e-9 && e3 < 1e-9 && verified && (first - 6.0209).abs() <= 1e-3,
        format!("|L(1,chi_-4) - pi/4| {e4:.2e}; |L(1,chi_3) - pi/(3 sqrt 3)| {e3:.2e}; first zero {first:.6}; count_verified {verified}"),
    )
}

fn explicit_formula() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let sieve = SieveTable::new(4_000_000).unwrap();
    for (q, idx) in [(4u64, vec![1u32]), (3, vec![1])] {
        let c = chi(q, idx);
        let zeros = find_zeros(&c, 50.0, 1e-8).unwrap();
        let mut scaled = Vec::new();
        for n in [1e3, 1e4, 1e5] {
            let params = SeriesParams::new(q, n, 40.0).unwrap();
            let r = explicit_formula_residual(&c, &params, &sieve, &zeros, 10.0).unwrap();
            pass &= r.residual / n.sqrt() <= 10.0 * n.ln().powi(2);
            scaled.push(r.residual / n);
        }
        pass &= scaled.windows(2).all(|w| w[1] < w[0]);
        parts.push(format!(
            "{}: residual/N {:.3e}, {:.3e}, {:.3e}",
            c.id(),
            scaled[0],
            scaled[1],
            scaled[2]
        ));
    }
    outcome(pass, parts.join("; "))
}

fn determinism() -> Outcome {
    let cache = std::env::temp_dir().join(format!("gzlab-acceptance-{}", std::process::id()));
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_gzlab"))
            .args(["compare", "--q", "5", "--N", "100000", "--delta", "0.5", "--threads", threads])
            .env("GZLAB_CACHE_DIR", &cache)
            .output()
            .expect("binary runs")
    };
    let outs: Vec<_> = ["1", "8", "1", "8"].iter().map(|t| run(t)).collect();
    let _ = std::fs::remove_dir_all(&cache);
    let same = outs.windows(2).all(|w| w[0].stdout == w[1].stdout);
    let ok = outs.iter().all(|o| o.status.code() == Some(0)) && !outs[0].stdout.is_empty();
    outcome(same && ok, format!("4 runs of compare (threads 1, 8, 1, 8), {} bytes each, identical {same}", outs[0].stdout.len()))
}

fn main() {
    let fx = fixture();
    let checks: Vec<(&str, Duration, Box<dyn Fn() -> Outcome>)> = vec![
        ("bucketing vs brute force", Duration::from_secs(10), Box::new(bucketing_vs_brute_force)),
        ("orthogonality decomposition", Duration::from_secs(60), Box::new(orthogonality_decomposition)),
        ("residue identity q <= 1000", Duration::from_secs(30), Box::new(residue_identity)),
        ("model sum against N^2/phi(q)", Duration::from_secs(60), Box::new(|| model_sum_check(&fx))),
        ("principal-character asymptotic", Duration::from_secs(120), Box::new(|| principal_asymptotic(&fx))),
        ("desk-scale window", Duration::from_secs(120), Box::new(desk_window)),
        ("Goldbach ratio scan", Duration::from_secs(120), Box::new(goldbach_scan)),
        ("L-function accuracy", Duration::from_secs(120), Box::new(l_function_accuracy)),
        ("explicit-formula residual", Duration::from_secs(120), Box::new(explicit_formula)),
        ("determinism across thread counts", Duration::from_secs(300), Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in checks.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        let el = t.elapsed();
        let pass = o.pass && el <= *budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {} [{:.2} s, budget {} s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            el.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
