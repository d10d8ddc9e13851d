use gzlab_core::characters::parse_index;
use gzlab_core::lfunc::{find_zeros, LFunction, LfuncZeros};
use gzlab_core::model::MODEL_CUTOFF_FACTOR;
use gzlab_core::series;
use gzlab_core::{
    exceptional_candidate, model_sum, ratio_scan, Character, CharacterGroup, ModelReport,
    SeriesParams, SeriesReport, SieveTable, SingularSeriesCtx,
};
use serde::Serialize;

/// Browser-side limits; the page stays responsive below these.
pub const MAX_SCAN_TO: u64 = 200_000;
pub const MAX_COMPARE_N: f64 = 20_000.0;
pub const MAX_SAMPLES: usize = 20_000;
const PRIME_LIMIT: u64 = 100_000;

type Res<T> = Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn character(q: u64, index: &str) -> Res<Character> {
    let idx = parse_index(index).ok_or_else(|| format!("malformed index {index:?}"))?;
    CharacterGroup::new(q).map_err(err)?.character(idx).map_err(err)
}

pub fn ratio_curve(from: u64, to: u64) -> Res<Vec<f64>> {
    if to > MAX_SCAN_TO {
        return Err(format!("scan limited to n <= {MAX_SCAN_TO} in the browser"));
    }
    let sieve = SieveTable::new(to.max(2)).map_err(err)?;
    let ctx = SingularSeriesCtx::new(PRIME_LIMIT).map_err(err)?;
    let scan = ratio_scan(from, to, 0.5, &sieve, &ctx).map_err(err)?;
    Ok(scan.records.iter().flat_map(|r| [r.n as f64, r.ratio]).collect())
}

pub fn hardy_curve(q: u64, index: &str, t_lo: f64, t_hi: f64, samples: usize) -> Res<Vec<f64>> {
    if !(2..=MAX_SAMPLES).contains(&samples) || !(t_lo < t_hi) {
        return Err(format!("need 2..={MAX_SAMPLES} samples on a non-empty interval"));
    }
    let chi = character(q, index)?;
    if chi.is_principal() {
        return Err("choose a non-principal character".into());
    }
    let lf = LFunction::new(&chi);
    let step = (t_hi - t_lo) / (samples - 1) as f64;
    Ok((0..samples).map(|i| lf.hardy_z(t_lo + step * i as f64)).collect())
}

#[derive(Serialize)]
struct ZeroOut {
    beta: f64,
    gamma: f64,
}

pub fn zeros_json(q: u64, index: &str, t: f64) -> Res<String> {
    let chi = character(q, index)?;
    let list = find_zeros(&chi, t, 1e-8).map_err(err)?;
    let out: Vec<ZeroOut> = list
        .zeros
        .iter()
        .map(|z| ZeroOut { beta: z.beta, gamma: z.gamma })
        .collect();
    serde_json::to_string(&out).map_err(err)
}

#[derive(Serialize)]
struct Compare {
    series: SeriesReport,
    model: ModelReport,
    #[serde(rename = "R")]
    ratio: f64,
    in_window: bool,
    chi1_fallback: bool,
}

pub fn compare_json(q: u64, n: f64, delta: f64) -> Res<String> {
    if n > MAX_COMPARE_N {
        return Err(format!("N limited to {MAX_COMPARE_N} in the browser"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(format!("delta must lie in (0, 1), got {delta}"));
    }
    let params = SeriesParams::new(q, n, 40.0).map_err(err)?;
    let sieve = SieveTable::new((MODEL_CUTOFF_FACTOR * n).ceil() as u64).map_err(err)?;
    let group = CharacterGroup::new(q).map_err(err)?;
    let cand = exceptional_candidate(&group, &LfuncZeros::default()).map_err(err)?;
    let chi1 = cand.character().ok_or("no real non-principal character")?;
    let comp = series::components(&params, &group, &sieve, chi1).map_err(err)?;
    let ctx = SingularSeriesCtx::new(PRIME_LIMIT).map_err(err)?;
    let model = model_sum(q, n, &ctx, &sieve).map_err(err)?;
    let ratio = comp.report.s_direct / model.model_sum;
    serde_json::to_string(&Compare {
        series: comp.report.rounded(),
        model,
        ratio,
        in_window: ratio > delta && ratio < 2.0 - delta,
        chi1_fallback: cand.is_fallback(),
    })
    .map_err(err)
}
