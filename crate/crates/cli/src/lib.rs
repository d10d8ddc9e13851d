//! The `gzlab` command line: argument parsing, the shared sieve, report
//! output and the zero cache.

pub mod cache;
pub mod json;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use gzlab_core::characters::parse_index;
use gzlab_core::format::fmt_num;
use gzlab_core::goldbach::{RatioRecord, RATIO_CSV_HEADER};
use gzlab_core::lfunc::{explicit_formula_residual, LfuncZeros, DEFAULT_EXPLICIT_CONSTANT};
use gzlab_core::model::MODEL_CUTOFF_FACTOR;
use gzlab_core::series::{self, DecompositionCheck};
use gzlab_core::{
    exceptional_candidate, goldbach_g, model_sum, ratio_scan, Character, CharacterGroup,
    CharacterId, Error, ExceptionalCandidate, ModelReport, SeriesParams, SeriesReport,
    SieveTable, SingularSeriesCtx,
};
use serde::Serialize;

use cache::ZeroCache;

pub const CACHE_ENV: &str = "GZLAB_CACHE_DIR";

/// Exit status for a report whose ratio fell outside the window.
pub const EXIT_WINDOW: i32 = 2;
pub const EXIT_ERROR: i32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Prime count and Chebyshev ψ up to --limit
    Sieve,
    /// G(n), the singular series and their ratio for one even --n
    Gn,
    /// Ratio G(n)/(𝔖(n) n) over even n in [--from, --to]
    Scan,
    /// Direct S(q) at scale --N
    Sq,
    /// P(χ) for one character (--chi) or all characters mod --q
    Pchi,
    /// Character decomposition of S(q) and its defect
    Decompose,
    /// S0, S1, S_inf and the observed ε
    Components,
    /// Singular-series model sum against N²/φ(q)
    Model,
    /// Zeros of L(s, χ) up to height --T (cached)
    Zeros,
    /// Truncated explicit-formula residual for P(χ)
    Explicit,
    /// S(q) against the model sum, with the window flag
    Compare,
}

#[derive(Debug, Parser)]
#[command(name = "gzlab", version, about = "Goldbach sums, characters and L-function zeros")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true)]
    pub q: Option<u64>,
    #[arg(long = "N", global = true)]
    pub n_scale: Option<f64>,
    #[arg(long = "T", global = true)]
    pub height: Option<f64>,
    #[arg(long, global = true, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long = "prime-limit", global = true, default_value_t = 1_000_000)]
    pub prime_limit: u64,
    #[arg(long = "cutoff-factor", global = true, default_value_t = 40.0)]
    pub cutoff_factor: f64,
    #[arg(long, global = true, value_enum)]
    pub out: Option<OutFormat>,
    #[arg(long = "cache-dir", global = true, default_value = ".gzlab-cache")]
    pub cache_dir: PathBuf,
    /// Worker threads; 0 picks the number of CPUs
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Character index `v1,...` or full id `q:<q>,idx:<v1,...>`
    #[arg(long, global = true)]
    pub chi: Option<String>,
    #[arg(long = "n", global = true)]
    pub n: Option<u64>,
    #[arg(long, global = true)]
    pub from: Option<u64>,
    #[arg(long, global = true)]
    pub to: Option<u64>,
    #[arg(long, global = true)]
    pub limit: Option<u64>,
    /// Constant in the explicit-formula bound C √N (log N)²
    #[arg(long = "explicit-constant", global = true, default_value_t = DEFAULT_EXPLICIT_CONSTANT)]
    pub explicit_constant: f64,
}

type AnyResult<T> = std::result::Result<T, Box<dyn std::error::Error>>;

fn need<T: Copy>(v: Option<T>, flag: &str) -> AnyResult<T> {
    v.ok_or_else(|| format!("missing required flag {flag}").into())
}

impl Cli {
    fn q(&self) -> AnyResult<u64> {
        let q = need(self.q, "--q")?;
        if q == 0 {
            return Err("--q must be at least 1".into());
        }
        Ok(q)
    }

    fn n_scale(&self) -> AnyResult<f64> {
        let n = need(self.n_scale, "--N")?;
        if !(n >= 1.0 && n.is_finite()) {
            return Err(format!("--N must be a finite number >= 1, got {n}").into());
        }
        Ok(n)
    }

    fn format(&self, default: OutFormat) -> OutFormat {
        self.out.unwrap_or(default)
    }

    fn cache(&self) -> ZeroCache {
        match std::env::var_os(CACHE_ENV) {
            Some(dir) if !dir.is_empty() => ZeroCache::new(PathBuf::from(dir)),
            _ => ZeroCache::new(self.cache_dir.clone()),
        }
    }

    fn group(&self) -> AnyResult<std::sync::Arc<CharacterGroup>> {
        Ok(CharacterGroup::new(self.q()?)?)
    }

    fn character(&self, group: &std::sync::Arc<CharacterGroup>) -> AnyResult<Character> {
        let raw = need(self.chi.as_deref(), "--chi")?;
        let index = if raw.starts_with("q:") {
            let id: CharacterId = raw.parse()?;
            if id.q != group.modulus() {
                return Err(format!("--chi {raw} does not match --q {}", group.modulus()).into());
            }
            id.index
        } else {
            parse_index(raw).ok_or_else(|| format!("malformed --chi {raw:?}"))?
        };
        Ok(group.character(index)?)
    }

    fn series_params(&self) -> AnyResult<SeriesParams> {
        Ok(SeriesParams::new(self.q()?, self.n_scale()?, self.cutoff_factor)?)
    }

    /// One sieve covering every cutoff the command will touch.
    fn sieve_for(&self, factor: f64) -> AnyResult<SieveTable> {
        let limit = (factor * self.n_scale()?).ceil().max(2.0) as u64;
        Ok(SieveTable::new(limit)?)
    }

    fn ctx(&self) -> AnyResult<SingularSeriesCtx> {
        Ok(SingularSeriesCtx::new(self.prime_limit)?)
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if cli.threads > 0 {
        // a second call in the same process keeps the first pool, which is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match dispatch(&cli) {
        Ok((text, code)) => {
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return EXIT_ERROR;
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn line(mut s: String) -> String {
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

fn dispatch(cli: &Cli) -> AnyResult<(String, i32)> {
    let text = match cli.command {
        Command::Sieve => cmd_sieve(cli)?,
        Command::Gn => cmd_gn(cli)?,
        Command::Scan => cmd_scan(cli)?,
        Command::Sq => cmd_sq(cli)?,
        Command::Pchi => cmd_pchi(cli)?,
        Command::Decompose => cmd_decompose(cli)?,
        Command::Components => cmd_components(cli)?,
        Command::Model => cmd_model(cli)?,
        Command::Zeros => cmd_zeros(cli)?,
        Command::Explicit => cmd_explicit(cli)?,
        Command::Compare => return cmd_compare(cli),
    };
    Ok((text, 0))
}

#[derive(Serialize)]
struct SieveSummary {
    limit: u64,
    primes: usize,
    psi: f64,
}

fn cmd_sieve(cli: &Cli) -> AnyResult<String> {
    let limit = need(cli.limit, "--limit")?;
    let sieve = SieveTable::new(limit)?;
    let s = SieveSummary {
        limit,
        primes: sieve.primes().len(),
        psi: sieve.chebyshev_psi(limit),
    };
    Ok(match cli.format(OutFormat::Json) {
        OutFormat::Json => line(json::to_string(&s)),
        OutFormat::Csv => csv_text(
            &["limit", "primes", "psi"],
            vec![vec![s.limit.to_string(), s.primes.to_string(), fmt_num(s.psi)]],
        ),
    })
}

fn ratio_row(r: &RatioRecord) -> Vec<String> {
    vec![
        r.n.to_string(),
        fmt_num(r.g),
        fmt_num(r.singular_series),
        fmt_num(r.ratio),
        r.in_window.to_string(),
    ]
}

fn cmd_gn(cli: &Cli) -> AnyResult<String> {
    let n = need(cli.n, "--n")?;
    let sieve = SieveTable::new(n.max(2))?;
    let ctx = cli.ctx()?;
    let g = goldbach_g(n, &sieve)?;
    let ss = ctx.singular_series(n, &sieve)?;
    let ratio = g / (ss * n as f64);
    let rec = RatioRecord {
        n,
        g,
        singular_series: ss,
        ratio,
        in_window: ratio > cli.delta && ratio < 2.0 - cli.delta,
    };
    Ok(match cli.format(OutFormat::Csv) {
        OutFormat::Json => line(json::to_string(&rec)),
        OutFormat::Csv => csv_text(&RATIO_CSV_HEADER.split(',').collect::<Vec<_>>(), vec![ratio_row(&rec)]),
    })
}

#[derive(Serialize)]
struct ScanSummary {
    n_from: u64,
    n_to: u64,
    delta: f64,
    count: usize,
    violations: usize,
    first_violations: Vec<u64>,
    min_ratio: f64,
    max_ratio: f64,
    mean_ratio: f64,
}

fn cmd_scan(cli: &Cli) -> AnyResult<String> {
    let from = need(cli.from, "--from")?;
    let to = need(cli.to, "--to")?;
    let sieve = SieveTable::new(to.max(2))?;
    let scan = ratio_scan(from, to, cli.delta, &sieve, &cli.ctx()?)?;
    Ok(match cli.format(OutFormat::Csv) {
        OutFormat::Csv => scan.to_csv(),
        OutFormat::Json => line(json::to_string(&ScanSummary {
            n_from: scan.n_from,
            n_to: scan.n_to,
            delta: scan.delta,
            count: scan.records.len(),
            violations: scan.violations.len(),
            first_violations: scan.violations.iter().take(20).copied().collect(),
            min_ratio: scan.min_ratio,
            max_ratio: scan.max_ratio,
            mean_ratio: scan.mean_ratio(from, to).unwrap_or(f64::NAN),
        })),
    })
}

#[derive(Serialize)]
struct SqReport {
    q: u64,
    #[serde(rename = "N")]
    n_scale: f64,
    #[serde(rename = "S_direct")]
    s_direct: f64,
    cutoff_m: u64,
    tail_bound: f64,
}

fn cmd_sq(cli: &Cli) -> AnyResult<String> {
    let params = cli.series_params()?;
    let sieve = cli.sieve_for(cli.cutoff_factor)?;
    let s = series::s_direct(&params, &sieve)?;
    Ok(line(json::to_string(&SqReport {
        q: params.q,
        n_scale: params.n_scale,
        s_direct: s,
        cutoff_m: params.cutoff_m,
        tail_bound: params.tail_bound,
    })))
}

#[derive(Serialize)]
struct PchiRow {
    chi: String,
    re: f64,
    im: f64,
    abs: f64,
}

fn cmd_pchi(cli: &Cli) -> AnyResult<String> {
    let params = cli.series_params()?;
    let group = cli.group()?;
    let sieve = cli.sieve_for(cli.cutoff_factor)?;
    let rows: Vec<PchiRow> = if cli.chi.is_some() {
        let chi = cli.character(&group)?;
        let p = series::p_chi(&chi, &params, &sieve)?;
        vec![PchiRow { chi: chi.id().to_string(), re: p.re, im: p.im, abs: p.norm() }]
    } else {
        series::p_chi_all(&params, &group, &sieve)?
            .into_iter()
            .map(|(c, p)| PchiRow { chi: c.id().to_string(), re: p.re, im: p.im, abs: p.norm() })
            .collect()
    };
    Ok(match cli.format(OutFormat::Csv) {
        OutFormat::Json => line(json::to_string(&rows)),
        OutFormat::Csv => csv_text(
            &["chi", "re", "im", "abs"],
            rows.iter()
                .map(|r| vec![r.chi.clone(), fmt_num(r.re), fmt_num(r.im), fmt_num(r.abs)])
                .collect(),
        ),
    })
}

fn cmd_decompose(cli: &Cli) -> AnyResult<String> {
    let params = cli.series_params()?;
    let sieve = cli.sieve_for(cli.cutoff_factor)?;
    let d: DecompositionCheck = series::decomposition_check(&params, &cli.group()?, &sieve)?;
    Ok(line(json::to_string(&d)))
}

/// χ₁ from `--chi` when given, otherwise the exceptional candidate.
fn chi1_for(cli: &Cli, group: &std::sync::Arc<CharacterGroup>) -> AnyResult<(Character, bool)> {
    if cli.chi.is_some() {
        return Ok((cli.character(group)?, false));
    }
    match exceptional_candidate(group, &LfuncZeros::default())? {
        ExceptionalCandidate::RealZero { chi, .. } => Ok((chi, false)),
        ExceptionalCandidate::Fallback { chi } => Ok((chi, true)),
        ExceptionalCandidate::NoCandidate => {
            Err(Error::Domain(format!("no real non-principal character mod {}", group.modulus())).into())
        }
    }
}

fn series_report(cli: &Cli, sieve: &SieveTable) -> AnyResult<(SeriesReport, bool)> {
    let params = cli.series_params()?;
    let group = cli.group()?;
    let (chi1, fallback) = chi1_for(cli, &group)?;
    let c = series::components(&params, &group, sieve, &chi1)?;
    Ok((c.report, fallback))
}

fn cmd_components(cli: &Cli) -> AnyResult<String> {
    let sieve = cli.sieve_for(cli.cutoff_factor)?;
    let (report, _) = series_report(cli, &sieve)?;
    Ok(line(json::to_string(&report)))
}

fn cmd_model(cli: &Cli) -> AnyResult<String> {
    let sieve = cli.sieve_for(MODEL_CUTOFF_FACTOR)?;
    let r: ModelReport = model_sum(cli.q()?, cli.n_scale()?, &cli.ctx()?, &sieve)?;
    Ok(line(json::to_string(&r)))
}

#[derive(Serialize)]
struct ZeroJson {
    beta: f64,
    gamma: f64,
}

#[derive(Serialize)]
struct ZerosReport {
    chi: String,
    #[serde(rename = "T")]
    height: f64,
    count_verified: bool,
    argument_count: i64,
    zeros: Vec<ZeroJson>,
}

fn cmd_zeros(cli: &Cli) -> AnyResult<String> {
    let group = cli.group()?;
    let chi = cli.character(&group)?;
    let height = need(cli.height, "--T")?;
    let cached = cli.cache().zeros(&chi, height)?;
    Ok(match cli.format(OutFormat::Csv) {
        OutFormat::Csv => cached.csv,
        OutFormat::Json => line(json::to_string(&ZerosReport {
            chi: chi.id().to_string(),
            height,
            count_verified: cached.list.count_verified,
            argument_count: cached.list.argument_count,
            zeros: cached
                .list
                .zeros
                .iter()
                .map(|z| ZeroJson { beta: z.beta, gamma: z.gamma })
                .collect(),
        })),
    })
}

fn cmd_explicit(cli: &Cli) -> AnyResult<String> {
    let group = cli.group()?;
    let chi = cli.character(&group)?;
    let height = need(cli.height, "--T")?;
    let params = cli.series_params()?;
    let sieve = cli.sieve_for(cli.cutoff_factor)?;
    let zeros = cli.cache().zeros(&chi, height)?;
    let r = explicit_formula_residual(&chi, &params, &sieve, &zeros.list, cli.explicit_constant)?;
    Ok(line(json::to_string(&r)))
}

#[derive(Serialize)]
struct CompareReport {
    series: SeriesReport,
    model: ModelReport,
    #[serde(rename = "R")]
    ratio: f64,
    delta: f64,
    in_window: bool,
    chi1_fallback: bool,
    n_at_least_q: bool,
    n_at_least_q_squared: bool,
}

fn cmd_compare(cli: &Cli) -> AnyResult<(String, i32)> {
    if !(cli.delta > 0.0 && cli.delta < 1.0) {
        return Err(format!("--delta must lie in (0, 1), got {}", cli.delta).into());
    }
    let params = cli.series_params()?;
    let sieve = cli.sieve_for(cli.cutoff_factor.max(MODEL_CUTOFF_FACTOR))?;
    let (series, fallback) = series_report(cli, &sieve)?;
    let model = model_sum(params.q, params.n_scale, &cli.ctx()?, &sieve)?;
    let ratio = series.s_direct / model.model_sum;
    let in_window = ratio > cli.delta && ratio < 2.0 - cli.delta;
    let report = CompareReport {
        series,
        model,
        ratio,
        delta: cli.delta,
        in_window,
        chi1_fallback: fallback,
        n_at_least_q: params.n_at_least_q(),
        n_at_least_q_squared: params.n_at_least_q_squared(),
    };
    let code = if in_window { 0 } else { EXIT_WINDOW };
    Ok((line(json::to_string(&report)), code))
}
