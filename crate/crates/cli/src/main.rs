//! `shapley`: exact Shapley values, Monte Carlo estimates, sample-size bounds,
//! coverage trials, convergence tables and sampling diagnostics.
//!
//! Every subcommand writes CSV (header row, 15 significant digits) to `--out`
//! or to stdout. Experiment files (`--config`) supply defaults that explicit
//! flags override.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use shapley_core::bounds::{BoundQuery, BoundVariant};
use shapley_core::estimators::run_method;
use shapley_core::exact::exact_shapley_cached;
use shapley_core::games::GameFamilyConfig;
use shapley_core::harness::{self, ExperimentConfig, GameSource};
use shapley_core::{EvalCache, Method, UtilitySpec, Variant};

#[derive(Parser, Debug)]
#[command(
    name = "shapley",
    version,
    about = "Exact and sampled Shapley values for bounded cooperative games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact Shapley values by subset enumeration (n <= 20).
    Exact(ExactArgs),
    /// Monte Carlo estimate with one or more methods.
    Estimate(EstimateArgs),
    /// Sample size needed for an (epsilon, delta) guarantee.
    Bound(BoundArgs),
    /// Empirical (epsilon, delta) coverage at the bound-derived sample size.
    Coverage(CoverageArgs),
    /// Mean l2 error against budget.
    Bench(BenchArgs),
    /// Z, q_tot and the effective-sample fraction of the sampling distribution.
    Diagnose(DiagnoseArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Seed (master seed for multi-trial commands).
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Evaluation cache file, read if present and rewritten afterwards.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Experiment file with defaults for the other flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExactArgs {
    /// Game file.
    #[arg(long)]
    game: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long)]
    game: Option<PathBuf>,
    /// perm, gt or gt-improved; a comma list runs each in turn.
    #[arg(long, value_delimiter = ',')]
    method: Vec<Method>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Sample count, overriding the bound-derived one.
    #[arg(long)]
    budget: Option<usize>,
    /// Record wall-clock time in the metadata file.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    delta: f64,
    /// gt, gt-improved or perm.
    #[arg(long, default_value = "gt")]
    variant: BoundVariant,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CoverageArgs {
    #[arg(long)]
    game: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    method: Vec<Method>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    n_trials: Option<usize>,
    /// Fail unless every method reaches coverage 1 - delta.
    #[arg(long)]
    check: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    game: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    method: Vec<Method>,
    /// Utility-evaluation budgets.
    #[arg(long, value_delimiter = ',')]
    budgets: Vec<usize>,
    /// Feasibility tolerance parameter for gt.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    n_trials: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    /// Player counts (comma list).
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value = "original")]
    variant: Variant,
    /// Also measure the effective fraction from this many draws.
    #[arg(long)]
    empirical: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Exact(a) => cmd_exact(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Coverage(a) => cmd_coverage(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Diagnose(a) => cmd_diagnose(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(common: &Common) -> Result<Option<ExperimentConfig>> {
    common
        .config
        .as_deref()
        .map(|p| ExperimentConfig::from_file(p).context("loading experiment"))
        .transpose()
}

/// The game named by `--game`, else by the experiment file.
fn load_game(game: Option<&Path>, config: Option<&ExperimentConfig>) -> Result<(UtilitySpec, String)> {
    let source = match (game, config) {
        (Some(p), _) => GameSource::File(p.to_path_buf()),
        (None, Some(c)) => c.game.clone(),
        (None, None) => bail!("no game given: pass --game <file> or --config <file>"),
    };
    let spec: GameFamilyConfig = match &source {
        GameSource::File(p) => GameFamilyConfig::from_file(p).context("reading game file")?,
        GameSource::Inline(c) => c.clone(),
    };
    let u = spec.build().context("building game")?;
    let label = match &source {
        GameSource::File(p) => p
            .file_name()
            .map_or_else(String::new, |f| f.to_string_lossy().into_owned()),
        GameSource::Inline(_) => spec.family_name().to_string(),
    };
    Ok((u, label))
}

fn cache_path(common: &Common, config: Option<&ExperimentConfig>) -> Option<PathBuf> {
    common
        .cache
        .clone()
        .or_else(|| config.and_then(|c| c.cache_path.clone()))
}

fn open_cache(path: Option<&Path>, n_players: usize) -> Result<EvalCache> {
    match path {
        Some(p) if p.exists() => EvalCache::load(p, n_players).context("loading cache"),
        _ => Ok(EvalCache::new()),
    }
}

fn save_cache(cache: &EvalCache, path: Option<&Path>) -> Result<()> {
    if let Some(p) = path {
        ensure_parent(p)?;
        cache.save(p).context("saving cache")?;
    }
    Ok(())
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            ensure_parent(p)?;
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

/// `dir/name.csv` with `tag` inserted before the extension: `dir/name.tag.csv`.
fn tagged(path: &Path, tag: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// `--out`, else `file` inside the experiment's output directory.
fn output_path(common: &Common, config: Option<&ExperimentConfig>, file: &str) -> Option<PathBuf> {
    common.out.clone().or_else(|| config.map(|c| c.output_dir.join(file)))
}

fn cmd_exact(a: ExactArgs) -> Result<ExitCode> {
    let config = load_config(&a.common)?;
    let (u, _) = load_game(a.game.as_deref(), config.as_ref())?;
    let cache_file = cache_path(&a.common, config.as_ref());
    let cache = open_cache(cache_file.as_deref(), u.n_players())?;
    let phi = exact_shapley_cached(&u, &cache)?;
    save_cache(&cache, cache_file.as_deref())?;
    emit(
        output_path(&a.common, config.as_ref(), "exact.csv").as_deref(),
        &harness::exact_csv(&phi),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_estimate(a: EstimateArgs) -> Result<ExitCode> {
    let config = load_config(&a.common)?;
    let (u, label) = load_game(a.game.as_deref(), config.as_ref())?;
    let methods = match (a.method.is_empty(), config.as_ref()) {
        (false, _) => a.method.clone(),
        (true, Some(c)) => c.methods.clone(),
        (true, None) => bail!("no method given: pass --method perm|gt|gt-improved"),
    };
    let epsilon = a.epsilon.or(config.as_ref().map(|c| c.epsilon));
    let delta = a.delta.or(config.as_ref().map(|c| c.delta));
    let seed = a.common.seed.or(config.as_ref().map(|c| c.master_seed)).unwrap_or(0);
    let cache_file = cache_path(&a.common, config.as_ref());
    let cache = open_cache(cache_file.as_deref(), u.n_players())?;
    let out = output_path(&a.common, config.as_ref(), "estimate.csv");
    for &method in &methods {
        let t = harness::resolve_budget(method, u.n_players(), epsilon, delta, a.budget)
            .with_context(|| format!("sample size for {method}"))?;
        let mut report =
            run_method(method, &u, t, epsilon, seed, &cache).with_context(|| format!("{method} estimate"))?;
        report.epsilon = epsilon;
        report.delta = delta;
        if report.feasible == Some(false) {
            eprintln!(
                "warning: {method}: no point satisfies every pairwise constraint; returning the least-squares point"
            );
        }
        if a.timing {
            eprintln!("{method}: {:.3}s", report.elapsed.as_secs_f64());
        }
        let csv = harness::estimate_csv(&report);
        let meta = harness::estimate_metadata(&report, &label, a.timing);
        match &out {
            Some(p) => {
                let p = if methods.len() > 1 {
                    tagged(p, method.name())
                } else {
                    p.clone()
                };
                emit(Some(&p), &csv)?;
                emit(Some(&sidecar(&p)), &meta)?;
            }
            None => {
                if methods.len() > 1 {
                    println!("# {method}");
                }
                emit(None, &csv)?;
            }
        }
    }
    save_cache(&cache, cache_file.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bound(a: BoundArgs) -> Result<ExitCode> {
    let line = harness::bound_csv(&BoundQuery::new(a.n, a.epsilon, a.delta, a.variant))?;
    emit(a.out.as_deref(), &line)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_coverage(a: CoverageArgs) -> Result<ExitCode> {
    let config = load_config(&a.common)?;
    let (u, _) = load_game(a.game.as_deref(), config.as_ref())?;
    let methods = pick_methods(&a.method, config.as_ref(), &[Method::GtOriginal, Method::GtImproved]);
    let epsilon = a.epsilon.or(config.as_ref().map(|c| c.epsilon)).unwrap_or(0.5);
    let delta = a.delta.or(config.as_ref().map(|c| c.delta)).unwrap_or(0.1);
    let n_trials = a.n_trials.or(config.as_ref().map(|c| c.n_trials)).unwrap_or(100);
    let seed = a.common.seed.or(config.as_ref().map(|c| c.master_seed)).unwrap_or(0);
    let cache_file = cache_path(&a.common, config.as_ref());
    let cache = open_cache(cache_file.as_deref(), u.n_players())?;
    let result = harness::coverage(&u, &methods, epsilon, delta, n_trials, seed, Some(&cache))?;
    save_cache(&cache, cache_file.as_deref())?;
    let summary = harness::coverage_summary_csv(&result.summaries);
    match output_path(&a.common, config.as_ref(), "coverage.csv") {
        Some(p) => {
            emit(Some(&p), &harness::trials_csv(&result.records))?;
            emit(Some(&tagged(&p, "summary")), &summary)?;
        }
        None => emit(None, &summary)?,
    }
    if a.check {
        let failing: Vec<_> = result.summaries.iter().filter(|s| !s.meets_target()).collect();
        for s in &failing {
            eprintln!(
                "check failed: {} coverage {} below target {}",
                s.method,
                s.coverage,
                1.0 - s.delta
            );
        }
        if !failing.is_empty() {
            return Ok(ExitCode::from(2));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(a: BenchArgs) -> Result<ExitCode> {
    let config = load_config(&a.common)?;
    let (u, _) = load_game(a.game.as_deref(), config.as_ref())?;
    let methods = pick_methods(&a.method, config.as_ref(), &Method::ALL);
    let budgets = match (a.budgets.is_empty(), config.as_ref()) {
        (false, _) => a.budgets.clone(),
        (true, Some(c)) if !c.budgets.is_empty() => c.budgets.clone(),
        _ => bail!("no budgets given: pass --budgets T1,T2,..."),
    };
    let epsilon = a.epsilon.or(config.as_ref().map(|c| c.epsilon)).unwrap_or(0.5);
    let n_trials = a.n_trials.or(config.as_ref().map(|c| c.n_trials)).unwrap_or(50);
    let seed = a.common.seed.or(config.as_ref().map(|c| c.master_seed)).unwrap_or(0);
    let rows = harness::bench(&u, &methods, &budgets, epsilon, n_trials, seed)?;
    emit(
        output_path(&a.common, config.as_ref(), "bench.csv").as_deref(),
        &harness::bench_csv(&rows),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn pick_methods(flag: &[Method], config: Option<&ExperimentConfig>, default: &[Method]) -> Vec<Method> {
    if !flag.is_empty() {
        flag.to_vec()
    } else if let Some(c) = config {
        c.methods.clone()
    } else {
        default.to_vec()
    }
}

fn cmd_diagnose(a: DiagnoseArgs) -> Result<ExitCode> {
    let seed = a.seed.unwrap_or(0);
    let rows =
        a.n.iter()
            .map(|&n| harness::diagnose(n, a.variant, a.empirical.map(|t| (t, seed))))
            .collect::<shapley_core::Result<Vec<_>>>()?;
    emit(a.out.as_deref(), &harness::diagnose_csv(&rows))?;
    Ok(ExitCode::SUCCESS)
}
