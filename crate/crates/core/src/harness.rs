//! Seeded experiments over the estimators: `(ε, δ)` coverage trials,
//! error-versus-budget tables and sample-reuse diagnostics, rendered as CSV.
//!
//! Trial `k` of a run with master seed `m` uses seed
//! [`trial_seed`]`(m, k) = splitmix64(m ^ splitmix64(k))`, so any trial can be
//! rerun on its own. Trials run in parallel, each with a private cache
//! pre-filled from the warm entries; rows are sorted by
//! `(method, T, trial_index)` before rendering, so output does not depend on
//! scheduling.
//!
//! # Experiment files
//!
//! Flat `key=value` text, like game files:
//!
//! | key           | meaning                                           |
//! |---------------|---------------------------------------------------|
//! | `game`        | path to a game file (relative to the config file) |
//! | `family`, ... | alternatively, the game keys inline               |
//! | `methods`     | comma list of `perm`, `gt`, `gt-improved`         |
//! | `epsilon`     | target `ℓ₂` error                                 |
//! | `delta`       | failure probability                               |
//! | `budgets`     | comma list of sample budgets (bench)              |
//! | `n_trials`    | trials per method and budget                      |
//! | `master_seed` | seed every trial seed is derived from             |
//! | `output_dir`  | directory for CSV output                          |
//! | `cache`       | optional evaluation-cache file                    |

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::bounds::{required_samples, BoundQuery, BoundVariant};
use crate::error::{Error, Result};
use crate::estimators::{run_method, EstimationReport, Method};
use crate::games::{parse_key_values, GameFamilyConfig};
use crate::model::{Coalition, EvalCache, ShapleyVector, UtilitySpec};
use crate::numfmt::real;
use crate::sampling::{mix_seed, stream_rng, CoalitionSampler, SamplingDistribution, Variant};

/// Seed of trial `index` under `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    mix_seed(master, index)
}

impl Method {
    pub fn bound_variant(self) -> BoundVariant {
        match self {
            Method::Permutation => BoundVariant::Permutation,
            Method::GtOriginal => BoundVariant::GtOriginal,
            Method::GtImproved => BoundVariant::GtImproved,
        }
    }
}

/// Where an experiment's game comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum GameSource {
    Inline(GameFamilyConfig),
    File(PathBuf),
}

impl GameSource {
    pub fn load(&self) -> Result<GameFamilyConfig> {
        match self {
            GameSource::Inline(c) => Ok(c.clone()),
            GameSource::File(p) => GameFamilyConfig::from_file(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub game: GameSource,
    pub methods: Vec<Method>,
    pub epsilon: f64,
    pub delta: f64,
    pub budgets: Vec<usize>,
    pub n_trials: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub cache_path: Option<PathBuf>,
}

const GAME_KEYS: &[&str] = &[
    "family",
    "label",
    "weights",
    "n_players",
    "quota",
    "left",
    "right",
    "carrier",
    "seed",
];

impl ExperimentConfig {
    /// Parses an experiment file. Relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> std::result::Result<Self, String> {
        let kv = parse_key_values(text)?;
        let get = |k: &str| kv.get(k).map(String::as_str);
        let num = |k: &str, default: Option<f64>| -> std::result::Result<f64, String> {
            match get(k) {
                Some(v) => v.parse().map_err(|e| format!("`{k}`: {e}")),
                None => default.ok_or(format!("missing key `{k}`")),
            }
        };
        let game = match get("game") {
            Some(path) => {
                if kv.keys().any(|k| GAME_KEYS.contains(&k.as_str())) {
                    return Err("give either `game` or inline game keys, not both".into());
                }
                GameSource::File(base_dir.join(path))
            }
            None => {
                let mut inline = String::new();
                for (k, v) in kv.iter().filter(|(k, _)| GAME_KEYS.contains(&k.as_str())) {
                    let _ = writeln!(inline, "{k}={v}");
                }
                GameSource::Inline(GameFamilyConfig::parse(&inline)?)
            }
        };
        let methods = match get("methods") {
            Some(v) => v
                .split(',')
                .map(|m| m.trim().parse::<Method>())
                .collect::<std::result::Result<Vec<_>, _>>()?,
            None => Method::ALL.to_vec(),
        };
        if methods.is_empty() {
            return Err("`methods` is empty".into());
        }
        let budgets = match get("budgets") {
            Some(v) if !v.trim().is_empty() => v
                .split(',')
                .map(|b| b.trim().parse::<usize>().map_err(|e| format!("`budgets`: {e}")))
                .collect::<std::result::Result<Vec<_>, _>>()?,
            _ => Vec::new(),
        };
        if budgets.contains(&0) {
            return Err("`budgets` entries must be at least 1".into());
        }
        let n_trials = match get("n_trials") {
            Some(v) => v.parse().map_err(|e| format!("`n_trials`: {e}"))?,
            None => 100,
        };
        if n_trials == 0 {
            return Err("`n_trials` must be at least 1".into());
        }
        let master_seed = match get("master_seed") {
            Some(v) => v.parse().map_err(|e| format!("`master_seed`: {e}"))?,
            None => 0,
        };
        let known: &[&str] = &[
            "game",
            "methods",
            "epsilon",
            "delta",
            "budgets",
            "n_trials",
            "master_seed",
            "output_dir",
            "cache",
        ];
        if let Some(k) = kv
            .keys()
            .find(|k| !known.contains(&k.as_str()) && !GAME_KEYS.contains(&k.as_str()))
        {
            return Err(format!("unknown key `{k}`"));
        }
        Ok(ExperimentConfig {
            game,
            methods,
            epsilon: num("epsilon", Some(0.5))?,
            delta: num("delta", Some(0.1))?,
            budgets,
            n_trials,
            master_seed,
            output_dir: base_dir.join(get("output_dir").unwrap_or(".")),
            cache_path: get("cache").map(|p| base_dir.join(p)),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|message| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message,
        })
    }
}

/// One seeded estimator run scored against the exact values.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub method: Method,
    pub trial_index: usize,
    pub t: usize,
    pub seed: u64,
    pub l2_error: f64,
    pub linf_error: f64,
    pub utility_evals: u64,
    pub residual: Option<f64>,
}

impl TrialRecord {
    /// Whether the trial met `epsilon`, judged on the value as written to CSV
    /// so that a reader of the CSV reaches the same verdict.
    pub fn within(&self, epsilon: f64) -> bool {
        let printed: f64 = real(self.l2_error).parse().expect("formatted real");
        printed <= epsilon
    }
}

/// Sample count for `method`: `budget` if given, otherwise the bound.
pub fn resolve_budget(
    method: Method,
    n_players: usize,
    epsilon: Option<f64>,
    delta: Option<f64>,
    budget: Option<usize>,
) -> Result<usize> {
    if let Some(b) = budget {
        if b == 0 {
            return Err(Error::invalid("budget must be at least 1"));
        }
        return Ok(b);
    }
    let (Some(epsilon), Some(delta)) = (epsilon, delta) else {
        return Err(Error::invalid(
            "without an explicit budget both epsilon and delta are needed to derive T",
        ));
    };
    let r = required_samples(&BoundQuery::new(n_players, epsilon, delta, method.bound_variant()))?;
    usize::try_from(r.t).map_err(|_| Error::invalid(format!("bound {} too large", r.t)))
}

/// Runs `n_trials` seeded estimations of `method` with `budget` samples each.
#[allow(clippy::too_many_arguments)]
pub fn run_trials(
    u: &UtilitySpec,
    exact: &ShapleyVector,
    method: Method,
    budget: usize,
    epsilon: Option<f64>,
    n_trials: usize,
    master_seed: u64,
    warm: Option<&HashMap<Coalition, f64>>,
) -> Result<(Vec<TrialRecord>, EvalCache)> {
    let results: Vec<(TrialRecord, EvalCache)> = (0..n_trials)
        .into_par_iter()
        .map(|k| {
            let cache = warm.map_or_else(EvalCache::new, |w| EvalCache::with_entries(w.clone()));
            let seed = trial_seed(master_seed, k as u64);
            let report = run_method(method, u, budget, epsilon, seed, &cache)?;
            Ok((score(&report, exact, k), cache))
        })
        .collect::<Result<_>>()?;
    let merged = EvalCache::new();
    let mut records = Vec::with_capacity(n_trials);
    for (record, cache) in results {
        merged.absorb(&cache);
        records.push(record);
    }
    records.sort_by_key(|r| (r.method, r.t, r.trial_index));
    Ok((records, merged))
}

fn score(report: &EstimationReport, exact: &ShapleyVector, trial_index: usize) -> TrialRecord {
    TrialRecord {
        method: report.method,
        trial_index,
        t: report.t,
        seed: report.seed,
        l2_error: exact.l2_distance(&report.phi_hat.values),
        linf_error: exact.linf_distance(&report.phi_hat.values),
        utility_evals: report.utility_evals,
        residual: report.feasibility_residual,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageSummary {
    pub method: Method,
    pub t: usize,
    pub n_trials: usize,
    pub successes: usize,
    pub coverage: f64,
    pub epsilon: f64,
    pub delta: f64,
}

impl CoverageSummary {
    pub fn meets_target(&self) -> bool {
        self.coverage >= 1.0 - self.delta
    }
}

#[derive(Clone, Debug)]
pub struct CoverageOutput {
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<CoverageSummary>,
}

/// Empirical `(ε, δ)` coverage of each method at its bound-derived sample size.
pub fn coverage(
    u: &UtilitySpec,
    methods: &[Method],
    epsilon: f64,
    delta: f64,
    n_trials: usize,
    master_seed: u64,
    cache: Option<&EvalCache>,
) -> Result<CoverageOutput> {
    if n_trials == 0 {
        return Err(Error::invalid("n_trials must be at least 1"));
    }
    let exact = crate::exact::exact_shapley(u)?;
    let warm = cache.map(EvalCache::snapshot);
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for &method in sorted_methods(methods).iter() {
        let t = resolve_budget(method, u.n_players(), Some(epsilon), Some(delta), None)?;
        let (trials, used) = run_trials(
            u,
            &exact,
            method,
            t,
            Some(epsilon),
            n_trials,
            master_seed,
            warm.as_ref(),
        )?;
        if let Some(cache) = cache {
            cache.absorb(&used);
        }
        let successes = trials.iter().filter(|r| r.within(epsilon)).count();
        summaries.push(CoverageSummary {
            method,
            t,
            n_trials,
            successes,
            coverage: successes as f64 / n_trials as f64,
            epsilon,
            delta,
        });
        records.extend(trials);
    }
    Ok(CoverageOutput { records, summaries })
}

fn sorted_methods(methods: &[Method]) -> Vec<Method> {
    let mut m = methods.to_vec();
    m.sort();
    m.dedup();
    m
}

/// Mean error of one method at one budget.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    /// Budget in utility evaluations.
    pub t: usize,
    /// Samples actually drawn (permutations for permutation sampling).
    pub samples: usize,
    /// Mean cache misses per trial, rounded.
    pub utility_evals: u64,
    pub mean_l2: f64,
    pub std_l2: f64,
    pub rmse_l2: f64,
}

/// Samples that spend about `budget` utility evaluations with `method`.
/// Permutation sampling costs `N + 1` evaluations per permutation.
pub fn samples_for_budget(method: Method, n_players: usize, budget: usize) -> usize {
    match method {
        Method::Permutation => ((budget as f64 / (n_players + 1) as f64).round() as usize).max(1),
        _ => budget.max(1),
    }
}

/// Error-versus-budget table: for each method and budget, `n_trials` seeded
/// runs at a matched number of utility evaluations.
pub fn bench(
    u: &UtilitySpec,
    methods: &[Method],
    budgets: &[usize],
    epsilon: f64,
    n_trials: usize,
    master_seed: u64,
) -> Result<Vec<BenchRow>> {
    if budgets.is_empty() {
        return Err(Error::invalid("bench needs at least one budget"));
    }
    if n_trials == 0 {
        return Err(Error::invalid("n_trials must be at least 1"));
    }
    let exact = crate::exact::exact_shapley(u)?;
    let mut budgets = budgets.to_vec();
    budgets.sort_unstable();
    budgets.dedup();
    let mut rows = Vec::new();
    for &method in sorted_methods(methods).iter() {
        for &budget in &budgets {
            let samples = samples_for_budget(method, u.n_players(), budget);
            let (trials, _) = run_trials(u, &exact, method, samples, Some(epsilon), n_trials, master_seed, None)?;
            let k = trials.len() as f64;
            let mean = trials.iter().map(|r| r.l2_error).sum::<f64>() / k;
            let var = if trials.len() > 1 {
                trials.iter().map(|r| (r.l2_error - mean).powi(2)).sum::<f64>() / (k - 1.0)
            } else {
                0.0
            };
            let rmse = (trials.iter().map(|r| r.l2_error * r.l2_error).sum::<f64>() / k).sqrt();
            let evals = trials.iter().map(|r| r.utility_evals).sum::<u64>() as f64 / k;
            rows.push(BenchRow {
                method,
                t: budget,
                samples,
                utility_evals: evals.round() as u64,
                mean_l2: mean,
                std_l2: var.sqrt(),
                rmse_l2: rmse,
            });
        }
    }
    Ok(rows)
}

/// Sample-reuse figures of one distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnoseRow {
    pub n: usize,
    pub variant: Variant,
    pub z: f64,
    pub q_tot: f64,
    pub effective_fraction: f64,
    pub two_over_z: f64,
    /// `(T, measured fraction)` for players 0 and 1.
    pub empirical: Option<(usize, f64)>,
}

/// Fraction of `t` draws that hold exactly one of players `i` and `j`.
pub fn empirical_effective_fraction(dist: &SamplingDistribution, t: usize, seed: u64, i: usize, j: usize) -> f64 {
    let mut sampler = CoalitionSampler::new(dist);
    let hits = (0..t as u64)
        .filter(|&step| {
            let s = sampler.draw(&mut stream_rng(seed, step));
            s.contains(i) != s.contains(j)
        })
        .count();
    hits as f64 / t as f64
}

pub fn diagnose(n: usize, variant: Variant, empirical: Option<(usize, u64)>) -> Result<DiagnoseRow> {
    if n < 2 {
        return Err(Error::invalid(format!("diagnose needs n >= 2, got {n}")));
    }
    let dist = SamplingDistribution::new(n, variant)?;
    let q_tot = dist.q_tot();
    let empirical = match empirical {
        Some((0, _)) => return Err(Error::invalid("empirical draw count must be at least 1")),
        Some((t, seed)) => Some((t, empirical_effective_fraction(&dist, t, seed, 0, 1))),
        None => None,
    };
    Ok(DiagnoseRow {
        n,
        variant,
        z: dist.z(),
        q_tot,
        effective_fraction: 1.0 - q_tot,
        two_over_z: 2.0 / dist.z(),
        empirical,
    })
}

pub fn exact_csv(phi: &ShapleyVector) -> String {
    let mut out = String::from("player,phi\n");
    for (i, v) in phi.values.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", real(*v));
    }
    out
}

pub fn estimate_csv(report: &EstimationReport) -> String {
    let mut out = String::from("player,phi_hat\n");
    for (i, v) in report.phi_hat.values.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", real(*v));
    }
    out
}

/// `key=value` sidecar for an estimate. `elapsed` is included only on request
/// since it differs between otherwise identical runs.
pub fn estimate_metadata(report: &EstimationReport, game_label: &str, include_elapsed: bool) -> String {
    let opt = |x: Option<f64>| x.map(real).unwrap_or_default();
    let mut out = String::new();
    let _ = writeln!(out, "method={}", report.method);
    let _ = writeln!(out, "game={game_label}");
    let _ = writeln!(out, "n_players={}", report.phi_hat.len());
    let _ = writeln!(out, "T={}", report.t);
    let _ = writeln!(out, "seed={}", report.seed);
    let _ = writeln!(out, "utility_evals={}", report.utility_evals);
    let _ = writeln!(out, "epsilon={}", opt(report.epsilon));
    let _ = writeln!(out, "delta={}", opt(report.delta));
    let _ = writeln!(out, "residual={}", opt(report.feasibility_residual));
    let _ = writeln!(
        out,
        "feasible={}",
        report.feasible.map(|f| f.to_string()).unwrap_or_default()
    );
    if include_elapsed {
        let _ = writeln!(out, "elapsed_seconds={}", real(report.elapsed.as_secs_f64()));
    }
    out
}

pub const TRIALS_HEADER: &str = "method,trial_index,T,seed,l2_error,linf_error,utility_evals,residual";

pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = format!("{TRIALS_HEADER}\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.method,
            r.trial_index,
            r.t,
            r.seed,
            real(r.l2_error),
            real(r.linf_error),
            r.utility_evals,
            r.residual.map(real).unwrap_or_default()
        );
    }
    out
}

pub fn coverage_summary_csv(summaries: &[CoverageSummary]) -> String {
    let mut out = String::from("method,T,n_trials,successes,coverage,epsilon,delta,target\n");
    for s in summaries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.method,
            s.t,
            s.n_trials,
            s.successes,
            real(s.coverage),
            real(s.epsilon),
            real(s.delta),
            real(1.0 - s.delta)
        );
    }
    out
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("method,T,utility_evals,mean_l2,std_l2\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.method,
            r.t,
            r.utility_evals,
            real(r.mean_l2),
            real(r.std_l2)
        );
    }
    out
}

pub fn diagnose_csv(rows: &[DiagnoseRow]) -> String {
    let with_empirical = rows.iter().any(|r| r.empirical.is_some());
    let mut out = String::from("n,variant,Z,q_tot,effective_fraction,two_over_Z");
    if with_empirical {
        out.push_str(",empirical_T,empirical_fraction");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            r.variant.name(),
            real(r.z),
            real(r.q_tot),
            real(r.effective_fraction),
            real(r.two_over_z)
        );
        if with_empirical {
            match r.empirical {
                Some((t, f)) => {
                    let _ = write!(out, ",{t},{}", real(f));
                }
                None => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    out
}

/// One-line bound report: `variant,n,epsilon,delta,T,utility_evals,Z,q_tot`.
pub fn bound_csv(query: &BoundQuery) -> Result<String> {
    let r = required_samples(query)?;
    let opt = |x: f64| if x.is_nan() { String::new() } else { real(x) };
    Ok(format!(
        "variant,n,epsilon,delta,T,utility_evals,Z,q_tot\n{},{},{},{},{},{},{},{}\n",
        query.variant,
        query.n_players,
        real(query.epsilon),
        real(query.delta),
        r.t,
        r.utility_evals,
        opt(r.z),
        opt(r.q_tot)
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::make_glove_game;

    #[test]
    fn config_parsing() {
        let text = "family=glove\nleft=0,1\nright=2\nmethods=gt-improved,perm\nepsilon=0.4\nbudgets=100,400\nn_trials=3\nmaster_seed=9\noutput_dir=out\n";
        let c = ExperimentConfig::parse(text, Path::new("/tmp/x")).unwrap();
        assert_eq!(
            c.game,
            GameSource::Inline(GameFamilyConfig::Glove {
                left: vec![0, 1],
                right: vec![2]
            })
        );
        assert_eq!(c.methods, vec![Method::GtImproved, Method::Permutation]);
        assert_eq!(c.epsilon, 0.4);
        assert_eq!(c.delta, 0.1);
        assert_eq!(c.budgets, vec![100, 400]);
        assert_eq!(c.n_trials, 3);
        assert_eq!(c.master_seed, 9);
        assert_eq!(c.output_dir, Path::new("/tmp/x/out"));
        assert!(c.cache_path.is_none());

        let c = ExperimentConfig::parse("game=g.txt\n", Path::new("base")).unwrap();
        assert_eq!(c.game, GameSource::File(PathBuf::from("base/g.txt")));
        assert!(ExperimentConfig::parse("game=g.txt\nfamily=glove\n", Path::new(".")).is_err());
        assert!(ExperimentConfig::parse("game=g.txt\nn_trials=0\n", Path::new(".")).is_err());
        assert!(ExperimentConfig::parse("game=g.txt\nbudgets=0\n", Path::new(".")).is_err());
        assert!(ExperimentConfig::parse("game=g.txt\nbogus=1\n", Path::new(".")).is_err());
    }

    #[test]
    fn budgets_resolve_from_bounds() {
        assert_eq!(resolve_budget(Method::GtImproved, 8, None, None, Some(17)).unwrap(), 17);
        assert!(resolve_budget(Method::GtImproved, 8, Some(0.5), None, None).is_err());
        assert_eq!(
            resolve_budget(Method::Permutation, 10, Some(0.5), Some(0.1), None).unwrap(),
            424
        );
        assert_eq!(
            resolve_budget(Method::GtOriginal, 10, Some(0.5), Some(0.1), None).unwrap(),
            24_955
        );
        assert!(resolve_budget(Method::GtOriginal, 10, None, None, Some(0)).is_err());
    }

    #[test]
    fn single_trial_coverage_is_binary() {
        let u = make_glove_game(&[0, 1], &[2]).unwrap();
        let out = coverage(&u, &[Method::GtImproved], 0.5, 0.1, 1, 3, None).unwrap();
        let c = out.summaries[0].coverage;
        assert!(c == 0.0 || c == 1.0);
        assert_eq!(out.records.len(), 1);
    }

    #[test]
    fn trials_are_order_independent() {
        let u = make_glove_game(&[0, 1], &[2, 3]).unwrap();
        let exact = crate::exact::exact_shapley(&u).unwrap();
        let (a, _) = run_trials(&u, &exact, Method::GtImproved, 200, None, 8, 5, None).unwrap();
        let (b, _) = run_trials(&u, &exact, Method::GtImproved, 200, None, 8, 5, None).unwrap();
        assert_eq!(a, b);
        // trial k alone reproduces row k
        let cache = EvalCache::new();
        let r = run_method(Method::GtImproved, &u, 200, None, trial_seed(5, 6), &cache).unwrap();
        assert_eq!(exact.l2_distance(&r.phi_hat.values), a[6].l2_error);
    }

    #[test]
    fn diagnose_small_case() {
        let r = diagnose(3, Variant::Original, None).unwrap();
        assert_eq!(r.z, 3.0);
        assert!((r.q_tot - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.effective_fraction - 2.0 / 3.0).abs() < 1e-15);
        assert!(diagnose(1, Variant::Original, None).is_err());
        let csv = diagnose_csv(&[r]);
        assert_eq!(
            csv,
            "n,variant,Z,q_tot,effective_fraction,two_over_Z\n3,original,3.00000000000000,0.333333333333333,0.666666666666667,0.666666666666667\n"
        );
    }

    #[test]
    fn effective_fraction_falls_with_n() {
        let small = diagnose(10, Variant::Original, None).unwrap();
        let large = diagnose(1000, Variant::Original, None).unwrap();
        assert!(large.effective_fraction < small.effective_fraction);
    }

    #[test]
    fn bound_line_format() {
        let line = bound_csv(&BoundQuery::new(10, 0.5, 0.1, BoundVariant::Permutation)).unwrap();
        assert_eq!(
            line,
            "variant,n,epsilon,delta,T,utility_evals,Z,q_tot\nperm,10,0.500000000000000,0.100000000000000,424,4664,,\n"
        );
    }

    #[test]
    fn permutation_budget_matching() {
        assert_eq!(samples_for_budget(Method::Permutation, 6, 2000), 286);
        assert_eq!(samples_for_budget(Method::Permutation, 6, 3), 1);
        assert_eq!(samples_for_budget(Method::GtOriginal, 6, 2000), 2000);
    }
}
