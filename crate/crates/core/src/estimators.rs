//! Monte Carlo Shapley estimators.
//!
//! * [`permutation_sampling_estimate`]: mean marginal contribution over
//!   random orderings.
//! * [`group_testing_original_estimate`]: estimates all pairwise differences
//!   `Δ_{i,j}` from shared size-biased coalition samples, then recovers `φ`
//!   from the feasibility problem `Σφ = U(I) - U(∅)`,
//!   `|(φ_i - φ_j) - Δ̂_{i,j}| ≤ ε/(2√N)`.
//! * [`group_testing_improved_estimate`]: appends a dummy player `*` with
//!   `φ_* = 0` and reads `φ_i = Δ̂_{i,*}` directly.
//!
//! Every estimator is a pure function of `(game, parameters, seed)`: draw `t`
//! uses the random stream `(seed, t)`. Utility calls go through an
//! [`EvalCache`] and the reported `utility_evals` is the number of cache misses
//! the run caused.
//!
//! Both group-testing estimators sample the shifted utility `U(S) - U(∅)`.
//! The shift leaves every `Δ_{i,j}` unchanged and keeps the single-sample
//! statistic within `[-Z, Z]`.

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::exact::{CompensatedSum, ValueTable};
use crate::model::{Coalition, EvalCache, ShapleyVector, UtilitySpec};
use crate::sampling::{stream_rng, CoalitionSampler, SamplingDistribution, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Permutation,
    GtOriginal,
    GtImproved,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Permutation, Method::GtOriginal, Method::GtImproved];

    /// Command-line spelling: `perm`, `gt`, `gt-improved`.
    pub fn name(self) -> &'static str {
        match self {
            Method::Permutation => "perm",
            Method::GtOriginal => "gt",
            Method::GtImproved => "gt-improved",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "perm" | "permutation" => Ok(Method::Permutation),
            "gt" | "gt-original" => Ok(Method::GtOriginal),
            "gt-improved" | "improved" => Ok(Method::GtImproved),
            other => Err(format!("unknown method `{other}` (expected perm|gt|gt-improved)")),
        }
    }
}

/// Output of one estimator run.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimationReport {
    pub phi_hat: ShapleyVector,
    pub method: Method,
    /// Samples drawn: permutations for [`Method::Permutation`], coalitions otherwise.
    pub t: usize,
    pub utility_evals: u64,
    pub seed: u64,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    /// Largest pairwise constraint violation of the returned point (original
    /// group testing only).
    pub feasibility_residual: Option<f64>,
    /// Whether the returned point satisfies the feasibility problem.
    pub feasible: Option<bool>,
    pub elapsed: Duration,
}

/// Sampled coalitions and their utilities.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    dist: SamplingDistribution,
    rows: Vec<Coalition>,
    utilities: Vec<f64>,
    seed: u64,
    baseline: f64,
}

impl SampleBatch {
    /// Builds a batch from explicit rows. Utilities must lie in `[0, 1]`.
    pub fn from_rows(dist: SamplingDistribution, rows: Vec<Coalition>, utilities: Vec<f64>, seed: u64) -> Result<Self> {
        if rows.is_empty() || rows.len() != utilities.len() {
            return Err(Error::invalid(format!(
                "batch needs matching nonempty rows/utilities, got {} and {}",
                rows.len(),
                utilities.len()
            )));
        }
        for (s, &v) in rows.iter().zip(&utilities) {
            if s.n_players() != dist.n_effective() {
                return Err(Error::PlayerMismatch {
                    expected: dist.n_effective(),
                    found: s.n_players(),
                });
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::UtilityOutOfRange {
                    coalition: s.to_string(),
                    value: v,
                });
            }
        }
        Ok(SampleBatch {
            dist,
            rows,
            utilities,
            seed,
            baseline: 0.0,
        })
    }

    /// The same batch with `baseline` subtracted from every utility when
    /// forming differences.
    pub fn shifted(mut self, baseline: f64) -> Self {
        self.baseline = baseline;
        self
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Coalition] {
        &self.rows
    }

    pub fn utilities(&self) -> &[f64] {
        &self.utilities
    }

    pub fn dist(&self) -> &SamplingDistribution {
        &self.dist
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn baseline(&self) -> f64 {
        self.baseline
    }
}

/// Draws `t` coalitions from `dist` and evaluates `u_effective` on each.
pub fn collect_samples(
    u_effective: &UtilitySpec,
    dist: &SamplingDistribution,
    t: usize,
    seed: u64,
    cache: &EvalCache,
) -> Result<SampleBatch> {
    if t == 0 {
        return Err(Error::invalid("sample count T must be at least 1"));
    }
    if u_effective.n_players() != dist.n_effective() {
        return Err(Error::PlayerMismatch {
            expected: dist.n_effective(),
            found: u_effective.n_players(),
        });
    }
    let mut sampler = CoalitionSampler::new(dist);
    let mut rows = Vec::with_capacity(t);
    let mut utilities = Vec::with_capacity(t);
    for step in 0..t {
        let s = sampler.draw(&mut stream_rng(seed, step as u64));
        utilities.push(cache.evaluate(u_effective, &s)?);
        rows.push(s);
    }
    Ok(SampleBatch {
        dist: dist.clone(),
        rows,
        utilities,
        seed,
        baseline: 0.0,
    })
}

/// Which differences to estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairSelection {
    /// `Δ̂_{i,j}` for every `i < j`.
    AllPairs,
    /// `Δ̂_{i,p}` for every `i ≠ p`.
    Pivot(usize),
}

/// Estimated (or exact) Shapley differences.
#[derive(Clone, Debug, PartialEq)]
pub enum DifferenceMatrix {
    /// Upper triangle of `Δ_{i,j}`, row-major over `i < j`.
    AllPairs { n: usize, upper: Vec<f64> },
    /// `Δ_{i,pivot}` for `i` in `0..n` except the pivot; the pivot's own entry is 0.
    Pivot { pivot: usize, values: Vec<f64> },
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl DifferenceMatrix {
    /// All-pairs matrix with entries `f(i, j)` for `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                upper.push(f(i, j));
            }
        }
        DifferenceMatrix::AllPairs { n, upper }
    }

    /// The exact all-pairs matrix of a tabulated game.
    pub fn exact(table: &ValueTable) -> Result<Self> {
        let n = table.n_players();
        let mut upper = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                upper.push(table.pair_difference(i, j)?);
            }
        }
        Ok(DifferenceMatrix::AllPairs { n, upper })
    }

    /// Number of players indexed by the matrix.
    pub fn n(&self) -> usize {
        match self {
            DifferenceMatrix::AllPairs { n, .. } => *n,
            DifferenceMatrix::Pivot { values, .. } => values.len(),
        }
    }

    /// `Δ_{i,j}`; antisymmetric, zero on the diagonal. For the pivot form one
    /// of `i`, `j` must be the pivot.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            DifferenceMatrix::AllPairs { n, upper } => match i.cmp(&j) {
                std::cmp::Ordering::Less => upper[upper_index(*n, i, j)],
                std::cmp::Ordering::Greater => -upper[upper_index(*n, j, i)],
                std::cmp::Ordering::Equal => 0.0,
            },
            DifferenceMatrix::Pivot { pivot, values } => {
                if j == *pivot {
                    values[i]
                } else if i == *pivot {
                    -values[j]
                } else {
                    panic!("pivot matrix only holds differences against player {pivot}")
                }
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        let xs = match self {
            DifferenceMatrix::AllPairs { upper, .. } => upper,
            DifferenceMatrix::Pivot { values, .. } => values,
        };
        xs.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// `Δ̂_{i,j} = (Z/T) Σ_t (u_t - b)(B_{t,i} - B_{t,j})`, where `b` is the
/// batch baseline.
pub fn estimate_pair_differences(batch: &SampleBatch, selection: PairSelection) -> Result<DifferenceMatrix> {
    let n = batch.dist.n_effective();
    if let PairSelection::Pivot(p) = selection {
        if p >= n {
            return Err(Error::IndexOutOfRange { index: p, n_players: n });
        }
    }
    // per-player Σ_t (u_t - b) B_{t,i}; the difference of two such sums is the
    // pairwise statistic with identical accumulation order for both players
    let mut sums = vec![CompensatedSum::default(); n];
    for (s, &u) in batch.rows.iter().zip(&batch.utilities) {
        let v = u - batch.baseline;
        for i in s.indices() {
            sums[i].add(v);
        }
    }
    let sums: Vec<f64> = sums.iter().map(CompensatedSum::value).collect();
    let scale = batch.dist.z() / batch.rows.len() as f64;
    Ok(match selection {
        PairSelection::AllPairs => DifferenceMatrix::from_fn(n, |i, j| scale * (sums[i] - sums[j])),
        PairSelection::Pivot(p) => DifferenceMatrix::Pivot {
            pivot: p,
            values: (0..n)
                .map(|i| if i == p { 0.0 } else { scale * (sums[i] - sums[p]) })
                .collect(),
        },
    })
}

/// Result of [`solve_feasibility`].
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityOutcome {
    pub phi_hat: Vec<f64>,
    /// `max_{i<j} |(φ̂_i - φ̂_j) - Δ̂_{i,j}|` at `phi_hat`.
    pub residual: f64,
    /// `residual ≤ tolerance`. When false, `phi_hat` is the least-squares
    /// point and the constraint system may be infeasible.
    pub feasible: bool,
    /// Whether the least-squares point needed the difference-constraint repair.
    pub repaired: bool,
}

fn max_residual(phi: &[f64], deltas: &DifferenceMatrix) -> f64 {
    let n = phi.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max(((phi[i] - phi[j]) - deltas.get(i, j)).abs());
        }
    }
    worst
}

/// Finds `φ̂` with `Σφ̂ = net_total` and `|(φ̂_i - φ̂_j) - Δ̂_{i,j}| ≤ tolerance`.
///
/// Starts from the least-squares point `φ̂_i = net/N + (1/N) Σ_{j≠i} Δ̂_{i,j}`,
/// which satisfies the efficiency equality exactly. If that point violates a
/// pairwise constraint, the constraints are solved as a system of difference
/// constraints (all-pairs shortest paths): the greatest feasible offset
/// `≤ 0` and the least feasible offset `≥ 0` from the least-squares point are
/// averaged, then the result is shifted back onto the efficiency plane. A
/// negative cycle proves the system infeasible; the least-squares point is
/// then returned with `feasible = false`.
pub fn solve_feasibility(deltas: &DifferenceMatrix, net_total: f64, tolerance: f64) -> Result<FeasibilityOutcome> {
    let n = match deltas {
        DifferenceMatrix::AllPairs { n, .. } => *n,
        DifferenceMatrix::Pivot { .. } => {
            return Err(Error::invalid(
                "feasibility recovery needs the all-pairs difference matrix",
            ))
        }
    };
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::invalid(format!(
            "feasibility tolerance must be positive, got {tolerance}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid("feasibility recovery needs at least one player"));
    }
    let ls: Vec<f64> = (0..n)
        .map(|i| {
            let acc: CompensatedSum = (0..n).filter(|&j| j != i).map(|j| deltas.get(i, j)).collect();
            (net_total + acc.value()) / n as f64
        })
        .collect();
    let residual = max_residual(&ls, deltas);
    if residual <= tolerance {
        return Ok(FeasibilityOutcome {
            phi_hat: ls,
            residual,
            feasible: true,
            repaired: false,
        });
    }
    // Aim slightly inside the tolerance so that rounding in the repair cannot
    // push a constraint over; fall back to the exact tolerance.
    for tol in [tolerance * (1.0 - 1e-9), tolerance] {
        if let Some(phi) = repair(&ls, deltas, tol, net_total) {
            let r = max_residual(&phi, deltas);
            if r <= tolerance {
                return Ok(FeasibilityOutcome {
                    phi_hat: phi,
                    residual: r,
                    feasible: true,
                    repaired: true,
                });
            }
        }
    }
    Ok(FeasibilityOutcome {
        phi_hat: ls,
        residual,
        feasible: false,
        repaired: false,
    })
}

fn repair(ls: &[f64], deltas: &DifferenceMatrix, tol: f64, net_total: f64) -> Option<Vec<f64>> {
    let n = ls.len();
    // Offsets y with x = ls + y. Constraint y_i - y_j ≤ w[j][i] is an edge
    // j -> i of weight w[j][i].
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for i in 0..n {
        dist[i][i] = 0.0;
        for j in 0..n {
            if i != j {
                let w = deltas.get(i, j) + tol - (ls[i] - ls[j]);
                dist[j][i] = dist[j][i].min(w);
            }
        }
    }
    for k in 0..n {
        let row_k = dist[k].clone();
        for row_a in dist.iter_mut() {
            let dak = row_a[k];
            if dak == f64::INFINITY {
                continue;
            }
            for (ab, kb) in row_a.iter_mut().zip(&row_k) {
                let via = dak + kb;
                if via < *ab {
                    *ab = via;
                }
            }
        }
    }
    if (0..n).any(|i| dist[i][i] < 0.0) {
        return None;
    }
    let upper: Vec<f64> = (0..n).map(|i| (0..n).map(|j| dist[j][i]).fold(0.0, f64::min)).collect();
    let lower: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| -dist[i][j]).fold(0.0, f64::max))
        .collect();
    let mut x: Vec<f64> = (0..n).map(|i| ls[i] + 0.5 * (upper[i] + lower[i])).collect();
    let shift = (net_total - x.iter().sum::<f64>()) / n as f64;
    for v in &mut x {
        *v += shift;
    }
    Some(x)
}

/// Permutation sampling: `n_permutations` uniformly random orderings, each
/// walked prefix by prefix.
pub fn permutation_sampling_estimate(
    u: &UtilitySpec,
    n_permutations: usize,
    seed: u64,
    cache: &EvalCache,
) -> Result<EstimationReport> {
    if n_permutations == 0 {
        return Err(Error::invalid("permutation count must be at least 1"));
    }
    let start = Instant::now();
    let misses_before = cache.misses();
    let n = u.n_players();
    let empty = Coalition::empty(n);
    let base = cache.evaluate(u, &empty)?;
    let mut sums = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for p in 0..n_permutations {
        order.sort_unstable();
        order.shuffle(&mut stream_rng(seed, p as u64));
        let mut prefix = empty.clone();
        let mut prev = base;
        for &player in &order {
            prefix.insert(player);
            let cur = cache.evaluate(u, &prefix)?;
            sums[player] += cur - prev;
            prev = cur;
        }
    }
    let phi_hat = sums.iter().map(|s| s / n_permutations as f64).collect();
    Ok(EstimationReport {
        phi_hat: ShapleyVector::new(phi_hat),
        method: Method::Permutation,
        t: n_permutations,
        utility_evals: cache.misses() - misses_before,
        seed,
        epsilon: None,
        delta: None,
        feasibility_residual: None,
        feasible: None,
        elapsed: start.elapsed(),
    })
}

/// Group testing over all pairs with feasibility recovery.
pub fn group_testing_original_estimate(
    u: &UtilitySpec,
    t: usize,
    epsilon: f64,
    seed: u64,
    cache: &EvalCache,
) -> Result<EstimationReport> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let start = Instant::now();
    let misses_before = cache.misses();
    let n = u.n_players();
    let dist = SamplingDistribution::new(n, Variant::Original)?;
    let baseline = cache.evaluate(u, &Coalition::empty(n))?;
    let net_total = cache.evaluate(u, &Coalition::full(n))? - baseline;
    let batch = collect_samples(u, &dist, t, seed, cache)?.shifted(baseline);
    let deltas = estimate_pair_differences(&batch, PairSelection::AllPairs)?;
    let tolerance = epsilon / (2.0 * (n as f64).sqrt());
    let outcome = solve_feasibility(&deltas, net_total, tolerance)?;
    Ok(EstimationReport {
        phi_hat: ShapleyVector::new(outcome.phi_hat),
        method: Method::GtOriginal,
        t,
        utility_evals: cache.misses() - misses_before,
        seed,
        epsilon: Some(epsilon),
        delta: None,
        feasibility_residual: Some(outcome.residual),
        feasible: Some(outcome.feasible),
        elapsed: start.elapsed(),
    })
}

/// The game extended by a dummy player `*` at index `N`: `U'(S ∪ *) = U(S)`.
pub fn augment_with_dummy(u: &UtilitySpec) -> UtilitySpec {
    Arc::new(u.clone()).augmented()
}

/// Group testing against a dummy pivot: `φ̂_i = Δ̂_{i,*}`.
pub fn group_testing_improved_estimate(
    u: &UtilitySpec,
    t: usize,
    seed: u64,
    cache: &EvalCache,
) -> Result<EstimationReport> {
    let start = Instant::now();
    let misses_before = cache.misses();
    let n = u.n_players();
    let augmented = augment_with_dummy(u);
    let dist = SamplingDistribution::new(n, Variant::Augmented)?;
    let baseline = cache.evaluate(u, &Coalition::empty(n))?;
    let batch = collect_samples(&augmented, &dist, t, seed, cache)?.shifted(baseline);
    let phi_hat = match estimate_pair_differences(&batch, PairSelection::Pivot(n))? {
        DifferenceMatrix::Pivot { mut values, .. } => {
            values.truncate(n);
            values
        }
        DifferenceMatrix::AllPairs { .. } => unreachable!(),
    };
    Ok(EstimationReport {
        phi_hat: ShapleyVector::new(phi_hat),
        method: Method::GtImproved,
        t,
        utility_evals: cache.misses() - misses_before,
        seed,
        epsilon: None,
        delta: None,
        feasibility_residual: None,
        feasible: None,
        elapsed: start.elapsed(),
    })
}

/// Runs `method` with `budget` samples (permutations for permutation sampling).
/// `epsilon` is required by [`Method::GtOriginal`].
pub fn run_method(
    method: Method,
    u: &UtilitySpec,
    budget: usize,
    epsilon: Option<f64>,
    seed: u64,
    cache: &EvalCache,
) -> Result<EstimationReport> {
    match method {
        Method::Permutation => permutation_sampling_estimate(u, budget, seed, cache),
        Method::GtOriginal => {
            let eps = epsilon.ok_or_else(|| Error::invalid("the gt method needs epsilon"))?;
            group_testing_original_estimate(u, budget, eps, seed, cache)
        }
        Method::GtImproved => group_testing_improved_estimate(u, budget, seed, cache),
    }
}

/// Fraction of rows holding exactly one of `i`, `j`, and its expected value
/// `1 - q_tot = 2/Z`.
pub fn sample_reuse_diagnostics(batch: &SampleBatch, i: usize, j: usize) -> Result<(f64, f64)> {
    let n = batch.dist.n_effective();
    for p in [i, j] {
        if p >= n {
            return Err(Error::IndexOutOfRange { index: p, n_players: n });
        }
    }
    if i == j {
        return Err(Error::invalid(format!(
            "diagnostics need distinct players, got {i} twice"
        )));
    }
    let effective = batch.rows.iter().filter(|s| s.contains(i) != s.contains(j)).count();
    Ok((effective as f64 / batch.rows.len() as f64, 1.0 - batch.dist.q_tot()))
}
