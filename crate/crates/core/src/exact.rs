//! Enumeration oracles: exact Shapley values, pairwise differences and the
//! exact expectation of the group-testing statistic.
//!
//! Every routine first materializes the `2^N` value table (one evaluation per
//! subset, optionally through an [`EvalCache`]) and then sums in mask order
//! with Neumaier compensation. Binomial coefficients are exact integers.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Coalition, EvalCache, ShapleyVector, UtilitySpec, MAX_EXACT_PLAYERS};
use crate::sampling::SamplingDistribution;

/// Largest game accepted by the `N!` permutation oracle.
pub const MAX_PERMUTATION_PLAYERS: usize = 9;

/// Largest sampling space enumerated by [`exact_statistic_expectation`].
pub const MAX_EXPECTATION_PLAYERS: usize = 14;

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Exact `C(n, k)`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) is divisible by (i + 1) at every step
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// The full value table of a game with at most 20 players.
#[derive(Clone, Debug)]
pub struct ValueTable {
    n_players: usize,
    values: Vec<f64>,
}

impl ValueTable {
    pub fn build(u: &UtilitySpec, cache: Option<&EvalCache>) -> Result<Self> {
        Self::build_limited(u, cache, MAX_EXACT_PLAYERS, "exact enumeration")
    }

    fn build_limited(u: &UtilitySpec, cache: Option<&EvalCache>, limit: usize, what: &'static str) -> Result<Self> {
        let n = u.n_players();
        if n > limit {
            return Err(Error::SizeLimit {
                what,
                n_players: n,
                limit,
            });
        }
        let values = (0..1u64 << n)
            .map(|mask| {
                let s = Coalition::from_mask(mask, n);
                match cache {
                    Some(cache) => cache.evaluate(u, &s),
                    None => u.checked_evaluate(&s),
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(ValueTable { n_players: n, values })
    }

    pub fn n_players(&self) -> usize {
        self.n_players
    }

    pub fn value(&self, mask: u64) -> f64 {
        self.values[mask as usize]
    }

    pub fn net_total(&self) -> f64 {
        self.values[self.values.len() - 1] - self.values[0]
    }

    fn check_player(&self, i: usize) -> Result<()> {
        if i >= self.n_players {
            return Err(Error::IndexOutOfRange {
                index: i,
                n_players: self.n_players,
            });
        }
        Ok(())
    }

    /// `φ_i = (1/N) Σ_{S ⊆ I∖{i}} C(N-1, |S|)^{-1} [U(S ∪ i) - U(S)]`.
    pub fn shapley(&self) -> ShapleyVector {
        let n = self.n_players;
        let weights: Vec<f64> = (0..n).map(|s| binomial(n - 1, s) as f64).collect();
        let values = (0..n)
            .into_par_iter()
            .map(|i| {
                let bit = 1u64 << i;
                let acc: CompensatedSum = (0..1u64 << n)
                    .filter(|mask| mask & bit == 0)
                    .map(|mask| {
                        let gain = self.value(mask | bit) - self.value(mask);
                        gain / weights[mask.count_ones() as usize]
                    })
                    .collect();
                acc.value() / n as f64
            })
            .collect();
        ShapleyVector::new(values)
    }

    /// `Δ_{i,j} = (1/(N-1)) Σ_{S ⊆ I∖{i,j}} C(N-2, |S|)^{-1} [U(S ∪ i) - U(S ∪ j)]`.
    pub fn pair_difference(&self, i: usize, j: usize) -> Result<f64> {
        self.check_player(i)?;
        self.check_player(j)?;
        if i == j {
            return Err(Error::invalid(format!(
                "pair difference needs distinct players, got {i} twice"
            )));
        }
        let n = self.n_players;
        let (bi, bj) = (1u64 << i, 1u64 << j);
        let acc: CompensatedSum = (0..1u64 << n)
            .filter(|mask| mask & (bi | bj) == 0)
            .map(|mask| {
                let diff = self.value(mask | bi) - self.value(mask | bj);
                diff / binomial(n - 2, mask.count_ones() as usize) as f64
            })
            .collect();
        Ok(acc.value() / (n - 1) as f64)
    }

    /// `E[(β_i - β_j) U(S)]` with `S` drawn from `dist`.
    pub fn statistic_expectation(&self, dist: &SamplingDistribution, i: usize, j: usize) -> Result<f64> {
        let n = self.n_players;
        if n != dist.n_effective() {
            return Err(Error::PlayerMismatch {
                expected: dist.n_effective(),
                found: n,
            });
        }
        if n > MAX_EXPECTATION_PLAYERS {
            return Err(Error::SizeLimit {
                what: "statistic expectation",
                n_players: n,
                limit: MAX_EXPECTATION_PLAYERS,
            });
        }
        self.check_player(i)?;
        self.check_player(j)?;
        if i == j {
            return Err(Error::invalid(format!(
                "statistic needs distinct players, got {i} twice"
            )));
        }
        let (bi, bj) = (1u64 << i, 1u64 << j);
        let k_max = dist.max_size();
        let acc: CompensatedSum = (0..1u64 << n)
            .filter_map(|mask| {
                let k = mask.count_ones() as usize;
                let sign = match (mask & bi != 0, mask & bj != 0) {
                    (true, false) => 1.0,
                    (false, true) => -1.0,
                    _ => return None,
                };
                if k == 0 || k > k_max {
                    return None;
                }
                Some(sign * dist.q(k) * self.value(mask) / binomial(n, k) as f64)
            })
            .collect();
        Ok(acc.value())
    }
}

/// Exact Shapley values by subset enumeration (`N ≤ 20`).
pub fn exact_shapley(u: &UtilitySpec) -> Result<ShapleyVector> {
    Ok(ValueTable::build(u, None)?.shapley())
}

/// [`exact_shapley`] with evaluations routed through `cache`.
pub fn exact_shapley_cached(u: &UtilitySpec, cache: &EvalCache) -> Result<ShapleyVector> {
    Ok(ValueTable::build(u, Some(cache))?.shapley())
}

/// Exact Shapley values as the mean marginal contribution over all `N!`
/// orderings (`N ≤ 9`).
pub fn exact_shapley_by_permutations(u: &UtilitySpec) -> Result<ShapleyVector> {
    let table = ValueTable::build_limited(u, None, MAX_PERMUTATION_PLAYERS, "permutation enumeration")?;
    let n = table.n_players();
    let mut sums = vec![CompensatedSum::default(); n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut visit = |order: &[usize]| {
        let mut prefix = 0u64;
        let mut prev = table.value(0);
        for &p in order {
            prefix |= 1 << p;
            let cur = table.value(prefix);
            sums[p].add(cur - prev);
            prev = cur;
        }
    };
    // Heap's algorithm, iterative form
    let mut c = vec![0usize; n];
    let mut count: u64 = 1;
    visit(&order);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            visit(&order);
            count += 1;
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    debug_assert_eq!(count, (1..=n as u64).product::<u64>());
    Ok(ShapleyVector::new(
        sums.iter().map(|s| s.value() / count as f64).collect(),
    ))
}

/// Exact `φ_i - φ_j` via the pairwise-difference sum.
pub fn exact_pair_difference(u: &UtilitySpec, i: usize, j: usize) -> Result<f64> {
    if u.n_players() < 2 {
        return Err(Error::invalid("pair difference needs at least 2 players"));
    }
    ValueTable::build(u, None)?.pair_difference(i, j)
}

/// Exact `E[(β_i - β_j) U(S)]` under `dist`; `u` must have
/// `dist.n_effective()` players (the augmented game for the dummy variant).
/// `Z` times the result is `φ_i - φ_j`.
pub fn exact_statistic_expectation(dist: &SamplingDistribution, u: &UtilitySpec, i: usize, j: usize) -> Result<f64> {
    let table = ValueTable::build_limited(u, None, MAX_EXPECTATION_PLAYERS, "statistic expectation")?;
    table.statistic_expectation(dist, i, j)
}
