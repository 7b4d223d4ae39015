//! The size-biased coalition distribution of the group-testing estimators.
//!
//! A coalition is drawn in two steps: a size `k ∈ {1..K}` with probability
//! `q_k ∝ 1/k + 1/(K+1-k)`, then a uniform size-`k` subset of the
//! `n_effective` players.
//!
//! | variant     | players       | `K`   | `Z`              |
//! |-------------|---------------|-------|------------------|
//! | `Original`  | `N`           | `N-1` | `2 Σ_{k<N} 1/k`  |
//! | `Augmented` | `N+1` (dummy) | `N`   | `2 Σ_{k≤N} 1/k`  |
//!
//! # Random streams
//!
//! All randomness comes from ChaCha8 (`rand_chacha`). [`stream_rng`] keys the
//! generator with `seed_from_u64(seed)` and selects the 64-bit ChaCha stream
//! `stream`, so draw `t` of a run seeded with `seed` always comes from
//! `stream_rng(seed, t)` regardless of execution order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Coalition;

/// Which group-testing estimator a distribution belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// All-pairs estimator over the `N` original players.
    Original,
    /// Dummy-pivot estimator over `N + 1` players.
    Augmented,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Original => "original",
            Variant::Augmented => "augmented",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "original" | "gt" => Ok(Variant::Original),
            "augmented" | "improved" | "gt-improved" => Ok(Variant::Augmented),
            other => Err(format!("unknown variant `{other}` (expected original|augmented)")),
        }
    }
}

/// The `(Z, q_1..q_K)` size distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingDistribution {
    variant: Variant,
    n_players: usize,
    n_effective: usize,
    z: f64,
    q: Vec<f64>,
    cumulative: Vec<f64>,
}

impl SamplingDistribution {
    /// `n_players` is the original player count `N` for both variants.
    pub fn new(n_players: usize, variant: Variant) -> Result<Self> {
        let n_effective = match variant {
            Variant::Original => {
                if n_players < 2 {
                    return Err(Error::invalid(format!(
                        "group testing needs at least 2 players, got {n_players}"
                    )));
                }
                n_players
            }
            Variant::Augmented => {
                if n_players < 1 {
                    return Err(Error::invalid("augmented distribution needs at least 1 player"));
                }
                n_players + 1
            }
        };
        let k_max = n_effective - 1;
        let z = 2.0 * (1..=k_max).map(|k| 1.0 / k as f64).sum::<f64>();
        let q: Vec<f64> = (1..=k_max)
            .map(|k| (1.0 / k as f64 + 1.0 / (n_effective - k) as f64) / z)
            .collect();
        let cumulative = q
            .iter()
            .scan(0.0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Ok(SamplingDistribution {
            variant,
            n_players,
            n_effective,
            z,
            q,
            cumulative,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Original player count `N`.
    pub fn n_players(&self) -> usize {
        self.n_players
    }

    /// Players coalitions are drawn from: `N`, or `N + 1` with the dummy.
    pub fn n_effective(&self) -> usize {
        self.n_effective
    }

    /// Largest coalition size `K`.
    pub fn max_size(&self) -> usize {
        self.q.len()
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// `q_k`, for `k` in `1..=K`.
    pub fn q(&self, k: usize) -> f64 {
        assert!((1..=self.q.len()).contains(&k), "size {k} outside 1..={}", self.q.len());
        self.q[k - 1]
    }

    /// `q_1..q_K` as a slice (index `k - 1`).
    pub fn weights(&self) -> &[f64] {
        &self.q
    }

    /// Probability that a draw contains both or neither of two fixed players,
    /// from the closed-form sum over sizes.
    pub fn q_tot(&self) -> f64 {
        let n = self.n_players as f64;
        match self.variant {
            Variant::Original => {
                // (N-2)/N q_1 + Σ_{k=2}^{N-1} q_k (1 + 2k(k-N)/(N(N-1)))
                let head = (n - 2.0) / n * self.q(1);
                let tail: f64 = (2..=self.max_size())
                    .map(|k| {
                        let k = k as f64;
                        self.q[k as usize - 1] * (1.0 + 2.0 * k * (k - n) / (n * (n - 1.0)))
                    })
                    .sum();
                head + tail
            }
            Variant::Augmented => {
                // (N-1)/(N+1) q_1 + Σ_{k=2}^{N} q_k (1 + 2k(k-N-1)/(N(N+1)))
                let head = (n - 1.0) / (n + 1.0) * self.q(1);
                let tail: f64 = (2..=self.max_size())
                    .map(|k| {
                        let k = k as f64;
                        self.q[k as usize - 1] * (1.0 + 2.0 * k * (k - n - 1.0) / (n * (n + 1.0)))
                    })
                    .sum();
                head + tail
            }
        }
    }

    /// Draws a size from `q` by inverse CDF.
    pub fn draw_size<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("nonempty distribution");
        let x = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= x);
        idx.min(self.q.len() - 1) + 1
    }
}

/// `build_distribution` from the operation list.
pub fn build_distribution(n_players: usize, variant: Variant) -> Result<SamplingDistribution> {
    SamplingDistribution::new(n_players, variant)
}

/// `q_tot` from the operation list; see [`SamplingDistribution::q_tot`].
pub fn q_tot(dist: &SamplingDistribution) -> f64 {
    dist.q_tot()
}

/// Draws coalitions from a [`SamplingDistribution`].
///
/// Holds a player-index buffer for partial Fisher-Yates shuffles. The buffer is
/// restored after every draw, so a draw depends only on the generator state.
#[derive(Clone, Debug)]
pub struct CoalitionSampler<'a> {
    dist: &'a SamplingDistribution,
    players: Vec<usize>,
    swaps: Vec<usize>,
}

impl<'a> CoalitionSampler<'a> {
    pub fn new(dist: &'a SamplingDistribution) -> Self {
        CoalitionSampler {
            dist,
            players: (0..dist.n_effective()).collect(),
            swaps: Vec::with_capacity(dist.n_effective()),
        }
    }

    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Coalition {
        let k = self.dist.draw_size(rng);
        let n = self.players.len();
        let mut s = Coalition::empty(n);
        self.swaps.clear();
        for pos in 0..k {
            let j = rng.random_range(pos..n);
            self.players.swap(pos, j);
            self.swaps.push(j);
            s.insert(self.players[pos]);
        }
        for (pos, &j) in self.swaps.iter().enumerate().rev() {
            self.players.swap(pos, j);
        }
        s
    }
}

/// `draw_coalition` from the operation list: a single draw with a fresh buffer.
pub fn draw_coalition<R: Rng + ?Sized>(dist: &SamplingDistribution, rng: &mut R) -> Coalition {
    CoalitionSampler::new(dist).draw(rng)
}

/// ChaCha8 generator keyed by `seed`, positioned on stream `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Per-trial seed: `splitmix64(master ^ splitmix64(index))`.
pub fn mix_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_distributions() {
        let d = build_distribution(3, Variant::Original).unwrap();
        assert_eq!(d.z(), 3.0);
        assert_eq!(d.weights(), &[0.5, 0.5]);
        assert_eq!(d.n_effective(), 3);

        let d = build_distribution(2, Variant::Original).unwrap();
        assert_eq!(d.z(), 2.0);
        assert_eq!(d.weights(), &[1.0]);

        let d = build_distribution(2, Variant::Augmented).unwrap();
        assert_eq!(d.z(), 3.0);
        assert_eq!(d.weights(), &[0.5, 0.5]);
        assert_eq!(d.n_effective(), 3);
        assert_eq!(d.max_size(), 2);

        assert!(build_distribution(1, Variant::Original).is_err());
        assert!(build_distribution(1, Variant::Augmented).is_ok());
    }

    #[test]
    fn q_tot_small_case() {
        let d = build_distribution(3, Variant::Original).unwrap();
        assert!((d.q_tot() - 1.0 / 3.0).abs() < 1e-15);
        assert!((d.q_tot() - (1.0 - 2.0 / d.z())).abs() < 1e-15);
    }

    #[test]
    fn distribution_invariants() {
        for n in 2..=500 {
            for variant in [Variant::Original, Variant::Augmented] {
                let d = build_distribution(n, variant).unwrap();
                let k = d.max_size();
                assert!(d.weights().iter().all(|&q| q >= 0.0));
                assert!((d.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
                for i in 1..=k {
                    assert_eq!(d.q(i), d.q(k + 1 - i));
                }
                assert!((d.q_tot() - (1.0 - 2.0 / d.z())).abs() < 1e-12, "n={n} {variant:?}");
            }
            let d = build_distribution(n, Variant::Original).unwrap();
            assert!(d.z() <= 2.0 * (((n - 1) as f64).ln() + 1.0) + 1e-12);
        }
    }

    #[test]
    fn draws_have_support_sizes() {
        let d = build_distribution(7, Variant::Augmented).unwrap();
        let mut sampler = CoalitionSampler::new(&d);
        let mut rng = stream_rng(1, 0);
        for _ in 0..2000 {
            let s = sampler.draw(&mut rng);
            assert_eq!(s.n_players(), 8);
            assert!((1..=7).contains(&s.len()));
        }
    }

    #[test]
    fn identical_streams_draw_identically() {
        let d = build_distribution(12, Variant::Original).unwrap();
        let draws = |seed| {
            let mut sampler = CoalitionSampler::new(&d);
            (0..50u64)
                .map(|t| sampler.draw(&mut stream_rng(seed, t)))
                .collect::<Vec<_>>()
        };
        assert_eq!(draws(5), draws(5));
        assert_ne!(draws(5), draws(6));
        // a fresh sampler per draw gives the same result as a reused one
        let fresh: Vec<_> = (0..50u64).map(|t| draw_coalition(&d, &mut stream_rng(5, t))).collect();
        assert_eq!(fresh, draws(5));
    }

    #[test]
    fn seed_mixing_spreads_indices() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|t| mix_seed(42, t)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(mix_seed(42, 3), mix_seed(42, 3));
    }
}
