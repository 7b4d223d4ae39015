//! Sample sizes that guarantee an `(ε, δ)`-approximation in `ℓ₂`.
//!
//! Group testing (Bennett's inequality on `ζ = (β_i - β_j) U(S)` with `b = 1`,
//! `ν = T (1 - q_tot)`):
//!
//! ```text
//! original:  T ≥ log(N(N-1)/δ) / ((1-q_tot) h(ε / (2 Z √N (1-q_tot))))
//! improved:  T ≥ log(N/δ)      / ((1-q_tot) h(ε / (Z √(N+1) (1-q_tot))))
//! ```
//!
//! with `h(u) = (1+u) log(1+u) - u` and `Z`, `q_tot` taken from the matching
//! [`SamplingDistribution`].
//!
//! Permutation sampling (Hoeffding): each marginal contribution lies in
//! `[-1, 1]`, so `m` permutations estimate one `φ_i` within `ε/√N` with failure
//! probability `2 exp(-m ε² / (2N))`. A union bound over the `N` players gives
//!
//! ```text
//! m ≥ (2N/ε²) log(2N/δ)
//! ```
//!
//! and each permutation is costed at `N + 1` utility evaluations.

use std::fmt;

use crate::error::{Error, Result};
use crate::sampling::{SamplingDistribution, Variant};

/// Series cut-over for [`bennett_h`].
const H_SERIES_BELOW: f64 = 1e-4;

/// `h(u) = (1+u) log(1+u) - u` for `u ≥ 0`.
pub fn bennett_h(u: f64) -> Result<f64> {
    if u.is_nan() || u < 0.0 {
        return Err(Error::invalid(format!("h(u) needs u >= 0, got {u}")));
    }
    if u < H_SERIES_BELOW {
        return Ok(u * u / 2.0 - u * u * u / 6.0);
    }
    Ok((1.0 + u) * u.ln_1p() - u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundVariant {
    GtOriginal,
    GtImproved,
    Permutation,
}

impl BoundVariant {
    /// Command-line spelling: `gt`, `gt-improved`, `perm`.
    pub fn name(self) -> &'static str {
        match self {
            BoundVariant::GtOriginal => "gt",
            BoundVariant::GtImproved => "gt-improved",
            BoundVariant::Permutation => "perm",
        }
    }
}

impl fmt::Display for BoundVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BoundVariant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gt" | "gt-original" => Ok(BoundVariant::GtOriginal),
            "gt-improved" | "improved" => Ok(BoundVariant::GtImproved),
            "perm" | "permutation" => Ok(BoundVariant::Permutation),
            other => Err(format!("unknown variant `{other}` (expected gt|gt-improved|perm)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundQuery {
    pub n_players: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub variant: BoundVariant,
}

impl BoundQuery {
    pub fn new(n_players: usize, epsilon: f64, delta: f64, variant: BoundVariant) -> Self {
        BoundQuery {
            n_players,
            epsilon,
            delta,
            variant,
        }
    }

    fn validate(&self) -> Result<()> {
        let min_players = match self.variant {
            BoundVariant::GtImproved | BoundVariant::Permutation => 1,
            BoundVariant::GtOriginal => 2,
        };
        if self.n_players < min_players {
            return Err(Error::invalid(format!(
                "{} bound needs at least {min_players} players, got {}",
                self.variant, self.n_players
            )));
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::invalid(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundResult {
    /// Samples: coalitions for group testing, permutations for permutation sampling.
    pub t: u64,
    /// Utility evaluations implied by `t`.
    pub utility_evals: u64,
    /// Harmonic normalizer (`NaN` for permutation sampling).
    pub z: f64,
    /// Ineffective-sample probability (`NaN` for permutation sampling).
    pub q_tot: f64,
    /// Argument passed to `h` (`NaN` for permutation sampling).
    pub h_argument: f64,
    /// Real-valued bound before the ceiling.
    pub raw_bound: f64,
}

fn ceil_count(raw: f64) -> Result<u64> {
    if !raw.is_finite() || raw > u64::MAX as f64 {
        return Err(Error::invalid(format!("sample bound {raw} is not representable")));
    }
    Ok((raw.ceil() as u64).max(1))
}

/// Group-testing sample size for `query.variant ∈ {GtOriginal, GtImproved}`.
pub fn required_t(query: &BoundQuery) -> Result<BoundResult> {
    query.validate()?;
    let n = query.n_players as f64;
    let (dist, log_term, denom_scale) = match query.variant {
        BoundVariant::GtOriginal => (
            SamplingDistribution::new(query.n_players, Variant::Original)?,
            (n * (n - 1.0) / query.delta).ln(),
            2.0 * n.sqrt(),
        ),
        BoundVariant::GtImproved => (
            SamplingDistribution::new(query.n_players, Variant::Augmented)?,
            (n / query.delta).ln(),
            (n + 1.0).sqrt(),
        ),
        BoundVariant::Permutation => {
            return Err(Error::invalid("use required_permutations for permutation sampling"));
        }
    };
    let z = dist.z();
    let q_tot = dist.q_tot();
    let effective = 1.0 - q_tot;
    debug_assert!((z * effective - 2.0).abs() < 1e-9, "Z(1 - q_tot) = {}", z * effective);
    let h_argument = query.epsilon / (denom_scale * z * effective);
    let raw_bound = log_term / (effective * bennett_h(h_argument)?);
    let t = ceil_count(raw_bound)?;
    Ok(BoundResult {
        t,
        utility_evals: t,
        z,
        q_tot,
        h_argument,
        raw_bound,
    })
}

/// Hoeffding permutation count `⌈(2N/ε²) log(2N/δ)⌉`.
pub fn required_permutations(query: &BoundQuery) -> Result<BoundResult> {
    query.validate()?;
    if query.variant != BoundVariant::Permutation {
        return Err(Error::invalid("use required_t for group-testing variants"));
    }
    let n = query.n_players as f64;
    let raw_bound = 2.0 * n / (query.epsilon * query.epsilon) * (2.0 * n / query.delta).ln();
    let t = ceil_count(raw_bound)?;
    Ok(BoundResult {
        t,
        utility_evals: t.saturating_mul(query.n_players as u64 + 1),
        z: f64::NAN,
        q_tot: f64::NAN,
        h_argument: f64::NAN,
        raw_bound,
    })
}

/// Dispatches on `query.variant`.
pub fn required_samples(query: &BoundQuery) -> Result<BoundResult> {
    match query.variant {
        BoundVariant::Permutation => required_permutations(query),
        _ => required_t(query),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: usize, eps: f64, delta: f64, v: BoundVariant) -> BoundQuery {
        BoundQuery::new(n, eps, delta, v)
    }

    #[test]
    fn h_values() {
        assert_eq!(bennett_h(0.0).unwrap(), 0.0);
        assert!((bennett_h(1.0).unwrap() - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15);
        assert!((bennett_h(1.0).unwrap() - 0.386_294_4).abs() < 1e-7);
        let ratio = bennett_h(1e-6).unwrap() / 0.5e-12;
        assert!((0.999..=1.001).contains(&ratio));
        assert!(bennett_h(-1e-3).is_err());
        assert!(bennett_h(f64::NAN).is_err());
    }

    #[test]
    fn h_is_continuous_at_cutover() {
        let below = bennett_h(H_SERIES_BELOW * (1.0 - 1e-12)).unwrap();
        let above = bennett_h(H_SERIES_BELOW).unwrap();
        assert!((below - above).abs() / above < 1e-8);
    }

    #[test]
    fn rejects_invalid_queries() {
        assert!(required_t(&q(1, 0.1, 0.1, BoundVariant::GtOriginal)).is_err());
        assert!(required_t(&q(5, 0.0, 0.1, BoundVariant::GtOriginal)).is_err());
        assert!(required_t(&q(5, 0.1, 1.0, BoundVariant::GtImproved)).is_err());
        assert!(required_t(&q(5, 0.1, 0.0, BoundVariant::GtImproved)).is_err());
        assert!(required_t(&q(5, 0.1, 0.1, BoundVariant::Permutation)).is_err());
        assert!(required_permutations(&q(5, 0.1, 0.1, BoundVariant::GtOriginal)).is_err());
    }

    #[test]
    fn monotone_in_epsilon_and_delta() {
        for v in [
            BoundVariant::GtOriginal,
            BoundVariant::GtImproved,
            BoundVariant::Permutation,
        ] {
            for n in [5, 10, 50] {
                let base = required_samples(&q(n, 0.3, 0.05, v)).unwrap().t;
                assert!(required_samples(&q(n, 0.15, 0.05, v)).unwrap().t > base);
                assert!(required_samples(&q(n, 0.3, 0.005, v)).unwrap().t > base);
            }
        }
    }

    #[test]
    fn result_fields_are_consistent() {
        let r = required_t(&q(10, 0.5, 0.1, BoundVariant::GtOriginal)).unwrap();
        assert_eq!(r.t, r.raw_bound.ceil() as u64);
        assert!((r.z * (1.0 - r.q_tot) - 2.0).abs() < 1e-12);
        let p = required_permutations(&q(10, 0.5, 0.1, BoundVariant::Permutation)).unwrap();
        assert_eq!(p.utility_evals, p.t * 11);
    }
}
