//! Games shared by the benchmarks.

use shapley_core::games::{make_additive_game, make_glove_game, make_random_bounded_game};
use shapley_core::UtilitySpec;

/// Glove game with `n / 2` left and `n - n / 2` right gloves.
pub fn glove(n: usize) -> UtilitySpec {
    let left: Vec<usize> = (0..n / 2).collect();
    let right: Vec<usize> = (n / 2..n).collect();
    make_glove_game(&left, &right).expect("valid glove game")
}

/// Additive game with weights `1..=n` scaled to sum to one.
pub fn additive(n: usize) -> UtilitySpec {
    let total = (n * (n + 1) / 2) as f64;
    let weights: Vec<f64> = (1..=n).map(|k| k as f64 / total).collect();
    make_additive_game(&weights).expect("valid additive game")
}

/// Tabulated random game, `n ≤ 20`.
pub fn random(n: usize) -> UtilitySpec {
    make_random_bounded_game(n, 1).expect("valid random game")
}
