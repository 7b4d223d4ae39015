//! Synthetic cooperative games used as ground truth.
//!
//! Every game maps into `[0, 1]`. Families with a closed-form Shapley value
//! record it as `known_shapley`; the rest rely on the exact oracle.
//!
//! # Game files
//!
//! A game file is flat `key=value` text, one pair per line. Blank lines and
//! lines starting with `#` are ignored. Lists are comma-separated.
//!
//! ```text
//! # two left gloves, one right glove
//! family=glove
//! left=0,1
//! right=2
//! ```
//!
//! | family           | keys                          |
//! |------------------|-------------------------------|
//! | `additive`       | `weights`                     |
//! | `threshold`      | `n_players`, `quota`          |
//! | `glove`          | `left`, `right`               |
//! | `unanimity`      | `n_players`, `carrier`        |
//! | `random_bounded` | `n_players`, `seed`           |
//!
//! `label` is accepted by every family.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Coalition, UtilitySpec, MAX_EXACT_PLAYERS, MAX_PLAYERS};

/// Parameters of one synthetic game.
#[derive(Clone, Debug, PartialEq)]
pub enum GameFamilyConfig {
    Additive { weights: Vec<f64> },
    Threshold { n_players: usize, quota: usize },
    Glove { left: Vec<usize>, right: Vec<usize> },
    Unanimity { n_players: usize, carrier: Vec<usize> },
    RandomBounded { n_players: usize, seed: u64 },
}

impl GameFamilyConfig {
    pub fn family_name(&self) -> &'static str {
        match self {
            GameFamilyConfig::Additive { .. } => "additive",
            GameFamilyConfig::Threshold { .. } => "threshold",
            GameFamilyConfig::Glove { .. } => "glove",
            GameFamilyConfig::Unanimity { .. } => "unanimity",
            GameFamilyConfig::RandomBounded { .. } => "random_bounded",
        }
    }

    pub fn n_players(&self) -> usize {
        match self {
            GameFamilyConfig::Additive { weights } => weights.len(),
            GameFamilyConfig::Threshold { n_players, .. }
            | GameFamilyConfig::Unanimity { n_players, .. }
            | GameFamilyConfig::RandomBounded { n_players, .. } => *n_players,
            GameFamilyConfig::Glove { left, right } => left.len() + right.len(),
        }
    }

    /// Validates the parameters and builds the game.
    pub fn build(&self) -> Result<UtilitySpec> {
        match self {
            GameFamilyConfig::Additive { weights } => make_additive_game(weights),
            GameFamilyConfig::Threshold { n_players, quota } => make_threshold_game(*n_players, *quota),
            GameFamilyConfig::Glove { left, right } => make_glove_game(left, right),
            GameFamilyConfig::Unanimity { n_players, carrier } => make_unanimity_game(*n_players, carrier),
            GameFamilyConfig::RandomBounded { n_players, seed } => make_random_bounded_game(*n_players, *seed),
        }
    }

    /// Parses the `key=value` game schema described in the module docs.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let kv = parse_key_values(text)?;
        let family = kv.get("family").ok_or("missing key `family`")?;
        let usize_key = |key: &str| -> std::result::Result<usize, String> {
            let v = kv.get(key).ok_or(format!("missing key `{key}`"))?;
            v.parse().map_err(|e| format!("`{key}`: {e}"))
        };
        let list_key = |key: &str| -> std::result::Result<Vec<usize>, String> {
            let v = kv.get(key).ok_or(format!("missing key `{key}`"))?;
            parse_list(v).map_err(|e| format!("`{key}`: {e}"))
        };
        let allowed: &[&str] = match family.as_str() {
            "additive" => &["weights"],
            "threshold" => &["n_players", "quota"],
            "glove" => &["left", "right", "n_players"],
            "unanimity" => &["n_players", "carrier"],
            "random_bounded" => &["n_players", "seed"],
            other => return Err(format!("unknown family `{other}`")),
        };
        for key in kv.keys() {
            if key != "family" && key != "label" && !allowed.contains(&key.as_str()) {
                return Err(format!("unexpected key `{key}` for family `{family}`"));
            }
        }
        let config = match family.as_str() {
            "additive" => {
                let v = kv.get("weights").ok_or("missing key `weights`")?;
                GameFamilyConfig::Additive {
                    weights: parse_list(v).map_err(|e| format!("`weights`: {e}"))?,
                }
            }
            "threshold" => GameFamilyConfig::Threshold {
                n_players: usize_key("n_players")?,
                quota: usize_key("quota")?,
            },
            "glove" => {
                let config = GameFamilyConfig::Glove {
                    left: list_key("left")?,
                    right: list_key("right")?,
                };
                if kv.contains_key("n_players") && usize_key("n_players")? != config.n_players() {
                    return Err("`n_players` disagrees with left/right".into());
                }
                config
            }
            "unanimity" => GameFamilyConfig::Unanimity {
                n_players: usize_key("n_players")?,
                carrier: list_key("carrier")?,
            },
            "random_bounded" => {
                let seed = kv.get("seed").ok_or("missing key `seed`")?;
                GameFamilyConfig::RandomBounded {
                    n_players: usize_key("n_players")?,
                    seed: seed.parse().map_err(|e| format!("`seed`: {e}"))?,
                }
            }
            _ => unreachable!(),
        };
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|message| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message,
        })
    }
}

impl fmt::Display for GameFamilyConfig {
    /// Serializes to the game-file schema.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join<T: fmt::Display>(xs: &[T]) -> String {
            xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        writeln!(f, "family={}", self.family_name())?;
        match self {
            GameFamilyConfig::Additive { weights } => writeln!(f, "weights={}", join(weights)),
            GameFamilyConfig::Threshold { n_players, quota } => {
                writeln!(f, "n_players={n_players}")?;
                writeln!(f, "quota={quota}")
            }
            GameFamilyConfig::Glove { left, right } => {
                writeln!(f, "left={}", join(left))?;
                writeln!(f, "right={}", join(right))
            }
            GameFamilyConfig::Unanimity { n_players, carrier } => {
                writeln!(f, "n_players={n_players}")?;
                writeln!(f, "carrier={}", join(carrier))
            }
            GameFamilyConfig::RandomBounded { n_players, seed } => {
                writeln!(f, "n_players={n_players}")?;
                writeln!(f, "seed={seed}")
            }
        }
    }
}

/// Parses `key=value` lines, skipping blanks and `#` comments.
pub fn parse_key_values(text: &str) -> std::result::Result<BTreeMap<String, String>, String> {
    let mut kv = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(format!("line {}: expected key=value", lineno + 1))?;
        let key = key.trim().to_string();
        if kv.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate key `{key}`", lineno + 1));
        }
    }
    Ok(kv)
}

fn parse_list<T: std::str::FromStr>(v: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|e| format!("{x:?}: {e}")))
        .collect()
}

fn check_players(players: &[usize], n_players: usize, what: &str) -> Result<()> {
    let mut seen = vec![false; n_players];
    for &p in players {
        if p >= n_players {
            return Err(Error::IndexOutOfRange { index: p, n_players });
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::invalid(format!("{what} lists player {p} twice")));
        }
    }
    Ok(())
}

/// `U(S) = Σ_{i∈S} w_i`.
pub fn make_additive_game(weights: &[f64]) -> Result<UtilitySpec> {
    if weights.is_empty() || weights.len() > MAX_PLAYERS {
        return Err(Error::invalid(format!("additive game needs 1..={MAX_PLAYERS} weights")));
    }
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !w.is_finite() || **w < 0.0) {
        return Err(Error::invalid(format!("weight {i} is {w}, must be nonnegative")));
    }
    let total: f64 = weights.iter().sum();
    if total > 1.0 + 1e-12 {
        return Err(Error::invalid(format!("weights sum to {total}, must be at most 1")));
    }
    let w = weights.to_vec();
    let n = w.len();
    Ok(UtilitySpec::new(n, "additive", move |s: &Coalition| {
        s.indices().map(|i| w[i]).sum::<f64>().min(1.0)
    })
    .with_known_shapley(weights.to_vec()))
}

/// `U(S) = 1` if `|S| >= quota`, else 0.
pub fn make_threshold_game(n_players: usize, quota: usize) -> Result<UtilitySpec> {
    if n_players == 0 || n_players > MAX_PLAYERS {
        return Err(Error::invalid(format!(
            "threshold game needs 1..={MAX_PLAYERS} players"
        )));
    }
    if quota < 1 || quota > n_players {
        return Err(Error::invalid(format!("quota {quota} outside 1..={n_players}")));
    }
    let share = 1.0 / n_players as f64;
    Ok(UtilitySpec::new(
        n_players,
        format!("threshold({n_players},{quota})"),
        move |s: &Coalition| {
            if s.len() >= quota {
                1.0
            } else {
                0.0
            }
        },
    )
    .with_known_shapley(vec![share; n_players]))
}

/// `U(S) = min(|S∩L|, |S∩R|) / min(|L|, |R|)`.
pub fn make_glove_game(left: &[usize], right: &[usize]) -> Result<UtilitySpec> {
    if left.is_empty() || right.is_empty() {
        return Err(Error::invalid("glove game needs both sides nonempty"));
    }
    let n = left.len() + right.len();
    if n > MAX_PLAYERS {
        return Err(Error::SizeLimit {
            what: "glove game",
            n_players: n,
            limit: MAX_PLAYERS,
        });
    }
    check_players(left, n, "left")?;
    check_players(right, n, "right")?;
    if let Some(p) = left.iter().find(|p| right.contains(p)) {
        return Err(Error::invalid(format!("player {p} is on both sides")));
    }
    let is_left: Vec<bool> = (0..n).map(|i| left.contains(&i)).collect();
    let scale = left.len().min(right.len()) as f64;
    Ok(UtilitySpec::new(
        n,
        format!("glove({}/{})", left.len(), right.len()),
        move |s: &Coalition| {
            let l = s.indices().filter(|&i| is_left[i]).count();
            let r = s.len() - l;
            l.min(r) as f64 / scale
        },
    ))
}

/// `U(S) = 1` if `carrier ⊆ S`, else 0.
pub fn make_unanimity_game(n_players: usize, carrier: &[usize]) -> Result<UtilitySpec> {
    if n_players == 0 || n_players > MAX_PLAYERS {
        return Err(Error::invalid(format!(
            "unanimity game needs 1..={MAX_PLAYERS} players"
        )));
    }
    if carrier.is_empty() {
        return Err(Error::invalid("unanimity carrier must be nonempty"));
    }
    check_players(carrier, n_players, "carrier")?;
    let required = Coalition::from_indices(carrier.iter().copied(), n_players)?;
    let share = 1.0 / carrier.len() as f64;
    let phi = (0..n_players)
        .map(|i| if required.contains(i) { share } else { 0.0 })
        .collect();
    let members: Vec<usize> = required.indices().collect();
    Ok(UtilitySpec::new(
        n_players,
        format!("unanimity({n_players},|C|={})", carrier.len()),
        move |s: &Coalition| {
            if members.iter().all(|&i| s.contains(i)) {
                1.0
            } else {
                0.0
            }
        },
    )
    .with_known_shapley(phi))
}

/// Independent uniform `[0, 1)` values for every subset, drawn in mask order
/// from `ChaCha8Rng::seed_from_u64(seed)`.
pub fn make_random_bounded_game(n_players: usize, seed: u64) -> Result<UtilitySpec> {
    if n_players == 0 || n_players > MAX_EXACT_PLAYERS {
        return Err(Error::SizeLimit {
            what: "random_bounded game",
            n_players,
            limit: MAX_EXACT_PLAYERS,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table: Vec<f64> = (0..1usize << n_players).map(|_| rng.random::<f64>()).collect();
    UtilitySpec::from_table(n_players, format!("random_bounded({n_players},{seed})"), table)
}

/// A fixed set of games with at most 10 players covering every family.
pub fn fixture_configs() -> Vec<GameFamilyConfig> {
    use GameFamilyConfig::*;
    vec![
        Additive {
            weights: vec![0.1, 0.25, 0.05, 0.3, 0.2],
        },
        Additive {
            weights: vec![0.04, 0.12, 0.08, 0.16, 0.02, 0.1, 0.2, 0.06, 0.14, 0.08],
        },
        Threshold { n_players: 6, quota: 3 },
        Threshold {
            n_players: 10,
            quota: 4,
        },
        Glove {
            left: vec![0, 1],
            right: vec![2],
        },
        Glove {
            left: vec![0, 1, 2],
            right: vec![3, 4, 5],
        },
        Glove {
            left: vec![0, 2, 4, 6],
            right: vec![1, 3, 5, 7],
        },
        Glove {
            left: vec![0, 1, 2, 3, 4, 5],
            right: vec![6, 7, 8],
        },
        Unanimity {
            n_players: 7,
            carrier: vec![1, 3, 4],
        },
        Unanimity {
            n_players: 10,
            carrier: vec![0, 9],
        },
        RandomBounded { n_players: 4, seed: 11 },
        RandomBounded { n_players: 8, seed: 7 },
        RandomBounded { n_players: 10, seed: 3 },
    ]
}

/// Materializes the full value table of `u` in mask order.
pub fn tabulate(u: &UtilitySpec) -> Result<Vec<f64>> {
    let n = u.n_players();
    if n > MAX_EXACT_PLAYERS {
        return Err(Error::SizeLimit {
            what: "tabulation",
            n_players: n,
            limit: MAX_EXACT_PLAYERS,
        });
    }
    (0..1u64 << n)
        .map(|mask| u.checked_evaluate(&Coalition::from_mask(mask, n)))
        .collect()
}

/// `a·U₁ + b·U₂` as a tabulated game. The result must stay within `[0, 1]`.
pub fn linear_combination(a: f64, u1: &UtilitySpec, b: f64, u2: &UtilitySpec) -> Result<UtilitySpec> {
    if u1.n_players() != u2.n_players() {
        return Err(Error::PlayerMismatch {
            expected: u1.n_players(),
            found: u2.n_players(),
        });
    }
    let t1 = tabulate(u1)?;
    let t2 = tabulate(u2)?;
    let table: Vec<f64> = t1.iter().zip(&t2).map(|(x, y)| a * x + b * y).collect();
    let n = u1.n_players();
    if let Some((mask, v)) = table.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
        return Err(Error::UtilityOutOfRange {
            coalition: Coalition::from_mask(mask as u64, n).to_string(),
            value: *v,
        });
    }
    UtilitySpec::from_table(n, format!("{a}*{}+{b}*{}", u1.label(), u2.label()), table)
}
