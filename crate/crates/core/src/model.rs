//! Players, coalitions, bounded utility functions and the evaluation cache.
//!
//! Players are 0-based. A [`Coalition`] is a fixed-width bit vector where bit
//! `i` is set iff player `i` belongs to it; the width is the game's player
//! count. Utilities are required to lie in `[0, 1]`; values outside that range
//! are reported as errors rather than clamped.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::numfmt;

/// Largest player count a [`Coalition`] accepts.
pub const MAX_PLAYERS: usize = 1024;

/// Largest player count accepted by the subset-enumeration oracles.
pub const MAX_EXACT_PLAYERS: usize = 20;

const WORD_BITS: usize = 64;

/// A subset of `{0, .., n_players - 1}` stored as a bit vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coalition {
    words: SmallVec<[u64; 2]>,
    n_players: usize,
}

impl Coalition {
    pub fn empty(n_players: usize) -> Self {
        assert!(
            n_players <= MAX_PLAYERS,
            "coalition width {n_players} exceeds {MAX_PLAYERS}"
        );
        let n_words = n_players.div_ceil(WORD_BITS).max(1);
        Coalition {
            words: SmallVec::from_elem(0, n_words),
            n_players,
        }
    }

    pub fn full(n_players: usize) -> Self {
        let mut s = Self::empty(n_players);
        for i in 0..n_players {
            s.insert(i);
        }
        s
    }

    /// Builds the coalition containing exactly `indices`.
    pub fn from_indices<I>(indices: I, n_players: usize) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        if n_players > MAX_PLAYERS {
            return Err(Error::SizeLimit {
                what: "coalition",
                n_players,
                limit: MAX_PLAYERS,
            });
        }
        let mut s = Self::empty(n_players);
        for index in indices {
            if index >= n_players {
                return Err(Error::IndexOutOfRange { index, n_players });
            }
            s.insert(index);
        }
        Ok(s)
    }

    /// Builds a coalition from the low `n_players` bits of `mask`.
    ///
    /// Panics if `n_players > 64` or `mask` has bits at or above `n_players`.
    pub fn from_mask(mask: u64, n_players: usize) -> Self {
        assert!(n_players <= WORD_BITS);
        assert!(
            n_players == WORD_BITS || mask >> n_players == 0,
            "mask {mask:#x} wider than {n_players} players"
        );
        let mut s = Self::empty(n_players);
        s.words[0] = mask;
        s
    }

    /// The coalition as an integer mask, when it fits in 64 bits.
    pub fn to_mask(&self) -> Option<u64> {
        (self.n_players <= WORD_BITS).then(|| self.words[0])
    }

    pub fn n_players(&self) -> usize {
        self.n_players
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n_players && self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.n_players, "player {i} out of range");
        self.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.n_players, "player {i} out of range");
        self.words[i / WORD_BITS] &= !(1 << (i % WORD_BITS));
    }

    pub fn with(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.insert(i);
        s
    }

    pub fn without(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.remove(i);
        s
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Member indices in increasing order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * WORD_BITS + b)
            })
        })
    }

    /// Drops the highest player slot. Used to strip an appended dummy player.
    pub fn truncated(&self) -> Coalition {
        assert!(self.n_players > 0);
        let n = self.n_players - 1;
        let mut s = Coalition::empty(n);
        for i in self.indices().filter(|&i| i < n) {
            s.insert(i);
        }
        s
    }

    /// Zero-padded lowercase hexadecimal of the bit vector (bit `i` of the
    /// integer is player `i`). Every coalition of a given width has the same
    /// number of digits, so string order equals numeric order.
    pub fn to_hex(&self) -> String {
        let digits = self.n_players.div_ceil(4).max(1);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let bit = d * 4;
            let word = self.words[bit / WORD_BITS] >> (bit % WORD_BITS);
            let nibble = (word & 0xf) as u32;
            out.push(char::from_digit(nibble, 16).expect("nibble"));
        }
        out
    }

    /// Parses [`Coalition::to_hex`] output. Leading zeros are optional.
    pub fn from_hex(hex: &str, n_players: usize) -> Result<Self> {
        let mut s = Coalition::empty(n_players);
        let hex = hex.trim();
        if hex.is_empty() {
            return Err(Error::invalid("empty coalition hex"));
        }
        for (d, ch) in hex.chars().rev().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::invalid(format!("bad hex digit {ch:?} in {hex:?}")))?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let index = d * 4 + b;
                    if index >= n_players {
                        return Err(Error::IndexOutOfRange { index, n_players });
                    }
                    s.insert(index);
                }
            }
        }
        Ok(s)
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// `coalition_from_indices` from the operation list; see [`Coalition::from_indices`].
pub fn coalition_from_indices<I>(indices: I, n_players: usize) -> Result<Coalition>
where
    I: IntoIterator<Item = usize>,
{
    Coalition::from_indices(indices, n_players)
}

/// Set function evaluated on coalitions.
pub type Evaluator = dyn Fn(&Coalition) -> f64 + Send + Sync;

#[derive(Clone)]
enum Kind {
    Direct(Arc<Evaluator>),
    /// `base` extended by a dummy player in the last slot.
    Augmented(Arc<UtilitySpec>),
}

/// A bounded cooperative game `U: 2^I -> [0, 1]`.
#[derive(Clone)]
pub struct UtilitySpec {
    n_players: usize,
    label: String,
    known_shapley: Option<Vec<f64>>,
    kind: Kind,
}

impl fmt::Debug for UtilitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UtilitySpec")
            .field("n_players", &self.n_players)
            .field("label", &self.label)
            .field("known_shapley", &self.known_shapley)
            .finish_non_exhaustive()
    }
}

impl UtilitySpec {
    pub fn new<F>(n_players: usize, label: impl Into<String>, evaluate: F) -> Self
    where
        F: Fn(&Coalition) -> f64 + Send + Sync + 'static,
    {
        assert!((1..=MAX_PLAYERS).contains(&n_players));
        UtilitySpec {
            n_players,
            label: label.into(),
            known_shapley: None,
            kind: Kind::Direct(Arc::new(evaluate)),
        }
    }

    /// A game given by its full value table, indexed by coalition mask.
    pub fn from_table(n_players: usize, label: impl Into<String>, table: Vec<f64>) -> Result<Self> {
        if n_players > MAX_EXACT_PLAYERS {
            return Err(Error::SizeLimit {
                what: "tabulated game",
                n_players,
                limit: MAX_EXACT_PLAYERS,
            });
        }
        if table.len() != 1 << n_players {
            return Err(Error::invalid(format!(
                "table has {} entries, expected 2^{n_players}",
                table.len()
            )));
        }
        let table: Arc<[f64]> = table.into();
        Ok(UtilitySpec::new(n_players, label, move |s: &Coalition| {
            table[s.to_mask().expect("tabulated game fits in a mask") as usize]
        }))
    }

    pub fn with_known_shapley(mut self, phi: Vec<f64>) -> Self {
        assert_eq!(phi.len(), self.n_players);
        self.known_shapley = Some(phi);
        self
    }

    /// The game with a dummy player appended at index `n_players`:
    /// `U'(S) = U'(S ∪ {*}) = U(S)`.
    pub fn augmented(self: &Arc<Self>) -> UtilitySpec {
        UtilitySpec {
            n_players: self.n_players + 1,
            label: format!("{}+dummy", self.label),
            known_shapley: self.known_shapley.as_ref().map(|phi| {
                let mut phi = phi.clone();
                phi.push(0.0);
                phi
            }),
            kind: Kind::Augmented(Arc::clone(self)),
        }
    }

    pub fn n_players(&self) -> usize {
        self.n_players
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn known_shapley(&self) -> Option<&[f64]> {
        self.known_shapley.as_deref()
    }

    /// Number of dummy players appended by [`UtilitySpec::augmented`].
    pub fn dummy_depth(&self) -> usize {
        match &self.kind {
            Kind::Direct(_) => 0,
            Kind::Augmented(base) => 1 + base.dummy_depth(),
        }
    }

    /// Raw evaluation with no range check.
    pub fn evaluate(&self, s: &Coalition) -> f64 {
        match &self.kind {
            Kind::Direct(f) => f(s),
            Kind::Augmented(base) => base.evaluate(&s.truncated()),
        }
    }

    /// Evaluates `U(S)`, rejecting mismatched widths and values outside `[0, 1]`.
    pub fn checked_evaluate(&self, s: &Coalition) -> Result<f64> {
        if s.n_players() != self.n_players {
            return Err(Error::PlayerMismatch {
                expected: self.n_players,
                found: s.n_players(),
            });
        }
        let value = self.evaluate(s);
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::UtilityOutOfRange {
                coalition: s.to_string(),
                value,
            });
        }
        Ok(value)
    }

    /// `U(∅)`.
    pub fn empty_value(&self) -> Result<f64> {
        self.checked_evaluate(&Coalition::empty(self.n_players))
    }

    /// `U(I)`.
    pub fn grand_value(&self) -> Result<f64> {
        self.checked_evaluate(&Coalition::full(self.n_players))
    }

    /// `U(I) - U(∅)`, the total that the Shapley values sum to.
    pub fn net_total(&self) -> Result<f64> {
        Ok(self.grand_value()? - self.empty_value()?)
    }

    /// Resolves dummy augmentation: the underlying game and the coalition it
    /// is evaluated on.
    fn resolve(&self, s: &Coalition) -> (&UtilitySpec, Coalition) {
        match &self.kind {
            Kind::Direct(_) => (self, s.clone()),
            Kind::Augmented(base) => base.resolve(&s.truncated()),
        }
    }

    /// Exhaustively checks `U(S) ∈ [0, 1]` for `n_players <= 12`; larger
    /// games are checked on `samples` pseudo-random coalitions.
    pub fn validate_range(&self, samples: usize, seed: u64) -> Result<()> {
        use rand::{Rng, SeedableRng};
        if self.n_players <= 12 {
            for mask in 0..1u64 << self.n_players {
                self.checked_evaluate(&Coalition::from_mask(mask, self.n_players))?;
            }
            return Ok(());
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let mut s = Coalition::empty(self.n_players);
            for i in 0..self.n_players {
                if rng.random::<bool>() {
                    s.insert(i);
                }
            }
            self.checked_evaluate(&s)?;
        }
        Ok(())
    }
}

/// Shapley values, one per player.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapleyVector {
    pub values: Vec<f64>,
}

impl ShapleyVector {
    pub fn new(values: Vec<f64>) -> Self {
        ShapleyVector { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn l2_distance(&self, other: &[f64]) -> f64 {
        assert_eq!(self.values.len(), other.len());
        self.values
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn linf_distance(&self, other: &[f64]) -> f64 {
        assert_eq!(self.values.len(), other.len());
        self.values
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for ShapleyVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Memoizes utility evaluations and counts hits and misses.
///
/// Keys are coalitions of the underlying (non-augmented) game, so one cache
/// serves a game and any dummy-augmented view of it. Concurrent inserts of the
/// same key are last-write-wins; by determinism every write stores the same
/// value.
#[derive(Default)]
pub struct EvalCache {
    entries: RwLock<HashMap<Coalition, f64>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl fmt::Debug for EvalCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EvalCache")
            .field("len", &self.len())
            .field("hits", &self.hits())
            .field("misses", &self.misses())
            .finish()
    }
}

const CACHE_HEADER: &str = "coalition_hex,utility";

impl EvalCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// A cache pre-filled with `entries`; counters start at zero.
    pub fn with_entries(entries: HashMap<Coalition, f64>) -> Self {
        EvalCache {
            entries: RwLock::new(entries),
            ..Default::default()
        }
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn lookups(&self) -> u64 {
        self.hits() + self.misses()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `U(S)` through the cache. A miss evaluates and range-checks `U`.
    pub fn evaluate(&self, u: &UtilitySpec, s: &Coalition) -> Result<f64> {
        if s.n_players() != u.n_players() {
            return Err(Error::PlayerMismatch {
                expected: u.n_players(),
                found: s.n_players(),
            });
        }
        let (base, key) = u.resolve(s);
        if let Some(&v) = self.entries.read().expect("cache lock").get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(v);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let v = base.checked_evaluate(&key)?;
        self.entries.write().expect("cache lock").insert(key, v);
        Ok(v)
    }

    pub fn snapshot(&self) -> HashMap<Coalition, f64> {
        self.entries.read().expect("cache lock").clone()
    }

    /// Copies every entry of `other` into `self`. Counters are unchanged.
    pub fn absorb(&self, other: &EvalCache) {
        let theirs = other.entries.read().expect("cache lock");
        let mut ours = self.entries.write().expect("cache lock");
        for (k, &v) in theirs.iter() {
            ours.insert(k.clone(), v);
        }
    }

    /// Writes `coalition_hex,utility` records sorted by coalition.
    pub fn save(&self, path: &Path) -> Result<()> {
        let entries = self.entries.read().expect("cache lock");
        let mut rows: Vec<(String, f64)> = entries.iter().map(|(k, &v)| (k.to_hex(), v)).collect();
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let mut write = || -> std::io::Result<()> {
            writeln!(w, "{CACHE_HEADER}")?;
            for (hex, v) in &rows {
                writeln!(w, "{hex},{}", numfmt::real_exact(*v))?;
            }
            w.flush()
        };
        write().map_err(|e| Error::io(path, e))
    }

    /// Reads a file written by [`EvalCache::save`] for an `n_players` game.
    pub fn load(path: &Path, n_players: usize) -> Result<Self> {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut entries = HashMap::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let parse_err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message,
            };
            if lineno == 0 {
                if line.trim() != CACHE_HEADER {
                    return Err(parse_err(format!("expected header {CACHE_HEADER:?}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let (hex, value) = line
                .split_once(',')
                .ok_or_else(|| parse_err("expected `coalition_hex,utility`".into()))?;
            let s = Coalition::from_hex(hex, n_players).map_err(|e| parse_err(e.to_string()))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|e| parse_err(format!("bad utility {value:?}: {e}")))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(parse_err(format!("utility {v} outside [0, 1]")));
            }
            entries.insert(s, v);
        }
        Ok(Self::with_entries(entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn coalition_construction() {
        let s = coalition_from_indices([], 5).unwrap();
        assert_eq!(s.len(), 0);
        assert!(s.is_empty());

        let s = coalition_from_indices(0..5, 5).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s, Coalition::full(5));

        let s = coalition_from_indices([1, 3], 4).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.contains(1) && s.contains(3));
        assert!(!s.contains(0) && !s.contains(2));
        assert_eq!(s.to_mask(), Some(0b1010));
    }

    #[test]
    fn coalition_rejects_out_of_range_index() {
        match coalition_from_indices([0, 7], 5) {
            Err(Error::IndexOutOfRange { index: 7, n_players: 5 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn coalition_round_trip_exhaustive() {
        for n in 1..=12 {
            for mask in 0..1u64 << n {
                let s = Coalition::from_mask(mask, n);
                let back = coalition_from_indices(s.indices(), n).unwrap();
                assert_eq!(back, s);
                assert_eq!(s.len(), mask.count_ones() as usize);
            }
        }
    }

    #[test]
    fn hex_is_zero_padded() {
        let s = coalition_from_indices([0, 4], 9).unwrap();
        assert_eq!(s.to_hex(), "011");
        assert_eq!(Coalition::from_hex("011", 9).unwrap(), s);
        assert_eq!(Coalition::from_hex("11", 9).unwrap(), s);
        assert!(Coalition::from_hex("200", 9).is_err());
    }

    #[test]
    fn wide_coalitions() {
        let s = coalition_from_indices([0, 63, 64, 200], 201).unwrap();
        assert_eq!(s.indices().collect::<Vec<_>>(), vec![0, 63, 64, 200]);
        assert_eq!(Coalition::from_hex(&s.to_hex(), 201).unwrap(), s);
        assert_eq!(s.truncated().indices().collect::<Vec<_>>(), vec![0, 63, 64]);
        assert!(s.to_mask().is_none());
    }

    proptest! {
        #[test]
        fn indices_round_trip(set in proptest::collection::btree_set(0usize..300, 0..40)) {
            let s = coalition_from_indices(set.iter().copied(), 300).unwrap();
            let back: BTreeSet<usize> = s.indices().collect();
            prop_assert_eq!(&back, &set);
            prop_assert_eq!(s.len(), set.len());
            prop_assert_eq!(Coalition::from_hex(&s.to_hex(), 300).unwrap(), s);
        }
    }

    fn size_game(n: usize) -> UtilitySpec {
        UtilitySpec::new(n, "size", move |s: &Coalition| s.len() as f64 / n as f64)
    }

    #[test]
    fn cache_counts_hits_and_misses() {
        let u = size_game(4);
        let cache = EvalCache::new();
        let s = coalition_from_indices([0, 2], 4).unwrap();
        assert_eq!(cache.evaluate(&u, &s).unwrap(), 0.5);
        assert_eq!((cache.hits(), cache.misses()), (0, 1));
        assert_eq!(cache.evaluate(&u, &s).unwrap(), 0.5);
        assert_eq!((cache.hits(), cache.misses()), (1, 1));
        assert_eq!(cache.lookups(), 2);
    }

    #[test]
    fn cache_rejects_out_of_range_utility() {
        let u = UtilitySpec::new(2, "bad", |_: &Coalition| 1.5);
        let cache = EvalCache::new();
        let err = cache.evaluate(&u, &Coalition::full(2)).unwrap_err();
        assert!(matches!(err, Error::UtilityOutOfRange { ref coalition, .. } if coalition == "{0,1}"));
    }

    #[test]
    fn cache_rejects_width_mismatch() {
        let cache = EvalCache::new();
        let err = cache.evaluate(&size_game(3), &Coalition::empty(4)).unwrap_err();
        assert!(matches!(err, Error::PlayerMismatch { expected: 3, found: 4 }));
    }

    #[test]
    fn augmented_game_shares_base_cache_keys() {
        let u = Arc::new(size_game(3));
        let aug = u.augmented();
        assert_eq!(aug.n_players(), 4);
        let cache = EvalCache::new();
        let with_dummy = coalition_from_indices([1, 3], 4).unwrap();
        let without = coalition_from_indices([1], 4).unwrap();
        let v1 = cache.evaluate(&aug, &with_dummy).unwrap();
        let v2 = cache.evaluate(&aug, &without).unwrap();
        assert_eq!(v1, v2);
        assert_eq!((cache.hits(), cache.misses()), (1, 1));
        let v3 = cache.evaluate(&u, &coalition_from_indices([1], 3).unwrap()).unwrap();
        assert_eq!(v3, v1);
        assert_eq!(cache.hits(), 2);
    }

    #[test]
    fn cache_transparency_and_persistence() {
        let u = UtilitySpec::new(5, "irrational", |s: &Coalition| {
            let m = s.to_mask().unwrap() as f64;
            (m * 0.618_033_988_749_894_9).fract()
        });
        let cache = EvalCache::new();
        for mask in (0..32u64).chain(0..32) {
            let s = Coalition::from_mask(mask, 5);
            let cached = cache.evaluate(&u, &s).unwrap();
            assert_eq!(cached.to_bits(), u.evaluate(&s).to_bits());
        }
        assert_eq!((cache.hits(), cache.misses()), (32, 32));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.csv");
        cache.save(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "coalition_hex,utility");
        assert_eq!(lines.len(), 33);
        let mut sorted = lines[1..].to_vec();
        sorted.sort();
        assert_eq!(sorted, lines[1..].to_vec());

        let loaded = EvalCache::load(&path, 5).unwrap();
        assert_eq!(loaded.len(), 32);
        for mask in 0..32u64 {
            let s = Coalition::from_mask(mask, 5);
            assert_eq!(loaded.evaluate(&u, &s).unwrap().to_bits(), u.evaluate(&s).to_bits());
        }
        assert_eq!(loaded.misses(), 0);
    }

    #[test]
    fn concurrent_lookups_are_consistent() {
        use rayon::prelude::*;
        let u = size_game(10);
        let cache = EvalCache::new();
        (0..4096u64).into_par_iter().for_each(|k| {
            let s = Coalition::from_mask(k % 1024, 10);
            assert_eq!(cache.evaluate(&u, &s).unwrap(), u.evaluate(&s));
        });
        assert_eq!(cache.len(), 1024);
        assert_eq!(cache.lookups(), 4096);
    }
}
