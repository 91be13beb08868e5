use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::{Error, Result};

/// Constant-composition feedback codebook.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codebook {
    pub n: usize,
    /// Active sub-channels in every word.
    pub composition: usize,
    /// Words as bit masks.
    pub words: Vec<u64>,
}

impl Codebook {
    pub fn new(n: usize, composition: usize, words: Vec<u64>) -> Result<Self> {
        check_shape(n, composition)?;
        if words.is_empty() {
            return Err(Error::domain("codebook needs at least one word"));
        }
        if let Some(w) = words.iter().find(|w| w.count_ones() as usize != composition || (n < 64 && **w >> n != 0)) {
            return Err(Error::domain(format!("word {w:#b} is not a weight-{composition} word of length {n}")));
        }
        Ok(Codebook { n, composition, words })
    }

    /// Every weight-`composition` word, in increasing mask order.
    pub fn type_class(n: usize, composition: usize) -> Result<Self> {
        check_shape(n, composition)?;
        if binomial(n as u64, composition as u64) > 1e7 {
            return Err(Error::Budget { what: "type class too large to list".into(), partial: None });
        }
        Ok(Codebook { n, composition, words: same_weight_words(n, composition).collect() })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Feedback bits per block for a fixed-length index.
    pub fn index_bits(&self) -> f64 {
        (self.words.len() as f64).log2()
    }

    pub fn word_bits(&self, i: usize) -> Vec<bool> {
        (0..self.n).map(|b| self.words[i] >> b & 1 == 1).collect()
    }

    /// Index of the word leaving the fewest good sub-channels inactive for
    /// state `s`, lowest index on ties, with that count.
    pub fn encode(&self, s: u64) -> (usize, u32) {
        let mut best = (0, u32::MAX);
        for (i, w) in self.words.iter().enumerate() {
            let missed = (s & !w).count_ones();
            if missed < best.1 {
                best = (i, missed);
                if missed == 0 {
                    break;
                }
            }
        }
        best
    }

    /// Whether some word misses exactly `k0` good and activates exactly `k1`
    /// bad sub-channels of `s`.
    pub fn covers(&self, s: u64, k0: u32, k1: u32) -> bool {
        self.words.iter().any(|w| (s & !w).count_ones() == k0 && (!s & w).count_ones() == k1)
    }
}

/// Weight-`k` masks of length `n` in increasing order (Gosper's hack).
pub(crate) fn same_weight_words(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let first = if k == 0 { 0 } else { super::full_mask(k) };
    let last = first << (n - k);
    std::iter::successors(Some(first), move |&w| {
        if w == last || w == 0 {
            return None;
        }
        let c = w & w.wrapping_neg();
        let r = w + c;
        Some((((r ^ w) >> 2) / c) | r)
    })
}

fn check_shape(n: usize, composition: usize) -> Result<()> {
    if n == 0 || n > 64 {
        return Err(Error::domain(format!("word length {n} must lie in [1, 64]")));
    }
    if composition == 0 || composition > n {
        return Err(Error::domain(format!("composition {composition} must lie in [1, {n}]")));
    }
    Ok(())
}

/// `C(n, k)` as a float (exact below 2^53).
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

fn random_word(rng: &mut ChaCha8Rng, n: usize, composition: usize) -> u64 {
    sample(rng, n, composition).into_iter().fold(0, |m, i| m | 1 << i)
}

/// `m_words` independent uniform draws from the weight-`active` words,
/// duplicates allowed.
pub fn build_fixed_codebook(n: usize, active: usize, m_words: usize, seed: u64) -> Result<Codebook> {
    check_shape(n, active)?;
    if m_words == 0 {
        return Err(Error::domain("codebook needs at least one word"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = (0..m_words).map(|_| random_word(&mut rng, n, active)).collect();
    Ok(Codebook { n, composition: active, words })
}

/// Like [`build_fixed_codebook`] but with distinct words, so asking for
/// `C(n, active)` words yields the whole type class.
pub fn build_distinct_codebook(n: usize, active: usize, m_words: usize, seed: u64) -> Result<Codebook> {
    check_shape(n, active)?;
    let size = binomial(n as u64, active as u64);
    if m_words == 0 || m_words as f64 > size {
        return Err(Error::domain(format!("cannot draw {m_words} distinct words from {size}")));
    }
    if m_words as f64 > 0.5 * size {
        // Dense request: shuffle the class instead of rejection sampling.
        let mut class = Codebook::type_class(n, active)?.words;
        let idx = sample(&mut ChaCha8Rng::seed_from_u64(seed), class.len(), m_words);
        let words = idx.into_iter().map(|i| class[i]).collect();
        class.clear();
        return Ok(Codebook { n, composition: active, words });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(m_words);
    let mut words = Vec::with_capacity(m_words);
    while words.len() < m_words {
        let w = random_word(&mut rng, n, active);
        if seen.insert(w) {
            words.push(w);
        }
    }
    Ok(Codebook { n, composition: active, words })
}

/// Probability that one uniform weight-`active` word misses exactly `k0`
/// of the `weight` good sub-channels and activates exactly `k1` bad ones.
pub fn cover_probability(n: usize, weight: usize, k0: usize, k1: usize) -> Result<f64> {
    if weight > n || k0 > weight || k1 > n - weight {
        return Err(Error::domain("cover counts exceed the state composition"));
    }
    let active = weight - k0 + k1;
    if active == 0 {
        return Err(Error::domain("cover pattern activates nothing"));
    }
    let (n, w) = (n as u64, weight as u64);
    Ok(binomial(w, k0 as u64) * binomial(n - w, k1 as u64) / binomial(n, active as u64))
}
