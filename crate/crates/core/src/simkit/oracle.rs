use serde::{Deserialize, Serialize};

use super::codebook::{binomial, same_weight_words};
use super::Codebook;
use crate::{Error, Result};

/// Largest `codebooks * 2^n` product the exhaustive search accepts.
pub const ORACLE_BUDGET: f64 = 1e10;
/// Largest block length either search accepts (the state table has `2^n` rows).
const MAX_N: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Expected missed opportunities per sub-channel of the best codebook found.
    pub distortion: f64,
    pub codebook: Codebook,
    /// False for the greedy search, whose result is only an upper bound on the optimum.
    pub exact: bool,
    pub codebooks_searched: u64,
}

/// Missed-count table `miss[s * k + j]` for every state `s` and word `j`,
/// plus the probability weight of each state divided by `n`.
struct Table {
    words: Vec<u64>,
    miss: Vec<u8>,
    /// Bernoulli(q) mass of each weight class, per state, over `n`.
    class_weight: Vec<f64>,
    weight_of: Vec<u8>,
}

impl Table {
    fn new(n: usize, active: usize, q: f64) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::domain(format!("oracle block length {n} must lie in [1, {MAX_N}]")));
        }
        if active == 0 || active > n {
            return Err(Error::domain(format!("composition {active} must lie in [1, {n}]")));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::domain(format!("q = {q} must lie in [0, 1]")));
        }
        let words: Vec<u64> = same_weight_words(n, active).collect();
        let k = words.len();
        let states = 1usize << n;
        let mut miss = Vec::with_capacity(states * k);
        for s in 0..states as u64 {
            miss.extend(words.iter().map(|w| (s & !w).count_ones() as u8));
        }
        let class_weight = (0..=n).map(|w| q.powi(w as i32) * (1.0 - q).powi((n - w) as i32) / n as f64).collect();
        let weight_of = (0..states as u64).map(|s| s.count_ones() as u8).collect();
        Ok(Table { words, miss, class_weight, weight_of })
    }

    fn states(&self) -> usize {
        self.weight_of.len()
    }

    /// Expected distortion from per-state missed counts, summed exactly
    /// within each weight class before weighting.
    fn value(&self, best: &[u8]) -> f64 {
        let mut totals = vec![0u64; self.class_weight.len()];
        for (s, d) in best.iter().enumerate() {
            totals[self.weight_of[s] as usize] += u64::from(*d);
        }
        totals.iter().zip(&self.class_weight).map(|(t, w)| *t as f64 * w).sum()
    }

    fn column(&self, j: usize) -> impl Iterator<Item = u8> + '_ {
        let k = self.words.len();
        (0..self.states()).map(move |s| self.miss[s * k + j])
    }
}

/// Smallest expected distortion over all codebooks of `m_words` distinct
/// weight-`active` words, for Bernoulli(`q`) states of length `n`.
///
/// Fails with a budget error when the search is too large; the greedy
/// search is the fallback.
pub fn exhaustive_codebook_oracle(n: usize, active: usize, m_words: usize, q: f64) -> Result<OracleResult> {
    let class = binomial(n.min(64) as u64, active.min(64) as u64);
    if m_words == 0 || m_words as f64 > class {
        return Err(Error::domain(format!("codebook size {m_words} must lie in [1, {class}]")));
    }
    let count = binomial(class as u64, m_words as u64);
    let work = count * 2f64.powi(n as i32);
    if work > ORACLE_BUDGET {
        return Err(Error::Budget { what: format!("exhaustive search over {count:.3e} codebooks"), partial: None });
    }
    let table = Table::new(n, active, q)?;
    let k = table.words.len();
    let states = table.states();
    // Depth-first over increasing index tuples, keeping the running
    // per-state minimum for each prefix.
    let mut mins = vec![vec![u8::MAX; states]; m_words + 1];
    let mut idx = vec![0usize; m_words];
    let mut best = (f64::INFINITY, Vec::new());
    let mut searched = 0u64;
    let mut depth = 0;
    idx[0] = 0;
    loop {
        if idx[depth] > k - (m_words - depth) {
            if depth == 0 {
                break;
            }
            depth -= 1;
            idx[depth] += 1;
            continue;
        }
        let (prev, next) = mins.split_at_mut(depth + 1);
        for (m, (p, c)) in next[0].iter_mut().zip(prev[depth].iter().zip(table.column(idx[depth]))) {
            *m = (*p).min(c);
        }
        if depth + 1 == m_words {
            searched += 1;
            let v = table.value(&mins[m_words]);
            if v < best.0 {
                best = (v, idx.clone());
            }
            idx[depth] += 1;
        } else {
            depth += 1;
            idx[depth] = idx[depth - 1] + 1;
        }
    }
    let words = best.1.iter().map(|&j| table.words[j]).collect();
    Ok(OracleResult { distortion: best.0, codebook: Codebook { n, composition: active, words }, exact: true, codebooks_searched: searched })
}

/// Greedy codebook: repeatedly adds the word that lowers the expected
/// distortion the most. Not guaranteed optimal.
pub fn greedy_codebook_oracle(n: usize, active: usize, m_words: usize, q: f64) -> Result<OracleResult> {
    if m_words == 0 {
        return Err(Error::domain("codebook needs at least one word"));
    }
    let table = Table::new(n, active, q)?;
    let mut current = vec![u8::MAX; table.states()];
    let mut chosen = Vec::with_capacity(m_words);
    let mut value = f64::INFINITY;
    let mut searched = 0u64;
    let mut trial = vec![0u8; table.states()];
    for _ in 0..m_words.min(table.words.len()) {
        let mut pick = (f64::INFINITY, 0);
        for j in 0..table.words.len() {
            searched += 1;
            for (t, (c, m)) in trial.iter_mut().zip(current.iter().zip(table.column(j))) {
                *t = (*c).min(m);
            }
            let v = table.value(&trial);
            if v < pick.0 {
                pick = (v, j);
            }
        }
        for (c, m) in current.iter_mut().zip(table.column(pick.1)) {
            *c = (*c).min(m);
        }
        chosen.push(table.words[pick.1]);
        value = pick.0;
    }
    Ok(OracleResult { distortion: value, codebook: Codebook { n, composition: active, words: chosen }, exact: false, codebooks_searched: searched })
}
