use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::rayleigh::draw_gains;
use crate::{Error, Result};

/// Good/bad states of a block of sub-channels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateVector {
    pub bits: Vec<bool>,
    /// Number of good sub-channels.
    pub weight: usize,
}

impl StateVector {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::domain("state vector must be non-empty"));
        }
        let weight = bits.iter().filter(|b| **b).count();
        Ok(StateVector { bits, weight })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit mask of the good sub-channels, for vectors of at most 64 entries.
    pub fn mask(&self) -> Option<u64> {
        (self.bits.len() <= 64).then(|| self.bits.iter().enumerate().fold(0, |m, (i, b)| m | (u64::from(*b) << i)))
    }

    /// Counts of each `(previous, next)` state pair along the vector.
    pub fn transition_counts(&self) -> [[u64; 2]; 2] {
        let mut c = [[0u64; 2]; 2];
        for w in self.bits.windows(2) {
            c[usize::from(w[0])][usize::from(w[1])] += 1;
        }
        c
    }
}

/// Source of sub-channel states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StateModel {
    /// Independent, good with probability `q`.
    Iid { q: f64 },
    /// Stationary two-state chain.
    Markov { delta01: f64, delta10: f64 },
    /// Independent Rayleigh gains thresholded at `t`.
    RayleighIid { t: f64 },
    /// AR(1)-correlated Rayleigh gains thresholded at `t`.
    RayleighAr1 { alpha: f64, t: f64 },
}

impl StateModel {
    fn validate(&self) -> Result<()> {
        let unit = |name: &str, x: f64, open: bool| {
            let ok = if open { x > 0.0 && x < 1.0 } else { (0.0..=1.0).contains(&x) };
            if ok {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} = {x} out of range")))
            }
        };
        match *self {
            StateModel::Iid { q } => unit("q", q, false),
            StateModel::Markov { delta01, delta10 } => unit("delta01", delta01, true).and(unit("delta10", delta10, true)),
            StateModel::RayleighIid { t } | StateModel::RayleighAr1 { t, .. } if !(t >= 0.0 && t.is_finite()) => {
                Err(Error::domain(format!("threshold t = {t} must be finite and >= 0")))
            }
            StateModel::RayleighAr1 { alpha, .. } if !(0.0..1.0).contains(&alpha) => {
                Err(Error::domain(format!("alpha = {alpha} must lie in [0, 1)")))
            }
            _ => Ok(()),
        }
    }
}

/// Draws `n` sub-channel states; the output is a function of `seed` alone.
pub fn gen_states(model: StateModel, n: usize, seed: u64) -> Result<StateVector> {
    model.validate()?;
    if n == 0 {
        return Err(Error::domain("state vector must be non-empty"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits = match model {
        StateModel::Iid { q } => (0..n).map(|_| rng.random::<f64>() < q).collect(),
        StateModel::Markov { delta01, delta10 } => {
            let mut s = rng.random::<f64>() < delta01 / (delta01 + delta10);
            let mut bits = Vec::with_capacity(n);
            for _ in 0..n {
                bits.push(s);
                let u = rng.random::<f64>();
                s = if s { u >= delta10 } else { u < delta01 };
            }
            bits
        }
        StateModel::RayleighIid { t } => (0..n)
            .map(|_| {
                let g: f64 = Exp1.sample(&mut rng);
                g > t
            })
            .collect(),
        StateModel::RayleighAr1 { alpha, t } => {
            let mut gains = Vec::with_capacity(n);
            draw_gains(&mut rng, n, alpha, &mut gains);
            gains.into_iter().map(|g| g > t).collect()
        }
    };
    StateVector::new(bits)
}
