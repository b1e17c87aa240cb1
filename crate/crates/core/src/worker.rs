//! Worker channel models.
//!
//! A worker turns a query input `u` into a response `v` through a discrete
//! memoryless channel. Two models are provided: the M-ary symmetric channel
//! ([`MscChannel`]) with a skill level `ε`, and the spammer-hammer channel
//! ([`ShcChannel`]) where a worker is either perfect or answers uniformly at
//! random.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::infomath::{symmetric_entropy, Pmf};

/// M-ary symmetric channel: correct with probability `1 − ε`, otherwise one
/// of the other `M − 1` symbols uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MscChannel {
    alphabet: usize,
    epsilon: f64,
}

impl MscChannel {
    pub fn new(alphabet: usize, epsilon: f64) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::invalid("alphabet", format!("{alphabet} < 2")));
        }
        check_probability("epsilon", epsilon)?;
        Ok(MscChannel { alphabet, epsilon })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn check_symbol(&self, symbol: usize) -> Result<()> {
        if symbol < self.alphabet {
            Ok(())
        } else {
            Err(Error::SymbolOutOfRange {
                symbol,
                size: self.alphabet,
            })
        }
    }

    /// `P(v | u)`.
    pub fn transition(&self, u: usize, v: usize) -> Result<f64> {
        self.check_symbol(u)?;
        self.check_symbol(v)?;
        Ok(if u == v {
            1.0 - self.epsilon
        } else {
            self.epsilon / (self.alphabet - 1) as f64
        })
    }

    pub fn transition_row(&self, u: usize) -> Result<Vec<f64>> {
        (0..self.alphabet).map(|v| self.transition(u, v)).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, u: usize, rng: &mut R) -> Result<usize> {
        self.check_symbol(u)?;
        Ok(self.sample_unchecked(u, rng))
    }

    pub(crate) fn sample_unchecked<R: Rng + ?Sized>(&self, u: usize, rng: &mut R) -> usize {
        if rng.gen::<f64>() < self.epsilon {
            let v = rng.gen_range(0..self.alphabet - 1);
            if v >= u {
                v + 1
            } else {
                v
            }
        } else {
            u
        }
    }
}

/// Spammer-hammer worker state, drawn once per worker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WorkerState {
    Spammer,
    Hammer,
}

/// Spammer-hammer channel `SHC(q)`: a hammer (probability `q`) answers
/// perfectly; a spammer picks one of the `M` valid responses uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShcChannel {
    hammer_prob: f64,
    alphabet: usize,
}

impl ShcChannel {
    /// `alphabet = 1` is accepted as a degenerate single-response query.
    pub fn new(hammer_prob: f64, alphabet: usize) -> Result<Self> {
        check_probability("q", hammer_prob)?;
        if alphabet == 0 {
            return Err(Error::invalid("alphabet", "must be at least 1"));
        }
        Ok(ShcChannel {
            hammer_prob,
            alphabet,
        })
    }

    pub fn hammer_prob(&self) -> f64 {
        self.hammer_prob
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn draw_worker<R: Rng + ?Sized>(&self, rng: &mut R) -> WorkerState {
        draw_worker_state(self.hammer_prob, rng)
    }

    /// `P(v | u, state)`.
    pub fn transition(&self, state: WorkerState, u: usize, v: usize) -> Result<f64> {
        for symbol in [u, v] {
            if symbol >= self.alphabet {
                return Err(Error::SymbolOutOfRange {
                    symbol,
                    size: self.alphabet,
                });
            }
        }
        Ok(match state {
            WorkerState::Hammer => f64::from(u8::from(u == v)),
            WorkerState::Spammer => 1.0 / self.alphabet as f64,
        })
    }

    pub fn respond<R: Rng + ?Sized>(
        &self,
        state: WorkerState,
        u: usize,
        rng: &mut R,
    ) -> Result<usize> {
        if u >= self.alphabet {
            return Err(Error::SymbolOutOfRange {
                symbol: u,
                size: self.alphabet,
            });
        }
        Ok(match state {
            WorkerState::Hammer => u,
            WorkerState::Spammer => rng.gen_range(0..self.alphabet),
        })
    }
}

/// Draws a worker that is a hammer with probability `hammer_prob`.
pub fn draw_worker_state<R: Rng + ?Sized>(hammer_prob: f64, rng: &mut R) -> WorkerState {
    if rng.gen::<f64>() < hammer_prob {
        WorkerState::Hammer
    } else {
        WorkerState::Spammer
    }
}

/// `P(state = H) = q` sampler with validation of `q`.
pub fn shc_draw_worker<R: Rng + ?Sized>(hammer_prob: f64, rng: &mut R) -> Result<WorkerState> {
    check_probability("q", hammer_prob)?;
    Ok(draw_worker_state(hammer_prob, rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkillLevel {
    pub epsilon: f64,
    pub probability: f64,
}

/// Discrete distribution of MSC skill levels over the worker pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SkillLevel>", into = "Vec<SkillLevel>")]
pub struct SkillPopulation {
    levels: Vec<SkillLevel>,
}

impl SkillPopulation {
    /// Builds a population from `(ε, P(ε))` pairs.
    pub fn new(levels: Vec<(f64, f64)>) -> Result<Self> {
        let levels: Vec<SkillLevel> = levels
            .into_iter()
            .map(|(epsilon, probability)| SkillLevel {
                epsilon,
                probability,
            })
            .collect();
        SkillPopulation::try_from(levels)
    }

    /// Every worker shares skill `epsilon`.
    pub fn single(epsilon: f64) -> Result<Self> {
        SkillPopulation::new(vec![(epsilon, 1.0)])
    }

    pub fn levels(&self) -> &[SkillLevel] {
        &self.levels
    }

    /// `E(ε)`.
    pub fn mean_skill(&self) -> f64 {
        self.levels.iter().map(|l| l.probability * l.epsilon).sum()
    }

    /// `E(H_M(ε))`.
    pub fn expected_symmetric_entropy(&self, alphabet: usize) -> Result<f64> {
        self.levels.iter().try_fold(0.0, |acc, l| {
            Ok(acc + l.probability * symmetric_entropy(l.epsilon, alphabet)?.bits())
        })
    }

    /// True when all mass sits on a single skill value.
    pub fn is_point_mass(&self) -> bool {
        let mut support = self.levels.iter().filter(|l| l.probability > 0.0);
        match support.next() {
            Some(first) => support.all(|l| l.epsilon == first.epsilon),
            None => false,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for level in &self.levels {
            acc += level.probability;
            if u < acc {
                return level.epsilon;
            }
        }
        // Only reachable through rounding in the last cumulative sum.
        self.levels
            .iter()
            .rev()
            .find(|l| l.probability > 0.0)
            .map_or(self.levels[0].epsilon, |l| l.epsilon)
    }
}

impl TryFrom<Vec<SkillLevel>> for SkillPopulation {
    type Error = Error;

    fn try_from(levels: Vec<SkillLevel>) -> Result<Self> {
        Pmf::new(levels.iter().map(|l| l.probability).collect())?;
        for level in &levels {
            check_probability("epsilon", level.epsilon)?;
        }
        Ok(SkillPopulation { levels })
    }
}

impl From<SkillPopulation> for Vec<SkillLevel> {
    fn from(value: SkillPopulation) -> Self {
        value.levels
    }
}

/// `E(ε)` of a population.
pub fn population_mean_skill(population: &SkillPopulation) -> f64 {
    population.mean_skill()
}
