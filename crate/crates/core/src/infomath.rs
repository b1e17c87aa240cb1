//! Entropy, capacity and rate-distortion primitives.
//!
//! Every quantity here is in bits. `0 · log 0` is taken as 0.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

/// Tolerance on `|Σp − 1|` accepted by [`Pmf::new`].
pub const PMF_TOLERANCE: f64 = 1e-9;

/// A probability mass function over a finite, ordered alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf(Vec<f64>);

impl Pmf {
    /// Validates `probabilities` without touching them.
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        for (index, &value) in probabilities.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidProbability { index, value });
            }
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > PMF_TOLERANCE {
            return Err(Error::NotNormalized(sum));
        }
        Ok(Pmf(probabilities))
    }

    /// Scales non-negative weights so they sum to one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidProbability { index, value });
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::NotNormalized(total));
        }
        Ok(Pmf(weights.into_iter().map(|w| w / total).collect()))
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyDistribution);
        }
        Ok(Pmf(vec![1.0 / size as f64; size]))
    }

    pub fn point_mass(size: usize, index: usize) -> Result<Self> {
        if index >= size {
            return Err(Error::SymbolOutOfRange {
                symbol: index,
                size,
            });
        }
        let mut p = vec![0.0; size];
        p[index] = 1.0;
        Ok(Pmf(p))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_probability(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Pmf::new(value)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(value: Pmf) -> Self {
        value.0
    }
}

/// An entropy value in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Entropy(f64);

impl Entropy {
    pub fn bits(self) -> f64 {
        self.0
    }
}

fn entropy_of(probabilities: impl IntoIterator<Item = f64>) -> f64 {
    let h: f64 = probabilities
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    // Rounding can push a deterministic pmf a hair below zero.
    h.max(0.0)
}

/// Shannon entropy `−Σ p log2 p`.
pub fn entropy(p: &Pmf) -> Entropy {
    Entropy(entropy_of(p.0.iter().copied()))
}

/// Entropy of `(1−ε, ε/(N−1), …, ε/(N−1))`, written `H_N(ε)`.
///
/// Any `ε ∈ [0, 1]` is accepted; values above `(N−1)/N` still form a valid
/// pmf and simply move the mode away from the first symbol.
pub fn symmetric_entropy(epsilon: f64, n_symbols: usize) -> Result<Entropy> {
    check_probability("epsilon", epsilon)?;
    if n_symbols < 2 {
        return Err(Error::invalid("n_symbols", format!("{n_symbols} < 2")));
    }
    let off = epsilon / (n_symbols - 1) as f64;
    let mut h = entropy_of(std::iter::once(1.0 - epsilon));
    if off > 0.0 {
        h -= (n_symbols - 1) as f64 * off * off.log2();
    }
    Ok(Entropy(h.max(0.0)))
}

/// Binary entropy `H_b(ε)`.
pub fn binary_entropy(epsilon: f64) -> Result<Entropy> {
    symmetric_entropy(epsilon, 2)
}

/// `log2 M − H_M(ε)`: capacity of a single M-ary symmetric channel.
///
/// Not clamped: error probabilities above `(M−1)/M` give negative values.
pub fn msc_capacity_pointwise(epsilon: f64, alphabet: usize) -> Result<f64> {
    let h = symmetric_entropy(epsilon, alphabet)?;
    Ok((alphabet as f64).log2() - h.bits())
}

/// Largest target error for which the Hamming rate-distortion function of
/// `source` is positive: `min{1 − p_max, 1 − 1/N}`.
pub fn zero_rate_threshold(source: &Pmf) -> f64 {
    let n = source.len() as f64;
    (1.0 - source.max_probability()).min(1.0 - 1.0 / n)
}

/// Rate-distortion function of `source` under Hamming distortion at target
/// error `target_error`, in bits per item.
///
/// Equals `H(source) − H_N(ε̂)` up to the zero-rate threshold and 0 beyond
/// it. The difference is floored at 0 for skewed sources with `N ≥ 3`,
/// where `H_N(ε̂)` can exceed `H(source)` just below the threshold.
pub fn rate_distortion_hamming(source: &Pmf, target_error: f64) -> Result<f64> {
    check_probability("target_error", target_error)?;
    let n = source.len();
    if n < 2 || target_error > zero_rate_threshold(source) {
        return Ok(0.0);
    }
    let rate = entropy(source).bits() - symmetric_entropy(target_error, n)?.bits();
    Ok(rate.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent route: natural logs, `p ln(1/p)`, converted at the end.
    fn entropy_oracle(p: &[f64]) -> f64 {
        p.iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| x * (1.0 / x).ln())
            .sum::<f64>()
            / std::f64::consts::LN_2
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&Pmf::new(vec![0.5, 0.5]).unwrap()).bits(), 1.0);
        assert_eq!(entropy(&Pmf::new(vec![1.0, 0.0]).unwrap()).bits(), 0.0);
        let h = entropy(&Pmf::new(vec![0.1, 0.9]).unwrap()).bits();
        assert!((h - entropy_oracle(&[0.1, 0.9])).abs() < 1e-14);
        assert!((h - 0.4690).abs() < 1e-4);
    }

    #[test]
    fn pmf_validation() {
        assert_eq!(Pmf::new(vec![]), Err(Error::EmptyDistribution));
        assert!(matches!(
            Pmf::new(vec![-0.1, 1.1]),
            Err(Error::InvalidProbability { index: 0, .. })
        ));
        assert!(matches!(
            Pmf::new(vec![0.3, 0.3]),
            Err(Error::NotNormalized(_))
        ));
        assert!(Pmf::new(vec![0.5, 0.5 + 1e-10]).is_ok());
        assert!(matches!(
            Pmf::new(vec![f64::NAN, 1.0]),
            Err(Error::InvalidProbability { .. })
        ));
        let p = Pmf::normalized(vec![1.0, 3.0]).unwrap();
        assert_eq!(p.probabilities(), &[0.25, 0.75]);
    }

    #[test]
    fn pmf_conversion_validates() {
        assert!(Pmf::try_from(vec![0.2, 0.2]).is_err());
        assert_eq!(Pmf::point_mass(3, 1).unwrap().max_probability(), 1.0);
        assert!(Pmf::point_mass(3, 3).is_err());
    }

    #[test]
    fn symmetric_entropy_examples() {
        assert_eq!(symmetric_entropy(0.0, 4).unwrap().bits(), 0.0);
        assert_eq!(symmetric_entropy(0.5, 2).unwrap().bits(), 1.0);
        assert!((symmetric_entropy(0.75, 4).unwrap().bits() - 2.0).abs() < 1e-15);
        assert!(symmetric_entropy(1.2, 4).is_err());
        assert!(symmetric_entropy(-0.1, 4).is_err());
        assert!(symmetric_entropy(0.1, 1).is_err());
        // Past (N−1)/N the pmf is still legal.
        let h = symmetric_entropy(1.0, 3).unwrap().bits();
        assert!((h - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_entropy_peaks_at_uniform() {
        for n in 2..=8usize {
            let peak = (n - 1) as f64 / n as f64;
            let at_peak = symmetric_entropy(peak, n).unwrap().bits();
            assert!((at_peak - (n as f64).log2()).abs() < 1e-12);
            for i in 0..=1000 {
                let eps = i as f64 / 1000.0;
                let h = symmetric_entropy(eps, n).unwrap().bits();
                assert!(h <= at_peak + 1e-12, "n={n} eps={eps}");
                if (eps - peak).abs() > 1e-3 {
                    assert!(h < at_peak, "n={n} eps={eps}");
                }
            }
        }
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(msc_capacity_pointwise(0.0, 2).unwrap(), 1.0);
        assert_eq!(msc_capacity_pointwise(0.5, 2).unwrap(), 0.0);
        let p = [0.9, 0.1 / 3.0, 0.1 / 3.0, 0.1 / 3.0];
        let c = msc_capacity_pointwise(0.1, 4).unwrap();
        assert!((c - (2.0 - entropy_oracle(&p))).abs() < 1e-12);
        assert!((c - 1.372508).abs() < 1e-6);
        assert!(msc_capacity_pointwise(1.0, 2).unwrap() == 1.0);
        assert!(msc_capacity_pointwise(0.9, 4).unwrap() > -1e-12);
    }

    #[test]
    fn capacity_endpoints() {
        for m in 2..=16usize {
            assert!((msc_capacity_pointwise(0.0, m).unwrap() - (m as f64).log2()).abs() < 1e-12);
            let useless = (m - 1) as f64 / m as f64;
            assert!(msc_capacity_pointwise(useless, m).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn rate_distortion_examples() {
        let fair = Pmf::uniform(2).unwrap();
        assert_eq!(rate_distortion_hamming(&fair, 0.0).unwrap(), 1.0);
        assert_eq!(rate_distortion_hamming(&fair, 0.5).unwrap(), 0.0);
        let skew = Pmf::new(vec![0.8, 0.2]).unwrap();
        assert_eq!(rate_distortion_hamming(&skew, 0.3).unwrap(), 0.0);
        assert!(rate_distortion_hamming(&skew, 1.5).is_err());
    }

    #[test]
    fn rate_distortion_non_increasing() {
        for source in [
            vec![0.5, 0.5],
            vec![0.8, 0.2],
            vec![0.25; 4],
            vec![0.5, 0.3, 0.2],
            vec![0.6, 0.1, 0.1, 0.1, 0.1],
        ] {
            let p = Pmf::new(source).unwrap();
            let limit = zero_rate_threshold(&p);
            let mut prev = f64::INFINITY;
            for i in 0..=500 {
                let eps = limit * i as f64 / 500.0;
                let r = rate_distortion_hamming(&p, eps).unwrap();
                assert!(r <= prev + 1e-12);
                prev = r;
            }
        }
    }

    #[test]
    fn entropy_permutation_invariant() {
        let a = Pmf::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let b = Pmf::new(vec![0.4, 0.1, 0.3, 0.2]).unwrap();
        assert!((entropy(&a).bits() - entropy(&b).bits()).abs() < 1e-15);
    }
}
