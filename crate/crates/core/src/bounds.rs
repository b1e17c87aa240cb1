//! Closed-form minimum query rates.
//!
//! Rates are queries per item. A bound that cannot be met at any finite rate
//! (zero-capacity worker pool with a positive information requirement) is
//! reported as [`RateBound::Infeasible`] instead of an infinite float.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::infomath::{binary_entropy, rate_distortion_hamming, symmetric_entropy, zero_rate_threshold};
use crate::kic::spammer_error_prob;
use crate::source::SourceModel;
use crate::worker::SkillPopulation;

/// Values this close to zero are treated as zero when deciding feasibility.
const ZERO_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RateBound {
    Feasible(f64),
    Infeasible,
}

impl RateBound {
    pub fn value(self) -> Option<f64> {
        match self {
            RateBound::Feasible(v) => Some(v),
            RateBound::Infeasible => None,
        }
    }

    pub fn is_feasible(self) -> bool {
        matches!(self, RateBound::Feasible(_))
    }

    /// Ordering key: infeasible sorts above every finite rate.
    pub fn as_f64(self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }

    fn from_ratio(numerator: f64, denominator: f64) -> Self {
        if numerator <= ZERO_TOLERANCE {
            RateBound::Feasible(0.0)
        } else if denominator <= ZERO_TOLERANCE {
            RateBound::Infeasible
        } else {
            RateBound::Feasible(numerator / denominator)
        }
    }
}

/// Infeasible bounds print as `inf`.
impl fmt::Display for RateBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateBound::Feasible(v) => write!(f, "{v}"),
            RateBound::Infeasible => f.write_str("inf"),
        }
    }
}

/// Inputs shared by the MSC-population bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundQuery {
    pub source: SourceModel,
    /// Number of choices `M` a worker has when answering.
    pub alphabet: usize,
    pub population: SkillPopulation,
    pub target_error: f64,
}

impl BoundQuery {
    pub fn new(
        source: SourceModel,
        alphabet: usize,
        population: SkillPopulation,
        target_error: f64,
    ) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::invalid("M", format!("{alphabet} < 2")));
        }
        check_probability("target_error", target_error)?;
        Ok(BoundQuery {
            source,
            alphabet,
            population,
            target_error,
        })
    }

    fn required_bits(&self) -> Result<Option<f64>> {
        if self.target_error > zero_rate_threshold(self.source.pmf()) {
            return Ok(None);
        }
        rate_distortion_hamming(self.source.pmf(), self.target_error).map(Some)
    }
}

/// Minimum rate when skill levels are unknown to everyone:
/// `(H(B) − H_N(ε̂)) / (log2 M − H_M(E ε))`.
pub fn rmin_sl_uk(query: &BoundQuery) -> Result<RateBound> {
    let Some(bits) = query.required_bits()? else {
        return Ok(RateBound::Feasible(0.0));
    };
    let mean = query.population.mean_skill().clamp(0.0, 1.0);
    let capacity =
        (query.alphabet as f64).log2() - symmetric_entropy(mean, query.alphabet)?.bits();
    Ok(RateBound::from_ratio(bits, capacity))
}

/// Minimum rate when the decoder knows each worker's skill level:
/// `(H(B) − H_N(ε̂)) / (log2 M − E H_M(ε))`.
pub fn rmin_sl_cs(query: &BoundQuery) -> Result<RateBound> {
    let Some(bits) = query.required_bits()? else {
        return Ok(RateBound::Feasible(0.0));
    };
    let capacity = (query.alphabet as f64).log2()
        - query.population.expected_symmetric_entropy(query.alphabet)?;
    Ok(RateBound::from_ratio(bits, capacity))
}

/// Minimum rate for binary uniform labels with an `SHC(q)` pool whose
/// queries offer `M` choices: `(1 − H_b(ε̂)) / (q log2 M)` for `ε̂ ≤ 0.5`.
pub fn rmin_shc(hammer_prob: f64, alphabet: usize, target_error: f64) -> Result<RateBound> {
    check_probability("q", hammer_prob)?;
    check_probability("target_error", target_error)?;
    if alphabet < 2 {
        return Err(Error::invalid("M", format!("{alphabet} < 2")));
    }
    if target_error > 0.5 {
        return Ok(RateBound::Feasible(0.0));
    }
    let bits = 1.0 - binary_entropy(target_error)?.bits();
    Ok(RateBound::from_ratio(
        bits,
        hammer_prob * (alphabet as f64).log2(),
    ))
}

/// Per-item error of a single spammer response at arity `k` for binary
/// labels. For `k = 1` the spammer guesses a label, which is wrong half the
/// time.
pub fn spammer_error_for_arity(k: usize) -> Result<f64> {
    match k {
        0 => Err(Error::invalid("k", "a query needs at least one item")),
        1 => Ok(0.5),
        _ => spammer_error_prob(k),
    }
}

/// Oracle-decoder error of kIC at `rate` queries per item:
/// `ε̄_S(k) · (1 − q)^(k R)`.
pub fn kic_error_at_rate(k: usize, hammer_prob: f64, rate: f64) -> Result<f64> {
    check_probability("q", hammer_prob)?;
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::OutOfRange {
            name: "rate",
            value: rate,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    let spam = spammer_error_for_arity(k)?;
    Ok(spam * (1.0 - hammer_prob).powf(k as f64 * rate))
}

/// Rate below which no kIC decoder reaches error `ε̂` under `SHC(q)`:
/// `ln(ε̂ / ε̄_S(k)) / (k ln(1 − q))`.
///
/// Zero once `ε̂ ≥ ε̄_S(k)` or `q = 1`. Infeasible when `q = 0` or `ε̂ = 0`
/// with the threshold otherwise positive.
pub fn kic_rate_threshold(k: usize, hammer_prob: f64, target_error: f64) -> Result<RateBound> {
    check_probability("q", hammer_prob)?;
    check_probability("target_error", target_error)?;
    let spam = spammer_error_for_arity(k)?;
    if target_error >= spam || hammer_prob == 1.0 {
        return Ok(RateBound::Feasible(0.0));
    }
    if hammer_prob == 0.0 || target_error == 0.0 {
        return Ok(RateBound::Infeasible);
    }
    let rate = (target_error / spam).ln() / (k as f64 * (1.0 - hammer_prob).ln());
    Ok(RateBound::Feasible(rate))
}

/// Parameters for the kIC-versus-information-limit comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure2Params {
    pub hammer_prob: f64,
    pub arities: Vec<usize>,
    pub error_grid: Vec<f64>,
    /// Alphabet for the information-theoretic curve. Defaults to
    /// `2^(k_max − 1)`, and to 2 when only direct (`k = 1`) queries are listed.
    pub alphabet_override: Option<usize>,
}

impl Figure2Params {
    /// `ε̂ = 0.005, 0.010, …, 0.495`.
    pub fn default_grid() -> Vec<f64> {
        (1..100).map(|i| i as f64 / 200.0).collect()
    }

    pub fn information_alphabet(&self) -> Result<usize> {
        if let Some(m) = self.alphabet_override {
            return Ok(m);
        }
        let k_max = self
            .arities
            .iter()
            .copied()
            .max()
            .ok_or_else(|| Error::invalid("k", "at least one arity is required"))?;
        if k_max > 64 {
            return Err(Error::invalid("k", format!("{k_max} too large for 2^(k-1)")));
        }
        Ok(if k_max <= 1 { 2 } else { 1usize << (k_max - 1) })
    }
}

impl Default for Figure2Params {
    fn default() -> Self {
        Figure2Params {
            hammer_prob: 0.3,
            arities: vec![2, 3, 4],
            error_grid: Self::default_grid(),
            alphabet_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub name: String,
    pub points: Vec<(f64, RateBound)>,
}

impl Curve {
    /// True when the rate never increases along the (ascending) grid.
    pub fn is_non_increasing(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].1.as_f64() <= w[0].1.as_f64() + ZERO_TOLERANCE)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure2Table {
    pub curves: Vec<Curve>,
}

/// A grid point where a kIC curve falls below the information limit.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceViolation {
    pub curve: String,
    pub target_error: f64,
    pub kic_rate: f64,
    pub limit_rate: f64,
}

impl Figure2Table {
    pub const LIMIT_CURVE: &'static str = "it-limit";

    pub fn curve(&self, name: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.name == name)
    }

    /// Grid points where a kIC curve lies strictly below the information
    /// limit while both rates are positive and finite.
    pub fn dominance_violations(&self) -> Vec<DominanceViolation> {
        let Some(limit) = self.curve(Self::LIMIT_CURVE) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for curve in self.curves.iter().filter(|c| c.name != Self::LIMIT_CURVE) {
            for (&(eps, kic), &(_, it)) in curve.points.iter().zip(&limit.points) {
                if let (Some(a), Some(b)) = (kic.value(), it.value()) {
                    if a > 0.0 && b > 0.0 && a < b {
                        out.push(DominanceViolation {
                            curve: curve.name.clone(),
                            target_error: eps,
                            kic_rate: a,
                            limit_rate: b,
                        });
                    }
                }
            }
        }
        out
    }
}

pub fn kic_curve_name(k: usize) -> String {
    format!("kic-k{k}")
}

/// The information-theoretic curve followed by one kIC threshold curve per
/// arity, all evaluated on `params.error_grid`.
pub fn figure2_table(params: &Figure2Params) -> Result<Figure2Table> {
    check_probability("q", params.hammer_prob)?;
    let alphabet = params.information_alphabet()?;
    let limit = params
        .error_grid
        .iter()
        .map(|&eps| Ok((eps, rmin_shc(params.hammer_prob, alphabet, eps)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut curves = vec![Curve {
        name: Figure2Table::LIMIT_CURVE.to_string(),
        points: limit,
    }];
    for &k in &params.arities {
        let points = params
            .error_grid
            .iter()
            .map(|&eps| Ok((eps, kic_rate_threshold(k, params.hammer_prob, eps)?)))
            .collect::<Result<Vec<_>>>()?;
        curves.push(Curve {
            name: kic_curve_name(k),
            points,
        });
    }
    Ok(Figure2Table { curves })
}
