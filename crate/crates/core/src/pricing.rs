//! Query pricing from the kIC rate threshold.

use serde::{Deserialize, Serialize};

use crate::bounds::kic_rate_threshold;
use crate::error::{check_range, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceQuote {
    pub price_per_query: f64,
    pub k: usize,
}

impl PriceQuote {
    pub fn new(price_per_query: f64, k: usize) -> Result<Self> {
        check_range("price", price_per_query, 0.0, f64::MAX)?;
        check_arity("k", k)?;
        Ok(PriceQuote { price_per_query, k })
    }
}

fn check_arity(name: &'static str, k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::invalid(name, "arity must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_pair(k1: usize, k2: usize) -> Result<()> {
    for (name, k) in [("k1", k1), ("k2", k2)] {
        if k < 2 {
            return Err(Error::invalid(name, format!("{k} < 2")));
        }
    }
    Ok(())
}

/// Total spend `π · n · R`.
pub fn campaign_cost(price: &PriceQuote, n_items: u64, rate: f64) -> Result<f64> {
    check_range("rate", rate, 0.0, f64::MAX)?;
    Ok(price.price_per_query * n_items as f64 * rate)
}

/// Highest per-query price worth paying for `k2`-item queries when
/// `k1`-item queries cost `price_k1`, using the rule `π(k2) ≲ π(k1)·k2/k1`.
pub fn price_threshold(k1: usize, k2: usize, price_k1: f64) -> Result<f64> {
    check_pair(k1, k2)?;
    if !(price_k1.is_finite() && price_k1 > 0.0) {
        return Err(Error::invalid("price", format!("{price_k1} must be positive")));
    }
    Ok(price_k1 * k2 as f64 / k1 as f64)
}

/// Same threshold with the ratio of actual kIC rate thresholds `R1/R2`
/// instead of `k2/k1`, so the spammer-error dependence on `k` is kept.
pub fn price_threshold_exact(
    k1: usize,
    k2: usize,
    hammer_prob: f64,
    target_error: f64,
    price_k1: f64,
) -> Result<f64> {
    check_pair(k1, k2)?;
    if !(price_k1.is_finite() && price_k1 > 0.0) {
        return Err(Error::invalid("price", format!("{price_k1} must be positive")));
    }
    let rate = |name: &'static str, k: usize| -> Result<f64> {
        match kic_rate_threshold(k, hammer_prob, target_error)?.value() {
            Some(r) if r > 0.0 => Ok(r),
            _ => Err(Error::invalid(
                name,
                format!("rate threshold for k={k} is not finite and positive"),
            )),
        }
    };
    let r1 = rate("k1", k1)?;
    if k1 == k2 {
        return Ok(price_k1);
    }
    let r2 = rate("k2", k2)?;
    Ok(price_k1 * r1 / r2)
}
