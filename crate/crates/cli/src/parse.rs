//! Parsers for the list-valued flags.

use crowdrate::worker::SkillPopulation;
use crowdrate::SourceModel;

use crate::error::{CliError, Result};

/// Longest grid a range spec may expand to.
const MAX_GRID_POINTS: usize = 1_000_000;

fn number(field: &str, text: &str) -> Result<f64> {
    let value: f64 = text
        .trim()
        .parse()
        .map_err(|_| CliError::config(field, format!("`{}` is not a number", text.trim())))?;
    if !value.is_finite() {
        return Err(CliError::config(field, format!("`{}` is not finite", text.trim())));
    }
    Ok(value)
}

/// `a,b,c` or `start:stop:step` (both ends inclusive).
pub fn grid(field: &str, text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(CliError::config(field, "empty grid"));
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(CliError::config(field, "a range must be start:stop:step"));
        };
        let (start, stop, step) = (number(field, start)?, number(field, stop)?, number(field, step)?);
        if step <= 0.0 {
            return Err(CliError::config(field, "range step must be positive"));
        }
        if stop < start {
            return Err(CliError::config(field, "range stop is below its start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() + 1.0;
        if count > MAX_GRID_POINTS as f64 {
            return Err(CliError::config(field, format!("more than {MAX_GRID_POINTS} points")));
        }
        // Index-based so that 0.1 + 0.1 + 0.1 drift never accumulates, then
        // snapped to 12 decimals so `0.3` stays `0.3`.
        return Ok((0..count as usize)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect());
    }
    text.split(',').map(|t| number(field, t)).collect()
}

/// Non-negative integers: `1,2,4` or `start:stop:step`.
pub fn integer_grid(field: &str, text: &str) -> Result<Vec<u64>> {
    grid(field, text)?
        .into_iter()
        .map(|v| {
            if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
                Err(CliError::config(field, format!("`{v}` is not a non-negative integer")))
            } else {
                Ok(v as u64)
            }
        })
        .collect()
}

pub fn source(text: Option<&str>) -> Result<SourceModel> {
    match text {
        None => SourceModel::uniform(2).map_err(|e| CliError::from_core("source", e)),
        Some(text) => {
            let probabilities = text
                .split(',')
                .map(|t| number("source", t))
                .collect::<Result<Vec<_>>>()?;
            SourceModel::from_probabilities(probabilities)
                .map_err(|e| CliError::renamed("source", e))
        }
    }
}

/// `eps:prob,eps:prob,...`, or a bare `eps` for a single skill level.
pub fn population(text: &str) -> Result<SkillPopulation> {
    let text = text.trim();
    let invalid = |e: crowdrate::Error| CliError::renamed("population", e);
    if !text.contains(':') && !text.contains(',') {
        return SkillPopulation::single(number("population", text)?).map_err(invalid);
    }
    let levels = text
        .split(',')
        .map(|entry| {
            let (eps, prob) = entry.split_once(':').ok_or_else(|| {
                CliError::config("population", format!("`{}` is not eps:prob", entry.trim()))
            })?;
            Ok((number("population", eps)?, number("population", prob)?))
        })
        .collect::<Result<Vec<_>>>()?;
    SkillPopulation::new(levels).map_err(invalid)
}
