use std::time::{Duration, Instant};

use crate::capacity::upper_bound;
use crate::error::{Error, Result};
use crate::geometry::distance_extremes;
use crate::optimizer::search_placements;

use super::config::ExperimentConfig;

/// One point of a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// `None` when the bound's denominator is not positive.
    pub upper_bound: Option<f64>,
    /// Best transport capacity found by the placement search, if one was run.
    pub achievable: Option<f64>,
    pub statuses_evaluated: u128,
    /// Not written to CSV, so output stays reproducible.
    pub wall_time: Duration,
}

fn bound_at(cfg: &ExperimentConfig) -> Result<Option<f64>> {
    let room = cfg.room()?;
    let (d_min, d_max) = distance_extremes(&room, cfg.d_min, cfg.d_max)?;
    let n = if cfg.elements_per_array == 0 {
        0
    } else {
        cfg.total_elements()
    };
    match upper_bound(&cfg.params, cfg.pairs, n, d_min, d_max) {
        Ok(b) => Ok(Some(b)),
        Err(Error::BoundInvalid { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Evaluates the closed-form capacity bound at each sweep value.
pub fn run_upper_bound_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config
        .sweep_values
        .iter()
        .map(|&value| {
            let start = Instant::now();
            let upper_bound = bound_at(&config.at(value))?;
            Ok(SweepRow {
                value,
                upper_bound,
                achievable: None,
                statuses_evaluated: 0,
                wall_time: start.elapsed(),
            })
        })
        .collect()
}

/// Runs the joint placement and phase search at each sweep value.
///
/// Every row uses the same seed, so rows that share a status space also share
/// the sampled statuses.
pub fn run_achievable_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config
        .sweep_values
        .iter()
        .map(|&value| {
            let start = Instant::now();
            let cfg = config.at(value);
            let room = cfg.room()?;
            let layouts = cfg.layouts()?;
            let result = search_placements(
                &room,
                &layouts,
                cfg.pairs,
                &cfg.params,
                &cfg.phase,
                &cfg.placement,
            )?;
            Ok(SweepRow {
                value,
                upper_bound: bound_at(&cfg)?,
                achievable: Some(result.best_capacity),
                statuses_evaluated: result.statuses_evaluated,
                wall_time: start.elapsed(),
            })
        })
        .collect()
}
