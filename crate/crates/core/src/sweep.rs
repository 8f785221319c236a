//! Parameter sweeps of the mean sojourn time.
//!
//! One moment of one queue's service or visit law is moved along a grid
//! while the other moment stays fixed; at every grid point a mixed-Erlang
//! (scv <= 1) or hyperexponential (scv > 1) law is fitted to the two moments
//! and the mean sojourn times are recomputed.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::sojourn_mean;
use crate::distributions::fit_two_moments;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::system::SystemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    ServiceMean,
    ServiceScv,
    VisitMean,
    VisitScv,
}

impl SweepTarget {
    fn is_mean(self) -> bool {
        matches!(self, Self::ServiceMean | Self::VisitMean)
    }
}

/// Explicit points or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Points(Vec<f64>),
    Range { from: f64, to: f64, points: usize },
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match *self {
            Self::Points(ref p) => p.clone(),
            Self::Range { from, to, points } => {
                if points < 2 {
                    return Err(Error::Config("a grid range needs at least 2 points".into()));
                }
                (0..points)
                    .map(|k| from + (to - from) * k as f64 / (points - 1) as f64)
                    .collect()
            }
        };
        if v.is_empty() || v.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(Error::Config("grid values must be finite and > 0".into()));
        }
        Ok(v)
    }
}

/// The only fit rule: mixed Erlang for scv <= 1, hyperexponential above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitRule {
    #[default]
    TwoMoment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// 1-based queue number.
    pub queue: usize,
    pub target: SweepTarget,
    pub grid: Grid,
    /// Value of the moment that is not swept; defaults to that of the
    /// configured law.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hold: Option<f64>,
    #[serde(default)]
    pub fit: FitRule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub grid_value: f64,
    /// `Σ λ_i E[S_i] / Σ λ_i`.
    pub weighted: f64,
    pub per_queue: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Columns `grid_value,ES_weighted,ES_1,...,ES_N`.
    pub fn to_csv(&self) -> String {
        let n = self.rows.first().map_or(0, |r| r.per_queue.len());
        let mut out = String::from("grid_value,ES_weighted");
        for i in 1..=n {
            let _ = write!(out, ",ES_{i}");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{},{}", r.grid_value, r.weighted);
            for v in &r.per_queue {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn weighted(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.weighted).collect()
    }

    pub fn grid(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.grid_value).collect()
    }
}

/// The system at one grid point.
pub fn system_at(sys: &SystemSpec, sweep: &SweepConfig, value: f64) -> Result<SystemSpec> {
    if sweep.queue == 0 || sweep.queue > sys.len() {
        return Err(Error::Config(format!(
            "sweep.queue must be between 1 and {}, got {}",
            sys.len(),
            sweep.queue
        )));
    }
    let i = sweep.queue - 1;
    let mut q = sys.queue(i).clone();
    let law = match sweep.target {
        SweepTarget::ServiceMean | SweepTarget::ServiceScv => &q.service,
        SweepTarget::VisitMean | SweepTarget::VisitScv => &q.visit,
    };
    let (mean, scv) = if sweep.target.is_mean() {
        (value, sweep.hold.map_or_else(|| law.scv(), Ok)?)
    } else {
        (sweep.hold.unwrap_or_else(|| law.mean()), value)
    };
    let fitted = fit_two_moments(mean, scv)
        .map_err(|e| Error::Domain(format!("fit at grid value {value}: {e}")))?;
    match sweep.target {
        SweepTarget::ServiceMean | SweepTarget::ServiceScv => q.service = fitted,
        SweepTarget::VisitMean | SweepTarget::VisitScv => q.visit = fitted,
    }
    sys.with_queue(i, q)
}

/// Evaluates the sweep; grid points run in parallel.
pub fn run_sweep(sys: &SystemSpec, sweep: &SweepConfig, cfg: &QuadratureConfig) -> Result<SweepTable> {
    let grid = sweep.grid.values()?;
    let rows = grid
        .par_iter()
        .map(|&value| {
            let s = system_at(sys, sweep, value)?;
            let per_queue = (0..s.len())
                .map(|i| sojourn_mean(&s, i, cfg))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Domain(format!("grid value {value}: {e}")))?;
            let rates = s.arrival_rates();
            let total: f64 = rates.iter().sum();
            let weighted = if total > 0.0 {
                rates.iter().zip(&per_queue).map(|(l, m)| l * m).sum::<f64>() / total
            } else {
                f64::NAN
            };
            Ok(SweepRow {
                grid_value: value,
                weighted,
                per_queue,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { rows })
}

/// Position of the increment `|y[k+1] - y[k]|` whose interval touches
/// `boundary`, if that increment exceeds `factor` times the median one.
pub fn jump_at(grid: &[f64], values: &[f64], boundary: f64, factor: f64) -> Option<usize> {
    if grid.len() < 3 || grid.len() != values.len() {
        return None;
    }
    let steps: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let mut sorted = steps.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let largest = (0..steps.len()).max_by(|&a, &b| steps[a].total_cmp(&steps[b]))?;
    let touches = grid[largest] <= boundary && boundary <= grid[largest + 1]
        || (grid[largest] - boundary).abs() < 1e-12
        || (grid[largest + 1] - boundary).abs() < 1e-12;
    (touches && steps[largest] > factor * median).then_some(largest)
}
