use super::{derived_quantities, DerivedQueueQuantities};
use crate::error::Result;
use crate::quadrature::QuadratureConfig;
use crate::system::SystemSpec;

/// Mean queue lengths at polling instants and at visit ends.
#[derive(Debug, Clone, PartialEq)]
pub struct PollingMeans {
    /// `at_polling[i][j] = E[X_i^j]`: customers in queue j when queue i is polled.
    pub at_polling: Vec<Vec<f64>>,
    /// `at_visit_end[i][j] = E[Y_i^j]`: customers in queue j when the visit to queue i ends.
    pub at_visit_end: Vec<Vec<f64>>,
    pub derived: Vec<DerivedQueueQuantities>,
}

pub fn polling_means(sys: &SystemSpec, cfg: &QuadratureConfig) -> Result<PollingMeans> {
    let n = sys.len();
    let derived = (0..n)
        .map(|j| derived_quantities(sys, j, cfg))
        .collect::<Result<Vec<_>>>()?;
    let queues = sys.queues();
    let visit: Vec<f64> = queues.iter().map(|q| q.visit.mean()).collect();
    let switch: Vec<f64> = queues.iter().map(|q| q.switch.mean()).collect();
    let total_visit: f64 = visit.iter().sum();
    let total_switch: f64 = switch.iter().sum();

    let mut x = vec![vec![0.0; n]; n];
    for j in 0..n {
        let lambda = queues[j].arrival_rate;
        let d = &derived[j];
        let diag = (lambda * (total_visit - visit[j]) + d.mean_leftover + lambda * total_switch)
            / d.completion_probability;
        x[j][j] = diag;
        // Walk forward from the end of queue j's visit to each later polling instant.
        let mut acc = diag * (1.0 - d.completion_probability) + d.mean_leftover + lambda * switch[j];
        let mut i = (j + 1) % n;
        while i != j {
            x[i][j] = acc;
            acc += lambda * (visit[i] + switch[i]);
            i = (i + 1) % n;
        }
    }

    let mut y = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            y[i][j] = if i == j {
                (1.0 - derived[i].completion_probability) * x[i][i] + derived[i].mean_leftover
            } else {
                x[i][j] + queues[j].arrival_rate * visit[i]
            };
        }
    }

    Ok(PollingMeans {
        at_polling: x,
        at_visit_end: y,
        derived,
    })
}
