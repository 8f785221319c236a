//! Closed forms for a queue whose service and visit times are both
//! exponential (service rate μ, visit rate γ). These do not go through any
//! quadrature and serve as a cross-check of the general path.

use super::cycle_moments;
use crate::error::Result;
use crate::system::SystemSpec;

fn rates(sys: &SystemSpec, i: usize) -> Option<(f64, f64)> {
    let q = sys.queue(i);
    Some((q.service.exponential_rate()?, q.visit.exponential_rate()?))
}

/// `E[S_i] = (γ E[C_{/i}] + 1)^2 / (γ μ E[C]) + E[C_{/i}^2] / (2 E[C])`,
/// or `None` when queue i is not exponential/exponential.
pub fn sojourn_mean(sys: &SystemSpec, i: usize) -> Option<f64> {
    let (mu, gamma) = rates(sys, i)?;
    let c = cycle_moments(sys);
    let ec = c.mean;
    let rest = c.mean_without[i];
    Some((gamma * rest + 1.0).powi(2) / (gamma * mu * ec) + c.second_moment_without[i] / (2.0 * ec))
}

/// The sojourn transform at `s > 0` in closed form.
pub fn sojourn_lst(sys: &SystemSpec, i: usize, s: f64) -> Option<Result<f64>> {
    let (mu, gamma) = rates(sys, i)?;
    let ec = cycle_moments(sys).mean;
    let rest = || -> Result<f64> {
        let mut prod = 1.0;
        for (k, q) in sys.queues().iter().enumerate() {
            if k != i {
                prod *= q.visit.lst(s)?;
            }
            prod *= q.switch.lst(s)?;
        }
        Ok(prod)
    };
    Some(rest().map(|c| {
        let first = 1.0 / ec / (gamma + mu + s) * mu / gamma;
        let second = 1.0 / ec / (gamma + mu + s) * mu * c / (gamma + mu + s - gamma * c);
        let third = (1.0 - c) / (s * ec) * mu / (gamma + mu - gamma * c) * mu / (mu + s);
        first + second + third
    }))
}
