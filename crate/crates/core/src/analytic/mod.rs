//! Exact performance measures of the polling system.
//!
//! Everything here is a pure function of a [`SystemSpec`]. Integrals that
//! have no closed form are evaluated by adaptive quadrature, controlled by a
//! [`QuadratureConfig`].

pub mod exponential;
mod means;
mod pgf;
mod sojourn;

pub use means::{polling_means, PollingMeans};
pub use pgf::pgf_eval;
pub use sojourn::{
    sojourn_lst, sojourn_mean, sojourn_metrics, sojourn_phases, SojournMetrics, SojournPhases,
};

use crate::distributions::{expected_min, Distribution};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::system::SystemSpec;

/// Per-queue quantities that every other measure is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQueueQuantities {
    /// `p_i = P[B_i <= V_i]`, a service completing within one visit.
    pub completion_probability: f64,
    /// `E[Λ_i(V_i)]`, mean number of in-visit arrivals left behind at the visit end.
    pub mean_leftover: f64,
    /// `E[min(B_i, V_i)]`.
    pub expected_min: f64,
    /// `P[B_i > V_i^res]` for the stationary residual visit time.
    pub exceeds_residual_visit: f64,
    /// `E[N_i] = (1 - p_i) / p_i`, failed visits before completion.
    pub expected_failed_visits: f64,
}

/// `P[B <= V]` with ties counted as completions.
pub(crate) fn completion_probability(
    service: &Distribution,
    visit: &Distribution,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if let (Some(mu), Some(gamma)) = (service.exponential_rate(), visit.exponential_rate()) {
        return Ok(mu / (mu + gamma));
    }
    if let Some(atoms) = visit.atoms() {
        return Ok(atoms.iter().map(|&(v, q)| q * service.cdf(v)).sum());
    }
    // V is continuous from here on, so P[V >= b] = P[V > b].
    let p = service.expect(|b| visit.survival(b), &visit.breakpoints(), cfg)?;
    Ok(p.clamp(0.0, 1.0))
}

pub fn derived_quantities(
    sys: &SystemSpec,
    i: usize,
    cfg: &QuadratureConfig,
) -> Result<DerivedQueueQuantities> {
    sys.check_index(i)?;
    let q = sys.queue(i);
    let p = completion_probability(&q.service, &q.visit, cfg)?;
    if p <= 0.0 {
        return Err(Error::Model {
            queue: i + 1,
            reason: "services never complete within a visit (p = 0), so sojourn times diverge"
                .into(),
        });
    }
    let e_min = expected_min(&q.service, &q.visit, cfg)?;
    Ok(DerivedQueueQuantities {
        completion_probability: p,
        mean_leftover: q.arrival_rate * e_min,
        expected_min: e_min,
        exceeds_residual_visit: (e_min / q.visit.mean()).min(1.0),
        expected_failed_visits: (1.0 - p) / p,
    })
}

/// First two moments of the cycle and of the cycle minus one visit.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleMoments {
    /// `E[C]`.
    pub mean: f64,
    /// `E[C_{/i}] = E[C] - E[V_i]`.
    pub mean_without: Vec<f64>,
    /// `E[C_{/i}^2]`.
    pub second_moment_without: Vec<f64>,
}

impl CycleMoments {
    /// `E[C_{/i}^res] = E[C_{/i}^2] / (2 E[C_{/i}])`.
    pub fn residual_mean_without(&self, i: usize) -> f64 {
        self.second_moment_without[i] / (2.0 * self.mean_without[i])
    }
}

/// Visit and switch-over times are independent, so variances add.
pub fn cycle_moments(sys: &SystemSpec) -> CycleMoments {
    let queues = sys.queues();
    let mean: f64 = queues.iter().map(|q| q.visit.mean() + q.switch.mean()).sum();
    let var_switch: f64 = queues.iter().map(|q| q.switch.variance()).sum();
    let var_visits: f64 = queues.iter().map(|q| q.visit.variance()).sum();
    let mut mean_without = Vec::with_capacity(queues.len());
    let mut second_moment_without = Vec::with_capacity(queues.len());
    for q in queues {
        let m = mean - q.visit.mean();
        let var = var_switch + var_visits - q.visit.variance();
        mean_without.push(m);
        second_moment_without.push(var.max(0.0) + m * m);
    }
    CycleMoments {
        mean,
        mean_without,
        second_moment_without,
    }
}
