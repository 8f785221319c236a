//! Sojourn time of a customer of queue i.
//!
//! A tagged customer arrives either during a visit to its own queue (and is
//! served at once, finishing iff its service fits in the residual visit) or
//! during the rest of the cycle, in which case it waits for the residual of
//! `C_{/i}`. Every later attempt succeeds independently with probability
//! `p_i`, so the number of failed visits is geometric.

use super::{cycle_moments, derived_quantities, CycleMoments, DerivedQueueQuantities};
use crate::distributions::{joint_survival_integral, min_lst};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::system::SystemSpec;

/// Mean sojourn times and sampled transforms for every queue.
#[derive(Debug, Clone, PartialEq)]
pub struct SojournMetrics {
    pub mean: Vec<f64>,
    pub s_grid: Vec<f64>,
    /// `lst[i][k] = E[exp(-s_k S_i)]`.
    pub lst: Vec<Vec<f64>>,
}

/// The three arrival cases, with their probabilities and conditional means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SojournPhases {
    /// Arrival during the own visit, served within it.
    pub served_on_arrival: PhaseTerm,
    /// Arrival during the own visit, service outlasts the visit.
    pub missed_on_arrival: PhaseTerm,
    /// Arrival while the servers are elsewhere.
    pub arrived_elsewhere: PhaseTerm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTerm {
    pub probability: f64,
    pub conditional_mean: f64,
}

impl SojournPhases {
    pub fn mean(&self) -> f64 {
        [self.served_on_arrival, self.missed_on_arrival, self.arrived_elsewhere]
            .iter()
            .map(|t| t.probability * t.conditional_mean)
            .sum()
    }
}

struct Parts {
    derived: DerivedQueueQuantities,
    cycle: CycleMoments,
}

fn parts(sys: &SystemSpec, i: usize, cfg: &QuadratureConfig) -> Result<Parts> {
    Ok(Parts {
        derived: derived_quantities(sys, i, cfg)?,
        cycle: cycle_moments(sys),
    })
}

pub fn sojourn_phases(sys: &SystemSpec, i: usize, cfg: &QuadratureConfig) -> Result<SojournPhases> {
    let Parts { derived, cycle } = parts(sys, i, cfg)?;
    let q = sys.queue(i);
    let (service, visit) = (&q.service, &q.visit);
    let ev = visit.mean();
    let ec = cycle.mean;
    let ec_rest = cycle.mean_without[i];
    let p = derived.completion_probability;

    // E[B; B <= V^res] with P[V^res >= b] = E[(V - b)^+] / E[V].
    let served_mass = service.expect(|b| b * visit.excess_mean(b), &visit.breakpoints(), cfg)? / ev;
    // E[V^res; B > V^res] = (1/E[V]) ∫ x P[V > x] P[B > x] dx.
    let missed_mass = joint_survival_integral(visit, service, |x| x, cfg)? / ev;
    let p_missed = derived.exceeds_residual_visit;
    let p_served = 1.0 - p_missed;
    let after_failure = (ec_rest + derived.expected_min) / p;

    let in_visit = ev / ec;
    let served_on_arrival = PhaseTerm {
        probability: in_visit * p_served,
        conditional_mean: if p_served > 0.0 { served_mass / p_served } else { 0.0 },
    };
    let missed_on_arrival = PhaseTerm {
        probability: in_visit * p_missed,
        conditional_mean: if p_missed > 0.0 {
            missed_mass / p_missed + after_failure
        } else {
            after_failure
        },
    };
    let arrived_elsewhere = PhaseTerm {
        probability: ec_rest / ec,
        conditional_mean: cycle.residual_mean_without(i)
            + derived.expected_failed_visits * ec_rest
            + derived.expected_min / p,
    };
    Ok(SojournPhases {
        served_on_arrival,
        missed_on_arrival,
        arrived_elsewhere,
    })
}

/// `E[S_i]`.
pub fn sojourn_mean(sys: &SystemSpec, i: usize, cfg: &QuadratureConfig) -> Result<f64> {
    sys.check_index(i)?;
    Ok(sojourn_phases(sys, i, cfg)?.mean())
}

/// `E[exp(-s S_i)]` for real `s >= 0`.
///
/// The factor for the cycles spent after a failed first attempt treats the
/// number of further cycles and the service/visit minima as independent
/// geometric sums.
pub fn sojourn_lst(sys: &SystemSpec, i: usize, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    sys.check_index(i)?;
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("transform argument must be >= 0, got {s}")));
    }
    let Parts { derived, cycle } = parts(sys, i, cfg)?;
    if s == 0.0 {
        return Ok(1.0);
    }
    let q = sys.queue(i);
    let (service, visit) = (&q.service, &q.visit);
    let p = derived.completion_probability;
    let ec = cycle.mean;

    // ln C~_{/i}(s) and 1 - C~_{/i}(s), both free of cancellation.
    let mut log_rest = 0.0;
    for (k, other) in sys.queues().iter().enumerate() {
        if k != i {
            log_rest += (-other.visit.lst_complement(s)?).ln_1p();
        }
        log_rest += (-other.switch.lst_complement(s)?).ln_1p();
    }
    let rest = log_rest.exp();
    let rest_complement = -log_rest.exp_m1();
    let min_transform = min_lst(service, visit, s, cfg)?;
    let geometric = |x: f64| p * x / (1.0 - (1.0 - p) * x);

    let served = service.expect(
        |b| (-s * b).exp() * visit.excess_mean(b),
        &visit.breakpoints(),
        cfg,
    )?;
    let missed = joint_survival_integral(visit, service, |x| (-s * x).exp(), cfg)?;

    let term_served = served / ec;
    let term_missed = missed / ec * geometric(rest * min_transform);
    let term_elsewhere = rest_complement / (s * ec) * (p / (1.0 - (1.0 - p) * rest))
        * geometric(min_transform);
    Ok(term_served + term_missed + term_elsewhere)
}

/// Means for every queue and transforms on `s_grid`.
pub fn sojourn_metrics(sys: &SystemSpec, s_grid: &[f64], cfg: &QuadratureConfig) -> Result<SojournMetrics> {
    let n = sys.len();
    let mean = (0..n)
        .map(|i| sojourn_mean(sys, i, cfg))
        .collect::<Result<Vec<_>>>()?;
    let lst = (0..n)
        .map(|i| {
            s_grid
                .iter()
                .map(|&s| sojourn_lst(sys, i, s, cfg))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SojournMetrics {
        mean,
        s_grid: s_grid.to_vec(),
        lst,
    })
}
