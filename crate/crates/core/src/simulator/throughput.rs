//! One cycle simulated from a fixed initial state.

use rayon::prelude::*;

use super::rng::{stream, Purpose};
use super::{ArrivalStream, Estimate};
use crate::error::{Error, Result};
use crate::optimizer::{TourMode, TourState};
use crate::system::SystemSpec;

/// Mean number of services completed during one tour in `order`, starting
/// with `state.n` customers, over `reps` independent tours.
///
/// Streams are keyed by queue, not by position in the tour, so two orders
/// run with the same seed share their random numbers and their difference
/// has a much smaller variance than either estimate.
pub fn single_cycle_throughput(
    sys: &SystemSpec,
    state: &TourState,
    order: &[usize],
    reps: u64,
    seed: u64,
) -> Result<Estimate> {
    state.check(sys)?;
    state.check_order(order)?;
    if reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    let counts: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| one_tour(sys, state, order, rep, seed) as f64)
        .collect();
    Ok(Estimate::from_units(counts))
}

fn one_tour(sys: &SystemSpec, state: &TourState, order: &[usize], rep: u64, seed: u64) -> u64 {
    let n = sys.len();
    let mut arrivals: Vec<ArrivalStream> = (0..n)
        .map(|k| ArrivalStream::new(sys.queue(k).arrival_rate, stream(seed, rep, k, Purpose::Arrivals)))
        .collect();
    let mut clock = 0.0;
    let mut served = 0;
    for &i in order {
        let q = sys.queue(i);
        let mut service_rng = stream(seed, rep, i, Purpose::Service);
        let mut visit_rng = stream(seed, rep, i, Purpose::Visit);
        if state.mode == TourMode::CentralPoint {
            let approach = q.approach.as_ref().expect("checked central point laws");
            clock += approach.sample(&mut stream(seed, rep, i, Purpose::Approach));
        }
        // Everyone present at the visit start.
        let mut present = state.n[i];
        while arrivals[i].take_before(clock).is_some() {
            present += 1;
        }
        let visit = q.visit.sample(&mut visit_rng);
        let end = clock + visit;
        for _ in 0..present {
            if q.service.sample(&mut service_rng) <= visit {
                served += 1;
            }
        }
        while let Some(a) = arrivals[i].take_before(end) {
            if q.service.sample(&mut service_rng) <= end - a {
                served += 1;
            }
        }
        clock = end;
        clock += match state.mode {
            TourMode::Serial => q.switch.sample(&mut stream(seed, rep, i, Purpose::Switch)),
            TourMode::CentralPoint => q
                .return_trip
                .as_ref()
                .expect("checked central point laws")
                .sample(&mut stream(seed, rep, i, Purpose::Return)),
        };
    }
    served
}
