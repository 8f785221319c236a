//! Expected number of services completed in one cycle and the visiting
//! orders that maximize or minimize it.
//!
//! Serial mode: the servers visit every queue in the given order, switching
//! from queue k to the next one in `D_k`. Central-point mode: the servers
//! travel from a hub to each non-empty queue (`E_k`) and back (`R_k`).
//!
//! In both modes the expected throughput is a constant plus a sum over
//! pairs `(k before i)` of `λ_i p_i · (travel time of k)`, so swapping two
//! neighbours changes it by a product difference, and sorting by the index
//! `λ_i p_i / (time spent on i)` is optimal.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::completion_probability;
use crate::distributions::expected_min;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::system::SystemSpec;

/// Largest number of visited queues `brute_force_order` accepts.
pub const BRUTE_FORCE_LIMIT: usize = 9;

/// Relative tolerance under which two throughputs count as tied.
const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TourMode {
    #[default]
    Serial,
    CentralPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    #[default]
    Max,
    Min,
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Self::Max),
            "min" => Ok(Self::Min),
            other => Err(Error::Config(format!("objective must be max or min, got {other:?}"))),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Max => "max",
            Self::Min => "min",
        })
    }
}

impl fmt::Display for TourMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Serial => "serial",
            Self::CentralPoint => "central_point",
        })
    }
}

/// Queue contents at the start of the cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TourState {
    pub n: Vec<u64>,
    pub mode: TourMode,
}

impl TourState {
    pub fn serial(n: Vec<u64>) -> Self {
        Self { n, mode: TourMode::Serial }
    }

    pub fn central_point(n: Vec<u64>) -> Self {
        Self { n, mode: TourMode::CentralPoint }
    }

    /// Queues a tour must visit: all of them in serial mode, the non-empty
    /// ones in central-point mode.
    pub fn visited(&self) -> Vec<usize> {
        match self.mode {
            TourMode::Serial => (0..self.n.len()).collect(),
            TourMode::CentralPoint => (0..self.n.len()).filter(|&i| self.n[i] > 0).collect(),
        }
    }

    pub(crate) fn check(&self, sys: &SystemSpec) -> Result<()> {
        if self.n.len() != sys.len() {
            return Err(Error::Domain(format!(
                "state has {} entries, the system has {} queues",
                self.n.len(),
                sys.len()
            )));
        }
        if self.mode == TourMode::CentralPoint && !sys.has_central_point() {
            return Err(Error::Config(
                "central-point mode needs approach and return laws on every queue".into(),
            ));
        }
        Ok(())
    }

    /// Checks that `order` visits exactly the required queues once each.
    pub(crate) fn check_order(&self, order: &[usize]) -> Result<()> {
        let mut want = self.visited();
        let mut got = order.to_vec();
        got.sort_unstable();
        want.sort_unstable();
        if got != want {
            return Err(Error::Domain(format!(
                "order {} must visit each of {} exactly once",
                one_based(order),
                one_based(&want)
            )));
        }
        Ok(())
    }
}

/// Expected throughput of one tour, with its parts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThroughputReport {
    /// Visited queues, 0-based.
    pub order: Vec<usize>,
    pub mode: TourMode,
    /// `E[θ]`.
    pub expected: f64,
    /// `E[θ_i]` for every queue; 0 for queues not visited.
    pub per_queue: Vec<f64>,
    /// Index of every queue; the optimal order sorts visited queues by it.
    pub indices: Vec<f64>,
    /// The order-independent part of `E[θ]`.
    pub constant: f64,
}

/// Exhaustive search result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceReport {
    pub best: ThroughputReport,
    /// Every order whose throughput ties with the best one.
    pub optimal_orders: Vec<Vec<usize>>,
    /// All orders with their `E[θ]`, best first.
    pub ranking: Vec<(Vec<usize>, f64)>,
}

struct QueueTerms {
    lambda: f64,
    p: f64,
    n: f64,
    /// `λ E[V] - E[Λ(V)]`: in-visit arrivals served within the visit.
    in_visit: f64,
    /// Time the tour spends on the queue and its travel.
    span: f64,
    /// Hub-to-queue travel before the visit starts (central point only).
    approach: f64,
}

struct Evaluator {
    terms: Vec<QueueTerms>,
    mode: TourMode,
}

impl Evaluator {
    fn new(sys: &SystemSpec, state: &TourState, cfg: &QuadratureConfig) -> Result<Self> {
        state.check(sys)?;
        let terms = sys
            .queues()
            .iter()
            .zip(&state.n)
            .map(|(q, &n)| {
                let p = completion_probability(&q.service, &q.visit, cfg)?;
                let e_min = expected_min(&q.service, &q.visit, cfg)?;
                let (span, approach) = match state.mode {
                    TourMode::Serial => (q.visit.mean() + q.switch.mean(), 0.0),
                    TourMode::CentralPoint => {
                        let e = q.approach.as_ref().map_or(0.0, |d| d.mean());
                        let r = q.return_trip.as_ref().map_or(0.0, |d| d.mean());
                        (e + q.visit.mean() + r, e)
                    }
                };
                Ok(QueueTerms {
                    lambda: q.arrival_rate,
                    p,
                    n: n as f64,
                    in_visit: (q.arrival_rate * (q.visit.mean() - e_min)).max(0.0),
                    span,
                    approach,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { terms, mode: state.mode })
    }

    fn index(&self, i: usize) -> f64 {
        let t = &self.terms[i];
        let rate = t.lambda * t.p;
        if rate == 0.0 {
            0.0
        } else {
            rate / t.span
        }
    }

    fn constant(&self, visited: &[usize]) -> f64 {
        visited
            .iter()
            .map(|&i| {
                let t = &self.terms[i];
                (t.n + t.lambda * t.approach) * t.p + t.in_visit
            })
            .sum()
    }

    fn per_queue(&self, order: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; self.terms.len()];
        let mut elapsed = 0.0;
        for &i in order {
            let t = &self.terms[i];
            out[i] = (t.n + t.lambda * (elapsed + t.approach)) * t.p + t.in_visit;
            elapsed += t.span;
        }
        out
    }

    fn total(&self, order: &[usize]) -> f64 {
        self.per_queue(order).iter().sum()
    }

    fn report(&self, order: &[usize]) -> ThroughputReport {
        let per_queue = self.per_queue(order);
        ThroughputReport {
            order: order.to_vec(),
            mode: self.mode,
            expected: per_queue.iter().sum(),
            per_queue,
            indices: (0..self.terms.len()).map(|i| self.index(i)).collect(),
            constant: self.constant(order),
        }
    }
}

/// `E[θ]` of the tour `order` (0-based queue numbers) from `state`.
pub fn expected_throughput(
    sys: &SystemSpec,
    state: &TourState,
    order: &[usize],
    cfg: &QuadratureConfig,
) -> Result<ThroughputReport> {
    let eval = Evaluator::new(sys, state, cfg)?;
    state.check_order(order)?;
    Ok(eval.report(order))
}

/// The index-rule order: increasing index for `Max`, decreasing for `Min`,
/// ties kept in ascending queue number.
pub fn optimal_order(
    sys: &SystemSpec,
    state: &TourState,
    objective: Objective,
    cfg: &QuadratureConfig,
) -> Result<ThroughputReport> {
    let eval = Evaluator::new(sys, state, cfg)?;
    let mut order = state.visited();
    order.sort_by(|&a, &b| {
        let by_index = eval.index(a).total_cmp(&eval.index(b));
        match objective {
            Objective::Max => by_index,
            Objective::Min => by_index.reverse(),
        }
    });
    Ok(eval.report(&order))
}

/// Evaluates every order of the visited queues.
pub fn brute_force_order(
    sys: &SystemSpec,
    state: &TourState,
    objective: Objective,
    cfg: &QuadratureConfig,
) -> Result<BruteForceReport> {
    let eval = Evaluator::new(sys, state, cfg)?;
    let visited = state.visited();
    if visited.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::Unsupported(format!(
            "brute force is limited to {BRUTE_FORCE_LIMIT} visited queues (got {}); use optimal_order",
            visited.len()
        )));
    }
    let k = visited.len();
    let mut ranking: Vec<(Vec<usize>, f64)> = if k == 0 {
        vec![(Vec::new(), 0.0)]
    } else {
        (0..k)
            .into_par_iter()
            .flat_map_iter(|first| {
                let rest: Vec<usize> = visited.iter().copied().filter(|&q| q != visited[first]).collect();
                let head = visited[first];
                let eval = &eval;
                rest.into_iter().permutations(k - 1).map(move |tail| {
                    let mut order = Vec::with_capacity(k);
                    order.push(head);
                    order.extend(tail);
                    let v = eval.total(&order);
                    (order, v)
                })
            })
            .collect()
    };
    let better = |a: f64, b: f64| match objective {
        Objective::Max => b.total_cmp(&a),
        Objective::Min => a.total_cmp(&b),
    };
    ranking.sort_by(|x, y| better(x.1, y.1).then_with(|| x.0.cmp(&y.0)));
    let best_value = ranking[0].1;
    let scale = best_value.abs().max(1.0);
    let optimal_orders = ranking
        .iter()
        .take_while(|(_, v)| (v - best_value).abs() <= TIE_TOLERANCE * scale)
        .map(|(o, _)| o.clone())
        .collect();
    Ok(BruteForceReport {
        best: eval.report(&ranking[0].0),
        optimal_orders,
        ranking,
    })
}

/// `(1, 3, 2)` style rendering with 1-based queue numbers.
pub fn one_based(order: &[usize]) -> String {
    format!("({})", order.iter().map(|i| (i + 1).to_string()).join(", "))
}

impl BruteForceReport {
    pub fn contains_optimum(&self, order: &[usize]) -> bool {
        self.optimal_orders.iter().any(|o| o == order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Distribution;
    use crate::system::QueueSpec;

    fn exp(r: f64) -> Distribution {
        Distribution::exponential(r).unwrap()
    }

    fn det(v: f64) -> Distribution {
        Distribution::deterministic(v).unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn three_queues() -> SystemSpec {
        SystemSpec::new(vec![
            QueueSpec::new(0.5, exp(1.0), exp(1.0), det(0.5)),
            QueueSpec::new(1.2, exp(2.0), exp(0.5), det(0.2)),
            QueueSpec::new(0.3, exp(3.0), exp(1.5), det(0.1)),
        ])
        .unwrap()
    }

    #[test]
    fn no_arrivals_is_order_independent() {
        let sys = SystemSpec::new(vec![
            QueueSpec::new(0.0, exp(1.0), exp(1.0), det(0.5)),
            QueueSpec::new(0.0, exp(2.0), exp(1.0), det(0.5)),
        ])
        .unwrap();
        let state = TourState::serial(vec![3, 5]);
        let a = expected_throughput(&sys, &state, &[0, 1], &cfg()).unwrap();
        let b = expected_throughput(&sys, &state, &[1, 0], &cfg()).unwrap();
        let want = 3.0 * 0.5 + 5.0 * 2.0 / 3.0;
        assert!((a.expected - want).abs() < 1e-12);
        assert!((b.expected - want).abs() < 1e-12);
        assert!((a.constant - want).abs() < 1e-12);
    }

    #[test]
    fn identical_queues_tie() {
        let q = QueueSpec::new(0.7, exp(1.0), exp(2.0), det(0.3));
        let sys = SystemSpec::new(vec![q.clone(), q]).unwrap();
        let state = TourState::serial(vec![1, 4]);
        let a = expected_throughput(&sys, &state, &[0, 1], &cfg()).unwrap();
        let b = expected_throughput(&sys, &state, &[1, 0], &cfg()).unwrap();
        assert!((a.expected - b.expected).abs() < 1e-12);
        assert_eq!(optimal_order(&sys, &state, Objective::Max, &cfg()).unwrap().order, vec![0, 1]);
        assert_eq!(brute_force_order(&sys, &state, Objective::Max, &cfg()).unwrap().optimal_orders.len(), 2);
    }

    #[test]
    fn index_example() {
        // Indices 0.5, 0.2 and 0.35 with p = 1 and unit spans.
        let sys = SystemSpec::new(vec![
            QueueSpec::new(0.5, det(0.1), det(0.5), det(0.5)),
            QueueSpec::new(0.2, det(0.1), det(0.5), det(0.5)),
            QueueSpec::new(0.35, det(0.1), det(0.5), det(0.5)),
        ])
        .unwrap();
        let state = TourState::serial(vec![0, 0, 0]);
        let best = optimal_order(&sys, &state, Objective::Max, &cfg()).unwrap();
        assert_eq!(best.order, vec![1, 2, 0]);
        let brute = brute_force_order(&sys, &state, Objective::Max, &cfg()).unwrap();
        assert_eq!(brute.optimal_orders, vec![vec![1, 2, 0]]);
        assert_eq!(brute.ranking.len(), 6);
        let worst = optimal_order(&sys, &state, Objective::Min, &cfg()).unwrap();
        assert_eq!(worst.order, vec![0, 2, 1]);
    }

    #[test]
    fn per_queue_sums_to_total() {
        let sys = three_queues();
        let state = TourState::serial(vec![2, 0, 7]);
        let r = expected_throughput(&sys, &state, &[2, 0, 1], &cfg()).unwrap();
        assert!((r.per_queue.iter().sum::<f64>() - r.expected).abs() < 1e-12);
        assert!(r.per_queue.iter().all(|&v| v >= 0.0));
        assert!(r.expected >= r.constant);
    }

    #[test]
    fn bad_orders_rejected() {
        let sys = three_queues();
        let state = TourState::serial(vec![0, 0, 0]);
        assert!(expected_throughput(&sys, &state, &[0, 1], &cfg()).is_err());
        assert!(expected_throughput(&sys, &state, &[0, 1, 1], &cfg()).is_err());
        assert!(expected_throughput(&sys, &TourState::serial(vec![0, 0]), &[0, 1, 2], &cfg()).is_err());
        assert!(matches!(
            expected_throughput(&sys, &TourState::central_point(vec![1, 1, 1]), &[0, 1, 2], &cfg()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn central_point_visits_non_empty_queues() {
        let sys = SystemSpec::new(
            three_queues()
                .queues()
                .iter()
                .map(|q| q.clone().with_central_point(det(0.2), exp(4.0)))
                .collect(),
        )
        .unwrap();
        let state = TourState::central_point(vec![3, 0, 1]);
        let best = optimal_order(&sys, &state, Objective::Max, &cfg()).unwrap();
        assert_eq!(best.order.len(), 2);
        assert!(expected_throughput(&sys, &state, &[0, 1, 2], &cfg()).is_err());
        let brute = brute_force_order(&sys, &state, Objective::Max, &cfg()).unwrap();
        assert!(brute.contains_optimum(&best.order));

        let empty = TourState::central_point(vec![0, 0, 0]);
        let r = optimal_order(&sys, &empty, Objective::Max, &cfg()).unwrap();
        assert!(r.order.is_empty());
        assert_eq!(r.expected, 0.0);
    }

    #[test]
    fn objective_parsing() {
        assert_eq!("max".parse::<Objective>().unwrap(), Objective::Max);
        assert_eq!("min".parse::<Objective>().unwrap(), Objective::Min);
        assert!("best".parse::<Objective>().is_err());
    }
}
